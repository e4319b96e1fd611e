#pragma once

#include "experiment/bundle.hpp"
#include "experiment/evaluation.hpp"
#include "experiment/heatmap.hpp"
#include "experiment/split.hpp"
#include "experiment/synthetic.hpp"
#include "experiment/synthetic_city.hpp"
