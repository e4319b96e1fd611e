#pragma once

#include "stats/correlation.hpp"
#include "stats/histogram.hpp"
