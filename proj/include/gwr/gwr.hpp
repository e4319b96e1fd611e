#pragma once

#include "core/bandwidth.hpp"
#include "core/dataset.hpp"
#include "core/errors.hpp"
#include "core/geo.hpp"
#include "core/kernel.hpp"
#include "core/local_fit.hpp"
#include "core/metrics.hpp"
#include "core/model.hpp"
#include "core/serialize.hpp"
