#pragma once

#include "service/risk.hpp"
#include "service/server.hpp"
