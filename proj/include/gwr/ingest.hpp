#pragma once

#include "ingest/column_map.hpp"
#include "ingest/crime_type.hpp"
#include "ingest/csv.hpp"
#include "ingest/model_rows.hpp"
#include "ingest/parsers.hpp"
#include "ingest/records.hpp"
#include "ingest/standardize.hpp"
#include "ingest/timestamp.hpp"
#include "ingest/weather_table.hpp"
