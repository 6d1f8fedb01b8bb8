#pragma once

#include <string>

#include "etl/config.hpp"
#include "etl/csv.hpp"
#include "etl/store.hpp"

namespace etl {

// Downstream extraction from SOR toward data marts, at flat-file scale.

// Dimension extraction: rows whose last transaction date is at or after the
// job start date. Non-SCD mode emits one row per surrogate key (static
// attributes joined with the open version) and drops deleted entities; SCD
// mode emits every history version of the qualifying keys.
CsvTable extract_dimension(Store& store, const MappingConfig& cfg, const std::string& target,
                           Date job_start_date, bool scd);

// Fact extraction: history rows whose affected-date column is at or after
// the earliest affected date. The rebuild flag records that the caller is
// recomputing derived measures over the same window.
CsvTable extract_fact(Store& store, const MappingConfig& cfg, const std::string& target,
                      const std::string& affected_date_column, Date earliest_affected,
                      bool rebuild);

// Writes an extract into the dds/ area and returns the file path.
std::filesystem::path write_dds_file(Store& store, const std::string& target,
                                     const std::string& kind, const CsvTable& table);

}  // namespace etl
