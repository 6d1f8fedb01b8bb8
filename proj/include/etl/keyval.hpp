#pragma once

#include <string>
#include <vector>

#include "etl/config.hpp"
#include "etl/records.hpp"
#include "etl/store.hpp"

namespace etl {

struct ValidateStats {
  std::string target;
  std::size_t rows_examined = 0;
  std::size_t resolved_from_sor = 0;
  std::size_t resolved_from_lv2 = 0;
  std::size_t augments_created = 0;
};

struct KeyValidationResult {
  StagingRecord record;
  std::vector<StagingRecord> augments;  // placeholders added to referenced tables
};

// Resolves each foreign-key business value of one staging row to a
// surrogate key: referenced SOR first, then the referenced staging table,
// else a new augment placeholder is inserted there and its key used.
// Rows with op E or A carry no key data and are skipped by the caller.
KeyValidationResult validate_keys_record(Store& store, const StagingRecord& rec,
                                         const TargetMapping& target, ValidateStats& stats);

// Validates every eligible staged row of the target and writes the
// resolved keys back to the staging table.
ValidateStats validate_keys_table(Store& store, const MappingConfig& cfg,
                                  const TargetMapping& target);

}  // namespace etl
