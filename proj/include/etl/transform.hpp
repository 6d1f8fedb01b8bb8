#pragma once

#include <map>
#include <optional>
#include <string>

#include "etl/config.hpp"
#include "etl/records.hpp"
#include "etl/store.hpp"

namespace etl {

struct TransformStats {
  std::string target;
  std::map<OpCode, std::size_t> op_counts;
  std::size_t skipped = 0;  // deletes of never-seen records
  std::size_t rows_in = 0;

  std::size_t count(OpCode op) const {
    auto it = op_counts.find(op);
    return it == op_counts.end() ? 0 : it->second;
  }
};

// Change detection for one deduplicated source row: decides the operation
// code against the SOR, allocates or reuses the surrogate key, and merges
// the warehouse-shaped row into the staging table. Returns the stored row,
// or nothing when a delete refers to a record the warehouse never saw.
std::optional<StagingRecord> transform_record(Store& store, const ChangeRecord& row,
                                              const TargetMapping& target);

// Runs change detection over every staged source row mapped onto the
// target: source mappings in config order, rows in ascending business-key
// order. Aborts atomically; the staging table is reset to its pre-job state
// on error.
TransformStats transform_table(Store& store, const MappingConfig& cfg,
                               const TargetMapping& target, Date batch_date);

// Projects one staged source row to warehouse shape via the column map.
ChangeRecord map_source_row(const CsvTable& lv1, std::size_t row_index,
                            const TargetMapping& target, const SourceMapping& mapping);

}  // namespace etl
