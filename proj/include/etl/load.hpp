#pragma once

#include <map>
#include <string>

#include "etl/config.hpp"
#include "etl/records.hpp"
#include "etl/store.hpp"

namespace etl {

struct LoadStats {
  std::string target;
  std::map<OpCode, std::size_t> op_counts;
  std::size_t static_inserted = 0;
  std::size_t static_updated = 0;
  std::size_t history_inserted = 0;
  std::size_t history_closed = 0;

  std::size_t count(OpCode op) const {
    auto it = op_counts.find(op);
    return it == op_counts.end() ? 0 : it->second;
  }
};

// Applies one staged row to the SOR tables according to its operation code.
// batch_date stamps the static row's last-transaction-date column.
void load_record(Store& store, const StagingRecord& rec, const TargetMapping& target,
                 Date batch_date, LoadStats& stats);

// Applies the whole staging table: augment placeholders first, then the
// remaining rows in ascending business-key order. On success the staging
// table is archived under the batch date and cleared; on error the target's
// SOR tables are restored to their pre-load state.
LoadStats load_table(Store& store, const MappingConfig& cfg, const TargetMapping& target,
                     Date batch_date);

}  // namespace etl
