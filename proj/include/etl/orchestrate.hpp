#pragma once

#include <functional>
#include <string>

#include "etl/config.hpp"
#include "etl/report.hpp"
#include "etl/store.hpp"

namespace etl {

struct RunOptions {
  int parallelism = 1;
  // 0 runs jobs in stable config order; any other value shuffles the choice
  // among ready jobs deterministically (used to probe order-independence).
  unsigned order_seed = 0;
  // Test hook, called as each pipeline job starts; throwing injects a
  // failure at that point.
  std::function<void(const std::string& phase, const std::string& target)> fault_hook;
};

// Runs one daily batch end to end: extract every feed, then a per-table job
// graph over transform -> validate-keys -> load, where validation of a
// target precedes the load of every target it references. Jobs without
// write conflicts run concurrently up to `parallelism`. A batch-start SOR
// snapshot (keyed by the batch date) backs whole-batch rollback: on any
// phase failure the SOR is restored and the report comes back aborted.
BatchReport run_batch(Store& store, const MappingConfig& cfg, Date batch_date,
                      const RunOptions& options = {});

// Re-executes a batch from its preserved ssa1 tables: restores the
// batch-start snapshot, clears staging, and reruns transform/validate/load
// deterministically. The result matches an uninterrupted original run.
BatchReport rerun_batch(Store& store, const MappingConfig& cfg, Date batch_date);

}  // namespace etl
