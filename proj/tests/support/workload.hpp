#pragma once

#include <filesystem>
#include <memory>
#include <vector>

#include "etl/config.hpp"
#include "etl/oracle.hpp"
#include "etl/orchestrate.hpp"
#include "etl/store.hpp"

namespace etl::testing {

// A generated multi-batch scenario over three chained targets
// (child -> mid -> top), with feeds written to disk and the same
// transactions kept as a global history for the naive replay.
struct Workload {
  std::filesystem::path dir;  // holds config.json and feeds/
  MappingConfig cfg;
  std::vector<Date> batch_dates;
  std::vector<oracle::SourceTx> history;
};

struct WorkloadParams {
  int batches = 10;
  int top_entities = 15;
  int mid_entities = 15;
  int child_entities = 20;
  double act_probability = 0.5;
  // Action mix among acting entities.
  double p_insert = 0.50;
  double p_update = 0.35;  // remainder deletes
  double early_arriving = 0.20;  // chance a reference points at an unseen parent
};

Workload make_workload(const std::filesystem::path& dir, unsigned seed,
                       const WorkloadParams& params = {});

// Runs every batch through the pipeline into dir/<store_name>. Throws if a
// batch aborts. Returns the store for further inspection.
std::unique_ptr<Store> run_workload(const Workload& workload, const std::string& store_name,
                                    const RunOptions& options = {});

// Pipeline end state vs naive replay; empty result means equivalent.
std::vector<std::string> pipeline_vs_oracle(const Workload& workload, Store& store);

}  // namespace etl::testing
