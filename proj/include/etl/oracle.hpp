#pragma once

#include <map>
#include <string>
#include <vector>

#include "etl/config.hpp"
#include "etl/records.hpp"
#include "etl/store.hpp"

namespace etl::oracle {

// Brute-force reference model: every source transaction is applied one at a
// time, in order, directly to an in-memory warehouse image, bypassing the
// staging pipeline entirely. Agreement between this replay and the batch
// pipeline is the end-to-end correctness check; the replay deliberately
// reimplements the semantics instead of calling the pipeline modules.

// One source transaction, source-shaped: raw column values of one feed row.
struct SourceTx {
  std::string feed_id;
  std::map<std::string, std::string> values;  // includes tx_type and tx_date
};

// Warehouse image keyed by target: static rows plus history versions.
struct SorState {
  std::map<std::string, std::pair<std::vector<StaticRecord>, std::vector<HistoryRecord>>>
      tables;
};

// Replays the full feed history day by day. Per day the latest action per
// feed business key wins (mirroring daily extraction), contributions from
// several feeds onto one target key coalesce in mapping order, and foreign
// keys resolve against the current image, creating blank placeholders for
// references that do not exist yet.
SorState replay_naive(const std::vector<SourceTx>& history, const MappingConfig& cfg);

// Relabels surrogate keys by first appearance in business-key order on both
// sides, then reports row-level differences; empty means the states are
// equivalent up to surrogate numbering.
std::vector<std::string> compare_states(const SorState& a, const SorState& b,
                                        const MappingConfig& cfg);

// Reads the pipeline's persisted warehouse image into the oracle's shape.
SorState read_sor_state(Store& store, const MappingConfig& cfg);

// History file support for the CLI: a CSV with a leading `feed` column
// followed by the union of all feed columns; row order is the global
// transaction order.
std::vector<SourceTx> read_history_file(const std::filesystem::path& path,
                                        const MappingConfig& cfg);
void write_history_file(const std::filesystem::path& path,
                        const std::vector<SourceTx>& history, const MappingConfig& cfg);

}  // namespace etl::oracle
