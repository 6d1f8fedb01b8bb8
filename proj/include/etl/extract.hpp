#pragma once

#include <filesystem>
#include <string>

#include "etl/config.hpp"
#include "etl/store.hpp"

namespace etl {

struct IngestStats {
  std::string feed_id;
  std::size_t rows_read = 0;
  std::size_t rows_kept = 0;
  std::size_t rows_superseded = 0;
};

// Stages a change feed into ssa1, keeping only the latest action per
// business key for the day: greatest (tx_date, line number) wins. Re-running
// replaces the staged table.
IngestStats ingest_change_feed(Store& store, const MappingConfig& cfg,
                               const std::string& feed_id,
                               const std::filesystem::path& feed_file, Date batch_date);

}  // namespace etl
