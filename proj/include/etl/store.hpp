#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "etl/config.hpp"
#include "etl/csv.hpp"
#include "etl/records.hpp"

namespace etl {

// File-backed tabular store. Layout under the root directory:
//
//   ssa1/<feed>.csv                      source-shaped staged changes
//   ssa2/<target>.csv                    warehouse-shaped staging rows
//   ssa2/archive/<batch-date>/<target>.csv
//   sor/<target>.static.csv              non-versioned attributes
//   sor/<target>.history.csv             versioned attributes
//   snapshots/<id>/                      byte-exact SOR captures
//   dds/                                 downstream extracts
//   meta.json                            sequences, batch ledger
//
// Tables are cached in memory and written back canonically by flush().
// Surrogate-key sequences persist before a drawn value is returned, so no
// value repeats across process restarts. All public methods are safe to
// call concurrently; the orchestrator additionally guarantees at most one
// writer per table.
class Store {
 public:
  Store(std::filesystem::path root, const MappingConfig& cfg);

  const std::filesystem::path& root() const { return root_; }

  // --- SSA Lv1 -------------------------------------------------------
  void write_lv1(const std::string& feed_id, CsvTable table);
  const CsvTable& read_lv1(const std::string& feed_id);
  bool lv1_exists(const std::string& feed_id) const;

  // --- SSA Lv2 -------------------------------------------------------
  std::optional<StagingRecord> lookup_lv2_by_bk(const std::string& target, const BkTuple& bk);
  // Merge-or-insert by business key; non-absent fields of rec win, the
  // existing surrogate key is kept, and merging onto an augment placeholder
  // clears its flag. Returns the stored row.
  StagingRecord upsert_lv2(const std::string& target, const StagingRecord& rec);
  std::vector<StagingRecord> lv2_rows(const std::string& target);
  void replace_lv2(const std::string& target, std::vector<StagingRecord> rows);
  // Marks the table dirty so flush materializes it even when empty.
  void touch_lv2(const std::string& target);
  void clear_lv2(const std::string& target);
  void clear_all_lv2();
  void archive_lv2(const std::string& target, Date batch_date);

  // --- SOR -----------------------------------------------------------
  std::optional<StaticRecord> lookup_sor_static_by_bk(const std::string& target,
                                                      const BkTuple& bk);
  std::optional<StaticRecord> lookup_sor_static_by_sk(const std::string& target, Sk sk);
  std::optional<HistoryRecord> lookup_open_history(const std::string& target, Sk sk);
  std::vector<StaticRecord> static_rows(const std::string& target);
  std::vector<HistoryRecord> history_rows(const std::string& target);

  void insert_static(const std::string& target, const StaticRecord& rec);
  void update_static(const std::string& target, const StaticRecord& rec);  // by sk
  void insert_history(const std::string& target, const HistoryRecord& rec);
  // Stamps ed on the (sk, bd) version; false when no such row exists.
  bool close_history(const std::string& target, Sk sk, Date bd, Date ed);

  // In-memory capture of one target's SOR tables, for atomic table loads.
  struct SorTableBackup {
    std::string target;
    std::vector<StaticRecord> static_rows;
    std::vector<HistoryRecord> history_rows;
  };
  SorTableBackup backup_sor_table(const std::string& target);
  void restore_sor_table(const SorTableBackup& backup);

  // --- sequences -----------------------------------------------------
  Sk next_surrogate_key(const std::string& target);
  Sk peek_sequence(const std::string& target);
  void seed_sequence(const std::string& target, Sk next);

  // --- snapshots -----------------------------------------------------
  // Captures sor/ files byte-exactly, plus the sequence state.
  std::string snapshot_sor(const std::string& id);
  void restore_sor(const std::string& id);
  bool snapshot_exists(const std::string& id) const;

  // --- batch metadata --------------------------------------------------
  Date lv1_batch_date();
  void set_lv1_batch_date(Date d);
  struct BatchEntry {
    Date date = kDateAbsent;
    std::string outcome;  // running | success | aborted
  };
  std::vector<BatchEntry> batch_ledger();
  void record_batch(Date date, const std::string& outcome);

  void flush();

 private:
  struct Lv2Table {
    std::vector<StagingRecord> rows;
    std::map<std::string, std::size_t> by_bk;
    bool dirty = false;
  };
  struct StaticTable {
    std::vector<StaticRecord> rows;
    std::map<std::string, std::size_t> by_bk;
    std::map<Sk, std::size_t> by_sk;
    bool dirty = false;
  };
  struct HistoryTable {
    std::vector<HistoryRecord> rows;
    bool dirty = false;
  };

  const TargetMapping& target_schema(const std::string& name) const;
  std::filesystem::path lv1_path(const std::string& feed) const;
  std::filesystem::path lv2_path(const std::string& target) const;
  std::filesystem::path static_path(const std::string& target) const;
  std::filesystem::path history_path(const std::string& target) const;

  Lv2Table& lv2(const std::string& target);
  StaticTable& sor_static(const std::string& target);
  HistoryTable& sor_history(const std::string& target);
  void index_static(StaticTable& table, const std::string& target);
  void index_lv2(Lv2Table& table, const std::string& target);
  void load_meta();
  void persist_meta();
  void flush_locked();
  void drop_sor_caches();

  std::filesystem::path root_;
  const MappingConfig& cfg_;
  mutable std::mutex mutex_;

  std::map<std::string, CsvTable> lv1_cache_;
  std::map<std::string, Lv2Table> lv2_cache_;
  std::map<std::string, StaticTable> static_cache_;
  std::map<std::string, HistoryTable> history_cache_;

  std::map<std::string, Sk> sequences_;
  Date lv1_batch_date_ = kDateAbsent;
  std::vector<BatchEntry> batches_;
};

}  // namespace etl
