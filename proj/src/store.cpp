#include "etl/store.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "etl/errors.hpp"

namespace etl {

namespace {

using nlohmann::json;

void ensure_dir(const std::filesystem::path& p) {
  std::error_code ec;
  std::filesystem::create_directories(p, ec);
  if (ec)
    throw Error(ErrorCode::PersistenceError, "mkdir " + p.string() + ": " + ec.message());
}

void atomic_write_text(const std::filesystem::path& path, const std::string& text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::PersistenceError, "cannot write " + tmp.string());
    out << text;
    if (!out) throw Error(ErrorCode::PersistenceError, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec)
    throw Error(ErrorCode::PersistenceError, "rename to " + path.string() + ": " + ec.message());
}

}  // namespace

Store::Store(std::filesystem::path root, const MappingConfig& cfg)
    : root_(std::move(root)), cfg_(cfg) {
  for (const char* area : {"ssa1", "ssa2", "sor", "snapshots", "dds"})
    ensure_dir(root_ / area);
  load_meta();
}

const TargetMapping& Store::target_schema(const std::string& name) const {
  const TargetMapping* t = cfg_.find_target(name);
  if (!t) throw Error(ErrorCode::TableNotFound, "target '" + name + "' not in config");
  return *t;
}

std::filesystem::path Store::lv1_path(const std::string& feed) const {
  return root_ / "ssa1" / (feed + ".csv");
}
std::filesystem::path Store::lv2_path(const std::string& target) const {
  return root_ / "ssa2" / (target + ".csv");
}
std::filesystem::path Store::static_path(const std::string& target) const {
  return root_ / "sor" / (target + ".static.csv");
}
std::filesystem::path Store::history_path(const std::string& target) const {
  return root_ / "sor" / (target + ".history.csv");
}

// --- SSA Lv1 -----------------------------------------------------------

void Store::write_lv1(const std::string& feed_id, CsvTable table) {
  std::lock_guard lock(mutex_);
  cfg_.feed(feed_id);  // UnknownFeed for undeclared ids
  write_csv_file(lv1_path(feed_id), table);
  lv1_cache_[feed_id] = std::move(table);
}

const CsvTable& Store::read_lv1(const std::string& feed_id) {
  std::lock_guard lock(mutex_);
  cfg_.feed(feed_id);
  auto it = lv1_cache_.find(feed_id);
  if (it != lv1_cache_.end()) return it->second;
  auto path = lv1_path(feed_id);
  if (!std::filesystem::exists(path))
    throw Error(ErrorCode::TableNotFound, "ssa1/" + feed_id + " has not been ingested");
  auto [ins, _] = lv1_cache_.emplace(feed_id, read_csv_file(path));
  return ins->second;
}

bool Store::lv1_exists(const std::string& feed_id) const {
  return std::filesystem::exists(lv1_path(feed_id));
}

// --- SSA Lv2 -----------------------------------------------------------

void Store::index_lv2(Lv2Table& table, const std::string& target) {
  table.by_bk.clear();
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    auto [it, inserted] = table.by_bk.emplace(bk_key(table.rows[i].bk), i);
    if (!inserted)
      throw Error(ErrorCode::StoreCorruption, "ssa2/" + target + ": duplicate business key " +
                                                  bk_display(table.rows[i].bk));
  }
}

Store::Lv2Table& Store::lv2(const std::string& target) {
  auto it = lv2_cache_.find(target);
  if (it != lv2_cache_.end()) return it->second;
  const TargetMapping& schema = target_schema(target);
  Lv2Table table;
  auto path = lv2_path(target);
  if (std::filesystem::exists(path)) {
    CsvTable csv = read_csv_file(path);
    if (csv.header != schema.lv2_columns())
      throw Error(ErrorCode::StoreCorruption, "ssa2/" + target + ": header mismatch");
    for (const auto& row : csv.rows) table.rows.push_back(staging_from_row(row, schema));
  }
  index_lv2(table, target);
  return lv2_cache_.emplace(target, std::move(table)).first->second;
}

std::optional<StagingRecord> Store::lookup_lv2_by_bk(const std::string& target,
                                                     const BkTuple& bk) {
  std::lock_guard lock(mutex_);
  Lv2Table& table = lv2(target);
  auto it = table.by_bk.find(bk_key(bk));
  if (it == table.by_bk.end()) return std::nullopt;
  return table.rows[it->second];
}

StagingRecord Store::upsert_lv2(const std::string& target, const StagingRecord& rec) {
  std::lock_guard lock(mutex_);
  Lv2Table& table = lv2(target);
  auto it = table.by_bk.find(bk_key(rec.bk));
  StagingRecord stored;
  if (it == table.by_bk.end()) {
    if (auto why = staging_violation(rec))
      throw Error(ErrorCode::InvariantViolation, "ssa2/" + target + " " +
                                                     bk_display(rec.bk) + ": " + *why);
    table.rows.push_back(rec);
    table.by_bk.emplace(bk_key(rec.bk), table.rows.size() - 1);
    stored = rec;
  } else {
    StagingRecord merged = table.rows[it->second];
    if (rec.sk != kSkAbsent && rec.sk != merged.sk)
      throw Error(ErrorCode::InvariantViolation,
                  "ssa2/" + target + " " + bk_display(rec.bk) + ": surrogate key clash (" +
                      std::to_string(merged.sk) + " vs " + std::to_string(rec.sk) + ")");
    if (merged.op == OpCode::A && rec.op == OpCode::A) return merged;  // redundant augment
    merged.op = rec.op;
    merged.af = rec.af;
    if (rec.sor_bd != kDateAbsent) merged.sor_bd = rec.sor_bd;
    if (rec.ed != kDateAbsent) merged.ed = rec.ed;
    if (rec.new_bd != kDateAbsent) merged.new_bd = rec.new_bd;
    for (const auto& [col, val] : rec.data)
      if (!val.empty()) merged.data[col] = val;
    for (const auto& [col, val] : rec.fk_values)
      if (!val.empty()) merged.fk_values[col] = val;
    for (const auto& [col, sk] : rec.resolved_keys) merged.resolved_keys[col] = sk;
    if (auto why = staging_violation(merged))
      throw Error(ErrorCode::InvariantViolation, "ssa2/" + target + " " +
                                                     bk_display(rec.bk) + ": " + *why);
    table.rows[it->second] = merged;
    stored = merged;
  }
  table.dirty = true;
  return stored;
}

std::vector<StagingRecord> Store::lv2_rows(const std::string& target) {
  std::lock_guard lock(mutex_);
  return lv2(target).rows;
}

void Store::replace_lv2(const std::string& target, std::vector<StagingRecord> rows) {
  std::lock_guard lock(mutex_);
  Lv2Table& table = lv2(target);
  table.rows = std::move(rows);
  index_lv2(table, target);
  table.dirty = true;
}

void Store::touch_lv2(const std::string& target) {
  std::lock_guard lock(mutex_);
  lv2(target).dirty = true;
}

void Store::clear_lv2(const std::string& target) { replace_lv2(target, {}); }

void Store::clear_all_lv2() {
  for (const auto& t : cfg_.targets) clear_lv2(t.name);
}

void Store::archive_lv2(const std::string& target, Date batch_date) {
  std::lock_guard lock(mutex_);
  flush_locked();
  auto dir = root_ / "ssa2" / "archive" / format_date(batch_date);
  ensure_dir(dir);
  auto live = lv2_path(target);
  if (!std::filesystem::exists(live)) {
    // Never staged: archive an empty table for the batch record.
    CsvTable empty;
    empty.header = target_schema(target).lv2_columns();
    write_csv_file(dir / (target + ".csv"), empty);
    return;
  }
  std::filesystem::copy_file(live, dir / (target + ".csv"),
                             std::filesystem::copy_options::overwrite_existing);
}

// --- SOR ----------------------------------------------------------------

void Store::index_static(StaticTable& table, const std::string& target) {
  table.by_bk.clear();
  table.by_sk.clear();
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& rec = table.rows[i];
    if (!table.by_bk.emplace(bk_key(rec.bk), i).second)
      throw Error(ErrorCode::StoreCorruption,
                  "sor/" + target + ".static: duplicate business key " + bk_display(rec.bk));
    if (!table.by_sk.emplace(rec.sk, i).second)
      throw Error(ErrorCode::StoreCorruption, "sor/" + target + ".static: duplicate sk " +
                                                  std::to_string(rec.sk));
  }
}

Store::StaticTable& Store::sor_static(const std::string& target) {
  auto it = static_cache_.find(target);
  if (it != static_cache_.end()) return it->second;
  const TargetMapping& schema = target_schema(target);
  StaticTable table;
  auto path = static_path(target);
  if (std::filesystem::exists(path)) {
    CsvTable csv = read_csv_file(path);
    if (csv.header != schema.static_table_columns())
      throw Error(ErrorCode::StoreCorruption, "sor/" + target + ".static: header mismatch");
    for (const auto& row : csv.rows) table.rows.push_back(static_from_row(row, schema));
  }
  index_static(table, target);
  return static_cache_.emplace(target, std::move(table)).first->second;
}

Store::HistoryTable& Store::sor_history(const std::string& target) {
  auto it = history_cache_.find(target);
  if (it != history_cache_.end()) return it->second;
  const TargetMapping& schema = target_schema(target);
  HistoryTable table;
  auto path = history_path(target);
  if (std::filesystem::exists(path)) {
    CsvTable csv = read_csv_file(path);
    if (csv.header != schema.history_table_columns())
      throw Error(ErrorCode::StoreCorruption, "sor/" + target + ".history: header mismatch");
    for (const auto& row : csv.rows) table.rows.push_back(history_from_row(row, schema));
  }
  return history_cache_.emplace(target, std::move(table)).first->second;
}

std::optional<StaticRecord> Store::lookup_sor_static_by_bk(const std::string& target,
                                                           const BkTuple& bk) {
  std::lock_guard lock(mutex_);
  StaticTable& table = sor_static(target);
  auto it = table.by_bk.find(bk_key(bk));
  if (it == table.by_bk.end()) return std::nullopt;
  return table.rows[it->second];
}

std::optional<StaticRecord> Store::lookup_sor_static_by_sk(const std::string& target, Sk sk) {
  std::lock_guard lock(mutex_);
  StaticTable& table = sor_static(target);
  auto it = table.by_sk.find(sk);
  if (it == table.by_sk.end()) return std::nullopt;
  return table.rows[it->second];
}

std::optional<HistoryRecord> Store::lookup_open_history(const std::string& target, Sk sk) {
  std::lock_guard lock(mutex_);
  for (const auto& rec : sor_history(target).rows)
    if (rec.sk == sk && rec.ed == kOpenEndDate) return rec;
  return std::nullopt;
}

std::vector<StaticRecord> Store::static_rows(const std::string& target) {
  std::lock_guard lock(mutex_);
  return sor_static(target).rows;
}

std::vector<HistoryRecord> Store::history_rows(const std::string& target) {
  std::lock_guard lock(mutex_);
  return sor_history(target).rows;
}

void Store::insert_static(const std::string& target, const StaticRecord& rec) {
  std::lock_guard lock(mutex_);
  StaticTable& table = sor_static(target);
  if (table.by_sk.count(rec.sk))
    throw Error(ErrorCode::DuplicateStatic,
                "sor/" + target + ".static: sk " + std::to_string(rec.sk) + " already present");
  if (table.by_bk.count(bk_key(rec.bk)))
    throw Error(ErrorCode::DuplicateStatic, "sor/" + target + ".static: business key " +
                                                bk_display(rec.bk) + " already present");
  table.rows.push_back(rec);
  table.by_bk.emplace(bk_key(rec.bk), table.rows.size() - 1);
  table.by_sk.emplace(rec.sk, table.rows.size() - 1);
  table.dirty = true;
}

void Store::update_static(const std::string& target, const StaticRecord& rec) {
  std::lock_guard lock(mutex_);
  StaticTable& table = sor_static(target);
  auto it = table.by_sk.find(rec.sk);
  if (it == table.by_sk.end())
    throw Error(ErrorCode::StoreCorruption,
                "sor/" + target + ".static: update of unknown sk " + std::to_string(rec.sk));
  if (bk_key(table.rows[it->second].bk) != bk_key(rec.bk))
    throw Error(ErrorCode::StoreCorruption,
                "sor/" + target + ".static: business key change on sk " + std::to_string(rec.sk));
  table.rows[it->second] = rec;
  table.dirty = true;
}

void Store::insert_history(const std::string& target, const HistoryRecord& rec) {
  std::lock_guard lock(mutex_);
  HistoryTable& table = sor_history(target);
  table.rows.push_back(rec);
  table.dirty = true;
}

bool Store::close_history(const std::string& target, Sk sk, Date bd, Date ed) {
  std::lock_guard lock(mutex_);
  HistoryTable& table = sor_history(target);
  for (auto& rec : table.rows) {
    if (rec.sk == sk && rec.bd == bd) {
      rec.ed = ed;
      table.dirty = true;
      return true;
    }
  }
  return false;
}

Store::SorTableBackup Store::backup_sor_table(const std::string& target) {
  std::lock_guard lock(mutex_);
  return SorTableBackup{target, sor_static(target).rows, sor_history(target).rows};
}

void Store::restore_sor_table(const SorTableBackup& backup) {
  std::lock_guard lock(mutex_);
  StaticTable& st = sor_static(backup.target);
  st.rows = backup.static_rows;
  index_static(st, backup.target);
  st.dirty = true;
  HistoryTable& hist = sor_history(backup.target);
  hist.rows = backup.history_rows;
  hist.dirty = true;
}

// --- sequences -----------------------------------------------------------

Sk Store::next_surrogate_key(const std::string& target) {
  std::lock_guard lock(mutex_);
  target_schema(target);
  auto [it, _] = sequences_.try_emplace(target, 1);
  Sk value = it->second;
  it->second = value + 1;
  try {
    persist_meta();
  } catch (...) {
    it->second = value;
    throw;
  }
  return value;
}

Sk Store::peek_sequence(const std::string& target) {
  std::lock_guard lock(mutex_);
  auto it = sequences_.find(target);
  return it == sequences_.end() ? 1 : it->second;
}

void Store::seed_sequence(const std::string& target, Sk next) {
  std::lock_guard lock(mutex_);
  sequences_[target] = next;
  persist_meta();
}

// --- snapshots -------------------------------------------------------------

std::string Store::snapshot_sor(const std::string& id) {
  std::lock_guard lock(mutex_);
  flush_locked();
  auto dir = root_ / "snapshots" / id;
  std::error_code ec;
  std::filesystem::remove_all(dir, ec);
  ensure_dir(dir / "sor");
  for (const auto& entry : std::filesystem::directory_iterator(root_ / "sor")) {
    if (!entry.is_regular_file()) continue;
    std::filesystem::copy_file(entry.path(), dir / "sor" / entry.path().filename(),
                               std::filesystem::copy_options::overwrite_existing);
  }
  json j;
  j["sequences"] = json::object();
  for (const auto& [name, next] : sequences_) j["sequences"][name] = next;
  atomic_write_text(dir / "sequences.json", j.dump(2) + "\n");
  return id;
}

bool Store::snapshot_exists(const std::string& id) const {
  return std::filesystem::exists(root_ / "snapshots" / id / "sequences.json");
}

void Store::restore_sor(const std::string& id) {
  std::lock_guard lock(mutex_);
  auto dir = root_ / "snapshots" / id;
  if (!snapshot_exists(id))
    throw Error(ErrorCode::SnapshotNotFound, "snapshot '" + id + "' does not exist");
  for (const auto& entry : std::filesystem::directory_iterator(root_ / "sor")) {
    std::error_code ec;
    std::filesystem::remove(entry.path(), ec);
  }
  for (const auto& entry : std::filesystem::directory_iterator(dir / "sor")) {
    if (!entry.is_regular_file()) continue;
    std::filesystem::copy_file(entry.path(), root_ / "sor" / entry.path().filename(),
                               std::filesystem::copy_options::overwrite_existing);
  }
  std::ifstream in(dir / "sequences.json");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::StoreCorruption, "snapshot sequences: " + std::string(e.what()));
  }
  sequences_.clear();
  for (const auto& [name, next] : j["sequences"].items())
    sequences_[name] = next.get<Sk>();
  persist_meta();
  drop_sor_caches();
}

void Store::drop_sor_caches() {
  static_cache_.clear();
  history_cache_.clear();
}

// --- metadata ----------------------------------------------------------------

Date Store::lv1_batch_date() {
  std::lock_guard lock(mutex_);
  return lv1_batch_date_;
}

void Store::set_lv1_batch_date(Date d) {
  std::lock_guard lock(mutex_);
  lv1_batch_date_ = d;
  persist_meta();
}

std::vector<Store::BatchEntry> Store::batch_ledger() {
  std::lock_guard lock(mutex_);
  return batches_;
}

void Store::record_batch(Date date, const std::string& outcome) {
  std::lock_guard lock(mutex_);
  for (auto it = batches_.rbegin(); it != batches_.rend(); ++it) {
    if (it->date == date) {
      it->outcome = outcome;
      persist_meta();
      return;
    }
  }
  batches_.push_back({date, outcome});
  persist_meta();
}

void Store::load_meta() {
  auto path = root_ / "meta.json";
  if (!std::filesystem::exists(path)) return;
  std::ifstream in(path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::StoreCorruption, "meta.json: " + std::string(e.what()));
  }
  for (const auto& [name, next] : j.value("sequences", json::object()).items())
    sequences_[name] = next.get<Sk>();
  lv1_batch_date_ = j.value("lv1_batch_date", kDateAbsent);
  for (const auto& jb : j.value("batches", json::array()))
    batches_.push_back({jb.value("date", kDateAbsent), jb.value("outcome", std::string())});
}

void Store::persist_meta() {
  json j;
  j["sequences"] = json::object();
  for (const auto& [name, next] : sequences_) j["sequences"][name] = next;
  j["lv1_batch_date"] = lv1_batch_date_;
  j["batches"] = json::array();
  for (const auto& b : batches_)
    j["batches"].push_back({{"date", b.date}, {"outcome", b.outcome}});
  atomic_write_text(root_ / "meta.json", j.dump(2) + "\n");
}

void Store::flush_locked() {
  for (auto& [name, table] : lv2_cache_) {
    if (!table.dirty) continue;
    const TargetMapping& schema = target_schema(name);
    CsvTable csv;
    csv.header = schema.lv2_columns();
    for (const auto& rec : table.rows) csv.rows.push_back(to_row(rec, schema));
    write_csv_file(lv2_path(name), csv);
    table.dirty = false;
  }
  for (auto& [name, table] : static_cache_) {
    if (!table.dirty) continue;
    const TargetMapping& schema = target_schema(name);
    CsvTable csv;
    csv.header = schema.static_table_columns();
    for (const auto& rec : table.rows) csv.rows.push_back(to_row(rec, schema));
    write_csv_file(static_path(name), csv);
    table.dirty = false;
  }
  for (auto& [name, table] : history_cache_) {
    if (!table.dirty) continue;
    const TargetMapping& schema = target_schema(name);
    CsvTable csv;
    csv.header = schema.history_table_columns();
    for (const auto& rec : table.rows) csv.rows.push_back(to_row(rec, schema));
    write_csv_file(history_path(name), csv);
    table.dirty = false;
  }
}

void Store::flush() {
  std::lock_guard lock(mutex_);
  flush_locked();
}

}  // namespace etl
