#include "etl/load.hpp"

#include <algorithm>

#include "etl/errors.hpp"

namespace etl {

namespace {

std::map<std::string, std::string> pick(const std::map<std::string, std::string>& data,
                                        const std::vector<std::string>& cols) {
  std::map<std::string, std::string> out;
  for (const auto& c : cols) {
    auto it = data.find(c);
    out[c] = it == data.end() ? "" : it->second;
  }
  return out;
}

HistoryRecord open_version_from(const StagingRecord& rec, const TargetMapping& target) {
  HistoryRecord hist;
  hist.sk = rec.sk;
  hist.bk = rec.bk;
  hist.bd = rec.new_bd;
  hist.ed = kOpenEndDate;
  hist.dynamic_attrs = pick(rec.data, target.dynamic_attrs);
  hist.resolved_keys = rec.resolved_keys;
  return hist;
}

void close_or_throw(Store& store, const TargetMapping& target, const StagingRecord& rec,
                    LoadStats& stats) {
  if (rec.sor_bd == kDateAbsent) return;  // no prior open version to close
  if (!store.close_history(target.name, rec.sk, rec.sor_bd, rec.ed))
    throw Error(ErrorCode::HistoryRowNotFound,
                "sor/" + target.name + ".history: no version (sk " + std::to_string(rec.sk) +
                    ", bd " + format_date(rec.sor_bd) + ")");
  ++stats.history_closed;
}

StaticRecord require_static(Store& store, const TargetMapping& target, Sk sk) {
  auto row = store.lookup_sor_static_by_sk(target.name, sk);
  if (!row)
    throw Error(ErrorCode::StoreCorruption,
                "sor/" + target.name + ".static: sk " + std::to_string(sk) + " missing");
  return *row;
}

}  // namespace

void load_record(Store& store, const StagingRecord& rec, const TargetMapping& target,
                 Date batch_date, LoadStats& stats) {
  ++stats.op_counts[rec.op];
  switch (rec.op) {
    case OpCode::B: {
      StaticRecord stat;
      stat.sk = rec.sk;
      stat.bk = rec.bk;
      stat.static_attrs = pick(rec.data, target.static_attrs);
      stat.last_tx_type = "I";
      stat.af = false;
      stat.last_tx_date = batch_date;
      store.insert_static(target.name, stat);
      ++stats.static_inserted;
      store.insert_history(target.name, open_version_from(rec, target));
      ++stats.history_inserted;
      break;
    }
    case OpCode::EB: {
      StaticRecord stat = require_static(store, target, rec.sk);
      stat.static_attrs = pick(rec.data, target.static_attrs);
      stat.last_tx_type = "U";
      stat.last_tx_date = batch_date;
      store.update_static(target.name, stat);
      ++stats.static_updated;
      close_or_throw(store, target, rec, stats);
      store.insert_history(target.name, open_version_from(rec, target));
      ++stats.history_inserted;
      break;
    }
    case OpCode::E: {
      StaticRecord stat = require_static(store, target, rec.sk);
      stat.last_tx_type = "D";
      stat.last_tx_date = batch_date;
      store.update_static(target.name, stat);
      ++stats.static_updated;
      close_or_throw(store, target, rec, stats);
      break;
    }
    case OpCode::DA: {
      StaticRecord stat = require_static(store, target, rec.sk);
      stat.static_attrs = pick(rec.data, target.static_attrs);
      stat.last_tx_type = "U";
      stat.af = false;
      stat.last_tx_date = batch_date;
      store.update_static(target.name, stat);
      ++stats.static_updated;
      store.insert_history(target.name, open_version_from(rec, target));
      ++stats.history_inserted;
      break;
    }
    case OpCode::A: {
      StaticRecord stat;
      stat.sk = rec.sk;
      stat.bk = rec.bk;
      for (const auto& c : target.static_attrs) stat.static_attrs[c] = "";
      stat.af = true;
      stat.last_tx_date = batch_date;
      store.insert_static(target.name, stat);
      ++stats.static_inserted;
      break;
    }
  }
}

LoadStats load_table(Store& store, const MappingConfig& cfg, const TargetMapping& target,
                     Date batch_date) {
  LoadStats stats;
  stats.target = target.name;

  auto rows = store.lv2_rows(target.name);
  std::stable_sort(rows.begin(), rows.end(), [](const StagingRecord& a, const StagingRecord& b) {
    bool aa = a.op == OpCode::A, ba = b.op == OpCode::A;
    if (aa != ba) return aa;  // placeholders first
    return a.bk < b.bk;
  });

  auto backup = store.backup_sor_table(target.name);
  try {
    for (const auto& rec : rows) load_record(store, rec, target, batch_date, stats);
  } catch (...) {
    store.restore_sor_table(backup);
    store.flush();
    throw;
  }
  store.archive_lv2(target.name, batch_date);
  store.clear_lv2(target.name);
  store.flush();
  (void)cfg;
  return stats;
}

}  // namespace etl
