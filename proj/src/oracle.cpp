#include "etl/oracle.hpp"

#include <algorithm>
#include <set>

#include "etl/dates.hpp"
#include "etl/errors.hpp"

namespace etl::oracle {

namespace {

// One coalesced day action against a single target entity.
struct DayAction {
  BkTuple bk;
  bool is_delete = false;
  bool has_upsert = false;
  Date tx_date = kDateAbsent;
  std::map<std::string, std::string> attrs;      // target columns
  std::map<std::string, std::string> fk_values;  // fk column -> business value
};

struct TableModel {
  std::vector<StaticRecord> statics;
  std::vector<HistoryRecord> versions;
  Sk next_sk = 1;

  StaticRecord* find_bk(const BkTuple& bk) {
    for (auto& row : statics)
      if (row.bk == bk) return &row;
    return nullptr;
  }
  HistoryRecord* open_version(Sk sk) {
    for (auto& v : versions)
      if (v.sk == sk && v.ed == kOpenEndDate) return &v;
    return nullptr;
  }
};

class Replayer {
 public:
  explicit Replayer(const MappingConfig& cfg) : cfg_(cfg) {
    for (const auto& t : cfg.targets) tables_[t.name];
  }

  void run(const std::vector<SourceTx>& history) {
    // Day grouping follows tx_date, matching the daily batch boundary.
    std::map<Date, std::vector<const SourceTx*>> days;
    for (const auto& tx : history) {
      auto it = tx.values.find("tx_date");
      Date d = parse_date(it == tx.values.end() ? "" : it->second);
      if (d == kDateAbsent)
        throw Error(ErrorCode::ParseError, "history transaction lacks tx_date");
      days[d].push_back(&tx);
    }
    for (const auto& [day, txs] : days) apply_day(day, txs);
  }

  SorState state() const {
    SorState s;
    for (const auto& [name, model] : tables_)
      s.tables[name] = {model.statics, model.versions};
    return s;
  }

 private:
  void apply_day(Date day, const std::vector<const SourceTx*>& txs) {
    // Latest action per feed business key wins, like the daily extraction.
    std::map<std::string, std::map<std::string, const SourceTx*>> survivors;  // feed -> bk -> tx
    for (const SourceTx* tx : txs) {
      BkTuple bk;
      for (const auto& col : cfg_.feed_bk_columns(tx->feed_id)) {
        auto it = tx->values.find(col);
        bk.push_back(it == tx->values.end() ? "" : it->second);
      }
      survivors[tx->feed_id][bk_key(bk)] = tx;
    }

    // Coalesce the surviving rows onto target entities, in mapping order.
    std::map<std::string, std::map<std::string, DayAction>> actions;  // target -> bk key
    for (const auto& target : cfg_.targets) {
      for (const auto& mapping : target.source_mappings) {
        auto feed_it = survivors.find(mapping.feed_id);
        if (feed_it == survivors.end()) continue;
        for (const auto& [_, tx] : feed_it->second) contribute(target, mapping, *tx, actions);
      }
    }

    // Apply per target in config order, entities in key order. Foreign keys
    // resolve against the image as of this point, so early-arriving child
    // rows spawn placeholders their parents adopt later the same day.
    for (const auto& target : cfg_.targets) {
      auto it = actions.find(target.name);
      if (it == actions.end()) continue;
      for (const auto& [_, action] : it->second) {
        if (action.is_delete)
          apply_delete(target, action, day);
        else
          apply_upsert(target, action, day);
      }
    }
  }

  void contribute(const TargetMapping& target, const SourceMapping& mapping,
                  const SourceTx& tx, std::map<std::string, std::map<std::string, DayAction>>& actions) {
    std::map<std::string, std::string> mapped;
    for (const auto& [src, dst] : mapping.column_map) {
      auto it = tx.values.find(src);
      mapped[dst] = it == tx.values.end() ? "" : it->second;
    }
    BkTuple bk;
    for (const auto& col : target.bk_columns) bk.push_back(mapped[col]);

    DayAction& action = actions[target.name][bk_key(bk)];
    action.bk = bk;
    auto tx_type = tx.values.at("tx_type");
    action.tx_date = parse_date(tx.values.at("tx_date"));
    if (tx_type == "D") {
      action.is_delete = true;
    } else {
      action.has_upsert = true;
    }
    if (action.is_delete && action.has_upsert)
      throw Error(ErrorCode::InvariantViolation,
                  "same-day delete and upsert on " + target.name + " " + bk_display(bk) +
                      " is not replayable");
    std::set<std::string> fk_cols;
    for (const auto& fk : target.fk_defs) fk_cols.insert(fk.column);
    for (const auto& [col, val] : mapped) {
      if (val.empty()) continue;
      if (fk_cols.count(col))
        action.fk_values[col] = val;
      else
        action.attrs[col] = val;
    }
  }

  Sk resolve_reference(const std::string& ref_target, const std::string& value, Date day) {
    TableModel& ref = tables_.at(ref_target);
    BkTuple bk{value};
    if (StaticRecord* row = ref.find_bk(bk)) return row->sk;
    StaticRecord placeholder;
    placeholder.sk = ref.next_sk++;
    placeholder.bk = bk;
    for (const auto& c : cfg_.target(ref_target).static_attrs) placeholder.static_attrs[c] = "";
    placeholder.af = true;
    placeholder.last_tx_date = day;
    ref.statics.push_back(placeholder);
    return placeholder.sk;
  }

  void apply_upsert(const TargetMapping& target, const DayAction& action, Date day) {
    TableModel& model = tables_.at(target.name);

    std::map<std::string, Sk> keys;
    for (const auto& fk : target.fk_defs) {
      auto it = action.fk_values.find(fk.column);
      if (it == action.fk_values.end())
        throw Error(ErrorCode::MissingFkValue, target.name + " " + bk_display(action.bk) +
                                                   ": no value for '" + fk.column + "'");
      keys[fk.column] = resolve_reference(fk.references, it->second, day);
    }

    auto static_attrs = [&] {
      std::map<std::string, std::string> out;
      for (const auto& c : target.static_attrs) {
        auto it = action.attrs.find(c);
        out[c] = it == action.attrs.end() ? "" : it->second;
      }
      return out;
    };
    auto new_version = [&](Sk sk) {
      HistoryRecord v;
      v.sk = sk;
      v.bk = action.bk;
      v.bd = action.tx_date;
      v.ed = kOpenEndDate;
      for (const auto& c : target.dynamic_attrs) {
        auto it = action.attrs.find(c);
        v.dynamic_attrs[c] = it == action.attrs.end() ? "" : it->second;
      }
      v.resolved_keys = keys;
      return v;
    };

    StaticRecord* row = model.find_bk(action.bk);
    if (!row) {
      StaticRecord fresh;
      fresh.sk = model.next_sk++;
      fresh.bk = action.bk;
      fresh.static_attrs = static_attrs();
      fresh.last_tx_type = "I";
      fresh.last_tx_date = day;
      model.statics.push_back(fresh);
      model.versions.push_back(new_version(fresh.sk));
      return;
    }
    if (row->af) {
      // Adopt the placeholder. Created today it behaves like a fresh
      // insert; from an earlier day it is a deferred fill-in.
      row->static_attrs = static_attrs();
      row->last_tx_type = row->last_tx_date == day ? "I" : "U";
      row->af = false;
      row->last_tx_date = day;
      model.versions.push_back(new_version(row->sk));
      return;
    }
    row->static_attrs = static_attrs();
    row->last_tx_type = "U";
    row->last_tx_date = day;
    if (HistoryRecord* open = model.open_version(row->sk))
      open->ed = prev_day(action.tx_date);
    model.versions.push_back(new_version(row->sk));
  }

  void apply_delete(const TargetMapping& target, const DayAction& action, Date day) {
    TableModel& model = tables_.at(target.name);
    StaticRecord* row = model.find_bk(action.bk);
    if (!row) return;  // delete of a record the warehouse never saw
    // A placeholder born today was not in the warehouse when the day's
    // changes were detected; the delete has nothing to act on.
    if (row->af && row->last_tx_date == day) return;
    row->last_tx_type = "D";
    row->last_tx_date = day;
    if (HistoryRecord* open = model.open_version(row->sk))
      open->ed = prev_day(action.tx_date);
  }

  const MappingConfig& cfg_;
  std::map<std::string, TableModel> tables_;
};

// --- canonical comparison -------------------------------------------------

struct CanonicalState {
  // target -> rows rendered as strings with canonical surrogate keys
  std::map<std::string, std::vector<std::string>> statics;
  std::map<std::string, std::vector<std::string>> versions;
};

std::string render_value(Sk sk) { return sk == kSkAbsent ? "-" : std::to_string(sk); }

CanonicalState canonicalize(const SorState& state, const MappingConfig& cfg) {
  // Relabel per target by first appearance in business-key order.
  std::map<std::string, std::map<Sk, Sk>> relabel;
  for (const auto& t : cfg.targets) {
    auto it = state.tables.find(t.name);
    if (it == state.tables.end()) continue;
    auto rows = it->second.first;
    std::sort(rows.begin(), rows.end(), [](const StaticRecord& a, const StaticRecord& b) {
      return std::tie(a.bk, a.af) < std::tie(b.bk, b.af);
    });
    Sk next = 1;
    for (const auto& row : rows) relabel[t.name][row.sk] = next++;
  }
  auto mapped = [&relabel](const std::string& target, Sk sk) -> Sk {
    const auto& m = relabel[target];
    auto it = m.find(sk);
    return it == m.end() ? -sk : it->second;  // negative marks a dangling key
  };

  CanonicalState out;
  for (const auto& t : cfg.targets) {
    auto it = state.tables.find(t.name);
    if (it == state.tables.end()) continue;

    std::vector<std::string> statics;
    for (const auto& row : it->second.first) {
      std::string s = "bk=" + bk_display(row.bk) + " sk=" + render_value(mapped(t.name, row.sk));
      for (const auto& c : t.static_attrs) {
        auto a = row.static_attrs.find(c);
        s += " " + c + "=" + (a == row.static_attrs.end() ? "" : a->second);
      }
      s += " tx=" + row.last_tx_type + " af=" + (row.af ? "1" : "0") +
           " last=" + format_date(row.last_tx_date);
      statics.push_back(std::move(s));
    }
    std::sort(statics.begin(), statics.end());
    out.statics[t.name] = std::move(statics);

    std::vector<std::string> versions;
    for (const auto& row : it->second.second) {
      std::string s = "bk=" + bk_display(row.bk) + " sk=" + render_value(mapped(t.name, row.sk)) +
                      " bd=" + format_date(row.bd) + " ed=" + format_date(row.ed);
      for (const auto& c : t.dynamic_attrs) {
        auto a = row.dynamic_attrs.find(c);
        s += " " + c + "=" + (a == row.dynamic_attrs.end() ? "" : a->second);
      }
      for (const auto& fk : t.fk_defs) {
        auto k = row.resolved_keys.find(fk.column);
        s += " " + fk.key_column + "=" +
             (k == row.resolved_keys.end() ? "-" : render_value(mapped(fk.references, k->second)));
      }
      versions.push_back(std::move(s));
    }
    std::sort(versions.begin(), versions.end());
    out.versions[t.name] = std::move(versions);
  }
  return out;
}

void diff_rows(const std::string& target, const std::string& kind,
               const std::vector<std::string>& a, const std::vector<std::string>& b,
               std::vector<std::string>& out) {
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (i < a.size() && j < b.size() && a[i] == b[j]) {
      ++i;
      ++j;
    } else if (j >= b.size() || (i < a.size() && a[i] < b[j])) {
      out.push_back(target + "." + kind + " only in left:  " + a[i++]);
    } else {
      out.push_back(target + "." + kind + " only in right: " + b[j++]);
    }
  }
}

}  // namespace

SorState replay_naive(const std::vector<SourceTx>& history, const MappingConfig& cfg) {
  Replayer replayer(cfg);
  replayer.run(history);
  return replayer.state();
}

std::vector<std::string> compare_states(const SorState& a, const SorState& b,
                                        const MappingConfig& cfg) {
  std::set<std::string> ta, tb;
  for (const auto& [name, _] : a.tables) ta.insert(name);
  for (const auto& [name, _] : b.tables) tb.insert(name);
  if (ta != tb)
    throw Error(ErrorCode::TargetSetMismatch, "states cover different target sets");

  CanonicalState ca = canonicalize(a, cfg);
  CanonicalState cb = canonicalize(b, cfg);
  std::vector<std::string> out;
  for (const auto& t : cfg.targets) {
    diff_rows(t.name, "static", ca.statics[t.name], cb.statics[t.name], out);
    diff_rows(t.name, "history", ca.versions[t.name], cb.versions[t.name], out);
  }
  return out;
}

SorState read_sor_state(Store& store, const MappingConfig& cfg) {
  SorState state;
  for (const auto& t : cfg.targets)
    state.tables[t.name] = {store.static_rows(t.name), store.history_rows(t.name)};
  return state;
}

std::vector<SourceTx> read_history_file(const std::filesystem::path& path,
                                        const MappingConfig& cfg) {
  CsvTable csv = read_csv_file(path);
  int feed_col = csv.column_index("feed");
  if (feed_col < 0)
    throw Error(ErrorCode::ParseError, path.string() + ": missing 'feed' column");
  std::vector<SourceTx> out;
  for (const auto& row : csv.rows) {
    SourceTx tx;
    tx.feed_id = row[feed_col];
    const FeedSpec& spec = cfg.feed(tx.feed_id);
    for (const auto& col : spec.columns) {
      int c = csv.column_index(col);
      if (c < 0)
        throw Error(ErrorCode::ParseError,
                    path.string() + ": missing column '" + col + "' of feed " + tx.feed_id);
      tx.values[col] = row[c];
    }
    out.push_back(std::move(tx));
  }
  return out;
}

void write_history_file(const std::filesystem::path& path,
                        const std::vector<SourceTx>& history, const MappingConfig& cfg) {
  CsvTable csv;
  csv.header.push_back("feed");
  std::set<std::string> seen;
  for (const auto& f : cfg.source_feeds)
    for (const auto& c : f.columns)
      if (seen.insert(c).second) csv.header.push_back(c);
  for (const auto& tx : history) {
    std::vector<std::string> row(csv.header.size());
    row[0] = tx.feed_id;
    for (std::size_t i = 1; i < csv.header.size(); ++i) {
      auto it = tx.values.find(csv.header[i]);
      if (it != tx.values.end()) row[i] = it->second;
    }
    csv.rows.push_back(std::move(row));
  }
  write_csv_file(path, csv);
}

}  // namespace etl::oracle
