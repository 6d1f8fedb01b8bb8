#include "etl/verify.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "etl/errors.hpp"

namespace etl {

namespace {

void check_static(Store& store, const TargetMapping& t, std::vector<Violation>& out,
                  std::set<Sk>& sks) {
  std::set<std::string> bks;
  for (const auto& rec : store.static_rows(t.name)) {
    const std::string loc = t.name + ".static sk=" + std::to_string(rec.sk);
    if (rec.sk <= 0) out.push_back({"BadSurrogateKey", loc, "non-positive surrogate key"});
    if (!sks.insert(rec.sk).second)
      out.push_back({"DuplicateSurrogateKey", loc, "surrogate key repeats"});
    if (!rec.af && !bks.insert(bk_key(rec.bk)).second)
      out.push_back({"DuplicateBusinessKey", loc,
                     "business key " + bk_display(rec.bk) + " repeats among real rows"});
    if (rec.af) {
      for (const auto& [col, val] : rec.static_attrs)
        if (!val.empty())
          out.push_back({"AugmentNotBlank", loc, "augment row carries attribute '" + col + "'"});
    }
    if (rec.last_tx_date != kDateAbsent && !is_valid_date(rec.last_tx_date))
      out.push_back({"BadDate", loc, "invalid last_tx_date"});
  }
}

void check_history(Store& store, const TargetMapping& t, const std::set<Sk>& static_sks,
                   std::vector<Violation>& out) {
  std::map<Sk, std::vector<std::pair<Date, Date>>> spans;
  for (const auto& rec : store.history_rows(t.name)) {
    const std::string loc =
        t.name + ".history sk=" + std::to_string(rec.sk) + " bd=" + format_date(rec.bd);
    if (!static_sks.count(rec.sk))
      out.push_back({"OrphanHistory", loc, "surrogate key missing from static table"});
    if (!is_valid_date(rec.bd))
      out.push_back({"BadDate", loc, "invalid begin date"});
    if (rec.ed != kOpenEndDate && !is_valid_date(rec.ed))
      out.push_back({"BadDate", loc, "invalid end date"});
    if (rec.bd > rec.ed) out.push_back({"InvertedInterval", loc, "begin date after end date"});
    spans[rec.sk].push_back({rec.bd, rec.ed});
  }
  for (auto& [sk, intervals] : spans) {
    std::sort(intervals.begin(), intervals.end());
    const std::string loc = t.name + ".history sk=" + std::to_string(sk);
    std::size_t open = 0;
    for (std::size_t i = 0; i < intervals.size(); ++i) {
      if (intervals[i].second == kOpenEndDate) ++open;
      if (i > 0 && intervals[i].first <= intervals[i - 1].second)
        out.push_back({"OverlappingVersions", loc,
                       "versions " + format_date(intervals[i - 1].first) + " and " +
                           format_date(intervals[i].first) + " overlap"});
    }
    if (open > 1) out.push_back({"MultipleOpenVersions", loc, "more than one open version"});
  }
}

}  // namespace

std::vector<Violation> verify_store(Store& store, const MappingConfig& cfg) {
  std::vector<Violation> out;
  std::map<std::string, std::set<Sk>> sks_by_target;

  for (const auto& t : cfg.targets) {
    check_static(store, t, out, sks_by_target[t.name]);
    check_history(store, t, sks_by_target[t.name], out);

    // Sequences must stay ahead of every allocated key.
    const std::set<Sk>& sks = sks_by_target[t.name];
    if (!sks.empty() && store.peek_sequence(t.name) <= *sks.rbegin())
      out.push_back({"SequenceBehind", t.name,
                     "next surrogate key " + std::to_string(store.peek_sequence(t.name)) +
                         " not past max allocated " + std::to_string(*sks.rbegin())});
  }

  // Resolved foreign keys must land on existing rows of the referenced
  // static table.
  for (const auto& t : cfg.targets) {
    for (const auto& fk : t.fk_defs) {
      const auto& ref_sks = sks_by_target[fk.references];
      for (const auto& rec : store.history_rows(t.name)) {
        auto it = rec.resolved_keys.find(fk.column);
        if (it == rec.resolved_keys.end()) continue;
        if (!ref_sks.count(it->second))
          out.push_back({"DanglingResolvedKey",
                         t.name + ".history sk=" + std::to_string(rec.sk),
                         fk.key_column + "=" + std::to_string(it->second) + " not in " +
                             fk.references + ".static"});
      }
    }
  }

  // Live staging rows, when present, must satisfy their op invariants.
  for (const auto& t : cfg.targets) {
    std::set<Sk> lv2_sks;
    for (const auto& rec : store.lv2_rows(t.name)) {
      const std::string loc = t.name + ".lv2 " + bk_display(rec.bk);
      if (auto why = staging_violation(rec)) out.push_back({"StagingInvariant", loc, *why});
      if (!lv2_sks.insert(rec.sk).second)
        out.push_back({"DuplicateSurrogateKey", loc, "surrogate key repeats in staging"});
    }
  }
  return out;
}

}  // namespace etl
