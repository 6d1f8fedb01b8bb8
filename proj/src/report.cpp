#include "etl/report.hpp"

#include <sstream>

#include <json.hpp>

namespace etl {

namespace {

using nlohmann::json;

json op_counts_json(const std::map<OpCode, std::size_t>& counts) {
  json j = json::object();
  for (const auto& [op, n] : counts) j[to_string(op)] = n;
  return j;
}

}  // namespace

std::vector<std::string> BatchReport::count_mismatches() const {
  std::vector<std::string> out;
  for (const auto& [target, tstats] : transforms) {
    auto it = loads.find(target);
    const LoadStats* lstats = it == loads.end() ? nullptr : &it->second;
    for (OpCode op : {OpCode::B, OpCode::EB, OpCode::E, OpCode::DA}) {
      std::size_t staged = tstats.count(op);
      std::size_t loaded = lstats ? lstats->count(op) : 0;
      if (staged != loaded)
        out.push_back(target + ": staged " + std::to_string(staged) + " x " + to_string(op) +
                      " but loaded " + std::to_string(loaded));
    }
  }
  return out;
}

std::string report_to_json(const BatchReport& report) {
  json j;
  j["batch_date"] = report.batch_date;
  j["outcome"] = report.outcome;
  if (!report.error_code.empty()) {
    j["error"] = {{"code", report.error_code}, {"detail", report.error_detail}};
  }
  j["phases_ms"] = json::object();
  for (const auto& [phase, ms] : report.phase_ms) j["phases_ms"][phase] = ms;
  j["extract"] = json::array();
  for (const auto& s : report.ingests)
    j["extract"].push_back({{"feed", s.feed_id},
                            {"rows_read", s.rows_read},
                            {"rows_kept", s.rows_kept},
                            {"rows_superseded", s.rows_superseded}});
  j["targets"] = json::object();
  for (const auto& [name, s] : report.transforms) {
    j["targets"][name]["transform"] = {{"rows_in", s.rows_in},
                                       {"skipped", s.skipped},
                                       {"ops", op_counts_json(s.op_counts)}};
  }
  for (const auto& [name, s] : report.validates) {
    j["targets"][name]["validate"] = {{"rows_examined", s.rows_examined},
                                      {"resolved_from_sor", s.resolved_from_sor},
                                      {"resolved_from_lv2", s.resolved_from_lv2},
                                      {"augments_created", s.augments_created}};
  }
  for (const auto& [name, s] : report.loads) {
    j["targets"][name]["load"] = {{"ops", op_counts_json(s.op_counts)},
                                  {"static_inserted", s.static_inserted},
                                  {"static_updated", s.static_updated},
                                  {"history_inserted", s.history_inserted},
                                  {"history_closed", s.history_closed}};
  }
  return j.dump(2) + "\n";
}

std::string report_summary(const BatchReport& report) {
  std::ostringstream out;
  out << "batch " << report.batch_date << " " << report.outcome;
  if (!report.error_code.empty()) out << " (" << report.error_code << ")";
  out << "\n";
  for (const auto& s : report.ingests)
    out << "  extract " << s.feed_id << ": read " << s.rows_read << ", kept " << s.rows_kept
        << ", superseded " << s.rows_superseded << "\n";
  for (const auto& [name, s] : report.transforms) {
    out << "  " << name << ": staged";
    for (OpCode op : {OpCode::B, OpCode::EB, OpCode::E, OpCode::DA})
      out << " " << to_string(op) << "=" << s.count(op);
    out << " skipped=" << s.skipped;
    auto v = report.validates.find(name);
    if (v != report.validates.end())
      out << "; keys sor=" << v->second.resolved_from_sor
          << " lv2=" << v->second.resolved_from_lv2
          << " augments=" << v->second.augments_created;
    auto l = report.loads.find(name);
    if (l != report.loads.end())
      out << "; loaded A=" << l->second.count(OpCode::A)
          << " rows=" << l->second.static_inserted + l->second.static_updated +
                             l->second.history_inserted;
    out << "\n";
  }
  return out.str();
}

}  // namespace etl
