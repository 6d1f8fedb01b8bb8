#include "support/workload.hpp"

#include <random>
#include <set>
#include <stdexcept>

#include "etl/csv.hpp"
#include "support/tempdir.hpp"

namespace etl::testing {

namespace {

const char* kConfigJson = R"({
  "batch_frequency": "daily",
  "source_feeds": [
    {"id": "f_top", "path": "feeds/{batch_date}/f_top.csv",
     "columns": ["bk", "tx_type", "tx_date", "grade", "note"]},
    {"id": "f_mid", "path": "feeds/{batch_date}/f_mid.csv",
     "columns": ["bk", "tx_type", "tx_date", "grade", "note", "top_ref"]},
    {"id": "f_child", "path": "feeds/{batch_date}/f_child.csv",
     "columns": ["bk", "tx_type", "tx_date", "grade", "note", "mid_ref"]}
  ],
  "targets": [
    {"name": "top", "bk_columns": ["bk"],
     "static_attrs": ["grade"], "dynamic_attrs": ["note"],
     "fk_defs": [],
     "source_mappings": [
       {"feed": "f_top",
        "columns": {"bk": "bk", "grade": "grade", "note": "note"}}]},
    {"name": "mid", "bk_columns": ["bk"],
     "static_attrs": ["grade"], "dynamic_attrs": ["note"],
     "fk_defs": [{"column": "top_ref", "references": "top"}],
     "source_mappings": [
       {"feed": "f_mid",
        "columns": {"bk": "bk", "grade": "grade", "note": "note", "top_ref": "top_ref"}}]},
    {"name": "child", "bk_columns": ["bk"],
     "static_attrs": ["grade"], "dynamic_attrs": ["note"],
     "fk_defs": [{"column": "mid_ref", "references": "mid"}],
     "source_mappings": [
       {"feed": "f_child",
        "columns": {"bk": "bk", "grade": "grade", "note": "note", "mid_ref": "mid_ref"}}]}
  ]
})";

std::vector<std::string> entity_pool(const std::string& prefix, int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(prefix + std::to_string(100 + i));
  return out;
}

}  // namespace

Workload make_workload(const std::filesystem::path& dir, unsigned seed,
                       const WorkloadParams& params) {
  std::filesystem::create_directories(dir);
  write_file(dir / "config.json", kConfigJson);

  Workload w;
  w.dir = dir;
  w.cfg = load_config(dir / "config.json");

  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);

  auto tops = entity_pool("T", params.top_entities);
  auto mids = entity_pool("M", params.mid_entities);
  auto childs = entity_pool("C", params.child_entities);

  // Parents already named by any generated action; references prefer these
  // unless the draw asks for an early-arriving one.
  std::set<std::string> seen_tops, seen_mids;

  auto pick_ref = [&](const std::vector<std::string>& pool, const std::set<std::string>& seen) {
    std::vector<std::string> unseen;
    for (const auto& e : pool)
      if (!seen.count(e)) unseen.push_back(e);
    bool early = coin(rng) < params.early_arriving && !unseen.empty();
    const auto& candidates = early  ? unseen
                             : seen.empty() ? pool
                                            : std::vector<std::string>(seen.begin(), seen.end());
    return candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng)];
  };

  Date date = 20240401;
  int serial = 0;
  for (int b = 0; b < params.batches; ++b) {
    w.batch_dates.push_back(date);
    struct FeedRows {
      CsvTable csv;
    };
    std::map<std::string, CsvTable> feeds;
    for (const auto& f : w.cfg.source_feeds) {
      feeds[f.id].header = f.columns;
    }

    auto emit = [&](const std::string& feed_id, const std::string& bk,
                    const std::string& ref_col, const std::string& ref_val) {
      double r = coin(rng);
      std::string tx = r < params.p_insert                    ? "I"
                       : r < params.p_insert + params.p_update ? "U"
                                                                : "D";
      oracle::SourceTx srctx;
      srctx.feed_id = feed_id;
      srctx.values["bk"] = bk;
      srctx.values["tx_type"] = tx;
      srctx.values["tx_date"] = format_date(date);
      if (tx != "D") {
        srctx.values["grade"] = "g" + std::to_string(++serial);
        srctx.values["note"] = "n" + std::to_string(serial);
        if (!ref_col.empty()) srctx.values[ref_col] = ref_val;
      } else {
        srctx.values["grade"] = "";
        srctx.values["note"] = "";
        if (!ref_col.empty()) srctx.values[ref_col] = "";
      }
      CsvTable& csv = feeds[feed_id];
      std::vector<std::string> row;
      for (const auto& col : csv.header) row.push_back(srctx.values[col]);
      csv.rows.push_back(std::move(row));
      w.history.push_back(std::move(srctx));
      return tx;
    };

    for (const auto& bk : tops) {
      if (coin(rng) >= params.act_probability) continue;
      if (emit("f_top", bk, "", "") != "D") seen_tops.insert(bk);
    }
    for (const auto& bk : mids) {
      if (coin(rng) >= params.act_probability) continue;
      std::string ref = pick_ref(tops, seen_tops);
      if (emit("f_mid", bk, "top_ref", ref) != "D") seen_mids.insert(bk);
    }
    for (const auto& bk : childs) {
      if (coin(rng) >= params.act_probability) continue;
      std::string ref = pick_ref(mids, seen_mids);
      emit("f_child", bk, "mid_ref", ref);
    }

    for (auto& [feed_id, csv] : feeds)
      write_csv_file(dir / "feeds" / format_date(date) / (feed_id + ".csv"), csv);
    date = next_day(date);
  }
  return w;
}

std::unique_ptr<Store> run_workload(const Workload& workload, const std::string& store_name,
                                    const RunOptions& options) {
  auto store = std::make_unique<Store>(workload.dir / store_name, workload.cfg);
  for (Date d : workload.batch_dates) {
    BatchReport report = run_batch(*store, workload.cfg, d, options);
    if (report.outcome != "success")
      throw std::runtime_error("batch " + format_date(d) + " aborted: " + report.error_code +
                               ": " + report.error_detail);
  }
  return store;
}

std::vector<std::string> pipeline_vs_oracle(const Workload& workload, Store& store) {
  auto expected = oracle::replay_naive(workload.history, workload.cfg);
  auto actual = oracle::read_sor_state(store, workload.cfg);
  return oracle::compare_states(actual, expected, workload.cfg);
}

}  // namespace etl::testing
