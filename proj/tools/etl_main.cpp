#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "etl/dds.hpp"
#include "etl/errors.hpp"
#include "etl/extract.hpp"
#include "etl/keyval.hpp"
#include "etl/load.hpp"
#include "etl/oracle.hpp"
#include "etl/orchestrate.hpp"
#include "etl/report.hpp"
#include "etl/store.hpp"
#include "etl/transform.hpp"
#include "etl/verify.hpp"

namespace {

using namespace etl;

struct CommonArgs {
  std::string config_path;
  std::string data_dir = "data";
  std::string batch_date_text;
  int parallelism = 1;
  unsigned order_seed = 0;

  Date batch_date() const {
    Date d = parse_date(batch_date_text);
    if (d == kDateAbsent)
      throw Error(ErrorCode::UsageError, "--batch-date is required (YYYYMMDD)");
    return d;
  }
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_batch_date) {
  cmd->add_option("--config", args.config_path, "mapping config file")->required();
  cmd->add_option("--data-dir", args.data_dir, "store root directory");
  if (with_batch_date)
    cmd->add_option("--batch-date", args.batch_date_text, "batch date, YYYYMMDD")->required();
  cmd->add_option("--parallelism", args.parallelism, "max concurrent jobs");
  cmd->add_option("--order-seed", args.order_seed, "shuffle ready jobs deterministically");
}

void save_report(const Store& store, const BatchReport& report) {
  auto dir = store.root() / "reports";
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / (format_date(report.batch_date) + ".json"));
  out << report_to_json(report);
}

int finish_batch(Store& store, const BatchReport& report) {
  save_report(store, report);
  std::cout << report_summary(report);
  if (report.outcome != "success") {
    nlohmann::json j{{"error", report.error_code}, {"detail", report.error_detail}};
    std::cerr << j.dump() << "\n";
    return 2;
  }
  return 0;
}

int cmd_inspect(const std::string& data_dir, const std::string& table_ref) {
  std::filesystem::path rel(table_ref);
  for (const auto& part : rel)
    if (part == "..")
      throw Error(ErrorCode::UsageError, "table reference must stay inside the data dir");
  auto path = std::filesystem::path(data_dir) / (table_ref + ".csv");
  CsvTable table = read_csv_file(path);

  std::vector<std::size_t> width(table.header.size());
  for (std::size_t c = 0; c < table.header.size(); ++c) width[c] = table.header[c].size();
  for (const auto& row : table.rows)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  auto print_row = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c)
      std::cout << std::left << std::setw(int(width[c] + 2)) << row[c];
    std::cout << "\n";
  };
  print_row(table.header);
  for (const auto& row : table.rows) print_row(row);
  std::cout << "(" << table.rows.size() << " rows)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-level staged warehouse ETL"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string feed_id, target_name;

  auto* run = app.add_subcommand("run", "run a full daily batch");
  add_common(run, args, true);

  auto* rerun = app.add_subcommand("rerun", "re-run a batch from its staged ssa1 tables");
  add_common(rerun, args, true);

  auto* extract = app.add_subcommand("extract", "ingest change feeds into ssa1");
  add_common(extract, args, true);
  extract->add_option("--feed", feed_id, "single feed id (default: all)");

  auto* transform = app.add_subcommand("transform", "detect changes and stage into ssa2");
  add_common(transform, args, true);
  transform->add_option("--target", target_name, "single target (default: all)");

  auto* validate = app.add_subcommand("validate-keys", "resolve foreign keys in ssa2");
  add_common(validate, args, true);
  validate->add_option("--target", target_name, "single target (default: all)");

  auto* load = app.add_subcommand("load", "apply ssa2 rows to the SOR tables");
  add_common(load, args, true);
  load->add_option("--target", target_name, "single target (default: all)");

  auto* dds = app.add_subcommand("dds", "extract dimension/fact record sets from SOR");
  std::string dim_target, fact_target, affected_col, since_text;
  bool scd = false, rebuild = false;
  dds->add_option("--config", args.config_path)->required();
  dds->add_option("--data-dir", args.data_dir);
  dds->add_option("--dimension", dim_target, "dimension target to extract");
  dds->add_option("--fact", fact_target, "fact target to extract");
  dds->add_option("--affected-col", affected_col, "actual affected-date column");
  dds->add_option("--since", since_text, "job start / earliest affected date")->required();
  dds->add_flag("--scd", scd, "emit all history versions (slowly changing dimension)");
  dds->add_flag("--rebuild", rebuild, "full retrieval for fact rebuild");

  auto* inspect = app.add_subcommand("inspect", "pretty-print a stored table");
  std::string table_ref;
  inspect->add_option("--data-dir", args.data_dir);
  inspect->add_option("table", table_ref, "area/table, e.g. sor/t.static or ssa2/t")->required();

  auto* verify = app.add_subcommand("verify", "check every storage invariant");
  verify->add_option("--config", args.config_path)->required();
  verify->add_option("--data-dir", args.data_dir);

  auto* oracle_cmd = app.add_subcommand("oracle", "replay a feed history against the naive model");
  std::string history_path;
  bool compare = false;
  oracle_cmd->add_option("--config", args.config_path)->required();
  oracle_cmd->add_option("--data-dir", args.data_dir);
  oracle_cmd->add_option("--history", history_path, "global transaction history CSV")->required();
  oracle_cmd->add_flag("--compare", compare, "diff the replayed state against the store");

  CLI11_PARSE(app, argc, argv);

  try {
    if (inspect->parsed()) return cmd_inspect(args.data_dir, table_ref);

    MappingConfig cfg = load_config(args.config_path);
    Store store(args.data_dir, cfg);

    if (run->parsed()) {
      RunOptions options;
      options.parallelism = args.parallelism;
      options.order_seed = args.order_seed;
      return finish_batch(store, run_batch(store, cfg, args.batch_date(), options));
    }
    if (rerun->parsed()) {
      return finish_batch(store, rerun_batch(store, cfg, args.batch_date()));
    }
    if (extract->parsed()) {
      Date batch_date = args.batch_date();
      if (!feed_id.empty() && !cfg.find_feed(feed_id))
        throw Error(ErrorCode::UnknownFeed, "feed '" + feed_id + "' not in config");
      for (const auto& f : cfg.source_feeds) {
        if (!feed_id.empty() && f.id != feed_id) continue;
        auto stats = ingest_change_feed(store, cfg, f.id, cfg.feed_path(f.id, batch_date),
                                        batch_date);
        std::cout << "extract " << f.id << ": read " << stats.rows_read << ", kept "
                  << stats.rows_kept << ", superseded " << stats.rows_superseded << "\n";
      }
      store.set_lv1_batch_date(batch_date);
      return 0;
    }
    if (transform->parsed()) {
      Date batch_date = args.batch_date();
      for (const auto& t : cfg.targets) {
        if (!target_name.empty() && t.name != target_name) continue;
        auto stats = transform_table(store, cfg, t, batch_date);
        std::cout << "transform " << t.name << ":";
        for (OpCode op : {OpCode::B, OpCode::EB, OpCode::E, OpCode::DA})
          std::cout << " " << to_string(op) << "=" << stats.count(op);
        std::cout << " skipped=" << stats.skipped << "\n";
      }
      return 0;
    }
    if (validate->parsed()) {
      for (const auto& t : cfg.targets) {
        if (!target_name.empty() && t.name != target_name) continue;
        auto stats = validate_keys_table(store, cfg, t);
        std::cout << "validate-keys " << t.name << ": sor=" << stats.resolved_from_sor
                  << " lv2=" << stats.resolved_from_lv2
                  << " augments=" << stats.augments_created << "\n";
      }
      return 0;
    }
    if (load->parsed()) {
      Date batch_date = args.batch_date();
      for (const auto& t : cfg.targets) {
        if (!target_name.empty() && t.name != target_name) continue;
        auto stats = load_table(store, cfg, t, batch_date);
        std::cout << "load " << t.name << ": static+" << stats.static_inserted << " updated "
                  << stats.static_updated << " history+" << stats.history_inserted << " closed "
                  << stats.history_closed << "\n";
      }
      return 0;
    }
    if (dds->parsed()) {
      Date since = parse_date(since_text);
      if (dim_target.empty() == fact_target.empty())
        throw Error(ErrorCode::UsageError, "pass exactly one of --dimension or --fact");
      if (!dim_target.empty()) {
        CsvTable out = extract_dimension(store, cfg, dim_target, since, scd);
        auto path = write_dds_file(store, dim_target, scd ? "dim_scd" : "dim", out);
        std::cout << path.string() << ": " << out.rows.size() << " rows\n";
      } else {
        if (affected_col.empty())
          throw Error(ErrorCode::UsageError, "--fact requires --affected-col");
        CsvTable out = extract_fact(store, cfg, fact_target, affected_col, since, rebuild);
        auto path = write_dds_file(store, fact_target, "fact", out);
        std::cout << path.string() << ": " << out.rows.size() << " rows\n";
      }
      return 0;
    }
    if (verify->parsed()) {
      auto violations = verify_store(store, cfg);
      for (const auto& v : violations)
        std::cout << v.code << " " << v.location << ": " << v.message << "\n";
      std::cout << (violations.empty() ? "ok: no violations\n"
                                       : std::to_string(violations.size()) + " violation(s)\n");
      return violations.empty() ? 0 : 1;
    }
    if (oracle_cmd->parsed()) {
      auto history = oracle::read_history_file(history_path, cfg);
      auto replayed = oracle::replay_naive(history, cfg);
      if (compare) {
        auto actual = oracle::read_sor_state(store, cfg);
        auto diffs = oracle::compare_states(actual, replayed, cfg);
        for (const auto& d : diffs) std::cout << d << "\n";
        std::cout << (diffs.empty() ? "states equivalent\n"
                                    : std::to_string(diffs.size()) + " difference(s)\n");
        return diffs.empty() ? 0 : 1;
      }
      for (const auto& [name, table] : replayed.tables)
        std::cout << name << ": " << table.first.size() << " static rows, "
                  << table.second.size() << " history rows\n";
      return 0;
    }
  } catch (const Error& e) {
    nlohmann::json j{{"error", to_string(e.code())}, {"detail", e.detail()}};
    std::cerr << j.dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    nlohmann::json j{{"error", "Internal"}, {"detail", e.what()}};
    std::cerr << j.dump() << "\n";
    return 1;
  }
  return 0;
}
