#include "etl/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "etl/errors.hpp"

namespace etl {

namespace {

using nlohmann::json;

const std::set<std::string> kReservedColumns = {
    "op", "sk", "sor_bd", "ed", "new_bd", "af", "bd", "last_tx_type", "last_tx_date"};

std::string get_string(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j[key].is_string())
    throw Error(ErrorCode::ParseError, where + ": missing string field '" + key + "'");
  return j[key].get<std::string>();
}

std::vector<std::string> get_string_list(const json& j, const char* key,
                                         const std::string& where, bool required) {
  if (!j.contains(key)) {
    if (required)
      throw Error(ErrorCode::ParseError, where + ": missing list field '" + key + "'");
    return {};
  }
  if (!j[key].is_array())
    throw Error(ErrorCode::ParseError, where + ": field '" + key + "' must be a list");
  std::vector<std::string> out;
  for (const auto& v : j[key]) {
    if (!v.is_string())
      throw Error(ErrorCode::ParseError, where + ": '" + key + "' entries must be strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

}  // namespace

std::vector<std::string> TargetMapping::fk_columns() const {
  std::vector<std::string> out;
  for (const auto& fk : fk_defs) out.push_back(fk.column);
  return out;
}

std::vector<std::string> TargetMapping::key_columns() const {
  std::vector<std::string> out;
  for (const auto& fk : fk_defs) out.push_back(fk.key_column);
  return out;
}

std::vector<std::string> TargetMapping::lv2_columns() const {
  std::vector<std::string> cols = {"op", "sk"};
  cols.insert(cols.end(), bk_columns.begin(), bk_columns.end());
  cols.insert(cols.end(), {"sor_bd", "ed", "new_bd", "af"});
  cols.insert(cols.end(), static_attrs.begin(), static_attrs.end());
  cols.insert(cols.end(), dynamic_attrs.begin(), dynamic_attrs.end());
  for (const auto& fk : fk_defs) cols.push_back(fk.column);
  for (const auto& fk : fk_defs) cols.push_back(fk.key_column);
  return cols;
}

std::vector<std::string> TargetMapping::static_table_columns() const {
  std::vector<std::string> cols = {"sk"};
  cols.insert(cols.end(), bk_columns.begin(), bk_columns.end());
  cols.insert(cols.end(), static_attrs.begin(), static_attrs.end());
  cols.insert(cols.end(), {"last_tx_type", "af", "last_tx_date"});
  return cols;
}

std::vector<std::string> TargetMapping::history_table_columns() const {
  std::vector<std::string> cols = {"sk"};
  cols.insert(cols.end(), bk_columns.begin(), bk_columns.end());
  cols.insert(cols.end(), {"bd", "ed"});
  cols.insert(cols.end(), dynamic_attrs.begin(), dynamic_attrs.end());
  for (const auto& fk : fk_defs) cols.push_back(fk.key_column);
  return cols;
}

const TargetMapping* MappingConfig::find_target(const std::string& name) const {
  for (const auto& t : targets)
    if (t.name == name) return &t;
  return nullptr;
}

const FeedSpec* MappingConfig::find_feed(const std::string& id) const {
  for (const auto& f : source_feeds)
    if (f.id == id) return &f;
  return nullptr;
}

const TargetMapping& MappingConfig::target(const std::string& name) const {
  if (const auto* t = find_target(name)) return *t;
  throw Error(ErrorCode::TableNotFound, "target '" + name + "' not in config");
}

const FeedSpec& MappingConfig::feed(const std::string& id) const {
  if (const auto* f = find_feed(id)) return *f;
  throw Error(ErrorCode::UnknownFeed, "feed '" + id + "' not in config");
}

std::vector<std::string> MappingConfig::feed_bk_columns(const std::string& feed_id) const {
  for (const auto& t : targets) {
    for (const auto& sm : t.source_mappings) {
      if (sm.feed_id != feed_id) continue;
      std::vector<std::string> out;
      for (const auto& bk : t.bk_columns) {
        for (const auto& [src, dst] : sm.column_map)
          if (dst == bk) out.push_back(src);
      }
      return out;
    }
  }
  throw Error(ErrorCode::UnknownFeed, "feed '" + feed_id + "' is not mapped by any target");
}

std::filesystem::path MappingConfig::feed_path(const std::string& feed_id,
                                               Date batch_date) const {
  const FeedSpec& spec = feed(feed_id);
  std::string p = spec.path_pattern;
  const std::string token = "{batch_date}";
  for (auto at = p.find(token); at != std::string::npos; at = p.find(token))
    p.replace(at, token.size(), format_date(batch_date));
  std::filesystem::path path(p);
  if (path.is_relative()) path = base_dir / path;
  return path;
}

MappingConfig parse_config(const std::string& json_text,
                           const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "config: top level must be an object");

  MappingConfig cfg;
  cfg.base_dir = base_dir;
  if (j.contains("batch_frequency"))
    cfg.batch_frequency = get_string(j, "batch_frequency", "config");

  for (const auto& jf : j.value("source_feeds", json::array())) {
    FeedSpec f;
    f.id = get_string(jf, "id", "source_feeds");
    f.path_pattern = get_string(jf, "path", "feed " + f.id);
    f.columns = get_string_list(jf, "columns", "feed " + f.id, true);
    cfg.source_feeds.push_back(std::move(f));
  }

  for (const auto& jt : j.value("targets", json::array())) {
    TargetMapping t;
    t.name = get_string(jt, "name", "targets");
    const std::string where = "target " + t.name;
    t.bk_columns = get_string_list(jt, "bk_columns", where, true);
    t.static_attrs = get_string_list(jt, "static_attrs", where, false);
    t.dynamic_attrs = get_string_list(jt, "dynamic_attrs", where, false);
    for (const auto& jfk : jt.value("fk_defs", json::array())) {
      FkDef fk;
      fk.column = get_string(jfk, "column", where + " fk_defs");
      fk.references = get_string(jfk, "references", where + "." + fk.column);
      fk.key_column = jfk.value("key_column", fk.column + "_key");
      t.fk_defs.push_back(std::move(fk));
    }
    for (const auto& jsm : jt.value("source_mappings", json::array())) {
      SourceMapping sm;
      sm.feed_id = get_string(jsm, "feed", where + " source_mappings");
      if (!jsm.contains("columns") || !jsm["columns"].is_object())
        throw Error(ErrorCode::ParseError,
                    where + " mapping of feed " + sm.feed_id + ": missing 'columns' object");
      for (const auto& [src, dst] : jsm["columns"].items()) {
        if (!dst.is_string())
          throw Error(ErrorCode::ParseError, where + ": column map values must be strings");
        sm.column_map[src] = dst.get<std::string>();
      }
      t.source_mappings.push_back(std::move(sm));
    }
    cfg.targets.push_back(std::move(t));
  }
  return cfg;
}

MappingConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  MappingConfig cfg = parse_config(buf.str(), path.parent_path());
  auto violations = validate_config(cfg);
  if (!violations.empty()) {
    std::string msg;
    for (const auto& v : violations) {
      if (!msg.empty()) msg += "; ";
      msg += v.code + " at " + v.location + ": " + v.message;
    }
    throw Error(ErrorCode::ValidationError, msg);
  }
  return cfg;
}

std::string write_config(const MappingConfig& cfg) {
  json j;
  j["batch_frequency"] = cfg.batch_frequency;
  j["source_feeds"] = json::array();
  for (const auto& f : cfg.source_feeds) {
    json jf;
    jf["id"] = f.id;
    jf["path"] = f.path_pattern;
    jf["columns"] = f.columns;
    j["source_feeds"].push_back(jf);
  }
  j["targets"] = json::array();
  for (const auto& t : cfg.targets) {
    json jt;
    jt["name"] = t.name;
    jt["bk_columns"] = t.bk_columns;
    jt["static_attrs"] = t.static_attrs;
    jt["dynamic_attrs"] = t.dynamic_attrs;
    jt["fk_defs"] = json::array();
    for (const auto& fk : t.fk_defs) {
      json jfk;
      jfk["column"] = fk.column;
      jfk["references"] = fk.references;
      jfk["key_column"] = fk.key_column;
      jt["fk_defs"].push_back(jfk);
    }
    jt["source_mappings"] = json::array();
    for (const auto& sm : t.source_mappings) {
      json jsm;
      jsm["feed"] = sm.feed_id;
      jsm["columns"] = json::object();
      for (const auto& [src, dst] : sm.column_map) jsm["columns"][src] = dst;
      jt["source_mappings"].push_back(jsm);
    }
    j["targets"].push_back(jt);
  }
  return j.dump(2) + "\n";
}

namespace {

void check_target(const MappingConfig& cfg, const TargetMapping& t,
                  std::vector<Violation>& out) {
  const std::string loc = t.name;
  if (t.bk_columns.empty())
    out.push_back({"EmptyBusinessKey", loc, "target declares no business-key columns"});

  // bk / static / dynamic / fk columns are mutually disjoint.
  std::map<std::string, std::string> cls;
  auto classify = [&](const std::vector<std::string>& cols, const std::string& kind) {
    for (const auto& c : cols) {
      auto [it, inserted] = cls.emplace(c, kind);
      if (!inserted)
        out.push_back({"OverlapViolation", loc + "." + c,
                       "column listed as both " + it->second + " and " + kind});
      if (kReservedColumns.count(c))
        out.push_back({"ReservedColumn", loc + "." + c, "column name is reserved"});
    }
  };
  classify(t.bk_columns, "bk");
  classify(t.static_attrs, "static");
  classify(t.dynamic_attrs, "dynamic");
  classify(t.fk_columns(), "fk");

  std::set<std::string> key_cols;
  for (const auto& fk : t.fk_defs) {
    if (cls.count(fk.key_column) || !key_cols.insert(fk.key_column).second)
      out.push_back({"OverlapViolation", loc + "." + fk.key_column,
                     "resolved-key column collides with another column"});
    const TargetMapping* ref = cfg.find_target(fk.references);
    if (!ref) {
      out.push_back({"DanglingFkReference", loc + "." + fk.column,
                     loc + "." + fk.column + " -> " + fk.references + " undefined"});
    } else if (ref->bk_columns.size() != 1) {
      out.push_back({"CompositeFkTarget", loc + "." + fk.column,
                     "referenced target " + fk.references +
                         " must have a single-column business key"});
    }
  }

  for (const auto& sm : t.source_mappings) {
    const std::string mloc = loc + " <- " + sm.feed_id;
    const FeedSpec* feed = cfg.find_feed(sm.feed_id);
    if (!feed) {
      out.push_back({"UnknownFeed", mloc, "mapping references undeclared feed"});
      continue;
    }
    std::set<std::string> feed_cols(feed->columns.begin(), feed->columns.end());
    std::set<std::string> mapped_targets;
    for (const auto& [src, dst] : sm.column_map) {
      if (!feed_cols.count(src))
        out.push_back({"UnknownColumn", mloc, "source column '" + src + "' not in feed"});
      if (!cls.count(dst))
        out.push_back({"UnknownColumn", mloc, "target column '" + dst + "' not declared"});
      if (!mapped_targets.insert(dst).second)
        out.push_back({"OverlapViolation", mloc, "two source columns map to '" + dst + "'"});
    }
    for (const auto& bk : t.bk_columns) {
      if (!mapped_targets.count(bk))
        out.push_back({"MissingBkCoverage", mloc,
                       "mapping does not cover business-key column '" + bk + "'"});
    }
  }
}

}  // namespace

std::vector<Violation> validate_config(const MappingConfig& cfg) {
  std::vector<Violation> out;
  if (cfg.batch_frequency != "daily")
    out.push_back({"BadFrequency", "config", "only daily batch_frequency is supported"});
  if (cfg.targets.empty()) out.push_back({"NoTargets", "config", "no targets"});

  std::set<std::string> names;
  for (const auto& t : cfg.targets)
    if (!names.insert(t.name).second)
      out.push_back({"DuplicateName", t.name, "duplicate target name"});

  std::set<std::string> feed_ids;
  for (const auto& f : cfg.source_feeds) {
    if (!feed_ids.insert(f.id).second)
      out.push_back({"DuplicateName", f.id, "duplicate feed id"});
    std::set<std::string> cols;
    for (const auto& c : f.columns)
      if (!cols.insert(c).second)
        out.push_back({"DuplicateName", f.id + "." + c, "duplicate feed column"});
    for (const char* required : {"tx_type", "tx_date"})
      if (!cols.count(required))
        out.push_back({"MissingTxColumns", f.id,
                       std::string("feed lacks required column '") + required + "'"});
  }

  for (const auto& t : cfg.targets) check_target(cfg, t, out);

  // Every declared feed must be mapped, and all targets mapping one feed
  // must agree on its source-side business key (the extractor dedups by it).
  for (const auto& f : cfg.source_feeds) {
    std::vector<std::string> first_bk;
    bool mapped = false;
    for (const auto& t : cfg.targets) {
      for (const auto& sm : t.source_mappings) {
        if (sm.feed_id != f.id) continue;
        std::vector<std::string> bk;
        for (const auto& tb : t.bk_columns)
          for (const auto& [src, dst] : sm.column_map)
            if (dst == tb) bk.push_back(src);
        if (!mapped) {
          first_bk = bk;
          mapped = true;
        } else if (bk != first_bk) {
          out.push_back({"InconsistentFeedKey", f.id + " <- " + t.name,
                         "targets disagree on the feed's source business key"});
        }
      }
    }
    if (!mapped)
      out.push_back({"UnmappedFeed", f.id, "feed is not mapped by any target"});
  }
  return out;
}

}  // namespace etl
