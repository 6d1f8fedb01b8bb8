#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "etl/dates.hpp"

namespace etl {

// Declarative mapping of source feeds onto warehouse targets. Loaded once,
// immutable afterwards; safe to share across concurrent jobs.

struct FeedSpec {
  std::string id;
  // May contain {batch_date}; relative paths resolve against the config
  // file's directory.
  std::string path_pattern;
  std::vector<std::string> columns;  // must include tx_type and tx_date
};

struct FkDef {
  std::string column;      // business-value column in the staging table
  std::string references;  // referenced target name
  std::string key_column;  // resolved surrogate-key column (default <column>_key)
};

struct SourceMapping {
  std::string feed_id;
  std::map<std::string, std::string> column_map;  // source column -> target column
};

struct TargetMapping {
  std::string name;
  std::vector<std::string> bk_columns;
  std::vector<std::string> static_attrs;
  std::vector<std::string> dynamic_attrs;
  std::vector<FkDef> fk_defs;
  // More than one entry expresses a many-to-one mapping.
  std::vector<SourceMapping> source_mappings;

  std::vector<std::string> fk_columns() const;
  std::vector<std::string> key_columns() const;
  // Staging-table column layout: op, sk, bk..., sor_bd, ed, new_bd, af,
  // statics..., dynamics..., fks..., keys...
  std::vector<std::string> lv2_columns() const;
  std::vector<std::string> static_table_columns() const;
  std::vector<std::string> history_table_columns() const;
};

struct MappingConfig {
  std::string batch_frequency = "daily";
  std::vector<FeedSpec> source_feeds;
  std::vector<TargetMapping> targets;
  std::filesystem::path base_dir;  // config file directory; not serialized

  const TargetMapping* find_target(const std::string& name) const;
  const FeedSpec* find_feed(const std::string& id) const;
  const TargetMapping& target(const std::string& name) const;  // throws
  const FeedSpec& feed(const std::string& id) const;           // throws

  // Source-side business-key columns of a feed, in the order of the bk
  // columns of the (validated, consistent) targets that map it.
  std::vector<std::string> feed_bk_columns(const std::string& feed_id) const;

  std::filesystem::path feed_path(const std::string& feed_id, Date batch_date) const;
};

struct Violation {
  std::string code;
  std::string location;
  std::string message;
};

MappingConfig load_config(const std::filesystem::path& path);
MappingConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir);
std::vector<Violation> validate_config(const MappingConfig& cfg);
std::string write_config(const MappingConfig& cfg);  // JSON, round-trips

}  // namespace etl
