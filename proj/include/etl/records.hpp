#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "etl/config.hpp"
#include "etl/dates.hpp"

namespace etl {

// Surrogate keys are positive integers; 0 means unassigned.
using Sk = std::int64_t;
inline constexpr Sk kSkAbsent = 0;

// Source-side transaction type code.
enum class TxType { Insert, Update, Delete };

// Warehouse-side operation code. Exactly these five are representable.
enum class OpCode { B, EB, E, A, DA };

const char* to_string(TxType t);
const char* to_string(OpCode op);
TxType parse_tx_type(const std::string& s);     // throws ParseError
OpCode parse_op_code(const std::string& s);     // throws ParseError
std::optional<TxType> try_parse_tx_type(const std::string& s);

// A business key is a value tuple; blank parts are not allowed.
using BkTuple = std::vector<std::string>;

// Joins a tuple into a single map key (unit separator cannot occur in data).
std::string bk_key(const BkTuple& bk);
std::string bk_display(const BkTuple& bk);

// Deduplicated source change, already transposed to target shape: the
// business key, last action of the day, and the mapped attribute values.
struct ChangeRecord {
  BkTuple bk;
  TxType tx_type = TxType::Insert;
  Date tx_date = kDateAbsent;
  std::map<std::string, std::string> attrs;      // target column -> value
  std::map<std::string, std::string> fk_values;  // fk column -> business value
};

// One staging (Lv2) row. Blank string / 0 date / 0 sk mean absent.
struct StagingRecord {
  OpCode op = OpCode::B;
  Sk sk = kSkAbsent;
  BkTuple bk;
  Date sor_bd = kDateAbsent;  // begin date of the version being superseded
  Date ed = kDateAbsent;      // end date to stamp on history
  Date new_bd = kDateAbsent;  // begin date of the new version
  bool af = false;            // augment placeholder flag
  std::map<std::string, std::string> data;       // static + dynamic columns
  std::map<std::string, std::string> fk_values;  // fk column -> business value
  std::map<std::string, Sk> resolved_keys;       // fk column -> surrogate key
};

struct StaticRecord {
  Sk sk = kSkAbsent;
  BkTuple bk;
  std::map<std::string, std::string> static_attrs;
  std::string last_tx_type;  // "I"/"U"/"D", empty = absent
  bool af = false;
  Date last_tx_date = kDateAbsent;
};

struct HistoryRecord {
  Sk sk = kSkAbsent;
  BkTuple bk;
  Date bd = kDateAbsent;
  Date ed = kDateAbsent;  // kOpenEndDate marks the current version
  std::map<std::string, std::string> dynamic_attrs;
  std::map<std::string, Sk> resolved_keys;  // keyed by fk column
};

// Op-dependent field checks. EB and E tolerate an absent sor_bd/ed pair:
// that encodes "no prior open version to close" (reactivation of a deleted
// entity, or delete of an augment placeholder).
std::optional<std::string> staging_violation(const StagingRecord& rec);

// CSV row conversions against a target's declared schema.
std::vector<std::string> to_row(const StagingRecord& rec, const TargetMapping& t);
StagingRecord staging_from_row(const std::vector<std::string>& row, const TargetMapping& t);
std::vector<std::string> to_row(const StaticRecord& rec, const TargetMapping& t);
StaticRecord static_from_row(const std::vector<std::string>& row, const TargetMapping& t);
std::vector<std::string> to_row(const HistoryRecord& rec, const TargetMapping& t);
HistoryRecord history_from_row(const std::vector<std::string>& row, const TargetMapping& t);

}  // namespace etl
