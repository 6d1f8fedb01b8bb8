#include "etl/records.hpp"

#include "etl/errors.hpp"

namespace etl {

const char* to_string(TxType t) {
  switch (t) {
    case TxType::Insert: return "I";
    case TxType::Update: return "U";
    case TxType::Delete: return "D";
  }
  return "?";
}

const char* to_string(OpCode op) {
  switch (op) {
    case OpCode::B: return "B";
    case OpCode::EB: return "EB";
    case OpCode::E: return "E";
    case OpCode::A: return "A";
    case OpCode::DA: return "DA";
  }
  return "?";
}

std::optional<TxType> try_parse_tx_type(const std::string& s) {
  if (s == "I") return TxType::Insert;
  if (s == "U") return TxType::Update;
  if (s == "D") return TxType::Delete;
  return std::nullopt;
}

TxType parse_tx_type(const std::string& s) {
  if (auto t = try_parse_tx_type(s)) return *t;
  throw Error(ErrorCode::ParseError, "bad tx_type '" + s + "'");
}

OpCode parse_op_code(const std::string& s) {
  if (s == "B") return OpCode::B;
  if (s == "EB") return OpCode::EB;
  if (s == "E") return OpCode::E;
  if (s == "A") return OpCode::A;
  if (s == "DA") return OpCode::DA;
  throw Error(ErrorCode::ParseError, "bad operation code '" + s + "'");
}

std::string bk_key(const BkTuple& bk) {
  std::string key;
  for (const auto& part : bk) {
    if (!key.empty()) key += '\x1f';
    key += part;
  }
  return key;
}

std::string bk_display(const BkTuple& bk) {
  std::string out;
  for (const auto& part : bk) {
    if (!out.empty()) out += '|';
    out += part;
  }
  return out;
}

std::optional<std::string> staging_violation(const StagingRecord& rec) {
  if (rec.sk <= 0) return "sk must be positive";
  if (rec.bk.empty()) return "business key missing";
  for (const auto& part : rec.bk)
    if (part.empty()) return "blank business-key part";
  auto span_ok = [&] {
    if ((rec.sor_bd == kDateAbsent) != (rec.ed == kDateAbsent))
      return false;  // the close pair comes together or not at all
    if (rec.sor_bd != kDateAbsent && rec.sor_bd > rec.ed) return false;
    return true;
  };
  switch (rec.op) {
    case OpCode::B:
      if (rec.new_bd == kDateAbsent) return "B row lacks new_bd";
      if (rec.sor_bd != kDateAbsent || rec.ed != kDateAbsent)
        return "B row carries close dates";
      if (rec.af) return "B row flagged as augment";
      break;
    case OpCode::DA:
      if (rec.new_bd == kDateAbsent) return "DA row lacks new_bd";
      if (rec.sor_bd != kDateAbsent || rec.ed != kDateAbsent)
        return "DA row carries close dates";
      if (rec.af) return "DA row flagged as augment";
      break;
    case OpCode::EB:
      if (rec.new_bd == kDateAbsent) return "EB row lacks new_bd";
      if (!span_ok()) return "EB row close dates inconsistent";
      if (rec.ed != kDateAbsent && rec.ed >= rec.new_bd)
        return "EB row requires ed < new_bd";
      if (rec.af) return "EB row flagged as augment";
      break;
    case OpCode::E:
      if (rec.ed == kDateAbsent) return "E row lacks ed";
      if (rec.new_bd != kDateAbsent) return "E row carries new_bd";
      if (rec.sor_bd != kDateAbsent && rec.sor_bd > rec.ed)
        return "E row requires sor_bd <= ed";
      if (rec.af) return "E row flagged as augment";
      break;
    case OpCode::A:
      if (!rec.af) return "A row must set the augment flag";
      if (rec.sor_bd != kDateAbsent || rec.ed != kDateAbsent || rec.new_bd != kDateAbsent)
        return "A row carries dates";
      for (const auto& [col, val] : rec.data)
        if (!val.empty()) return "A row carries attribute '" + col + "'";
      break;
  }
  return std::nullopt;
}

namespace {

std::string format_sk(Sk sk) { return sk == kSkAbsent ? "" : std::to_string(sk); }

Sk parse_sk(const std::string& s, const std::string& what) {
  if (s.empty()) return kSkAbsent;
  Sk v = 0;
  for (char c : s) {
    if (c < '0' || c > '9')
      throw Error(ErrorCode::ParseError, "bad " + what + " '" + s + "'");
    v = v * 10 + (c - '0');
  }
  if (v <= 0) throw Error(ErrorCode::ParseError, "bad " + what + " '" + s + "'");
  return v;
}

std::string format_flag(bool af) { return af ? "1" : "0"; }

bool parse_flag(const std::string& s) {
  if (s == "1") return true;
  if (s == "0" || s.empty()) return false;
  throw Error(ErrorCode::ParseError, "bad flag '" + s + "'");
}

}  // namespace

std::vector<std::string> to_row(const StagingRecord& rec, const TargetMapping& t) {
  std::vector<std::string> row;
  row.push_back(to_string(rec.op));
  row.push_back(format_sk(rec.sk));
  for (std::size_t i = 0; i < t.bk_columns.size(); ++i)
    row.push_back(i < rec.bk.size() ? rec.bk[i] : "");
  row.push_back(format_date(rec.sor_bd));
  row.push_back(format_date(rec.ed));
  row.push_back(format_date(rec.new_bd));
  row.push_back(format_flag(rec.af));
  auto value_of = [](const std::map<std::string, std::string>& m, const std::string& k) {
    auto it = m.find(k);
    return it == m.end() ? std::string() : it->second;
  };
  for (const auto& c : t.static_attrs) row.push_back(value_of(rec.data, c));
  for (const auto& c : t.dynamic_attrs) row.push_back(value_of(rec.data, c));
  for (const auto& fk : t.fk_defs) row.push_back(value_of(rec.fk_values, fk.column));
  for (const auto& fk : t.fk_defs) {
    auto it = rec.resolved_keys.find(fk.column);
    row.push_back(it == rec.resolved_keys.end() ? "" : format_sk(it->second));
  }
  return row;
}

StagingRecord staging_from_row(const std::vector<std::string>& row, const TargetMapping& t) {
  StagingRecord rec;
  std::size_t i = 0;
  rec.op = parse_op_code(row.at(i++));
  rec.sk = parse_sk(row.at(i++), "sk");
  for (std::size_t b = 0; b < t.bk_columns.size(); ++b) rec.bk.push_back(row.at(i++));
  rec.sor_bd = parse_date(row.at(i++));
  rec.ed = parse_date(row.at(i++));
  rec.new_bd = parse_date(row.at(i++));
  rec.af = parse_flag(row.at(i++));
  for (const auto& c : t.static_attrs) rec.data[c] = row.at(i++);
  for (const auto& c : t.dynamic_attrs) rec.data[c] = row.at(i++);
  for (const auto& fk : t.fk_defs) rec.fk_values[fk.column] = row.at(i++);
  for (const auto& fk : t.fk_defs) {
    Sk sk = parse_sk(row.at(i++), "resolved key");
    if (sk != kSkAbsent) rec.resolved_keys[fk.column] = sk;
  }
  return rec;
}

std::vector<std::string> to_row(const StaticRecord& rec, const TargetMapping& t) {
  std::vector<std::string> row;
  row.push_back(format_sk(rec.sk));
  for (std::size_t i = 0; i < t.bk_columns.size(); ++i)
    row.push_back(i < rec.bk.size() ? rec.bk[i] : "");
  for (const auto& c : t.static_attrs) {
    auto it = rec.static_attrs.find(c);
    row.push_back(it == rec.static_attrs.end() ? "" : it->second);
  }
  row.push_back(rec.last_tx_type);
  row.push_back(format_flag(rec.af));
  row.push_back(format_date(rec.last_tx_date));
  return row;
}

StaticRecord static_from_row(const std::vector<std::string>& row, const TargetMapping& t) {
  StaticRecord rec;
  std::size_t i = 0;
  rec.sk = parse_sk(row.at(i++), "sk");
  for (std::size_t b = 0; b < t.bk_columns.size(); ++b) rec.bk.push_back(row.at(i++));
  for (const auto& c : t.static_attrs) rec.static_attrs[c] = row.at(i++);
  rec.last_tx_type = row.at(i++);
  if (!rec.last_tx_type.empty()) parse_tx_type(rec.last_tx_type);
  rec.af = parse_flag(row.at(i++));
  rec.last_tx_date = parse_date(row.at(i++));
  return rec;
}

std::vector<std::string> to_row(const HistoryRecord& rec, const TargetMapping& t) {
  std::vector<std::string> row;
  row.push_back(format_sk(rec.sk));
  for (std::size_t i = 0; i < t.bk_columns.size(); ++i)
    row.push_back(i < rec.bk.size() ? rec.bk[i] : "");
  row.push_back(format_date(rec.bd));
  row.push_back(format_date(rec.ed));
  for (const auto& c : t.dynamic_attrs) {
    auto it = rec.dynamic_attrs.find(c);
    row.push_back(it == rec.dynamic_attrs.end() ? "" : it->second);
  }
  for (const auto& fk : t.fk_defs) {
    auto it = rec.resolved_keys.find(fk.column);
    row.push_back(it == rec.resolved_keys.end() ? "" : format_sk(it->second));
  }
  return row;
}

HistoryRecord history_from_row(const std::vector<std::string>& row, const TargetMapping& t) {
  HistoryRecord rec;
  std::size_t i = 0;
  rec.sk = parse_sk(row.at(i++), "sk");
  for (std::size_t b = 0; b < t.bk_columns.size(); ++b) rec.bk.push_back(row.at(i++));
  rec.bd = parse_date(row.at(i++));
  rec.ed = parse_date(row.at(i++));
  for (const auto& c : t.dynamic_attrs) rec.dynamic_attrs[c] = row.at(i++);
  for (const auto& fk : t.fk_defs) {
    Sk sk = parse_sk(row.at(i++), "resolved key");
    if (sk != kSkAbsent) rec.resolved_keys[fk.column] = sk;
  }
  return rec;
}

}  // namespace etl
