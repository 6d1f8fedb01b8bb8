#include "etl/extract.hpp"

#include <algorithm>
#include <map>

#include "etl/errors.hpp"
#include "etl/records.hpp"

namespace etl {

IngestStats ingest_change_feed(Store& store, const MappingConfig& cfg,
                               const std::string& feed_id,
                               const std::filesystem::path& feed_file, Date batch_date) {
  const FeedSpec& spec = cfg.feed(feed_id);
  CsvTable feed = read_csv_file(feed_file);
  const std::string origin = feed_file.filename().string();
  if (feed.header != spec.columns)
    throw Error(ErrorCode::ParseError,
                origin + ": header does not match the declared columns of feed " + feed_id);

  int tx_type_col = feed.column_index("tx_type");
  int tx_date_col = feed.column_index("tx_date");
  std::vector<int> bk_cols;
  for (const auto& c : cfg.feed_bk_columns(feed_id)) bk_cols.push_back(feed.column_index(c));

  auto line_of = [&feed](std::size_t row) {
    return row < feed.line_numbers.size() ? feed.line_numbers[row] : row + 2;
  };

  // bk key -> (winning row index, tx_date); later line wins ties.
  std::map<std::string, std::pair<std::size_t, Date>> latest;
  IngestStats stats;
  stats.feed_id = feed_id;
  for (std::size_t i = 0; i < feed.rows.size(); ++i) {
    const auto& row = feed.rows[i];
    ++stats.rows_read;
    const std::string where = origin + ":" + std::to_string(line_of(i));
    if (!try_parse_tx_type(row[tx_type_col]))
      throw Error(ErrorCode::ParseError, where + ": bad tx_type '" + row[tx_type_col] + "'");
    Date tx_date;
    try {
      tx_date = parse_date(row[tx_date_col]);
    } catch (const Error& e) {
      throw Error(ErrorCode::ParseError, where + ": " + e.detail());
    }
    if (tx_date == kDateAbsent)
      throw Error(ErrorCode::ParseError, where + ": missing tx_date");
    if (tx_date > batch_date)
      throw Error(ErrorCode::FutureDate, where + ": tx_date " + format_date(tx_date) +
                                             " is past the batch date " + format_date(batch_date));
    BkTuple bk;
    for (int c : bk_cols) {
      if (row[c].empty())
        throw Error(ErrorCode::ParseError, where + ": blank business-key column");
      bk.push_back(row[c]);
    }
    auto [it, inserted] = latest.try_emplace(bk_key(bk), i, tx_date);
    if (!inserted && tx_date >= it->second.second) it->second = {i, tx_date};
  }

  std::vector<std::size_t> keep;
  for (const auto& [_, entry] : latest) keep.push_back(entry.first);
  std::sort(keep.begin(), keep.end());

  CsvTable staged;
  staged.header = feed.header;
  for (std::size_t i : keep) staged.rows.push_back(feed.rows[i]);
  stats.rows_kept = staged.rows.size();
  stats.rows_superseded = stats.rows_read - stats.rows_kept;
  store.write_lv1(feed_id, std::move(staged));
  return stats;
}

}  // namespace etl
