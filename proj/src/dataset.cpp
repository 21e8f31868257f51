#include "fedrec/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fedrec/errors.hpp"

namespace fedrec {

namespace {

struct RawRecord {
  std::int64_t user;
  std::int64_t item;
  double rating;
  std::int64_t timestamp;
};

std::int64_t parse_int(std::string_view tok, const std::string& path, std::size_t line_no,
                       const char* what) {
  std::int64_t value = 0;
  const auto* begin = tok.data();
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw DataError(path + ":" + std::to_string(line_no) + ": malformed " + what + " '" +
                    std::string(tok) + "'");
  }
  return value;
}

double parse_double(std::string_view tok, const std::string& path, std::size_t line_no,
                    const char* what) {
  // from_chars<double> is available on this toolchain but strtod keeps the
  // parse permissive about exponents the datasets actually use
  std::string buf(tok);
  char* endp = nullptr;
  const double value = std::strtod(buf.c_str(), &endp);
  if (endp != buf.c_str() + buf.size() || buf.empty()) {
    throw DataError(path + ":" + std::to_string(line_no) + ": malformed " + what + " '" +
                    buf + "'");
  }
  return value;
}

}  // namespace

Dataset load_interactions(const std::string& path, InteractionFormat format) {
  if (format != InteractionFormat::tsv_rating) {
    throw DataError("load_interactions: unsupported format");
  }
  std::ifstream in(path);
  if (!in) throw DataError("load_interactions: cannot open '" + path + "'");

  std::vector<RawRecord> raw;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      // a blank final line is a trailing newline, anything else is malformed
      if (in.peek() == EOF) break;
      throw DataError(path + ":" + std::to_string(line_no) + ": empty line");
    }
    std::string_view sv(line);
    std::array<std::string_view, 4> fields;
    std::size_t field = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= sv.size(); ++i) {
      if (i == sv.size() || sv[i] == '\t') {
        if (field >= 4) {
          throw DataError(path + ":" + std::to_string(line_no) + ": expected 4 tab-separated columns");
        }
        fields[field++] = sv.substr(start, i - start);
        start = i + 1;
      }
    }
    if (field != 4) {
      throw DataError(path + ":" + std::to_string(line_no) + ": expected 4 tab-separated columns, got " +
                      std::to_string(field));
    }
    RawRecord r;
    r.user = parse_int(fields[0], path, line_no, "user id");
    r.item = parse_int(fields[1], path, line_no, "item id");
    r.rating = parse_double(fields[2], path, line_no, "rating");
    r.timestamp = parse_int(fields[3], path, line_no, "timestamp");
    if (r.timestamp < 0) {
      throw DataError(path + ":" + std::to_string(line_no) + ": negative timestamp");
    }
    raw.push_back(r);
  }
  if (raw.empty()) throw DataError("load_interactions: '" + path + "' has no records");

  // drop users with < 3 interactions, then re-densify both id spaces over
  // the surviving records in first-appearance order
  std::unordered_map<std::int64_t, std::uint32_t> user_counts;
  for (const RawRecord& r : raw) ++user_counts[r.user];

  Dataset d;
  for (const RawRecord& r : raw) {
    if (user_counts[r.user] < 3) continue;
    auto [uit, unew] = d.user_index.try_emplace(r.user, static_cast<std::uint32_t>(d.user_original_ids.size()));
    if (unew) d.user_original_ids.push_back(r.user);
    auto [iit, inew] = d.item_index.try_emplace(r.item, static_cast<std::uint32_t>(d.item_original_ids.size()));
    if (inew) d.item_original_ids.push_back(r.item);
    d.interactions.push_back({uit->second, iit->second, r.rating, r.timestamp});
  }
  if (d.interactions.empty()) {
    throw DataError("load_interactions: no user in '" + path + "' has >= 3 interactions");
  }
  d.n_users = static_cast<std::uint32_t>(d.user_original_ids.size());
  d.n_items = static_cast<std::uint32_t>(d.item_original_ids.size());
  d.dropped_users = 0;
  for (const auto& [id, count] : user_counts) {
    if (count < 3) ++d.dropped_users;
  }
  d.user_attributes = ones_attributes(d.n_users);
  d.item_attributes = ones_attributes(d.n_items);
  return d;
}

DenseMatrix load_attributes(const std::string& path, std::uint32_t expected_rows) {
  std::ifstream in(path);
  if (!in) throw DataError("load_attributes: cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && in.peek() == EOF) break;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      row.push_back(parse_double(tok, path, line_no, "attribute"));
    }
    if (row.empty()) throw DataError(path + ":" + std::to_string(line_no) + ": empty row");
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw DataError(path + ":" + std::to_string(line_no) + ": inconsistent column count");
    }
    rows.push_back(std::move(row));
  }
  if (rows.size() != expected_rows) {
    throw DataError("load_attributes: '" + path + "' has " + std::to_string(rows.size()) +
                    " rows, expected " + std::to_string(expected_rows));
  }
  DenseMatrix table(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::copy(rows[r].begin(), rows[r].end(), table.row(r).begin());
  }
  return table;
}

DenseMatrix ones_attributes(std::uint32_t rows) { return DenseMatrix(rows, 1, 1.0); }

SplitDataset leave_one_out_split(const Dataset& d) {
  std::vector<std::vector<InteractionRecord>> per_user(d.n_users);
  for (const InteractionRecord& r : d.interactions) per_user[r.user].push_back(r);

  SplitDataset split;
  split.train.resize(d.n_users);
  split.validation.resize(d.n_users);
  split.test.resize(d.n_users);
  for (std::uint32_t u = 0; u < d.n_users; ++u) {
    auto& history = per_user[u];
    if (history.size() < 3) {
      throw DataError("leave_one_out_split: user " + std::to_string(u) +
                      " has fewer than 3 interactions");
    }
    // stable sort keeps file order for equal timestamps
    std::stable_sort(history.begin(), history.end(),
                     [](const InteractionRecord& a, const InteractionRecord& b) {
                       return a.timestamp < b.timestamp;
                     });
    split.test[u] = history.back();
    split.validation[u] = history[history.size() - 2];
    split.train[u].assign(history.begin(), history.end() - 2);
  }
  return split;
}

std::vector<std::uint32_t> sample_eval_negatives(std::uint32_t user, const Dataset& d,
                                                 const SplitDataset& split, std::uint32_t n,
                                                 RandomStream& rng) {
  std::vector<bool> interacted(d.n_items, false);
  for (const InteractionRecord& r : split.train[user]) interacted[r.item] = true;
  interacted[split.validation[user].item] = true;
  interacted[split.test[user].item] = true;

  std::vector<std::uint32_t> candidates;
  candidates.reserve(d.n_items);
  for (std::uint32_t i = 0; i < d.n_items; ++i) {
    if (!interacted[i]) candidates.push_back(i);
  }
  if (candidates.size() < n) {
    throw DataError("sample_eval_negatives: user " + std::to_string(user) + " has only " +
                    std::to_string(candidates.size()) + " non-interacted items, need " +
                    std::to_string(n) + " (short by " +
                    std::to_string(n - candidates.size()) + ")");
  }
  const auto picks =
      sample_without_replacement(static_cast<std::uint32_t>(candidates.size()), n, rng);
  std::vector<std::uint32_t> out(n);
  for (std::uint32_t i = 0; i < n; ++i) out[i] = candidates[picks[i]];
  return out;
}

std::vector<std::uint32_t> distinct_train_items(const SplitDataset& split, std::uint32_t user) {
  std::vector<std::uint32_t> items;
  for (const InteractionRecord& r : split.train[user]) {
    if (std::find(items.begin(), items.end(), r.item) == items.end()) items.push_back(r.item);
  }
  return items;
}

void write_interactions_tsv(const Dataset& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("write_interactions_tsv: cannot open '" + path + "'");
  char buf[128];
  for (const InteractionRecord& r : d.interactions) {
    std::snprintf(buf, sizeof(buf), "%lld\t%lld\t%.17g\t%lld\n",
                  static_cast<long long>(d.user_original_ids[r.user]),
                  static_cast<long long>(d.item_original_ids[r.item]), r.rating,
                  static_cast<long long>(r.timestamp));
    out << buf;
  }
  if (!out) throw DataError("write_interactions_tsv: write failed for '" + path + "'");
}

void write_attributes_csv(const DenseMatrix& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("write_attributes_csv: cannot open '" + path + "'");
  char buf[64];
  for (std::size_t r = 0; r < table.rows; ++r) {
    for (std::size_t c = 0; c < table.cols; ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", table.at(r, c));
      out << buf;
      if (c + 1 < table.cols) out << ',';
    }
    out << '\n';
  }
  if (!out) throw DataError("write_attributes_csv: write failed for '" + path + "'");
}

}  // namespace fedrec
