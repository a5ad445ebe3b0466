#include "geostat/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "geostat/errors.hpp"
#include "geostat/random.hpp"

namespace geostat {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (c == '"') {
      if (quoted && i + 1 < line.size() && line[i + 1] == '"') {
        cell.push_back('"');
        ++i;
      } else {
        quoted = !quoted;
      }
    } else if (c == ',' && !quoted) {
      cells.push_back(trim(cell));
      cell.clear();
    } else {
      cell.push_back(c);
    }
  }
  cells.push_back(trim(cell));
  return cells;
}

std::optional<double> parse_number(const std::string& cell) {
  if (cell.empty()) return std::nullopt;
  std::string_view text = cell;
  if (text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v))
    return std::nullopt;
  return v;
}

struct RawCsv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

RawCsv read_raw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFound("cannot open '" + path.string() + "'");
  RawCsv raw;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    if (!have_header) {
      if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
      raw.header = split_line(line);
      have_header = true;
    } else {
      raw.rows.push_back(split_line(line));
    }
  }
  if (!have_header) throw MissingColumn("'" + path.string() + "' has no header row");
  return raw;
}

std::size_t column_index(const RawCsv& raw, const std::string& name) {
  const auto it = std::find(raw.header.begin(), raw.header.end(), name);
  if (it == raw.header.end()) throw MissingColumn("missing column '" + name + "'");
  return static_cast<std::size_t>(it - raw.header.begin());
}

double cell_value(const RawCsv& raw, std::size_t row, std::size_t col) {
  const auto& cells = raw.rows[row];
  if (col >= cells.size()) throw BadCell(row + 1, raw.header[col]);
  const auto v = parse_number(cells[col]);
  if (!v) throw BadCell(row + 1, raw.header[col]);
  return *v;
}

}  // namespace

Dataset Dataset::rows(const std::vector<std::size_t>& ids) const {
  Dataset out;
  out.feature_names = feature_names;
  out.source = source;
  out.features.resize(static_cast<Eigen::Index>(ids.size()), features.cols());
  if (predictions) out.predictions.emplace();
  for (std::size_t r = 0; r < ids.size(); ++r) {
    const auto id = ids[r];
    out.coords.push_back(coords.at(id));
    out.target.push_back(target.at(id));
    if (features.cols() > 0)
      out.features.row(static_cast<Eigen::Index>(r)) = features.row(static_cast<Eigen::Index>(id));
    if (predictions) out.predictions->push_back(predictions->at(id));
  }
  return out;
}

Dataset read_points_csv(const std::filesystem::path& path, const ColumnMapping& columns) {
  const auto raw = read_raw(path);
  const auto ix = column_index(raw, columns.x);
  const auto iy = column_index(raw, columns.y);
  const auto iv = column_index(raw, columns.value);
  std::vector<std::size_t> ifeat;
  for (const auto& f : columns.features) ifeat.push_back(column_index(raw, f));
  std::optional<std::size_t> ipred;
  if (columns.prediction) ipred = column_index(raw, *columns.prediction);

  Dataset ds;
  ds.source = path.string();
  ds.feature_names = columns.features;
  const auto n = raw.rows.size();
  ds.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(ifeat.size()));
  if (ipred) ds.predictions.emplace();
  for (std::size_t r = 0; r < n; ++r) {
    ds.coords.push_back({cell_value(raw, r, ix), cell_value(raw, r, iy)});
    ds.target.push_back(cell_value(raw, r, iv));
    for (std::size_t f = 0; f < ifeat.size(); ++f)
      ds.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(f)) =
          cell_value(raw, r, ifeat[f]);
    if (ipred) ds.predictions->push_back(cell_value(raw, r, *ipred));
  }
  return ds;
}

Table read_table_csv(const std::filesystem::path& path) {
  const auto raw = read_raw(path);
  Table t;
  t.columns = raw.header;
  for (std::size_t r = 0; r < raw.rows.size(); ++r) {
    std::vector<double> row;
    for (std::size_t c = 0; c < raw.header.size(); ++c) row.push_back(cell_value(raw, r, c));
    t.rows.push_back(std::move(row));
  }
  return t;
}

Split split_811(std::size_t n, std::uint64_t seed) {
  if (n < 3) throw TooFewRows("splitting needs at least 3 rows, got " + std::to_string(n));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(std::span(order));
  const std::size_t n_train = n * 8 / 10;
  const std::size_t n_val = n / 10;
  Split s;
  s.seed = seed;
  s.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.val.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
               order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  s.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), order.end());
  return s;
}

double Domain::diameter() const { return std::hypot(xmax - xmin, ymax - ymin); }

Dataset synth_gaussian_field(std::size_t n, const VariogramSpec& spec, const Domain& domain,
                             std::uint64_t seed) {
  if (n == 0 || n > 2000)
    throw InvalidArgument("synthetic field size must lie in [1, 2000], got " + std::to_string(n));
  if (!(domain.xmax > domain.xmin) || !(domain.ymax > domain.ymin))
    throw InvalidArgument("synthetic domain must have positive extent");

  Rng rng(seed);
  Dataset ds;
  ds.source = "synthetic";
  ds.features.resize(static_cast<Eigen::Index>(n), 0);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = rng.uniform(domain.xmin, domain.xmax);
    const double y = rng.uniform(domain.ymin, domain.ymax);
    ds.coords.push_back({x, y});
  }
  Eigen::VectorXd z(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();

  if (spec.sill() == 0.0) {
    ds.target.assign(n, 0.0);
    return ds;
  }

  const auto m = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd cov(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    cov(i, i) = spec.sill();
    for (Eigen::Index j = i + 1; j < m; ++j)
      cov(i, j) = cov(j, i) = spec.covariance(distance(ds.coords[static_cast<std::size_t>(i)],
                                                       ds.coords[static_cast<std::size_t>(j)]));
  }

  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    std::clog << "geostat: covariance not positive definite, adding 1e-10 jitter\n";
    cov.diagonal().array() += 1e-10;
    llt.compute(cov);
    if (llt.info() != Eigen::Success)
      throw CovarianceNotPD("synthetic covariance is not positive definite after jitter");
  }
  const Eigen::VectorXd values = llt.matrixL() * z;
  ds.target.assign(values.data(), values.data() + values.size());
  return ds;
}

std::string format_double(double v) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(len));
}

void write_results_csv(const std::filesystem::path& path, const Table& table) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  for (std::size_t c = 0; c < table.columns.size(); ++c)
    out << (c ? "," : "") << table.columns[c];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_double(row[c]);
    out << '\n';
  }
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace geostat
