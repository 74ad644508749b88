#include "sparse_lingam/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <string_view>

#include "sparse_lingam/errors.hpp"

namespace sparse_lingam {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::parse: return "parse";
    case ErrorKind::missing_data: return "missing_data";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::rank_deficient: return "rank_deficient";
    case ErrorKind::parameter: return "parameter";
    case ErrorKind::singular: return "singular";
    case ErrorKind::divergence: return "divergence";
    case ErrorKind::selection: return "selection";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

namespace {

constexpr double kRankTolerance = 1e-10;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool is_missing(std::string_view cell) {
  return cell.empty() || cell == "NaN" || cell == "nan" || cell == "NA";
}

std::vector<std::string_view> split(std::string_view line, char delimiter) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delimiter, start);
    if (pos == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return cells;
}

double parse_number(std::string_view cell, std::size_t line_no) {
  // from_chars rejects a leading '+'.
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size() ||
      !std::isfinite(value)) {
    throw Error(ErrorKind::parse, "line " + std::to_string(line_no) +
                                      ": non-numeric cell '" +
                                      std::string(cell) + "'");
  }
  return value;
}

// Reads all data lines as cells, skipping blank lines and the optional header.
template <typename OnRow>
void for_each_row(std::istream& in, const CsvOptions& options, OnRow on_row) {
  std::string line;
  std::size_t line_no = 0;
  bool header_pending = options.header;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    on_row(split(line, options.delimiter), line_no);
  }
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  return in;
}

}  // namespace

Dataset Dataset::from_values(Matrix values) {
  if (values.rows() < 2 || values.cols() < 2) {
    throw Error(ErrorKind::parameter,
                "dataset needs at least 2 samples and 2 variables, got " +
                    std::to_string(values.rows()) + "x" +
                    std::to_string(values.cols()));
  }
  if (!values.allFinite()) {
    throw Error(ErrorKind::missing_data, "dataset contains non-finite values");
  }
  Dataset data;
  data.column_means = Vector::Zero(values.cols());
  data.column_scales = Vector::Ones(values.cols());
  data.values = std::move(values);
  return data;
}

Dataset parse_csv(std::istream& in, const CsvOptions& options) {
  std::vector<double> flat;
  std::size_t n_cols = 0;
  std::size_t n_rows = 0;
  for_each_row(in, options, [&](const std::vector<std::string_view>& cells,
                                std::size_t line_no) {
    if (n_rows == 0) {
      n_cols = cells.size();
    } else if (cells.size() != n_cols) {
      throw Error(ErrorKind::parse,
                  "line " + std::to_string(line_no) + ": expected " +
                      std::to_string(n_cols) + " cells, found " +
                      std::to_string(cells.size()));
    }
    for (const auto cell : cells) {
      if (is_missing(cell)) {
        throw Error(ErrorKind::missing_data,
                    "line " + std::to_string(line_no) + ": missing value");
      }
      flat.push_back(parse_number(cell, line_no));
    }
    ++n_rows;
  });
  if (n_rows == 0) throw Error(ErrorKind::parse, "no data rows");
  if (n_rows < 2 || n_cols < 2) {
    throw Error(ErrorKind::parse,
                "table must have at least 2 rows and 2 columns, got " +
                    std::to_string(n_rows) + "x" + std::to_string(n_cols));
  }
  Matrix values = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic,
                                                 Eigen::Dynamic, Eigen::RowMajor>>(
      flat.data(), static_cast<Index>(n_rows), static_cast<Index>(n_cols));
  return Dataset::from_values(std::move(values));
}

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  auto in = open_input(path);
  return parse_csv(in, options);
}

std::vector<double> parse_series(std::istream& in, const CsvOptions& options) {
  std::vector<double> series;
  for_each_row(in, options, [&](const std::vector<std::string_view>& cells,
                                std::size_t line_no) {
    const auto cell = cells.front();
    series.push_back(is_missing(cell) ? std::numeric_limits<double>::quiet_NaN()
                                      : parse_number(cell, line_no));
  });
  if (series.empty()) throw Error(ErrorKind::parse, "no data rows");
  return series;
}

std::vector<double> load_series(const std::filesystem::path& path,
                                const CsvOptions& options) {
  auto in = open_input(path);
  return parse_series(in, options);
}

Dataset standardize(const Dataset& data) {
  const auto n = static_cast<double>(data.n_samples());
  Dataset out = data;
  for (Index j = 0; j < data.n_vars(); ++j) {
    const double mean = data.values.col(j).mean();
    const Vector centered = data.values.col(j).array() - mean;
    const double sd = std::sqrt(centered.squaredNorm() / n);
    if (!(sd > 0.0) || sd < 1e-300) {
      throw Error(ErrorKind::degenerate,
                  "column " + std::to_string(j) + " has zero variance");
    }
    out.values.col(j) = centered / sd;
    // Compose with any earlier standardization so the recorded map still
    // points back at the raw values.
    out.column_means(j) = data.column_means(j) + data.column_scales(j) * mean;
    out.column_scales(j) = data.column_scales(j) * sd;
  }
  out.standardized = true;
  return out;
}

Matrix Whitening::unwhitening() const {
  return scales.cwiseInverse().asDiagonal() * rotation.transpose();
}

Matrix Whitening::whitening_map() const {
  return rotation * scales.cwiseInverse().asDiagonal();
}

Matrix Whitening::apply(const Matrix& x) const { return x * whitening_map(); }

Whitening whiten(const Matrix& x) {
  const auto n = static_cast<double>(x.rows());
  const Index d = x.cols();
  const Matrix cov = (x.transpose() * x) / n;
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorKind::rank_deficient, "eigendecomposition failed");
  }

  // Eigen returns ascending eigenvalues.
  Whitening w;
  w.rotation.resize(d, d);
  w.scales.resize(d);
  const double largest = eig.eigenvalues()(d - 1);
  for (Index k = 0; k < d; ++k) {
    const Index src = d - 1 - k;
    const double value = eig.eigenvalues()(src);
    if (!(largest > 0.0) || value < kRankTolerance * largest) {
      throw Error(ErrorKind::rank_deficient,
                  "covariance is rank deficient (eigenvalue " +
                      std::to_string(value) + ")");
    }
    Vector v = eig.eigenvectors().col(src);
    Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0) v = -v;
    w.rotation.col(k) = v;
    w.scales(k) = std::sqrt(value);
  }
  w.whitened = w.apply(x);
  return w;
}

Dataset slice_windows(std::span<const double> series, int window_len,
                      bool log1p) {
  if (window_len < 2) {
    throw Error(ErrorKind::parameter, "window length must be at least 2");
  }
  const std::size_t len = static_cast<std::size_t>(window_len);
  const std::size_t n_windows = series.size() / len;
  std::vector<std::size_t> kept;
  for (std::size_t w = 0; w < n_windows; ++w) {
    const auto window = series.subspan(w * len, len);
    if (std::none_of(window.begin(), window.end(),
                     [](double v) { return std::isnan(v); })) {
      kept.push_back(w);
    }
  }
  if (kept.size() < 2) {
    throw Error(ErrorKind::missing_data,
                "fewer than 2 complete windows (" +
                    std::to_string(kept.size()) + ")");
  }
  Matrix values(static_cast<Index>(kept.size()), window_len);
  for (std::size_t r = 0; r < kept.size(); ++r) {
    for (std::size_t c = 0; c < len; ++c) {
      const double v = series[kept[r] * len + c];
      values(static_cast<Index>(r), static_cast<Index>(c)) =
          log1p ? std::log1p(v) : v;
    }
  }
  return Dataset::from_values(std::move(values));
}

}  // namespace sparse_lingam
