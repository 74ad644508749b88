#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "sparse_lingam/types.hpp"

namespace sparse_lingam {

/// An N x d table of observations. `column_means` and `column_scales` hold
/// the affine map applied by standardize(), so that
///   raw(i, j) = column_means(j) + column_scales(j) * values(i, j).
/// For unstandardized data they are 0 and 1.
struct Dataset {
  Matrix values;
  Vector column_means;
  Vector column_scales;
  bool standardized = false;

  Index n_samples() const { return values.rows(); }
  Index n_vars() const { return values.cols(); }

  /// Validates shape (N >= 2, d >= 2) and finiteness.
  static Dataset from_values(Matrix values);
};

struct CsvOptions {
  char delimiter = ',';
  bool header = false;
};

/// Parses a rectangular numeric table. Empty or "NaN" cells raise a
/// missing-data error; anything else unparsable raises a parse error naming
/// the line.
Dataset parse_csv(std::istream& in, const CsvOptions& options = {});
Dataset load_csv(const std::filesystem::path& path,
                 const CsvOptions& options = {});

/// Reads the first column of a CSV as a series. Missing cells become NaN.
std::vector<double> parse_series(std::istream& in,
                                 const CsvOptions& options = {});
std::vector<double> load_series(const std::filesystem::path& path,
                                const CsvOptions& options = {});

/// Centers each column and scales it to unit population (1/N) standard
/// deviation. Applying it to standardized data is the identity.
Dataset standardize(const Dataset& data);

/// Pre-whitening from the spectral decomposition (1/N) X^T X = V D^2 V^T.
/// Eigenvalues are sorted descending and each eigenvector is signed so that
/// its largest-magnitude entry is nonnegative.
struct Whitening {
  Matrix rotation;  // V
  Vector scales;    // diagonal of D
  Matrix whitened;  // Z = X V D^{-1}

  /// D^{-1} V^T, the map from W to M = W D^{-1} V^T.
  Matrix unwhitening() const;
  /// V D^{-1}, applied on the right of raw rows.
  Matrix whitening_map() const;
  /// Maps rows of `x` (same coordinates as the fitted data) to whitened rows.
  Matrix apply(const Matrix& x) const;
};

Whitening whiten(const Matrix& x);
inline Whitening whiten(const Dataset& data) { return whiten(data.values); }

/// Cuts a series into consecutive non-overlapping windows of `window_len`
/// points, one window per row. With `log1p` the values are mapped through
/// log(1 + x) first. Windows with a NaN are dropped, as is a trailing partial
/// window.
Dataset slice_windows(std::span<const double> series, int window_len,
                      bool log1p = false);

}  // namespace sparse_lingam
