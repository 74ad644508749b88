#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sparse_lingam/data.hpp"
#include "sparse_lingam/errors.hpp"

using namespace sparse_lingam;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::io;
}

Dataset parse(const std::string& text, CsvOptions opts = {}) {
  std::istringstream in(text);
  return parse_csv(in, opts);
}

}  // namespace

TEST(Csv, ParsesSmallTable) {
  const auto ds = parse("1,2\n3,4\n5,6\n");
  ASSERT_EQ(ds.n_samples(), 3);
  ASSERT_EQ(ds.n_vars(), 2);
  EXPECT_EQ(ds.values(2, 1), 6.0);
  EXPECT_FALSE(ds.standardized);
}

TEST(Csv, SkipsHeaderWhenAsked) {
  CsvOptions opts;
  opts.header = true;
  const auto ds = parse("a,b\n1,2\n3,4\n", opts);
  EXPECT_EQ(ds.n_samples(), 2);
  EXPECT_EQ(ds.values(0, 0), 1.0);
}

TEST(Csv, OtherDelimiter) {
  CsvOptions opts;
  opts.delimiter = ';';
  EXPECT_EQ(parse("1;2\n3;4\n", opts).values(1, 0), 3.0);
}

TEST(Csv, MissingCells) {
  EXPECT_EQ(kind_of([] { parse("1,NaN\n3,4\n"); }), ErrorKind::missing_data);
  EXPECT_EQ(kind_of([] { parse("1,\n3,4\n"); }), ErrorKind::missing_data);
}

TEST(Csv, MalformedInput) {
  EXPECT_EQ(kind_of([] { parse(""); }), ErrorKind::parse);
  EXPECT_EQ(kind_of([] { parse("1,2\n3\n"); }), ErrorKind::parse);
  try {
    parse("1,2\n3,4\n5,x\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::parse);
    EXPECT_NE(std::string(e.what()).find("3"), std::string::npos);
  }
}

TEST(Standardize, CentersAndScales) {
  Matrix x(3, 2);
  x << 1, 10, 2, 20, 3, 40;
  const auto s = standardize(Dataset::from_values(x));
  const double sd = std::sqrt(2.0 / 3.0);
  EXPECT_NEAR(s.values(0, 0), -1.0 / sd, 1e-12);
  EXPECT_NEAR(s.values(1, 0), 0.0, 1e-12);
  for (Index j = 0; j < 2; ++j) {
    const double mean = s.values.col(j).mean();
    const double var = s.values.col(j).squaredNorm() / 3.0 - mean * mean;
    EXPECT_LT(std::abs(mean), 1e-10);
    EXPECT_LT(std::abs(std::sqrt(var) - 1.0), 1e-10);
  }
  // raw = mean + scale * standardized
  EXPECT_NEAR(s.column_means(1) + s.column_scales(1) * s.values(2, 1), 40.0, 1e-12);
}

TEST(Standardize, Idempotent) {
  std::mt19937_64 rng(1);
  const auto once = standardize(Dataset::from_values(oracle::random_matrix(50, 3, rng)));
  const auto twice = standardize(once);
  EXPECT_LT(max_abs(once.values - twice.values), 1e-12);
}

TEST(Standardize, ConstantColumnNamed) {
  Matrix x(3, 2);
  x << 5, 1, 5, 2, 5, 3;
  try {
    standardize(Dataset::from_values(x));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::degenerate);
    EXPECT_NE(std::string(e.what()).find("0"), std::string::npos);
  }
}

TEST(Whiten, IdentityCovariance) {
  Matrix x(4, 2);
  x << 1, 1, 1, -1, -1, 1, -1, -1;
  const auto wh = whiten(x);
  EXPECT_NEAR(wh.scales(0), 1.0, 1e-12);
  EXPECT_NEAR(wh.scales(1), 1.0, 1e-12);
  EXPECT_LT(max_abs(wh.whitened - x * wh.rotation), 1e-12);
}

TEST(Whiten, ClosedFormTwoByTwo) {
  // Rows chosen so that (1/N) X^T X = [[1, .5], [.5, 1]] exactly.
  const double a = std::sqrt(1.5), b = std::sqrt(0.5);
  Matrix x(4, 2);
  x << a, a, -a, -a, b, -b, -b, b;
  const auto wh = whiten(x);
  EXPECT_NEAR(wh.scales(0), std::sqrt(1.5), 1e-12);
  EXPECT_NEAR(wh.scales(1), std::sqrt(0.5), 1e-12);
  // Eigenvectors of [[1, .5], [.5, 1]] are (1, 1)/sqrt2 and (1, -1)/sqrt2 up
  // to sign; the sign rule makes the largest entry nonnegative.
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(wh.rotation(0, 0)), r, 1e-12);
  EXPECT_NEAR(wh.rotation(0, 0), wh.rotation(1, 0), 1e-12);
  EXPECT_NEAR(wh.rotation(0, 1), -wh.rotation(1, 1), 1e-12);
  const Matrix cov = wh.whitened.transpose() * wh.whitened / 4.0;
  EXPECT_LT(max_abs(cov - Matrix::Identity(2, 2)), 1e-8);
}

TEST(Whiten, InvariantsOnRandomData) {
  std::mt19937_64 rng(7);
  Matrix x = oracle::random_matrix(200, 5, rng);
  x.col(1) += 0.7 * x.col(0);
  const auto data = standardize(Dataset::from_values(x));
  const auto wh = whiten(data);
  const Index n = data.n_samples();
  EXPECT_LT(max_abs(wh.rotation.transpose() * wh.rotation - Matrix::Identity(5, 5)), 1e-10);
  EXPECT_LT(max_abs(wh.whitened.transpose() * wh.whitened / static_cast<double>(n) -
                    Matrix::Identity(5, 5)),
            1e-8);
  for (Index j = 0; j < 5; ++j) {
    EXPECT_GT(wh.scales(j), 0.0);
    if (j > 0) EXPECT_GE(wh.scales(j - 1), wh.scales(j));
    Index arg;
    wh.rotation.col(j).cwiseAbs().maxCoeff(&arg);
    EXPECT_GE(wh.rotation(arg, j), 0.0);
  }
  // Round trip Z D V^T = X.
  EXPECT_LT(max_abs(wh.whitened * wh.scales.asDiagonal() * wh.rotation.transpose() - data.values),
            1e-8);
  EXPECT_LT(max_abs(wh.apply(data.values) - wh.whitened), 1e-12);
}

TEST(Whiten, ScaleInvariantAfterStandardize) {
  std::mt19937_64 rng(8);
  Matrix x = oracle::random_matrix(100, 3, rng);
  x.col(2) += x.col(0);
  Matrix scaled = x;
  scaled.col(0) *= 7.0;
  scaled.col(2) *= 0.01;
  const auto a = whiten(standardize(Dataset::from_values(x)));
  const auto b = whiten(standardize(Dataset::from_values(scaled)));
  EXPECT_LT(max_abs(a.rotation.cwiseAbs() - b.rotation.cwiseAbs()), 1e-9);
  EXPECT_LT(max_abs(a.scales - b.scales), 1e-9);
}

TEST(Whiten, DuplicatedColumnIsRankDeficient) {
  std::mt19937_64 rng(2);
  Matrix x = oracle::random_matrix(30, 3, rng);
  x.col(2) = x.col(1);
  EXPECT_EQ(kind_of([&] { whiten(standardize(Dataset::from_values(x))); }),
            ErrorKind::rank_deficient);
}

TEST(Windows, CountsAndDrops) {
  std::vector<double> s(48);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = static_cast<double>(i);
  const auto two = slice_windows(s, 24);
  EXPECT_EQ(two.n_samples(), 2);
  EXPECT_EQ(two.n_vars(), 24);
  EXPECT_EQ(two.values(1, 0), 24.0);

  std::vector<double> t(72 + 5, 1.0);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = std::sin(static_cast<double>(i));
  t[3] = std::nan("");
  const auto dropped = slice_windows(t, 24);
  EXPECT_EQ(dropped.n_samples(), 2);
  EXPECT_EQ(dropped.values(0, 0), t[24]);

  EXPECT_EQ(kind_of([&] { slice_windows(std::vector<double>(30, 1.0), 24); }),
            ErrorKind::missing_data);
}

TEST(Windows, Log1p) {
  std::vector<double> s{0.0, std::exp(1.0) - 1.0, 0.0, std::exp(1.0) - 1.0};
  const auto ds = slice_windows(s, 2, true);
  EXPECT_EQ(ds.values(0, 0), 0.0);
  EXPECT_NEAR(ds.values(0, 1), 1.0, 1e-15);
}

TEST(Series, NanMarksMissingAndBlankLinesAreSkipped) {
  std::istringstream in("1\n\n3\nNaN\n");
  const auto s = parse_series(in);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[1], 3.0);
  EXPECT_TRUE(std::isnan(s[2]));
}
