#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace gwr::linalg {

/// Dense row-major square matrix, sized for the small normal-equation
/// systems of local regressions.
class SquareMatrix
{
public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * n_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * n_ + c]; }

  double trace() const
  {
    double t = 0.0;
    for (std::size_t i = 0; i < n_; ++i)
      t += (*this)(i, i);
    return t;
  }

  void add_to_diagonal(double v)
  {
    for (std::size_t i = 0; i < n_; ++i)
      (*this)(i, i) += v;
  }

  /// this += w * x x^T
  void add_outer(std::span<const double> x, double w)
  {
    for (std::size_t r = 0; r < n_; ++r) {
      const double wr = w * x[r];
      for (std::size_t c = 0; c < n_; ++c)
        (*this)(r, c) += wr * x[c];
    }
  }

private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// LDL^T factorization of a symmetric matrix (no pivoting). `pivots` holds D.
struct LdltFactor
{
  SquareMatrix lower;
  std::vector<double> pivots;

  /// max(D) / min(D); infinite when any pivot is nonpositive.
  double condition_estimate() const
  {
    double lo = pivots.front();
    double hi = pivots.front();
    for (double d : pivots) {
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    if (!(lo > 0.0))
      return INFINITY;
    return hi / lo;
  }

  std::vector<double> solve(std::span<const double> rhs) const
  {
    const std::size_t n = lower.size();
    std::vector<double> x(rhs.begin(), rhs.end());
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < i; ++k)
        x[i] -= lower(i, k) * x[k];
    for (std::size_t i = 0; i < n; ++i)
      x[i] /= pivots[i];
    for (std::size_t i = n; i-- > 0;)
      for (std::size_t k = i + 1; k < n; ++k)
        x[i] -= lower(k, i) * x[k];
    return x;
  }
};

/// Factor a symmetric matrix. Returns nullopt when a pivot is not strictly
/// positive (the matrix is not numerically positive definite).
inline std::optional<LdltFactor> ldlt(const SquareMatrix& a)
{
  const std::size_t n = a.size();
  LdltFactor f{SquareMatrix(n), std::vector<double>(n, 0.0)};
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k)
      d -= f.lower(j, k) * f.lower(j, k) * f.pivots[k];
    if (!(d > 0.0) || !std::isfinite(d))
      return std::nullopt;
    f.pivots[j] = d;
    f.lower(j, j) = 1.0;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k)
        s -= f.lower(i, k) * f.lower(j, k) * f.pivots[k];
      f.lower(i, j) = s / d;
    }
  }
  return f;
}

} // namespace gwr::linalg
