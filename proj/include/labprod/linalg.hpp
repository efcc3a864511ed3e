#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "labprod/error.hpp"

namespace labprod::linalg {

/// Dense row-major matrix, sized for regression designs (many rows, few
/// columns).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  // X^T X, accumulated row by row in index order.
  Matrix gram() const {
    Matrix g(cols_, cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
      auto r = row(i);
      for (std::size_t a = 0; a < cols_; ++a)
        for (std::size_t b = a; b < cols_; ++b) g(a, b) += r[a] * r[b];
    }
    for (std::size_t a = 0; a < cols_; ++a)
      for (std::size_t b = 0; b < a; ++b) g(a, b) = g(b, a);
    return g;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct EigenSystem {
  std::vector<double> values;  // ascending
  Matrix vectors;              // column k pairs with values[k]
};

/// Cyclic Jacobi rotations for a small symmetric matrix.
inline EigenSystem symmetric_eigen(Matrix a) {
  const std::size_t n = a.rows();
  Matrix v(n, n);
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off == 0.0) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto x, auto y) { return a(x, x) < a(y, y); });
  EigenSystem out{std::vector<double>(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
inline Matrix cholesky(const Matrix& a) {
  const std::size_t n = a.rows();
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0)) throw CollinearityError("normal matrix is not positive definite");
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

// Inverse of an upper-triangular matrix.
inline Matrix upper_inverse(const Matrix& r) {
  const std::size_t n = r.rows();
  Matrix inv(n, n);
  for (std::size_t j = n; j-- > 0;) {
    inv(j, j) = 1.0 / r(j, j);
    for (std::size_t i = j; i-- > 0;) {
      double s = 0.0;
      for (std::size_t k = i + 1; k <= j; ++k) s += r(i, k) * inv(k, j);
      inv(i, j) = -s / r(i, i);
    }
  }
  return inv;
}

struct OlsResult {
  std::vector<double> coef;
  std::vector<double> se;  // +inf when there are no residual degrees of freedom
  double rss = 0.0;
  double tss = 0.0;
  double r2 = 0.0;
  double condition = 0.0;  // of X^T X
  bool used_qr = false;
  std::size_t n = 0;
};

struct OlsOptions {
  // Switch from normal equations to Householder QR above this condition number.
  double qr_condition = 1e8;
  // Declare rank deficiency above this condition number.
  double singular_condition = 1e14;
  // Column 0 is an all-ones intercept; r2 is then centered.
  bool intercept = true;
};

namespace detail {

inline std::string join_names(const std::vector<std::string>& names) {
  std::string s;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) s += i + 1 == names.size() ? " and " : ", ";
    s += names[i];
  }
  return s;
}

// Solve via Householder QR of x; returns coefficients and R^{-1}.
inline std::pair<std::vector<double>, Matrix> qr_solve(Matrix x, std::vector<double> y) {
  const std::size_t n = x.rows(), p = x.cols();
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p; ++j) scale = std::max(scale, std::abs(x(i, j)));
  for (std::size_t j = 0; j < p; ++j) {
    double norm = 0.0;
    for (std::size_t i = j; i < n; ++i) norm += x(i, j) * x(i, j);
    norm = std::sqrt(norm);
    if (norm <= scale * 1e-13 * static_cast<double>(n)) {
      throw CollinearityError("design matrix is rank deficient at column " + std::to_string(j));
    }
    double alpha = x(j, j) > 0 ? -norm : norm;
    std::vector<double> v(n - j);
    for (std::size_t i = j; i < n; ++i) v[i - j] = x(i, j);
    v[0] -= alpha;
    double vnorm2 = 0.0;
    for (double e : v) vnorm2 += e * e;
    if (vnorm2 == 0.0) continue;
    for (std::size_t k = j; k < p; ++k) {
      double dot = 0.0;
      for (std::size_t i = j; i < n; ++i) dot += v[i - j] * x(i, k);
      double f = 2.0 * dot / vnorm2;
      for (std::size_t i = j; i < n; ++i) x(i, k) -= f * v[i - j];
    }
    double dot = 0.0;
    for (std::size_t i = j; i < n; ++i) dot += v[i - j] * y[i];
    double f = 2.0 * dot / vnorm2;
    for (std::size_t i = j; i < n; ++i) y[i] -= f * v[i - j];
  }
  Matrix r(p, p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i; j < p; ++j) r(i, j) = x(i, j);
  std::vector<double> beta(p);
  for (std::size_t i = p; i-- > 0;) {
    double s = y[i];
    for (std::size_t k = i + 1; k < p; ++k) s -= r(i, k) * beta[k];
    beta[i] = s / r(i, i);
  }
  return {beta, upper_inverse(r)};
}

}  // namespace detail

/// Ordinary least squares of y on the columns of x. Constant non-intercept
/// columns and exact linear dependencies raise CollinearityError naming the
/// offending columns.
inline OlsResult ols(const Matrix& x, std::span<const double> y, const std::vector<std::string>& names,
                     const OlsOptions& opt = {}) {
  const std::size_t n = x.rows(), p = x.cols();
  if (y.size() != n) throw ConfigError("ols: response length differs from design rows");
  if (n < p) {
    throw InsufficientDataError("ols: " + std::to_string(n) + " observations for " +
                                std::to_string(p) + " parameters");
  }
  auto name = [&](std::size_t j) { return j < names.size() ? names[j] : "column " + std::to_string(j); };

  std::vector<std::string> constant;
  for (std::size_t j = opt.intercept ? 1 : 0; j < p; ++j) {
    double lo = x(0, j), hi = x(0, j);
    for (std::size_t i = 1; i < n; ++i) {
      lo = std::min(lo, x(i, j));
      hi = std::max(hi, x(i, j));
    }
    if (lo == hi) constant.push_back(name(j));
  }
  if (!constant.empty()) {
    throw CollinearityError("zero variance in " + detail::join_names(constant) +
                            (opt.intercept ? " (collinear with the intercept)" : ""));
  }

  Matrix g = x.gram();
  EigenSystem eig = symmetric_eigen(g);
  double lmax = eig.values.back(), lmin = eig.values.front();
  double cond = lmin > 0 ? lmax / lmin : std::numeric_limits<double>::infinity();
  if (!(cond < opt.singular_condition)) {
    std::vector<std::string> involved;
    for (std::size_t j = 0; j < p; ++j) {
      if (std::abs(eig.vectors(j, 0)) > 0.05) involved.push_back(name(j));
    }
    throw CollinearityError("linear dependency among " + detail::join_names(involved) +
                            " (condition number " + std::to_string(cond) + ")");
  }

  OlsResult res;
  res.n = n;
  res.condition = cond;
  Matrix cov_unscaled(p, p);
  if (cond <= opt.qr_condition) {
    Matrix l = cholesky(g);
    std::vector<double> xty(p, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      auto r = x.row(i);
      for (std::size_t j = 0; j < p; ++j) xty[j] += r[j] * y[i];
    }
    std::vector<double> z(p);
    for (std::size_t i = 0; i < p; ++i) {
      double s = xty[i];
      for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * z[k];
      z[i] = s / l(i, i);
    }
    res.coef.assign(p, 0.0);
    for (std::size_t i = p; i-- > 0;) {
      double s = z[i];
      for (std::size_t k = i + 1; k < p; ++k) s -= l(k, i) * res.coef[k];
      res.coef[i] = s / l(i, i);
    }
    // (L L^T)^{-1} = L^{-T} L^{-1}; L^T is upper triangular.
    Matrix lt(p, p);
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = i; j < p; ++j) lt(i, j) = l(j, i);
    Matrix lti = upper_inverse(lt);
    for (std::size_t a = 0; a < p; ++a)
      for (std::size_t b = 0; b < p; ++b) {
        double s = 0.0;
        for (std::size_t k = std::max(a, b); k < p; ++k) s += lti(a, k) * lti(b, k);
        cov_unscaled(a, b) = s;
      }
  } else {
    res.used_qr = true;
    auto [beta, rinv] = detail::qr_solve(x, std::vector<double>(y.begin(), y.end()));
    res.coef = std::move(beta);
    for (std::size_t a = 0; a < p; ++a)
      for (std::size_t b = 0; b < p; ++b) {
        double s = 0.0;
        for (std::size_t k = std::max(a, b); k < p; ++k) s += rinv(a, k) * rinv(b, k);
        cov_unscaled(a, b) = s;
      }
  }

  double ymean = 0.0;
  if (opt.intercept) {
    for (double v : y) ymean += v;
    ymean /= static_cast<double>(n);
  }
  for (std::size_t i = 0; i < n; ++i) {
    auto r = x.row(i);
    double fit = 0.0;
    for (std::size_t j = 0; j < p; ++j) fit += r[j] * res.coef[j];
    double e = y[i] - fit;
    res.rss += e * e;
    res.tss += (y[i] - ymean) * (y[i] - ymean);
  }
  res.r2 = res.tss > 0 ? std::clamp(1.0 - res.rss / res.tss, 0.0, 1.0) : 1.0;

  res.se.assign(p, std::numeric_limits<double>::infinity());
  if (n > p) {
    double sigma2 = res.rss / static_cast<double>(n - p);
    for (std::size_t j = 0; j < p; ++j) res.se[j] = std::sqrt(sigma2 * cov_unscaled(j, j));
  }
  return res;
}

struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double se_slope = 0.0;
  double r2 = 0.0;
};

/// y = intercept + slope * x by centered sums.
inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 3 || y.size() != n) throw InsufficientDataError("line fit needs at least 3 points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw ZeroVarianceError("regressor has zero variance");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double e = y[i] - (f.intercept + f.slope * x[i]);
    rss += e * e;
  }
  f.r2 = syy > 0 ? std::clamp(1.0 - rss / syy, 0.0, 1.0) : 1.0;
  f.se_slope = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
  return f;
}

}  // namespace labprod::linalg
