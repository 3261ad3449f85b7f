#pragma once

// Independent reference implementations used by unit and acceptance tests.

#include <cmath>
#include <stdexcept>
#include <vector>

namespace amplab::testing {

// Gaussian elimination with partial pivoting on a dense row-major system.
inline std::vector<double> gauss_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (a[pivot][col] == 0.0) throw std::runtime_error("gauss_solve: singular");
    std::swap(a[pivot], a[col]);
    std::swap(b[pivot], b[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
    x[i] = s / a[i][i];
  }
  return x;
}

// Least squares through X^T X beta = X^T y; columns are regressors.
inline std::vector<double> normal_equations(const std::vector<std::vector<double>>& columns,
                                            const std::vector<double>& y) {
  const std::size_t p = columns.size();
  std::vector<std::vector<double>> xtx(p, std::vector<double>(p, 0.0));
  std::vector<double> xty(p, 0.0);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t r = 0; r < y.size(); ++r) xty[i] += columns[i][r] * y[r];
    for (std::size_t j = 0; j < p; ++j) {
      for (std::size_t r = 0; r < y.size(); ++r) xtx[i][j] += columns[i][r] * columns[j][r];
    }
  }
  return gauss_solve(xtx, xty);
}

// Kendall tau-b by enumerating every pair.
inline double brute_tau(const std::vector<double>& a, const std::vector<double>& b) {
  double concordant = 0, discordant = 0, ties_a = 0, ties_b = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const double da = a[i] - a[j];
      const double db = b[i] - b[j];
      if (da == 0 && db == 0) continue;
      if (da == 0) {
        ++ties_a;
      } else if (db == 0) {
        ++ties_b;
      } else if ((da > 0) == (db > 0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const double denom =
      std::sqrt((concordant + discordant + ties_a) * (concordant + discordant + ties_b));
  return denom == 0 ? 0.0 : (concordant - discordant) / denom;
}

}  // namespace amplab::testing
