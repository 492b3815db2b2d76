#pragma once

// Fixed-size dense matrices for the 2..4 dimensional problems in this library.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <utility>

namespace allee {

template <std::size_t N, typename T = double>
using Vec = std::array<T, N>;

template <std::size_t N, typename T = double>
using Mat = std::array<std::array<T, N>, N>;

template <std::size_t N, typename T = double>
constexpr Mat<N, T> identity() {
  Mat<N, T> a{};
  for (std::size_t i = 0; i < N; ++i) a[i][i] = T(1);
  return a;
}

template <std::size_t N, typename T>
Vec<N, T> mat_vec(const Mat<N, T>& a, const Vec<N, T>& x) {
  Vec<N, T> y{};
  for (std::size_t i = 0; i < N; ++i) {
    T s{};
    for (std::size_t j = 0; j < N; ++j) s += a[i][j] * x[j];
    y[i] = s;
  }
  return y;
}

template <std::size_t N, typename T>
Mat<N, T> mat_mul(const Mat<N, T>& a, const Mat<N, T>& b) {
  Mat<N, T> c{};
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t k = 0; k < N; ++k)
      for (std::size_t j = 0; j < N; ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

template <std::size_t N, typename T>
Mat<N, T> transpose(const Mat<N, T>& a) {
  Mat<N, T> t{};
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) t[j][i] = a[i][j];
  return t;
}

/// Gaussian elimination with partial pivoting. Empty when the pivot falls
/// below `singular_tol` times the largest entry.
template <std::size_t N, typename T>
std::optional<Vec<N, T>> solve(Mat<N, T> a, Vec<N, T> b, double singular_tol = 1e-14) {
  double scale = 0.0;
  for (auto& row : a)
    for (auto& v : row) scale = std::max(scale, static_cast<double>(std::abs(v)));
  if (scale == 0.0) return std::nullopt;
  for (std::size_t col = 0; col < N; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < N; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) <= singular_tol * scale) return std::nullopt;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = col + 1; r < N; ++r) {
      const T f = a[r][col] / a[col][col];
      if (f == T(0)) continue;
      for (std::size_t c = col; c < N; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  Vec<N, T> x{};
  for (std::size_t i = N; i-- > 0;) {
    T s = b[i];
    for (std::size_t j = i + 1; j < N; ++j) s -= a[i][j] * x[j];
    x[i] = s / a[i][i];
  }
  return x;
}

/// Null vector of a (numerically) singular matrix: the pivoted elimination is
/// run and the smallest pivot column is taken as free.
template <std::size_t N, typename T>
Vec<N, T> null_vector(Mat<N, T> a) {
  std::array<std::size_t, N> colperm{};
  for (std::size_t i = 0; i < N; ++i) colperm[i] = i;
  // Full pivoting so the rank deficiency lands in the last pivot.
  for (std::size_t k = 0; k + 1 < N; ++k) {
    std::size_t pr = k, pc = k;
    double best = -1.0;
    for (std::size_t r = k; r < N; ++r)
      for (std::size_t c = k; c < N; ++c)
        if (std::abs(a[r][c]) > best) {
          best = std::abs(a[r][c]);
          pr = r;
          pc = c;
        }
    std::swap(a[pr], a[k]);
    if (pc != k) {
      for (std::size_t r = 0; r < N; ++r) std::swap(a[r][pc], a[r][k]);
      std::swap(colperm[pc], colperm[k]);
    }
    if (best == 0.0) break;
    for (std::size_t r = k + 1; r < N; ++r) {
      const T f = a[r][k] / a[k][k];
      for (std::size_t c = k; c < N; ++c) a[r][c] -= f * a[k][c];
    }
  }
  // Back substitution with the last variable set to 1.
  Vec<N, T> y{};
  y[N - 1] = T(1);
  for (std::size_t i = N - 1; i-- > 0;) {
    T s{};
    for (std::size_t j = i + 1; j < N; ++j) s -= a[i][j] * y[j];
    y[i] = (a[i][i] == T(0)) ? T(0) : s / a[i][i];
  }
  Vec<N, T> x{};
  for (std::size_t i = 0; i < N; ++i) x[colperm[i]] = y[i];
  return x;
}

template <std::size_t N>
Mat<N, std::complex<double>> to_complex(const Mat<N>& a) {
  Mat<N, std::complex<double>> c{};
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) c[i][j] = a[i][j];
  return c;
}

}  // namespace allee
