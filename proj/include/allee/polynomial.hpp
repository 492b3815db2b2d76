#pragma once

// Real polynomials in one variable (coefficients stored lowest degree first)
// and a simultaneous-iteration root finder.

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <vector>

#include "allee/linalg.hpp"

namespace allee {

class Poly {
 public:
  Poly() = default;
  Poly(std::initializer_list<double> c) : c_(c) { trim(); }
  explicit Poly(std::vector<double> c) : c_(std::move(c)) { trim(); }

  /// The linear factor (a - x).
  static Poly shifted_negx(double a) { return Poly{a, -1.0}; }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<double>& coeffs() const { return c_; }
  double operator[](std::size_t i) const { return i < c_.size() ? c_[i] : 0.0; }

  double operator()(double x) const;
  std::complex<double> operator()(std::complex<double> x) const;
  Poly derivative() const;

  friend Poly operator+(const Poly& a, const Poly& b);
  friend Poly operator-(const Poly& a, const Poly& b);
  friend Poly operator*(const Poly& a, const Poly& b);
  friend Poly operator*(double s, const Poly& a);

  /// Largest absolute coefficient difference (missing entries count as 0).
  friend double coeff_distance(const Poly& a, const Poly& b);

 private:
  void trim();
  std::vector<double> c_;
};

struct RootOptions {
  int max_iter = 500;
  int restarts = 3;
  double tol = 1e-14;
  std::uint64_t seed = 0x5eed;
};

class RootFindError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// All complex roots by Aberth iteration. Throws RootFindError when every
/// restart fails to converge.
std::vector<std::complex<double>> poly_roots(const Poly& p, const RootOptions& opt = {});

/// Extended-precision variant on raw coefficients (lowest degree first).
std::vector<std::complex<long double>> poly_roots(const std::vector<long double>& c,
                                                  const RootOptions& opt = {});

/// Coefficients of det(lambda I - A) by the Faddeev-LeVerrier recursion,
/// carried out in the working type T.
template <typename T, std::size_t N>
std::vector<T> charpoly_coeffs(const Mat<N>& a) {
  Mat<N, T> at{};
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) at[i][j] = static_cast<T>(a[i][j]);
  std::vector<T> c(N + 1, T(0));
  c[N] = T(1);
  Mat<N, T> m{};  // M_0 = 0
  for (std::size_t k = 1; k <= N; ++k) {
    Mat<N, T> am = mat_mul(at, m);
    for (std::size_t i = 0; i < N; ++i) am[i][i] += c[N - k + 1];
    m = am;
    const Mat<N, T> a_m = mat_mul(at, m);
    T tr = 0;
    for (std::size_t i = 0; i < N; ++i) tr += a_m[i][i];
    c[N - k] = -tr / static_cast<T>(k);
  }
  return c;
}

/// det(lambda I - A).
template <std::size_t N>
Poly charpoly_monic(const Mat<N>& a) {
  return Poly(charpoly_coeffs<double>(a));
}

/// det(A - lambda I) = (-1)^N det(lambda I - A).
template <std::size_t N>
Poly charpoly(const Mat<N>& a) {
  Poly p = charpoly_monic(a);
  return (N % 2 == 0) ? p : (-1.0) * p;
}

}  // namespace allee
