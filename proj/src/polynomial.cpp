#include "allee/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace allee {

void Poly::trim() {
  while (c_.size() > 1 && c_.back() == 0.0) c_.pop_back();
  if (c_.empty()) c_.push_back(0.0);
}

double Poly::operator()(double x) const {
  double s = 0.0;
  for (std::size_t i = c_.size(); i-- > 0;) s = s * x + c_[i];
  return s;
}

std::complex<double> Poly::operator()(std::complex<double> x) const {
  std::complex<double> s = 0.0;
  for (std::size_t i = c_.size(); i-- > 0;) s = s * x + c_[i];
  return s;
}

Poly Poly::derivative() const {
  if (c_.size() <= 1) return Poly{0.0};
  std::vector<double> d(c_.size() - 1);
  for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = static_cast<double>(i) * c_[i];
  return Poly(std::move(d));
}

Poly operator+(const Poly& a, const Poly& b) {
  std::vector<double> c(std::max(a.c_.size(), b.c_.size()), 0.0);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = a[i] + b[i];
  return Poly(std::move(c));
}

Poly operator-(const Poly& a, const Poly& b) { return a + (-1.0) * b; }

Poly operator*(const Poly& a, const Poly& b) {
  std::vector<double> c(a.c_.size() + b.c_.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.c_.size(); ++i)
    for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
  return Poly(std::move(c));
}

Poly operator*(double s, const Poly& a) {
  std::vector<double> c = a.c_;
  for (auto& v : c) v *= s;
  return Poly(std::move(c));
}

double coeff_distance(const Poly& a, const Poly& b) {
  double d = 0.0;
  const std::size_t n = std::max(a.c_.size(), b.c_.size());
  for (std::size_t i = 0; i < n; ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

namespace {

template <typename R>
R horner_bound(const std::vector<R>& c, R r) {
  R e = 0;
  for (std::size_t i = c.size(); i-- > 0;) e = e * r + std::abs(c[i]);
  return e;
}

template <typename R>
std::complex<R> horner(const std::vector<R>& c, std::complex<R> x) {
  std::complex<R> s = 0;
  for (std::size_t i = c.size(); i-- > 0;) s = s * x + c[i];
  return s;
}

template <typename R>
std::vector<R> derivative(const std::vector<R>& c) {
  std::vector<R> d(c.size() > 1 ? c.size() - 1 : 1, R(0));
  for (std::size_t i = 1; i < c.size(); ++i) d[i - 1] = static_cast<R>(i) * c[i];
  return d;
}

template <typename R>
bool aberth(const std::vector<R>& c, std::vector<std::complex<R>>& z, const RootOptions& opt) {
  using C = std::complex<R>;
  const std::size_t n = z.size();
  const R eps = std::numeric_limits<R>::epsilon();
  std::vector<bool> done(n, false);
  for (int it = 0; it < opt.max_iter; ++it) {
    bool all = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (done[i]) continue;
      C p = 0, dp = 0;
      for (std::size_t k = c.size(); k-- > 0;) {
        dp = dp * z[i] + p;
        p = p * z[i] + c[k];
      }
      if (std::abs(p) <= 4 * eps * horner_bound(c, std::abs(z[i]))) {
        done[i] = true;
        continue;
      }
      all = false;
      const C ratio = p / dp;
      C s = 0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) s += R(1) / (z[i] - z[j]);
      const C step = ratio / (R(1) - ratio * s);
      z[i] -= step;
      if (std::abs(step) <= static_cast<R>(opt.tol) * std::max(R(1), std::abs(z[i]))) done[i] = true;
    }
    if (all) return true;
  }
  return std::all_of(done.begin(), done.end(), [](bool b) { return b; });
}

// Newton polish on the original polynomial.
template <typename R>
std::complex<R> polish(const std::vector<R>& p, const std::vector<R>& dp, std::complex<R> z) {
  using C = std::complex<R>;
  for (int k = 0; k < 3; ++k) {
    const C d = horner(dp, z);
    if (d == C(0)) break;
    const C step = horner(p, z) / d;
    if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
    const C zn = z - step;
    if (std::abs(horner(p, zn)) >= std::abs(horner(p, z))) break;
    z = zn;
  }
  return z;
}

// Near-coincident pairs are typically a double root split to sqrt(eps) by
// rounding in the coefficients. Newton on p' from the pair mean recovers it.
// The acceptance bound models absolute coefficient errors of size
// eps * rho^(n-i), rho the root radius.
template <typename R>
void refine_double_roots(const std::vector<R>& c, R rho, std::vector<std::complex<R>>& z) {
  using C = std::complex<R>;
  const auto dp = derivative(c), ddp = derivative(dp);
  const R eps = std::numeric_limits<R>::epsilon();
  const std::size_t n = c.size() - 1;
  auto bound = [&](R r) {
    R e = 0;
    for (std::size_t i = n + 1; i-- > 0;)
      e = e * r + std::max(std::abs(c[i]), std::pow(rho, static_cast<R>(n - i)));
    return e;
  };
  for (std::size_t i = 0; i < z.size(); ++i)
    for (std::size_t j = i + 1; j < z.size(); ++j) {
      const R sep = std::abs(z[i] - z[j]);
      if (sep > R(1e-6) * std::max(R(1), std::abs(z[i]))) continue;
      C x = R(0.5) * (z[i] + z[j]);
      if (std::abs(x.imag()) <= sep) x.imag(0);
      for (int k = 0; k < 8; ++k) {
        const C d2 = horner(ddp, x);
        if (d2 == C(0)) break;
        const C step = horner(dp, x) / d2;
        x -= step;
        if (std::abs(step) <= 4 * eps * std::max(R(1), std::abs(x))) break;
      }
      if (std::abs(horner(c, x)) <= 1000 * eps * bound(std::abs(x)) &&
          std::abs(x - z[i]) <= 2 * sep + R(1e-12))
        z[i] = z[j] = x;
    }
}

template <typename R>
std::vector<std::complex<R>> roots_impl(std::vector<R> c, const RootOptions& opt) {
  using C = std::complex<R>;
  while (c.size() > 1 && c.back() == R(0)) c.pop_back();
  if (c.size() < 2) return {};
  const R lead = c.back();
  for (auto& v : c) v /= lead;

  // Factor out exact zero roots.
  std::size_t zeros = 0;
  while (zeros < c.size() - 1 && c[zeros] == R(0)) ++zeros;
  std::vector<C> roots(zeros, C(0));
  std::vector<R> q(c.begin() + static_cast<std::ptrdiff_t>(zeros), c.end());
  const std::size_t m = q.size() - 1;
  if (m == 0) return roots;
  if (m == 1) {
    roots.emplace_back(-q[0], R(0));
    return roots;
  }

  // Fujiwara bound for the initial circle.
  R radius = 0;
  for (std::size_t k = 0; k < m; ++k)
    radius = std::max(radius, std::pow(std::abs(q[k]), R(1) / static_cast<R>(m - k)));
  radius = std::max(2 * radius, R(1e-3));

  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> shrink(0.2, 1.0);
  const R two_pi = 2 * std::numbers::pi_v<R>;
  std::vector<C> z(m);
  bool ok = false;
  for (int attempt = 0; attempt <= opt.restarts && !ok; ++attempt) {
    const R off = attempt == 0 ? R(0.4) : static_cast<R>(phase(rng));
    const R rad = radius * (attempt == 0 ? R(0.5) : static_cast<R>(shrink(rng)));
    for (std::size_t k = 0; k < m; ++k)
      z[k] = std::polar(rad, off + two_pi * static_cast<R>(k) / static_cast<R>(m));
    ok = aberth(q, z, opt);
  }
  if (!ok) throw RootFindError("poly_roots: no convergence after restarts");

  const auto dq = derivative(q);
  for (auto& r : z) r = polish(q, dq, r);
  refine_double_roots(q, std::max(R(1), radius / 2), z);

  // Conjugate cleanup: real coefficients give real or paired roots.
  const R scale = std::max(R(1), radius);
  const R eps = std::numeric_limits<R>::epsilon();
  for (auto& r : z)
    if (std::abs(r.imag()) <= 500 * eps * scale) r.imag(0);
  std::vector<bool> paired(z.size(), false);
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (paired[i] || z[i].imag() <= 0) continue;
    std::size_t best = z.size();
    R bd = std::numeric_limits<R>::infinity();
    for (std::size_t j = 0; j < z.size(); ++j)
      if (!paired[j] && j != i && z[j].imag() < 0 && std::abs(z[j] - std::conj(z[i])) < bd) {
        bd = std::abs(z[j] - std::conj(z[i]));
        best = j;
      }
    if (best == z.size()) continue;
    const C avg = R(0.5) * (z[i] + std::conj(z[best]));
    z[i] = avg;
    z[best] = std::conj(avg);
    paired[i] = paired[best] = true;
  }
  roots.insert(roots.end(), z.begin(), z.end());
  return roots;
}

}  // namespace

std::vector<std::complex<double>> poly_roots(const Poly& p, const RootOptions& opt) {
  return roots_impl<double>(p.coeffs(), opt);
}

std::vector<std::complex<long double>> poly_roots(const std::vector<long double>& c,
                                                  const RootOptions& opt) {
  return roots_impl<long double>(c, opt);
}

}  // namespace allee
