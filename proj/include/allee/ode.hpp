#pragma once

// Adaptive Dormand-Prince 5(4) integrator with dense output for autonomous
// systems of fixed size N.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

#include "allee/ode_core.hpp"

namespace allee {

class IntegrationError : public std::runtime_error {
 public:
  enum class Kind { StepUnderflow, StepBudget, TimeBudget, NonFinite };
  IntegrationError(Kind k, const std::string& what) : std::runtime_error(what), kind(k) {}
  Kind kind;
};

struct StepOptions {
  double rtol = 1e-9;
  double atol = 1e-12;
  double h_init = 0.0;  // 0 selects the starting step automatically
  double h_max = std::numeric_limits<double>::infinity();
  long max_steps = 50'000'000;
  bool clip_negative = true;  // set negative components of accepted states to 0
};

namespace dopri {

/// Scaled RMS norm of the local error estimate.
template <std::size_t N>
double error_norm(const double* err, const double* y, const double* ynew, double rtol,
                  double atol) {
  double acc = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
    const double r = err[i] / sc;
    acc += r * r;
  }
  return std::sqrt(acc / static_cast<double>(N));
}

/// PI step-size controller state for one trajectory.
struct Controller {
  double fac_old = 1e-4;

  /// Returns the next step size and whether the trial step is accepted.
  double propose(double h, double err, bool& accept) {
    constexpr double safe = 0.9, beta = 0.04, fac_min = 0.2, fac_max = 10.0;
    if (!std::isfinite(err)) {
      accept = false;
      return h * fac_min;
    }
    const double fac11 = std::pow(err, 0.2 - beta * 0.75);
    if (err <= 1.0) {
      accept = true;
      double fac = fac11 / std::pow(fac_old, beta) / safe;
      fac = std::clamp(fac, 1.0 / fac_max, 1.0 / fac_min);
      fac_old = std::max(err, 1e-4);
      return h / fac;
    }
    accept = false;
    return h / std::min(1.0 / fac_min, fac11 / safe);
  }
};

/// Starting step from the local scale of y and f (Hairer's estimate).
template <std::size_t N, class F>
double initial_step(const F& f, const double* y, const double* f0, double rtol, double atol,
                    double h_max) {
  double d0 = 0.0, d1 = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double sc = atol + rtol * std::abs(y[i]);
    d0 += (y[i] / sc) * (y[i] / sc);
    d1 += (f0[i] / sc) * (f0[i] / sc);
  }
  d0 = std::sqrt(d0 / N);
  d1 = std::sqrt(d1 / N);
  double h0 = (d0 < 1e-10 || d1 < 1e-10) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, h_max);
  double y1[N], f1[N];
  for (std::size_t i = 0; i < N; ++i) y1[i] = y[i] + h0 * f0[i];
  f(y1, f1);
  double d2 = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double sc = atol + rtol * std::abs(y[i]);
    const double r = (f1[i] - f0[i]) / sc;
    d2 += r * r;
  }
  d2 = std::sqrt(d2 / N) / h0;
  const double dm = std::max(d1, d2);
  const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
  return std::min({100.0 * h0, h1, h_max});
}

/// Clips negative entries to 0. Returns true when anything changed.
template <std::size_t N>
bool clip_negative(double* y) {
  bool changed = false;
  for (std::size_t i = 0; i < N; ++i)
    if (y[i] < 0.0) {
      y[i] = 0.0;
      changed = true;
    }
  return changed;
}

}  // namespace dopri

template <std::size_t N, class F>
class DormandPrince {
 public:
  using State = std::array<double, N>;

  DormandPrince(F f, StepOptions opt) : f_(std::move(f)), opt_(opt) {}

  void reset(double t, const State& y) {
    t_ = t_prev_ = t;
    y_ = y_prev_ = y;
    f_(y_.data(), k1_.data());
    ++fevals_;
    h_ = opt_.h_init > 0.0 ? opt_.h_init
                           : dopri::initial_step<N>(f_, y_.data(), k1_.data(), opt_.rtol,
                                                    opt_.atol, opt_.h_max);
    ++fevals_;
    ctl_ = {};
    has_step_ = false;
  }

  /// Takes one accepted step without passing t_stop.
  void step(double t_stop) {
    for (;;) {
      if (accepted_ + rejected_ >= opt_.max_steps)
        throw IntegrationError(IntegrationError::Kind::StepBudget, "integrator: step budget exhausted");
      double h = std::min(h_, opt_.h_max);
      bool last = false;
      if (t_ + h >= t_stop) {
        h = t_stop - t_;
        last = true;
      }
      if (!(h > 1e-14 * std::max(1.0, std::abs(t_))))
        throw IntegrationError(IntegrationError::Kind::StepUnderflow,
                               "integrator: step size underflow at t = " + std::to_string(t_));
      dopri::attempt<double, N>(f_, y_.data(), k1_.data(), h, st_);
      fevals_ += 6;
      const double err = dopri::error_norm<N>(st_.err, y_.data(), st_.ynew, opt_.rtol, opt_.atol);
      bool accept = false;
      const double h_next = ctl_.propose(h, err, accept);
      if (!accept) {
        ++rejected_;
        h_ = h_next;
        continue;
      }
      ++accepted_;
      // Dense output coefficients for [t_, t_ + h].
      for (std::size_t i = 0; i < N; ++i) {
        const double dy = st_.ynew[i] - y_[i];
        const double bspl = h * k1_[i] - dy;
        r1_[i] = y_[i];
        r2_[i] = dy;
        r3_[i] = bspl;
        r4_[i] = dy - h * st_.k7[i] - bspl;
        r5_[i] = h * (dopri::d1 * k1_[i] + dopri::d3 * st_.k3[i] + dopri::d4 * st_.k4[i] +
                      dopri::d5 * st_.k5[i] + dopri::d6 * st_.k6[i] + dopri::d7 * st_.k7[i]);
      }
      t_prev_ = t_;
      y_prev_ = y_;
      h_last_ = h;
      t_ = last ? t_stop : t_ + h;
      for (std::size_t i = 0; i < N; ++i) {
        y_[i] = st_.ynew[i];
        k1_[i] = st_.k7[i];
      }
      for (std::size_t i = 0; i < N; ++i)
        if (!std::isfinite(y_[i]))
          throw IntegrationError(IntegrationError::Kind::NonFinite, "integrator: non-finite state");
      if (opt_.clip_negative && dopri::clip_negative<N>(y_.data())) {
        f_(y_.data(), k1_.data());
        ++fevals_;
        ++clipped_;
      }
      h_ = h_next;
      has_step_ = true;
      return;
    }
  }

  /// Integrates to t_end, discarding intermediate steps.
  void advance_to(double t_end) {
    while (t_ < t_end) step(t_end);
  }

  /// Interpolated state on the last accepted step, t in [t_prev(), t()].
  State dense(double t) const {
    if (!has_step_) return y_;
    const double th = (t - t_prev_) / h_last_;
    const double th1 = 1.0 - th;
    State out;
    for (std::size_t i = 0; i < N; ++i)
      out[i] = r1_[i] + th * (r2_[i] + th1 * (r3_[i] + th * (r4_[i] + th1 * r5_[i])));
    return out;
  }

  double t() const { return t_; }
  double t_prev() const { return t_prev_; }
  const State& y() const { return y_; }
  const State& y_prev() const { return y_prev_; }
  const State& slope() const { return k1_; }
  const F& field() const { return f_; }
  const StepOptions& options() const { return opt_; }

  long accepted() const { return accepted_; }
  long rejected() const { return rejected_; }
  long fevals() const { return fevals_; }
  long clipped() const { return clipped_; }

 private:
  F f_;
  StepOptions opt_;
  double t_ = 0.0, t_prev_ = 0.0, h_ = 0.0, h_last_ = 0.0;
  State y_{}, y_prev_{}, k1_{};
  State r1_{}, r2_{}, r3_{}, r4_{}, r5_{};
  dopri::Stages<double, N> st_{};
  dopri::Controller ctl_;
  bool has_step_ = false;
  long accepted_ = 0, rejected_ = 0, fevals_ = 0, clipped_ = 0;
};

template <std::size_t N, class F>
DormandPrince<N, F> make_dopri(F f, StepOptions opt) {
  return DormandPrince<N, F>(std::move(f), opt);
}

}  // namespace allee
