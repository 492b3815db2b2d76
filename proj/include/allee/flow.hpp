#pragma once

// Trajectories, Poincare sections, limit cycles, rotation numbers and
// Lyapunov exponents.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "allee/model.hpp"
#include "allee/ode.hpp"
#include "allee/spectral.hpp"

namespace allee {

struct IntegratorOptions {
  double rtol = 1e-9;
  double atol = 1e-12;
  double sample_dt = 0.0;     // 0 records every accepted step
  double time_budget = 20000;  // longest admissible horizon per run
  long max_steps = 50'000'000;
};

struct IntegratorStats {
  long steps = 0, rejected = 0, fevals = 0, clipped = 0;
  double rtol = 0.0, atol = 0.0;
};

struct Trajectory {
  SystemId sys = SystemId::Full1;
  std::vector<double> t;
  std::vector<State4> x;
  IntegratorStats stats;

  std::size_t size() const { return t.size(); }
  const State4& back() const { return x.back(); }
};

/// Throws std::invalid_argument unless x0 lies in the closed first orthant
/// and has zero pinned coordinates.
void validate_state(SystemId sys, const State4& x0);

/// Integrates from t = 0 to t_end. The first sample is x0 at t = 0.
Trajectory integrate(SystemId sys, const State4& x0, const ModelParams& p, double t_end,
                     const IntegratorOptions& opt = {});

/// Final state only.
State4 advance(SystemId sys, const State4& x0, const ModelParams& p, double t,
               const IntegratorOptions& opt = {}, IntegratorStats* stats = nullptr);

struct Section {
  std::size_t coord = kU1;
  double level = 0.5;
  int direction = -1;  // -1: coordinate decreasing through level, +1 increasing, 0 either
};

/// The hyperplane u = m (decreasing) on a patch that carries a predator.
Section default_section(SystemId sys, const ModelParams& p);

/// v1 = v* (decreasing), the fallback when u1 = m is never crossed.
Section fallback_section(const ModelParams& p);

struct SectionCrossings {
  Section section;
  std::vector<double> t;
  std::vector<State4> x;

  std::size_t size() const { return t.size(); }
};

/// Crossings of a stored trajectory. Each bracketing sample pair is refined
/// by re-integrating the bracket and a final step in the section coordinate.
SectionCrossings poincare(const Trajectory& traj, const Section& s, const ModelParams& p,
                          const IntegratorOptions& opt = {});

struct SectionRun {
  SectionCrossings crossings;
  State4 final_state;
  double t_final = 0.0;
  IntegratorStats stats;
};

/// Integrates to t_end (or until max_crossings crossings) and locates
/// crossings on the fly from the dense output.
SectionRun integrate_crossings(SystemId sys, const State4& x0, const ModelParams& p,
                               double t_end, const Section& s, const IntegratorOptions& opt = {},
                               std::size_t max_crossings = static_cast<std::size_t>(-1));

enum class CycleLabel { Cu, C4, C3Patch1, C3Patch2, Unlabeled };
std::string_view to_string(CycleLabel l);

class CycleError : public std::runtime_error {
 public:
  enum class Kind { NoReturn, Diverged };
  CycleError(Kind k, const std::string& what) : std::runtime_error(what), kind(k) {}
  Kind kind;
};

struct CycleOptions {
  IntegratorOptions integ{};
  double newton_tol = 1e-9;
  int max_newton = 30;
  double fd_step = 1e-6;
  int returns = 1;  // period-k cycles close after k returns
  double max_return_time = 3000.0;
  double stable_tol = 1e-4;
  std::size_t orbit_samples = 256;
};

struct CycleRecord {
  double period = 0.0;
  std::vector<double> t;
  std::vector<State4> orbit;
  std::vector<cplx> multipliers;  // of the return map, dimension - 1 values
  int multiplicity = 1;
  CycleLabel label = CycleLabel::Unlabeled;
  bool stable = false;
  double closure_error = 0.0;
  double amplitude = 0.0;
  Section section;
  State4 anchor;  // fixed point of the return map
  int newton_iterations = 0;
};

/// Newton on the return map from a settled seed. The seed is first carried
/// to the section.
CycleRecord find_cycle(SystemId sys, const State4& seed, const ModelParams& p, const Section& s,
                       const CycleOptions& opt = {});

/// Label by invariant-subspace membership: one predator identically 0 gives
/// c3, the symmetric subspace gives c_u, any other 4D cycle c_4.
CycleLabel label_orbit(SystemId sys, const std::vector<State4>& orbit);

/// Eigenvalues of the full monodromy matrix over one period, from the
/// variational equations on the dynamical coordinates.
std::vector<cplx> monodromy_multipliers(SystemId sys, const CycleRecord& c, const ModelParams& p,
                                        const IntegratorOptions& opt = {});

/// Mean angular advance per return about the centroid, in the plane of the
/// two leading principal directions of the crossing set, as a fraction of a
/// turn in [0, 1). Needs at least 30 crossings.
double rotation_number(const std::vector<State4>& points);
inline double rotation_number(const SectionCrossings& c) { return rotation_number(c.x); }

struct Rational {
  long p = 0, q = 1;
  double distance = 0.0;
};

/// Closest fraction p/q in [0, 1] with q <= q_max.
Rational nearest_rational(double x, long q_max);

struct LyapunovResult {
  double exponent = 0.0;
  double band_low = 0.0, band_high = 0.0;  // running average range over the second half
  bool converged = false;                  // band narrower than the tolerance
  long renormalizations = 0;
};

/// Largest exponent by tangent-vector renormalization every `interval` time
/// units over `horizon`.
LyapunovResult lyapunov_max(SystemId sys, const State4& x0, const ModelParams& p, double horizon,
                            const IntegratorOptions& opt = {}, double interval = 1.0,
                            double band_tol = 5e-3);

struct MultiplicityReport {
  std::optional<int> k;  // empty when clusters are not separable
  double margin = 0.0;   // smallest inter-cluster gap over the cluster radius
  double diameter = 0.0;
  std::size_t clusters = 0;
  bool torus_suspected = false;
};

/// Single-linkage clustering of crossing points with radius 5% of the set
/// diameter; k is the cluster count when crossings visit clusters cyclically.
MultiplicityReport detect_period_multiplicity(const std::vector<State4>& points,
                                              double radius_fraction = 0.05);

/// Slope of log N(eps) against log(1/eps) over box sizes diameter/4 ..
/// diameter/32 in the principal plane of the points.
double box_counting_dimension(const std::vector<State4>& points);

}  // namespace allee
