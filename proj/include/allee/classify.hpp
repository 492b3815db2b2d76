#pragma once

// Attractor classification per initial condition and parameter portraits.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "allee/flow.hpp"
#include "allee/model.hpp"

namespace allee {

enum class AttractorKind { OriginExtinction, Equilibrium, Cycle, Torus, Chaotic, Undecided };
std::string_view to_string(AttractorKind k);

struct ClassifyBudget {
  double burn_in = 3000.0;
  double analysis = 8000.0;   // longest window for section crossings
  double t_budget = 20000.0;  // total simulated time per initial condition
  std::size_t target_crossings = 240;
  double eq_tol = 1e-6;
  double lyapunov_horizon = 3000.0;
  IntegratorOptions integ{};
};

struct AttractorReport {
  AttractorKind kind = AttractorKind::Undecided;
  std::string equilibrium_tag;  // Equilibrium and OriginExtinction
  int k = 0;                    // Cycle multiplicity
  CycleLabel label = CycleLabel::Unlabeled;  // subspace label of cycles, tori and chaotic sets
  State4 final_state;
  std::optional<double> period, rotation, lyapunov, box_dimension;
  std::optional<bool> stable;  // Cycle: return-map multipliers inside the unit circle
  double time_used = 0.0;
  std::string undecided_test;  // name of the test that failed to conclude

  /// An attractor on which both predators persist: AA, a c_u or c_4 cycle,
  /// or a torus or chaotic set off the predator-free hyperplanes.
  bool four_dimensional() const;
  std::string summary() const;
};

/// Burn-in, equilibrium proximity, cycle search and multiplicity, torus and
/// chaos tests; the first conclusive test decides.
AttractorReport classify_ic(SystemId sys, const State4& x0, const ModelParams& p,
                            const ClassifyBudget& budget = {});

/// The same pipeline from a state already carried through burn-in.
AttractorReport classify_settled(SystemId sys, const State4& settled, const ModelParams& p,
                                 const ClassifyBudget& budget, double time_used);

enum class DomainLabel { I, II, III, IV, V, Boundary };
std::string_view to_string(DomainLabel d);

/// Label from a cell's reports, ignoring neighbors.
DomainLabel domain_from_reports(const std::vector<AttractorReport>& reports);

struct PortraitCell {
  double alpha = 0.0, m = 0.0;
  std::vector<AttractorReport> reports;
  DomainLabel label = DomainLabel::Boundary;
  bool ambiguous = false;  // some report undecided
};

/// The default probe set at a parameter point: low densities, an asymmetric
/// high-prey state, AA perturbed antisymmetrically and a refuge probe with
/// v2 = 0. The AA seed is dropped when AA does not exist.
std::vector<State4> default_seeds(const ModelParams& p);

/// Seed sets selectable by name: "default" or "symmetric".
std::vector<State4> seed_set(std::string_view name, const ModelParams& p);

struct SweepSpec {
  double alpha_lo = 0.0, alpha_hi = 0.05;
  double m_lo = 0.3, m_hi = 0.6;
  int n_alpha = 8, n_m = 8;
  double gamma = 1.0, l = 0.1;
  std::string seeds = "default";
  int jobs = 1;
  ClassifyBudget budget{};
};

/// Cell centers of the grid, alpha varying fastest.
std::vector<std::pair<double, double>> sweep_points(const SweepSpec& s);

/// Classifies every (alpha, m) point; the grid neighborhood relabels
/// ambiguous cells as Boundary when a neighbor disagrees.
std::vector<PortraitCell> portrait_sweep(const SweepSpec& s);

/// Cells for arbitrary points, no neighborhood pass.
std::vector<PortraitCell> classify_cells(const std::vector<std::pair<double, double>>& points,
                                         const SweepSpec& s);

struct Bracket {
  double lo = 0.0, hi = 0.0;
  double mid() const { return 0.5 * (lo + hi); }
  double width() const { return hi - lo; }
};

/// True when the single-patch system keeps a positive attractor from a seed
/// next to A, which for l < m < (l + 1) / 2 means a stable cycle exists.
bool local_cycle_exists(double l, double m, double gamma, double horizon = 6000.0);

/// Bisection in m on cycle existence of the single-patch system.
Bracket heteroclinic_bracket(double l, double gamma, double lo, double hi, double width = 1e-3);

/// Region 1..5 of the single-patch system (alpha = 0).
int local_portrait_2d(double l, double m, double gamma);

struct RefugeThreshold {
  std::string name;  // "alpha*", "alpha**", "alpha***", "alpha****"
  std::optional<Bracket> bracket;
  std::string note;
};

struct RefugeScan {
  std::vector<double> alphas;
  std::vector<std::string> regimes;  // per sampled alpha: "none", "cycle", "B", "B+cycle"
  std::vector<RefugeThreshold> thresholds;
  std::optional<double> b_hopf;  // from the eigenvalue crossing
};

/// Attractors of the refuge system (u1, v1, u2) along alpha.
RefugeScan refuge_alpha_scan(double l, double m, double gamma, double alpha_max = 0.2,
                             int samples = 40, double width = 1e-4);

}  // namespace allee
