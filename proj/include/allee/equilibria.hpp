#pragma once

// Equilibria of the symmetric system and its subsystems.
//
// C points are predator free, (u1*, 0, u2*, 0), and solve
//   f(u1) + a (u2 - u1) = 0,  f(u2) + a (u1 - u2) = 0.
// B points carry one predator. With y a root of f(y) + a (m - y) = 0 and
// z = (f(m) + a (y - m)) / m the two layouts are B1 = (m, z, y, 0) and
// B2 = (y, 0, m, z).

#include <optional>
#include <string>
#include <vector>

#include "allee/model.hpp"

namespace allee {

enum class Family { O, Ol, O11, AA, C, B };

std::string_view to_string(Family f);

struct EquilibriumRecord {
  State4 location;
  Family family = Family::O;
  std::string tag;  // e.g. "O_l", "C_01", "B1_0", "B2"
  int multiplicity = 1;
  double residual = 0.0;
  bool in_orthant = true;
};

/// Max-norm of the full field at x.
double field_residual(const State4& x, const ModelParams& p);

/// v* = (m - l)(1 - m).
inline double predator_level(double m, double l) { return (m - l) * (1.0 - m); }

bool aa_exists(const ModelParams& p);

/// O, O_l, O_11 and, when 0 < l < m < 1, AA.
std::vector<EquilibriumRecord> symmetric_equilibria(const ModelParams& p);

// ---------------------------------------------------------------------------
// C family

struct CPoint {
  double u1 = 0.0, u2 = 0.0;
  std::string label;  // branch of origin at a = 0, e.g. "0l" for (0, l)
  double residual = 0.0;
};

enum class BranchEnd { Reached, Fold, Diagonal, LeftRange, NoConvergence };

std::string_view to_string(BranchEnd e);

struct CSeedReport {
  std::string label;
  BranchEnd end = BranchEnd::Reached;
  double alpha_end = 0.0;  // alpha at the target, or where the branch stopped
  int steps = 0;
  std::optional<CPoint> point;
};

struct CSolution {
  std::vector<std::pair<CPoint, CPoint>> pairs;  // (C1, C2) with C2 the swap of C1
  std::vector<CSeedReport> seeds;
};

struct ContinuationOptions {
  double newton_tol = 1e-12;
  int newton_max_iter = 50;
  double ds_min = 1e-5;
  double ds_max = 1e-2;
  double dedupe_tol = 1e-8;
  double margin = 0.05;  // root search interval [-margin, 1 + margin]
};

/// Non-symmetric roots at the parameter alpha of p, continued from the six
/// off-diagonal seeds in {0, l, 1}^2 at alpha = 0.
CSolution solve_C(const ModelParams& p, const ContinuationOptions& opt = {});

/// f'(u1) f'(u2) - a (f'(u1) + f'(u2)).
double fold_condition_C(double u1, double u2, const ModelParams& p);

/// Newton on (u1, u2) at fixed alpha. Empty on divergence.
std::optional<CPoint> refine_C(double u1, double u2, const ModelParams& p,
                               const ContinuationOptions& opt = {});

struct CFold {
  std::string label;  // seed branch that ends here
  BranchEnd kind = BranchEnd::Fold;
  double alpha = 0.0;
  double u1 = 0.0, u2 = 0.0;
  double condition = 0.0;  // fold_condition_C at the point
};

/// Where each continued C branch terminates (fold or merger with the
/// diagonal) for alpha in (0, alpha_max]. The values come from continuation.
std::vector<CFold> c_branch_ends(double l, double alpha_max = 0.5,
                                 const ContinuationOptions& opt = {});

/// Number of C pairs present at a given alpha (from solve_C).
int c_pair_count(const ModelParams& p);

// ---------------------------------------------------------------------------
// B family

struct BPoint {
  double y = 0.0, z = 0.0;
  std::string label;  // "0", "l", "1" when three roots exist, "" otherwise
  int multiplicity = 1;
  double residual = 0.0;

  State4 layout1(double m) const { return {m, z, y, 0.0}; }
  State4 layout2(double m) const { return {y, 0.0, m, z}; }
};

/// Real roots y of f(y) + a (m - y) = 0 in ascending order, each with z.
std::vector<BPoint> solve_B(const ModelParams& p);

/// f'(y) - a.
double fold_condition_B(double y, const ModelParams& p);

/// C records (both members of every pair) and B records (both layouts).
std::vector<EquilibriumRecord> nontrivial_equilibria(const ModelParams& p);

/// Every equilibrium: symmetric, C and B families.
std::vector<EquilibriumRecord> all_equilibria(const ModelParams& p);

// ---------------------------------------------------------------------------
// Small-alpha asymptotics and nominal boundary formulas

enum class TableVariant { Nominal, Corrected };

struct AsymptoticPoint {
  std::string label;  // branch label, matched by continuation ("0l", "01", ...)
  State4 location;
};

/// C asymptotic rows in listed order. The row names are unreliable, so
/// each row carries the branch label of the root it approximates.
std::vector<AsymptoticPoint> asymptotic_C(const ModelParams& p);

/// B asymptotic columns B^0, B^l, B^1 in layout B1 = (m, z, x, 0).
/// The corrected variant fixes the first-order terms of B^1.
std::vector<AsymptoticPoint> asymptotic_B(const ModelParams& p,
                                          TableVariant v = TableVariant::Nominal);

struct SCBoundary {
  double alpha1 = 0.0;  // nominal SC1
  double alpha2 = 0.0;  // nominal SC2, (l - l^2) / 2
};

SCBoundary boundary_SC(double l);

struct SBBoundary {
  std::optional<double> m12, m23;  // nominal branch formulas; empty outside the alpha range
  bool m12_in_unit = false, m23_in_unit = false;
  double cusp_alpha = 0.0, cusp_m = 0.0;
};

SBBoundary boundary_SB(double l, double alpha);

/// Exact fold values of m for the B cubic: the m at which f(y) + a(m - y) has
/// a double root. Ascending; empty when a >= (1 - l + l^2) / 3.
std::vector<double> sb_fold_m(double l, double alpha);

/// Residual of the combined SB equation with (a + l) in the middle term.
double sb_combined(double l, double alpha, double m);

}  // namespace allee
