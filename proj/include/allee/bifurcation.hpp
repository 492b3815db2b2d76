#pragma once

// Hopf boundaries of the symmetric equilibrium AA and of the refuge
// equilibrium B, and the first Lyapunov coefficient.

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "allee/model.hpp"
#include "allee/spectral.hpp"

namespace allee {

class BifurcationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// H1: m = (l + 1) / 2, where the in-phase pair of AA crosses.
double hopf_H1(double l);

/// H2: a = m (l + 1 - 2m) / 2, where the anti-phase pair of AA crosses.
/// Throws BifurcationError when m > (l + 1) / 2 (no positive crossing).
double hopf_H2(double l, double m);

/// Asymptotic 3D Hopf value a** ~ m (1 + l - 2m) / (2 - m) of B in the
/// refuge system. Approximate by construction.
struct Approximate {
  double value;
  bool approximate = true;
};
Approximate hopf_3d(double l, double m);

enum class SweepParam { Alpha, M, Gamma, L };
std::string_view to_string(SweepParam s);
SweepParam sweep_param_from_string(std::string_view s);

/// Which complex pair is followed.
enum class HopfTarget {
  AAInPhase,    // (x, x) block of AA in the full system
  AAAntiPhase,  // (x, -x) block of AA in the full system
  BRefuge,      // B = (m, z, y, 0) with the largest root y, refuge system
};
std::string_view to_string(HopfTarget t);

/// Symmetric parameters with one entry replaced.
ModelParams with_param(const ModelParams& p, SweepParam s, double value);

struct TrackedPair {
  State4 location;
  SystemId sys;
  std::optional<cplx> pair;  // upper member; empty when the pair is real
};

/// Equilibrium and pair for a target at parameters p. Throws
/// BifurcationError when the equilibrium does not exist.
TrackedPair track_pair(HopfTarget target, const ModelParams& p);

struct HopfPoint {
  HopfTarget target = HopfTarget::AAInPhase;
  SweepParam param = SweepParam::M;
  double value = 0.0;  // parameter value at the crossing
  ModelParams params;
  SystemId sys = SystemId::Full1;
  State4 location;
  double omega = 0.0;
  double real_part = 0.0;       // residual Re of the pair at `value`
  double transversality = 0.0;  // d Re / d param
  std::optional<double> l1;     // first Lyapunov coefficient, when computed
};

/// Root of Re(pair) over [lo, hi] to tol by a bracketing solver. Throws
/// BifurcationError when the ends do not differ in sign or the pair turns
/// real inside the bracket.
HopfPoint locate_hopf(HopfTarget target, const ModelParams& base, SweepParam param, double lo,
                      double hi, double tol = 1e-12);

/// First Lyapunov coefficient by projection onto the critical eigenplane.
/// Throws BifurcationError when omega < 1e-6.
double lyapunov_first(const HopfPoint& h);

/// Scans a on a uniform grid for a sign change of Re(pair) of B in the
/// refuge system and refines it. Empty when no change is found.
std::optional<HopfPoint> b_stability_change(const ModelParams& base, double a_lo, double a_hi,
                                            int samples = 100);

}  // namespace allee
