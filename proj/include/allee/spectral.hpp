#pragma once

// Jacobians, characteristic polynomials, eigenvalues and stability classes.

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "allee/equilibria.hpp"
#include "allee/linalg.hpp"
#include "allee/model.hpp"
#include "allee/polynomial.hpp"

namespace allee {

using cplx = std::complex<double>;
using Jacobian4 = Mat<4>;

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Block layout
///   [P1 Q1 a1 0 ]
///   [R1 S1 0  0 ]
///   [a2 0  P2 Q2]
///   [0  0  R2 S2]
/// with P_i = b_i f'(u_i) - v_i - a_i, Q_i = -u_i, R_i = g_i v_i,
/// S_i = -g_i (m_i - u_i).
Jacobian4 jacobian(const State4& x, const ModelParams& p);

/// Central differences of the raw field with step h.
Jacobian4 jacobian_fd(const State4& x, const ModelParams& p, double h = 1e-6);

/// Jacobian of a subsystem on its dynamical coordinates (row-major, n x n).
std::vector<std::vector<double>> subsystem_jacobian(SystemId sys, const State4& x,
                                                    const ModelParams& p);

enum class Provenance { ClosedForm, QuarticNumeric };

struct Spectrum {
  std::vector<cplx> values;  // sorted: real part descending, then imaginary descending
  Provenance provenance = Provenance::QuarticNumeric;

  static Spectrum make(std::vector<cplx> v, Provenance prov);
  std::size_t size() const { return values.size(); }
  const cplx& operator[](std::size_t i) const { return values[i]; }
  double spectral_radius() const;
  double max_real() const;
};

/// Largest pairwise distance after canonical sorting; infinity on size mismatch.
double spectrum_distance(const Spectrum& a, const Spectrum& b);

/// True when every value in `sub` matches a distinct value of `full` within tol.
bool is_subset(const Spectrum& sub, const Spectrum& full, double tol);

/// Roots of det(J - lambda I). Throws NumericError when the backward error
/// |Psi(lambda)| exceeds 1e-10 times the Horner scale after all restarts.
Spectrum eigen_quartic(const Jacobian4& j);

/// Same for an n x n matrix with n in 1..4.
Spectrum eigen_numeric(const std::vector<std::vector<double>>& a);

enum class SymmetricPoint { O, Ol, O11, AA };

/// Closed-form spectra of O, O_l, O_11 and AA. For AA `Nominal` uses
/// n = 1 + l - 2a; `Corrected` uses n = 1 + l - 2m.
Spectrum eigen_symmetric(SymmetricPoint pt, const ModelParams& p,
                         TableVariant v = TableVariant::Corrected);

enum class LemmaCase { BlockSymmetric = 1, PreyOnly = 2, SecondDecoupled = 3, FirstDecoupled = 4 };

struct LemmaResult {
  LemmaCase which;
  Spectrum spectrum;
};

/// Closed-form spectrum when J falls in one of the four structured cases
/// (checked in order 1, 2, 3, 4). Empty otherwise.
std::optional<LemmaResult> lemma_spectrum(const Jacobian4& j, double tol = 0.0);

/// The cubic factor of case 3 (Q2 R2 = 0), coefficients of
/// l^3 - c2 l^2 + c1 l - c0 in ascending order.
Poly lemma_case3_cubic(const Jacobian4& j);
Poly lemma_case4_cubic(const Jacobian4& j);

/// Real and complex roots of a cubic or quadratic by closed formulas.
std::vector<cplx> quadratic_roots(double a, double b, double c);
std::vector<cplx> cubic_roots(double a, double b, double c, double d);

struct CharFactors {
  std::vector<Poly> factors;  // (phi2, S2 - l, S1 - l) for C; (phi3, S1 - l) for B
  Poly product() const;
};

/// Factored det(J - lambda I) at a C or B equilibrium.
CharFactors characteristic_factors(const EquilibriumRecord& eq, const ModelParams& p);

/// C asymptotic eigenvalues for a row (0..5, listed order).
Spectrum table_eigen_C(std::size_t row, const ModelParams& p,
                       TableVariant v = TableVariant::Nominal);

/// B asymptotic eigenvalues for a column (0: B^0, 1: B^l, 2: B^1). The nominal
/// formulas omit the discriminants; delta = Tr^2 - 4 g m z with the column's z.
Spectrum table_eigen_B(std::size_t column, const ModelParams& p,
                       TableVariant v = TableVariant::Nominal);

enum class StabilityTag {
  StableNode,
  StableSpiral,
  UnstableNode,
  UnstableSpiral,
  SaddleNodeLike,
  Saddle,
  SaddleFocus,
  Nonhyperbolic
};

std::string_view to_string(StabilityTag t);

struct StabilityClass {
  StabilityTag tag = StabilityTag::Nonhyperbolic;
  int unstable_dim = 0;
};

/// Sign-pattern classification. A value counts as on the imaginary axis when
/// |Re| < tol * max(1, spectral radius).
StabilityClass classify(const Spectrum& s, double tol = 1e-7);

/// Canonical spectrum and class of an equilibrium of the full system.
struct EquilibriumSpectrum {
  Spectrum spectrum;
  StabilityClass stability;
};
EquilibriumSpectrum analyze(const State4& x, const ModelParams& p);

}  // namespace allee
