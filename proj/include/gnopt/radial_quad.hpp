#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gnopt/errors.hpp"
#include "gnopt/params.hpp"
#include "gnopt/profile.hpp"

namespace gnopt {

enum class TailModel { PowerLawCorrection, Drop };

/// Composite Gauss-Legendre on [0, R] with geometric panel grading toward 0
/// and a panel boundary at rho = 1, plus an optional power-law tail term for
/// [R, inf). Panel count doubles until successive values agree to
/// target_rel_err.
struct QuadratureScheme {
  int order = 16;
  double truncation_radius = 1e4;
  int panels = 64;
  TailModel tail_model = TailModel::PowerLawCorrection;
  double target_rel_err = 1e-8;
  /// Right end of the first panel [0, inner_radius].
  double inner_radius = 1e-6;
  int max_panels = 8192;

  void validate() const;
};

struct Estimate {
  double value = 0.0;
  double abs_error = 0.0;
};

/// f(|x|) on R^n. decay: f ~ C rho^-decay at infinity (infinite when f
/// vanishes beyond R or decays faster than any power).
struct RadialIntegrand {
  std::function<double(double)> f;
  double decay;
  std::vector<double> breakpoints;
};

/// int_{R^n} f(|x|) dx = |S^{n-1}| int_0^inf f(rho) rho^{n-1} drho.
/// Throws TailDivergence when decay <= n under PowerLawCorrection and
/// AccuracyNotMet when refinement exhausts max_panels.
Estimate radial_integral(const RadialIntegrand& integrand, int n,
                         const QuadratureScheme& scheme);

/// Q(u) = (int |grad u|^p)(int |u|^q)^{p(1-theta)/(theta q)} / (int |u|^r)^{p/(r theta)}.
/// inf Q over admissible u equals A(p,q,r)^{-1}.
Estimate gn_quotient(const RadialProfile& u, const GNParams& params,
                     const QuadratureScheme& scheme);

/// The weighted moments of the extremal w:
///   I1 = int w^q,  I2 = int |grad w|^p |x|^2,  I3 = int w^q |x|^2,
///   I4 = int |grad w|^p,  I5 = int w^r |x|^2.
struct MomentIntegrals {
  std::array<Estimate, 5> values;

  const Estimate& operator[](int k) const { return values.at(k - 1); } // 1-based
};

MomentIntegrals moments(const GNParams& params, const QuadratureScheme& scheme);

struct BlowupEvaluation {
  double best_constant = 0.0;
  MomentIntegrals moments;
  double bracket = 0.0;
};

/// A (I1^e I2 + e I1 I4 I3^{e-1}) - (p/(r theta)) I5 with e = p(1-theta)/(theta q)
/// and A the closed-form best constant. Positive values mean the eps^2
/// coefficient of the test-function expansion drives the quotient to +inf.
BlowupEvaluation evaluate_blowup(const GNParams& params, const QuadratureScheme& scheme);
double blowup_coefficient(const GNParams& params, const QuadratureScheme& scheme);

struct ExtremalityOptions {
  double eps = 1e-4;
  std::uint64_t seed = 20240601;
};

struct PerturbationResult {
  std::uint64_t seed = 0;
  double support_begin = 0.0, support_end = 0.0, amplitude = 0.0;
  double q_plus = 0.0, q_minus = 0.0;
  double gateaux = 0.0;
  bool minimal_ok = false;
  bool derivative_ok = false;
};

struct ExtremalityReport {
  double best_constant = 0.0;
  Estimate q_extremal;
  double gap = 0.0; // |Q(w) A - 1|
  double gap_tolerance = 0.0;
  double minimality_tolerance = 0.0; // absolute, on Q
  double derivative_tolerance = 0.0; // absolute, on dQ
  double eps = 0.0;
  std::vector<PerturbationResult> perturbations;
  bool passed = false;
};

class ExtremalityViolated : public Error {
public:
  explicit ExtremalityViolated(ExtremalityReport report);
  const ExtremalityReport& report() const { return report_; }

private:
  ExtremalityReport report_;
};

/// Centered difference [Q(u + eps phi) - Q(u - eps phi)] / (2 eps).
double gateaux_derivative(const RadialProfile& u, const RadialProfile& phi,
                          const GNParams& params, const QuadratureScheme& scheme,
                          double eps);

/// Checks Q(w) A = 1 and probes w with seeded C^2 radial bumps. Throws
/// ExtremalityViolated (carrying the full report) on any failed check.
ExtremalityReport verify_extremality(const GNParams& params,
                                     const QuadratureScheme& scheme,
                                     int perturbations,
                                     const ExtremalityOptions& options = {});

/// Upper estimate of A(p,q,r)^{-1}: Q minimized over positive mixtures of
/// Gaussians with fixed geometric widths. Exploratory only.
double exploratory_inverse_constant(const GNParams& params,
                                    const QuadratureScheme& scheme,
                                    int gaussians = 6);

} // namespace gnopt
