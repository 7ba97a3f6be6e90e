#pragma once

#include <string_view>
#include <utility>

namespace gnopt {

/// Parameter regimes ordered from weakest to strongest. A tuple reports the
/// strongest one it satisfies.
enum class Regime {
  GeneralGN,         // 1 < p < n, 1 <= q < r <= p*
  TheoremValidity,   // optimal Riemannian inequality known to hold
  DelPinoDolbeault,  // p < q < p(n-1)/(n-p), r = p(q-1)/(p-1)
  BlowupNonvalidity, // DelPinoDolbeault with p > max{2, 2q/3}
};

std::string_view to_string(Regime regime);

/// Validated exponent tuple (n, p, q, r) of a Gagliardo-Nirenberg inequality.
///
/// theta and p* are computed once at construction; every downstream exponent
/// reads the stored values. p* is +infinity when p >= n (only admitted inside
/// the theorem regime).
class GNParams {
public:
  int n() const { return n_; }
  double p() const { return p_; }
  double q() const { return q_; }
  double r() const { return r_; }
  double theta() const { return theta_; }
  double p_star() const { return p_star_; }
  Regime regime() const { return regime_; }

  /// Exponent p(1-theta)/(theta q) carried by the L^q factor.
  double q_factor_exponent() const;
  /// Exponent p/(r theta) carried by the L^r factor.
  double r_factor_exponent() const;

  friend GNParams validate_params(int n, double p, double q, double r);

private:
  GNParams() = default;

  int n_ = 0;
  double p_ = 0, q_ = 0, r_ = 0;
  double theta_ = 0, p_star_ = 0;
  Regime regime_ = Regime::GeneralGN;
};

/// Validates the raw tuple and classifies it. Throws DomainError naming the
/// first violated constraint.
GNParams validate_params(int n, double p, double q, double r);

/// Same, with r defaulted to p(q-1)/(p-1).
GNParams validate_params(int n, double p, double q);

/// The stored theta of a validated tuple.
double theta(const GNParams& params);

/// np(r-q) / (r(q(p-n)+np)) on raw inputs, no validation and no clamping.
double theta(int n, double p, double q, double r);

/// r = p(q-1)/(p-1), the exponent paired with q in the closed-form family.
double dpd_r(double p, double q);

/// Upper end p(n-1)/(n-p) of the closed-form q range.
double dpd_q_upper(int n, double p);

/// True for p < q <= p(n-1)/(n-p) and r = p(q-1)/(p-1). Unlike the regime
/// this admits the Sobolev endpoint q = p(n-1)/(n-p), where r = p* and the
/// closed-form constant and extremal still apply.
bool in_dpd_family(const GNParams& params);

/// (1 < p <= 2, p < r, 1 <= q < r < p*) or (p = r > 1, q >= 1, p^2/2 <= q < p).
/// A tuple can satisfy this while reporting a stronger regime.
bool satisfies_theorem(const GNParams& params);

/// For q = p(n-1)/(n-p): (p > max{2, 2q/3}, 2 < p < (n+2)/3).
/// The two predicates coincide; callers use this as a consistency check.
std::pair<bool, bool> blowup_regime_equivalence(int n, double p);

} // namespace gnopt
