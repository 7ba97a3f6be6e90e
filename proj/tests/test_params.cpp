#include <doctest.h>

#include <cmath>
#include <string>

#include "gnopt/errors.hpp"
#include "gnopt/params.hpp"

using namespace gnopt;

namespace {
std::string message_of(int n, double p, double q, double r) {
  try {
    validate_params(n, p, q, r);
  } catch (const DomainError& e) {
    return e.what();
  }
  return {};
}
} // namespace

TEST_SUITE("params") {

TEST_CASE("regime classification") {
  CHECK(validate_params(3, 2, 3, 4).regime() == Regime::DelPinoDolbeault);
  const auto sob = validate_params(3, 2, 3, 6);
  CHECK(sob.regime() == Regime::GeneralGN);
  CHECK(sob.theta() == 1.0);
  CHECK(validate_params(5, 2.2, 2.5).regime() == Regime::BlowupNonvalidity);
  // p = n, admitted through 1 < p <= 2 < r < p* = inf
  CHECK(validate_params(2, 2, 2, 3).regime() == Regime::TheoremValidity);
}

TEST_CASE("theta") {
  CHECK(validate_params(3, 2, 3, 4).theta() == doctest::Approx(0.5).epsilon(1e-15));
  // Nash tuple: p = n and no regime admits it, so only the raw formula applies
  CHECK_THROWS_AS(validate_params(2, 2, 1, 2), DomainError);
  CHECK(theta(2, 2, 1, 2) == 0.5);
  CHECK(validate_params(2, 2, 2, 3).theta() == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  for (int n : {3, 5, 8})
    for (double p : {1.2, 2.0, 2.7}) {
      if (p >= n)
        continue;
      const double ps = n * p / (n - p);
      CHECK(std::abs(validate_params(n, p, 1.1, ps).theta() - 1.0) <= 1e-12);
      CHECK(std::abs(theta(n, p, 1.1, ps) - 1.0) <= 1e-12);
    }
}

TEST_CASE("dpd_r") {
  CHECK(dpd_r(2, 3) == 4.0);
  CHECK(dpd_r(2, 5.5) == doctest::Approx(9.0));
  CHECK(dpd_r(1.5, 2) == doctest::Approx(3.0));
  CHECK_THROWS_AS(dpd_r(1.0, 2.0), DomainError);
}

TEST_CASE("validation messages name the first violated constraint") {
  CHECK(message_of(2, 1, 1, 2) == "p must exceed 1");
  CHECK(message_of(1, 2, 1, 2) == "n must be an integer >= 2");
  CHECK(message_of(3, 2, 0.5, 2) == "q must be >= 1");
  CHECK(message_of(3, 2, 3, 3) == "q must be < r");
  CHECK(message_of(3, 2, 3, 7).rfind("r must be <= p*", 0) == 0);
  CHECK(message_of(3, 3.5, 2, 4).rfind("p must be < n", 0) == 0);
  CHECK_THROWS_AS(validate_params(3, NAN, 2, 3), DomainError);
}

TEST_CASE("p = n only inside the theorem regime") {
  const auto params = validate_params(2, 2, 2, 3);
  CHECK(std::isinf(params.p_star()));
  CHECK(satisfies_theorem(params));
}

TEST_CASE("closed-form family includes the Sobolev endpoint") {
  const auto endpoint = validate_params(3, 1.5, 2);
  CHECK(in_dpd_family(endpoint));
  CHECK(endpoint.regime() != Regime::DelPinoDolbeault);
  CHECK_FALSE(in_dpd_family(validate_params(3, 2, 3, 5)));
}

TEST_CASE("blow-up regime equivalence") {
  CHECK(blowup_regime_equivalence(10, 3) == std::pair{true, true});
  CHECK(blowup_regime_equivalence(10, 4.5) == std::pair{false, false});
  CHECK(blowup_regime_equivalence(5, 2.1) == std::pair{true, true});
  CHECK_THROWS_AS(blowup_regime_equivalence(5, 5.0), DomainError);
}

TEST_CASE("factor exponents") {
  const auto params = validate_params(3, 2, 3, 4);
  CHECK(params.q_factor_exponent() == doctest::Approx(2.0 / 3.0));
  CHECK(params.r_factor_exponent() == doctest::Approx(1.0));
}

}
