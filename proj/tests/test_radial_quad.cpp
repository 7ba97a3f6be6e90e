#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gnopt/best_constant.hpp"
#include "gnopt/errors.hpp"
#include "gnopt/radial_quad.hpp"

using namespace gnopt;
using std::numbers::pi;

TEST_SUITE("radial_quad") {

TEST_CASE("elementary radial integrals") {
  const QuadratureScheme scheme;
  const auto gauss = radial_integral({[](double r) { return std::exp(-r * r); },
                                      INFINITY, {}}, 2, scheme);
  CHECK(gauss.value == doctest::Approx(pi).epsilon(1e-12));

  const auto ball = radial_integral({[](double r) { return r < 1.0 ? 1.0 : 0.0; }, INFINITY, {1.0}},
                                    3, scheme);
  CHECK(ball.value == doctest::Approx(4 * pi / 3).epsilon(1e-12));

  const auto beta = radial_integral({[](double r) { return std::pow(1 + r * r, -3.0); }, 6.0, {}},
                                    3, scheme);
  CHECK(std::abs(beta.value - pi * pi / 4) <= 1e-9);
}

TEST_CASE("tail handling") {
  QuadratureScheme scheme;
  const RadialIntegrand slow{[](double r) { return std::pow(1 + r * r, -1.0); }, 2.0, {}};
  CHECK_THROWS_AS(radial_integral(slow, 3, scheme), TailDivergence);

  // decay 4 in n = 3: the truncated part misses ~4 pi / R
  const RadialIntegrand f{[](double r) { return std::pow(1 + r * r, -2.0); }, 4.0, {}};
  const double exact = pi * pi; // 4 pi * pi/4
  scheme.truncation_radius = 1e3;
  const double with_tail = radial_integral(f, 3, scheme).value;
  scheme.tail_model = TailModel::Drop;
  const double dropped = radial_integral(f, 3, scheme).value;
  CHECK(std::abs(with_tail - exact) < 1e-6);
  CHECK(std::abs(dropped - exact) == doctest::Approx(4 * pi / 1e3).epsilon(1e-3));
}

TEST_CASE("refinement gives up at max_panels") {
  QuadratureScheme scheme;
  scheme.order = 2;
  scheme.panels = 2;
  scheme.max_panels = 4;
  scheme.target_rel_err = 1e-14;
  const RadialIntegrand f{[](double r) { return std::cos(40 * r) * std::exp(-r); }, INFINITY, {}};
  CHECK_THROWS_AS(radial_integral(f, 2, scheme), AccuracyNotMet);
}

TEST_CASE("scheme validation") {
  QuadratureScheme scheme;
  scheme.order = 0;
  CHECK_THROWS_AS(scheme.validate(), DomainError);
}

TEST_CASE("quotient of a Gaussian in the plane") {
  // (n,p,q,r) = (2,2,2,3): theta = 1/3, Q(exp(-rho^2)) = pi (pi/2)^2 / (pi/3)^2
  const auto params = validate_params(2, 2, 2, 3);
  const auto q = gn_quotient(gaussian_profile(1.0), params, {});
  CHECK(q.value == doctest::Approx(9 * pi / 4).epsilon(1e-10));
  // dilation invariance
  CHECK(gn_quotient(gaussian_profile(0.3), params, {}).value == doctest::Approx(q.value).epsilon(1e-9));
}

TEST_CASE("extremal attains the closed form") {
  for (auto [n, p, q] : {std::tuple{3, 2.0, 3.0}, {4, 2.0, 2.5}, {3, 1.5, 2.0}, {5, 1.8, 2.2}}) {
    const auto params = validate_params(n, p, q);
    const auto est = gn_quotient(extremal_profile(params), params, {});
    CAPTURE(n);
    CHECK(std::abs(est.value * closed_form_A(params) - 1.0) <= 1e-8);
  }
  const auto params = validate_params(3, 2, 3);
  CHECK(gn_quotient(extremal_profile(params), params, {}).value ==
        doctest::Approx(7.303872119375108).epsilon(1e-9));
}

TEST_CASE("moments of the three-dimensional extremal") {
  const auto m = moments(validate_params(3, 2, 3), {});
  CHECK(std::abs(m[1].value - pi * pi / 4) <= 1e-9);
  CHECK(std::abs(m[4].value - pi * pi / 2) <= 1e-9);
  CHECK_THROWS(m[0]);
}

TEST_CASE("blow-up bracket against the adaptive oracle") {
  // mpmath adaptive quadrature at 30 digits
  const auto eval = evaluate_blowup(validate_params(5, 2.2, 2.5), {});
  const double expected[] = {3.3051709698032846, 35.918043404351853, 6.1981904686670708,
                             13.680867821979013, 3.8316086533578272};
  for (int k = 1; k <= 5; ++k) {
    CAPTURE(k);
    CHECK(eval.moments[k].value == doctest::Approx(expected[k - 1]).epsilon(1e-8));
  }
  CHECK(eval.bracket == doctest::Approx(153.73904059155193).epsilon(1e-7));
  CHECK(blowup_coefficient(validate_params(10, 3, 3.3), {}) > 0);
}

TEST_CASE("blow-up sign scan at n = 10 just below the endpoint") {
  const int n = 10;
  for (double p = 2.05; p < (n + 2) / 3.0; p += 0.15) {
    const double q = p * (n - 1) / (n - p) - 0.05;
    CAPTURE(p);
    CHECK(blowup_coefficient(validate_params(n, p, q), {}) > 0);
  }
}

TEST_CASE("Gateaux derivative") {
  const auto params = validate_params(3, 2, 3);
  const QuadratureScheme scheme;
  const auto w = extremal_profile(params);
  const auto zero = w.scaled(0.0);
  CHECK(gateaux_derivative(w, zero, params, scheme, 1e-4) == 0.0);
  // Q(cu) = Q(u)
  CHECK(std::abs(gateaux_derivative(w, w, params, scheme, 1e-4)) < 1e-6);
  // away from the extremal the derivative along a dilation-breaking bump is not small
  const auto g = gaussian_profile(1.0);
  CHECK(std::abs(gateaux_derivative(g, bump_profile(0.5, 2.0), params, scheme, 1e-4)) > 1e-3);
}

TEST_CASE("extremality report") {
  const auto params = validate_params(3, 2, 3);
  const auto report = verify_extremality(params, {}, 20);
  CHECK(report.passed);
  CHECK(report.gap <= 1e-6);
  REQUIRE(report.perturbations.size() == 20);
  CHECK(report.perturbations.front().seed == 20240601);
  // same seed, same perturbations
  const auto again = verify_extremality(params, {}, 20);
  CHECK(again.perturbations.back().q_plus == report.perturbations.back().q_plus);

  QuadratureScheme loose;
  loose.target_rel_err = 1e-3;
  CHECK(verify_extremality(params, loose, 2).gap_tolerance == doctest::Approx(0.1));
}

TEST_CASE("exploratory minimizer gives an upper estimate") {
  const auto params = validate_params(3, 2, 3);
  const double upper = exploratory_inverse_constant(params, {}, 4);
  const double exact = 1.0 / closed_form_A(params);
  CHECK(upper >= exact * (1 - 1e-8));
  CHECK(upper < exact * 1.05);
}

}
