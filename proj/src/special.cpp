#include "gnopt/special.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "gnopt/errors.hpp"

namespace gnopt {

namespace {

// Lanczos coefficients for g = 7, n = 9.
constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

constexpr int kSeriesTerms = 40;

// zeta(k) - 1 for k = 2 .. kSeriesTerms + 1.
const std::array<double, kSeriesTerms + 2>& zeta_minus_one() {
  static const auto table = [] {
    std::array<double, kSeriesTerms + 2> t{};
    for (int k = 2; k < kSeriesTerms + 2; ++k) {
      if (k <= 12) {
        t[k] = std::riemann_zeta(static_cast<double>(k)) - 1.0;
      } else {
        double s = 0.0;
        for (int m = 40; m >= 2; --m)
          s += std::pow(static_cast<double>(m), -k);
        t[k] = s;
      }
    }
    return t;
  }();
  return table;
}

// sum_{k>=2} (-1)^k (zeta(k)-1) z^k / k, for |z| <= 1/2.
double zeta_tail_series(double z) {
  const auto& zm1 = zeta_minus_one();
  double sum = 0.0;
  double zk = z * z;
  for (int k = 2; k < kSeriesTerms + 2; ++k) {
    const double term = zm1[k] * zk / k;
    sum += (k % 2 == 0) ? term : -term;
    zk *= z;
  }
  return sum;
}

constexpr double kEulerGamma = std::numbers::egamma;

// ln Gamma(1 + z), |z| <= 1/2.
double log_gamma_near_one(double z) {
  return -std::log1p(z) + z * (1.0 - kEulerGamma) + zeta_tail_series(z);
}

// ln Gamma(2 + z) = ln(1+z) + ln Gamma(1+z), |z| <= 1/2.
double log_gamma_near_two(double z) {
  return z * (1.0 - kEulerGamma) + zeta_tail_series(z);
}

double log_gamma_lanczos(double x) {
  const double z = x - 1.0;
  double a = kLanczos[0];
  for (std::size_t k = 1; k < kLanczos.size(); ++k)
    a += kLanczos[k] / (z + static_cast<double>(k));
  const double t = z + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t +
         std::log(a);
}

} // namespace

double log_gamma(double x) {
  if (!(x > 0.0))
    throw DomainError("log_gamma requires x > 0");
  if (std::isinf(x))
    return x;
  if (x < 0.5)
    return log_gamma(x + 1.0) - std::log(x);
  if (x < 1.5)
    return log_gamma_near_one(x - 1.0);
  if (x < 2.5)
    return log_gamma_near_two(x - 2.0);
  return log_gamma_lanczos(x);
}

double unit_sphere_area(int n) {
  if (n < 1)
    throw DomainError("unit_sphere_area requires n >= 1");
  const double half = 0.5 * n;
  return std::exp(std::log(2.0) + half * std::log(std::numbers::pi) -
                  log_gamma(half));
}

} // namespace gnopt
