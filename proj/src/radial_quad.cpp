#include "gnopt/radial_quad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <sstream>
#include <utility>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_multimin.h>

#include "gnopt/best_constant.hpp"
#include "gnopt/special.hpp"

namespace gnopt {

namespace {

struct Node {
  double x; // on [-1, 1]
  double w;
};

std::vector<Node> gauss_legendre(int order) {
  // GSL's default handler aborts; errors surface through return values instead.
  static const bool handler_off = (gsl_set_error_handler_off(), true);
  (void)handler_off;
  std::unique_ptr<gsl_integration_glfixed_table,
                  decltype(&gsl_integration_glfixed_table_free)>
      table(gsl_integration_glfixed_table_alloc(order),
            &gsl_integration_glfixed_table_free);
  if (!table)
    throw DomainError("cannot build Gauss-Legendre rule of order " +
                      std::to_string(order));
  std::vector<Node> nodes(order);
  for (int i = 0; i < order; ++i)
    gsl_integration_glfixed_point(-1.0, 1.0, i, &nodes[i].x, &nodes[i].w,
                                  table.get());
  return nodes;
}

void append_geometric(std::vector<double>& edges, double from, double to, int count) {
  const double ratio = std::log(to / from);
  for (int i = 1; i < count; ++i)
    edges.push_back(from * std::exp(ratio * i / count));
  edges.push_back(to);
}

std::vector<double> panel_edges(const QuadratureScheme& s, int panels,
                                const std::vector<double>& extra) {
  const double R = s.truncation_radius;
  std::vector<double> edges{0.0};
  if (panels == 1 || s.inner_radius >= R) {
    edges.push_back(R);
  } else {
    const double inner = s.inner_radius;
    edges.push_back(inner);
    const int graded = panels - 1;
    if (inner < 1.0 && R > 1.0 && graded >= 2) {
      const int below = std::clamp(
          static_cast<int>(std::lround(graded * std::log(1.0 / inner) / std::log(R / inner))),
          1, graded - 1);
      append_geometric(edges, inner, 1.0, below);
      append_geometric(edges, 1.0, R, graded - below);
    } else {
      append_geometric(edges, inner, R, graded);
    }
  }
  for (double b : extra)
    if (b > 0.0 && b < R)
      edges.push_back(b);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

double composite_sum(const std::function<double(double)>& f, int n,
                     const std::vector<double>& edges, const std::vector<Node>& nodes) {
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    const double a = edges[k], b = edges[k + 1];
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    double panel = 0.0;
    for (const Node& node : nodes) {
      const double rho = mid + half * node.x;
      panel += node.w * f(rho) * std::pow(rho, n - 1);
    }
    total += half * panel;
  }
  return total;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

void require_decay(double decay, double needed, const std::string& what) {
  if (!(decay > needed))
    throw TailDivergence(what + ": decay exponent " + fmt(decay) + " <= " + fmt(needed));
}

} // namespace

void QuadratureScheme::validate() const {
  if (order < 2)
    throw DomainError("quadrature order must be >= 2");
  if (!(truncation_radius > 0.0))
    throw DomainError("truncation radius must be positive");
  if (panels < 1)
    throw DomainError("panel count must be >= 1");
  if (!(target_rel_err > 0.0))
    throw DomainError("target relative error must be positive");
  if (!(inner_radius > 0.0))
    throw DomainError("inner radius must be positive");
  if (max_panels < panels)
    throw DomainError("max_panels must be >= panels");
}

Estimate radial_integral(const RadialIntegrand& integrand, int n,
                         const QuadratureScheme& scheme) {
  scheme.validate();
  if (n < 1)
    throw DomainError("dimension must be >= 1");
  const bool correct_tail = scheme.tail_model == TailModel::PowerLawCorrection;
  if (correct_tail)
    require_decay(integrand.decay, n, "radial integrand in dimension " + std::to_string(n));

  const auto nodes = gauss_legendre(scheme.order);
  const double area = unit_sphere_area(n);

  int panels = scheme.panels;
  double previous =
      composite_sum(integrand.f, n, panel_edges(scheme, panels, integrand.breakpoints), nodes);
  double current = previous;
  double quad_err = 0.0;
  while (true) {
    if (2 * panels > scheme.max_panels) {
      std::ostringstream os;
      os << "quadrature did not reach relative error " << scheme.target_rel_err
         << " within " << scheme.max_panels << " panels (last change "
         << std::abs(current - previous) << ")";
      throw AccuracyNotMet(os.str());
    }
    panels *= 2;
    current = composite_sum(integrand.f, n,
                            panel_edges(scheme, panels, integrand.breakpoints), nodes);
    quad_err = std::abs(current - previous);
    if (quad_err <= scheme.target_rel_err * std::abs(current))
      break;
    previous = current;
  }

  Estimate result{area * current, area * quad_err};
  if (correct_tail && std::isfinite(integrand.decay)) {
    // f ~ C rho^-d beyond R: int_R^inf C rho^{n-1-d} = C R^{n-d} / (d - n).
    const double R = scheme.truncation_radius;
    const double d = integrand.decay;
    const double lead = integrand.f(R) * std::pow(R, n) / (d - n);
    const double half_r = 0.5 * R;
    const double lead_half =
        integrand.f(half_r) * std::pow(half_r, d) * std::pow(R, n - d) / (d - n);
    result.value += area * lead;
    result.abs_error += area * std::abs(lead - lead_half);
  }
  return result;
}

Estimate gn_quotient(const RadialProfile& u, const GNParams& params,
                     const QuadratureScheme& scheme) {
  const int n = params.n();
  const double p = params.p(), q = params.q(), r = params.r();

  RadialIntegrand grad{[&u, p](double rho) { return std::pow(std::abs(u.evaluate_derivative(rho)), p); },
                       p * u.derivative_decay_exponent(), u.breakpoints()};
  RadialIntegrand lq{[&u, q](double rho) { return std::pow(std::abs(u.evaluate(rho)), q); },
                     q * u.decay_exponent(), u.breakpoints()};
  RadialIntegrand lr{[&u, r](double rho) { return std::pow(std::abs(u.evaluate(rho)), r); },
                     r * u.decay_exponent(), u.breakpoints()};
  if (scheme.tail_model == TailModel::PowerLawCorrection) {
    require_decay(grad.decay, n, "int |grad u|^p");
    require_decay(lq.decay, n, "int |u|^q");
    require_decay(lr.decay, n, "int |u|^r");
  }

  const Estimate g = radial_integral(grad, n, scheme);
  const Estimate mq = radial_integral(lq, n, scheme);
  const Estimate mr = radial_integral(lr, n, scheme);
  if (mr.value == 0.0)
    throw ZeroProfile("profile vanishes identically on the quadrature grid");

  const double e = params.q_factor_exponent();
  const double k = params.r_factor_exponent();
  const double value = g.value * std::pow(mq.value, e) / std::pow(mr.value, k);
  double rel = k * mr.abs_error / mr.value;
  if (g.value != 0.0)
    rel += g.abs_error / g.value;
  if (mq.value != 0.0)
    rel += e * mq.abs_error / mq.value;
  return {value, std::abs(value) * rel};
}

MomentIntegrals moments(const GNParams& params, const QuadratureScheme& scheme) {
  if (!in_dpd_family(params))
    throw DomainError("moments require p < q <= p(n-1)/(n-p) and r = p(q-1)/(p-1)");
  const int n = params.n();
  const double p = params.p(), q = params.q(), r = params.r();
  const double w_decay = p / (q - p);
  const double g_decay = p * (w_decay + 1.0);

  if (scheme.tail_model == TailModel::PowerLawCorrection) {
    require_decay(q * w_decay, n, "I1 = int w^q (pq/(q-p) must exceed n)");
    require_decay(g_decay, n + 2, "I2 = int |grad w|^p |x|^2 (p(p/(q-p)+1) must exceed n+2)");
    require_decay(q * w_decay, n + 2, "I3 = int w^q |x|^2 (pq/(q-p) must exceed n+2)");
    require_decay(g_decay, n, "I4 = int |grad w|^p (p(p/(q-p)+1) must exceed n)");
    require_decay(r * w_decay, n + 2, "I5 = int w^r |x|^2 (pr/(q-p) must exceed n+2)");
  }

  const RadialProfile w = extremal_profile(params);
  auto wq = [&w, q](double rho) { return std::pow(w.evaluate(rho), q); };
  auto wr = [&w, r](double rho) { return std::pow(w.evaluate(rho), r); };
  auto gp = [&w, p](double rho) { return std::pow(std::abs(w.evaluate_derivative(rho)), p); };

  MomentIntegrals m;
  m.values[0] = radial_integral({wq, q * w_decay, {}}, n, scheme);
  m.values[1] = radial_integral(
      {[&gp](double rho) { return gp(rho) * rho * rho; }, g_decay - 2.0, {}}, n, scheme);
  m.values[2] = radial_integral(
      {[&wq](double rho) { return wq(rho) * rho * rho; }, q * w_decay - 2.0, {}}, n, scheme);
  m.values[3] = radial_integral({gp, g_decay, {}}, n, scheme);
  m.values[4] = radial_integral(
      {[&wr](double rho) { return wr(rho) * rho * rho; }, r * w_decay - 2.0, {}}, n, scheme);
  return m;
}

BlowupEvaluation evaluate_blowup(const GNParams& params, const QuadratureScheme& scheme) {
  BlowupEvaluation out;
  out.best_constant = closed_form_A(params);
  out.moments = moments(params, scheme);
  const double e = params.q_factor_exponent();
  const double k = params.r_factor_exponent();
  const auto& m = out.moments;
  out.bracket = out.best_constant * (std::pow(m[1].value, e) * m[2].value +
                                     e * m[1].value * m[4].value * std::pow(m[3].value, e - 1.0)) -
                k * m[5].value;
  return out;
}

double blowup_coefficient(const GNParams& params, const QuadratureScheme& scheme) {
  return evaluate_blowup(params, scheme).bracket;
}

ExtremalityViolated::ExtremalityViolated(ExtremalityReport report)
    : Error("extremality check failed"), report_(std::move(report)) {}

double gateaux_derivative(const RadialProfile& u, const RadialProfile& phi,
                          const GNParams& params, const QuadratureScheme& scheme,
                          double eps) {
  const double plus = gn_quotient(RadialProfile::combine(1.0, u, eps, phi), params, scheme).value;
  const double minus = gn_quotient(RadialProfile::combine(1.0, u, -eps, phi), params, scheme).value;
  return (plus - minus) / (2.0 * eps);
}

namespace {

double unit_uniform(std::mt19937_64& rng) {
  // 53 random bits; std::uniform_real_distribution is not portable bit-for-bit.
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace

ExtremalityReport verify_extremality(const GNParams& params, const QuadratureScheme& scheme,
                                     int perturbations, const ExtremalityOptions& options) {
  if (perturbations < 0)
    throw DomainError("perturbation count must be >= 0");
  if (!(options.eps > 0.0))
    throw DomainError("perturbation size must be positive");
  if (!in_dpd_family(params))
    throw DomainError("extremality check requires p < q <= p(n-1)/(n-p) and r = p(q-1)/(p-1)");

  ExtremalityReport report;
  report.eps = options.eps;
  report.best_constant = closed_form_A(params);
  const RadialProfile w = extremal_profile(params);
  report.q_extremal = gn_quotient(w, params, scheme);
  const double qw = report.q_extremal.value;
  report.gap = std::abs(qw * report.best_constant - 1.0);

  const double target = scheme.target_rel_err;
  report.gap_tolerance = std::max(1e-6, 100.0 * target);
  report.minimality_tolerance = std::max(1e-5, 10.0 * target) * qw;
  report.derivative_tolerance = std::max(1e-3, 10.0 * target / options.eps) * qw;

  bool ok = report.gap <= report.gap_tolerance;
  for (int i = 0; i < perturbations; ++i) {
    PerturbationResult pr;
    pr.seed = options.seed + static_cast<std::uint64_t>(i);
    std::mt19937_64 rng(pr.seed);
    pr.support_begin = 0.05 + 2.95 * unit_uniform(rng);
    pr.support_end = pr.support_begin + 0.2 + 2.8 * unit_uniform(rng);
    const double sign = unit_uniform(rng) < 0.5 ? -1.0 : 1.0;
    pr.amplitude = sign * w.evaluate(0.5 * (pr.support_begin + pr.support_end));
    const RadialProfile phi = bump_profile(pr.support_begin, pr.support_end).scaled(pr.amplitude);

    pr.q_plus = gn_quotient(RadialProfile::combine(1.0, w, options.eps, phi), params, scheme).value;
    pr.q_minus = gn_quotient(RadialProfile::combine(1.0, w, -options.eps, phi), params, scheme).value;
    pr.gateaux = (pr.q_plus - pr.q_minus) / (2.0 * options.eps);
    pr.minimal_ok = std::min(pr.q_plus, pr.q_minus) >= qw - report.minimality_tolerance;
    pr.derivative_ok = std::abs(pr.gateaux) <= report.derivative_tolerance;
    ok = ok && pr.minimal_ok && pr.derivative_ok;
    report.perturbations.push_back(pr);
  }
  report.passed = ok;
  if (!ok)
    throw ExtremalityViolated(report);
  return report;
}

namespace {

struct MixtureProblem {
  const GNParams* params;
  const QuadratureScheme* scheme;
  std::vector<double> widths;
};

RadialProfile mixture(const std::vector<double>& widths, const gsl_vector* log_weights) {
  RadialProfile u = gaussian_profile(widths[0]);
  for (std::size_t k = 1; k < widths.size(); ++k) {
    const double c = std::exp(gsl_vector_get(log_weights, k - 1));
    u = RadialProfile::combine(1.0, u, c, gaussian_profile(widths[k]));
  }
  return u;
}

double mixture_quotient(const gsl_vector* x, void* data) {
  const auto* problem = static_cast<const MixtureProblem*>(data);
  try {
    return gn_quotient(mixture(problem->widths, x), *problem->params, *problem->scheme).value;
  } catch (const Error&) {
    return std::numeric_limits<double>::max();
  }
}

} // namespace

double exploratory_inverse_constant(const GNParams& params, const QuadratureScheme& scheme,
                                    int gaussians) {
  if (gaussians < 1)
    throw DomainError("need at least one Gaussian");
  MixtureProblem problem{&params, &scheme, {}};
  for (int k = 0; k < gaussians; ++k)
    problem.widths.push_back(0.4 * std::pow(1.8, k));

  if (gaussians == 1)
    return gn_quotient(gaussian_profile(problem.widths[0]), params, scheme).value;

  const std::size_t dim = gaussians - 1;
  gsl_multimin_function fn{&mixture_quotient, dim, &problem};
  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> x(gsl_vector_alloc(dim), &gsl_vector_free);
  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> step(gsl_vector_alloc(dim), &gsl_vector_free);
  gsl_vector_set_all(x.get(), 0.0);
  gsl_vector_set_all(step.get(), 1.0);

  std::unique_ptr<gsl_multimin_fminimizer, decltype(&gsl_multimin_fminimizer_free)> solver(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, dim),
      &gsl_multimin_fminimizer_free);
  gsl_multimin_fminimizer_set(solver.get(), &fn, x.get(), step.get());

  for (int iter = 0; iter < 3000; ++iter) {
    if (gsl_multimin_fminimizer_iterate(solver.get()) != GSL_SUCCESS)
      break;
    const double size = gsl_multimin_fminimizer_size(solver.get());
    if (gsl_multimin_test_size(size, 1e-7) == GSL_SUCCESS)
      break;
  }
  return gsl_multimin_fminimizer_minimum(solver.get());
}

} // namespace gnopt
