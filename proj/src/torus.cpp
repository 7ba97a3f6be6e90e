#include "gnopt/torus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gnopt/errors.hpp"

namespace gnopt {

namespace {

// x^e with exact products for the small integer exponents the simulator
// meets most often.
inline double pow_fast(double x, double e) {
  if (e == 1.0)
    return x;
  if (e == 2.0)
    return x * x;
  if (e == 3.0)
    return x * x * x;
  if (e == 0.0)
    return 1.0;
  return std::pow(x, e);
}

std::size_t checked_size(int dim, int n) {
  if (dim < 1 || dim > 3)
    throw DomainError("torus dimension must be 1, 2 or 3");
  if (n < 8)
    throw DomainError("torus grid needs at least 8 points per side");
  std::size_t size = 1;
  for (int a = 0; a < dim; ++a)
    size *= static_cast<std::size_t>(n);
  return size;
}

} // namespace

TorusGrid::TorusGrid(int dim, int points_per_side)
    : dim_(dim), n_(points_per_side), size_(checked_size(dim, points_per_side)),
      cell_volume_(std::pow(1.0 / points_per_side, dim)), forward_(dim * size_),
      backward_(dim * size_) {
  std::size_t stride = size_;
  for (int a = 0; a < dim_; ++a) {
    stride /= static_cast<std::size_t>(n_);
    for (std::size_t c = 0; c < size_; ++c) {
      const std::size_t coord = (c / stride) % static_cast<std::size_t>(n_);
      forward_[a * size_ + c] = coord + 1 < static_cast<std::size_t>(n_) ? c + stride : c - (n_ - 1) * stride;
      backward_[a * size_ + c] = coord > 0 ? c - stride : c + (n_ - 1) * stride;
    }
  }
}

std::vector<int> TorusGrid::coordinates(std::size_t cell) const {
  std::vector<int> coords(dim_);
  for (int a = dim_ - 1; a >= 0; --a) {
    coords[a] = static_cast<int>(cell % static_cast<std::size_t>(n_));
    cell /= static_cast<std::size_t>(n_);
  }
  return coords;
}

std::size_t TorusGrid::index(std::span<const int> coords) const {
  if (static_cast<int>(coords.size()) != dim_)
    throw DomainError("coordinate count does not match grid dimension");
  std::size_t idx = 0;
  for (int c : coords) {
    const int wrapped = ((c % n_) + n_) % n_;
    idx = idx * static_cast<std::size_t>(n_) + static_cast<std::size_t>(wrapped);
  }
  return idx;
}

double TorusGrid::distance(std::size_t a, std::size_t b) const {
  double sum = 0.0;
  for (int axis = dim_ - 1; axis >= 0; --axis) {
    const long ca = static_cast<long>(a % static_cast<std::size_t>(n_));
    const long cb = static_cast<long>(b % static_cast<std::size_t>(n_));
    a /= static_cast<std::size_t>(n_);
    b /= static_cast<std::size_t>(n_);
    long d = std::labs(ca - cb);
    d = std::min(d, static_cast<long>(n_) - d);
    const double dx = static_cast<double>(d) * spacing();
    sum += dx * dx;
  }
  return std::sqrt(sum);
}

TorusField::TorusField(TorusGrid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw DomainError("field size does not match the grid");
  for (double v : values_)
    if (!std::isfinite(v) || v < 0.0)
      throw DomainError("torus fields must be finite and nonnegative");
}

TorusField TorusField::constant(const TorusGrid& grid, double value) {
  return TorusField(grid, std::vector<double>(grid.size(), value));
}

std::size_t TorusField::max_index() const {
  return static_cast<std::size_t>(std::max_element(values_.begin(), values_.end()) -
                                  values_.begin());
}

namespace {

// Everything J_alpha and the scale-free quotient need from one field.
struct Integrals {
  double energy = 0.0; // p-Dirichlet energy
  double lp = 0.0;     // int u^p
  double lq = 0.0;     // int u^q
  double lr = 0.0;     // int u^r
};

double energy_sum(const TorusGrid& g, std::span<const double> u, double p, double delta) {
  const double inv_h = 1.0 / g.spacing();
  const double d2 = delta * delta;
  double sum = 0.0;
  for (std::size_t c = 0; c < g.size(); ++c) {
    double s = d2;
    for (int a = 0; a < g.dim(); ++a) {
      const double diff = (u[g.forward(c, a)] - u[c]) * inv_h;
      s += diff * diff;
    }
    sum += p == 2.0 ? s : std::pow(s, 0.5 * p);
  }
  return sum * g.cell_volume();
}

double power_sum(const TorusGrid& g, std::span<const double> u, double e) {
  double sum = 0.0;
  for (double v : u)
    sum += pow_fast(std::abs(v), e);
  return sum * g.cell_volume();
}

Integrals integrals(const TorusGrid& g, std::span<const double> u, const GNParams& params,
                    double delta) {
  return {energy_sum(g, u, params.p(), delta), power_sum(g, u, params.p()),
          power_sum(g, u, params.q()), power_sum(g, u, params.r())};
}

double j_value(const Integrals& in, const GNParams& params, double alpha) {
  return (in.energy + alpha * in.lp) * std::pow(in.lq, params.q_factor_exponent());
}

// Scale-free quotient F(u) = J(u) / (int u^r)^{p/(r theta)}; equals J on the
// unit L^r sphere.
double quotient_value(const Integrals& in, const GNParams& params, double alpha) {
  return j_value(in, params, alpha) / std::pow(in.lr, params.r_factor_exponent());
}

void energy_gradient(const TorusGrid& g, std::span<const double> u, double p, double delta,
                     std::vector<double>& out) {
  const std::size_t size = g.size();
  const int dim = g.dim();
  const double inv_h = 1.0 / g.spacing();
  const double d2 = delta * delta;
  std::vector<double> flux(dim * size);
  for (std::size_t c = 0; c < size; ++c) {
    double s = d2;
    for (int a = 0; a < dim; ++a) {
      const double diff = (u[g.forward(c, a)] - u[c]) * inv_h;
      flux[a * size + c] = diff;
      s += diff * diff;
    }
    const double weight = p == 2.0 ? 2.0 : (s > 0.0 ? p * std::pow(s, 0.5 * p - 1.0) : 0.0);
    for (int a = 0; a < dim; ++a)
      flux[a * size + c] *= weight;
  }
  const double scale = g.cell_volume() * inv_h;
  out.assign(size, 0.0);
  for (std::size_t c = 0; c < size; ++c) {
    double acc = 0.0;
    for (int a = 0; a < dim; ++a)
      acc += flux[a * size + g.backward(c, a)] - flux[a * size + c];
    out[c] = acc * scale;
  }
}

// d/du_i of int |u|^e
inline double power_derivative(double v, double e, double dv) {
  const double mag = e * pow_fast(std::abs(v), e - 1.0) * dv;
  return v < 0.0 ? -mag : mag;
}

std::vector<double> j_gradient_impl(const TorusGrid& g, std::span<const double> u,
                                    const GNParams& params, double alpha, double delta,
                                    const Integrals& in) {
  const double p = params.p(), q = params.q();
  const double e = params.q_factor_exponent();
  const double dv = g.cell_volume();
  std::vector<double> grad;
  energy_gradient(g, u, p, delta, grad);
  const double lq_e = std::pow(in.lq, e);
  const double front = (in.energy + alpha * in.lp) * e * std::pow(in.lq, e - 1.0);
  for (std::size_t c = 0; c < g.size(); ++c)
    grad[c] = (grad[c] + alpha * power_derivative(u[c], p, dv)) * lq_e +
              front * power_derivative(u[c], q, dv);
  return grad;
}

std::vector<double> quotient_gradient(const TorusGrid& g, std::span<const double> u,
                                      const GNParams& params, double alpha, double delta,
                                      const Integrals& in) {
  const double r = params.r();
  const double k = params.r_factor_exponent();
  const double dv = g.cell_volume();
  std::vector<double> grad = j_gradient_impl(g, u, params, alpha, delta, in);
  const double lr_k = std::pow(in.lr, k);
  const double j = j_value(in, params, alpha);
  const double back = j * k / (lr_k * in.lr);
  for (std::size_t c = 0; c < g.size(); ++c)
    grad[c] = grad[c] / lr_k - back * power_derivative(u[c], r, dv);
  return grad;
}

bool normalize_in_place(const TorusGrid& g, std::vector<double>& u, double r) {
  const double norm = std::pow(power_sum(g, u, r), 1.0 / r);
  if (!(norm > 0.0) || !std::isfinite(norm))
    return false;
  const double inv = 1.0 / norm;
  for (double& v : u)
    v *= inv;
  return true;
}

} // namespace

double p_dirichlet_energy(const TorusField& u, double p, double delta) {
  if (!(p > 1.0))
    throw DomainError("p must exceed 1");
  if (!(delta >= 0.0))
    throw DomainError("delta must be >= 0");
  return energy_sum(u.grid(), u.values(), p, delta);
}

double power_integral(const TorusField& u, double s) {
  return power_sum(u.grid(), u.values(), s);
}

TorusField lr_normalize(const TorusField& u, double r) {
  std::vector<double> values(u.values().begin(), u.values().end());
  if (!normalize_in_place(u.grid(), values, r))
    throw ZeroField("cannot normalize a field that vanishes identically");
  return TorusField(u.grid(), std::move(values));
}

double j_alpha(const TorusField& u, const GNParams& params, double alpha, double delta) {
  return j_value(integrals(u.grid(), u.values(), params, delta), params, alpha);
}

std::vector<double> j_alpha_gradient(const TorusField& u, const GNParams& params, double alpha,
                                     double delta) {
  const auto in = integrals(u.grid(), u.values(), params, delta);
  return j_gradient_impl(u.grid(), u.values(), params, alpha, delta, in);
}

double MinimizerOptions::resolved_delta(double p) const {
  if (delta)
    return *delta;
  return p < 2.0 ? 1e-8 : 0.0;
}

std::vector<double> default_concentration_radii() { return {0.05, 0.1, 0.2, 0.3, 0.4, 0.5}; }

std::vector<ConcentrationSample> concentration_profile(const TorusField& u, double r,
                                                       std::span<const double> radii) {
  const TorusGrid& g = u.grid();
  const std::size_t center = u.max_index();
  std::vector<double> dist(g.size());
  std::vector<double> mass(g.size());
  double total = 0.0;
  for (std::size_t c = 0; c < g.size(); ++c) {
    dist[c] = g.distance(center, c);
    mass[c] = pow_fast(u[c], r) * g.cell_volume();
    total += mass[c];
  }
  std::vector<ConcentrationSample> out;
  out.reserve(radii.size());
  for (double radius : radii) {
    double inside = 0.0;
    for (std::size_t c = 0; c < g.size(); ++c)
      inside += dist[c] <= radius ? mass[c] : 0.0;
    out.push_back({radius, total > 0.0 ? inside / total : 0.0});
  }
  return out;
}

double penalty_share(const MinimizerDiagnostics& d) { return d.penalty / d.nu_alpha; }

double concentration_at(const MinimizerDiagnostics& d, double radius) {
  for (const auto& s : d.concentration)
    if (std::abs(s.radius - radius) <= 1e-12)
      return s.fraction;
  return std::numeric_limits<double>::quiet_NaN();
}

namespace {

struct Descent {
  std::vector<double> u;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  double step = 0.0;
};

Descent projected_descent(const TorusGrid& g, std::vector<double> u, const GNParams& params,
                          double alpha, double delta, const MinimizerOptions& opt) {
  const double r = params.r();
  const double dv = g.cell_volume();
  // Successive small relative changes required before stopping.
  constexpr int kPatience = 3;

  if (!normalize_in_place(g, u, r))
    throw ZeroField("initial field vanishes identically");
  Integrals in = integrals(g, u, params, delta);
  double f = quotient_value(in, params, alpha);

  Descent out;
  double t = opt.initial_step;
  int quiet = 0;
  std::vector<double> trial(u.size());
  for (out.iterations = 0; out.iterations < opt.max_iterations;) {
    const std::vector<double> grad = quotient_gradient(g, u, params, alpha, delta, in);
    bool accepted = false;
    double f_trial = 0.0;
    Integrals in_trial;
    while (t > 1e-30) {
      for (std::size_t c = 0; c < u.size(); ++c)
        trial[c] = std::max(u[c] - t * grad[c] / dv, 0.0);
      if (normalize_in_place(g, trial, r)) {
        in_trial = integrals(g, trial, params, delta);
        f_trial = quotient_value(in_trial, params, alpha);
        double slope = 0.0;
        for (std::size_t c = 0; c < u.size(); ++c)
          slope += grad[c] * (trial[c] - u[c]);
        if (f_trial <= f + opt.armijo_c1 * slope) {
          accepted = true;
          break;
        }
      }
      t *= opt.backtrack;
    }
    if (!accepted) {
      // No descent direction left at working precision.
      out.converged = true;
      break;
    }
    ++out.iterations;
    const double change = std::abs(f - f_trial) / std::abs(f);
    u.swap(trial);
    in = in_trial;
    f = f_trial;
    quiet = change < opt.rel_tol ? quiet + 1 : 0;
    if (quiet >= kPatience) {
      out.converged = true;
      break;
    }
    t = std::min(2.0 * t, 1e6);
  }
  out.u = std::move(u);
  out.value = f;
  out.step = t;
  return out;
}

std::vector<double> bump_field(const TorusGrid& g, double width) {
  std::vector<double> u(g.size());
  const double h = g.spacing();
  for (std::size_t c = 0; c < g.size(); ++c) {
    const auto coords = g.coordinates(c);
    double d2 = 0.0;
    for (int x : coords) {
      double d = std::abs((x + 0.5) * h - 0.5);
      d = std::min(d, 1.0 - d);
      d2 += d * d;
    }
    u[c] = std::exp(-d2 / (width * width));
  }
  return u;
}

double projected_residual(const TorusGrid& g, std::span<const double> u,
                          const std::vector<double>& grad) {
  const double dv = g.cell_volume();
  double sum = 0.0;
  for (std::size_t c = 0; c < u.size(); ++c) {
    if (u[c] > 0.0 || grad[c] < 0.0) {
      const double density = grad[c] / dv;
      sum += density * density;
    }
  }
  return std::sqrt(sum * dv);
}

} // namespace

MinimizerResult minimize_j_alpha(const GNParams& params, const TorusGrid& grid, double alpha,
                                 const MinimizerOptions& options, const TorusField* warm_start) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw DomainError("alpha must be positive and finite");
  if (!satisfies_theorem(params))
    throw DomainError("the torus simulator requires the theorem regime");
  if (!(params.r() < params.p_star()))
    throw DomainError("the torus simulator requires r < p*");
  if (grid.dim() != params.n())
    throw DomainError("grid dimension must equal n");
  if (grid.dim() != 2 && grid.dim() != 3)
    throw DomainError("the torus simulator supports dimensions 2 and 3");
  if (warm_start && warm_start->grid().size() != grid.size())
    throw DomainError("warm start lives on a different grid");

  const double delta = options.resolved_delta(params.p());

  std::vector<std::pair<std::string, Descent>> candidates;
  if (warm_start)
    candidates.emplace_back(
        "warm", projected_descent(grid, {warm_start->values().begin(), warm_start->values().end()},
                                  params, alpha, delta, options));
  if (!warm_start || options.multistart)
    candidates.emplace_back(
        "bump", projected_descent(grid, bump_field(grid, options.init_width), params, alpha,
                                  delta, options));
  if (options.multistart) {
    // The constant is a critical point of every J_alpha on the sphere.
    Descent flat;
    flat.u.assign(grid.size(), 1.0);
    normalize_in_place(grid, flat.u, params.r());
    flat.value = quotient_value(integrals(grid, flat.u, params, delta), params, alpha);
    flat.converged = true;
    candidates.emplace_back("constant", std::move(flat));
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i)
    if (candidates[i].second.value < candidates[best].second.value)
      best = i;
  auto& [origin, win] = candidates[best];

  TorusField field(grid, std::move(win.u));
  const auto in = integrals(grid, field.values(), params, delta);
  const double e = params.q_factor_exponent();

  MinimizerDiagnostics d;
  d.alpha = alpha;
  d.delta = delta;
  d.origin = origin;
  d.A_alpha = std::pow(in.lq, e);
  d.B_alpha = (in.energy + alpha * in.lp) * std::pow(in.lq, e - 1.0);
  d.nu_alpha = (in.energy + alpha * in.lp) * d.A_alpha;
  d.mu_alpha = d.nu_alpha / params.theta();
  d.grad_energy = d.A_alpha * in.energy;
  d.penalty = alpha * d.A_alpha * in.lp;
  d.q_mass = d.B_alpha * in.lq;
  d.max_index = field.max_index();
  d.max_coords = grid.coordinates(d.max_index);
  const auto radii = default_concentration_radii();
  d.concentration = concentration_profile(field, params.r(), radii);
  d.iterations = win.iterations;
  d.converged = win.converged;
  d.final_step = win.step;
  d.residual = projected_residual(
      grid, field.values(), quotient_gradient(grid, field.values(), params, alpha, delta, in));
  return {std::move(field), std::move(d)};
}

SweepResult alpha_sweep(const GNParams& params, const TorusGrid& grid,
                        const std::vector<double>& alphas, const MinimizerOptions& options) {
  if (alphas.empty())
    throw DomainError("alpha list is empty");
  for (std::size_t i = 1; i < alphas.size(); ++i)
    if (!(alphas[i] > alphas[i - 1]))
      throw DomainError("alphas must be strictly increasing");

  SweepResult out;
  for (double alpha : alphas) {
    const TorusField* warm = out.minimizers.empty() ? nullptr : &out.minimizers.back();
    auto result = minimize_j_alpha(params, grid, alpha, options, warm);
    out.runs.push_back(std::move(result.diagnostics));
    out.minimizers.push_back(std::move(result.field));
  }

  constexpr double kSolverTol = 1e-8;
  const auto& runs = out.runs;
  out.trend.nu_nondecreasing = true;
  for (std::size_t i = 1; i < runs.size(); ++i)
    if (runs[i].nu_alpha < runs[i - 1].nu_alpha - kSolverTol * std::max(1.0, std::abs(runs[i - 1].nu_alpha)))
      out.trend.nu_nondecreasing = false;

  const std::size_t top = runs.size() / 2;
  out.trend.penalty_share_decreasing = true;
  out.trend.concentration_nondecreasing = true;
  for (std::size_t i = top + 1; i < runs.size(); ++i) {
    if (!(penalty_share(runs[i]) < penalty_share(runs[i - 1])))
      out.trend.penalty_share_decreasing = false;
    if (concentration_at(runs[i], 0.2) < concentration_at(runs[i - 1], 0.2))
      out.trend.concentration_nondecreasing = false;
  }
  return out;
}

} // namespace gnopt
