#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gnopt/params.hpp"

namespace gnopt {

/// Periodic grid on the unit-volume flat torus [0,1)^dim with N points per side.
/// Cell k has center (i + 1/2) h in each axis; indices are row-major with the
/// last axis fastest.
class TorusGrid {
public:
  TorusGrid(int dim, int points_per_side);

  int dim() const { return dim_; }
  int points_per_side() const { return n_; }
  double side_length() const { return 1.0; }
  double spacing() const { return 1.0 / n_; }
  double cell_volume() const { return cell_volume_; }
  std::size_t size() const { return size_; }

  /// Index of the periodic neighbor one step forward along `axis`.
  std::size_t forward(std::size_t cell, int axis) const { return forward_[axis * size_ + cell]; }
  std::size_t backward(std::size_t cell, int axis) const { return backward_[axis * size_ + cell]; }

  std::vector<int> coordinates(std::size_t cell) const;
  std::size_t index(std::span<const int> coords) const;

  /// Periodic distance between cell centers.
  double distance(std::size_t a, std::size_t b) const;

private:
  int dim_;
  int n_;
  std::size_t size_;
  double cell_volume_;
  std::vector<std::size_t> forward_;
  std::vector<std::size_t> backward_;
};

/// Nonnegative, finite cell values on a TorusGrid.
class TorusField {
public:
  /// Throws DomainError on size mismatch, negative or non-finite entries.
  TorusField(TorusGrid grid, std::vector<double> values);

  static TorusField constant(const TorusGrid& grid, double value);

  const TorusGrid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  /// First cell attaining the maximum (lowest index on ties).
  std::size_t max_index() const;

private:
  TorusGrid grid_;
  std::vector<double> values_;
};

/// sum_cells (|grad_h u|^2 + delta^2)^{p/2} h^dim with the forward-difference
/// periodic gradient.
double p_dirichlet_energy(const TorusField& u, double p, double delta);

/// sum_cells |u|^s h^dim
double power_integral(const TorusField& u, double s);

/// Rescales u to unit discrete L^r norm. Throws ZeroField for u == 0.
TorusField lr_normalize(const TorusField& u, double r);

/// J_alpha(u) = (E_p(u) + alpha int u^p)(int u^q)^{p(1-theta)/(theta q)}.
double j_alpha(const TorusField& u, const GNParams& params, double alpha, double delta);

/// Gradient of j_alpha with respect to the cell values (includes the h^dim
/// factor, so it is the plain partial derivative of the discrete sum).
std::vector<double> j_alpha_gradient(const TorusField& u, const GNParams& params,
                                     double alpha, double delta);

struct MinimizerOptions {
  /// Gradient regularization; unset means 1e-8 for p < 2 and 0 for p = 2.
  std::optional<double> delta;
  int max_iterations = 100000;
  double rel_tol = 1e-10;
  double armijo_c1 = 1e-4;
  double backtrack = 0.5;
  double initial_step = 1e-3;
  /// Width s of the initial bump exp(-|x - x0|^2 / s^2), in units of L.
  double init_width = 0.15;
  /// Also descend from the fresh bump and compare with the constant field,
  /// keeping the lowest J (in addition to the warm start, when given).
  bool multistart = true;

  double resolved_delta(double p) const;
};

struct ConcentrationSample {
  double radius = 0.0;
  double fraction = 0.0;
};

struct MinimizerDiagnostics {
  double alpha = 0.0;
  double nu_alpha = 0.0;
  double A_alpha = 0.0;
  double B_alpha = 0.0;
  double mu_alpha = 0.0;
  double grad_energy = 0.0; // A_alpha int |grad u|^p
  double penalty = 0.0;     // alpha A_alpha int u^p
  double q_mass = 0.0;      // B_alpha int u^q
  std::size_t max_index = 0;
  std::vector<int> max_coords;
  std::vector<ConcentrationSample> concentration;
  int iterations = 0;
  bool converged = false;
  double final_step = 0.0;
  /// L^2 norm of the projected gradient of the scale-free quotient
  /// (discrete Euler-Lagrange residual).
  double residual = 0.0;
  double delta = 0.0;
  /// Which candidate won: "warm", "bump" or "constant".
  std::string origin;
};

struct MinimizerResult {
  TorusField field;
  MinimizerDiagnostics diagnostics;
};

/// Default concentration radii (multiples of L).
std::vector<double> default_concentration_radii();

/// Projected gradient descent for inf { J_alpha(u) : ||u||_r = 1, u >= 0 }.
/// Requires the theorem regime with r < p*, dim == params.n() in {2, 3},
/// alpha > 0. Non-convergence is reported through diagnostics.converged.
MinimizerResult minimize_j_alpha(const GNParams& params, const TorusGrid& grid, double alpha,
                                 const MinimizerOptions& options = {},
                                 const TorusField* warm_start = nullptr);

struct SweepTrend {
  bool nu_nondecreasing = false;            // within solver tolerance
  bool penalty_share_decreasing = false;    // over the top half of the sweep
  bool concentration_nondecreasing = false; // at radius 0.2 L, top half
};

struct SweepResult {
  std::vector<MinimizerDiagnostics> runs;
  std::vector<TorusField> minimizers;
  SweepTrend trend;
};

/// Runs minimize_j_alpha over strictly increasing alphas, warm-starting each
/// run from the previous minimizer.
SweepResult alpha_sweep(const GNParams& params, const TorusGrid& grid,
                        const std::vector<double>& alphas, const MinimizerOptions& options = {});

/// Fraction of int u^r inside periodic balls around the max cell.
std::vector<ConcentrationSample> concentration_profile(const TorusField& u, double r,
                                                       std::span<const double> radii);

/// penalty / nu_alpha
double penalty_share(const MinimizerDiagnostics& d);

/// Looks up the fraction at `radius` in d.concentration; NaN when absent.
double concentration_at(const MinimizerDiagnostics& d, double radius);

} // namespace gnopt
