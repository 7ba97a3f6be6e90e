#include "gnopt/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <ostream>
#include <sstream>
#include <unistd.h>

#include "gnopt/best_constant.hpp"
#include "gnopt/params.hpp"
#include "gnopt/profile.hpp"
#include "gnopt/radial_quad.hpp"
#include "gnopt/torus.hpp"

namespace gnopt::cli {

using nlohmann::ordered_json;

namespace fs = std::filesystem;

std::string format_number(double x) {
  if (std::isnan(x))
    return "NA";
  if (std::isinf(x))
    return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

double round_number(double x) {
  if (!std::isfinite(x))
    return x;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

std::string format_exact(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos)
    return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

double parse_double(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size())
      throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw DomainError("cannot parse " + what + " from '" + text + "'");
  }
}

ordered_json number(double x) {
  if (!std::isfinite(x))
    return nullptr;
  return round_number(x);
}

} // namespace

std::vector<double> parse_number_list(std::string_view text) {
  std::vector<double> out;
  std::string item;
  std::istringstream in{std::string(text)};
  while (std::getline(in, item, ',')) {
    const std::string t = trim(item);
    if (t.empty())
      continue;
    out.push_back(parse_double(t, "number list entry"));
  }
  return out;
}

RunConfig parse_config_text(std::string_view text) {
  const std::string body = trim(text);
  RunConfig config;
  if (!body.empty() && body.front() == '{') {
    ordered_json doc;
    try {
      doc = ordered_json::parse(body);
    } catch (const std::exception& e) {
      throw IoError(std::string("malformed JSON config: ") + e.what());
    }
    if (!doc.contains("config") || !doc["config"].is_object())
      throw IoError("JSON config has no \"config\" object");
    for (const auto& [key, value] : doc["config"].items())
      config.emplace_back(key, value.is_string() ? value.get<std::string>() : value.dump());
    return config;
  }
  // A CSV artifact replays from its embedded "# config:" lines alone.
  constexpr std::string_view kEmbedded = "# config:";
  const bool artifact = text.rfind(kEmbedded, 0) == 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t.rfind(kEmbedded, 0) == 0)
      t = trim(std::string_view(t).substr(kEmbedded.size()));
    else if (artifact || t.empty() || t.front() == '#')
      continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw IoError("config line without '=': " + t);
    config.emplace_back(trim(std::string_view(t).substr(0, eq)),
                        trim(std::string_view(t).substr(eq + 1)));
  }
  return config;
}

RunConfig read_config_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void write_atomically(const fs::path& path, std::string_view content) {
  const fs::path tmp = path.string() + ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw IoError("cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("cannot write " + path.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move output into place at " + path.string());
  }
}

fs::path default_output_dir() {
  if (const char* dir = std::getenv("GNOPT_OUTPUT_DIR"); dir && *dir)
    return dir;
  return ".";
}

namespace {

std::string to_text(const std::string& s) { return s; }
std::string to_text(double x) { return format_exact(x); }
std::string to_text(int x) { return std::to_string(x); }
std::string to_text(std::uint64_t x) { return std::to_string(x); }
std::string to_text(bool x) { return x ? "true" : "false"; }

/// Registers options and remembers how to print their resolved values.
class OptionBook {
public:
  OptionBook(CLI::App* app, std::string command) : app_(app), command_(std::move(command)) {}

  template <class T>
  CLI::Option* add(const std::string& name, T& var, const std::string& help) {
    entries_.emplace_back(name, [&var] { return to_text(var); });
    return app_->add_option("--" + name, var, help)->capture_default_str();
  }

  CLI::Option* flag(const std::string& name, bool& var, const std::string& help) {
    entries_.emplace_back(name, [&var] { return to_text(var); });
    return app_->add_flag("--" + name, var, help);
  }

  RunConfig resolve() const {
    RunConfig out{{"command", command_}};
    for (const auto& [key, fn] : entries_)
      out.emplace_back(key, fn());
    return out;
  }

  CLI::App* app() const { return app_; }

private:
  CLI::App* app_;
  std::string command_;
  std::vector<std::pair<std::string, std::function<std::string()>>> entries_;
};

ordered_json config_json(const RunConfig& config) {
  ordered_json j = ordered_json::object();
  for (const auto& [k, v] : config)
    j[k] = v;
  return j;
}

std::string config_comment(const RunConfig& config) {
  std::string s;
  for (const auto& [k, v] : config)
    s += "# config: " + k + "=" + v + "\n";
  return s;
}

ordered_json params_json(const GNParams& params) {
  return {{"n", params.n()},
          {"p", number(params.p())},
          {"q", number(params.q())},
          {"r", number(params.r())},
          {"theta", number(params.theta())},
          {"p_star", number(params.p_star())},
          {"regime", std::string(to_string(params.regime()))}};
}

// Relative output paths land in the output directory.
fs::path resolve_out(const std::string& given, const std::string& fallback) {
  if (given == "-")
    return given;
  const fs::path path = given.empty() ? fs::path(fallback) : fs::path(given);
  return path.is_absolute() ? path : default_output_dir() / path;
}

void emit(const std::string& target, const std::string& content, std::ostream& out) {
  if (target == "-")
    out << content;
  else
    write_atomically(target, content);
}

// ---- quadrature flags shared by verify, moments and blowup -----------------

struct QuadratureFlags {
  int order = 16;
  int panels = 64;
  double radius = 1e4;
  double target_rel_err = 1e-8;
  std::string tail = "power";

  void attach(OptionBook& book) {
    book.add("order", order, "Gauss-Legendre order per panel");
    book.add("panels", panels, "initial panel count");
    book.add("radius", radius, "truncation radius R");
    book.add("target-rel-err", target_rel_err, "target relative error");
    book.add("tail", tail, "tail model: power | drop")
        ->check(CLI::IsMember({"power", "drop"}));
  }

  QuadratureScheme scheme() const {
    QuadratureScheme s;
    s.order = order;
    s.panels = panels;
    s.truncation_radius = radius;
    s.target_rel_err = target_rel_err;
    s.tail_model = tail == "drop" ? TailModel::Drop : TailModel::PowerLawCorrection;
    s.max_panels = std::max(s.max_panels, panels);
    s.validate();
    return s;
  }
};

ordered_json estimate_json(const Estimate& e) {
  return {{"value", number(e.value)}, {"abs_error", number(e.abs_error)}};
}

// ---- constants ---------------------------------------------------------------

struct ConstantsCmd {
  int n = 0;
  double p = 0, q = 0;
  std::string r;
  std::string format = "text";
  std::uint64_t seed = 0;

  void attach(OptionBook& b) {
    b.add("n", n, "dimension")->required();
    b.add("p", p, "gradient exponent")->required();
    b.add("q", q, "L^q exponent")->required();
    b.add("r", r, "L^r exponent (default p(q-1)/(p-1))");
    b.add("format", format, "text | json")->check(CLI::IsMember({"text", "json"}));
    b.add("seed", seed, "recorded for provenance");
  }

  int run(const RunConfig& config, std::ostream& out) const {
    const double r_dpd = dpd_r(p, q);
    const GNParams params = r.empty() ? validate_params(n, p, q)
                                      : validate_params(n, p, q, parse_double(r, "r"));
    const bool family = in_dpd_family(params);
    const double a = family ? closed_form_A(params) : std::numeric_limits<double>::quiet_NaN();
    if (format == "json") {
      ordered_json j;
      j["config"] = config_json(config);
      j["seed"] = seed;
      j["theta"] = number(params.theta());
      j["p_star"] = number(params.p_star());
      j["regime"] = std::string(to_string(params.regime()));
      j["r_dpd"] = number(r_dpd);
      j["A"] = number(a);
      j["params"] = params_json(params);
      out << j.dump(2) << "\n";
    } else {
      out << "n       = " << params.n() << "\n"
          << "p       = " << format_number(params.p()) << "\n"
          << "q       = " << format_number(params.q()) << "\n"
          << "r       = " << format_number(params.r()) << "\n"
          << "theta   = " << format_number(params.theta()) << "\n"
          << "p_star  = " << format_number(params.p_star()) << "\n"
          << "regime  = " << to_string(params.regime()) << "\n"
          << "r_dpd   = " << format_number(r_dpd) << "\n"
          << "A       = " << (family ? format_number(a) : "NA (outside the closed-form family)")
          << "\n";
    }
    return kSuccess;
  }
};

// ---- extremal ----------------------------------------------------------------

struct ExtremalCmd {
  int n = 0;
  double p = 0, q = 0;
  std::string rho = "grid";
  double rho_max = 10.0;
  int rho_steps = 101;
  std::string out;
  std::uint64_t seed = 0;

  void attach(OptionBook& b) {
    b.add("n", n, "dimension")->required();
    b.add("p", p, "gradient exponent")->required();
    b.add("q", q, "L^q exponent")->required();
    b.add("rho", rho, "comma-separated radii, or 'grid' for an even grid on [0, rho-max]");
    b.add("rho-max", rho_max, "grid end");
    b.add("rho-steps", rho_steps, "grid points");
    b.add("out", out, "CSV path (default $GNOPT_OUTPUT_DIR/extremal.csv)");
    b.add("seed", seed, "recorded for provenance");
  }

  int run(const RunConfig& config, std::ostream& os) const {
    const GNParams params = validate_params(n, p, q);
    const RadialProfile w = extremal_profile(params);
    std::vector<double> radii;
    if (rho == "grid") {
      if (rho_steps < 1)
        throw DomainError("rho-steps must be >= 1");
      for (int i = 0; i < rho_steps; ++i)
        radii.push_back(rho_steps == 1 ? 0.0 : rho_max * i / (rho_steps - 1));
    } else {
      radii = parse_number_list(rho);
    }
    std::string csv = config_comment(config) + "rho,w,dw\n";
    for (double x : radii) {
      if (!(x >= 0.0))
        throw DomainError("radii must be >= 0");
      csv += format_number(x) + "," + format_number(w.evaluate(x)) + "," +
             format_number(w.evaluate_derivative(x)) + "\n";
    }
    const fs::path path = resolve_out(out, "extremal.csv");
    emit(path.string(), csv, os);
    return kSuccess;
  }
};

// ---- verify ------------------------------------------------------------------

struct VerifyCmd {
  int n = 0;
  double p = 0, q = 0;
  QuadratureFlags quad;
  int perturbations = 20;
  double eps = 1e-4;
  std::uint64_t seed = 20240601;
  std::string out = "-";

  void attach(OptionBook& b) {
    b.add("n", n, "dimension")->required();
    b.add("p", p, "gradient exponent")->required();
    b.add("q", q, "L^q exponent")->required();
    quad.attach(b);
    b.add("perturbations", perturbations, "number of seeded radial bumps");
    b.add("eps", eps, "perturbation size");
    b.add("seed", seed, "seed of the first perturbation");
    b.add("out", out, "JSON path, '-' for stdout");
  }

  int run(const RunConfig& config, std::ostream& os) const {
    const GNParams params = validate_params(n, p, q);
    ExtremalityReport report;
    int code = kSuccess;
    try {
      report = verify_extremality(params, quad.scheme(), perturbations, {eps, seed});
    } catch (const ExtremalityViolated& e) {
      report = e.report();
      code = kExtremalityViolated;
    }
    ordered_json j;
    j["config"] = config_json(config);
    j["seed"] = seed;
    j["params"] = params_json(params);
    j["best_constant"] = number(report.best_constant);
    j["q_extremal"] = estimate_json(report.q_extremal);
    j["gap"] = number(report.gap);
    j["gap_tolerance"] = number(report.gap_tolerance);
    j["minimality_tolerance"] = number(report.minimality_tolerance);
    j["derivative_tolerance"] = number(report.derivative_tolerance);
    j["eps"] = number(report.eps);
    ordered_json list = ordered_json::array();
    for (const auto& pr : report.perturbations)
      list.push_back({{"seed", pr.seed},
                      {"support", {number(pr.support_begin), number(pr.support_end)}},
                      {"amplitude", number(pr.amplitude)},
                      {"q_plus", number(pr.q_plus)},
                      {"q_minus", number(pr.q_minus)},
                      {"gateaux", number(pr.gateaux)},
                      {"minimal_ok", pr.minimal_ok},
                      {"derivative_ok", pr.derivative_ok}});
    j["perturbations"] = list;
    j["passed"] = report.passed;
    emit(resolve_out(out, "-").string(), j.dump(2) + "\n", os);
    return code;
  }
};

// ---- moments -----------------------------------------------------------------

struct MomentsCmd {
  int n = 0;
  double p = 0, q = 0;
  QuadratureFlags quad;
  std::uint64_t seed = 0;
  std::string out = "-";

  void attach(OptionBook& b) {
    b.add("n", n, "dimension")->required();
    b.add("p", p, "gradient exponent")->required();
    b.add("q", q, "L^q exponent")->required();
    quad.attach(b);
    b.add("seed", seed, "recorded for provenance");
    b.add("out", out, "JSON path, '-' for stdout");
  }

  int run(const RunConfig& config, std::ostream& os) const {
    const GNParams params = validate_params(n, p, q);
    const auto m = moments(params, quad.scheme());
    ordered_json j;
    j["config"] = config_json(config);
    j["seed"] = seed;
    j["params"] = params_json(params);
    for (int k = 1; k <= 5; ++k)
      j["I" + std::to_string(k)] = estimate_json(m[k]);
    emit(resolve_out(out, "-").string(), j.dump(2) + "\n", os);
    return kSuccess;
  }
};

// ---- blowup ------------------------------------------------------------------

struct BlowupCmd {
  int n = 0;
  double p_min = 0, p_max = 0;
  int steps = 20;
  std::string q = "mid";
  QuadratureFlags quad;
  std::uint64_t seed = 0;
  std::string out;

  void attach(OptionBook& b) {
    b.add("n", n, "dimension")->required();
    b.add("p-min", p_min, "first p")->required();
    b.add("p-max", p_max, "last p")->required();
    b.add("steps", steps, "number of p values");
    b.add("q", q, "fixed q, or 'mid' for the midpoint of (p, p(n-1)/(n-p))");
    quad.attach(b);
    b.add("seed", seed, "recorded for provenance");
    b.add("out", out, "CSV path (default $GNOPT_OUTPUT_DIR/blowup.csv)");
  }

  int run(const RunConfig& config, std::ostream& os) const {
    if (steps < 1)
      throw DomainError("steps must be >= 1");
    const QuadratureScheme scheme = quad.scheme();
    const bool mid = q == "mid";
    const double fixed_q = mid ? 0.0 : parse_double(q, "q");

    std::string csv = config_comment(config) + "p,q,r,theta,I1,I2,I3,I4,I5,bracket,in_regime,reason\n";
    int in_regime_rows = 0;
    bool all_positive = true;
    for (int i = 0; i < steps; ++i) {
      const double pv = steps == 1 ? p_min : p_min + (p_max - p_min) * i / (steps - 1);
      const double qv = mid ? 0.5 * (pv + dpd_q_upper(n, pv)) : fixed_q;
      std::string row;
      try {
        const GNParams params = validate_params(n, pv, qv);
        const bool in_regime = params.regime() == Regime::BlowupNonvalidity;
        row = format_number(pv) + "," + format_number(qv) + "," + format_number(params.r()) + "," +
              format_number(params.theta()) + ",";
        try {
          const auto eval = evaluate_blowup(params, scheme);
          for (int k = 1; k <= 5; ++k)
            row += format_number(eval.moments[k].value) + ",";
          row += format_number(eval.bracket) + "," + (in_regime ? "true" : "false") + ",";
          if (in_regime) {
            ++in_regime_rows;
            all_positive = all_positive && eval.bracket > 0.0;
          }
        } catch (const Error& e) {
          row += "NA,NA,NA,NA,NA,NA,";
          row += std::string(in_regime ? "true" : "false") + "," + csv_field(e.what());
          if (in_regime) {
            ++in_regime_rows;
            all_positive = false;
          }
        }
      } catch (const DomainError& e) {
        row = format_number(pv) + "," + format_number(qv) + ",NA,NA,NA,NA,NA,NA,NA,NA,false," +
              csv_field(e.what());
      }
      csv += row + "\n";
    }
    const fs::path path = resolve_out(out, "blowup.csv");
    emit(path.string(), csv, os);
    if (path.string() != "-")
      os << "blowup: " << in_regime_rows << " in-regime rows; bracket > 0 on all: "
         << (all_positive ? "true" : "false") << "\n";
    return kSuccess;
  }

  static std::string csv_field(std::string text) {
    std::replace(text.begin(), text.end(), '"', '\'');
    return "\"" + text + "\"";
  }
};

// ---- simulate / sweep ----------------------------------------------------------

struct SimulationFlags {
  int n = 2;
  double p = 2, q = 2, r = 3;
  int grid = 64;
  int max_iterations = 100000;
  double rel_tol = 1e-10;
  std::string delta = "auto";
  double init_width = 0.15;
  bool multistart = true;
  bool strict = false;
  std::uint64_t seed = 0;

  void attach(OptionBook& b) {
    b.add("n", n, "torus dimension (2 or 3)");
    b.add("p", p, "gradient exponent");
    b.add("q", q, "L^q exponent");
    b.add("r", r, "L^r exponent (< p*)");
    b.add("N", grid, "grid points per side");
    b.add("max-iterations", max_iterations, "iteration cap per descent");
    b.add("rel-tol", rel_tol, "stop when the relative change of J falls below this");
    b.add("delta", delta, "gradient regularization, or 'auto'");
    b.add("init-width", init_width, "width of the initial bump in units of L");
    b.add("multistart", multistart, "also try the fresh bump and the constant field");
    b.flag("strict", strict, "exit 5 when any run fails to converge");
    b.add("seed", seed, "recorded for provenance; the solver is deterministic");
  }

  MinimizerOptions options() const {
    MinimizerOptions o;
    o.max_iterations = max_iterations;
    o.rel_tol = rel_tol;
    o.init_width = init_width;
    o.multistart = multistart;
    if (delta != "auto")
      o.delta = parse_double(delta, "delta");
    return o;
  }
};

ordered_json diagnostics_json(const MinimizerDiagnostics& d) {
  ordered_json conc = ordered_json::array();
  for (const auto& s : d.concentration)
    conc.push_back({{"radius", number(s.radius)}, {"fraction", number(s.fraction)}});
  return {{"alpha", number(d.alpha)},
          {"nu_alpha", number(d.nu_alpha)},
          {"A_alpha", number(d.A_alpha)},
          {"B_alpha", number(d.B_alpha)},
          {"mu_alpha", number(d.mu_alpha)},
          {"grad_energy", number(d.grad_energy)},
          {"penalty", number(d.penalty)},
          {"q_mass", number(d.q_mass)},
          {"max_index", d.max_coords},
          {"concentration", conc},
          {"iterations", d.iterations},
          {"converged", d.converged},
          {"final_step", number(d.final_step)},
          {"residual", number(d.residual)},
          {"delta", number(d.delta)},
          {"origin", d.origin}};
}

std::string sweep_csv(const RunConfig& config, const std::vector<MinimizerDiagnostics>& runs) {
  std::string csv = config_comment(config) + "alpha,nu_alpha,grad_energy,penalty,q_mass,conc_r02\n";
  for (const auto& d : runs)
    csv += format_number(d.alpha) + "," + format_number(d.nu_alpha) + "," +
           format_number(d.grad_energy) + "," + format_number(d.penalty) + "," +
           format_number(d.q_mass) + "," + format_number(concentration_at(d, 0.2)) + "\n";
  return csv;
}

struct SimulateCmd {
  SimulationFlags sim;
  std::string alphas = "1";
  bool sweep = false;
  std::string out_json, out_csv;

  void attach(OptionBook& b) {
    sim.attach(b);
    if (sweep)
      b.add("alphas", alphas, "comma-separated, strictly increasing");
    else
      b.add("alpha", alphas, "penalty alpha");
    b.add("out-json", out_json, "JSON path (default $GNOPT_OUTPUT_DIR/<command>.json)");
    b.add("out-csv", out_csv, "CSV path (default $GNOPT_OUTPUT_DIR/<command>.csv)");
  }

  int run(const RunConfig& config, std::ostream& os) const {
    const GNParams params = validate_params(sim.n, sim.p, sim.q, sim.r);
    const TorusGrid grid(sim.n, sim.grid);
    const auto values = parse_number_list(alphas);
    if (!sweep && values.size() != 1)
      throw DomainError("simulate takes exactly one alpha");

    const SweepResult result = alpha_sweep(params, grid, values, sim.options());

    const std::string name = sweep ? "sweep" : "simulate";
    ordered_json j;
    j["config"] = config_json(config);
    j["seed"] = sim.seed;
    j["params"] = params_json(params);
    j["grid"] = {{"dim", grid.dim()}, {"N", grid.points_per_side()}, {"h", number(grid.spacing())}};
    ordered_json runs = ordered_json::array();
    for (const auto& d : result.runs)
      runs.push_back(diagnostics_json(d));
    j["runs"] = runs;
    if (sweep)
      j["trend"] = {{"nu_nondecreasing", result.trend.nu_nondecreasing},
                    {"penalty_share_decreasing", result.trend.penalty_share_decreasing},
                    {"concentration_nondecreasing", result.trend.concentration_nondecreasing}};

    emit(resolve_out(out_json, name + ".json").string(), j.dump(2) + "\n", os);
    emit(resolve_out(out_csv, name + ".csv").string(), sweep_csv(config, result.runs), os);

    bool all_converged = true;
    for (const auto& d : result.runs) {
      all_converged = all_converged && d.converged;
      os << name << ": alpha=" << format_number(d.alpha) << " nu=" << format_number(d.nu_alpha)
         << " share=" << format_number(penalty_share(d))
         << " conc(0.2)=" << format_number(concentration_at(d, 0.2)) << " origin=" << d.origin
         << (d.converged ? "" : " NOT CONVERGED") << "\n";
    }
    return sim.strict && !all_converged ? kNotConverged : kSuccess;
  }
};

// Moves --config out of args and splices its entries in front of the
// command-line flags, so flags given explicitly take precedence.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> rest;
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "--config") {
      if (i + 1 >= args.size())
        throw DomainError("--config needs a path");
      config_path = args[++i];
    } else if (a.rfind("--config=", 0) == 0) {
      config_path = a.substr(9);
    } else {
      rest.push_back(a);
    }
  }
  if (config_path.empty())
    return rest;

  const RunConfig config = read_config_file(config_path);
  std::string command;
  std::vector<std::string> injected;
  for (const auto& [key, value] : config) {
    if (key == "command")
      command = value;
    else
      injected.push_back("--" + key + "=" + value);
  }
  auto sub = std::find_if(rest.begin(), rest.end(), [](const std::string& s) { return s.rfind("-", 0) != 0; });
  if (sub == rest.end()) {
    if (command.empty())
      throw DomainError("no subcommand given and the config names none");
    rest.insert(rest.begin(), command);
    sub = rest.begin();
  } else if (!command.empty() && *sub != command) {
    throw DomainError("config is for '" + command + "', not '" + *sub + "'");
  }
  rest.insert(sub + 1, injected.begin(), injected.end());
  return rest;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gagliardo-Nirenberg best constants, extremals and penalized torus minimizers",
               "gnopt"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "key=value config file (flags win)");

  ConstantsCmd constants;
  ExtremalCmd extremal;
  VerifyCmd verify;
  MomentsCmd moments_cmd;
  BlowupCmd blowup;
  SimulateCmd simulate;
  SimulateCmd sweep;
  sweep.sweep = true;
  sweep.alphas = "1,10,100,1000";

  std::vector<std::unique_ptr<OptionBook>> books;
  auto book = [&](const char* name, const char* help) {
    books.push_back(std::make_unique<OptionBook>(app.add_subcommand(name, help), name));
    return books.back().get();
  };
  OptionBook* b_constants = book("constants", "theta, p*, regime and the closed-form constant");
  OptionBook* b_extremal = book("extremal", "tabulate the extremal profile w and w' as CSV");
  OptionBook* b_verify = book("verify", "check Q(w) A = 1 and probe w with seeded perturbations");
  OptionBook* b_moments = book("moments", "the weighted moments I1..I5 of the extremal");
  OptionBook* b_blowup = book("blowup", "blow-up coefficient over a grid of p values");
  OptionBook* b_simulate = book("simulate", "minimize J_alpha on the flat torus for one alpha");
  OptionBook* b_sweep = book("sweep", "warm-started alpha sweep of torus minimizers");
  constants.attach(*b_constants);
  extremal.attach(*b_extremal);
  verify.attach(*b_verify);
  moments_cmd.attach(*b_moments);
  blowup.attach(*b_blowup);
  simulate.attach(*b_simulate);
  sweep.attach(*b_sweep);

  try {
    std::vector<std::string> argv = expand_config(args);
    std::reverse(argv.begin(), argv.end());
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return e.get_exit_code() == 0 ? kSuccess : kDomainError;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kDomainError;
  }

  try {
    if (b_constants->app()->parsed())
      return constants.run(b_constants->resolve(), out);
    if (b_extremal->app()->parsed())
      return extremal.run(b_extremal->resolve(), out);
    if (b_verify->app()->parsed())
      return verify.run(b_verify->resolve(), out);
    if (b_moments->app()->parsed())
      return moments_cmd.run(b_moments->resolve(), out);
    if (b_blowup->app()->parsed())
      return blowup.run(b_blowup->resolve(), out);
    if (b_simulate->app()->parsed())
      return simulate.run(b_simulate->resolve(), out);
    if (b_sweep->app()->parsed())
      return sweep.run(b_sweep->resolve(), out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kDomainError;
  }
  return kDomainError;
}

} // namespace gnopt::cli
