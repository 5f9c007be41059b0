#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

#include "liouville/coefficients.hpp"
#include "liouville/continuation.hpp"
#include "liouville/errors.hpp"
#include "liouville/legendre.hpp"
#include "liouville/plane_transfer.hpp"
#include "liouville/spectral.hpp"

namespace liouville::cli {

namespace {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

const char* kExitCodes =
    "Exit codes:\n"
    "  0  success\n"
    "  1  usage error or parameter outside its domain\n"
    "  2  quadrature precision failure (per-row diagnostics printed)\n"
    "  3  Newton failure during continuation (partial branch saved)\n"
    "  4  restricted kernel is not one-dimensional\n"
    "  5  mismatch: table signs, fit vs quadrature sign, zero counts, masses or plane checks\n"
    "  6  file could not be read or written, or is malformed";

std::string num(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*e", digits, v);
  return buf;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f << text;
  if (!f) throw IoError("write to " + path + " failed");
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

// ---- mu2-table

struct TableArgs {
  int n_min = 3;
  int n_max = 10;
  std::string out;
  std::string format = "csv";
  int jobs = 0;
  QuadratureSpec quad;
};

int cmd_table(const TableArgs& a, std::ostream& out, std::ostream& err) {
  if (a.n_min < 1 || a.n_max > 60 || a.n_min > a.n_max) {
    err << "mu2-table: need 1 <= n-min <= n-max <= 60\n";
    return kUsage;
  }
  a.quad.validate();
  const auto rows = sign_table(a.n_min, a.n_max, a.quad, a.jobs);
  const std::string text = a.format == "json" ? sign_table_json(rows) : sign_table_csv(rows);
  std::ostream& summary = a.out.empty() ? err : out;
  if (a.out.empty()) {
    out << text;
  } else {
    write_file(a.out, text);
  }

  int failed = 0, compared = 0, matched = 0;
  std::vector<std::string> diffs;
  for (const auto& r : rows) {
    if (!r.ok()) {
      ++failed;
      summary << "row n=" << r.n << " m=" << r.m << " failed: " << r.error << "\n";
      continue;
    }
    const auto ref = reference_sign(r.n, r.m);
    if (!ref) continue;
    ++compared;
    if (*ref == r.sign) {
      ++matched;
    } else {
      diffs.push_back("n=" + std::to_string(r.n) + " m=" + std::to_string(r.m) + ": computed " +
                      sign_symbol(r.sign) + " (mu2 " + num(r.result.mu2) + " +- " +
                      num(r.result.error_estimate, 1) + "), reference " + sign_symbol(*ref));
    }
  }
  summary << "rows " << rows.size() << ", compared " << compared << ", matched " << matched << ", mismatched "
          << diffs.size() << ", failed " << failed << "\n";
  for (const auto& d : diffs) summary << "  " << d << "\n";
  if (failed > 0) return kPrecision;
  return diffs.empty() ? kOk : kMismatch;
}

// ---- branch

struct BranchArgs {
  int n = 3;
  int m = 2;
  std::string out;
  double fit_window = 0.0;
  ContinuationConfig cfg;
};

int sign_of(double v, double zero_tol) { return std::abs(v) <= zero_tol ? 0 : (v > 0 ? 1 : -1); }

int cmd_branch(const BranchArgs& a, std::ostream& out, std::ostream& err) {
  if (a.n < 1 || a.m < 0 || a.m > a.n) {
    err << "branch: need n >= 1 and 0 <= m <= n\n";
    return kUsage;
  }
  const SymmetryClass cls(a.n, a.m);
  std::optional<Branch> traced;
  try {
    traced = continue_branch(cls, a.cfg);
  } catch (const PreconditionError& e) {
    err << "branch refused: " << e.what() << "\n";
    return kPrecondition;
  }
  const Branch& b = *traced;
  const std::string path = a.out.empty() ? "branch_" + std::to_string(a.n) + "_" + std::to_string(a.m) + ".json" : a.out;
  write_file(path, branch_json(b));
  out << "branch " << cls.label() << ": " << b.points.size() << " points, eps in [" << num(b.points.front().eps, 4)
      << ", " << num(b.points.back().eps, 4) << "], written to " << path << "\n";
  if (!b.complete) {
    err << "continuation stopped: " << b.message << "\n";
    return kNewton;
  }

  int code = kOk;
  const CurvatureResult q = mu_second(a.n, a.m);
  try {
    const CurvatureFit fit = curvature_estimate(b.points, a.fit_window);
    const double tol = std::max(0.05 * std::abs(q.mu2_branch), 1e-4);
    out << "mu''(0): fit " << num(fit.mu2) << " (degree " << fit.degree << ", " << fit.points << " points, linear "
        << num(fit.linear, 2) << "), quadrature " << num(q.mu2_branch) << "\n";
    const bool same_sign = sign_of(fit.mu2, 1e-4) == sign_of(q.mu2_branch, 1e-4);
    out << "  difference " << num(std::abs(fit.mu2 - q.mu2_branch), 2) << ", "
        << (std::abs(fit.mu2 - q.mu2_branch) <= tol ? "within" : "outside") << " tolerance " << num(tol, 2)
        << ", signs " << (same_sign ? "agree" : "differ") << "\n";
    if (!same_sign) code = kMismatch;
  } catch (const DegeneracyError& e) {
    out << "mu''(0): fit unavailable (" << e.what() << "), quadrature " << num(q.mu2_branch) << "\n";
  }

  double worst_sphere = 0.0, worst_plane = 0.0;
  for (const auto& p : b.points) {
    const MassCheck mc = mass_check(p);
    const double four_pi = 4.0 * std::numbers::pi, plane = 8.0 * std::numbers::pi / (2.0 + p.mu);
    worst_sphere = std::max({worst_sphere, std::abs(mc.sphere1 - four_pi), std::abs(mc.sphere2 - four_pi)});
    worst_plane = std::max({worst_plane, std::abs(mc.plane1 - plane), std::abs(mc.plane2 - plane)});
  }
  out << "mass: max |sphere - 4 pi| " << num(worst_sphere, 2) << ", max |plane - 8 pi/(2+mu)| " << num(worst_plane, 2)
      << "\n";
  if (worst_sphere > 1e-6) code = kMismatch;

  if (a.m == 0) {
    int bad = 0, counted = 0;
    for (const auto& p : b.points) {
      if (p.eps == 0.0) continue;
      const ZeroCount zc = radial_zero_count(p);
      ++counted;
      if (zc.count != a.n || !zc.simple) ++bad;
    }
    out << "zero count: " << counted - bad << " of " << counted << " points have " << a.n << " simple zeros\n";
    if (bad > 0) code = kMismatch;
  }
  return code;
}

// ---- kernel

struct KernelArgs {
  int n = 0;
  double mu = std::numeric_limits<double>::quiet_NaN();
  int m = -1;
};

int cmd_kernel(const KernelArgs& a, std::ostream& out, std::ostream& err) {
  if ((a.n > 0) == !std::isnan(a.mu)) {
    err << "kernel: give exactly one of --n and --mu\n";
    return kUsage;
  }
  const double mu = a.n > 0 ? mu_n(a.n) : a.mu;
  const int level = bifurcation_level(mu);
  const auto basis = kernel_basis(mu);
  out << "mu = " << num(mu, 15);
  if (level > 0) out << " (mu_" << level << ")";
  out << "\nkernel dimension " << basis.size() << "\n";
  for (const auto& k : basis) out << "  " << k.describe() << "\n";
  if (a.m >= 0) {
    if (level < 1 || a.m > level) {
      err << "kernel: --m needs mu = mu_n and 0 <= m <= n\n";
      return kUsage;
    }
    const SymmetryClass cls(level, a.m);
    const auto restricted = restricted_kernel_basis(cls);
    out << "restricted to " << cls.label() << ": dimension " << restricted.size() << "\n";
    for (const auto& f : restricted) {
      for (const Mode& md : f.modes(2)) {
        if (f.coefficient(2, md.l, md.j) == 0.0) continue;
        out << "  phi2: P_" << md.l << "^" << md.j << "(z)";
        if (md.j > 0) out << " cos(" << md.j << " theta)";
        out << "\n";
      }
    }
  }
  return kOk;
}

// ---- validate-plane

struct PlaneArgs {
  std::string branch;
  int index = -1;
  std::string csv;
  std::string json;
  PlaneGridSpec grid;
};

int cmd_plane(const PlaneArgs& a, std::ostream& out, std::ostream& err) {
  const std::string text = read_file(a.branch);
  std::optional<Branch> loaded;
  try {
    loaded = branch_from_json(text);
  } catch (const DomainError& e) {
    throw IoError(a.branch + ": " + e.what());
  }
  const Branch& b = *loaded;
  if (b.points.empty()) throw IoError(a.branch + ": no points");
  const int count = static_cast<int>(b.points.size());
  const int idx = a.index < 0 ? count - 1 : a.index;
  if (idx >= count) {
    err << "validate-plane: index " << idx << " out of range, branch has " << count << " points\n";
    return kUsage;
  }
  const BranchPoint& p = b.points[idx];
  const PlaneSolution sol = to_plane(p, a.grid);
  const PlaneReport r = validate_plane(sol, p);
  if (!a.csv.empty()) write_file(a.csv, plane_csv(sol));
  if (!a.json.empty()) write_file(a.json, plane_json(sol, r));
  out << report_json(r) << "\n";
  const bool ok = r.rotation < 1e-7 && r.reflection < 1e-7 && r.inversion < 1e-7 && std::abs(r.slope1 + 4.0) < 1e-2 &&
                  std::abs(r.slope2 + 4.0) < 1e-2 && std::abs(r.mass1 - r.expected_mass) < 1e-6 * r.expected_mass &&
                  std::abs(r.mass2 - r.expected_mass) < 1e-6 * r.expected_mass;
  if (!ok) err << "validate-plane: checks failed at point " << idx << "\n";
  return ok ? kOk : kMismatch;
}

// ---- legendre

struct LegendreArgs {
  int l = 0;
  int m = 0;
  std::vector<double> z;
  std::string kind = "p";
};

int cmd_legendre(const LegendreArgs& a, std::ostream& out) {
  for (double z : a.z) {
    double v = 0.0;
    const LegendreIndex idx{a.l, a.m};
    if (a.kind == "p") {
      v = legendre_p(idx, z);
    } else if (a.kind == "normalized") {
      v = legendre_p_normalized(idx, z);
    } else {
      v = legendre_p_tilde(idx, z);
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << z << " " << buf << "\n";
  }
  return kOk;
}

// Applies key = value lines to options of app not set on the command line.
void apply_config(CLI::App* app, const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config file " + path);
  for (const CLI::ConfigItem& item : CLI::ConfigINI().from_config(f)) {
    const std::string key = item.name;
    if (key == "--" || key == "++") continue;  // section markers
    CLI::Option* opt = nullptr;
    try {
      opt = app->get_option("--" + key);
    } catch (const CLI::OptionNotFound&) {
      throw CLI::ConversionError(path + ": unknown key " + key);
    }
    if (opt->count() > 0) continue;
    for (const auto& v : item.inputs) opt->add_result(v);
    opt->run_callback();
  }
}

void add_quadrature_options(CLI::App* app, QuadratureSpec& q) {
  app->add_option("--panels", q.panel_count, "quadrature panels")->capture_default_str();
  app->add_option("--points-per-panel", q.points_per_panel, "Gauss points per panel")->capture_default_str();
  app->add_option("--finite-part-radius", q.finite_part_radius, "finite-part window radius")->capture_default_str();
  app->add_option("--abs-tol", q.abs_tol, "absolute refinement tolerance")->capture_default_str();
  app->add_option("--rel-tol", q.rel_tol, "relative refinement tolerance")->capture_default_str();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bifurcation analysis of the Liouville system on the sphere and the plane", "liouville"};
  app.footer(kExitCodes);
  app.require_subcommand(1);

  TableArgs table;
  auto* t = app.add_subcommand("mu2-table", "compute the sign table of mu''(0)");
  std::string table_config;
  t->add_option("--config", table_config, "key = value file overriding defaults");
  t->add_option("--n-min", table.n_min, "smallest n")->capture_default_str();
  t->add_option("--n-max", table.n_max, "largest n")->capture_default_str();
  t->add_option("--out", table.out, "output file (default: stdout)");
  t->add_option("--format", table.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  t->add_option("--jobs", table.jobs, "worker threads (0: all cores)")->envname("LIOUVILLE_JOBS")->capture_default_str();
  add_quadrature_options(t, table.quad);

  BranchArgs branch;
  auto* b = app.add_subcommand("branch", "continue the branch bifurcating from (mu_n, 0) in X(n, m)");
  std::string branch_config;
  b->add_option("--config", branch_config, "key = value file overriding defaults");
  b->add_option("--n", branch.n, "degree")->capture_default_str();
  b->add_option("--m", branch.m, "order")->capture_default_str();
  b->add_option("--out", branch.out, "branch JSON (default: branch_<n>_<m>.json)");
  b->add_option("--truncation,-L", branch.cfg.truncation, "maximal degree")->capture_default_str();
  b->add_option("--ds", branch.cfg.ds, "arclength step")->capture_default_str();
  b->add_option("--steps", branch.cfg.max_steps, "maximal steps per direction")->capture_default_str();
  b->add_option("--eps-max", branch.cfg.eps_max, "stop beyond this amplitude")->capture_default_str();
  b->add_option("--newton-tol", branch.cfg.newton_tol, "Newton tolerance")->capture_default_str();
  b->add_option("--newton-iters", branch.cfg.max_newton_iters, "Newton iterations per step")->capture_default_str();
  b->add_option("--z-grid", branch.cfg.z_grid, "z collocation points (0: default)")->capture_default_str();
  b->add_option("--theta-grid", branch.cfg.theta_grid, "theta collocation points (0: default)")->capture_default_str();
  b->add_option("--fit-window", branch.fit_window, "use |eps| <= window in the curvature fit (0: all)")
      ->capture_default_str();

  KernelArgs kernel;
  auto* k = app.add_subcommand("kernel", "print the kernel of the linearization at the trivial solution");
  k->add_option("--n", kernel.n, "use mu = mu_n");
  k->add_option("--mu", kernel.mu, "mass parameter in (-2, 2)");
  k->add_option("--m", kernel.m, "also print the kernel restricted to X(n, m)");

  PlaneArgs plane;
  auto* p = app.add_subcommand("validate-plane", "transfer a saved branch point to the plane and check it");
  std::string plane_config;
  p->add_option("--config", plane_config, "key = value file overriding defaults");
  p->add_option("--branch", plane.branch, "branch JSON written by the branch command")->required();
  p->add_option("--index", plane.index, "point index in the file (default: last)");
  p->add_option("--csv", plane.csv, "write the plane solution as CSV");
  p->add_option("--json", plane.json, "write the plane solution and report as JSON");
  p->add_option("--half-count", plane.grid.half_count, "radial points on each side of sqrt(8)")->capture_default_str();
  p->add_option("--r-max", plane.grid.r_max, "outer radius")->capture_default_str();
  p->add_option("--theta-count", plane.grid.theta_count, "angular points (0: default)")->capture_default_str();

  LegendreArgs leg;
  auto* l = app.add_subcommand("legendre", "evaluate associated Legendre functions");
  l->add_option("--l", leg.l, "degree")->required();
  l->add_option("--m", leg.m, "order")->capture_default_str();
  l->add_option("--z", leg.z, "evaluation points in [-1, 1]")->required();
  l->add_option("--kind", leg.kind, "p, normalized or tilde")
      ->check(CLI::IsMember({"p", "normalized", "tilde"}))
      ->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
    if (!table_config.empty()) apply_config(t, table_config);
    if (!branch_config.empty()) apply_config(b, branch_config);
    if (!plane_config.empty()) apply_config(p, plane_config);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*t) return cmd_table(table, out, err);
    if (*b) return cmd_branch(branch, out, err);
    if (*k) return cmd_kernel(kernel, out, err);
    if (*p) return cmd_plane(plane, out, err);
    return cmd_legendre(leg, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const PrecisionError& e) {
    err << "precision failure: " << e.what() << "\n";
    return kPrecision;
  } catch (const PreconditionError& e) {
    err << "precondition failed: " << e.what() << "\n";
    return kPrecondition;
  } catch (const ConvergenceError& e) {
    err << "Newton failure: " << e.what() << "\n";
    return kNewton;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace liouville::cli
