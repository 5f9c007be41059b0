#include "liouville/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <numbers>
#include <sstream>

#include "liouville/errors.hpp"
#include "liouville/legendre.hpp"

namespace liouville {

namespace {

int default_theta_grid(const SymmetryClass& cls, int L) {
  if (cls.m() == 0) return 1;
  const int step = 2 * cls.m();
  const int want = 3 * L + 4;
  return ((want + step - 1) / step) * step;
}

// index of the kernel mode (n, m) of component 2 inside the packed vector
int kernel_slot(const SphereField& f) {
  const SymmetryClass& c = f.symmetry();
  const int i = f.index_of(2, c.n(), c.m());
  if (i < 0) throw DomainError("truncation below the kernel degree");
  return static_cast<int>(f.coefficients(1).size()) + i;
}

double kernel_scale(const SymmetryClass& c) { return 2.0 * std::sqrt(legendre_norm({c.n(), c.m()})); }

}  // namespace

GalerkinSystem::GalerkinSystem(SymmetryClass cls, int L, int z_grid, int theta_grid)
    : cls_(cls), L_(L) {
  if (L < cls.n()) throw DomainError("truncation must be at least n");
  const int nz = z_grid > 0 ? z_grid : 2 * L + 4;
  const int nt = theta_grid > 0 ? theta_grid : default_theta_grid(cls, L);
  if (2 * nz < 3 * L + 2) {
    throw ResolutionError("z grid too coarse for truncation " + std::to_string(L));
  }
  if (cls.m() > 0 && (nt < 3 * L || nt % (2 * cls.m()) != 0)) {
    throw ResolutionError("theta grid must be a multiple of 2m and at least 3L");
  }
  grid_ = make_sphere_grid(nz, nt);
  b1_ = make_mode_basis(cls.modes(1, L), grid_);
  b2_ = make_mode_basis(cls.modes(2, L), grid_);
}

SphereField GalerkinSystem::field(const Eigen::VectorXd& x) const {
  return SphereField(cls_, L_).with_packed(x);
}

Eigen::VectorXd GalerkinSystem::residual(double mu, const Eigen::VectorXd& x) const {
  if (x.size() != size()) throw DomainError("state size mismatch");
  const double lam = lambda_of_mu(mu);
  const int n1 = size1();
  const Eigen::VectorXd c1 = x.head(n1), c2 = x.tail(x.size() - n1);
  const Eigen::VectorXd p1 = b1_.synth * c1, p2 = b2_.synth * c2;
  const Eigen::ArrayXd ea = (0.5 * (p1 + p2)).array().exp();
  const Eigen::ArrayXd eb = (0.5 * (p1 - p2)).array().exp();
  Eigen::VectorXd F(x.size());
  F.head(n1) = -b1_.degree.cwiseProduct(c1) + b1_.analysis * (2.0 * (ea + eb - 2.0)).matrix();
  F.tail(x.size() - n1) = -b2_.degree.cwiseProduct(c2) + b2_.analysis * (lam * (ea - eb)).matrix();
  return F;
}

SphereField GalerkinSystem::residual(double mu, const SphereField& f) const {
  if (!(f.symmetry() == cls_) || f.truncation() != L_) throw DomainError("field does not match the system");
  return f.with_packed(residual(mu, f.packed()));
}

GalerkinSystem::Linearization GalerkinSystem::linearize(double mu, const Eigen::VectorXd& x) const {
  const double lam = lambda_of_mu(mu);
  const int n1 = size1(), n2 = size() - n1;
  const Eigen::VectorXd c1 = x.head(n1), c2 = x.tail(n2);
  const Eigen::VectorXd p1 = b1_.synth * c1, p2 = b2_.synth * c2;
  const Eigen::ArrayXd ea = (0.5 * (p1 + p2)).array().exp();
  const Eigen::ArrayXd eb = (0.5 * (p1 - p2)).array().exp();
  const Eigen::ArrayXd sum = ea + eb, diff = ea - eb;

  Linearization L;
  L.F.resize(size());
  L.F.head(n1) = -b1_.degree.cwiseProduct(c1) + b1_.analysis * (2.0 * (sum - 2.0)).matrix();
  L.F.tail(n2) = -b2_.degree.cwiseProduct(c2) + b2_.analysis * (lam * diff).matrix();

  auto weighted = [](const Eigen::MatrixXd& A, const Eigen::ArrayXd& d, const Eigen::MatrixXd& B) {
    return Eigen::MatrixXd(A * (d.matrix().asDiagonal() * B));
  };
  L.Jx.resize(size(), size());
  L.Jx.block(0, 0, n1, n1) = weighted(b1_.analysis, sum, b1_.synth);
  L.Jx.block(0, 0, n1, n1).diagonal() -= b1_.degree;
  L.Jx.block(0, n1, n1, n2) = weighted(b1_.analysis, diff, b2_.synth);
  L.Jx.block(n1, 0, n2, n1) = weighted(b2_.analysis, 0.5 * lam * diff, b1_.synth);
  L.Jx.block(n1, n1, n2, n2) = weighted(b2_.analysis, 0.5 * lam * sum, b2_.synth);
  L.Jx.block(n1, n1, n2, n2).diagonal() -= b2_.degree;
  L.Jmu = Eigen::VectorXd::Zero(size());
  L.Jmu.tail(n2) = lambda_prime(mu) * (b2_.analysis * diff.matrix());
  return L;
}

GalerkinSystem::Linearization GalerkinSystem::linearize_fd(double mu, const Eigen::VectorXd& x,
                                                           double h) const {
  Linearization L;
  L.F = residual(mu, x);
  L.Jx.resize(size(), size());
  for (int k = 0; k < size(); ++k) {
    Eigen::VectorXd xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    L.Jx.col(k) = (residual(mu, xp) - residual(mu, xm)) / (2.0 * h);
  }
  L.Jmu = (residual(mu + h, x) - residual(mu - h, x)) / (2.0 * h);
  return L;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> GalerkinSystem::grid_residual(double mu,
                                                                          const Eigen::VectorXd& x) const {
  const double lam = lambda_of_mu(mu);
  const int n1 = size1();
  const Eigen::VectorXd c1 = x.head(n1), c2 = x.tail(x.size() - n1);
  const Eigen::VectorXd p1 = b1_.synth * c1, p2 = b2_.synth * c2;
  const Eigen::ArrayXd ea = (0.5 * (p1 + p2)).array().exp();
  const Eigen::ArrayXd eb = (0.5 * (p1 - p2)).array().exp();
  Eigen::VectorXd r1 = -(b1_.synth * b1_.degree.cwiseProduct(c1)) + (2.0 * (ea + eb - 2.0)).matrix();
  Eigen::VectorXd r2 = -(b2_.synth * b2_.degree.cwiseProduct(c2)) + (lam * (ea - eb)).matrix();
  return {r1, r2};
}

void ContinuationConfig::validate() const {
  if (truncation < 1) throw DomainError("truncation must be positive");
  if (!(ds > 0.0)) throw DomainError("ds must be positive");
  if (max_steps < 1) throw DomainError("max_steps must be positive");
  if (!(newton_tol > 0.0)) throw DomainError("newton_tol must be positive");
  if (max_newton_iters < 1) throw DomainError("max_newton_iters must be positive");
  if (!(eps_max > 0.0)) throw DomainError("eps_max must be positive");
}

double amplitude(const SphereField& f) {
  const SymmetryClass& c = f.symmetry();
  return f.coefficient(2, c.n(), c.m()) / kernel_scale(c);
}

namespace {

struct NewtonOutcome {
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;
};

// Newton on F(x, mu) = 0 plus one linear constraint row . (x, mu) = target.
NewtonOutcome bordered_newton(const GalerkinSystem& sys, Eigen::VectorXd& X, const Eigen::VectorXd& row,
                              double target, double tol, int max_iters) {
  const int N = sys.size();
  NewtonOutcome out;
  Eigen::MatrixXd B(N + 1, N + 1);
  Eigen::VectorXd rhs(N + 1);
  for (int it = 0; it <= max_iters; ++it) {
    const auto lin = sys.linearize(X[N], X.head(N));
    const double g = row.dot(X) - target;
    out.residual = lin.F.norm();
    out.iterations = it;
    if (!std::isfinite(out.residual)) return out;
    if (out.residual < tol && std::abs(g) < tol) {
      out.converged = true;
      return out;
    }
    if (it == max_iters) break;
    B.topLeftCorner(N, N) = lin.Jx;
    B.topRightCorner(N, 1) = lin.Jmu;
    B.bottomRows(1) = row.transpose();
    rhs.head(N) = -lin.F;
    rhs[N] = -g;
    const Eigen::VectorXd d = B.partialPivLu().solve(rhs);
    if (!d.allFinite()) return out;
    X += d;
    if (!(X[N] > -2.0 && X[N] < 2.0)) return out;
  }
  return out;
}

BranchPoint make_point(const GalerkinSystem& sys, const Eigen::VectorXd& X, double residual, int step) {
  const int N = sys.size();
  SphereField f = sys.field(X.head(N));
  const double eps = amplitude(f);
  return BranchPoint{X[N], eps, std::move(f), residual, step};
}

}  // namespace

Branch continue_branch(const SymmetryClass& cls, const ContinuationConfig& cfg) {
  cfg.validate();
  const auto kernel = restricted_kernel_basis(cls);
  if (kernel.size() != 1) {
    std::ostringstream os;
    os << "restricted kernel of " << cls.label() << " has dimension " << kernel.size() << ":";
    for (const auto& k : kernel) {
      for (const Mode& md : k.modes(2)) {
        if (k.coefficient(2, md.l, md.j) != 0.0) os << " P_" << md.l << "^" << md.j << " cos(" << md.j << " theta)";
      }
    }
    throw PreconditionError(os.str());
  }
  const GalerkinSystem sys(cls, cfg.truncation, cfg.z_grid, cfg.theta_grid);
  const int N = sys.size();
  const double scale = kernel_scale(cls);
  const int k0 = kernel_slot(sys.field(Eigen::VectorXd::Zero(N)));
  // metric: coefficients weighted so the kernel direction measures eps
  Eigen::VectorXd W = Eigen::VectorXd::Constant(N + 1, 1.0 / (scale * scale));
  W[N] = 1.0;

  Branch br{cls, cfg, static_cast<int>(sys.grid().z.size()), static_cast<int>(sys.grid().theta.size()), {}, true, {}};
  Eigen::VectorXd X0 = Eigen::VectorXd::Zero(N + 1);
  X0[N] = mu_n(cls.n());
  std::vector<BranchPoint> neg, pos;
  pos.push_back(make_point(sys, X0, sys.residual(X0[N], X0.head(N)).norm(), 0));

  const double ds_min = cfg.ds / 16.0, ds_max = 4.0 * cfg.ds;
  for (int dir : {1, -1}) {
    Eigen::VectorXd t = Eigen::VectorXd::Zero(N + 1);
    t[k0] = dir * scale;
    Eigen::VectorXd X = X0;
    double h = cfg.ds;
    int easy = 0;
    auto& out = dir > 0 ? pos : neg;
    for (int step = 1; step <= cfg.max_steps;) {
      Eigen::VectorXd Xn = X + h * t;
      const Eigen::VectorXd row = W.cwiseProduct(t);
      const NewtonOutcome r = bordered_newton(sys, Xn, row, row.dot(X) + h, cfg.newton_tol, cfg.max_newton_iters);
      if (!r.converged) {
        easy = 0;
        if (h / 2.0 < ds_min * (1.0 - 1e-12)) {
          br.complete = false;
          std::ostringstream os;
          os << "Newton failed at step " << dir * step << " with ds = " << h << " (residual " << r.residual << ")";
          br.message = os.str();
          break;
        }
        h /= 2.0;
        continue;
      }
      BranchPoint p = make_point(sys, Xn, r.residual, dir * step);
      if (std::abs(p.eps) > cfg.eps_max * (1.0 + 1e-9)) break;
      // new tangent from the bordered system, oriented along the old one
      const auto lin = sys.linearize(Xn[N], Xn.head(N));
      Eigen::MatrixXd B(N + 1, N + 1);
      B.topLeftCorner(N, N) = lin.Jx;
      B.topRightCorner(N, 1) = lin.Jmu;
      B.bottomRows(1) = row.transpose();
      Eigen::VectorXd e = Eigen::VectorXd::Zero(N + 1);
      e[N] = 1.0;
      Eigen::VectorXd tn = B.partialPivLu().solve(e);
      tn /= std::sqrt(tn.dot(W.cwiseProduct(tn)));
      if (tn.dot(W.cwiseProduct(t)) < 0.0) tn = -tn;
      t = tn;
      X = Xn;
      out.push_back(std::move(p));
      ++step;
      easy = r.iterations <= 3 ? easy + 1 : 0;
      if (easy >= 4) {
        h = std::min(2.0 * h, ds_max);
        easy = 0;
      }
    }
    if (!br.complete) break;
  }
  std::reverse(neg.begin(), neg.end());
  br.points = std::move(neg);
  for (auto& p : pos) br.points.push_back(std::move(p));
  return br;
}

BranchPoint correct_at_amplitude(const GalerkinSystem& sys, double eps, const SphereField& guess,
                                 double mu_guess, double newton_tol, int max_iters) {
  const int N = sys.size();
  if (!(guess.symmetry() == sys.symmetry())) throw DomainError("guess belongs to another class");
  // transfer the guess to this truncation
  SphereField g(sys.symmetry(), sys.truncation());
  Eigen::VectorXd x = Eigen::VectorXd::Zero(N);
  const int n1 = sys.size1();
  for (int c = 1; c <= 2; ++c) {
    const auto& ms = g.modes(c);
    for (std::size_t i = 0; i < ms.size(); ++i) {
      x[(c == 1 ? 0 : n1) + static_cast<int>(i)] = guess.coefficient(c, ms[i].l, ms[i].j);
    }
  }
  const int k0 = kernel_slot(g);
  Eigen::VectorXd X(N + 1);
  X << x, mu_guess;
  Eigen::VectorXd row = Eigen::VectorXd::Zero(N + 1);
  row[k0] = 1.0;
  const NewtonOutcome r = bordered_newton(sys, X, row, eps * kernel_scale(sys.symmetry()), newton_tol, max_iters);
  if (!r.converged) {
    throw ConvergenceError("Newton did not converge at eps = " + std::to_string(eps) +
                           " (residual " + std::to_string(r.residual) + ")");
  }
  return make_point(sys, X, r.residual, 0);
}

CurvatureFit curvature_estimate(const std::vector<BranchPoint>& points, double eps_window, double tol) {
  std::vector<double> e, mu;
  bool below = false, above = false;
  for (const auto& p : points) {
    if (eps_window > 0.0 && std::abs(p.eps) > eps_window) continue;
    e.push_back(p.eps);
    mu.push_back(p.mu);
    below = below || p.eps < -1e-12;
    above = above || p.eps > 1e-12;
  }
  if (e.size() < 5) throw DegeneracyError("curvature fit needs at least 5 points");
  if (!below || !above) throw DegeneracyError("curvature fit needs points on both sides of eps = 0");
  const int degree = std::min<int>(4, static_cast<int>(e.size()) - 1);
  double emax = 0.0;
  for (double v : e) emax = std::max(emax, std::abs(v));
  Eigen::MatrixXd V(e.size(), degree + 1);
  Eigen::VectorXd y(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double s = e[i] / emax;
    double pw = 1.0;
    for (int k = 0; k <= degree; ++k, pw *= s) V(i, k) = pw;
    y[i] = mu[i];
  }
  const Eigen::VectorXd a = V.colPivHouseholderQr().solve(y);
  CurvatureFit fit;
  fit.degree = degree;
  fit.points = static_cast<int>(e.size());
  fit.mu0 = a[0];
  fit.linear = a[1] / emax;
  fit.mu2 = 2.0 * a[2] / (emax * emax);
  fit.residual = std::sqrt((V * a - y).squaredNorm() / static_cast<double>(e.size()));
  if (!(fit.residual <= tol)) {
    throw DegeneracyError("curvature fit residual " + std::to_string(fit.residual) + " above tolerance");
  }
  return fit;
}

MassCheck mass_check(const BranchPoint& p, int refine) {
  if (refine < 1) throw DomainError("refine must be positive");
  const SymmetryClass& cls = p.field.symmetry();
  const int L = p.field.truncation();
  const int nt = cls.m() == 0 ? 1 : default_theta_grid(cls, L) * refine;
  const SphereGrid grid = make_sphere_grid((2 * L + 4) * refine, nt);
  const Eigen::VectorXd p1 = synthesize(p.field, 1, grid), p2 = synthesize(p.field, 2, grid);
  const int nth = static_cast<int>(grid.theta.size());
  MassCheck m;
  for (int k = 0; k < grid.size(); ++k) {
    const double w = grid.wz[k / nth] * grid.wtheta;
    m.sphere1 += w * std::exp(0.5 * (p1[k] + p2[k]));
    m.sphere2 += w * std::exp(0.5 * (p1[k] - p2[k]));
  }
  const double factor = 2.0 / (2.0 + p.mu);
  m.plane1 = factor * m.sphere1;
  m.plane2 = factor * m.sphere2;
  return m;
}

ZeroCount radial_zero_count(const BranchPoint& p, int samples) {
  if (p.field.symmetry().m() != 0) throw PreconditionError("zero count needs a theta-independent class");
  if (p.field.coefficients(2).cwiseAbs().maxCoeff() < 1e-12) {
    throw PreconditionError("phi2 vanishes identically");
  }
  auto f = [&](double z) { return p.field.value(2, z, 0.0); };
  std::vector<double> z(samples + 1), v(samples + 1);
  double vmax = 0.0;
  for (int k = 0; k <= samples; ++k) {
    z[k] = std::cos(std::numbers::pi * (samples - k) / samples);  // ascending
    v[k] = f(z[k]);
    vmax = std::max(vmax, std::abs(v[k]));
  }
  ZeroCount out;
  out.min_slope = std::numeric_limits<double>::infinity();
  for (int k = 0; k < samples; ++k) {
    if (v[k] == 0.0 || (v[k] < 0.0) == (v[k + 1] < 0.0)) continue;
    double a = z[k], b = z[k + 1], fa = v[k];
    for (int it = 0; it < 100 && b - a > 1e-15; ++it) {
      const double c = 0.5 * (a + b), fc = f(c);
      if ((fc < 0.0) == (fa < 0.0)) {
        a = c;
        fa = fc;
      } else {
        b = c;
      }
    }
    const double z0 = 0.5 * (a + b);
    const double slope = std::abs(p.field.jet(2, z0, 0.0).dz) / vmax;
    out.zeros.push_back(z0);
    out.min_slope = std::min(out.min_slope, slope);
  }
  out.count = static_cast<int>(out.zeros.size());
  out.simple = out.count == 0 || out.min_slope > 1e-3;
  if (out.count == 0) out.min_slope = 0.0;
  return out;
}

double tail_energy(const SphereField& f) {
  const double cut = 0.9 * f.truncation();
  double tail = 0.0, total = 0.0;
  for (int c = 1; c <= 2; ++c) {
    const auto& ms = f.modes(c);
    const auto& co = f.coefficients(c);
    for (std::size_t i = 0; i < ms.size(); ++i) {
      const double e = co[static_cast<Eigen::Index>(i)] * co[static_cast<Eigen::Index>(i)];
      total += e;
      if (ms[i].l > cut) tail += e;
    }
  }
  return total > 0.0 ? tail / total : 0.0;
}

std::string branch_json(const Branch& b) {
  using nlohmann::json;
  json j;
  j["n"] = b.cls.n();
  j["m"] = b.cls.m();
  j["L"] = b.config.truncation;
  j["z_grid"] = b.z_grid;
  j["theta_grid"] = b.theta_grid;
  j["ds"] = b.config.ds;
  j["max_steps"] = b.config.max_steps;
  j["newton_tol"] = b.config.newton_tol;
  j["max_newton_iters"] = b.config.max_newton_iters;
  j["eps_max"] = b.config.eps_max;
  j["complete"] = b.complete;
  j["message"] = b.message;
  json modes = json::array();
  for (int c = 1; c <= 2; ++c) {
    json ms = json::array();
    for (const Mode& md : b.cls.modes(c, b.config.truncation)) ms.push_back({md.l, md.j});
    modes.push_back(ms);
  }
  j["modes"] = modes;
  json pts = json::array();
  for (const auto& p : b.points) {
    json q;
    q["step"] = p.step_index;
    q["mu"] = p.mu;
    q["eps"] = p.eps;
    q["residual_norm"] = p.residual_norm;
    const auto& c1 = p.field.coefficients(1);
    const auto& c2 = p.field.coefficients(2);
    q["c1"] = std::vector<double>(c1.data(), c1.data() + c1.size());
    q["c2"] = std::vector<double>(c2.data(), c2.data() + c2.size());
    const MassCheck mc = mass_check(p);
    q["mass"] = {mc.sphere1, mc.sphere2};
    q["plane_mass"] = {mc.plane1, mc.plane2};
    pts.push_back(q);
  }
  j["points"] = pts;
  return j.dump(2) + "\n";
}

Branch branch_from_json(const std::string& text) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DomainError(std::string("branch JSON: ") + e.what());
  }
  try {
    const SymmetryClass cls(j.at("n").get<int>(), j.at("m").get<int>());
    ContinuationConfig cfg;
    cfg.truncation = j.at("L").get<int>();
    cfg.ds = j.at("ds").get<double>();
    cfg.max_steps = j.at("max_steps").get<int>();
    cfg.newton_tol = j.at("newton_tol").get<double>();
    cfg.max_newton_iters = j.at("max_newton_iters").get<int>();
    cfg.eps_max = j.at("eps_max").get<double>();
    cfg.z_grid = j.at("z_grid").get<int>();
    cfg.theta_grid = j.at("theta_grid").get<int>();
    Branch b{cls, cfg, cfg.z_grid, cfg.theta_grid, {}, j.at("complete").get<bool>(),
             j.at("message").get<std::string>()};
    for (const auto& q : j.at("points")) {
      const auto c1 = q.at("c1").get<std::vector<double>>();
      const auto c2 = q.at("c2").get<std::vector<double>>();
      SphereField f(cls, cfg.truncation, Eigen::Map<const Eigen::VectorXd>(c1.data(), static_cast<Eigen::Index>(c1.size())),
                    Eigen::Map<const Eigen::VectorXd>(c2.data(), static_cast<Eigen::Index>(c2.size())));
      b.points.push_back(BranchPoint{q.at("mu").get<double>(), q.at("eps").get<double>(), std::move(f),
                                     q.at("residual_norm").get<double>(), q.at("step").get<int>()});
    }
    return b;
  } catch (const json::exception& e) {
    throw DomainError(std::string("branch JSON: ") + e.what());
  }
}

}  // namespace liouville
