#include "liouville/plane_transfer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <nlohmann/json.hpp>
#include <numbers>
#include <sstream>

#include "liouville/errors.hpp"
#include "liouville/legendre.hpp"

namespace liouville {

double background(double mu, double r) {
  const double q = 8.0 + r * r;
  return std::log(64.0 / ((2.0 + mu) * q * q));
}

double pullback_z(double r) { return (8.0 - r * r) / (8.0 + r * r); }

double conformal_factor(double r) {
  const double q = 8.0 + r * r;
  return 32.0 / (q * q);
}

namespace {

int default_theta_count(int m) {
  if (m == 0) return 16;
  const int step = 2 * m;
  return ((128 + step - 1) / step) * step;
}

// Values of one component on zs x thetas.
Eigen::MatrixXd sample(const SphereField& f, int component, const std::vector<double>& zs,
                       const std::vector<double>& thetas) {
  const auto& ms = f.modes(component);
  const auto& c = f.coefficients(component);
  const int L = f.truncation();
  std::map<int, std::vector<std::size_t>> by_j;
  for (std::size_t i = 0; i < ms.size(); ++i) by_j[ms[i].j].push_back(i);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(zs.size()),
                                              static_cast<Eigen::Index>(thetas.size()));
  std::vector<double> col(static_cast<std::size_t>(L + 1));
  for (std::size_t iz = 0; iz < zs.size(); ++iz) {
    for (const auto& [j, idx] : by_j) {
      legendre_column(j, L, zs[iz], std::span<double>(col.data(), static_cast<std::size_t>(L - j + 1)));
      double a = 0.0;
      for (std::size_t i : idx) a += c[static_cast<Eigen::Index>(i)] * col[ms[i].l - j];
      for (std::size_t it = 0; it < thetas.size(); ++it) {
        out(static_cast<Eigen::Index>(iz), static_cast<Eigen::Index>(it)) += a * std::cos(j * thetas[it]);
      }
    }
  }
  return out;
}

}  // namespace

PlaneSolution to_plane(const BranchPoint& p, const PlaneGridSpec& spec) {
  if (spec.half_count < 2 || !(spec.r_max > std::sqrt(8.0))) throw DomainError("invalid plane grid");
  const SymmetryClass& cls = p.field.symmetry();
  const int nt = spec.theta_count > 0 ? spec.theta_count : default_theta_count(cls.m());
  if (cls.m() > 0 && nt % (2 * cls.m()) != 0) throw DomainError("theta count must be a multiple of 2m");
  PlaneSolution s;
  s.n = cls.n();
  s.m = cls.m();
  s.mu = p.mu;
  s.eps = p.eps;
  const double h = std::log(spec.r_max / std::sqrt(8.0)) / spec.half_count;
  std::vector<double> zs;
  for (int k = -spec.half_count; k <= spec.half_count; ++k) {
    s.r.push_back(std::sqrt(8.0) * std::exp(k * h));
    zs.push_back(pullback_z(s.r.back()));
  }
  for (int k = 0; k < nt; ++k) s.theta.push_back(2.0 * std::numbers::pi * k / nt);
  const Eigen::MatrixXd f1 = sample(p.field, 1, zs, s.theta), f2 = sample(p.field, 2, zs, s.theta);
  s.u1.resize(f1.rows(), f1.cols());
  s.u2.resize(f1.rows(), f1.cols());
  for (Eigen::Index i = 0; i < f1.rows(); ++i) {
    const double U = background(p.mu, s.r[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < f1.cols(); ++j) {
      s.u1(i, j) = U + 0.5 * (f1(i, j) + f2(i, j));
      s.u2(i, j) = U + 0.5 * (f1(i, j) - f2(i, j));
    }
  }
  return s;
}

std::pair<double, double> plane_mass(const BranchPoint& p, int theta_count) {
  const SymmetryClass& cls = p.field.symmetry();
  const int nt = theta_count > 0 ? theta_count : default_theta_count(cls.m());
  // e^u r^2 decays like r^2 at 0 and r^-2 at infinity in s = log r
  const double s_lo = std::log(1e-8), s_hi = std::log(1e8);
  const int panels = 64;
  const GaussRule ref = gauss_legendre(20);
  std::vector<double> s, w, zs, thetas;
  for (int k = 0; k < panels; ++k) {
    const double a = s_lo + (s_hi - s_lo) * k / panels, b = s_lo + (s_hi - s_lo) * (k + 1) / panels;
    for (std::size_t i = 0; i < ref.nodes.size(); ++i) {
      s.push_back(0.5 * (a + b) + 0.5 * (b - a) * ref.nodes[i]);
      w.push_back(0.5 * (b - a) * ref.weights[i]);
      zs.push_back(pullback_z(std::exp(s.back())));
    }
  }
  for (int k = 0; k < nt; ++k) thetas.push_back(2.0 * std::numbers::pi * k / nt);
  const Eigen::MatrixXd f1 = sample(p.field, 1, zs, thetas), f2 = sample(p.field, 2, zs, thetas);
  double m1 = 0.0, m2 = 0.0;
  const double wt = 2.0 * std::numbers::pi / nt;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double r = std::exp(s[i]);
    const double U = background(p.mu, r);
    for (int j = 0; j < nt; ++j) {
      const double a = f1(static_cast<Eigen::Index>(i), j), b = f2(static_cast<Eigen::Index>(i), j);
      m1 += w[i] * wt * r * r * std::exp(U + 0.5 * (a + b));
      m2 += w[i] * wt * r * r * std::exp(U + 0.5 * (a - b));
    }
  }
  return {m1, m2};
}

double conformal_residual(const BranchPoint& p, int nr, int nt) {
  const SphereField& f = p.field;
  const double mu = p.mu, lam = lambda_of_mu(mu);
  double worst = 0.0, scale = 0.0;
  for (int i = 0; i < nr; ++i) {
    const double r = 0.05 * std::pow(1000.0, static_cast<double>(i) / (nr - 1));
    const double q = 8.0 + r * r;
    const double z = pullback_z(r);
    const double zr = -32.0 * r / (q * q);
    const double zrr = -32.0 * (8.0 - 3.0 * r * r) / (q * q * q);
    const double Ur = -4.0 * r / q, Urr = -4.0 * (8.0 - r * r) / (q * q);
    const double lapU = Urr + Ur / r;
    const double U = background(mu, r);
    const double rho = conformal_factor(r);
    for (int j = 0; j < nt; ++j) {
      const double th = 2.0 * std::numbers::pi * j / nt;
      const SphereField::Jet a = f.jet(1, z, th), b = f.jet(2, z, th);
      auto plane_lap = [&](const SphereField::Jet& g) {
        return g.dzz * zr * zr + g.dz * zrr + g.dz * zr / r + g.dtt / (r * r);
      };
      auto sphere_lap = [&](const SphereField::Jet& g) {
        return (1.0 - z * z) * g.dzz - 2.0 * z * g.dz + g.dtt / (1.0 - z * z);
      };
      const double u1 = U + 0.5 * (a.value + b.value), u2 = U + 0.5 * (a.value - b.value);
      const double l1 = plane_lap(a), l2 = plane_lap(b);
      const double R1 = lapU + 0.5 * (l1 + l2) + 2.0 * std::exp(u1) + mu * std::exp(u2);
      const double R2 = lapU + 0.5 * (l1 - l2) + mu * std::exp(u1) + 2.0 * std::exp(u2);
      const double ea = std::exp(0.5 * (a.value + b.value)), eb = std::exp(0.5 * (a.value - b.value));
      const double T1 = sphere_lap(a) + 2.0 * (ea + eb - 2.0);
      const double T2 = sphere_lap(b) + lam * (ea - eb);
      worst = std::max({worst, std::abs(R1 - 0.5 * rho * (T1 + T2)), std::abs(R2 - 0.5 * rho * (T1 - T2))});
      scale = std::max({scale, std::abs(lapU), 2.0 * std::exp(u1) + std::abs(mu) * std::exp(u2)});
    }
  }
  return worst / scale;
}

PlaneReport validate_plane(const PlaneSolution& sol, const BranchPoint& p) {
  if (std::abs(sol.mu - p.mu) > 1e-14 * std::max(1.0, std::abs(p.mu))) {
    throw DomainError("plane solution and branch point have different mu");
  }
  const int nr = static_cast<int>(sol.r.size()), nt = static_cast<int>(sol.theta.size());
  PlaneReport rep;
  rep.swapped = (sol.n + sol.m) % 2 != 0;

  if (sol.m > 0) {
    const int shift = nt / (2 * sol.m);
    for (int i = 0; i < nr; ++i) {
      for (int j = 0; j < nt; ++j) {
        const int jr = (j + shift) % nt;
        const int jf = ((shift - j) % nt + nt) % nt;
        rep.rotation = std::max({rep.rotation, std::abs(sol.u1(i, jr) - sol.u2(i, j)),
                                 std::abs(sol.u2(i, jr) - sol.u1(i, j))});
        rep.reflection = std::max({rep.reflection, std::abs(sol.u1(i, jf) - sol.u2(i, j)),
                                   std::abs(sol.u2(i, jf) - sol.u1(i, j))});
      }
    }
  } else {
    // theta-independent class: rotation and reflection act trivially
    for (int i = 0; i < nr; ++i) {
      for (int j = 1; j < nt; ++j) {
        rep.rotation = std::max({rep.rotation, std::abs(sol.u1(i, j) - sol.u1(i, 0)),
                                 std::abs(sol.u2(i, j) - sol.u2(i, 0))});
      }
    }
    rep.reflection = rep.rotation;
  }

  // r_k and r_{nr-1-k} are related by r -> 8/r
  for (int i = 0; i < nr; ++i) {
    const int k = nr - 1 - i;
    const double shift = std::log(std::pow(sol.r[i], 4) / 64.0);
    for (int j = 0; j < nt; ++j) {
      const double same = std::max(std::abs(sol.u1(k, j) - shift - sol.u1(i, j)),
                                   std::abs(sol.u2(k, j) - shift - sol.u2(i, j)));
      const double swap = std::max(std::abs(sol.u1(k, j) - shift - sol.u2(i, j)),
                                   std::abs(sol.u2(k, j) - shift - sol.u1(i, j)));
      rep.inversion = std::max(rep.inversion, rep.swapped ? swap : same);
      rep.inversion_other = std::max(rep.inversion_other, rep.swapped ? same : swap);
    }
  }

  // far-field slope per theta line, worst deviation from -4 reported
  auto slope_of = [&](const Eigen::MatrixXd& u) {
    double worst = -4.0;
    for (int j = 0; j < nt; ++j) {
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      int c = 0;
      for (int i = 0; i < nr; ++i) {
        if (sol.r[i] < 1e2 || sol.r[i] > 1e3 * (1 + 1e-12)) continue;
        const double x = std::log(sol.r[i]);
        sx += x;
        sy += u(i, j);
        sxx += x * x;
        sxy += x * u(i, j);
        ++c;
      }
      if (c < 2) throw DomainError("plane grid does not cover [1e2, 1e3]");
      const double s = (c * sxy - sx * sy) / (c * sxx - sx * sx);
      if (std::abs(s + 4.0) > std::abs(worst + 4.0)) worst = s;
    }
    return worst;
  };
  rep.slope1 = slope_of(sol.u1);
  rep.slope2 = slope_of(sol.u2);

  // 5-point residual in (log r, theta): Lap u = (u_ss + u_tt) / r^2
  const double hs = std::log(sol.r[1] / sol.r[0]);
  const double ht = 2.0 * std::numbers::pi / nt;
  // highest angular order carrying a visible share of the field
  int jmax = 0;
  for (int c = 1; c <= 2; ++c) {
    const auto& co = p.field.coefficients(c);
    const double cmax = co.size() ? co.cwiseAbs().maxCoeff() : 0.0;
    for (std::size_t i = 0; i < p.field.modes(c).size(); ++i) {
      if (std::abs(co[static_cast<Eigen::Index>(i)]) > 1e-6 * cmax) jmax = std::max(jmax, p.field.modes(c)[i].j);
    }
  }
  rep.fd_resolved = hs < 0.1 && ht * std::max(1, jmax) < 0.5;
  double worst = 0.0, scale = 0.0;
  for (int i = 1; i + 1 < nr; ++i) {
    if (sol.r[i] < 0.1 || sol.r[i] > 10.0) continue;
    const double r2 = sol.r[i] * sol.r[i];
    for (int j = 0; j < nt; ++j) {
      const int jp = (j + 1) % nt, jm = (j + nt - 1) % nt;
      auto lap = [&](const Eigen::MatrixXd& u) {
        const double uss = (u(i + 1, j) - 2.0 * u(i, j) + u(i - 1, j)) / (hs * hs);
        const double utt = nt > 1 ? (u(i, jp) - 2.0 * u(i, j) + u(i, jm)) / (ht * ht) : 0.0;
        return (uss + utt) / r2;
      };
      const double e1 = std::exp(sol.u1(i, j)), e2 = std::exp(sol.u2(i, j));
      const double R1 = lap(sol.u1) + 2.0 * e1 + sol.mu * e2;
      const double R2 = lap(sol.u2) + sol.mu * e1 + 2.0 * e2;
      worst = std::max({worst, std::abs(R1), std::abs(R2)});
      scale = std::max({scale, 2.0 * e1 + std::abs(sol.mu) * e2, 2.0 * e2 + std::abs(sol.mu) * e1});
    }
  }
  rep.fd_residual = scale > 0.0 ? worst / scale : 0.0;

  // Z_1 = ((u1+u2)/2 - U_{mu_n}) / eps, Z_2 = ((u1-u2)/2 - eps P_n^m cos(m theta)) / eps
  if (std::abs(sol.eps) > 0.0) {
    const double mun = mu_n(sol.n);
    for (int i = 0; i < nr; ++i) {
      const double P = legendre_p({sol.n, sol.m}, pullback_z(sol.r[i]));
      const double U = background(mun, sol.r[i]);
      for (int j = 0; j < nt; ++j) {
        const double z1 = (0.5 * (sol.u1(i, j) + sol.u2(i, j)) - U) / sol.eps;
        const double z2 = (0.5 * (sol.u1(i, j) - sol.u2(i, j)) - sol.eps * P * std::cos(sol.m * sol.theta[j])) / sol.eps;
        rep.z1_sup = std::max(rep.z1_sup, std::abs(z1));
        rep.z2_sup = std::max(rep.z2_sup, std::abs(z2));
      }
    }
  }

  const auto masses = plane_mass(p);
  rep.mass1 = masses.first;
  rep.mass2 = masses.second;
  rep.expected_mass = 8.0 * std::numbers::pi / (2.0 + p.mu);
  rep.conformal = conformal_residual(p);
  return rep;
}

std::string plane_csv(const PlaneSolution& sol) {
  std::ostringstream os;
  os << "r,theta,u1,u2\n";
  char buf[128];
  for (std::size_t i = 0; i < sol.r.size(); ++i) {
    for (std::size_t j = 0; j < sol.theta.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", sol.r[i], sol.theta[j],
                    sol.u1(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)),
                    sol.u2(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      os << buf;
    }
  }
  return os.str();
}

namespace {

nlohmann::json report_object(const PlaneReport& r) {
  nlohmann::json j;
  j["rotation"] = r.rotation;
  j["reflection"] = r.reflection;
  j["inversion"] = r.inversion;
  j["inversion_other"] = r.inversion_other;
  j["swapped"] = r.swapped;
  j["slope1"] = r.slope1;
  j["slope2"] = r.slope2;
  j["fd_residual"] = r.fd_residual;
  j["fd_resolved"] = r.fd_resolved;
  j["z1_sup"] = r.z1_sup;
  j["z2_sup"] = r.z2_sup;
  j["mass1"] = r.mass1;
  j["mass2"] = r.mass2;
  j["expected_mass"] = r.expected_mass;
  j["conformal"] = r.conformal;
  return j;
}

}  // namespace

std::string report_json(const PlaneReport& report) { return report_object(report).dump(2) + "\n"; }

std::string plane_json(const PlaneSolution& sol, const PlaneReport& report) {
  nlohmann::json j;
  j["n"] = sol.n;
  j["m"] = sol.m;
  j["mu"] = sol.mu;
  j["eps"] = sol.eps;
  j["r"] = sol.r;
  j["theta"] = sol.theta;
  auto rows = [](const Eigen::MatrixXd& u) {
    nlohmann::json a = nlohmann::json::array();
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
      std::vector<double> row(static_cast<std::size_t>(u.cols()));
      for (Eigen::Index k = 0; k < u.cols(); ++k) row[static_cast<std::size_t>(k)] = u(i, k);
      a.push_back(row);
    }
    return a;
  };
  j["u1"] = rows(sol.u1);
  j["u2"] = rows(sol.u2);
  j["report"] = report_object(report);
  return j.dump(2) + "\n";
}

}  // namespace liouville
