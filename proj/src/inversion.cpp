#include "liouville/inversion.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "liouville/errors.hpp"
#include "liouville/legendre.hpp"

namespace liouville {

Profile legendre_profile(int n, int l) {
  if (n < 0 || l < 0) throw DomainError("invalid profile index");
  if (l <= n) {
    return {[n, l](double z) { return legendre_p_normalized({n, l}, z); },
            [n, l](double z) { return legendre_p_jet({n, l}, z, true).first; },
            [n, l](double z) { return legendre_p_jet({n, l}, z, true).second; }};
  }
  return {[n, l](double z) { return legendre_p_tilde({n, l}, z); },
          [n, l](double z) { return legendre_p_tilde_jet({n, l}, z).first; },
          [n, l](double z) { return legendre_p_tilde_jet({n, l}, z).second; }};
}

int eigen_level(int component, int n) {
  if (component == 1) return 1;
  if (component == 2) {
    if (n < 1) throw DomainError("eigen-level needs n >= 1");
    return n;
  }
  throw DomainError("component must be 1 or 2");
}

namespace {

void check_mode(int component, int n, int l) {
  if (l < 0) throw DomainError("mode order l must be non-negative");
  eigen_level(component, n);
}

}  // namespace

std::vector<double> profile_zeros(const Profile& p, double z_lo, double z_hi) {
  const double t_lo = std::acos(z_hi), t_hi = std::acos(z_lo);
  const int samples = 4096;
  std::vector<double> t(samples), v(samples);
  double vmax = 0.0;
  for (int k = 0; k < samples; ++k) {
    t[k] = t_lo + (t_hi - t_lo) * (k + 0.5) / samples;
    v[k] = p.value(std::cos(t[k]));
    vmax = std::max(vmax, std::abs(v[k]));
  }
  std::vector<double> zeros;
  for (int k = 0; k + 1 < samples; ++k) {
    if (v[k] == 0.0 || (v[k] > 0.0) != (v[k + 1] > 0.0)) {
      double a = t[k], b = t[k + 1];
      const double fa = v[k];
      if (fa == 0.0) {
        b = a;
      } else {
        for (int it = 0; it < 200 && b - a > 1e-16; ++it) {
          const double mid = 0.5 * (a + b);
          const double fm = p.value(std::cos(mid));
          if ((fm > 0.0) == (fa > 0.0)) a = mid; else b = mid;
        }
      }
      double z = std::cos(0.5 * (a + b));
      for (int it = 0; it < 3; ++it) {
        const double d = p.first(z);
        if (d == 0.0) break;
        const double step = p.value(z) / d;
        if (std::abs(step) > 1e-8) break;
        z -= step;
      }
      const double slope = std::abs(p.first(z)) * std::sqrt(1.0 - z * z);
      if (slope < 1e-8 * vmax) throw DegeneracyError("profile has a double zero near z = " + std::to_string(z));
      zeros.push_back(z);
      if (v[k + 1] == 0.0) ++k;
    } else if (k > 0 && std::abs(v[k]) < std::abs(v[k - 1]) && std::abs(v[k]) < std::abs(v[k + 1]) &&
               (v[k - 1] > 0.0) == (v[k] > 0.0)) {
      // local minimum of |p| without a sign change: refine it
      double a = t[k - 1], b = t[k + 1];
      const double g = 0.5 * (std::sqrt(5.0) - 1.0);
      for (int it = 0; it < 120; ++it) {
        const double x1 = b - g * (b - a), x2 = a + g * (b - a);
        if (std::abs(p.value(std::cos(x1))) < std::abs(p.value(std::cos(x2)))) b = x2; else a = x1;
      }
      const double zmin = std::cos(0.5 * (a + b));
      if (std::abs(p.value(zmin)) < 1e-12 * vmax) {
        throw DegeneracyError("profile touches zero without a sign change near z = " + std::to_string(zmin));
      }
    }
  }
  std::sort(zeros.begin(), zeros.end());
  return zeros;
}

GluedAntiderivative::GluedAntiderivative(Profile p, ScalarFunction numerator,
                                         ScalarFunction numerator_derivative,
                                         const QuadratureSpec& spec, double z_lo, double z_hi,
                                         double anchor, ScalarFunction kernel)
    : p_(std::move(p)) {
  spec.validate();
  if (!(z_lo >= -1.0 && z_hi <= 1.0 && z_lo < z_hi)) throw DomainError("bad gluing interval");
  if (!(anchor >= z_lo && anchor <= z_hi)) throw DomainError("anchor outside gluing interval");
  zeros_ = profile_zeros(p_, z_lo, z_hi);

  std::vector<PoleTerm> poles;
  for (auto it = zeros_.rbegin(); it != zeros_.rend(); ++it) {
    const double z = *it;
    const double th = std::acos(z);
    const double q = 1.0 - z * z;
    const double d1 = p_.first(z), d2 = p_.second(z);
    const double k0 = 1.0 / (q * d1 * d1);
    const double num = numerator(z);
    const double cz = num * k0;
    const double dz = numerator_derivative(z) * k0 + num * k0 * (2.0 * z / q - d2 / d1);
    poles.push_back({th, cz / (-std::sin(th)), dz});
    zero_slope_.push_back(-d1 * std::sin(th));
  }
  if (!kernel) {
    kernel = [p = p_, numerator](double y) {
      const double pv = p.value(y);
      return numerator(y) / ((1.0 - y * y) * pv * pv);
    };
  }
  auto h = [kernel](double t) { return -kernel(std::cos(t)) * std::sin(t); };
  std::vector<double> centers;
  for (const PoleTerm& pt : poles) centers.push_back(pt.center);
  PanelLayout layout(std::acos(z_hi), std::acos(z_lo), centers, spec);
  integral_ = std::make_unique<AnchoredIntegral>(std::move(layout), h, std::acos(anchor), poles, spec);
}

double GluedAntiderivative::operator()(double z) const { return (*integral_)(std::acos(z)); }

double GluedAntiderivative::times_profile(double z) const {
  const double t = std::acos(z);
  const AnchoredIntegral::Split s = integral_->split(t);
  const double pv = p_.value(z);
  if (!s.in_window) return pv * s.regular;
  const double center = t - s.offset;
  const auto& poles = integral_->poles();
  std::size_t w = 0;
  for (std::size_t i = 1; i < poles.size(); ++i) {
    if (std::abs(poles[i].center - center) < std::abs(poles[w].center - center)) w = i;
  }
  double ratio;
  if (std::abs(s.offset) < 1e-9) {
    ratio = zero_slope_[w];
  } else {
    ratio = pv / s.offset;
  }
  return pv * s.regular - s.pole_coefficient * ratio;
}

ModeSolution solve_mode(int component, int n, int l, const ScalarFunction& rhs, int nodes) {
  check_mode(component, n, l);
  if (nodes < 4) throw DomainError("collocation needs at least 4 nodes");
  const int level = eigen_level(component, n);
  const double big = static_cast<double>(level) * (level + 1);
  const bool resonant = level >= l;
  const GaussRule rule = gauss_legendre(nodes);
  const int kmax = l + nodes - 1;

  std::vector<int> ks;
  for (int k = l; k <= kmax; ++k) {
    if (!(resonant && k == level)) ks.push_back(k);
  }
  Eigen::MatrixXd A(nodes, static_cast<Eigen::Index>(ks.size()));
  Eigen::VectorXd b(nodes);
  std::vector<double> col(static_cast<std::size_t>(kmax - l + 1));
  double proj = 0.0, norm2 = 0.0;
  for (int i = 0; i < nodes; ++i) {
    const double z = rule.nodes[i];
    legendre_column(l, kmax, z, col);
    for (std::size_t c = 0; c < ks.size(); ++c) {
      const double k = ks[c];
      A(i, static_cast<Eigen::Index>(c)) = (big - k * (k + 1)) * col[ks[c] - l];
    }
    b[i] = rhs(z);
    norm2 += rule.weights[i] * b[i] * b[i];
    if (resonant) proj += rule.weights[i] * b[i] * col[level - l];
  }
  if (resonant && std::abs(proj) > 1e-8 * std::max(std::sqrt(norm2), 1e-300)) {
    throw ResonanceError("right-hand side is not orthogonal to the homogeneous solution P_" +
                         std::to_string(level) + "^" + std::to_string(l));
  }
  const Eigen::VectorXd a = A.colPivHouseholderQr().solve(b);

  ModeSolution sol;
  sol.nodes = rule.nodes;
  sol.values.resize(nodes);
  std::vector<double> coef(static_cast<std::size_t>(kmax - l + 1), 0.0);
  for (std::size_t c = 0; c < ks.size(); ++c) coef[ks[c] - l] = a[static_cast<Eigen::Index>(c)];
  sol.evaluate = [coef, l, kmax](double z) {
    std::vector<double> col2(coef.size());
    legendre_column(l, kmax, z, col2);
    double s = 0.0;
    for (std::size_t k = 0; k < coef.size(); ++k) s += coef[k] * col2[k];
    return s;
  };
  for (int i = 0; i < nodes; ++i) sol.values[i] = sol.evaluate(rule.nodes[i]);
  return sol;
}

ModeSolution solve_mode_variation(int component, int n, int l, const ScalarFunction& rhs,
                                  const QuadratureSpec& spec, int nodes) {
  check_mode(component, n, l);
  spec.validate();
  const int level = eigen_level(component, n);
  const bool resonant = level >= l;
  const Profile p = legendre_profile(level, l);
  const double pi = std::numbers::pi;

  // J(y) = integral of p rhs over [y, 1], accumulated from the nearer pole
  auto jd = [p, rhs](double t) {
    const double z = std::cos(t);
    return p.value(z) * rhs(z) * std::sin(t);
  };
  PanelLayout plain(0.0, pi, {}, spec);
  auto from_north = std::make_shared<AnchoredIntegral>(plain, jd, 0.0, std::vector<PoleTerm>{}, spec);
  std::shared_ptr<AnchoredIntegral> from_south;
  if (resonant) {
    from_south = std::make_shared<AnchoredIntegral>(plain, jd, pi, std::vector<PoleTerm>{}, spec);
    const double total = (*from_north)(pi);
    double scale = 0.0;
    const GaussRule rule = gauss_legendre(nodes);
    for (int i = 0; i < nodes; ++i) scale += rule.weights[i] * std::abs(p.value(rule.nodes[i]) * rhs(rule.nodes[i]));
    if (std::abs(total) > 1e-8 * std::max(scale, 1e-300)) {
      throw ResonanceError("right-hand side is not orthogonal to the homogeneous solution");
    }
  }
  ScalarFunction J = [from_north, from_south](double y) {
    const double t = std::acos(y);
    if (from_south && t > 0.5 * std::numbers::pi) return (*from_south)(t);
    return (*from_north)(t);
  };
  ScalarFunction dJ = [p, rhs](double y) { return -p.value(y) * rhs(y); };

  double anchor = -1.0;
  if (resonant) {
    // middle of the widest gap between consecutive zeros / poles, in angle
    std::vector<double> marks{0.0, pi};
    for (double z : profile_zeros(p, -1.0, 1.0)) marks.push_back(std::acos(z));
    std::sort(marks.begin(), marks.end());
    double best = 0.0, where = 0.5 * pi;
    for (std::size_t i = 0; i + 1 < marks.size(); ++i) {
      if (marks[i + 1] - marks[i] > best) {
        best = marks[i + 1] - marks[i];
        where = 0.5 * (marks[i] + marks[i + 1]);
      }
    }
    anchor = std::cos(where);
  }
  auto glued = std::make_shared<GluedAntiderivative>(p, J, dJ, spec, -1.0, 1.0, anchor);

  double c = 0.0;
  if (resonant) {
    // C = <p, p G> / <p, p>
    const PanelLayout layout(0.0, pi, {}, spec);
    const GaussRule ref = gauss_legendre(spec.points_per_panel);
    double num = 0.0, den = 0.0;
    for (const Panel& pn : layout.panels()) {
      const double half = 0.5 * (pn.b - pn.a), mid = 0.5 * (pn.a + pn.b);
      for (std::size_t i = 0; i < ref.nodes.size(); ++i) {
        const double t = mid + half * ref.nodes[i];
        const double z = std::cos(t);
        const double w = ref.weights[i] * half * std::sin(t);
        const double pv = p.value(z);
        num += w * pv * glued->times_profile(z);
        den += w * pv * pv;
      }
    }
    c = num / den;
  }

  ModeSolution sol;
  const GaussRule rule = gauss_legendre(nodes);
  sol.nodes = rule.nodes;
  sol.evaluate = [glued, p, c](double z) { return c * p.value(z) - glued->times_profile(z); };
  sol.values.resize(nodes);
  for (int i = 0; i < nodes; ++i) sol.values[i] = sol.evaluate(rule.nodes[i]);
  return sol;
}

}  // namespace liouville
