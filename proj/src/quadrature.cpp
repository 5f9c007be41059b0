#include "liouville/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "liouville/errors.hpp"

namespace liouville {

namespace {

bool is_half_integer(double a) {
  const double t = 2.0 * a;
  return std::abs(t - std::round(t)) < 1e-12;
}

// Clenshaw evaluation of sum_k c[k] T_k(x).
double chebyshev_eval(const std::vector<double>& c, double x) {
  double b1 = 0.0, b2 = 0.0;
  for (std::size_t k = c.size(); k-- > 1;) {
    const double b0 = 2.0 * x * b1 - b2 + c[k];
    b2 = b1;
    b1 = b0;
  }
  return x * b1 - b2 + c[0];
}

}  // namespace

void QuadratureSpec::validate() const {
  if (panel_count < 1) throw DomainError("panel_count must be positive");
  if (points_per_panel < 2) throw DomainError("points_per_panel must be at least 2");
  if (endpoint_exponent_left < 0.0 || endpoint_exponent_right < 0.0) {
    throw DomainError("endpoint exponents must be non-negative");
  }
  if (!(finite_part_radius > 0.0 && finite_part_radius < 0.5)) {
    throw DomainError("finite_part_radius must lie in (0, 0.5)");
  }
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw DomainError("tolerances must be positive");
}

QuadratureSpec QuadratureSpec::refined() const {
  QuadratureSpec r = *this;
  r.panel_count *= 2;
  return r;
}

PanelLayout::PanelLayout(double theta_lo, double theta_hi, const std::vector<double>& pole_centers,
                         const QuadratureSpec& spec)
    : lo_(theta_lo), hi_(theta_hi) {
  spec.validate();
  if (!(theta_lo < theta_hi)) throw DomainError("empty integration interval");
  std::vector<double> centers = pole_centers;
  std::sort(centers.begin(), centers.end());
  for (double c : centers) {
    if (!(c > lo_ && c < hi_)) throw DomainError("pole outside the integration interval");
  }
  const std::size_t nw = centers.size();
  radii_.resize(nw);
  for (std::size_t i = 0; i < nw; ++i) {
    double gap = std::min(centers[i] - lo_, hi_ - centers[i]);
    if (i > 0) gap = std::min(gap, centers[i] - centers[i - 1]);
    if (i + 1 < nw) gap = std::min(gap, centers[i + 1] - centers[i]);
    radii_[i] = spec.finite_part_radius * gap;
  }

  const double h = (hi_ - lo_) / spec.panel_count;
  std::vector<double> cuts;
  auto fill_gap = [&](double a, double b, double ra, double rb) {
    // ra / rb: radius of the window bordering a / b, 0 for a domain end
    std::vector<double> left{a}, right{b};
    const double mid = 0.5 * (a + b);
    if (ra > 0.0) {
      double x = a, w = ra;
      while (w < h && x + w < mid) {
        x += w;
        left.push_back(x);
        w *= 2.0;
      }
    }
    if (rb > 0.0) {
      double x = b, w = rb;
      while (w < h && x - w > mid) {
        x -= w;
        right.push_back(x);
        w *= 2.0;
      }
    }
    const double xl = left.back(), xr = right.back();
    const int count = std::max(1, static_cast<int>(std::ceil((xr - xl) / h - 1e-9)));
    for (double x : left) cuts.push_back(x);
    for (int k = 1; k < count; ++k) cuts.push_back(xl + (xr - xl) * k / count);
    for (auto it = right.rbegin(); it != right.rend(); ++it) cuts.push_back(*it);
  };

  double prev = lo_, prev_r = 0.0;
  for (std::size_t i = 0; i < nw; ++i) {
    fill_gap(prev, centers[i] - radii_[i], prev_r, radii_[i]);
    prev = centers[i] + radii_[i];
    prev_r = radii_[i];
  }
  fill_gap(prev, hi_, prev_r, 0.0);

  // geometric grading toward the sphere poles for non-analytic endpoint factors
  const int levels = 12;
  if (lo_ == 0.0 && !is_half_integer(spec.endpoint_exponent_right)) {
    const double first = std::min(h, cuts.size() > 1 ? cuts[1] : h);
    for (int k = 1; k <= levels; ++k) cuts.push_back(lo_ + first * std::pow(0.25, k));
  }
  if (hi_ == std::numbers::pi && !is_half_integer(spec.endpoint_exponent_left)) {
    for (int k = 1; k <= levels; ++k) cuts.push_back(hi_ - h * std::pow(0.25, k));
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  // rebuild panel list, marking windows
  std::vector<double> all = cuts;
  for (std::size_t i = 0; i < nw; ++i) {
    all.push_back(centers[i] - radii_[i]);
    all.push_back(centers[i] + radii_[i]);
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end(),
                        [](double x, double y) { return std::abs(x - y) < 1e-15; }),
            all.end());
  for (std::size_t k = 0; k + 1 < all.size(); ++k) {
    Panel p{all[k], all[k + 1], -1};
    const double mid = 0.5 * (p.a + p.b);
    for (std::size_t i = 0; i < nw; ++i) {
      if (std::abs(mid - centers[i]) < radii_[i]) p.window = static_cast<int>(i);
    }
    panels_.push_back(p);
  }
}

int PanelLayout::locate(double theta) const {
  if (theta < lo_ - 1e-14 || theta > hi_ + 1e-14) throw DomainError("point outside panel layout");
  auto it = std::upper_bound(panels_.begin(), panels_.end(), theta,
                             [](double t, const Panel& p) { return t < p.b; });
  if (it == panels_.end()) return static_cast<int>(panels_.size()) - 1;
  return static_cast<int>(it - panels_.begin());
}

AnchoredIntegral::AnchoredIntegral(PanelLayout layout, std::function<double(double)> f,
                                   double anchor, std::vector<PoleTerm> poles,
                                   const QuadratureSpec& spec)
    : layout_(std::move(layout)),
      f_(std::move(f)),
      anchor_(anchor),
      poles_(std::move(poles)),
      ref_(gauss_legendre(spec.points_per_panel)) {
  const auto& panels = layout_.panels();
  const std::size_t np = panels.size();
  anchor_panel_ = layout_.locate(anchor_);
  if (panels[anchor_panel_].window >= 0 &&
      std::abs(anchor_ - poles_[panels[anchor_panel_].window].center) <
          layout_.window_radius(panels[anchor_panel_].window) - 1e-14) {
    throw DomainError("anchor lies inside a finite-part window");
  }
  full_.assign(np, 0.0);
  cheb_.assign(np, {});
  const double base_width = (layout_.hi() - layout_.lo()) / spec.panel_count;
  for (std::size_t k = 0; k < np; ++k) {
    const Panel& p = panels[k];
    if (p.window < 0) {
      full_[k] = partial(static_cast<int>(k), p.a, p.b);
      continue;
    }
    const PoleTerm& pole = poles_[p.window];
    const double r = 0.5 * (p.b - p.a);
    // same node density as a base panel, even count so no node sits on the pole
    int q = std::max(spec.points_per_panel,
                     static_cast<int>(std::ceil(spec.points_per_panel * 2.0 * r / base_width)));
    q += q % 2;
    std::vector<double> vals(q), coef(q, 0.0);
    for (int i = 0; i < q; ++i) {
      const double x = std::cos(std::numbers::pi * (i + 0.5) / q);
      const double t = x * r;
      vals[i] = f_(pole.center + t) - pole.c / (t * t) - pole.d / t;
    }
    for (int j = 0; j < q; ++j) {
      double s = 0.0;
      for (int i = 0; i < q; ++i) s += vals[i] * std::cos(std::numbers::pi * j * (i + 0.5) / q);
      coef[j] = (j == 0 ? 1.0 : 2.0) * s / q;
    }
    // antiderivative coefficients in x, scaled by r, zero at x = -1
    std::vector<double> b(q + 1, 0.0);
    auto c_at = [&](int j) { return (j >= 0 && j < q) ? coef[j] : 0.0; };
    b[1] = c_at(0) - 0.5 * c_at(2);
    for (int kk = 2; kk <= q; ++kk) b[kk] = (c_at(kk - 1) - c_at(kk + 1)) / (2.0 * kk);
    double at_minus = 0.0;
    for (int kk = 1; kk <= q; ++kk) at_minus += (kk % 2 == 0 ? 1.0 : -1.0) * b[kk];
    b[0] = -at_minus;
    for (double& v : b) v *= r;
    cheb_[k] = std::move(b);
    full_[k] = window_antiderivative(static_cast<int>(k), p.b) -
               window_antiderivative(static_cast<int>(k), p.a) - 2.0 * pole.c / r;
  }
  prefix_.assign(np, 0.0);
  const int ka = anchor_panel_;
  for (int k = ka + 1; k < static_cast<int>(np); ++k) {
    prefix_[k] = (k == ka + 1 ? partial(ka, anchor_, panels[ka].b) : prefix_[k - 1] + full_[k - 1]);
  }
  for (int k = ka - 1; k >= 0; --k) {
    prefix_[k] = (k == ka - 1 ? partial(ka, anchor_, panels[ka].a) : prefix_[k + 1] - full_[k + 1]);
  }
}

double AnchoredIntegral::window_antiderivative(int k, double theta) const {
  const Panel& p = layout_.panels()[k];
  const double r = 0.5 * (p.b - p.a);
  const double center = 0.5 * (p.a + p.b);
  const double x = std::clamp((theta - center) / r, -1.0, 1.0);
  return chebyshev_eval(cheb_[k], x);
}

double AnchoredIntegral::partial(int k, double from, double to) const {
  const Panel& p = layout_.panels()[k];
  if (p.window >= 0) {
    const PoleTerm& pole = poles_[p.window];
    auto sing = [&](double th) {
      const double t = th - pole.center;
      return -pole.c / t + pole.d * std::log(std::abs(t));
    };
    return window_antiderivative(k, to) + sing(to) - window_antiderivative(k, from) - sing(from);
  }
  if (from == to) return 0.0;
  const double half = 0.5 * (to - from), mid = 0.5 * (to + from);
  double s = 0.0;
  for (std::size_t i = 0; i < ref_.nodes.size(); ++i) s += ref_.weights[i] * f_(mid + half * ref_.nodes[i]);
  return s * half;
}

AnchoredIntegral::Split AnchoredIntegral::split(double theta) const {
  const int k = layout_.locate(theta);
  const Panel& p = layout_.panels()[k];
  double base;
  double edge;
  if (k == anchor_panel_) {
    base = 0.0;
    edge = anchor_;
  } else if (k > anchor_panel_) {
    base = prefix_[k];
    edge = p.a;
  } else {
    base = prefix_[k];
    edge = p.b;
  }
  Split s;
  if (p.window < 0) {
    s.regular = base + partial(k, edge, theta);
    return s;
  }
  const PoleTerm& pole = poles_[p.window];
  const double t = theta - pole.center;
  const double te = edge - pole.center;
  s.in_window = true;
  s.offset = t;
  s.pole_coefficient = pole.c;
  s.regular = base + window_antiderivative(k, theta) - window_antiderivative(k, edge) + pole.c / te -
              pole.d * std::log(std::abs(te));
  if (t != 0.0) s.regular += pole.d * std::log(std::abs(t));
  return s;
}

double AnchoredIntegral::operator()(double theta) const {
  const Split s = split(theta);
  if (!s.in_window) return s.regular;
  if (s.offset == 0.0) throw PoleError("finite-part antiderivative evaluated at its pole");
  return s.regular - s.pole_coefficient / s.offset;
}

double integrate_angular(const std::function<double(double)>& f, double z_lo, double z_hi,
                         const QuadratureSpec& spec) {
  if (!(z_lo >= -1.0 && z_hi <= 1.0 && z_lo < z_hi)) throw DomainError("bad interval");
  PanelLayout layout(std::acos(z_hi), std::acos(z_lo), {}, spec);
  const GaussRule ref = gauss_legendre(spec.points_per_panel);
  double total = 0.0;
  for (const Panel& p : layout.panels()) {
    const double half = 0.5 * (p.b - p.a), mid = 0.5 * (p.a + p.b);
    double s = 0.0;
    for (std::size_t i = 0; i < ref.nodes.size(); ++i) {
      const double t = mid + half * ref.nodes[i];
      s += ref.weights[i] * f(std::cos(t)) * std::sin(t);
    }
    total += s * half;
  }
  return total;
}

}  // namespace liouville
