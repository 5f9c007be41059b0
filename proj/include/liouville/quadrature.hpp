#pragma once

#include <functional>
#include <vector>

#include "liouville/legendre.hpp"

namespace liouville {

// Composite Gauss rule configuration. All integrals over [-1, 1] are taken in
// the angle theta with z = cos(theta) = 1 - 2 sin^2(theta/2), which turns
// (1 -+ z)^(k/2) endpoint factors into analytic ones.
struct QuadratureSpec {
  int panel_count = 16;
  int points_per_panel = 24;
  // Exponent a of a (1 + z)^a resp. (1 - z)^a endpoint factor. When 2a is not
  // an integer the panels are graded geometrically toward that end.
  double endpoint_exponent_left = 0.0;
  double endpoint_exponent_right = 0.0;
  // Half-width of a finite-part window as a fraction of the distance to the
  // nearest other singular point (neighbouring zero or pole of the sphere).
  double finite_part_radius = 0.25;
  double abs_tol = 1e-14;
  double rel_tol = 1e-8;

  void validate() const;
  QuadratureSpec refined() const;
};

// A simple pole of the integrand at theta = center, integrated in the
// Hadamard finite-part sense. Near the center the integrand is
// c / t^2 + d / t + (analytic), t = theta - center.
struct PoleTerm {
  double center = 0.0;
  double c = 0.0;
  double d = 0.0;
};

struct Panel {
  double a = 0.0;
  double b = 0.0;
  int window = -1;  // index into the pole list when this panel is a window
};

// Partition of [theta_lo, theta_hi] into panels, with a symmetric window
// around every pole and geometric grading next to each window.
class PanelLayout {
 public:
  PanelLayout(double theta_lo, double theta_hi, const std::vector<double>& pole_centers,
              const QuadratureSpec& spec);

  const std::vector<Panel>& panels() const { return panels_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double window_radius(int w) const { return radii_[w]; }
  int locate(double theta) const;

 private:
  double lo_, hi_;
  std::vector<double> radii_;
  std::vector<Panel> panels_;
};

// F(theta) = FP integral of f from `anchor` to theta. f is sampled on the
// layout; near pole w it is replaced by f - c/t^2 - d/t, interpolated on
// first-kind Chebyshev points (none at the center), and the pole part is
// integrated analytically with one constant on both sides.
class AnchoredIntegral {
 public:
  AnchoredIntegral(PanelLayout layout, std::function<double(double)> f, double anchor,
                   std::vector<PoleTerm> poles, const QuadratureSpec& spec);

  double operator()(double theta) const;
  // Regular part at theta: value minus the c/t term of the window containing
  // theta (returned separately so callers can multiply by a vanishing factor).
  struct Split {
    double regular = 0.0;
    double pole_coefficient = 0.0;  // coefficient of -1/t
    double offset = 0.0;            // t = theta - center, 0 outside windows
    bool in_window = false;
  };
  Split split(double theta) const;

  const PanelLayout& layout() const { return layout_; }
  const std::vector<PoleTerm>& poles() const { return poles_; }

 private:
  double partial(int k, double from, double to) const;
  double window_antiderivative(int k, double theta) const;  // regular part only

  PanelLayout layout_;
  std::function<double(double)> f_;
  double anchor_;
  int anchor_panel_;
  std::vector<PoleTerm> poles_;
  GaussRule ref_;
  std::vector<double> full_;                  // FP integral over each panel
  std::vector<std::vector<double>> cheb_;     // antiderivative coefficients (windows)
  std::vector<double> prefix_;                // prefix_[k] = integral from anchor to panel k edge
};

// Integral of f(z) dz over [z_lo, z_hi] in the angle variable.
double integrate_angular(const std::function<double(double)>& f, double z_lo, double z_hi,
                         const QuadratureSpec& spec);

}  // namespace liouville
