#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "liouville/continuation.hpp"

namespace liouville {

// Background solution log(64 / ((2 + mu) (8 + r^2)^2)).
double background(double mu, double r);
// Stereographic pullback z = (8 - r^2) / (8 + r^2) and conformal factor 32 / (8 + r^2)^2.
double pullback_z(double r);
double conformal_factor(double r);

// Polar grid r_k = sqrt(8) exp(k h), |k| <= half_count, symmetric under
// r -> 8 / r; theta uniform with a count divisible by 2m.
struct PlaneGridSpec {
  int half_count = 240;
  double r_max = 1e3;
  int theta_count = 0;  // 0: smallest multiple of 2m >= 128 (16 when m = 0)
};

struct PlaneSolution {
  int n = 0;
  int m = 0;
  double mu = 0.0;
  double eps = 0.0;
  std::vector<double> r;
  std::vector<double> theta;
  Eigen::MatrixXd u1;  // r x theta
  Eigen::MatrixXd u2;
};

// u_{1,2} = U_mu + (phi1 +- phi2) / 2 pulled back to the plane.
PlaneSolution to_plane(const BranchPoint& p, const PlaneGridSpec& spec = {});

struct PlaneReport {
  // max pointwise violations
  double rotation = 0.0;      // u1(theta + pi/m) = u2(theta) and vice versa
  double reflection = 0.0;    // u1(pi/m - theta) = u2(theta) and vice versa
  double inversion = 0.0;     // u(8/r) = log(r^4/64) + u or the swapped form, by parity of n+m
  double inversion_other = 0.0;  // the relation of the opposite parity
  bool swapped = false;       // n + m odd
  double slope1 = 0.0;        // fitted d u_i / d log r on [1e2, 1e3]
  double slope2 = 0.0;
  double fd_residual = 0.0;   // 5-point residual on r in [0.1, 10], relative
  bool fd_resolved = true;    // false when the grid is too coarse for the FD check
  double z1_sup = 0.0;        // remainders of the expansion around U_{mu_n}
  double z2_sup = 0.0;
  double mass1 = 0.0;         // plane integrals of e^{u_i}
  double mass2 = 0.0;
  double expected_mass = 0.0; // 8 pi / (2 + mu)
  double conformal = 0.0;     // analytic plane residual vs rho * sphere residual
};

// Throws DomainError when the solution and the point have different mu.
PlaneReport validate_plane(const PlaneSolution& sol, const BranchPoint& p);

// Plane integrals of e^{u_1}, e^{u_2} by Gauss quadrature in log r.
std::pair<double, double> plane_mass(const BranchPoint& p, int theta_count = 0);

// max |plane residual - rho (T1 +- T2) / 2| over a coarse grid, relative to
// the size of the plane residual terms.
double conformal_residual(const BranchPoint& p, int nr = 24, int nt = 16);

std::string plane_csv(const PlaneSolution& sol);
std::string plane_json(const PlaneSolution& sol, const PlaneReport& report);
std::string report_json(const PlaneReport& report);

}  // namespace liouville
