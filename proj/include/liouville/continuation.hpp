#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "liouville/spectral.hpp"

namespace liouville {

// Galerkin form of
//   T1 = Lap phi1 + 2 (e^a + e^b - 2),  T2 = Lap phi2 + lambda(mu) (e^a - e^b),
//   a = (phi1 + phi2) / 2,  b = (phi1 - phi2) / 2,
// on the admissible modes of a symmetry class. Exponentials are evaluated on a
// tensor grid and projected back.
class GalerkinSystem {
 public:
  // Grid sizes <= 0 pick defaults: 2L + 4 points in z, and in theta the
  // smallest multiple of 2m that is >= 3L + 4 (one point when m = 0).
  GalerkinSystem(SymmetryClass cls, int L, int z_grid = 0, int theta_grid = 0);

  const SymmetryClass& symmetry() const { return cls_; }
  int truncation() const { return L_; }
  const SphereGrid& grid() const { return grid_; }
  int size() const { return static_cast<int>(b1_.modes.size() + b2_.modes.size()); }
  int size1() const { return static_cast<int>(b1_.modes.size()); }
  SphereField field(const Eigen::VectorXd& x) const;

  Eigen::VectorXd residual(double mu, const Eigen::VectorXd& x) const;
  SphereField residual(double mu, const SphereField& f) const;

  struct Linearization {
    Eigen::VectorXd F;
    Eigen::MatrixXd Jx;   // dF/dx
    Eigen::VectorXd Jmu;  // dF/dmu
  };
  Linearization linearize(double mu, const Eigen::VectorXd& x) const;
  // Central differences of residual, for checking linearize.
  Linearization linearize_fd(double mu, const Eigen::VectorXd& x, double h = 1e-6) const;

  // Unprojected residual on the grid (both components), for equivariance checks.
  std::pair<Eigen::VectorXd, Eigen::VectorXd> grid_residual(double mu, const Eigen::VectorXd& x) const;

 private:
  SymmetryClass cls_;
  int L_;
  SphereGrid grid_;
  ModeBasis b1_, b2_;
};

struct ContinuationConfig {
  int truncation = 24;
  double ds = 0.01;
  int max_steps = 40;  // per direction
  double newton_tol = 1e-10;
  int max_newton_iters = 12;
  double eps_max = 0.1;
  int z_grid = 0;      // 0: default of GalerkinSystem
  int theta_grid = 0;  // 0: default of GalerkinSystem

  void validate() const;
};

struct BranchPoint {
  double mu = 0.0;
  // phi2 = 2 eps P_n^m(z) cos(m theta) + (terms orthogonal to it)
  double eps = 0.0;
  SphereField field;
  double residual_norm = 0.0;
  int step_index = 0;  // signed: negative on the eps < 0 side
};

struct Branch {
  SymmetryClass cls;
  ContinuationConfig config;
  int z_grid = 0;
  int theta_grid = 0;
  std::vector<BranchPoint> points;  // ascending eps, includes the bifurcation point
  bool complete = true;
  std::string message;
};

// Amplitude of a field along the kernel generator of the class.
double amplitude(const SphereField& f);

// Pseudo-arclength continuation from (mu_n, 0) in both directions of the
// restricted kernel. Throws PreconditionError unless that kernel is
// one-dimensional. On Newton failure below ds/16 the branch is returned with
// complete = false.
Branch continue_branch(const SymmetryClass& cls, const ContinuationConfig& cfg = {});

// Solves T = 0 at fixed eps with mu free, starting from a guess.
BranchPoint correct_at_amplitude(const GalerkinSystem& sys, double eps, const SphereField& guess,
                                 double mu_guess, double newton_tol = 1e-10, int max_iters = 20);

// Least-squares fit of mu against eps with a polynomial of degree up to 4.
struct CurvatureFit {
  double mu2 = 0.0;      // 2 * quadratic coefficient
  double linear = 0.0;   // linear coefficient
  double mu0 = 0.0;
  double residual = 0.0; // rms fit residual
  int degree = 0;
  int points = 0;
};
// Uses points with |eps| <= eps_window (all when <= 0). Throws DegeneracyError
// for fewer than 5 points, no points on one side of 0, or a fit residual
// above tol.
CurvatureFit curvature_estimate(const std::vector<BranchPoint>& points, double eps_window = 0.0,
                                double tol = 1e-6);

// Sphere integrals of e^((phi1+phi2)/2) and e^((phi1-phi2)/2), and the plane
// masses 2/(2+mu) times those.
struct MassCheck {
  double sphere1 = 0.0;
  double sphere2 = 0.0;
  double plane1 = 0.0;
  double plane2 = 0.0;
};
MassCheck mass_check(const BranchPoint& p, int refine = 2);

// Sign changes of phi2(z) for a theta-independent class.
struct ZeroCount {
  int count = 0;
  bool simple = true;
  double min_slope = 0.0;  // min |phi2'| at the zeros relative to max |phi2|
  std::vector<double> zeros;
};
ZeroCount radial_zero_count(const BranchPoint& p, int samples = 4000);

// Fraction of coefficient energy in modes with l > 0.9 L.
double tail_energy(const SphereField& f);

std::string branch_json(const Branch& b);
Branch branch_from_json(const std::string& text);

}  // namespace liouville
