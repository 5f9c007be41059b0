#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "liouville/quadrature.hpp"

namespace liouville {

using ScalarFunction = std::function<double(double)>;

// A solution p of the associated Legendre equation with its first two
// derivatives.
struct Profile {
  ScalarFunction value;
  ScalarFunction first;
  ScalarFunction second;
};

// Normalized P_n^l when l <= n, otherwise P-tilde_n^l (bounded at z = 1).
Profile legendre_profile(int n, int l);

// Eigen-level of a component: 1 for component 1 (2 = 1*2), n for component 2.
int eigen_level(int component, int n);

// Solution of
//   (1 - z^2) f'' - 2 z f' + (N(N+1) - l^2 / (1 - z^2)) f = rhs(z),
// N = eigen_level(component, n), bounded at both poles. When l <= N the
// homogeneous solution P_N^l is bounded, rhs must be orthogonal to it and the
// returned f is orthogonal to it as well.
struct ModeSolution {
  std::vector<double> nodes;   // Gauss-Legendre nodes on [-1, 1]
  std::vector<double> values;  // f at the nodes
  ScalarFunction evaluate;     // f anywhere in [-1, 1]
};

// Dense collocation in the normalized P_k^l basis at Gauss-Legendre nodes.
ModeSolution solve_mode(int component, int n, int l, const ScalarFunction& rhs, int nodes = 64);

// Variation of constants with the glued finite-part antiderivative.
ModeSolution solve_mode_variation(int component, int n, int l, const ScalarFunction& rhs,
                                  const QuadratureSpec& spec = {}, int nodes = 64);

// G(z) = FP integral from `anchor` to z of numerator(y) / ((1 - y^2) p(y)^2).
// At each simple zero of p in (z_lo, z_hi) the double pole is integrated in
// the Hadamard finite-part sense, so p * G extends continuously across it.
// `kernel`, when given, evaluates the integrand directly (for better scaling);
// it must agree with numerator / ((1 - y^2) p^2).
class GluedAntiderivative {
 public:
  GluedAntiderivative(Profile p, ScalarFunction numerator, ScalarFunction numerator_derivative,
                      const QuadratureSpec& spec = {}, double z_lo = -1.0, double z_hi = 1.0,
                      double anchor = -1.0, ScalarFunction kernel = {});

  double operator()(double z) const;
  double times_profile(double z) const;
  const std::vector<double>& zeros() const { return zeros_; }

 private:
  Profile p_;
  std::vector<double> zeros_;
  std::vector<double> zero_slope_;
  std::unique_ptr<AnchoredIntegral> integral_;
};

// Simple zeros of p in (z_lo, z_hi), ascending. Throws DegeneracyError on a
// double zero.
std::vector<double> profile_zeros(const Profile& p, double z_lo, double z_hi);

}  // namespace liouville
