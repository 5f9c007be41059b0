#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace liouville {

// Bifurcation values of the sphere problem: mu_n = -2 (n^2+n-2) / (n^2+n+2).
double mu_n(int n);

// lambda(mu) = 2 (2 - mu) / (2 + mu) and its derivative in mu.
double lambda_of_mu(double mu);
double lambda_prime(double mu);

// Eigenvalue of the linearization at the trivial solution on a degree-l mode.
// Component 1: 2 - l(l+1); component 2: lambda(mu) - l(l+1).
double linearized_factor(double mu, int component, int l);

struct Mode {
  int l = 0;
  int j = 0;
  bool operator==(const Mode&) const = default;
};

// Fields invariant under z -> -z (phi_1 even, phi_2 with parity (-1)^(n+m)),
// theta -> theta + pi/m (phi_1 fixed, phi_2 odd), theta -> pi/m - theta.
// Only cos(j theta) modes occur. m = 0 means theta-independent fields.
class SymmetryClass {
 public:
  SymmetryClass(int n, int m);
  int n() const { return n_; }
  int m() const { return m_; }
  bool admits(int component, int l, int j) const;
  // Admissible (l, j), sorted by j then l, with l <= L.
  std::vector<Mode> modes(int component, int L) const;
  // Sign of component 2 under z -> -z.
  int parity2() const { return (n_ + m_) % 2 == 0 ? 1 : -1; }
  std::string label() const;
  bool operator==(const SymmetryClass&) const = default;

 private:
  int n_;
  int m_;
};

// Two scalar fields on the sphere expanded in normalized cos modes
// Phat_l^j(z) cos(j theta), Phat of unit L2 norm on [-1, 1].
class SphereField {
 public:
  SphereField(SymmetryClass cls, int L);
  SphereField(SymmetryClass cls, int L, Eigen::VectorXd c1, Eigen::VectorXd c2);

  const SymmetryClass& symmetry() const { return cls_; }
  int truncation() const { return L_; }
  const std::vector<Mode>& modes(int component) const { return component == 1 ? m1_ : m2_; }
  const Eigen::VectorXd& coefficients(int component) const { return component == 1 ? c1_ : c2_; }
  // Coefficient of the normalized mode, 0 when (l, j) is not stored.
  double coefficient(int component, int l, int j) const;
  int index_of(int component, int l, int j) const;  // -1 if absent

  double value(int component, double z, double theta) const;
  // Value and z-derivatives up to order 2 of component at (z, theta); |z| < 1.
  struct Jet {
    double value = 0.0, dz = 0.0, dzz = 0.0, dtt = 0.0;
  };
  Jet jet(int component, double z, double theta) const;

  // Flat coefficient vector [c1; c2].
  Eigen::VectorXd packed() const;
  SphereField with_packed(const Eigen::VectorXd& x) const;

 private:
  SymmetryClass cls_;
  int L_;
  std::vector<Mode> m1_, m2_;
  Eigen::VectorXd c1_, c2_;
};

// Tensor grid: Gauss-Legendre in z, uniform in theta on [0, 2 pi).
struct SphereGrid {
  std::vector<double> z;
  std::vector<double> wz;
  std::vector<double> theta;
  double wtheta = 0.0;
  int size() const { return static_cast<int>(z.size() * theta.size()); }
  // point index p = iz * theta.size() + it
};
SphereGrid make_sphere_grid(int nz, int ntheta);

// Synthesis / analysis matrices for one component of a class on a grid.
struct ModeBasis {
  std::vector<Mode> modes;
  Eigen::MatrixXd synth;     // grid x modes
  Eigen::MatrixXd analysis;  // modes x grid, analysis * synth = I on resolved modes
  Eigen::VectorXd degree;    // l(l+1) per mode
};
ModeBasis make_mode_basis(const std::vector<Mode>& modes, const SphereGrid& grid);

// Samples both components of a field on the grid.
Eigen::VectorXd synthesize(const SphereField& f, int component, const SphereGrid& grid);

// Projection of grid data onto every cos and sin mode with l <= L.
struct FullSpectrumEntry {
  int l = 0;
  int j = 0;
  bool sine = false;
  double value = 0.0;
};
std::vector<FullSpectrumEntry> analyze_full(const Eigen::VectorXd& samples, const SphereGrid& grid, int L);

// Element of the unrestricted kernel of the linearization at (mu, 0):
// coefficient times P_l^j(z) cos(j theta) (or sin) in one component.
struct KernelElement {
  int component = 1;
  int l = 0;
  int j = 0;
  bool sine = false;
  std::string describe() const;
};

// Kernel of the linearization at the trivial solution. Dimension 3, or 2n+4
// when mu = mu_n (n >= 1, up to a relative tolerance of 1e-12).
std::vector<KernelElement> kernel_basis(double mu);

// Degree n with mu = mu_n within tolerance, or -1.
int bifurcation_level(double mu, double rel_tol = 1e-12);

// Kernel restricted to the class at mu_n: P_n^j cos(j theta) in component 2
// for j an odd multiple of m (j = 0 when m = 0) with j <= n. The fields hold
// the unnormalized Legendre function.
std::vector<SphereField> restricted_kernel_basis(const SymmetryClass& cls);

// Applies the linearization at the trivial solution mode by mode.
SphereField linearized_apply(double mu, const SphereField& f);

// Number of positive linearized eigenvalues over admissible modes with l <= L.
// Throws DomainError when mu is within 1e-9 (relative) of some mu_k, k <= L.
int morse_index(double mu, const SymmetryClass& cls, int L);

}  // namespace liouville
