#include <cmath>
#include <random>

#include "doctest.h"
#include "liouville/errors.hpp"
#include "liouville/legendre.hpp"
#include "liouville/spectral.hpp"

using namespace liouville;

namespace {

SphereField random_field(const SymmetryClass& cls, int L, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SphereField f(cls, L);
  Eigen::VectorXd x(f.packed().size());
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = u(gen);
  return f.with_packed(x);
}

}  // namespace

TEST_CASE("bifurcation values") {
  CHECK(mu_n(1) == 0.0);
  CHECK(mu_n(2) == -1.0);
  CHECK(mu_n(3) == doctest::Approx(-10.0 / 7.0).epsilon(1e-15));
  for (int n = 1; n <= 50; ++n) {
    CHECK(lambda_of_mu(mu_n(n)) == doctest::Approx(n * (n + 1.0)).epsilon(1e-12));
    CHECK(bifurcation_level(mu_n(n)) == n);
  }
  CHECK(bifurcation_level(0.37) == -1);
  CHECK_THROWS_AS(lambda_of_mu(-2.0), PoleError);
}

TEST_CASE("kernel dimensions") {
  const auto k = kernel_basis(0.37);
  CHECK(k.size() == 3);
  for (const auto& e : k) CHECK(e.component == 1);
  CHECK(kernel_basis(-1.0).size() == 8);
  CHECK(kernel_basis(-10.0 / 7.0).size() == 10);
  for (int n = 1; n <= 10; ++n) {
    const double mu = mu_n(n);
    const auto basis = kernel_basis(mu);
    CHECK(basis.size() == static_cast<std::size_t>(2 * n + 4));
    for (const auto& e : basis) CHECK(std::abs(linearized_factor(mu, e.component, e.l)) < 1e-12);
  }
  CHECK_THROWS_AS(kernel_basis(2.0), DomainError);
  CHECK_THROWS_AS(kernel_basis(-2.5), DomainError);
}

TEST_CASE("restricted kernel is one-dimensional exactly when m > n/3") {
  for (int n = 1; n <= 10; ++n) {
    for (int m = 1; m <= n; ++m) {
      const auto k = restricted_kernel_basis(SymmetryClass(n, m));
      if (3 * m > n) {
        CHECK(k.size() == 1);
      } else {
        CHECK(k.size() >= 2);
      }
      // brute force: admissible cos elements of the full kernel
      std::size_t admissible = 0;
      for (const auto& e : kernel_basis(mu_n(n))) {
        if (!e.sine && e.component == 2 && SymmetryClass(n, m).admits(2, e.l, e.j)) ++admissible;
      }
      CHECK(k.size() == admissible);
    }
  }
  const auto k31 = restricted_kernel_basis(SymmetryClass(3, 1));
  REQUIRE(k31.size() == 2);
  CHECK(k31[0].coefficient(2, 3, 1) != 0.0);
  CHECK(k31[1].coefficient(2, 3, 3) != 0.0);
  const auto k32 = restricted_kernel_basis(SymmetryClass(3, 2));
  REQUIRE(k32.size() == 1);
  CHECK(k32[0].coefficient(2, 3, 2) == doctest::Approx(std::sqrt(legendre_norm({3, 2}))));
  CHECK(k32[0].coefficients(1).norm() == 0.0);
  CHECK(restricted_kernel_basis(SymmetryClass(2, 2)).size() == 1);
  // the generator is P_3^2(z) cos(2 theta)
  CHECK(k32[0].value(2, 0.5, 0.3) == doctest::Approx(legendre_p({3, 2}, 0.5) * std::cos(0.6)));
}

TEST_CASE("linearized factors") {
  CHECK(linearized_factor(0.7, 1, 1) == 0.0);
  CHECK(linearized_factor(mu_n(4), 2, 4) == doctest::Approx(0.0).scale(1.0));
  CHECK(linearized_factor(-1.0, 2, 3) == doctest::Approx(-6.0));
  const SymmetryClass cls(3, 2);
  const SphereField f = random_field(cls, 9, 1);
  const SphereField g = linearized_apply(-1.0, f);
  for (std::size_t i = 0; i < f.modes(2).size(); ++i) {
    const int l = f.modes(2)[i].l;
    CHECK(g.coefficients(2)[i] == doctest::Approx((6.0 - l * (l + 1.0)) * f.coefficients(2)[i]));
  }
  CHECK_THROWS_AS(linearized_apply(-2.0, f), PoleError);
}

TEST_CASE("morse index jumps by one across mu_3 in X(3,2)") {
  const SymmetryClass cls(3, 2);
  const double m3 = mu_n(3);
  const int below = morse_index(m3 - 0.01, cls, 20), above = morse_index(m3 + 0.01, cls, 20);
  CHECK(below - above == 1);
  CHECK_THROWS_AS(morse_index(m3, cls, 20), DomainError);
  // nonincreasing in mu, with unit jumps at the mu_k whose mode lies in the class
  int prev = morse_index(-1.999, cls, 20);
  for (double mu = -1.99; mu < 1.95; mu += 0.0137) {
    if (bifurcation_level(mu, 1e-6) > 0) continue;
    const int cur = morse_index(mu, cls, 20);
    CHECK(cur <= prev);
    prev = cur;
  }
  // at mu = 1.9 component 2 contributes nothing; component 1 only through l = 0
  CHECK(morse_index(1.9, cls, 20) == 1);
}

TEST_CASE("admissible modes") {
  const SymmetryClass cls(3, 2);
  CHECK(cls.admits(1, 0, 0));
  CHECK(cls.admits(1, 4, 4));
  CHECK_FALSE(cls.admits(1, 2, 2));
  CHECK_FALSE(cls.admits(1, 3, 0));
  CHECK(cls.admits(2, 3, 2));
  CHECK(cls.admits(2, 7, 6));
  CHECK_FALSE(cls.admits(2, 4, 2));
  CHECK_FALSE(cls.admits(2, 5, 4));
  const SymmetryClass radial(3, 0);
  CHECK(radial.admits(2, 5, 0));
  CHECK_FALSE(radial.admits(2, 5, 1));
  CHECK_FALSE(radial.admits(1, 1, 0));
  for (const Mode& md : cls.modes(2, 12)) CHECK(cls.admits(2, md.l, md.j));
  CHECK_THROWS_AS(SymmetryClass(0, 1), DomainError);
}

TEST_CASE("synthesis and analysis round trip") {
  for (auto [n, m] : {std::pair{3, 2}, {4, 1}, {5, 0}, {6, 5}}) {
    const SymmetryClass cls(n, m);
    const int L = 16;
    const SphereField f = random_field(cls, L, 7u + n);
    const SphereGrid grid = make_sphere_grid(2 * L + 2, 4 * L + 4);
    for (int c = 1; c <= 2; ++c) {
      const ModeBasis b = make_mode_basis(f.modes(c), grid);
      const Eigen::VectorXd back = b.analysis * (b.synth * f.coefficients(c));
      CHECK((back - f.coefficients(c)).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("fields carry the symmetries of the class") {
  for (auto [n, m] : {std::pair{3, 2}, {4, 3}, {5, 2}, {4, 4}}) {
    const SymmetryClass cls(n, m);
    const int L = 12;
    const SphereField f = random_field(cls, L, 11u * n + m);
    const int nz = 2 * L + 2, nt = 8 * m * 4;
    const SphereGrid grid = make_sphere_grid(nz, nt);
    const Eigen::VectorXd v1 = synthesize(f, 1, grid), v2 = synthesize(f, 2, grid);
    const int shift = nt / (2 * m);
    double worst = 0.0;
    for (int iz = 0; iz < nz; ++iz) {
      const int mz = nz - 1 - iz;  // Gauss nodes are symmetric
      for (int it = 0; it < nt; ++it) {
        const int p = iz * nt + it;
        const int rot = iz * nt + (it + shift) % nt;
        const int refl = iz * nt + ((shift - it) % nt + nt) % nt;
        const int sig = mz * nt + it;
        worst = std::max(worst, std::abs(v1[sig] - v1[p]));
        worst = std::max(worst, std::abs(v2[sig] - cls.parity2() * v2[p]));
        worst = std::max(worst, std::abs(v1[rot] - v1[p]));
        worst = std::max(worst, std::abs(v2[rot] + v2[p]));
        worst = std::max(worst, std::abs(v1[refl] - v1[p]));
        worst = std::max(worst, std::abs(v2[refl] + v2[p]));
      }
    }
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("full analysis sees only admissible cos modes") {
  const SymmetryClass cls(3, 2);
  const int L = 10;
  const SphereField f = random_field(cls, L, 3);
  const SphereGrid grid = make_sphere_grid(2 * L + 2, 4 * L + 4);
  for (int c = 1; c <= 2; ++c) {
    const auto spec = analyze_full(synthesize(f, c, grid), grid, L);
    for (const auto& e : spec) {
      const double expect = e.sine ? 0.0 : f.coefficient(c, e.l, e.j);
      CHECK(std::abs(e.value - expect) < 1e-10);
    }
  }
}
