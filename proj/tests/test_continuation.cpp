#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "liouville/coefficients.hpp"
#include "liouville/continuation.hpp"
#include "liouville/errors.hpp"

using namespace liouville;

namespace {

Eigen::VectorXd random_vector(int size, unsigned seed, double scale) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  Eigen::VectorXd x(size);
  for (int i = 0; i < size; ++i) x[i] = u(gen);
  return x;
}

// decaying random coefficients so that the field is smooth
Eigen::VectorXd smooth_vector(const GalerkinSystem& sys, unsigned seed, double scale) {
  Eigen::VectorXd x = random_vector(sys.size(), seed, scale);
  const SphereField f = sys.field(x);
  for (int i = 0; i < sys.size1(); ++i) x[i] /= 1.0 + f.modes(1)[i].l * f.modes(1)[i].l;
  for (int i = sys.size1(); i < sys.size(); ++i) {
    const int l = f.modes(2)[i - sys.size1()].l;
    x[i] /= 1.0 + l * l;
  }
  return x;
}

ContinuationConfig config(double eps_max, double ds) {
  ContinuationConfig c;
  c.eps_max = eps_max;
  c.ds = ds;
  c.max_steps = 200;
  return c;
}

}  // namespace

TEST_CASE("zero field is a solution for every mu") {
  const GalerkinSystem sys(SymmetryClass(3, 2), 12);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(sys.size());
  for (double mu : {-1.5, -0.3, 0.0, 1.2}) CHECK(sys.residual(mu, zero).norm() < 1e-13);
}

TEST_CASE("resolution checks") {
  CHECK_THROWS_AS(GalerkinSystem(SymmetryClass(3, 2), 12, 8, 0), ResolutionError);
  CHECK_THROWS_AS(GalerkinSystem(SymmetryClass(3, 2), 12, 0, 30), ResolutionError);  // not a multiple of 4
  CHECK_THROWS_AS(GalerkinSystem(SymmetryClass(3, 2), 12, 0, 20), ResolutionError);
  ContinuationConfig c;
  c.ds = -1.0;
  CHECK_THROWS(c.validate());
}

TEST_CASE("derivatives at the trivial solution") {
  const SymmetryClass cls(3, 2);
  const GalerkinSystem sys(cls, 12);
  const Eigen::VectorXd w = smooth_vector(sys, 5, 1.0);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(sys.size());
  const double mu = -0.7, h = 1e-4;
  // first derivative matches the mode-wise linearization
  const Eigen::VectorXd d1 = (sys.residual(mu, h * w) - sys.residual(mu, -h * w)) / (2 * h);
  const Eigen::VectorXd lin = linearized_apply(mu, sys.field(w)).packed();
  CHECK((d1 - lin).cwiseAbs().maxCoeff() < 1e-8 * (1.0 + lin.cwiseAbs().maxCoeff()));
  // second derivative on the grid: (w1^2 + w2^2, lambda w1 w2)
  const double t = 1e-3;
  const auto rp = sys.grid_residual(mu, t * w), rm = sys.grid_residual(mu, -t * w), r0 = sys.grid_residual(mu, zero);
  const SphereField f = sys.field(w);
  const Eigen::VectorXd w1 = synthesize(f, 1, sys.grid()), w2 = synthesize(f, 2, sys.grid());
  const Eigen::VectorXd d2a = (rp.first + rm.first - 2 * r0.first) / (t * t);
  const Eigen::VectorXd d2b = (rp.second + rm.second - 2 * r0.second) / (t * t);
  const Eigen::VectorXd e1 = w1.cwiseProduct(w1) + w2.cwiseProduct(w2);
  const Eigen::VectorXd e2 = lambda_of_mu(mu) * w1.cwiseProduct(w2);
  const double s = 1.0 + e1.cwiseAbs().maxCoeff();
  CHECK((d2a - e1).cwiseAbs().maxCoeff() < 1e-4 * s);
  CHECK((d2b - e2).cwiseAbs().maxCoeff() < 1e-4 * s);
}

TEST_CASE("analytic Jacobian agrees with finite differences") {
  for (auto [n, m] : {std::pair{3, 2}, {3, 0}, {4, 3}}) {
    const GalerkinSystem sys(SymmetryClass(n, m), 10);
    const Eigen::VectorXd x = smooth_vector(sys, 17u + n + m, 0.5);
    const double mu = -1.1;
    const auto a = sys.linearize(mu, x), fd = sys.linearize_fd(mu, x);
    CHECK((a.F - fd.F).norm() == 0.0);
    CHECK((a.Jx - fd.Jx).cwiseAbs().maxCoeff() < 1e-6 * (1.0 + a.Jx.cwiseAbs().maxCoeff()));
    CHECK((a.Jmu - fd.Jmu).cwiseAbs().maxCoeff() < 1e-6 * (1.0 + a.Jmu.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("residual stays in the symmetry class") {
  const SymmetryClass cls(3, 2);
  const int L = 10;
  const GalerkinSystem sys(cls, L);
  const Eigen::VectorXd x = smooth_vector(sys, 23, 0.5);
  const auto [g1, g2] = sys.grid_residual(-0.9, x);
  // resolved range of the grid: quadratic nonlinearity doubles the degree
  for (const auto& e : analyze_full(g1, sys.grid(), L)) {
    if (!cls.admits(1, e.l, e.j) || e.sine) CHECK(std::abs(e.value) < 1e-10);
  }
  for (const auto& e : analyze_full(g2, sys.grid(), L)) {
    if (!cls.admits(2, e.l, e.j) || e.sine) CHECK(std::abs(e.value) < 1e-10);
  }
}

TEST_CASE("branch from (mu_3, 0) in X(3,2)") {
  const Branch b = continue_branch(SymmetryClass(3, 2), config(0.1, 0.01));
  REQUIRE(b.complete);
  REQUIRE(b.points.size() > 10);
  bool has_zero = false;
  for (std::size_t i = 0; i < b.points.size(); ++i) {
    const auto& p = b.points[i];
    CHECK(p.residual_norm < 1e-9);
    if (i > 0) CHECK(p.eps > b.points[i - 1].eps);
    CHECK(std::abs(amplitude(p.field) - p.eps) < 1e-12);
    if (p.eps == 0.0) {
      has_zero = true;
      CHECK(p.mu == doctest::Approx(-10.0 / 7.0).epsilon(1e-12));
    }
  }
  CHECK(has_zero);
  CHECK(b.points.front().eps < -0.1 + 0.05);
  CHECK(b.points.back().eps > 0.1 - 0.05);
  // mu is even in eps
  const GalerkinSystem sys(SymmetryClass(3, 2), b.config.truncation);
  for (const auto& p : b.points) {
    if (p.eps <= 0.02) continue;
    const BranchPoint q = correct_at_amplitude(sys, -p.eps, p.field.with_packed(-p.field.packed()), p.mu);
    CHECK(q.mu == doctest::Approx(p.mu).epsilon(1e-9));
  }
  const CurvatureFit fit = curvature_estimate(b.points);
  CHECK(std::abs(fit.linear) < 10 * 0.01 * 0.01);
  const double target = mu_second(3, 2).mu2_branch;
  CHECK(std::abs(fit.mu2 - target) < 0.05 * std::abs(target));
  CHECK(fit.mu2 < 0.0);
}

TEST_CASE("Toda branch (2,1) keeps mu fixed") {
  const Branch b = continue_branch(SymmetryClass(2, 1), config(0.1, 0.01));
  REQUIRE(b.complete);
  for (const auto& p : b.points) CHECK(std::abs(p.mu + 1.0) < 1e-8);
}

TEST_CASE("radial branch (3,0) has three simple zeros") {
  const Branch b = continue_branch(SymmetryClass(3, 0), config(0.1, 0.01));
  REQUIRE(b.complete);
  for (const auto& p : b.points) {
    if (p.eps == 0.0) {
      CHECK_THROWS_AS(radial_zero_count(p), PreconditionError);
      continue;
    }
    const ZeroCount zc = radial_zero_count(p);
    CHECK(zc.count == 3);
    CHECK(zc.simple);
  }
  CHECK_THROWS_AS(radial_zero_count(continue_branch(SymmetryClass(3, 2), config(0.02, 0.01)).points.back()),
                  PreconditionError);
}

TEST_CASE("two-dimensional restricted kernel is rejected") {
  try {
    continue_branch(SymmetryClass(3, 1));
    FAIL("expected PreconditionError");
  } catch (const PreconditionError& e) {
    const std::string what = e.what();
    CHECK(what.find("P_3^1") != std::string::npos);
    CHECK(what.find("P_3^3") != std::string::npos);
  }
}

TEST_CASE("curvature fit rejects degenerate input") {
  const Branch b = continue_branch(SymmetryClass(3, 2), config(0.05, 0.01));
  std::vector<BranchPoint> one_sided;
  for (const auto& p : b.points)
    if (p.eps >= 0.0) one_sided.push_back(p);
  CHECK_THROWS_AS(curvature_estimate(one_sided), DegeneracyError);
  std::vector<BranchPoint> few(b.points.begin(), b.points.begin() + 3);
  CHECK_THROWS_AS(curvature_estimate(few), DegeneracyError);
  // a trivial family is not a branch
  std::vector<BranchPoint> trivial = b.points;
  for (std::size_t i = 0; i < trivial.size(); ++i) trivial[i].mu = (i % 2 ? 0.1 : -0.1);
  CHECK_THROWS_AS(curvature_estimate(trivial), DegeneracyError);
}

TEST_CASE("masses along the branch") {
  const Branch b = continue_branch(SymmetryClass(3, 2), config(0.1, 0.01));
  for (const auto& p : b.points) {
    const MassCheck mc = mass_check(p);
    CHECK(std::abs(mc.sphere1 - 4 * std::numbers::pi) < 1e-9);
    CHECK(std::abs(mc.sphere2 - 4 * std::numbers::pi) < 1e-9);
    CHECK(mc.plane1 == doctest::Approx(8 * std::numbers::pi / (2 + p.mu)).epsilon(1e-10));
  }
}

TEST_CASE("doubling the truncation moves mu below 1e-6") {
  const Branch b = continue_branch(SymmetryClass(3, 2), config(0.1, 0.01));
  const BranchPoint& p = b.points.back();
  const GalerkinSystem fine(SymmetryClass(3, 2), 48);
  SphereField guess(SymmetryClass(3, 2), 48);
  Eigen::VectorXd c1 = Eigen::VectorXd::Zero(guess.modes(1).size());
  Eigen::VectorXd c2 = Eigen::VectorXd::Zero(guess.modes(2).size());
  for (int c = 1; c <= 2; ++c) {
    for (std::size_t i = 0; i < p.field.modes(c).size(); ++i) {
      const Mode md = p.field.modes(c)[i];
      (c == 1 ? c1 : c2)[guess.index_of(c, md.l, md.j)] = p.field.coefficients(c)[i];
    }
  }
  const BranchPoint q = correct_at_amplitude(fine, p.eps, SphereField(guess.symmetry(), 48, c1, c2), p.mu);
  CHECK(std::abs(q.mu - p.mu) < 1e-6);
  CHECK(tail_energy(q.field) < 1e-12);
}

TEST_CASE("branch JSON round trip") {
  const Branch b = continue_branch(SymmetryClass(3, 2), config(0.03, 0.01));
  const std::string text = branch_json(b);
  const Branch c = branch_from_json(text);
  CHECK(c.cls == b.cls);
  REQUIRE(c.points.size() == b.points.size());
  for (std::size_t i = 0; i < b.points.size(); ++i) {
    CHECK(c.points[i].mu == b.points[i].mu);
    CHECK(c.points[i].eps == b.points[i].eps);
    CHECK(c.points[i].field.packed() == b.points[i].field.packed());
  }
  CHECK(branch_json(c) == text);
  CHECK_THROWS_AS(branch_from_json("{\"n\": 3}"), DomainError);
  CHECK_THROWS_AS(branch_from_json("not json"), DomainError);
}
