#include <cmath>
#include <nlohmann/json.hpp>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "liouville/coefficients.hpp"
#include "liouville/errors.hpp"
#include "liouville/legendre.hpp"
#include "oracles.hpp"

using namespace liouville;

TEST_CASE("c_nm closed form") {
  CHECK(c_nm(3, 2) == doctest::Approx(1.0 / (249600.0 * std::numbers::pi)).epsilon(1e-13));
  CHECK(c_nm(1, 1) == doctest::Approx(9.0 / (64.0 * 6.0 * std::numbers::pi)).epsilon(1e-13));
  for (int n = 1; n <= 30; ++n) {
    for (int m = 0; m <= n; ++m) CHECK(c_nm(n, m) > 0.0);
  }
  CHECK(std::exp(log_c_nm(30, 30)) == doctest::Approx(c_nm(30, 30)));
  CHECK_THROWS_AS(c_nm(2, 3), DomainError);
}

TEST_CASE("mu_prime vanishes") {
  for (auto [n, m] : {std::pair{3, 2}, {2, 1}, {5, 4}, {3, 3}, {4, 2}, {3, 0}, {6, 5}}) {
    CHECK(std::abs(mu_prime(n, m)) < 1e-10);
  }
}

TEST_CASE("curvature integrals agree with the spectral oracle") {
  for (auto [n, m] : {std::pair{2, 1}, {2, 2}, {3, 2}, {3, 3}, {4, 3}, {5, 2}, {6, 6}, {3, 0}, {4, 0}}) {
    CAPTURE(n);
    CAPTURE(m);
    const CurvatureResult r = mu_second(n, m);
    CHECK(r.normalized.quartic == doctest::Approx(oracle::quartic_term(n, m)).epsilon(1e-12));
    CHECK(r.normalized.radial == doctest::Approx(oracle::spectral_term(n, m, 0)).epsilon(1e-10));
    CHECK(r.normalized.angular == doctest::Approx(oracle::spectral_term(n, m, 2 * m)).epsilon(1e-10));
  }
}

TEST_CASE("mu2 is c_nm times the bracket") {
  for (auto [n, m] : {std::pair{3, 2}, {4, 3}, {7, 1}}) {
    const CurvatureResult r = mu_second(n, m);
    const CurvatureTerms& t = r.terms;
    CHECK(r.mu2 == c_nm(n, m) * (t.quartic + 2.0 * t.radial + t.angular));
    const double scale = legendre_norm({n, m});
    CHECK(t.quartic == doctest::Approx(scale * scale * r.normalized.quartic).epsilon(1e-14));
    CHECK(r.error_estimate < 1e-3 * std::max(1.0, std::abs(r.mu2)));
  }
  // unnormalized terms overflow for large n + m, mu2 stays finite
  const CurvatureResult big = mu_second(30, 30);
  CHECK(std::isfinite(big.mu2));
  CHECK(big.mu2 > 0.0);
}

TEST_CASE("frozen values") {
  // radial and angular terms for unit-norm P_3^2 in closed rational form
  const CurvatureResult r = mu_second(3, 2);
  CHECK(r.normalized.radial == doctest::Approx(-0.2379564879565).epsilon(1e-11));
  CHECK(r.normalized.angular == doctest::Approx(0.02719502719503).epsilon(1e-11));
  CHECK(r.mu2 == doctest::Approx(-1.223046e-4).epsilon(1e-6));
  CHECK(r.mu2_branch == doctest::Approx(-0.685029).epsilon(1e-5));
  CHECK(mu_second(3, 3).mu2 == doctest::Approx(1.070165e-4).epsilon(1e-6));
  CHECK(mu_second(4, 3).mu2 == doctest::Approx(-4.017411e-5).epsilon(1e-6));
}

TEST_CASE("angular term equals radial term at m = 0") {
  for (int n : {1, 2, 3, 6}) {
    const CurvatureResult r = mu_second(n, 0);
    CHECK(r.normalized.angular == r.normalized.radial);
  }
}

TEST_CASE("Toda rows vanish within the error estimate") {
  for (int m : {1, 2}) {
    const CurvatureResult r = mu_second(2, m);
    CHECK(std::abs(r.mu2) < r.error_estimate);
    CHECK(r.error_estimate < 1e-6);
  }
}

TEST_CASE("signs of single rows") {
  CHECK(mu_second(3, 2).mu2 < 0.0);
  CHECK(mu_second(3, 3).mu2 > 0.0);
  CHECK(mu_second(3, 2).in_hypothesis);
  CHECK_FALSE(mu_second(3, 1).in_hypothesis);
  CHECK_FALSE(mu_second(3, 0).in_hypothesis);
}

TEST_CASE("refinement changes each term far below 1e-3") {
  QuadratureSpec q;
  for (auto [n, m] : {std::pair{3, 2}, {8, 4}, {10, 0}}) {
    const CurvatureResult a = mu_second(n, m, q), b = mu_second(n, m, q.refined());
    CHECK(std::abs(a.normalized.radial - b.normalized.radial) < 1e-3 * std::abs(b.normalized.radial));
    CHECK(std::abs(a.normalized.angular - b.normalized.angular) < 1e-3 * std::abs(b.normalized.angular));
    CHECK(std::abs(a.normalized.quartic - b.normalized.quartic) < 1e-3 * std::abs(b.normalized.quartic));
    CHECK(std::abs(a.mu2 - b.mu2) <= a.error_estimate + b.error_estimate);
  }
}

TEST_CASE("parity identity int z P^2 = 0") {
  const GaussRule rule = gauss_legendre(40);
  for (int n = 1; n <= 10; ++n) {
    for (int m = 0; m <= n; ++m) {
      double s = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double p = legendre_p_normalized({n, m}, rule.nodes[i]);
        s += rule.weights[i] * rule.nodes[i] * p * p;
      }
      CHECK(std::abs(s) < 1e-12);
    }
  }
}

TEST_CASE("coarse quadrature raises PrecisionError") {
  QuadratureSpec q;
  q.panel_count = 1;
  q.points_per_panel = 4;
  bool thrown = false;
  try {
    mu_second(6, 3, q);
  } catch (const PrecisionError& e) {
    thrown = true;
    CHECK(e.coarse() != e.fine());
  }
  CHECK(thrown);
  // the sweep keeps going and records the failure per row
  const auto rows = sign_table(6, 6, q, 1);
  CHECK(rows.size() == 7);
  int failed = 0;
  for (const auto& r : rows) failed += r.ok() ? 0 : 1;
  CHECK(failed > 0);
}

TEST_CASE("sign table rows 4, 10 and 23") {
  const auto rows = sign_table(4, 4);
  const Sign expect4[] = {Sign::Positive, Sign::Positive, Sign::Negative, Sign::Negative, Sign::Positive};
  REQUIRE(rows.size() == 5);
  for (int m = 0; m <= 4; ++m) {
    CHECK(rows[m].ok());
    CHECK(rows[m].sign == expect4[m]);
    CHECK(reference_sign(4, m) == expect4[m]);
  }
  const auto r10 = sign_table(10, 10);
  for (const auto& r : r10) {
    const Sign want = (r.m >= 4 && r.m <= 7) ? Sign::Negative : Sign::Positive;
    CHECK(r.sign == want);
  }
  const auto r23 = sign_table(23, 23);
  CHECK(r23.size() == 24);
  for (const auto& r : r23) CHECK(r.sign == Sign::Positive);
  CHECK(reference_sign(2, 1) == Sign::Zero);
  CHECK_FALSE(reference_sign(31, 2).has_value());
}

TEST_CASE("error estimate bounds the true error and the refinement delta for n <= 10") {
  QuadratureSpec q;
  for (int n = 1; n <= 10; ++n) {
    for (int m = 0; m <= n; ++m) {
      CAPTURE(n);
      CAPTURE(m);
      const CurvatureResult a = mu_second(n, m, q), b = mu_second(n, m, q.refined());
      const double k = n * (n + 1.0);
      const double scale = k / (std::numbers::pi * (k + 1.0) * (k + 2.0) * (k + 2.0));
      const double exact = scale * (oracle::quartic_term(n, m) + 2.0 * oracle::spectral_term(n, m, 0) +
                                    oracle::spectral_term(n, m, 2 * m));
      CHECK(std::abs(a.mu2 - exact) <= a.error_estimate);
      CHECK(std::abs(a.mu2 - b.mu2) <= a.error_estimate + b.error_estimate);
    }
  }
}

TEST_CASE("CSV and JSON export") {
  const auto rows = sign_table(2, 3);
  const std::string csv = sign_table_csv(rows);
  std::istringstream is(csv);
  std::string line;
  std::getline(is, line);
  CHECK(line == "n,m,mu2,error,sign");
  int count = 0;
  while (std::getline(is, line)) ++count;
  CHECK(count == 7);
  const auto j = nlohmann::json::parse(sign_table_json(rows));
  CHECK(j.size() == 7);
  CHECK(j[0].at("sign") == "0*");
  CHECK(j[0].at("reference_sign") == "0*");
  CHECK(sign_table_csv(rows) == csv);
}
