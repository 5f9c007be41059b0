#include "liouville/coefficients.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <nlohmann/json.hpp>
#include <numbers>
#include <sstream>
#include <thread>

#include "liouville/errors.hpp"
#include "liouville/inversion.hpp"
#include "liouville/legendre.hpp"
#include "liouville/spectral.hpp"

namespace liouville {

namespace {

void check_nm(int n, int m) {
  if (n < 1 || m < 0 || m > n) {
    throw DomainError("need n >= 1 and 0 <= m <= n (n=" + std::to_string(n) + ", m=" + std::to_string(m) + ")");
  }
}

// int_a^1 f over a fixed-order rule mapped from [-1, 1]
template <class F>
double tail_integral(const GaussRule& ref, double a, F&& f) {
  const double half = 0.5 * (1.0 - a), mid = 0.5 * (1.0 + a);
  double s = 0.0;
  for (std::size_t i = 0; i < ref.nodes.size(); ++i) s += ref.weights[i] * f(mid + half * ref.nodes[i]);
  return s * half;
}

// Nested integral with weight z: int z P^2 G, G' = I / ((1-y^2) y^2), I(y) = int_y^1 x P^2.
double radial_term(int n, int m, const QuadratureSpec& quad) {
  const GaussRule ref = gauss_legendre(n + 2);
  auto p2 = [n, m](double x) {
    const double v = legendre_p_normalized({n, m}, x);
    return v * v;
  };
  auto inner = [ref, p2](double y) { return tail_integral(ref, y, [&](double x) { return x * p2(x); }); };
  auto dinner = [p2](double y) { return -y * p2(y); };
  Profile lin{[](double z) { return z; }, [](double) { return 1.0; }, [](double) { return 0.0; }};
  GluedAntiderivative G(lin, inner, dinner, quad, -1.0, 1.0, -1.0);
  return integrate_angular([&](double z) { return p2(z) * G.times_profile(z); }, -1.0, 1.0, quad);
}

// Same with weight q(z) = (z+2m) ((1-z)/(1+z))^m, written through the reduced
// function Q = P / (1-z^2)^(m/2) so that no factor over- or underflows:
//   q P^2 = (z+2m) (1-z)^(2m) Q^2,
//   int_y^1 q P^2 = (1-y)^(2m+1) Jt(y),  Jt(y) = int_0^1 (x+2m) (1-t)^(2m) Q(x)^2 dt,
//   integrand of G = Jt(y) (1+y)^(2m-1) / (y+2m)^2.
double angular_term(int n, int m, const QuadratureSpec& quad) {
  if (m == 0) return radial_term(n, 0, quad);
  const GaussRule ref = gauss_legendre(n + 2, 0.0, 1.0);
  const double twom = 2.0 * m;
  auto q2 = [n, m](double x) {
    const double v = legendre_p_reduced({n, m}, x);
    return v * v;
  };
  auto jt = [ref, q2, twom](double y) {
    double s = 0.0;
    for (std::size_t i = 0; i < ref.nodes.size(); ++i) {
      const double t = ref.nodes[i];
      const double x = y + (1.0 - y) * t;
      s += ref.weights[i] * (x + twom) * std::pow(1.0 - t, twom) * q2(x);
    }
    return s;
  };
  auto numerator = [jt, twom](double y) { return std::pow(1.0 - y, twom + 1.0) * jt(y); };
  auto dnumerator = [q2, twom](double y) { return -(y + twom) * std::pow(1.0 - y, twom) * q2(y); };
  auto kernel = [jt, twom](double y) {
    return jt(y) * std::pow(1.0 + y, twom - 1.0) / ((y + twom) * (y + twom));
  };
  Profile q{[m](double z) { return (z + 2.0 * m) * std::pow((1.0 - z) / (1.0 + z), m); },
            [m](double z) {
              const double r = (1.0 - z) / (1.0 + z);
              return std::pow(r, m) * (1.0 - (z + 2.0 * m) * 2.0 * m / ((1.0 - z) * (1.0 + z)));
            },
            [](double) { return 0.0; }};
  GluedAntiderivative G(q, numerator, dnumerator, quad, -1.0, 1.0, -1.0, kernel);
  return integrate_angular(
      [&](double z) { return (z + twom) * std::pow(1.0 - z, twom) * q2(z) * G(z); }, -1.0, 1.0, quad);
}

struct Evaluation {
  CurvatureTerms normalized;
  double mu2 = 0.0;
  double magnitude = 0.0;  // scale of the cancelling sum
};

// c_nm * norm^2 = n(n+1) / (pi (n^2+n+1) (n^2+n+2)^2)
double normalized_factor(int n) {
  const double k = static_cast<double>(n) * (n + 1);
  return k / (std::numbers::pi * (k + 1.0) * (k + 2.0) * (k + 2.0));
}

Evaluation evaluate(int n, int m, const QuadratureSpec& quad) {
  Evaluation e;
  e.normalized.quartic = integrate_angular(
      [n, m](double z) { return std::pow(legendre_p_normalized({n, m}, z), 4); }, 0.0, 1.0, quad);
  e.normalized.radial = radial_term(n, m, quad);
  e.normalized.angular = m == 0 ? e.normalized.radial : angular_term(n, m, quad);
  const double k = normalized_factor(n);
  const CurvatureTerms& t = e.normalized;
  e.mu2 = k * (t.quartic + 2.0 * t.radial + t.angular);
  e.magnitude = k * (std::abs(t.quartic) + 2.0 * std::abs(t.radial) + std::abs(t.angular));
  return e;
}

// relative rounding level of the nested quadratures
constexpr double kRoundingFloor = 1e-11;

}  // namespace

double log_c_nm(int n, int m) {
  check_nm(n, m);
  const double k = static_cast<double>(n) * (n + 1);
  return std::log(k) - std::log(4.0 * (k + 1.0) * std::numbers::pi) +
         2.0 * (std::log(2.0 * n + 1.0) + std::lgamma(n - m + 1.0) - std::log(k + 2.0) -
                std::lgamma(n + m + 1.0));
}

double c_nm(int n, int m) { return std::exp(log_c_nm(n, m)); }

double mu_prime(int n, int m) {
  check_nm(n, m);
  const SymmetryClass cls(n, m);
  const double mu = mu_n(n);
  const SphereGrid grid = make_sphere_grid(2 * n + 8, 4 * (n + m) + 8);
  SphereField w0(cls, n);
  Eigen::VectorXd c2 = w0.coefficients(2);
  c2[w0.index_of(2, n, m)] = 1.0;
  w0 = SphereField(cls, n, w0.coefficients(1), c2);
  const Eigen::VectorXd v1 = synthesize(w0, 1, grid), v2 = synthesize(w0, 2, grid);
  const double lam = lambda_of_mu(mu);
  // second derivative at the trivial solution:
  // (v1 w1 + v2 w2, lambda/2 (v1 w2 + v2 w1)), paired with y0 = w0
  double num = 0.0, den = 0.0, norm2 = 0.0;
  const int nt = static_cast<int>(grid.theta.size());
  for (int p = 0; p < grid.size(); ++p) {
    const double w = grid.wz[p / nt] * grid.wtheta;
    const double d1 = v1[p] * v1[p] + v2[p] * v2[p];
    const double d2 = lam * v1[p] * v2[p];
    num += w * (d1 * v1[p] + d2 * v2[p]);
    den += w * lambda_prime(mu) * v2[p] * v2[p];
    norm2 += w * (v1[p] * v1[p] + v2[p] * v2[p]);
  }
  return -0.5 * num / (std::sqrt(norm2) * den);
}

CurvatureResult mu_second(int n, int m, const QuadratureSpec& quad) {
  check_nm(n, m);
  quad.validate();
  // base, doubled panels, and a narrower finite-part window; the window
  // subtraction error does not move under panel doubling alone
  QuadratureSpec narrow = quad;
  narrow.finite_part_radius *= 0.6;
  const Evaluation coarse = evaluate(n, m, quad);
  const Evaluation fine = evaluate(n, m, quad.refined());
  const Evaluation windowed = evaluate(n, m, narrow);
  const double spread = std::max({std::abs(fine.mu2 - coarse.mu2), std::abs(fine.mu2 - windowed.mu2),
                                  std::abs(coarse.mu2 - windowed.mu2)});
  if (spread > std::max(quad.abs_tol, quad.rel_tol * std::max(std::abs(fine.mu2), fine.magnitude))) {
    throw PrecisionError("mu_second(" + std::to_string(n) + "," + std::to_string(m) +
                             "): refinement changed the value beyond tolerance",
                         coarse.mu2, fine.mu2);
  }
  CurvatureResult r;
  r.n = n;
  r.m = m;
  r.mu2 = fine.mu2;
  r.error_estimate = 2.0 * spread + kRoundingFloor * fine.magnitude;
  r.normalized = fine.normalized;
  const double scale = std::exp(2.0 * log_legendre_norm({n, m}));
  r.terms = {scale * fine.normalized.quartic, scale * fine.normalized.radial, scale * fine.normalized.angular};
  if (std::isfinite(scale) && c_nm(n, m) > 0.0) {
    const CurvatureTerms& t = r.terms;
    r.mu2 = c_nm(n, m) * (t.quartic + 2.0 * t.radial + t.angular);
  }
  const double k = static_cast<double>(n) * (n + 1);
  const CurvatureTerms& t = r.normalized;
  const double s = t.quartic + 2.0 * t.radial + t.angular;
  const double factor = m == 0 ? 16.0 / 3.0 : 4.0;
  r.mu2_branch = factor * k * legendre_norm({n, m}) * s / ((k + 2.0) * (k + 2.0));
  r.in_hypothesis = m >= 1 && n >= m && n < 3 * m;
  return r;
}

std::string sign_symbol(Sign s) {
  switch (s) {
    case Sign::Positive: return "+";
    case Sign::Negative: return "-";
    case Sign::Zero: return "0*";
  }
  return "?";
}

std::vector<SignRow> sign_table(int n_min, int n_max, const QuadratureSpec& quad, int jobs) {
  if (n_min < 1 || n_max < n_min) throw DomainError("need 1 <= n_min <= n_max");
  quad.validate();
  std::vector<SignRow> rows;
  for (int n = n_min; n <= n_max; ++n) {
    for (int m = 0; m <= n; ++m) rows.push_back({n, m, {}, Sign::Zero, {}});
  }
  if (jobs <= 0) jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  jobs = std::min<int>(jobs, static_cast<int>(rows.size()));
  // larger n first so the slow rows do not trail
  std::vector<std::size_t> order(rows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = order.size() - 1 - i;
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t k = next++; k < order.size(); k = next++) {
      SignRow& row = rows[order[k]];
      try {
        row.result = mu_second(row.n, row.m, quad);
        const double v = row.result.mu2;
        if (std::abs(v) < row.result.error_estimate) {
          row.sign = Sign::Zero;
        } else {
          row.sign = v > 0.0 ? Sign::Positive : Sign::Negative;
        }
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int i = 1; i < jobs; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return rows;
}

std::optional<Sign> reference_sign(int n, int m) {
  if (m < 0 || m > n || n < 1) return std::nullopt;
  if (n <= 2) return Sign::Zero;
  if (n > 30) return std::nullopt;
  // m-range with negative curvature for n = 3 .. 22; rows 23 .. 30 are positive
  static const int negative[20][2] = {{2, 2}, {2, 3}, {2, 4}, {2, 4}, {3, 5},  {3, 6},  {4, 6},
                                      {4, 7}, {4, 8}, {5, 8}, {5, 9}, {6, 9},  {6, 10}, {7, 10},
                                      {8, 11}, {8, 11}, {9, 11}, {10, 12}, {11, 12}, {12, 12}};
  if (n <= 22) {
    const auto& r = negative[n - 3];
    if (m >= r[0] && m <= r[1]) return Sign::Negative;
  }
  return Sign::Positive;
}

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }

}  // namespace

std::string sign_table_csv(const std::vector<SignRow>& rows) {
  std::ostringstream os;
  os << "n,m,mu2,error,sign\n";
  for (const SignRow& r : rows) {
    os << r.n << ',' << r.m << ',';
    if (r.ok()) {
      os << format_double(r.result.mu2) << ',' << format_double(r.result.error_estimate) << ','
         << sign_symbol(r.sign);
    } else {
      os << "nan,nan,?";
    }
    os << '\n';
  }
  return os.str();
}

std::string sign_table_json(const std::vector<SignRow>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const SignRow& r : rows) {
    nlohmann::json j;
    j["n"] = r.n;
    j["m"] = r.m;
    if (r.ok()) {
      j["mu2"] = r.result.mu2;
      j["error"] = r.result.error_estimate;
      j["sign"] = sign_symbol(r.sign);
      j["mu2_branch"] = finite_or_null(r.result.mu2_branch);
      j["terms"] = {{"quartic", finite_or_null(r.result.terms.quartic)},
                    {"radial", finite_or_null(r.result.terms.radial)},
                    {"angular", finite_or_null(r.result.terms.angular)}};
      j["normalized_terms"] = {{"quartic", r.result.normalized.quartic},
                               {"radial", r.result.normalized.radial},
                               {"angular", r.result.normalized.angular}};
      j["in_hypothesis"] = r.result.in_hypothesis;
    } else {
      j["error_message"] = r.error;
      j["sign"] = "?";
    }
    if (auto ref = reference_sign(r.n, r.m)) j["reference_sign"] = sign_symbol(*ref);
    out.push_back(j);
  }
  return out.dump(2) + "\n";
}

}  // namespace liouville
