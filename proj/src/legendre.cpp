#include "liouville/legendre.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "liouville/errors.hpp"

namespace liouville {

namespace {

void check_index(LegendreIndex idx) {
  if (idx.n < 0 || idx.m < 0 || idx.m > idx.n) {
    throw DomainError("invalid Legendre index (n=" + std::to_string(idx.n) +
                      ", m=" + std::to_string(idx.m) + ")");
  }
}

void check_argument(double z) {
  if (!(std::abs(z) <= 1.0)) {
    throw DomainError("Legendre argument outside [-1, 1]: " + std::to_string(z));
  }
}

// Fills normalized P_l^m for l = m..l_max; `s` multiplies each step of the
// diagonal seed (s = sqrt(1 - z^2) for the full function, 1 for the reduced one).
void column_impl(int m, int l_max, double z, double s, std::span<double> out) {
  double p = std::sqrt(0.5);
  for (int k = 1; k <= m; ++k) {
    p *= -std::sqrt((2.0 * k + 1.0) / (2.0 * k)) * s;
  }
  out[0] = p;
  if (l_max == m) return;
  out[1] = std::sqrt(2.0 * m + 3.0) * z * p;
  for (int l = m + 2; l <= l_max; ++l) {
    const double ll = l, mm = m;
    const double a = std::sqrt((4.0 * ll * ll - 1.0) / (ll * ll - mm * mm));
    const double b = std::sqrt((2.0 * ll + 1.0) * ((ll - 1.0) * (ll - 1.0) - mm * mm) /
                               ((2.0 * ll - 3.0) * (ll * ll - mm * mm)));
    out[l - m] = a * z * out[l - m - 1] - b * out[l - m - 2];
  }
}

// Same recurrence as column_impl keeping only the last two terms.
double normalized_value(LegendreIndex idx, double z, bool reduced) {
  check_index(idx);
  check_argument(z);
  const int m = idx.m;
  const double s = reduced ? 1.0 : std::sqrt(std::max(0.0, 1.0 - z * z));
  double p = std::sqrt(0.5);
  for (int k = 1; k <= m; ++k) p *= -std::sqrt((2.0 * k + 1.0) / (2.0 * k)) * s;
  if (idx.n == m) return p;
  double prev = p, cur = std::sqrt(2.0 * m + 3.0) * z * p;
  for (int l = m + 2; l <= idx.n; ++l) {
    const double ll = l, mm = m;
    const double a = std::sqrt((4.0 * ll * ll - 1.0) / (ll * ll - mm * mm));
    const double b = std::sqrt((2.0 * ll + 1.0) * ((ll - 1.0) * (ll - 1.0) - mm * mm) /
                               ((2.0 * ll - 3.0) * (ll * ll - mm * mm)));
    const double next = a * z * cur - b * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double log_binomial(double n, double k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

double log_legendre_norm(LegendreIndex idx) {
  check_index(idx);
  return std::log(2.0) + std::lgamma(idx.n + idx.m + 1.0) - std::log(2.0 * idx.n + 1.0) -
         std::lgamma(idx.n - idx.m + 1.0);
}

double legendre_norm(LegendreIndex idx) { return std::exp(log_legendre_norm(idx)); }

double legendre_p_normalized(LegendreIndex idx, double z) {
  return normalized_value(idx, z, false);
}

double legendre_p_reduced(LegendreIndex idx, double z) { return normalized_value(idx, z, true); }

double legendre_p(LegendreIndex idx, double z) {
  const double v = normalized_value(idx, z, false);
  return v * std::exp(0.5 * log_legendre_norm(idx));
}

void legendre_column(int m, int l_max, double z, std::span<double> out) {
  check_index({l_max, m});
  check_argument(z);
  column_impl(m, l_max, z, std::sqrt(std::max(0.0, 1.0 - z * z)), out);
}

void legendre_column_reduced(int m, int l_max, double z, std::span<double> out) {
  check_index({l_max, m});
  check_argument(z);
  column_impl(m, l_max, z, 1.0, out);
}

LegendreJet legendre_p_jet(LegendreIndex idx, double z, bool normalized) {
  check_index(idx);
  if (!(std::abs(z) < 1.0)) throw DomainError("derivatives need |z| < 1");
  const int n = idx.n, m = idx.m;
  std::vector<double> col(static_cast<std::size_t>(n - m + 1));
  column_impl(m, n, z, std::sqrt(1.0 - z * z), col);
  const double q = 1.0 - z * z;
  const double p = col.back();
  const double prev = n > m ? col[n - m - 1] : 0.0;
  const double c = std::sqrt((2.0 * n + 1.0) * (n - m) * (n + m) / (2.0 * n - 1.0));
  const double dp = ((n > m ? c * prev : 0.0) - n * z * p) / q;
  const double ddp = (2.0 * z * dp - (n * (n + 1.0) - m * m / q) * p) / q;
  const double scale = normalized ? 1.0 : std::exp(0.5 * log_legendre_norm(idx));
  return {p * scale, dp * scale, ddp * scale};
}

LegendreJet legendre_p_tilde_jet(LegendreIndex idx, double z) {
  const int n = idx.n, m = idx.m;
  if (n < 0 || m < 0) throw DomainError("invalid index for P-tilde");
  if (!(z > -1.0 && z <= 1.0)) {
    if (z == -1.0 && m == 0) {
      // polynomial case, evaluate by continuity below
    } else if (z == -1.0) {
      throw PoleError("P-tilde has a pole at z = -1 for m >= 1");
    } else {
      throw DomainError("P-tilde argument outside (-1, 1]");
    }
  }
  const double x = 0.5 * (1.0 - z);
  double sum = 0.0, dsum = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double mag = std::exp(log_binomial(n, k) + log_binomial(n + k, k) - log_binomial(m + k, k));
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    sum += sign * mag * std::pow(x, k);
    if (k > 0) dsum += sign * mag * k * std::pow(x, k - 1) * (-0.5);
  }
  if (m == 0) {
    LegendreJet jet{sum, dsum, 0.0};
    if (std::abs(z) < 1.0) {
      jet.second = (2.0 * z * dsum - n * (n + 1.0) * sum) / (1.0 - z * z);
    }
    return jet;
  }
  const double ratio = (1.0 - z) / (1.0 + z);
  const double pre = std::pow(ratio, 0.5 * m);
  LegendreJet jet;
  jet.value = pre * sum;
  if (std::abs(z) < 1.0) {
    const double q = 1.0 - z * z;
    jet.first = -m * jet.value / q + pre * dsum;
    jet.second = (2.0 * z * jet.first - (n * (n + 1.0) - m * m / q) * jet.value) / q;
  } else {
    jet.first = 0.0;  // z = 1 with m >= 1: the prefactor vanishes to order m/2
  }
  return jet;
}

double legendre_p_tilde(LegendreIndex idx, double z) { return legendre_p_tilde_jet(idx, z).value; }

GaussRule gauss_legendre(int order, double a, double b) {
  if (order < 1) throw DomainError("Gauss rule needs at least one point");
  GaussRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  const int half_count = (order + 1) / 2;
  for (int i = 0; i < half_count; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (order == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (order == 1) p0 = 1.0;
      dp = order * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = mid - half * x;
    rule.nodes[order - 1 - i] = mid + half * x;
    rule.weights[i] = rule.weights[order - 1 - i] = half * w;
  }
  if (order % 2 == 1) rule.nodes[order / 2] = mid;
  return rule;
}

}  // namespace liouville
