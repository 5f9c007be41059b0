#pragma once

#include <span>
#include <vector>

namespace liouville {

// Degree n, order m of an associated Legendre function.
struct LegendreIndex {
  int n = 0;
  int m = 0;
};

// P_n^m(z) with the Condon-Shortley phase (-1)^m.
double legendre_p(LegendreIndex idx, double z);

// P_n^m / sqrt(norm), unit L2 norm on [-1, 1].
double legendre_p_normalized(LegendreIndex idx, double z);

// Normalized P_n^m divided by (1 - z^2)^(m/2); a polynomial of degree n - m.
double legendre_p_reduced(LegendreIndex idx, double z);

struct LegendreJet {
  double value = 0.0;
  double first = 0.0;
  double second = 0.0;
};

// Value and two z-derivatives of P_n^m (normalized if requested). |z| < 1.
LegendreJet legendre_p_jet(LegendreIndex idx, double z, bool normalized = false);

// Normalized P_l^m(z) for l = m .. l_max written to out[0 .. l_max - m].
void legendre_column(int m, int l_max, double z, std::span<double> out);

// Same with the (1 - z^2)^(m/2) factor removed.
void legendre_column_reduced(int m, int l_max, double z, std::span<double> out);

// Second solution family regular at z = 1:
// ((1-z)/(1+z))^(m/2) sum_k (-1)^k C(n,k) C(n+k,k) / C(m+k,k) ((1-z)/2)^k.
double legendre_p_tilde(LegendreIndex idx, double z);
LegendreJet legendre_p_tilde_jet(LegendreIndex idx, double z);

// Integral of (P_n^m)^2 over [-1, 1]: 2 (n+m)! / ((2n+1) (n-m)!).
double legendre_norm(LegendreIndex idx);
double log_legendre_norm(LegendreIndex idx);

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Legendre rule with `order` points on [a, b].
GaussRule gauss_legendre(int order, double a = -1.0, double b = 1.0);

}  // namespace liouville
