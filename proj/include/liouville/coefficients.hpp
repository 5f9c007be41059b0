#pragma once

#include <optional>
#include <string>
#include <vector>

#include "liouville/quadrature.hpp"

namespace liouville {

// n(n+1) / (4 (n^2+n+1) pi) * ((2n+1) (n-m)! / ((n^2+n+2) (n+m)!))^2
double c_nm(int n, int m);
double log_c_nm(int n, int m);

// First derivative of mu along the branch at eps = 0, from the second
// derivative of the operator paired with the cokernel. Vanishes identically.
double mu_prime(int n, int m);

struct CurvatureTerms {
  double quartic = 0.0;  // int_0^1 P^4
  double radial = 0.0;   // int z P^2 FP int 1/((1-y^2) y^2) int_y^1 x P^2
  double angular = 0.0;  // same with weight (z+2m) ((1-z)/(1+z))^m
};

struct CurvatureResult {
  int n = 0;
  int m = 0;
  double mu2 = 0.0;             // c_nm (quartic + 2 radial + angular)
  double error_estimate = 0.0;  // refinement difference plus rounding floor
  CurvatureTerms terms;         // with P_n^m as is; inf once it overflows
  CurvatureTerms normalized;    // with P_n^m of unit L2 norm
  // d^2 mu / d eps^2 for the branch phi_2 = 2 eps P_n^m(z) cos(m theta) + ...
  double mu2_branch = 0.0;
  bool in_hypothesis = false;   // 1 <= n/m < 3
};

// Throws PrecisionError when the refined evaluation disagrees beyond
// max(abs_tol, rel_tol * scale), scale = the larger of |mu2| and the sum of
// the absolute term contributions.
CurvatureResult mu_second(int n, int m, const QuadratureSpec& quad = {});

enum class Sign { Positive, Negative, Zero };
std::string sign_symbol(Sign s);  // "+", "-", "0*"

struct SignRow {
  int n = 0;
  int m = 0;
  CurvatureResult result;
  Sign sign = Sign::Zero;
  std::string error;  // non-empty when the row failed
  bool ok() const { return error.empty(); }
};

// Rows (n, m) for n_min <= n <= n_max, 0 <= m <= n, in that order.
// jobs <= 0 uses the hardware concurrency.
std::vector<SignRow> sign_table(int n_min, int n_max, const QuadratureSpec& quad = {}, int jobs = 0);

// Expected sign from the embedded reference table (3 <= n <= 30) and Zero for n <= 2.
std::optional<Sign> reference_sign(int n, int m);

std::string sign_table_csv(const std::vector<SignRow>& rows);
std::string sign_table_json(const std::vector<SignRow>& rows);

}  // namespace liouville
