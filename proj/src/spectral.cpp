#include "liouville/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "liouville/errors.hpp"
#include "liouville/legendre.hpp"

namespace liouville {

double mu_n(int n) {
  if (n < 0) throw DomainError("mu_n needs n >= 0");
  const double k = static_cast<double>(n) * (n + 1);
  return -2.0 * (k - 2.0) / (k + 2.0);
}

double lambda_of_mu(double mu) {
  if (mu == -2.0) throw PoleError("lambda(mu) has a pole at mu = -2");
  return 2.0 * (2.0 - mu) / (2.0 + mu);
}

double lambda_prime(double mu) {
  if (mu == -2.0) throw PoleError("lambda(mu) has a pole at mu = -2");
  return -8.0 / ((2.0 + mu) * (2.0 + mu));
}

double linearized_factor(double mu, int component, int l) {
  const double d = static_cast<double>(l) * (l + 1);
  return component == 1 ? 2.0 - d : lambda_of_mu(mu) - d;
}

SymmetryClass::SymmetryClass(int n, int m) : n_(n), m_(m) {
  if (n < 1 || m < 0) {
    throw DomainError("symmetry class needs n >= 1 and m >= 0");
  }
}

bool SymmetryClass::admits(int component, int l, int j) const {
  if (l < 0 || j < 0 || j > l) return false;
  if (component == 1) {
    if (l % 2 != 0) return false;
    return m_ == 0 ? j == 0 : j % (2 * m_) == 0;
  }
  if (component == 2) {
    if ((l - n_) % 2 != 0) return false;
    return m_ == 0 ? j == 0 : (j % m_ == 0 && (j / m_) % 2 == 1);
  }
  throw DomainError("component must be 1 or 2");
}

std::vector<Mode> SymmetryClass::modes(int component, int L) const {
  std::vector<Mode> out;
  for (int j = 0; j <= L; ++j) {
    for (int l = j; l <= L; ++l) {
      if (admits(component, l, j)) out.push_back({l, j});
    }
  }
  return out;
}

std::string SymmetryClass::label() const {
  std::ostringstream os;
  os << "X(" << n_ << "," << m_ << ")";
  return os.str();
}

SphereField::SphereField(SymmetryClass cls, int L)
    : cls_(cls), L_(L), m1_(cls.modes(1, L)), m2_(cls.modes(2, L)) {
  if (L < 0) throw DomainError("truncation must be non-negative");
  c1_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m1_.size()));
  c2_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m2_.size()));
}

SphereField::SphereField(SymmetryClass cls, int L, Eigen::VectorXd c1, Eigen::VectorXd c2)
    : SphereField(cls, L) {
  if (c1.size() != c1_.size() || c2.size() != c2_.size()) {
    throw DomainError("coefficient vector does not match the class modes");
  }
  c1_ = std::move(c1);
  c2_ = std::move(c2);
}

int SphereField::index_of(int component, int l, int j) const {
  const auto& ms = modes(component);
  for (std::size_t i = 0; i < ms.size(); ++i) {
    if (ms[i].l == l && ms[i].j == j) return static_cast<int>(i);
  }
  return -1;
}

double SphereField::coefficient(int component, int l, int j) const {
  const int i = index_of(component, l, j);
  return i < 0 ? 0.0 : coefficients(component)[i];
}

double SphereField::value(int component, double z, double theta) const {
  const auto& ms = modes(component);
  const auto& c = coefficients(component);
  double sum = 0.0;
  std::vector<double> col(static_cast<std::size_t>(L_ + 1));
  int current_j = -1;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    if (ms[i].j != current_j) {
      current_j = ms[i].j;
      legendre_column(current_j, L_, z, col);
    }
    sum += c[static_cast<Eigen::Index>(i)] * col[ms[i].l - current_j] * std::cos(current_j * theta);
  }
  return sum;
}

SphereField::Jet SphereField::jet(int component, double z, double theta) const {
  const auto& ms = modes(component);
  const auto& c = coefficients(component);
  Jet out;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const double ci = c[static_cast<Eigen::Index>(i)];
    if (ci == 0.0) continue;
    const LegendreJet pj = legendre_p_jet({ms[i].l, ms[i].j}, z, true);
    const double cs = std::cos(ms[i].j * theta);
    out.value += ci * pj.value * cs;
    out.dz += ci * pj.first * cs;
    out.dzz += ci * pj.second * cs;
    out.dtt -= ci * pj.value * cs * ms[i].j * ms[i].j;
  }
  return out;
}

Eigen::VectorXd SphereField::packed() const {
  Eigen::VectorXd x(c1_.size() + c2_.size());
  x << c1_, c2_;
  return x;
}

SphereField SphereField::with_packed(const Eigen::VectorXd& x) const {
  if (x.size() != c1_.size() + c2_.size()) throw DomainError("packed vector size mismatch");
  return SphereField(cls_, L_, x.head(c1_.size()), x.tail(c2_.size()));
}

SphereGrid make_sphere_grid(int nz, int ntheta) {
  if (nz < 1 || ntheta < 1) throw DomainError("grid sizes must be positive");
  SphereGrid g;
  GaussRule rule = gauss_legendre(nz);
  g.z = rule.nodes;
  g.wz = rule.weights;
  g.theta.resize(ntheta);
  for (int k = 0; k < ntheta; ++k) g.theta[k] = 2.0 * std::numbers::pi * k / ntheta;
  g.wtheta = 2.0 * std::numbers::pi / ntheta;
  return g;
}

ModeBasis make_mode_basis(const std::vector<Mode>& modes, const SphereGrid& grid) {
  ModeBasis b;
  b.modes = modes;
  const int nz = static_cast<int>(grid.z.size()), nt = static_cast<int>(grid.theta.size());
  const int M = static_cast<int>(modes.size());
  b.synth.resize(grid.size(), M);
  b.analysis.resize(M, grid.size());
  b.degree.resize(M);
  int lmax = 0;
  for (const Mode& md : modes) lmax = std::max(lmax, md.l);
  std::map<int, std::vector<std::vector<double>>> cols;  // j -> per-z column
  for (const Mode& md : modes) {
    if (cols.count(md.j)) continue;
    auto& per_z = cols[md.j];
    per_z.resize(nz);
    for (int iz = 0; iz < nz; ++iz) {
      per_z[iz].resize(static_cast<std::size_t>(lmax - md.j + 1));
      legendre_column(md.j, lmax, grid.z[iz], per_z[iz]);
    }
  }
  for (int i = 0; i < M; ++i) {
    const Mode& md = modes[i];
    const auto& per_z = cols[md.j];
    const double tn = md.j == 0 ? 2.0 * std::numbers::pi : std::numbers::pi;
    b.degree[i] = static_cast<double>(md.l) * (md.l + 1);
    for (int iz = 0; iz < nz; ++iz) {
      const double p = per_z[iz][md.l - md.j];
      for (int it = 0; it < nt; ++it) {
        const double v = p * std::cos(md.j * grid.theta[it]);
        const int idx = iz * nt + it;
        b.synth(idx, i) = v;
        b.analysis(i, idx) = v * grid.wz[iz] * grid.wtheta / tn;
      }
    }
  }
  return b;
}

Eigen::VectorXd synthesize(const SphereField& f, int component, const SphereGrid& grid) {
  const ModeBasis b = make_mode_basis(f.modes(component), grid);
  return b.synth * f.coefficients(component);
}

std::vector<FullSpectrumEntry> analyze_full(const Eigen::VectorXd& samples, const SphereGrid& grid,
                                            int L) {
  const int nz = static_cast<int>(grid.z.size()), nt = static_cast<int>(grid.theta.size());
  if (samples.size() != grid.size()) throw DomainError("sample count does not match grid");
  std::vector<FullSpectrumEntry> out;
  std::vector<double> col(static_cast<std::size_t>(L + 1));
  for (int j = 0; j <= L; ++j) {
    // theta transforms for this j
    std::vector<double> fc(nz, 0.0), fs(nz, 0.0);
    for (int iz = 0; iz < nz; ++iz) {
      for (int it = 0; it < nt; ++it) {
        const double v = samples[iz * nt + it];
        fc[iz] += v * std::cos(j * grid.theta[it]) * grid.wtheta;
        fs[iz] += v * std::sin(j * grid.theta[it]) * grid.wtheta;
      }
    }
    const double tn = j == 0 ? 2.0 * std::numbers::pi : std::numbers::pi;
    std::vector<double> ac(static_cast<std::size_t>(L - j + 1), 0.0), as(ac.size(), 0.0);
    for (int iz = 0; iz < nz; ++iz) {
      legendre_column(j, L, grid.z[iz], std::span<double>(col.data(), ac.size()));
      for (std::size_t k = 0; k < ac.size(); ++k) {
        ac[k] += col[k] * fc[iz] * grid.wz[iz];
        as[k] += col[k] * fs[iz] * grid.wz[iz];
      }
    }
    for (std::size_t k = 0; k < ac.size(); ++k) {
      out.push_back({j + static_cast<int>(k), j, false, ac[k] / tn});
      if (j > 0) out.push_back({j + static_cast<int>(k), j, true, as[k] / tn});
    }
  }
  return out;
}

std::string KernelElement::describe() const {
  std::ostringstream os;
  os << "phi" << component << ": P_" << l << "^" << j << "(z)";
  if (j > 0) os << (sine ? " sin(" : " cos(") << j << " theta)";
  return os.str();
}

int bifurcation_level(double mu, double rel_tol) {
  if (!(mu > -2.0 && mu < 2.0)) return -1;
  const double lam = lambda_of_mu(mu);
  const int n = static_cast<int>(std::lround((-1.0 + std::sqrt(1.0 + 4.0 * lam)) / 2.0));
  if (n < 1) return -1;
  const double target = mu_n(n);
  return std::abs(mu - target) <= rel_tol * std::max(1.0, std::abs(target)) ? n : -1;
}

std::vector<KernelElement> kernel_basis(double mu) {
  if (!(mu > -2.0 && mu < 2.0)) throw DomainError("mu must lie in (-2, 2)");
  std::vector<KernelElement> out{{1, 1, 0, false}, {1, 1, 1, false}, {1, 1, 1, true}};
  const int n = bifurcation_level(mu);
  if (n >= 1) {
    out.push_back({2, n, 0, false});
    for (int j = 1; j <= n; ++j) {
      out.push_back({2, n, j, false});
      out.push_back({2, n, j, true});
    }
  }
  return out;
}

std::vector<SphereField> restricted_kernel_basis(const SymmetryClass& cls) {
  const int n = cls.n(), m = cls.m();
  std::vector<SphereField> out;
  std::vector<int> js;
  if (m == 0) {
    js.push_back(0);
  } else {
    for (int j = m; j <= n; j += 2 * m) js.push_back(j);
  }
  for (int j : js) {
    SphereField f(cls, n);
    Eigen::VectorXd c2 = f.coefficients(2);
    c2[f.index_of(2, n, j)] = std::sqrt(legendre_norm({n, j}));
    out.emplace_back(cls, n, f.coefficients(1), c2);
  }
  return out;
}

SphereField linearized_apply(double mu, const SphereField& f) {
  Eigen::VectorXd c1 = f.coefficients(1), c2 = f.coefficients(2);
  for (Eigen::Index i = 0; i < c1.size(); ++i) c1[i] *= linearized_factor(mu, 1, f.modes(1)[i].l);
  for (Eigen::Index i = 0; i < c2.size(); ++i) c2[i] *= linearized_factor(mu, 2, f.modes(2)[i].l);
  return SphereField(f.symmetry(), f.truncation(), c1, c2);
}

int morse_index(double mu, const SymmetryClass& cls, int L) {
  if (!(mu > -2.0 && mu < 2.0)) throw DomainError("mu must lie in (-2, 2)");
  for (int k = 1; k <= L; ++k) {
    if (std::abs(mu - mu_n(k)) <= 1e-9 * std::max(1.0, std::abs(mu_n(k)))) {
      throw DomainError("morse index is ambiguous at a bifurcation value (n=" + std::to_string(k) + ")");
    }
  }
  int count = 0;
  for (int c = 1; c <= 2; ++c) {
    for (const Mode& md : cls.modes(c, L)) {
      if (linearized_factor(mu, c, md.l) > 0.0) ++count;
    }
  }
  return count;
}

}  // namespace liouville
