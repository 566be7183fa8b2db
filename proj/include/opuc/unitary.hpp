#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "error.hpp"
#include "verblunsky.hpp"

namespace opuc {

enum class MatrixKind { GGT, CMV };

template <typename Real>
struct UnitaryMatrixRep {
  using Complex = std::complex<Real>;
  using Matrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;

  MatrixKind kind = MatrixKind::GGT;
  Matrix entries;
  BasicVerblunskySeq<Real> source;
  bool full = false;  // built from all coefficients of a terminated sequence

  Eigen::Index size() const { return entries.rows(); }

  Real unitarity_defect() const {
    const Matrix d = entries.adjoint() * entries -
                     Matrix::Identity(entries.rows(), entries.cols());
    return d.cwiseAbs().maxCoeff();
  }
};

namespace detail {

template <typename Real>
void check_section(const BasicVerblunskySeq<Real>& a, Eigen::Index L) {
  if (L < 1) throw Error(ErrorKind::Domain, "matrix size must be positive");
  if (L > a.size())
    throw Error(ErrorKind::InsufficientCoefficients,
                "requested size " + std::to_string(L) + " exceeds " +
                    std::to_string(a.size()) + " available coefficients");
}

}  // namespace detail

// G(i,j) = -alpha_{i-1} rho_i ... rho_{j-1} conj(alpha_j) for i <= j,
// G(j+1,j) = rho_j.
template <typename Real>
UnitaryMatrixRep<Real> ggt_matrix(const BasicVerblunskySeq<Real>& a,
                                  Eigen::Index L) {
  using Complex = std::complex<Real>;
  detail::check_section(a, L);
  UnitaryMatrixRep<Real> rep;
  rep.kind = MatrixKind::GGT;
  rep.source = a;
  rep.full = a.terminated && L == a.size();
  auto& G = rep.entries;
  G.setZero(L, L);
  for (Eigen::Index i = 0; i < L; ++i) {
    const Complex ai = -a(i - 1);
    Real prod = Real(1);
    for (Eigen::Index j = i; j < L; ++j) {
      G(i, j) = ai * prod * std::conj(a.coeffs(j));
      prod *= a.rho(j);
      if (prod == Real(0)) break;
    }
    if (i + 1 < L) G(i + 1, i) = a.rho(i);
  }
  return rep;
}

// C = L M with L = Theta_0 + Theta_2 + ..., M = 1 + Theta_1 + Theta_3 + ...
// Theta_k = [[conj(a_k), rho_k], [rho_k, -a_k]]; a terminated last index
// contributes the 1x1 block conj(a_{n-1}).
template <typename Real>
UnitaryMatrixRep<Real> cmv_matrix(const BasicVerblunskySeq<Real>& a,
                                  Eigen::Index n) {
  using Complex = std::complex<Real>;
  using Matrix = typename UnitaryMatrixRep<Real>::Matrix;
  detail::check_section(a, n);
  const bool full = a.terminated && n == a.size();
  const Eigen::Index m = full ? n : n + 1;
  Matrix Lm = Matrix::Identity(m, m), Mm = Matrix::Identity(m, m);
  auto place = [&](Matrix& X, Eigen::Index k) {
    if (k >= n) return;
    if (full && k == n - 1) {
      X(k, k) = std::conj(a.coeffs(k));
      return;
    }
    const Complex ak = a.coeffs(k);
    const Real rk = a.rho(k);
    X(k, k) = std::conj(ak);
    X(k, k + 1) = rk;
    X(k + 1, k) = rk;
    X(k + 1, k + 1) = -ak;
  };
  for (Eigen::Index k = 0; k < n; k += 2) place(Lm, k);
  for (Eigen::Index k = 1; k < n; k += 2) place(Mm, k);
  UnitaryMatrixRep<Real> rep;
  rep.kind = MatrixKind::CMV;
  rep.source = a;
  rep.full = full;
  rep.entries = (Lm * Mm).topLeftCorner(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (std::abs(i - j) > 2) rep.entries(i, j) = Complex(0);
  return rep;
}

template <typename Real>
Real canonical_angle(Real t) {
  const Real two_pi = Real(2) * Real(EIGEN_PI);
  t = std::fmod(t, two_pi);
  if (t < Real(0)) t += two_pi;
  if (t >= two_pi) t -= two_pi;
  return t;
}

template <typename Real>
struct SpectralAtoms {
  std::vector<Real> theta;
  std::vector<Real> weight;
};

// Atoms at eigenvalue angles, weights |<psi_k, e_1>|^2, sorted by angle.
template <typename Real>
SpectralAtoms<Real> spectral_atoms(const UnitaryMatrixRep<Real>& M,
                                   Real unitary_tol = Real(1e-10)) {
  using Matrix = typename UnitaryMatrixRep<Real>::Matrix;
  if (M.unitarity_defect() > unitary_tol)
    throw Error(ErrorKind::Domain, "spectral measure needs a unitary matrix");
  Eigen::ComplexEigenSolver<Matrix> es(M.entries);
  if (es.info() != Eigen::Success)
    throw Error(ErrorKind::Domain, "eigendecomposition failed");
  const Eigen::Index n = M.size();
  std::vector<std::pair<Real, Real>> atoms(n);
  Real total = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    auto v = es.eigenvectors().col(k);
    const Real w = std::norm(v(0)) / v.squaredNorm();
    atoms[k] = {canonical_angle(std::arg(es.eigenvalues()(k))), w};
    total += w;
  }
  if (std::abs(total - Real(1)) > Real(1e-10))
    throw Error(ErrorKind::Domain, "spectral weights do not sum to one");
  std::sort(atoms.begin(), atoms.end());
  SpectralAtoms<Real> out;
  for (auto& [t, w] : atoms) {
    out.theta.push_back(t);
    out.weight.push_back(w / total);
  }
  return out;
}

}  // namespace opuc
