#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"
#include "verblunsky.hpp"

namespace opuc {

inline constexpr double kPredictionErrorFloor = 1e-14;

// Verblunsky coefficients of the discrete measure sum_i w_i delta_{theta_i}.
// Isometric Arnoldi on diag(e^{i theta}) from sqrt(w) yields the GGT section;
// its Schur factors G = Psi_0 Psi_1 ... are peeled off column by column.
// With terminate = true, count must equal the number of nodes and the last
// coefficient is projected onto the unit circle.
template <typename Real>
BasicVerblunskySeq<Real> schur_from_nodes(const std::vector<Real>& theta,
                                          const std::vector<Real>& w,
                                          Eigen::Index count,
                                          bool terminate) {
  using Complex = std::complex<Real>;
  using Matrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;

  const Eigen::Index N = static_cast<Eigen::Index>(theta.size());
  if (N == 0 || w.size() != theta.size())
    throw Error(ErrorKind::Domain, "nodes and weights must match");
  if (terminate && count != N)
    throw Error(ErrorKind::Domain, "terminated sequence needs count = nodes");
  if (count > N)
    throw IllConditionedError(static_cast<int>(N),
                              "discrete measure supports only " +
                                  std::to_string(N) + " coefficients");

  Vector z(N), q0(N);
  Real total = 0;
  for (Eigen::Index i = 0; i < N; ++i) total += w[i];
  for (Eigen::Index i = 0; i < N; ++i) {
    z(i) = std::polar(Real(1), theta[i]);
    q0(i) = std::sqrt(w[i] / total);
  }

  const Eigen::Index cols = count;
  const Eigen::Index rows = terminate ? count : count + 1;
  Matrix Q(N, rows);
  Matrix H = Matrix::Zero(rows, cols);
  Q.col(0) = q0;
  for (Eigen::Index j = 0; j < cols; ++j) {
    Vector v = z.cwiseProduct(Q.col(j));
    auto basis = Q.leftCols(j + 1);
    Vector h = basis.adjoint() * v;
    v.noalias() -= basis * h;
    Vector h2 = basis.adjoint() * v;
    v.noalias() -= basis * h2;
    h += h2;
    H.col(j).head(j + 1) = h;
    if (j + 1 < rows) {
      const Real beta = v.norm();
      if (!(beta > Real(0)))
        throw IllConditionedError(static_cast<int>(j),
                                  "Krylov space exhausted at degree " +
                                      std::to_string(j));
      H(j + 1, j) = beta;
      Q.col(j + 1) = v / beta;
    }
  }

  BasicVerblunskySeq<Real> out(Vector::Zero(count), terminate);
  for (Eigen::Index k = 0; k < count; ++k) {
    Complex a = std::conj(H(k, k));
    if (terminate && k == count - 1) {
      const Real m = std::abs(a);
      a = m > Real(0) ? a / m : Complex(1);
      out.coeffs(k) = a;
      break;
    }
    // A finite node set is a unitary reduction, so only the open-ended
    // extraction needs the floor.
    const Real r2 = Real(1) - std::norm(a);
    if (terminate ? !(r2 > Real(0)) : !(r2 >= Real(kPredictionErrorFloor)))
      throw IllConditionedError(static_cast<int>(k),
                                "prediction error below floor at degree " +
                                    std::to_string(k));
    out.coeffs(k) = a;
    const Real r = std::sqrt(r2);
    for (Eigen::Index c = k + 1; c < cols; ++c) {
      const Complex r0 = H(k, c), r1 = H(k + 1, c);
      H(k, c) = a * r0 + r * r1;
      H(k + 1, c) = r * r0 - std::conj(a) * r1;
    }
  }
  return out;
}

// Szego recursion driven by trigonometric moments c_k = int e^{-ik theta} dmu,
// k = 0..count.
template <typename Real>
BasicVerblunskySeq<Real> levinson_from_moments(
    const std::vector<std::complex<Real>>& c, Eigen::Index count) {
  using Complex = std::complex<Real>;
  using Vector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;
  if (static_cast<Eigen::Index>(c.size()) < count + 1)
    throw Error(ErrorKind::InsufficientCoefficients, "too few moments");
  const Real c0 = std::real(c[0]);
  Vector phi = Vector::Ones(1), phis = Vector::Ones(1);
  Real norm2 = Real(1);
  BasicVerblunskySeq<Real> out(Vector::Zero(count));
  for (Eigen::Index k = 0; k < count; ++k) {
    Complex s(0);
    for (Eigen::Index j = 0; j <= k; ++j) s += phi(j) * std::conj(c[j + 1]) / c0;
    const Complex a = std::conj(s / norm2);
    const Real r2 = Real(1) - std::norm(a);
    if (!(r2 >= Real(kPredictionErrorFloor)))
      throw IllConditionedError(static_cast<int>(k),
                                "Toeplitz matrix not positive definite at degree " +
                                    std::to_string(k));
    out.coeffs(k) = a;
    Vector p = Vector::Zero(k + 2), q = Vector::Zero(k + 2);
    p.tail(k + 1) += phi;
    p.head(k + 1) -= std::conj(a) * phis;
    q.head(k + 1) += phis;
    q.tail(k + 1) -= a * phi;
    phi = std::move(p);
    phis = std::move(q);
    norm2 *= r2;
  }
  return out;
}

}  // namespace opuc
