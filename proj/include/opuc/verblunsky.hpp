#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"

namespace opuc {

inline constexpr double kTerminationTol = 1e-12;

template <typename Real>
struct BasicVerblunskySeq {
  using Complex = std::complex<Real>;
  using Vector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;

  Vector coeffs;
  bool terminated = false;
  std::vector<std::string> warnings;

  BasicVerblunskySeq() = default;
  explicit BasicVerblunskySeq(Vector c, bool term = false)
      : coeffs(std::move(c)), terminated(term) {}
  BasicVerblunskySeq(std::initializer_list<Complex> c, bool term = false)
      : coeffs(static_cast<Eigen::Index>(c.size())), terminated(term) {
    Eigen::Index i = 0;
    for (const auto& a : c) coeffs(i++) = a;
  }

  static BasicVerblunskySeq zeros(Eigen::Index n) {
    return BasicVerblunskySeq(Vector::Zero(n));
  }
  static BasicVerblunskySeq constant(Eigen::Index n, Complex a) {
    return BasicVerblunskySeq(Vector::Constant(n, a));
  }

  Eigen::Index size() const { return coeffs.size(); }

  // alpha_{-1} = -1 is exposed through k = -1.
  Complex operator()(Eigen::Index k) const {
    if (k == -1) return Complex(-1);
    return coeffs(k);
  }
  Complex at(Eigen::Index k) const {
    if (k == -1) return Complex(-1);
    if (k < 0 || k >= size()) return Complex(0);
    return coeffs(k);
  }
  static constexpr Real virtual_prefix() { return Real(-1); }

  Real rho(Eigen::Index k) const {
    Real m = std::norm((*this)(k));
    return m >= Real(1) ? Real(0) : std::sqrt(Real(1) - m);
  }

  // Index of the first unit-modulus entry; -1 encodes +infinity.
  Eigen::Index first_unit_index() const {
    for (Eigen::Index k = 0; k < size(); ++k)
      if (std::abs(std::abs(coeffs(k)) - Real(1)) <= Real(kTerminationTol))
        return k;
    return -1;
  }

  void validate() const {
    const Eigen::Index n = size();
    for (Eigen::Index k = 0; k + 1 < n; ++k)
      if (!(std::abs(coeffs(k)) < Real(1)))
        throw Error(ErrorKind::Domain, "coefficient " + std::to_string(k) +
                                           " outside the open unit disk");
    if (n == 0) {
      if (terminated)
        throw Error(ErrorKind::Domain, "empty sequence cannot be terminated");
      return;
    }
    const Real last = std::abs(coeffs(n - 1));
    if (terminated) {
      if (std::abs(last - Real(1)) > Real(kTerminationTol))
        throw Error(ErrorKind::Domain,
                    "terminated sequence needs a unit-modulus last entry");
    } else if (!(last < Real(1))) {
      throw Error(ErrorKind::Domain, "last coefficient outside the open disk");
    }
  }
};

using VerblunskySeq = BasicVerblunskySeq<double>;

template <typename Real>
BasicVerblunskySeq<Real> aleksandrov_rotate(const BasicVerblunskySeq<Real>& a,
                                            std::complex<Real> lambda) {
  if (std::abs(std::abs(lambda) - Real(1)) > Real(1e-12))
    throw Error(ErrorKind::Domain, "rotation parameter must be unimodular");
  BasicVerblunskySeq<Real> out(a.coeffs * lambda, a.terminated);
  return out;
}

// Monic polynomials Phi_k and reversed Phi_k^* as coefficient vectors
// (index = power of z), with ||Phi_k||^2 = prod_{i<k} (1 - |alpha_i|^2).
template <typename Real>
struct MonicOPState {
  using Complex = std::complex<Real>;
  using Vector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;

  int degree = 0;
  Vector phi;
  Vector phi_star;
  Real norm2 = Real(1);

  Complex eval(Complex z) const { return horner(phi, z); }
  Complex eval_star(Complex z) const { return horner(phi_star, z); }

  static Complex horner(const Vector& c, Complex z) {
    Complex s(0);
    for (Eigen::Index i = c.size() - 1; i >= 0; --i) s = s * z + c(i);
    return s;
  }
};

template <typename Real>
MonicOPState<Real> monic_state(const BasicVerblunskySeq<Real>& a, int k) {
  using Complex = std::complex<Real>;
  using Vector = typename MonicOPState<Real>::Vector;
  if (k < 0 || k > a.size())
    throw Error(ErrorKind::InsufficientCoefficients,
                "degree exceeds available coefficients");
  MonicOPState<Real> s;
  s.phi = Vector::Ones(1);
  s.phi_star = Vector::Ones(1);
  for (int j = 0; j < k; ++j) {
    const Complex ab = std::conj(a.coeffs(j));
    Vector p = Vector::Zero(j + 2), q = Vector::Zero(j + 2);
    // Phi_{j+1} = z Phi_j - conj(alpha_j) Phi_j^*
    p.tail(j + 1) += s.phi;
    p.head(j + 1) -= ab * s.phi_star;
    // Phi_{j+1}^* = Phi_j^* - alpha_j z Phi_j
    q.head(j + 1) += s.phi_star;
    q.tail(j + 1) -= a.coeffs(j) * s.phi;
    s.phi = std::move(p);
    s.phi_star = std::move(q);
    s.norm2 *= Real(1) - std::norm(a.coeffs(j));
  }
  s.degree = k;
  return s;
}

// Values of Phi_n(z) by the recursion, without forming coefficients.
template <typename Real>
std::complex<Real> eval_phi(const BasicVerblunskySeq<Real>& a,
                            std::complex<Real> z) {
  std::complex<Real> p(1), q(1);
  for (Eigen::Index j = 0; j < a.size(); ++j) {
    const std::complex<Real> np = z * p - std::conj(a.coeffs(j)) * q;
    q = q - a.coeffs(j) * z * p;
    p = np;
  }
  return p;
}

}  // namespace opuc
