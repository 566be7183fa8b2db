#pragma once

#include <complex>

#include "measure.hpp"
#include "quadrature.hpp"
#include "schur.hpp"
#include "unitary.hpp"
#include "verblunsky.hpp"

namespace opuc {

inline constexpr double kWeightUnderflow = 1e-14;

// n atoms -> n coefficients, the last on the unit circle.
VerblunskySeq verblunsky_from_discrete(const CircleMeasure& mu);

// alpha_0..alpha_{count-1} of an ac or mixed measure, from its quadrature
// discretization.
VerblunskySeq verblunsky_from_density(const CircleMeasure& mu, int count,
                                      const QuadratureConfig& q = {});

// Trigonometric moments c_k = int e^{-ik theta} dmu, k = 0..count.
std::vector<std::complex<double>> trig_moments(const CircleMeasure& mu,
                                               int count,
                                               const QuadratureConfig& q = {});

CircleMeasure spectral_measure(const UnitaryMatrixRep<double>& M);

// w(theta) = prod rho_k^2 / (2 pi |Phi_n(e^{i theta})|^2).
CircleMeasure bernstein_szego_measure(const VerblunskySeq& alpha);

}  // namespace opuc
