#pragma once

#include <functional>
#include <string>
#include <vector>

#include "measure.hpp"
#include "potential.hpp"
#include "quadrature.hpp"
#include "verblunsky.hpp"

namespace opuc {

enum class Phase { Ungapped, OneCut, TwoCut };
const char* phase_name(Phase p);

struct EquilibriumModel {
  Family family = Family::F10;
  double g = 0;
  Phase phase = Phase::Ungapped;
  std::vector<Arc> support;
  CircleMeasure measure;
  double endpoint = 0;           // theta_g, gamma_c, alpha_c or theta_c
  double endpoint_residual = 0;  // defining equation at the computed root
  double robin_shift = 0;        // on-support value of J_V (= 2 xi_V)
  VerblunskySeq reference_coeffs;
  std::vector<std::string> warnings;

  LaurentPotential potential() const { return LaurentPotential::of(family, g); }
  double density(double theta) const { return measure.density(theta); }
  bool in_support(double theta, double tol = 0) const;
  bool in_support_interior(double theta, double tol = 0) const;
};

struct ModelOptions {
  QuadratureConfig quad{};
  int reference_count = 64;
  int robin_points = 101;
};

EquilibriumModel build_model(Family family, double g,
                             const ModelOptions& opt = {});

// (1/2pi)(1 - sum_l l v_l g cos(l theta)); GappedPhase error if negative.
CircleMeasure equilibrium_from_potential(const LaurentPotential& V);

double log_potential(const CircleMeasure& mu, double theta,
                     const QuadratureConfig& q = {});

// J_V(theta) = V(theta) - 2 int log|e^{i theta} - zeta| dmu_V.
double effective_j(const EquilibriumModel& m, double theta,
                   const QuadratureConfig& q = {});
// F_V = J_V - inf J_V without clipping.
double effective_potential_raw(const EquilibriumModel& m, double theta,
                               const QuadratureConfig& q = {});
// Clipped at 0; values below -1e-9 are reported through warning.
double effective_potential(const EquilibriumModel& m, double theta,
                           const QuadratureConfig& q = {},
                           std::string* warning = nullptr);

VerblunskySeq gw_coefficients(double g, int n);
VerblunskySeq reference_coefficients(const EquilibriumModel& m, int n,
                                     const QuadratureConfig& q = {});

double bisect(const std::function<double(double)>& f, double lo, double hi,
              double tol = 1e-14);

}  // namespace opuc
