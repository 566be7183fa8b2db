#pragma once

#include <string>
#include <utility>
#include <vector>

#include "equilibrium.hpp"
#include "error.hpp"
#include "measure.hpp"
#include "potential.hpp"
#include "quadrature.hpp"
#include "verblunsky.hpp"

namespace opuc {

// K(ref | mu) = -int log(d mu_ac / d ref) d ref.
Extended kl_divergence(const CircleMeasure& ref, const CircleMeasure& mu,
                       const QuadratureConfig& q = {});

// K(mu_V | mu) + sum of F_V over the atoms of mu outside supp(mu_V).
Extended spectral_rate(const CircleMeasure& mu, const EquilibriumModel& model,
                       const QuadratureConfig& q = {});

double closed_H(double g);
double closed_K(double g);
double closed_I(double g);
double closed_I_tilde(double g);
double jensen_alpha(double g);  // alpha of the root parametrization

double aux_logg(double g);     // int log(1 - g cos) dtheta/2pi
double aux_logcosg(double g);  // int cos log(1 - g cos) dtheta/2pi
double aux_eipi(int n);        // int e^{in theta} log(1 - cos) dtheta/2pi

// Closed-form entropies.
double kl_source_unif(Family f);           // K(mu^{m,n} | UNIF)
double kl_unif_11(double g);               // K(UNIF | mu_g^{1,1})
double kl_11one_11(double g);              // K(mu_1^{1,1} | mu_g^{1,1})
double kl_unif_20(double g);               // K(UNIF | mu_g^{2,0}) = -K(g)
double kl_family_unif(Family f, double g);  // K(mu_g^{m,n} | UNIF)

enum class TailTag { Terminating, Geometric, Inconclusive };
const char* tail_name(TailTag t);

struct SeriesResult {
  double constant = 0;
  std::vector<std::pair<int, double>> partial;  // (L, constant + sum_{k<=L})
  double value = 0;
  TailTag tag = TailTag::Inconclusive;
};

// A_g^{m,n} partial sums through k = 0..L_max for ungapped g in [0, 1].
SeriesResult series_rhs(Family f, double g, const VerblunskySeq& a, int L_max);
double series_term(Family f, double g, const VerblunskySeq& a, int k);

enum class GemKind { Szego, Gem10, Gem11, Gem20, GwGapped };

struct GemRow {
  int k;
  double first;   // difference series
  double second;  // power or (C2) series
};

std::vector<GemRow> gem_diagnostics(const VerblunskySeq& a, GemKind kind,
                                    double gap_a = 0);

// GE_{-gamma}: density on [theta_gamma, 2 pi - theta_gamma]; GE_{+gamma}
// adds the atom 2 gamma / (1 + gamma) at 0.
CircleMeasure geronimus_measure(double gamma, int sign);

struct TailEstimate {
  double value = 0;
  TailTag tag = TailTag::Inconclusive;
  double ratio = 0;
};
TailEstimate extrapolate(const std::vector<std::pair<int, double>>& partial);

struct SumRuleReport {
  double lhs_kl = 0;
  double lhs_outlier_sum = 0;
  double lhs_total = 0;
  bool lhs_infinite = false;
  std::vector<std::pair<int, double>> rhs_partial;
  Extended rhs_extrapolated;
  double discrepancy = 0;
  TailTag tail = TailTag::Inconclusive;
};

SumRuleReport gapped_sumrule(const EquilibriumModel& model,
                             const CircleMeasure& mu, const VerblunskySeq& a,
                             int L_max, const QuadratureConfig& q = {});

struct CounterexampleReport {
  double g = 0, gamma = 0;
  SumRuleReport minus, plus;
  double f0_numeric = 0, f0_candidate = 0, f0_corrected = 0;
  double rhs_diff = 0, rhs_diff_closed = 0;
  double lhs_diff = 0, lhs_diff_candidate = 0, lhs_diff_corrected = 0;
  double residual_minus = 0, residual_plus = 0;
};

CounterexampleReport counterexample_report(double g, int L_max = 200,
                                           const QuadratureConfig& q = {});

double f0_candidate(double gamma);

// Measure descriptors: {"type":"discrete",...} or {"type":"ac"|"mixed",
// "family": unif | bernstein_szego | geronimus | equilibrium, "params":...}.
CircleMeasure measure_from_json(const nlohmann::json& j);

// Finite values as numbers, the +inf marker as the string "+inf".
nlohmann::json to_json(const Extended& x);
nlohmann::json to_json(const SumRuleReport& r);
nlohmann::json to_json(const CounterexampleReport& r);
double f0_corrected(double gamma);

}  // namespace opuc
