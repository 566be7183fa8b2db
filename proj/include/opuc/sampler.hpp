#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "potential.hpp"
#include "rng.hpp"
#include "verblunsky.hpp"

namespace opuc {

// CUE coefficients: |alpha_k|^2 ~ Beta(1, n-k-1), uniform phases, and a
// uniform unit-modulus last entry.
VerblunskySeq sample_cue(int n, SplitMix64& rng);

// Uniform draw from the simplex.
std::vector<double> dirichlet_weights(int n, SplitMix64& rng);

// H_n = n tr V(G_n) - sum_{k<=n-2} (n-k-2) log(1 - |alpha_k|^2), so the
// tilted coefficient density is proportional to exp(-H_n).
double coeff_energy(const LaurentPotential& V, const VerblunskySeq& a);

// H_n(alpha with alpha_j = z) - H_n(alpha), touching only the terms that
// depend on alpha_j for d <= 2.
double coeff_delta_energy(const LaurentPotential& V, const VerblunskySeq& a,
                          int j, std::complex<double> z);

struct ChainState {
  VerblunskySeq alpha;
  double energy = 0;
  long sweeps = 0;
  long steps = 0;
  long accepted = 0;
  long out_of_disk = 0;
  std::uint64_t seed = 0;
  std::vector<double> scales;  // per site, frozen after warmup
  double max_drift = 0;        // largest |stored - recomputed| energy

  double acceptance() const { return steps ? double(accepted) / steps : 0; }
};

using CoeffObserver = std::function<void(long sweep, const VerblunskySeq&)>;

struct CoeffChainOptions {
  long warmup_sweeps = 500;
  int thin = 1;
  long drift_interval = 10000;  // steps between full energy recomputes
  bool keep_samples = false;
  CoeffObserver observer;
};

struct CoeffChainResult {
  ChainState state;
  std::vector<VerblunskySeq> samples;
};

// Single-site Metropolis sweeps over alpha_0..alpha_{n-1}; Gaussian moves
// in the disk, phase moves for the last entry.
CoeffChainResult mh_coeff_chain(const LaurentPotential& V, int n, long sweeps,
                                double proposal_scale, SplitMix64& rng,
                                const CoeffChainOptions& opt = {});

using EigenObserver = std::function<void(long sweep, const std::vector<double>&)>;

struct EigenChainOptions {
  long warmup_sweeps = 200;
  int thin = 1;
  bool keep_samples = false;
  EigenObserver observer;
};

struct EigenChainResult {
  std::vector<double> theta;
  std::vector<std::vector<double>> samples;
  long steps = 0;
  long accepted = 0;
  double scale = 0;
  std::uint64_t seed = 0;
};

// Metropolis on eigenangles with log-density
// 2 sum_{i<j} log|e^{i t_i} - e^{i t_j}| - n sum_i V(t_i).
EigenChainResult mh_eigen_chain(const LaurentPotential& V, int n, long sweeps,
                                SplitMix64& rng, const EigenChainOptions& opt = {});

// Two-sided Kolmogorov-Smirnov statistic against a continuous cdf.
double ks_statistic(std::vector<double> x, const std::function<double(double)>& cdf);
// Asymptotic p-value of sqrt(n) D with the Stephens small-sample correction.
double ks_pvalue(double d, long n);

}  // namespace opuc
