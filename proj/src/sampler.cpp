#include "opuc/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "opuc/error.hpp"

namespace opuc {

namespace {

using cd = std::complex<double>;
constexpr double kTwoPi = 2 * std::numbers::pi;

double log_weight(int n, int k, cd z) {
  const int e = n - k - 2;
  return e > 0 ? e * std::log1p(-std::norm(z)) : 0.0;
}

// Sum of decomposition pieces containing alpha_j; value(i) reads the
// sequence with alpha_j replaced by z when requested.
double local_trace(const LaurentPotential& V, const VerblunskySeq& a, int j,
                   const cd* z) {
  const int n = a.size();
  const int d = V.degree();
  auto x = [&](int i) -> cd {
    if (i >= n) return 0.0;
    return (z && i == j) ? *z : a(i);
  };
  double s = 0;
  if (j < d) s += f_minus_term(V, x(0), d >= 2 ? x(1) : cd(0));
  for (int i = std::max(0, j - d); i <= std::min(j, n - 1 - d); ++i)
    s += g_term(V, x(i), x(i + 1), d >= 2 ? x(i + 2) : cd(0));
  if (d >= 2 && j >= n - 2) s += f_plus_term(V, x(n - 2), x(n - 1));
  return s;
}

}  // namespace

VerblunskySeq sample_cue(int n, SplitMix64& rng) {
  if (n < 1) throw Error(ErrorKind::Domain, "n must be positive");
  VerblunskySeq a = VerblunskySeq::zeros(n);
  for (int k = 0; k + 1 < n; ++k) {
    const double r2 = -std::expm1(std::log(rng.uniform()) / (n - k - 1));
    a.coeffs(k) = std::polar(std::sqrt(r2), kTwoPi * rng.uniform());
  }
  a.coeffs(n - 1) = std::polar(1.0, kTwoPi * rng.uniform());
  a.terminated = true;
  return a;
}

std::vector<double> dirichlet_weights(int n, SplitMix64& rng) {
  if (n < 1) throw Error(ErrorKind::Domain, "n must be positive");
  std::vector<double> w(n);
  double s = 0;
  for (auto& x : w) s += (x = rng.exponential());
  for (auto& x : w) x /= s;
  return w;
}

double coeff_energy(const LaurentPotential& V, const VerblunskySeq& a) {
  const int n = a.size();
  double h = 0;
  if (!V.is_zero()) h += n * trace_fast(V, a, n);
  for (int k = 0; k + 2 < n; ++k) h -= log_weight(n, k, a(k));
  return h;
}

double coeff_delta_energy(const LaurentPotential& V, const VerblunskySeq& a,
                          int j, cd z) {
  const int n = a.size();
  double dh = 0;
  if (!V.is_zero()) {
    if (V.degree() <= 2) {
      dh += n * (local_trace(V, a, j, &z) - local_trace(V, a, j, nullptr));
    } else {
      VerblunskySeq b = a;
      b.coeffs(j) = z;
      dh += n * (trace_direct(V, b, n) - trace_direct(V, a, n));
    }
  }
  if (j + 2 < n) dh -= log_weight(n, j, z) - log_weight(n, j, a(j));
  return dh;
}

CoeffChainResult mh_coeff_chain(const LaurentPotential& V, int n, long sweeps,
                                double proposal_scale, SplitMix64& rng,
                                const CoeffChainOptions& opt) {
  if (!V.is_zero() && n < V.degree() + 1)
    throw Error(ErrorKind::Domain, "chain size must exceed the potential degree");
  if (V.degree() > 2 && n > 128)
    throw Error(ErrorKind::Domain, "dense energy fallback limited to n <= 128");
  if (!(proposal_scale > 0)) throw Error(ErrorKind::Domain, "proposal scale must be positive");

  CoeffChainResult res;
  ChainState& st = res.state;
  st.seed = rng.seed();
  st.alpha = sample_cue(n, rng);
  st.energy = coeff_energy(V, st.alpha);
  st.scales.assign(n, proposal_scale);

  std::vector<long> win_acc(n, 0), win_prop(n, 0);
  const long total = opt.warmup_sweeps + sweeps;
  long since_check = 0;
  for (long sweep = 0; sweep < total; ++sweep) {
    const bool warm = sweep < opt.warmup_sweeps;
    for (int j = 0; j < n; ++j) {
      const cd cur = st.alpha(j);
      cd z;
      if (j == n - 1) {
        z = cur * std::polar(1.0, st.scales[j] * rng.normal());
      } else {
        z = cur + st.scales[j] * cd(rng.normal(), rng.normal());
        if (!(std::norm(z) < 1)) {
          ++st.out_of_disk;
          ++st.steps;
          ++win_prop[j];
          continue;
        }
      }
      const double dh = coeff_delta_energy(V, st.alpha, j, z);
      ++st.steps;
      ++win_prop[j];
      if (dh <= 0 || rng.uniform() < std::exp(-dh)) {
        st.alpha.coeffs(j) = z;
        st.energy += dh;
        ++st.accepted;
        ++win_acc[j];
      }
      if (++since_check >= opt.drift_interval) {
        since_check = 0;
        const double full = coeff_energy(V, st.alpha);
        st.max_drift = std::max(st.max_drift, std::abs(full - st.energy));
        st.energy = full;
      }
    }
    if (warm && (sweep + 1) % 50 == 0) {
      for (int j = 0; j < n; ++j) {
        const double rate = win_prop[j] ? double(win_acc[j]) / win_prop[j] : 0.4;
        if (rate < 0.3) st.scales[j] *= 0.75;
        if (rate > 0.5) st.scales[j] = std::min(st.scales[j] * 1.3, j == n - 1 ? 3.0 : 1.0);
        win_acc[j] = win_prop[j] = 0;
      }
    }
    if (sweep + 1 == opt.warmup_sweeps) {
      st.steps = st.accepted = st.out_of_disk = 0;
    }
    if (!warm) {
      const long s = sweep - opt.warmup_sweeps;
      ++st.sweeps;
      if (s % opt.thin == 0) {
        if (opt.observer) opt.observer(s, st.alpha);
        if (opt.keep_samples) res.samples.push_back(st.alpha);
      }
    }
  }
  const double full = coeff_energy(V, st.alpha);
  st.max_drift = std::max(st.max_drift, std::abs(full - st.energy));
  st.energy = full;
  return res;
}

EigenChainResult mh_eigen_chain(const LaurentPotential& V, int n, long sweeps,
                                SplitMix64& rng, const EigenChainOptions& opt) {
  if (n < 1) throw Error(ErrorKind::Domain, "n must be positive");
  EigenChainResult res;
  res.seed = rng.seed();
  res.theta.resize(n);
  for (auto& t : res.theta) t = kTwoPi * rng.uniform();
  double scale = 2.0 / n;
  const bool zero = V.is_zero();
  auto pot = [&](double t) { return zero ? 0.0 : eval_potential(V, t); };
  auto pair_log = [](double a, double b) {
    return std::log(2 * std::abs(std::sin(0.5 * (a - b))));
  };
  long win_acc = 0, win_prop = 0;
  const long total = opt.warmup_sweeps + sweeps;
  for (long sweep = 0; sweep < total; ++sweep) {
    const bool warm = sweep < opt.warmup_sweeps;
    for (int i = 0; i < n; ++i) {
      const double old = res.theta[i];
      double t = std::fmod(old + scale * rng.normal(), kTwoPi);
      if (t < 0) t += kTwoPi;
      double dl = -n * (pot(t) - pot(old));
      for (int k = 0; k < n; ++k)
        if (k != i) dl += 2 * (pair_log(t, res.theta[k]) - pair_log(old, res.theta[k]));
      ++win_prop;
      if (!warm) ++res.steps;
      if (dl >= 0 || rng.uniform() < std::exp(dl)) {
        res.theta[i] = t;
        ++win_acc;
        if (!warm) ++res.accepted;
      }
    }
    if (warm && (sweep + 1) % 20 == 0) {
      const double rate = double(win_acc) / win_prop;
      if (rate < 0.3) scale *= 0.75;
      if (rate > 0.5) scale = std::min(scale * 1.3, 3.0);
      win_acc = win_prop = 0;
    }
    if (!warm) {
      const long s = sweep - opt.warmup_sweeps;
      if (s % opt.thin == 0) {
        if (opt.observer) opt.observer(s, res.theta);
        if (opt.keep_samples) res.samples.push_back(res.theta);
      }
    }
  }
  res.scale = scale;
  return res;
}

double ks_statistic(std::vector<double> x, const std::function<double(double)>& cdf) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, f - i / n, (i + 1) / n - f});
  }
  return d;
}

double ks_pvalue(double d, long n) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double lam = (sn + 0.12 + 0.11 / sn) * d;
  if (lam < 1e-3) return 1;
  double p = 0;
  for (int j = 1; j <= 100; ++j) {
    const double term = 2 * ((j % 2) ? 1 : -1) * std::exp(-2 * j * j * lam * lam);
    p += term;
    if (std::abs(term) < 1e-16) break;
  }
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace opuc
