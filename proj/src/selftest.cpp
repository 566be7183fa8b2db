#include "opuc/selftest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "opuc/coefficients.hpp"
#include "opuc/equilibrium.hpp"
#include "opuc/potential.hpp"
#include "opuc/rng.hpp"
#include "opuc/sampler.hpp"
#include "opuc/sumrule.hpp"
#include "opuc/unitary.hpp"

namespace opuc {

namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2 * kPi;

// Worst error against a tolerance with the first offending case named.
struct Tally {
  Tally(std::string n, double t) : name(std::move(n)), tol(t) {}

  std::string name;
  double tol;
  double worst = 0;
  int count = 0;
  int failures = 0;
  std::string first;

  void add(double err, const std::string& what) {
    ++count;
    if (!(err <= tol)) {
      if (!failures) first = what;
      ++failures;
    }
    if (!(err <= worst)) worst = err;
  }
  bool ok() const { return failures == 0; }
  std::string str() const {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s: worst %.3g (tol %.0e, %d cases)",
                  name.c_str(), worst, tol, count);
    std::string s = buf;
    if (failures) s += ", " + std::to_string(failures) + " failing, first " + first;
    return s;
  }
};

std::string fmt(const char* f, double x) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}

// int_0^{2 pi} f dtheta / 2 pi, split at multiples of pi / 2.
double circle_mean(const std::function<double(double)>& f) {
  return integrate(f, 0, kTwoPi, {kPi / 2, kPi, 3 * kPi / 2}, QuadratureConfig{}) / kTwoPi;
}

// 1 - g cos(k theta) without cancellation at its zeros.
double one_minus_gcos(double g, double t) {
  return g >= 0 ? (1 - g) + 2 * g * std::sin(t / 2) * std::sin(t / 2)
                : (1 + g) - 2 * g * std::cos(t / 2) * std::cos(t / 2);
}

// 2 pi times the (2,0) density: 1 - (4g/3) cos + (g/3) cos 2.
double p20(double g, double t) {
  const double s = 2 * std::sin(t / 2) * std::sin(t / 2);
  return (1 - g) + 2 * g / 3 * s * s;
}

double xlogx(double x) { return x > 0 ? x * std::log(x) : 0.0; }

VerblunskySeq random_disk_seq(SplitMix64& rng, int len, double rmax) {
  VerblunskySeq a = VerblunskySeq::zeros(len);
  for (int k = 0; k < len; ++k)
    a.coeffs(k) = std::polar(rmax * std::sqrt(rng.uniform()), kTwoPi * rng.uniform());
  return a;
}

double atom_error(const CircleMeasure& x, const CircleMeasure& y) {
  if (x.atoms().size() != y.atoms().size()) return INFINITY;
  auto sorted = [](std::vector<Atom> a) {
    std::sort(a.begin(), a.end(), [](const Atom& p, const Atom& q) { return p.theta < q.theta; });
    return a;
  };
  const auto a = sorted(x.atoms()), b = sorted(y.atoms());
  double e = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    e = std::max({e, angular_distance(a[i].theta, b[i].theta), std::abs(a[i].w - b[i].w)});
  return e;
}

double seq_error(const VerblunskySeq& a, const VerblunskySeq& b, int n) {
  double e = 0;
  for (int k = 0; k < n; ++k) e = std::max(e, std::abs(a.at(k) - b.at(k)));
  return e;
}

CriterionResult finish(int id, std::string name, const std::vector<Tally>& ts,
                       std::vector<std::string> extra = {}, bool extra_ok = true) {
  CriterionResult r;
  r.id = id;
  r.name = std::move(name);
  r.pass = extra_ok;
  std::string d;
  for (const auto& t : ts) {
    r.pass = r.pass && t.ok();
    d += (d.empty() ? "" : "; ") + t.str();
  }
  for (const auto& e : extra) d += (d.empty() ? "" : "; ") + e;
  r.detail = d;
  return r;
}

// 1. Closed-form constants against direct quadrature.
CriterionResult c1() {
  Tally tH{"H", 1e-8}, tK{"K", 1e-8}, tI{"I", 1e-8}, tL{"source entropies", 1e-8},
      tE{"exact values", 1e-14};
  const auto sym = linspace(-1, 1, 9);
  const auto pos = linspace(1.0 / 9, 1, 9);
  for (double g : sym) {
    const double h = circle_mean([g](double t) { return xlogx(one_minus_gcos(g, t)); });
    tH.add(std::abs(h - closed_H(g)), "H(" + fmt("%g", g) + ")");
    const double u11 = -circle_mean([g](double t) { return std::log(one_minus_gcos(g, 2 * t)); });
    tL.add(std::abs(u11 - kl_unif_11(g)), "K(UNIF|mu_g^11) g=" + fmt("%g", g));
    const double o11 = circle_mean([g](double t) {
      const double p = one_minus_gcos(1, 2 * t);
      return p > 0 ? p * std::log(p / one_minus_gcos(g, 2 * t)) : 0.0;
    });
    tL.add(std::abs(o11 - kl_11one_11(g)), "K(mu_1^11|mu_g^11) g=" + fmt("%g", g));
    const double e10 = circle_mean([g](double t) { return xlogx(one_minus_gcos(g, t)); });
    tL.add(std::abs(e10 - kl_family_unif(Family::F10, g)), "K(mu_g^10|UNIF) g=" + fmt("%g", g));
    const double e11 = circle_mean([g](double t) { return xlogx(one_minus_gcos(g, 2 * t)); });
    tL.add(std::abs(e11 - kl_family_unif(Family::F11, g)), "K(mu_g^11|UNIF) g=" + fmt("%g", g));
  }
  for (double g : pos) {
    const double k = circle_mean([g](double t) { return std::log(p20(g, t)); });
    tK.add(std::abs(k - closed_K(g)), "K(" + fmt("%g", g) + ")");
    tL.add(std::abs(-k - kl_unif_20(g)), "K(UNIF|mu_g^20) g=" + fmt("%g", g));
    const double i = circle_mean([g](double t) {
      const double w = -4.0 / 3 * std::cos(t) + 1.0 / 3 * std::cos(2 * t);
      const double p1 = p20(1, t);
      return p1 > 0 ? std::log(p1 / p20(g, t)) * w : 0.0;
    });
    tI.add(std::abs(i - closed_I(g)), "I(" + fmt("%g", g) + ")");
    const double e20 = circle_mean([g](double t) { return xlogx(p20(g, t)); });
    tL.add(std::abs(e20 - kl_family_unif(Family::F20, g)), "K(mu_g^20|UNIF) g=" + fmt("%g", g));
  }
  for (Family f : {Family::F10, Family::F11, Family::F20}) {
    const auto m = build_model(f, 1.0);
    const Extended kl = kl_divergence(m.measure, uniform_measure());
    tL.add(kl.is_finite() ? std::abs(kl.value - kl_source_unif(f)) : INFINITY,
           std::string("library KL family ") + family_name(f));
  }
  tE.add(std::abs(closed_H(1) - (1 - std::log(2.0))), "H(1)");
  tE.add(std::abs(kl_family_unif(Family::F20, 1) - (7.0 / 3 - std::log(6.0))), "K(mu^20|UNIF)");
  tE.add(std::abs(closed_I_tilde(1) + 7.0 / 3), "I~(1)");
  return finish(1, "closed-form constants", {tH, tK, tI, tL, tE});
}

// 2. Auxiliary integrals.
CriterionResult c2() {
  Tally tl{"logg", 1e-8}, tc{"logcosg", 1e-8}, te{"eipi", 1e-8};
  for (double g : linspace(-1, 1, 9)) {
    tl.add(std::abs(circle_mean([g](double t) { return std::log(one_minus_gcos(g, t)); }) -
                    aux_logg(g)), fmt("g=%g", g));
    tc.add(std::abs(circle_mean([g](double t) {
                      return std::cos(t) * std::log(one_minus_gcos(g, t));
                    }) - aux_logcosg(g)), fmt("g=%g", g));
  }
  for (int n = 1; n <= 8; ++n) {
    const double v = circle_mean([n](double t) {
      return std::cos(n * t) * std::log(one_minus_gcos(1, t));
    });
    te.add(std::abs(v - aux_eipi(n)), "n=" + std::to_string(n));
  }
  return finish(2, "auxiliary integrals", {tl, tc, te});
}

// 3. Trace decomposition against dense traces.
CriterionResult c3(std::uint64_t seed, bool quick) {
  SplitMix64 rng(seed);
  Tally t{"decomposition identity", 1e-12};
  const int draws = quick ? 200 : 1000;
  for (int i = 0; i < draws; ++i) {
    const int L = 3 + i % 62;
    const VerblunskySeq a = random_disk_seq(rng, L, 0.95);
    for (Family f : {Family::F10, Family::F11, Family::F20}) {
      const auto V = LaurentPotential::of(f, 2 * rng.uniform() - 1 + 1e-3);
      const double err = std::abs(trace_fast(V, a, L) - trace_direct(V, a, L)) / L;
      t.add(err, std::string("family ") + family_name(f) + " L=" + std::to_string(L));
    }
  }
  return finish(3, "trace decomposition", {t});
}

// 4. Coefficient/measure roundtrips.
CriterionResult c4(std::uint64_t seed, bool quick) {
  SplitMix64 rng(seed);
  Tally ta{"alpha->CMV->measure->alpha", 1e-8}, tm{"measure->alpha->CMV->measure", 1e-8},
      tb{"Bernstein-Szego", 1e-9}, tg{"GGT vs CMV", 1e-9};
  const int reps = quick ? 2 : 5;
  for (int n : {1, 2, 3, 5, 8, 13, 20, 30, 40, 50}) {
    for (int r = 0; r < reps; ++r) {
      const VerblunskySeq a = sample_cue(n, rng);
      const CircleMeasure mc = spectral_measure(cmv_matrix<double>(a, n));
      const CircleMeasure mg = spectral_measure(ggt_matrix<double>(a, n));
      const VerblunskySeq b = verblunsky_from_discrete(mc);
      ta.add(seq_error(a, b, n), "n=" + std::to_string(n));
      tg.add(atom_error(mc, mg), "n=" + std::to_string(n));
    }
  }
  for (int r = 0; r < (quick ? 5 : 20); ++r) {
    std::vector<Atom> atoms;
    const auto w = dirichlet_weights(20, rng);
    for (int i = 0; i < 20; ++i) atoms.push_back({kTwoPi * rng.uniform(), w[i]});
    const CircleMeasure mu = CircleMeasure::discrete(atoms);
    const VerblunskySeq a = verblunsky_from_discrete(mu);
    tm.add(atom_error(mu, spectral_measure(cmv_matrix<double>(a, 20))), "draw " + std::to_string(r));
  }
  for (int r = 0; r < 20; ++r) {
    const int len = 1 + r % 5;
    const VerblunskySeq a = random_disk_seq(rng, len, 0.8);
    const VerblunskySeq b = verblunsky_from_density(bernstein_szego_measure(a), len + 5);
    tb.add(seq_error(a, b, len + 5), "len=" + std::to_string(len));
  }
  return finish(4, "roundtrips", {ta, tm, tb, tg});
}

// 5. Gross-Witten coefficients from quadrature against closed forms.
CriterionResult c5() {
  Tally tn{"quadrature vs closed form (n<=30)", 1e-8}, tl{"limit at n=200", 1e-8};
  for (double g : {0.3, 0.7, 1.0, 1.5, 2.0, 4.0}) {
    const auto m = build_model(Family::F10, g);
    const int count = g > 1 ? 201 : 31;
    const VerblunskySeq num = verblunsky_from_density(m.measure, count);
    const VerblunskySeq cf = gw_coefficients(g, count);
    tn.add(seq_error(num, cf, 31), fmt("g=%g", g));
    if (g > 1) {
      const double lim = -std::sqrt(1 - 1 / g);
      tl.add(std::max(std::abs(cf.at(200) - lim), std::abs(num.at(200) - lim)), fmt("g=%g", g));
    }
  }
  return finish(5, "Gross-Witten coefficients", {tn, tl});
}

// 6. Szego-Verblunsky sum rule on Bernstein-Szego measures.
CriterionResult c6(std::uint64_t seed) {
  SplitMix64 rng(seed);
  Tally t{"Szego-Verblunsky", 1e-8};
  for (int r = 0; r < 50; ++r) {
    const int len = 1 + r % 5;
    const VerblunskySeq a = random_disk_seq(rng, len, 0.8);
    const CircleMeasure mu = bernstein_szego_measure(a);
    const double lhs = integrate_periodic_adaptive(
                           [&](double x) { return std::log(kTwoPi * mu.density(x)); }, 0, 512) /
                       kTwoPi;
    double rhs = 0;
    for (int k = 0; k < len; ++k) rhs += std::log1p(-std::norm(a.coeffs(k)));
    t.add(std::abs(lhs - rhs), "draw " + std::to_string(r));
  }
  return finish(6, "Szego-Verblunsky sum rule", {t});
}

// 7. Ungapped sum rules with terminating series.
CriterionResult c7(std::uint64_t seed, bool quick) {
  SplitMix64 rng(seed);
  Tally t{"spectral rate vs series", 1e-6};
  bool tags = true;
  const int per_cell = quick ? 5 : 20;
  for (Family f : {Family::F10, Family::F11, Family::F20}) {
    for (double g : {0.25, 0.5, 0.9}) {
      const auto m = build_model(f, g);
      for (int r = 0; r < per_cell; ++r) {
        const int len = 1 + static_cast<int>(rng.uniform() * 5);
        const VerblunskySeq a = random_disk_seq(rng, len, 0.8);
        const Extended lhs = spectral_rate(bernstein_szego_measure(a), m);
        const SeriesResult rhs = series_rhs(f, g, a, len + 2);
        tags = tags && rhs.tag == TailTag::Terminating;
        t.add(lhs.is_finite() ? std::abs(lhs.value - rhs.value) : INFINITY,
              std::string("family ") + family_name(f) + fmt(" g=%g", g));
      }
    }
  }
  return finish(7, "ungapped sum rules", {t}, {tags ? "all series terminating" : "non-terminating tag"}, tags);
}

// 8. Gapped one-cut sum rule and gem conditions for Gross-Witten.
CriterionResult c8() {
  Tally t{"LHS(GE_-gamma) vs lim R_L", 1e-5}, tc1{"(C1) last increment", 1e-12},
      tc2{"(C2) last increment", 1e-12};
  bool tails = true;
  std::vector<std::string> extra;
  for (double g : {1.5, 2.0, 4.0}) {
    const double gm = std::sqrt(1 - 1 / g);
    const auto m = build_model(Family::F10, g);
    const SumRuleReport rep = gapped_sumrule(m, geronimus_measure(gm, -1),
                                             VerblunskySeq::constant(200, -gm), 200);
    const bool finite = rep.rhs_extrapolated.is_finite() && !rep.lhs_infinite;
    t.add(finite ? rep.discrepancy : INFINITY, fmt("g=%g", g));
    tails = tails && rep.tail != TailTag::Inconclusive;
    extra.push_back(fmt("g=%g tail ", g) + tail_name(rep.tail));
    const auto rows = gem_diagnostics(gw_coefficients(g, 202), GemKind::GwGapped, -gm);
    const auto& last = rows[200];
    const auto& prev = rows[199];
    tc1.add(last.first - prev.first, fmt("g=%g", g));
    tc2.add(last.second - prev.second, fmt("g=%g", g));
  }
  return finish(8, "gapped one-cut sum rule", {t, tc1, tc2}, extra, tails);
}

// 9. The gapped counterexample pair GE_{-gamma}, GE_{+gamma}.
CriterionResult c9() {
  Tally tr{"RHS(GE_g) - RHS(GE_-g) = 2 g gamma", 1e-6},
      tl{"LHS difference vs candidate closed form", 1e-5};
  std::vector<std::string> extra;
  bool residual_ok = true;
  for (double g : {1.5, 2.0, 4.0}) {
    const CounterexampleReport rep = counterexample_report(g);
    tr.add(std::abs(rep.rhs_diff - rep.rhs_diff_closed), fmt("g=%g", g));
    tl.add(std::abs(rep.lhs_diff - rep.lhs_diff_candidate), fmt("g=%g", g));
    if (g == 2.0) {
      residual_ok = std::abs(rep.residual_plus) > 0.1;
      extra.push_back(fmt("g=2 residual LHS-RHS for GE_+gamma %.3g (needs > 0.1)", rep.residual_plus));
      extra.push_back(fmt("g=2 residual for GE_-gamma %.3g", rep.residual_minus));
    }
    extra.push_back(fmt("g=%g F(0): numeric ", g) + fmt("%.8f", rep.f0_numeric) +
                    fmt(", candidate %.8f", rep.f0_candidate) +
                    fmt(", corrected %.8f", rep.f0_corrected));
  }
  return finish(9, "gapped counterexample", {tr, tl}, extra, residual_ok);
}

// 10. Equilibrium models across phases.
CriterionResult c10(bool quick) {
  Tally tm{"unit mass", 1e-10}, te{"endpoint equation", 1e-12},
      tj{"J_V std-dev on support", 1e-6}, tf{"-F_V off support", 1e-9};
  const std::vector<std::pair<Family, std::vector<double>>> grids = {
      {Family::F10, {-4, -2, -1.5, -1, -0.5, 0, 0.5, 1, 1.5, 2, 4}},
      {Family::F11, {-4, -2, -1.5, -1, -0.5, 0, 0.5, 1, 1.5, 2, 4}},
      {Family::F20, {-3, -1.5, -0.8, -0.6, -0.3, 0, 0.5, 1, 1.5, 2, 4}}};
  const int pts = quick ? 40 : 100;
  for (const auto& [f, gs] : grids) {
    for (double g : gs) {
      const auto m = build_model(f, g);
      const std::string tag = std::string("family ") + family_name(f) + fmt(" g=%g", g);
      tm.add(std::abs(m.measure.total_mass() - 1), tag);
      if (m.phase != Phase::Ungapped) te.add(std::abs(m.endpoint_residual), tag);
      double tot = 0;
      for (const auto& arc : m.support) tot += arc.length();
      std::vector<double> js;
      for (const auto& arc : m.support) {
        const int k = std::max(2, static_cast<int>(std::round(pts * arc.length() / tot)));
        for (int i = 0; i < k; ++i) js.push_back(effective_j(m, arc.a + (i + 0.5) / k * arc.length()));
      }
      double mean = 0, var = 0;
      for (double j : js) mean += j;
      mean /= js.size();
      for (double j : js) var += (j - mean) * (j - mean);
      tj.add(std::sqrt(var / js.size()), tag);
      for (int i = 0; i < pts; ++i) {
        const double t = kTwoPi * (i + 0.5) / pts;
        if (m.in_support(t)) continue;
        tf.add(std::max(0.0, -effective_potential_raw(m, t)), tag + fmt(" theta=%.3f", t));
      }
    }
  }
  return finish(10, "equilibrium models", {tm, te, tj, tf});
}

// 11. Samplers.
CriterionResult c11(std::uint64_t seed, bool quick) {
  std::vector<std::string> extra;
  bool ok = true;
  {
    SplitMix64 rng(seed);
    const int n = 32;
    const long N = 10000;
    std::vector<std::vector<double>> x(n - 1);
    for (long s = 0; s < N; ++s) {
      const auto a = sample_cue(n, rng);
      for (int k = 0; k < n - 1; ++k) x[k].push_back(std::norm(a.coeffs(k)));
    }
    double minp = 1;
    int worst = 0;
    for (int k = 0; k < n - 1; ++k) {
      const int b = n - k - 1;
      const double p = ks_pvalue(ks_statistic(x[k], [b](double t) { return -std::expm1(b * std::log1p(-t)); }), N);
      if (p < minp) minp = p, worst = k;
    }
    // Family-wise level 0.01 over the n - 1 marginals.
    const double level = 0.01 / (n - 1);
    ok = ok && minp >= level;
    extra.push_back(fmt("CUE KS min p-value %.4f", minp) + " at k=" + std::to_string(worst) +
                    fmt(" (Bonferroni level %.2e)", level));
  }
  {
    SplitMix64 rng(seed + 1);
    const int n = 128;
    const auto V = LaurentPotential::of(Family::F10, 0.5);
    const auto cosv = LaurentPotential::of(Family::F10, 1.0);
    double s = 0;
    long c = 0;
    CoeffChainOptions opt;
    opt.observer = [&](long, const VerblunskySeq& a) {
      s += trace_fast(cosv, a, n) / n;
      ++c;
    };
    const auto res = mh_coeff_chain(V, n, quick ? 20000 : 100000, 0.1, rng, opt);
    const double mean = s / c;
    ok = ok && std::abs(mean + 0.25) <= 0.05 && res.state.max_drift <= 1e-9;
    extra.push_back(fmt("GW g=0.5 mean cosine %.4f (target -0.25)", mean));
    extra.push_back(fmt("energy drift %.2e", res.state.max_drift));
  }
  {
    SplitMix64 rng(seed + 2);
    const int n = 128;
    const double tg = 2 * std::asin(std::sqrt(0.5));
    long in = 0, tot = 0;
    EigenChainOptions opt;
    opt.observer = [&](long, const std::vector<double>& th) {
      for (double t : th) in += angular_distance(t, kPi) <= tg + 0.1, ++tot;
    };
    mh_eigen_chain(LaurentPotential::of(Family::F10, 2.0), n, quick ? 1000 : 5000, rng, opt);
    const double frac = double(in) / tot;
    ok = ok && frac >= 0.99;
    extra.push_back(fmt("GW g=2 fraction on arc +- 0.1: %.5f", frac));
  }
  return finish(11, "samplers", {}, extra, ok);
}

struct Limit {
  int id;
  double seconds;
};
constexpr Limit kLimits[] = {{1, 5}, {2, 2}, {3, 30}, {4, 20}, {7, 120}, {11, 180}};

}  // namespace

CriterionResult run_criterion(int id, std::uint64_t seed, bool quick) {
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    switch (id) {
      case 1: r = c1(); break;
      case 2: r = c2(); break;
      case 3: r = c3(seed ^ 0x3333, quick); break;
      case 4: r = c4(seed ^ 0x4444, quick); break;
      case 5: r = c5(); break;
      case 6: r = c6(seed ^ 0x6666); break;
      case 7: r = c7(seed ^ 0x7777, quick); break;
      case 8: r = c8(); break;
      case 9: r = c9(); break;
      case 10: r = c10(quick); break;
      case 11: r = c11(seed ^ 0xBBBB, quick); break;
      default: throw Error(ErrorKind::Config, "no criterion " + std::to_string(id));
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) throw;
    r.id = id;
    r.pass = false;
    r.detail = std::string("exception: ") + e.what();
  } catch (const std::exception& e) {
    r.id = id;
    r.pass = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  for (const auto& l : kLimits) {
    if (l.id == id && r.seconds > l.seconds) {
      r.pass = false;
      r.detail += fmt("; runtime %.1f s exceeds", r.seconds) + fmt(" %.0f s", l.seconds);
    }
  }
  return r;
}

std::vector<CriterionResult> run_acceptance(std::uint64_t seed, bool quick) {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= 11; ++id) out.push_back(run_criterion(id, seed, quick));
  return out;
}

nlohmann::json to_json(const std::vector<CriterionResult>& results,
                       std::uint64_t seed, bool quick) {
  nlohmann::json list = nlohmann::json::array();
  int passed = 0;
  for (const auto& r : results) {
    passed += r.pass;
    list.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass},
                    {"detail", r.detail}, {"seconds", r.seconds}});
  }
  return {{"seed", seed},
          {"quick", quick},
          {"criteria", list},
          {"passed", passed},
          {"failed", static_cast<int>(results.size()) - passed},
          {"all_pass", passed == static_cast<int>(results.size())}};
}

}  // namespace opuc
