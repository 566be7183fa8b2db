#include "opuc/sumrule.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "opuc/coefficients.hpp"
#include "opuc/serialize.hpp"

namespace opuc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2 * kPi;
constexpr double kDensityFloor = 1e-300;
constexpr double kFloorMass = 1e-8;

double sq(double x) { return x * x; }

// Points of pts mapped into the open arc (a, b).
std::vector<double> breaks_in(double a, double b, const std::vector<double>& pts) {
  std::vector<double> out;
  for (double p : pts) {
    const double t = a + canonical(p - a);
    if (t > a + 1e-13 && t < b - 1e-13) out.push_back(t);
  }
  return out;
}

std::vector<double> singular_points(const CircleMeasure& mu) {
  std::vector<double> pts;
  if (!mu.has_ac()) return pts;
  for (const auto& arc : mu.ac().arcs) {
    if (arc.full_circle()) continue;
    pts.push_back(arc.a);
    pts.push_back(arc.b);
  }
  for (double z : mu.ac().zeros) pts.push_back(z);
  return pts;
}

bool arc_inside(const Arc& inner, const std::vector<Arc>& outer, double tol) {
  for (const auto& o : outer) {
    if (o.full_circle()) return true;
    if (inner.length() > o.length() + tol) continue;
    if (o.contains(inner.a, tol) && o.contains(inner.b, tol) &&
        o.contains(0.5 * (inner.a + inner.b), tol))
      return true;
  }
  return false;
}

void require_ungapped(Family f, double g) {
  if (!(g >= 0 && g <= 1))
    throw Error(ErrorKind::Domain,
                std::string("series for family ") + family_name(f) +
                    " is defined for ungapped g in [0, 1]");
}

std::complex<double> at_conv(const VerblunskySeq& a, int k) {
  if (k == -1) return -1.0;
  return a.at(k);
}

}  // namespace

Extended kl_divergence(const CircleMeasure& ref, const CircleMeasure& mu,
                       const QuadratureConfig& q) {
  if (ref.kind() != CircleMeasure::Kind::AbsolutelyContinuous)
    throw Error(ErrorKind::Domain, "reference measure must be absolutely continuous");
  const auto& rac = ref.ac();
  std::vector<double> pts = singular_points(mu);
  for (double z : rac.zeros) pts.push_back(z);

  double total = 0;
  for (const auto& arc : rac.arcs) {
    const std::vector<double> br = breaks_in(arc.a, arc.b, pts);
    bool floored = false;
    auto integrand = [&](double t) {
      const double r = rac.density(t);
      if (!(r > 0)) return 0.0;
      double m = mu.density(t);
      if (!(m >= kDensityFloor)) {
        floored = true;
        m = kDensityFloor;
      }
      return r * std::log(r / m);
    };
    // Smooth periodic integrands get the spectrally accurate trapezoid.
    if (arc.full_circle() && pts.empty())
      total += integrate_periodic_adaptive(integrand, arc.a, q.nodes);
    else
      total += integrate(integrand, arc.a, arc.b, br, q);
    if (floored) {
      auto below = [&](double t) {
        const double r = rac.density(t);
        return (r > 0 && !(mu.density(t) >= kDensityFloor)) ? r : 0.0;
      };
      if (integrate(below, arc.a, arc.b, br, q) > kFloorMass)
        return Extended::infinity();
    }
  }
  return Extended::finite(total);
}

Extended spectral_rate(const CircleMeasure& mu, const EquilibriumModel& model,
                       const QuadratureConfig& q) {
  if (!mu.has_ac()) return Extended::infinity();
  for (const auto& arc : mu.ac().arcs)
    if (!arc_inside(arc, model.support, 1e-9)) return Extended::infinity();
  const Extended kl = kl_divergence(model.measure, mu, q);
  if (!kl.is_finite()) return kl;
  double outliers = 0;
  for (const auto& at : mu.atoms())
    if (!model.in_support_interior(at.theta))
      outliers += effective_potential(model, at.theta, q);
  return Extended::finite(kl.value + outliers);
}

double closed_H(double g) {
  if (!(std::abs(g) <= 1)) throw Error(ErrorKind::Domain, "H(g) needs |g| <= 1");
  const double s = std::sqrt(1 - g * g);
  return 1 - s + std::log((1 + s) / 2);
}

double jensen_alpha(double g) {
  if (!(g > 0 && g <= 1))
    throw Error(ErrorKind::Domain, "alpha(g) needs g in (0, 1]");
  const double a = 1.5 * (1 / g - 1);
  if (a == 0) return 0;
  return std::sqrt(2 * a / (a + std::sqrt(a * a + 4 * a)));
}

double closed_K(double g) {
  if (!(g >= 0 && g <= 1)) throw Error(ErrorKind::Domain, "K(g) needs g in [0, 1]");
  if (g == 0) return 0;
  const double al = jensen_alpha(g);
  // (1 + al) / (1 - al) with 1 - al = (1 - al^2) / (1 + al).
  const double one_minus = (1 - al * al) / (1 + al);
  return std::log(g * (1 + al) / (6 * one_minus));
}

double closed_I_tilde(double g) {
  const double al = jensen_alpha(g);
  return (2 * al * al + 8 * al + 7) * (al - 1) / (3 * (al + 1));
}

double closed_I(double g) {
  const double al = jensen_alpha(g);
  return 2 * al * (al * al + 3 * al + 3) / (3 * (al + 1));
}

double aux_logg(double g) {
  if (!(std::abs(g) <= 1)) throw Error(ErrorKind::Domain, "needs |g| <= 1");
  return std::log((1 + std::sqrt(1 - g * g)) / 2);
}

double aux_logcosg(double g) {
  if (!(std::abs(g) <= 1)) throw Error(ErrorKind::Domain, "needs |g| <= 1");
  return -g / (1 + std::sqrt(1 - g * g));
}

double aux_eipi(int n) {
  if (n == 0) throw Error(ErrorKind::Domain, "needs n != 0");
  return -1.0 / std::abs(n);
}

double kl_source_unif(Family f) {
  switch (f) {
    case Family::F10:
    case Family::F11: return 1 - std::log(2.0);
    case Family::F20: return 7.0 / 3.0 - std::log(6.0);
    default: throw Error(ErrorKind::NotImplemented, "no closed form");
  }
}

double kl_unif_11(double g) { return -aux_logg(g); }

double kl_11one_11(double g) {
  const double s = std::sqrt(1 - g * g);
  return 1 - std::log(2.0) - std::log((1 + s) / 2) - g / (1 + s);
}

double kl_unif_20(double g) { return -closed_K(g); }

double kl_family_unif(Family f, double g) {
  switch (f) {
    case Family::F10:
    case Family::F11: return closed_H(g);
    case Family::F20:
      if (g == 0) return 0;
      return 7 * g / 3 + closed_K(g) - g * closed_I(g);
    default: throw Error(ErrorKind::NotImplemented, "no closed form");
  }
}

const char* tail_name(TailTag t) {
  switch (t) {
    case TailTag::Terminating: return "terminating";
    case TailTag::Geometric: return "geometric";
    case TailTag::Inconclusive: return "inconclusive";
  }
  return "?";
}

double series_term(Family f, double g, const VerblunskySeq& a, int k) {
  const auto x = at_conv(a, k);
  const auto xm = at_conv(a, k - 1);
  const auto xp = at_conv(a, k + 1);
  const double n2 = std::norm(x);
  const double lg = -std::log1p(-n2);
  switch (f) {
    case Family::F10:
      return 0.5 * g * std::norm(x - xm) + lg - g * n2;
    case Family::F11: {
      const double dm = std::norm(x - xm);
      return lg - g * n2 - 0.5 * g * n2 * n2 + g * n2 * std::norm(xm) +
             0.5 * g * (1 - n2) * std::norm(xp - xm) +
             g / 8 * (sq(2 * n2 - dm) + sq(2 * std::norm(xm) - dm));
    }
    case Family::F20: {
      const double dm = std::norm(x - xm);
      return lg - g * n2 - 0.5 * g * n2 * n2 +
             g / 6 * sq(n2 - std::norm(xm)) +
             g / 6 * (1 - n2) * std::norm(xp - 2.0 * x + xm) +
             g / 12 * (6 * n2 + 6 * std::norm(xm) - dm) * dm;
    }
    default: throw Error(ErrorKind::NotImplemented, "series needs a d <= 2 family");
  }
}

double series_constant(Family f, double g) {
  switch (f) {
    case Family::F10: return closed_H(g) - g / 2;
    case Family::F11: return closed_H(g) - 0.75 * g;
    case Family::F20:
      if (g == 0) return 0;
      return 19 * g / 12 + closed_K(g) - g * closed_I(g);
    default: throw Error(ErrorKind::NotImplemented, "series needs a d <= 2 family");
  }
}

SeriesResult series_rhs(Family f, double g, const VerblunskySeq& a, int L_max) {
  require_ungapped(f, g);
  if (a.terminated)
    throw Error(ErrorKind::Domain, "series needs a non-terminated sequence");
  for (int k = 0; k < a.size(); ++k)
    if (!(std::abs(a.coeffs[k]) < 1))
      throw Error(ErrorKind::Domain, "coefficient on or outside the unit circle");
  SeriesResult res;
  res.constant = series_constant(f, g);
  double s = res.constant;
  for (int k = 0; k <= L_max; ++k) {
    s += series_term(f, g, a, k);
    res.partial.emplace_back(k, s);
  }
  res.value = s;
  // Terms vanish identically past the last nonzero coefficient plus one.
  int support = 0;
  for (int k = 0; k < a.size(); ++k)
    if (a.coeffs[k] != 0.0) support = k + 1;
  res.tag = L_max > support ? TailTag::Terminating : TailTag::Inconclusive;
  return res;
}

std::vector<GemRow> gem_diagnostics(const VerblunskySeq& a, GemKind kind,
                                    double gap_a) {
  const int n = a.size();
  std::vector<GemRow> rows;
  double s1 = 0, s2 = 0;
  const auto c = [&](int k) { return a.at(k); };
  for (int k = 0; k < n; ++k) {
    const double m = std::abs(c(k));
    switch (kind) {
      case GemKind::Szego:
        s1 += m * m;
        s2 += -std::log1p(-m * m);
        break;
      case GemKind::Gem10:
        if (k + 1 >= n) return rows;
        if (k >= 1) s1 += std::norm(c(k + 1) - c(k)), s2 += std::pow(m, 4);
        break;
      case GemKind::Gem11:
        if (k + 2 >= n) return rows;
        if (k >= 1) s1 += std::norm(c(k + 2) - c(k)), s2 += std::pow(m, 4);
        break;
      case GemKind::Gem20:
        if (k + 2 >= n) return rows;
        s1 += std::norm(c(k + 2) - 2.0 * c(k + 1) + c(k));
        s2 += std::pow(m, 6);
        break;
      case GemKind::GwGapped:
        if (k + 1 >= n) return rows;
        s1 += std::norm(c(k + 1) - c(k));
        s2 += sq(m - std::abs(gap_a));
        break;
    }
    rows.push_back({k, s1, s2});
  }
  return rows;
}

CircleMeasure geronimus_measure(double gamma, int sign) {
  if (!(gamma > 0 && gamma < 1))
    throw Error(ErrorKind::Domain, "Geronimus parameter must lie in (0, 1)");
  if (sign != 1 && sign != -1) throw Error(ErrorKind::Domain, "sign must be +1 or -1");
  const double tg = 2 * std::asin(gamma);
  const double scale = sign < 0 ? 1 / (1 - gamma) : 1 / (1 + gamma);
  AcPart ac;
  // sqrt(cos^2(tg/2) - cos^2(t/2)) = sqrt(sin((t - tg)/2) sin((t + tg)/2)).
  ac.density = [tg, scale](double t) {
    const double p = std::sin((t - tg) / 2) * std::sin((t + tg) / 2);
    if (!(p > 0)) return 0.0;
    return scale * std::sqrt(p) / (kTwoPi * std::sin(t / 2));
  };
  ac.arcs = {{tg, kTwoPi - tg}};
  ac.family = "geronimus";
  ac.params = {{"gamma", gamma}, {"sign", sign}};
  if (sign < 0) return CircleMeasure::absolutely_continuous(std::move(ac));
  const double atom = 2 * gamma / (1 + gamma);
  return CircleMeasure::mixed(std::move(ac), 1 - atom, {{0.0, atom}});
}

TailEstimate extrapolate(const std::vector<std::pair<int, double>>& partial) {
  TailEstimate est;
  if (partial.empty()) return est;
  const double last = partial.back().second;
  est.value = last;
  const std::size_t n = partial.size();
  if (n < 4) return est;
  std::vector<double> inc;
  for (std::size_t i = 1; i < n; ++i)
    inc.push_back(partial[i].second - partial[i - 1].second);
  const double noise = 1e-13 * (1 + std::abs(last));
  const std::size_t m = inc.size();
  if (std::abs(inc[m - 1]) <= noise && std::abs(inc[m - 2]) <= noise) {
    est.tag = TailTag::Geometric;  // tail already below resolution
    return est;
  }
  const double r1 = inc[m - 1] / inc[m - 2];
  const double r2 = inc[m - 2] / inc[m - 3];
  if (std::isfinite(r1) && std::abs(r1) < 0.999 &&
      std::abs(r1 - r2) <= 0.05 * std::max(std::abs(r1), 1e-3)) {
    est.ratio = r1;
    est.value = last + inc[m - 1] * r1 / (1 - r1);
    est.tag = TailTag::Geometric;
  }
  return est;
}

SumRuleReport gapped_sumrule(const EquilibriumModel& model,
                             const CircleMeasure& mu, const VerblunskySeq& a,
                             int L_max, const QuadratureConfig& q) {
  SumRuleReport rep;
  const Extended kl = kl_divergence(model.measure, mu, q);
  const Extended rate = spectral_rate(mu, model, q);
  rep.lhs_infinite = !rate.is_finite();
  if (kl.is_finite()) rep.lhs_kl = kl.value;
  if (rate.is_finite()) {
    rep.lhs_total = rate.value;
    rep.lhs_outlier_sum = rate.value - rep.lhs_kl;
  }
  const VerblunskySeq ref = reference_coefficients(model, L_max, q);
  const LaurentPotential V = model.potential();
  const int L_lo = V.degree() + 1;
  bool infinite = false;
  for (int L = L_lo; L <= L_max && L <= a.size(); ++L) {
    const Extended r = r_functional(V, a, ref, L);
    if (!r.is_finite()) {
      infinite = true;
      break;
    }
    rep.rhs_partial.emplace_back(L, r.value);
  }
  if (infinite) {
    rep.rhs_extrapolated = Extended::infinity();
    rep.tail = TailTag::Terminating;
  } else {
    const TailEstimate t = extrapolate(rep.rhs_partial);
    rep.rhs_extrapolated = Extended::finite(t.value);
    rep.tail = t.tag;
  }
  if (rate.is_finite() && rep.rhs_extrapolated.is_finite())
    rep.discrepancy = std::abs(rep.lhs_total - rep.rhs_extrapolated.value);
  return rep;
}

double f0_candidate(double gamma) {
  const double r = std::sqrt(gamma);
  return 0.5 * (r / (1 - gamma) - std::log((1 + r) / std::sqrt(1 - gamma)));
}

double f0_corrected(double gamma) {
  return 2 * gamma / (1 - gamma * gamma) - std::log((1 + gamma) / (1 - gamma));
}

CounterexampleReport counterexample_report(double g, int L_max,
                                           const QuadratureConfig& q) {
  if (!(g > 1)) throw Error(ErrorKind::Domain, "counterexample needs g > 1");
  CounterexampleReport rep;
  rep.g = g;
  rep.gamma = std::sqrt(1 - 1 / g);
  const double gm = rep.gamma;
  ModelOptions opt;
  opt.quad = q;
  const EquilibriumModel model = build_model(Family::F10, g, opt);
  rep.minus = gapped_sumrule(model, geronimus_measure(gm, -1),
                             VerblunskySeq::constant(L_max, -gm), L_max, q);
  rep.plus = gapped_sumrule(model, geronimus_measure(gm, +1),
                            VerblunskySeq::constant(L_max, gm), L_max, q);
  rep.f0_numeric = effective_potential_raw(model, 0.0, q);
  rep.f0_candidate = f0_candidate(gm);
  rep.f0_corrected = f0_corrected(gm);
  const double lr = std::log((1 + gm) / (1 - gm));
  rep.lhs_diff = rep.plus.lhs_total - rep.minus.lhs_total;
  rep.lhs_diff_candidate = lr + rep.f0_candidate;
  rep.lhs_diff_corrected = lr + rep.f0_corrected;
  rep.rhs_diff = rep.plus.rhs_extrapolated.value - rep.minus.rhs_extrapolated.value;
  rep.rhs_diff_closed = 2 * g * gm;
  rep.residual_minus = rep.minus.lhs_total - rep.minus.rhs_extrapolated.value;
  rep.residual_plus = rep.plus.lhs_total - rep.plus.rhs_extrapolated.value;
  return rep;
}

CircleMeasure measure_from_json(const nlohmann::json& j) {
  const std::string type = j.value("type", "");
  if (type == "discrete") return discrete_from_json(j);
  if (type != "ac" && type != "mixed")
    throw Error(ErrorKind::Config, "unknown measure type '" + type + "'");
  const std::string family = j.value("family", "");
  const nlohmann::json params = j.value("params", nlohmann::json::object());
  if (family == "unif") return uniform_measure();
  if (family == "bernstein_szego")
    return bernstein_szego_measure(coeffs_from_json(params));
  if (family == "geronimus")
    return geronimus_measure(params.at("gamma").get<double>(),
                             params.at("sign").get<int>());
  if (family == "equilibrium") {
    const auto& fj = params.at("family");
    const int code = fj.is_string() ? std::stoi(fj.get<std::string>()) : fj.get<int>();
    return build_model(family_from_code(code), params.at("g").get<double>())
        .measure;
  }
  throw Error(ErrorKind::Config, "unknown measure family '" + family + "'");
}

nlohmann::json to_json(const Extended& x) {
  if (x.is_finite()) return x.value;
  return "+inf";
}

nlohmann::json to_json(const SumRuleReport& r) {
  nlohmann::json partial = nlohmann::json::array();
  for (const auto& [L, v] : r.rhs_partial) partial.push_back({L, v});
  nlohmann::json j = {
      {"lhs_kl", r.lhs_kl},
      {"lhs_outlier_sum", r.lhs_outlier_sum},
      {"lhs_total", r.lhs_infinite ? to_json(Extended::infinity()) : nlohmann::json(r.lhs_total)},
      {"rhs_partial", partial},
      {"rhs_extrapolated", to_json(r.rhs_extrapolated)},
      {"tail_diagnostic", tail_name(r.tail)}};
  if (!r.lhs_infinite && r.rhs_extrapolated.is_finite())
    j["discrepancy"] = r.discrepancy;
  else
    j["discrepancy"] = nullptr;
  return j;
}

nlohmann::json to_json(const CounterexampleReport& r) {
  return {{"g", r.g},
          {"gamma", r.gamma},
          {"minus", to_json(r.minus)},
          {"plus", to_json(r.plus)},
          {"F0_numeric", r.f0_numeric},
          {"F0_candidate", r.f0_candidate},
          {"F0_corrected", r.f0_corrected},
          {"rhs_diff", r.rhs_diff},
          {"rhs_diff_closed", r.rhs_diff_closed},
          {"lhs_diff", r.lhs_diff},
          {"lhs_diff_candidate", r.lhs_diff_candidate},
          {"lhs_diff_corrected", r.lhs_diff_corrected},
          {"residual_minus", r.residual_minus},
          {"residual_plus", r.residual_plus}};
}

}  // namespace opuc
