#include "opuc/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "opuc/coefficients.hpp"
#include "opuc/error.hpp"

namespace opuc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2 * std::numbers::pi;

double sq(double x) { return x * x; }

// sqrt(sin(x) sin(y)) clamped at 0.
double sqrt_prod(double x, double y) {
  const double p = std::sin(x) * std::sin(y);
  return p > 0 ? std::sqrt(p) : 0.0;
}

AcPart full_circle_part(std::function<double(double)> f,
                        std::vector<double> zeros) {
  AcPart ac;
  ac.density = std::move(f);
  ac.arcs = {{0, kTwoPi}};
  ac.zeros = std::move(zeros);
  return ac;
}

}  // namespace

const char* phase_name(Phase p) {
  switch (p) {
    case Phase::Ungapped: return "ungapped";
    case Phase::OneCut: return "one-cut";
    case Phase::TwoCut: return "two-cut";
  }
  return "?";
}

bool EquilibriumModel::in_support(double theta, double tol) const {
  for (const auto& a : support)
    if (a.contains(theta, tol)) return true;
  return false;
}

bool EquilibriumModel::in_support_interior(double theta, double tol) const {
  for (const auto& a : support)
    if (a.interior_contains(theta, tol)) return true;
  return false;
}

double bisect(const std::function<double(double)>& f, double lo, double hi,
              double tol) {
  double flo = f(lo);
  if (flo == 0) return lo;
  const double fhi = f(hi);
  if (fhi == 0) return hi;
  if ((flo > 0) == (fhi > 0))
    throw Error(ErrorKind::Domain, "bisection bracket without sign change");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

CircleMeasure equilibrium_from_potential(const LaurentPotential& V) {
  auto rho = [V](double t) {
    double s = 1;
    for (int l = 1; l <= V.degree(); ++l) s -= l * V.v[l - 1] * V.g * std::cos(l * t);
    return s / kTwoPi;
  };
  const int n = 4096;
  for (int i = 0; i < n; ++i) {
    const double t = kTwoPi * i / n;
    if (rho(t) < -1e-15)
      throw Error(ErrorKind::GappedPhase,
                  "trigonometric density changes sign near theta = " +
                      std::to_string(t) + "; the equilibrium measure is gapped");
  }
  AcPart ac = full_circle_part(rho, {});
  ac.family = "potential";
  ac.params = {{"v", V.v}, {"g", V.g}};
  return CircleMeasure::absolutely_continuous(std::move(ac));
}

double log_potential(const CircleMeasure& mu, double theta,
                     const QuadratureConfig& q) {
  double s = 0;
  for (const auto& at : mu.atoms()) {
    const double d = std::abs(2 * std::sin(0.5 * (theta - at.theta)));
    s += at.w * std::log(d);
  }
  if (!mu.has_ac()) return s;
  const AcPart& ac = mu.ac();
  for (const auto& arc : ac.arcs) {
    std::vector<double> breaks;
    auto add_shifted = [&](double t) {
      for (int k = -2; k <= 2; ++k) breaks.push_back(t + k * kTwoPi);
    };
    add_shifted(theta);
    for (double z : ac.zeros) add_shifted(z);
    auto f = [&](double t) {
      const double rho = ac.density(t);
      if (rho == 0) return 0.0;
      return rho * std::log(std::abs(2 * std::sin(0.5 * (theta - t))));
    };
    s += integrate(f, arc.a, arc.b, breaks, q);
  }
  return s;
}

double effective_j(const EquilibriumModel& m, double theta,
                   const QuadratureConfig& q) {
  return m.potential()(theta) - 2 * log_potential(m.measure, theta, q);
}

double effective_potential_raw(const EquilibriumModel& m, double theta,
                               const QuadratureConfig& q) {
  return effective_j(m, theta, q) - m.robin_shift;
}

double effective_potential(const EquilibriumModel& m, double theta,
                           const QuadratureConfig& q, std::string* warning) {
  if (m.in_support(theta)) return 0;
  const double f = effective_potential_raw(m, theta, q);
  if (f < -1e-9 && warning)
    *warning = "effective potential " + std::to_string(f) + " clipped to 0";
  return std::max(f, 0.0);
}

VerblunskySeq gw_coefficients(double g, int n) {
  VerblunskySeq a = VerblunskySeq::zeros(n);
  const double ag = std::abs(g);
  if (ag < 1) {
    if (g == 0) return a;
    const double s = std::sqrt(1 / (g * g) - 1);
    const double xp = 1 / g + s, xm = 1 / g - s;
    for (int k = 0; k < n; ++k) {
      // (x+^{k+2} - x-^{k+2}) / (x+ - x-) as a sum, stable for x+ x- = 1.
      double num = 0;
      double p = std::pow(xp, k + 1);
      const double r = xm / xp;
      double term = p;
      for (int j = 0; j <= k + 1; ++j) {
        num += term;
        term *= r;
      }
      a.coeffs(k) = -1 / num;
    }
    return a;
  }
  const double sign = g > 0 ? 1.0 : -1.0;
  if (ag == 1) {
    for (int k = 0; k < n; ++k)
      a.coeffs(k) = -std::pow(sign, k + 1) / (k + 2);
    return a;
  }
  const double q = sq(std::sqrt(ag) - std::sqrt(ag - 1));
  for (int k = 0; k < n; ++k) {
    const int m = k + 1;  // alpha_{m-1}
    const double v = 1 - (2 / (1 + q)) * (1 - std::pow(q, m + 2)) /
                              (1 - std::pow(q, m + 1));
    a.coeffs(k) = std::pow(sign, k + 1) * v;
  }
  return a;
}

namespace {

void set_ungapped(EquilibriumModel& m, std::function<double(double)> rho,
                  std::vector<double> zeros) {
  m.phase = Phase::Ungapped;
  m.support = {{0, kTwoPi}};
  AcPart ac = full_circle_part(std::move(rho), std::move(zeros));
  m.measure = CircleMeasure::absolutely_continuous(std::move(ac));
}

void set_arcs(EquilibriumModel& m, Phase p, std::vector<Arc> arcs,
              std::function<double(double)> rho) {
  m.phase = p;
  m.support = arcs;
  AcPart ac;
  ac.density = std::move(rho);
  ac.arcs = std::move(arcs);
  m.measure = CircleMeasure::absolutely_continuous(std::move(ac));
}

void build_10(EquilibriumModel& m) {
  const double g = m.g, ag = std::abs(g);
  if (ag <= 1) {
    std::vector<double> zeros;
    if (g == 1) zeros = {0.0};
    if (g == -1) zeros = {kPi};
    set_ungapped(m, [g](double t) {
      return ((1 - g) + 2 * g * sq(std::sin(0.5 * t))) / kTwoPi;
    }, zeros);
    return;
  }
  auto eq = [ag](double t) { return sq(std::sin(0.5 * t)) - 1 / ag; };
  const double tg = bisect(eq, 0, kPi);
  m.endpoint = tg;
  m.endpoint_residual = eq(tg);
  if (g > 1) {
    const double phi = kPi - tg;
    set_arcs(m, Phase::OneCut, {{kPi - tg, kPi + tg}}, [g, phi](double t) {
      return g / kPi * std::sin(0.5 * t) *
             sqrt_prod(0.5 * (t - phi), 0.5 * (t + phi));
    });
  } else {
    set_arcs(m, Phase::OneCut, {{-tg, tg}}, [ag, tg](double t) {
      return ag / kPi * std::cos(0.5 * t) *
             sqrt_prod(0.5 * (tg - t), 0.5 * (tg + t));
    });
  }
}

void build_11(EquilibriumModel& m) {
  const double g = m.g, ag = std::abs(g);
  if (ag <= 1) {
    std::vector<double> zeros;
    if (g == 1) zeros = {0.0, kPi};
    if (g == -1) zeros = {0.5 * kPi, 1.5 * kPi};
    set_ungapped(m, [g](double t) {
      return ((1 - g) + 2 * g * sq(std::sin(t))) / kTwoPi;
    }, zeros);
    return;
  }
  if (g > 1) {
    auto eq = [g](double t) { return sq(std::cos(t)) - 1 / g; };
    const double c = bisect(eq, 0, 0.5 * kPi);
    m.endpoint = c;
    m.endpoint_residual = eq(c);
    set_arcs(m, Phase::TwoCut, {{c, kPi - c}, {kPi + c, kTwoPi - c}},
             [g, c](double t) {
               return g / kPi * std::abs(std::sin(t)) *
                      sqrt_prod(t - c, t + c);
             });
  } else {
    auto eq = [ag](double t) { return sq(std::sin(t)) - 1 / ag; };
    const double c = bisect(eq, 0, 0.5 * kPi);
    m.endpoint = c;
    m.endpoint_residual = eq(c);
    set_arcs(m, Phase::TwoCut, {{-c, c}, {kPi - c, kPi + c}},
             [ag, c](double t) {
               const double u = t > 0.5 * kPi ? t - kPi : t;
               return ag / kPi * std::abs(std::cos(t)) *
                      sqrt_prod(c - u, c + u);
             });
  }
}

void build_20(EquilibriumModel& m) {
  const double g = m.g;
  if (g >= -0.6 && g <= 1) {
    std::vector<double> zeros;
    if (g == 1) zeros = {0.0};
    if (g == -0.6) zeros = {kPi};
    set_ungapped(m, [g](double t) {
      const double s = 2 * sq(std::sin(0.5 * t));
      return ((1 - g) + (2 * g / 3) * s * s) / kTwoPi;
    }, zeros);
    return;
  }
  if (g > 1) {
    auto eq = [g](double t) { return std::pow(std::cos(0.5 * t), 4) - (1 - 1 / g); };
    const double tc = bisect(eq, 0, kPi);
    m.endpoint = tc;
    m.endpoint_residual = eq(tc);
    const double phi = kPi - tc, c2 = sq(std::cos(0.5 * tc));
    set_arcs(m, Phase::OneCut, {{kPi - tc, kPi + tc}}, [g, phi, c2](double t) {
      return 2 * g / (3 * kPi) * std::sin(0.5 * t) * (1 + c2 - std::cos(t)) *
             sqrt_prod(0.5 * (t - phi), 0.5 * (t + phi));
    });
  } else {
    auto eq = [g](double t) {
      const double c = sq(std::cos(0.5 * t));
      return 8.0 / 3.0 * c - c * c - (5.0 / 3.0 + 1 / g);
    };
    const double tc = bisect(eq, 0, kPi);
    m.endpoint = tc;
    m.endpoint_residual = eq(tc);
    const double ag = std::abs(g), s2 = sq(std::sin(0.5 * tc));
    set_arcs(m, Phase::OneCut, {{-tc, tc}}, [ag, tc, s2](double t) {
      return 2 * ag / (3 * kPi) * std::cos(0.5 * t) * (2 + s2 - std::cos(t)) *
             sqrt_prod(0.5 * (tc - t), 0.5 * (tc + t));
    });
  }
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

EquilibriumModel build_model(Family family, double g, const ModelOptions& opt) {
  if (!std::isfinite(g)) throw Error(ErrorKind::Domain, "coupling must be finite");
  EquilibriumModel m;
  m.family = family;
  m.g = g;
  switch (family) {
    case Family::F10: build_10(m); break;
    case Family::F11: build_11(m); break;
    case Family::F20: build_20(m); break;
    default: throw Error(ErrorKind::NotImplemented, "unsupported family");
  }
  AcPart ac = m.measure.ac();
  ac.family = "equilibrium";
  ac.params = {{"family", family_name(family)}, {"g", g}};
  m.measure = CircleMeasure::absolutely_continuous(std::move(ac));

  std::vector<double> j;
  const int k = opt.robin_points;
  for (const auto& arc : m.support) {
    const int pts = std::max(1, k / static_cast<int>(m.support.size()));
    for (int i = 0; i < pts; ++i) {
      const double t = arc.a + arc.length() * (i + 0.5) / pts;
      j.push_back(effective_j(m, t, opt.quad));
    }
  }
  m.robin_shift = median(j);
  if (opt.reference_count > 0)
    m.reference_coeffs = reference_coefficients(m, opt.reference_count, opt.quad);
  return m;
}

VerblunskySeq reference_coefficients(const EquilibriumModel& m, int n,
                                     const QuadratureConfig& q) {
  if (m.family == Family::F10) return gw_coefficients(m.g, n);
  return verblunsky_from_density(m.measure, n, q);
}

}  // namespace opuc
