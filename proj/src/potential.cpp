#include "opuc/potential.hpp"

#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>

#include "opuc/unitary.hpp"

namespace opuc {

using cd = std::complex<double>;

const char* family_name(Family f) {
  switch (f) {
    case Family::F10: return "10";
    case Family::F11: return "11";
    case Family::F20: return "20";
    default: return "custom";
  }
}

Family family_from_code(int code) {
  switch (code) {
    case 10: return Family::F10;
    case 11: return Family::F11;
    case 20: return Family::F20;
  }
  throw Error(ErrorKind::Config, "unknown family " + std::to_string(code));
}

LaurentPotential LaurentPotential::of(Family f, double g) {
  switch (f) {
    case Family::F10: return {{1.0}, g, f};
    case Family::F11: return {{0.0, 0.5}, g, f};
    case Family::F20: return {{4.0 / 3.0, -1.0 / 6.0}, g, f};
    default: break;
  }
  throw Error(ErrorKind::NotImplemented, "no source potential for family");
}

LaurentPotential LaurentPotential::zero() { return {{0.0}, 0.0, Family::Custom}; }

bool LaurentPotential::is_zero() const {
  if (g == 0) return true;
  for (double x : v)
    if (x != 0) return false;
  return true;
}

double LaurentPotential::operator()(double theta) const {
  double s = 0;
  for (int l = 1; l <= degree(); ++l) s += v[l - 1] * std::cos(l * theta);
  return g * s;
}

double eval_potential(const LaurentPotential& V, double theta) { return V(theta); }

namespace {

double v_at(const LaurentPotential& V, int l) {
  return l <= V.degree() ? V.v[l - 1] : 0.0;
}

void check_degree(const LaurentPotential& V, int L) {
  if (V.degree() < 1) throw Error(ErrorKind::Domain, "potential degree must be >= 1");
  if (L < V.degree() + 1)
    throw Error(ErrorKind::Domain, "L must be at least d + 1");
}

}  // namespace

double trace_direct(const LaurentPotential& V, const VerblunskySeq& a, int L) {
  check_degree(V, L);
  const auto G = ggt_matrix<double>(a, L).entries;
  Eigen::MatrixXcd P = G;
  double s = 0;
  for (int l = 1; l <= V.degree(); ++l) {
    if (l > 1) P = P * G;
    s += V.v[l - 1] * P.trace().real();
  }
  return V.g * s;
}

double f_minus_term(const LaurentPotential& V, cd a0, cd a1) {
  const double t1 = a0.real();
  const double t2 = 2 * (1 - std::norm(a0)) * a1.real() + (a0 * a0).real();
  return V.g * (v_at(V, 1) * t1 + v_at(V, 2) * t2);
}

double g_term(const LaurentPotential& V, cd x0, cd x1, cd x2) {
  const double t1 = -(x0 * std::conj(x1)).real();
  const cd p = x0 * std::conj(x1);
  const double t2 =
      -2 * (x0 * std::conj(x2)).real() * (1 - std::norm(x1)) + (p * p).real();
  return V.g * (v_at(V, 1) * t1 + v_at(V, 2) * t2);
}

double f_plus_term(const LaurentPotential& V, cd y0, cd y1) {
  if (V.degree() < 2) return 0;
  const cd p = y0 * std::conj(y1);
  return V.g * (v_at(V, 1) * -(p.real()) + v_at(V, 2) * (p * p).real());
}

double f_minus_11_candidate(cd a0, cd a1) {
  return a0.real() - std::norm(a0) * a1.real() + 0.5 * (a0 * a0).real();
}

double Decomposition::sum_g() const {
  return std::accumulate(g_terms.begin(), g_terms.end(), 0.0);
}

namespace {

Decomposition decompose_parts(const LaurentPotential& V, const VerblunskySeq& a,
                              int L) {
  check_degree(V, L);
  if (V.degree() > 2)
    throw Error(ErrorKind::NotImplemented,
                "explicit decomposition only for degree <= 2");
  if (L > a.size())
    throw Error(ErrorKind::InsufficientCoefficients, "L exceeds coefficients");
  const int d = V.degree();
  Decomposition D;
  D.family = V.family;
  D.f_minus = f_minus_term(V, a(0), d >= 2 ? a(1) : cd(0));
  for (int j = 0; j <= L - 1 - d; ++j)
    D.g_terms.push_back(g_term(V, a(j), a(j + 1), d >= 2 ? a(j + 2) : cd(0)));
  D.f_plus_explicit = d >= 2 ? f_plus_term(V, a(L - 2), a(L - 1)) : 0.0;
  return D;
}

}  // namespace

Decomposition decompose(const LaurentPotential& V, const VerblunskySeq& a,
                        int L) {
  Decomposition D = decompose_parts(V, a, L);
  D.trace = trace_direct(V, a, L);
  D.f_plus = D.trace - D.f_minus - D.sum_g();
  return D;
}

double trace_fast(const LaurentPotential& V, const VerblunskySeq& a, int L) {
  if (V.degree() > 2) return trace_direct(V, a, L);
  const Decomposition D = decompose_parts(V, a, L);
  return D.f_minus + D.sum_g() + D.f_plus_explicit;
}

namespace {

bool log_ratio_sum(const VerblunskySeq& a, const VerblunskySeq& ref, int L,
                   double& s) {
  if (L > a.size() || L > ref.size())
    throw Error(ErrorKind::InsufficientCoefficients, "L exceeds coefficients");
  s = 0;
  for (int j = 0; j < L; ++j) {
    const double x = 1 - std::norm(a(j)), y = 1 - std::norm(ref(j));
    if (!(x > 0)) return false;
    if (!(y > 0)) throw Error(ErrorKind::Domain, "reference coefficient on the circle");
    s += std::log(x / y);
  }
  return true;
}

}  // namespace

Extended r_functional(const LaurentPotential& V, const VerblunskySeq& a,
                      const VerblunskySeq& ref, int L) {
  double logs;
  if (!log_ratio_sum(a, ref, L, logs)) return Extended::infinity();
  if (V.is_zero()) return Extended::finite(-logs);
  return Extended::finite(trace_fast(V, a, L) - trace_fast(V, ref, L) - logs);
}

Extended w_functional(const LaurentPotential& V, const VerblunskySeq& a,
                      const VerblunskySeq& ref, int L) {
  double logs;
  if (!log_ratio_sum(a, ref, L, logs)) return Extended::infinity();
  if (V.is_zero()) return Extended::finite(-logs);
  const Decomposition Da = decompose_parts(V, a, L);
  const Decomposition Dr = decompose_parts(V, ref, L);
  return Extended::finite(Da.f_minus - Dr.f_minus + Da.sum_g() - Dr.sum_g() -
                          logs);
}

double m_bound(const VerblunskySeq& a, const VerblunskySeq& ref, int L, int d,
               double c_v) {
  double s = 0;
  for (int k = std::max(0, L - d); k <= L - 1; ++k) s += std::abs(a(k) - ref(k));
  return c_v * s;
}

std::vector<FunctionalRow> functional_table(const LaurentPotential& V,
                                            const VerblunskySeq& a,
                                            const VerblunskySeq& ref,
                                            int L_max, double c_v) {
  std::vector<FunctionalRow> rows;
  for (int L = V.degree() + 1; L <= L_max; ++L) {
    FunctionalRow r{};
    r.L = L;
    if (V.degree() <= 2) {
      const Decomposition D = decompose(V, a, L);
      r.trace = D.trace;
      r.f_minus = D.f_minus;
      r.f_plus = D.f_plus;
      r.sum_g = D.sum_g();
      r.w = w_functional(V, a, ref, L);
    } else {
      r.trace = trace_direct(V, a, L);
      r.w = Extended::infinity();
    }
    r.r = r_functional(V, a, ref, L);
    r.m = m_bound(a, ref, L, V.degree(), c_v);
    rows.push_back(r);
  }
  return rows;
}

void write_functional_csv(std::ostream& os,
                          const std::vector<FunctionalRow>& rows) {
  auto ext = [](const Extended& e) {
    std::ostringstream s;
    if (e.is_finite()) s << std::setprecision(17) << e.value;
    else s << "inf";
    return s.str();
  };
  os << "L,trace,F_minus,F_plus,sum_G,R_L,W_L,m_L\n";
  os << std::setprecision(17);
  for (const auto& r : rows)
    os << r.L << ',' << r.trace << ',' << r.f_minus << ',' << r.f_plus << ','
       << r.sum_g << ',' << ext(r.r) << ',' << ext(r.w) << ',' << r.m << '\n';
}

}  // namespace opuc
