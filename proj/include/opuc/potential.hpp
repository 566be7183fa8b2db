#pragma once

#include <complex>
#include <iosfwd>
#include <vector>

#include "error.hpp"
#include "verblunsky.hpp"

namespace opuc {

enum class Family { F10, F11, F20, Custom };

const char* family_name(Family f);
Family family_from_code(int code);  // 10, 11, 20

// V(z) = g * sum_l v_l (z^l + z^{-l}) / 2.
struct LaurentPotential {
  std::vector<double> v;  // v_1..v_d
  double g = 1;
  Family family = Family::Custom;

  static LaurentPotential of(Family f, double g = 1);
  static LaurentPotential zero();

  int degree() const { return static_cast<int>(v.size()); }
  bool is_zero() const;
  double operator()(double theta) const;
};

double eval_potential(const LaurentPotential& V, double theta);

// g * sum_l v_l Re tr(G_L^l) on the GGT section.
double trace_direct(const LaurentPotential& V, const VerblunskySeq& a, int L);

struct Decomposition {
  double f_minus = 0;
  std::vector<double> g_terms;  // j = 0..L-1-d
  double f_plus = 0;            // by differencing against trace_direct
  double f_plus_explicit = 0;   // boundary polynomial in the last d entries
  double trace = 0;
  Family family = Family::Custom;

  double sum_g() const;
};

// Local pieces for d <= 2; x(j) uses the alpha_{-1} = -1 convention.
double f_minus_term(const LaurentPotential& V, std::complex<double> a0,
                    std::complex<double> a1);
double g_term(const LaurentPotential& V, std::complex<double> x0,
              std::complex<double> x1, std::complex<double> x2);
double f_plus_term(const LaurentPotential& V, std::complex<double> y0,
                   std::complex<double> y1);
// Candidate F_- of the (1,1) source potential with the factor 1 - |a0|^2
// attached to the wrong coefficient; kept for the test that exposes it.
double f_minus_11_candidate(std::complex<double> a0, std::complex<double> a1);

Decomposition decompose(const LaurentPotential& V, const VerblunskySeq& a,
                        int L);

// F_- + sum G + F_+ (explicit) for d <= 2, trace_direct otherwise.
double trace_fast(const LaurentPotential& V, const VerblunskySeq& a, int L);

Extended r_functional(const LaurentPotential& V, const VerblunskySeq& a,
                      const VerblunskySeq& ref, int L);
Extended w_functional(const LaurentPotential& V, const VerblunskySeq& a,
                      const VerblunskySeq& ref, int L);
double m_bound(const VerblunskySeq& a, const VerblunskySeq& ref, int L, int d,
               double c_v = 1);

struct FunctionalRow {
  int L;
  double trace, f_minus, f_plus, sum_g;
  Extended r, w;
  double m;
};

std::vector<FunctionalRow> functional_table(const LaurentPotential& V,
                                            const VerblunskySeq& a,
                                            const VerblunskySeq& ref,
                                            int L_max, double c_v = 1);
void write_functional_csv(std::ostream& os,
                          const std::vector<FunctionalRow>& rows);

}  // namespace opuc
