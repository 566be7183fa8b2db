#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <sstream>

#include <opuc/coefficients.hpp>
#include <opuc/equilibrium.hpp>
#include <opuc/potential.hpp>

using namespace opuc;
using cd = std::complex<double>;
using std::numbers::pi;

namespace {

VerblunskySeq random_seq(std::mt19937_64& gen, int n, double rmax) {
  std::uniform_real_distribution<double> u(0, 1);
  VerblunskySeq a = VerblunskySeq::zeros(n);
  for (int k = 0; k < n; ++k)
    a.coeffs(k) = std::polar(rmax * std::sqrt(u(gen)), 2 * pi * u(gen));
  return a;
}

const LaurentPotential kMixed{{0.3, -0.7}, 1.4, Family::Custom};

std::vector<LaurentPotential> all_potentials() {
  return {LaurentPotential::of(Family::F10, 0.8),
          LaurentPotential::of(Family::F11, -1.3),
          LaurentPotential::of(Family::F20, 2.0), kMixed};
}

}  // namespace

TEST_CASE("potential evaluation") {
  CHECK(eval_potential(LaurentPotential::of(Family::F10), 0) == doctest::Approx(1));
  CHECK(eval_potential(LaurentPotential::of(Family::F20), pi) ==
        doctest::Approx(-1.5).epsilon(1e-15));
  CHECK(eval_potential(LaurentPotential::of(Family::F11, 2), 0.3) ==
        doctest::Approx(std::cos(0.6)));
  const auto V = LaurentPotential::of(Family::F20, 0.7);
  for (double t : {0.1, 1.0, 2.5})
    CHECK(V(t) == doctest::Approx(0.7 * (4.0 / 3 * std::cos(t) -
                                         std::cos(2 * t) / 6)));
}

TEST_CASE("trace of the zero sequence vanishes") {
  for (const auto& V : all_potentials())
    for (int L : {3, 10, 40}) {
      CHECK(std::abs(trace_direct(V, VerblunskySeq::zeros(L), L)) < 1e-15);
      auto D = decompose(V, VerblunskySeq::zeros(L), L);
      CHECK(D.f_minus == 0);
      CHECK(D.sum_g() == 0);
      CHECK(std::abs(D.f_plus) < 1e-15);
    }
}

TEST_CASE("trace for constant real coefficients") {
  const double gamma = 0.35, g = 1.7;
  const auto V = LaurentPotential::of(Family::F10, g);
  for (int L : {2, 7, 30}) {
    const double expect = g * (gamma - (L - 1) * gamma * gamma);
    CHECK(trace_direct(V, VerblunskySeq::constant(L, gamma), L) ==
          doctest::Approx(expect).epsilon(1e-13));
  }
}

TEST_CASE("trace on a full unitary matrix sums V over the eigenvalues") {
  std::mt19937_64 gen(1);
  for (int n : {4, 11, 25}) {
    auto a = random_seq(gen, n, 0.9);
    a.coeffs(n - 1) = std::polar(1.0, 0.9);
    a.terminated = true;
    auto mu = spectral_measure(cmv_matrix(a, n));
    for (const auto& V : all_potentials()) {
      double s = 0;
      for (const auto& at : mu.atoms()) s += V(at.theta);
      CHECK(std::abs(trace_direct(V, a, n) - s) < 1e-11);
      CHECK(std::abs(trace_fast(V, a, n) - s) < 1e-11);
    }
  }
}

TEST_CASE("trace needs L >= d + 1") {
  try {
    trace_direct(LaurentPotential::of(Family::F20), VerblunskySeq::zeros(5), 2);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Domain);
  }
}

TEST_CASE("decomposition identity over random draws") {
  std::mt19937_64 gen(2);
  int draws = 0;
  double worst = 0;
  for (int rep = 0; rep < 300; ++rep) {
    const int L = 3 + rep % 62;
    auto a = random_seq(gen, L, 0.95);
    for (const auto& V : all_potentials()) {
      const auto D = decompose(V, a, L);
      CHECK(D.g_terms.size() == static_cast<size_t>(L - V.degree()));
      const double fast = D.f_minus + D.sum_g() + D.f_plus_explicit;
      worst = std::max(worst, std::abs(fast - D.trace) / L);
      worst = std::max(worst, std::abs(D.f_plus - D.f_plus_explicit) / L);
      ++draws;
    }
  }
  CHECK(draws >= 1000);
  CHECK(worst < 1e-12);
}

TEST_CASE("random complex coefficients at L = 20, degree 2") {
  std::mt19937_64 gen(3);
  auto a = random_seq(gen, 20, 0.9);
  const auto V = LaurentPotential::of(Family::F20, 1.1);
  CHECK(std::abs(trace_fast(V, a, 20) - trace_direct(V, a, 20)) < 1e-12);
}

TEST_CASE("F_+ depends only on the last d coefficients") {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  for (const auto& V : all_potentials()) {
    const int L = 12, d = V.degree();
    auto a = random_seq(gen, L, 0.9);
    const double fp = decompose(V, a, L).f_plus;
    for (int j = 0; j < L - d; ++j) {
      auto b = a;
      b.coeffs(j) = std::polar(0.9 * std::abs(u(gen)) + 0.05, 7.0 * u(gen));
      CHECK(std::abs(decompose(V, b, L).f_plus - fp) < 1e-12);
    }
  }
}

TEST_CASE("F_+ is bounded uniformly in L") {
  std::mt19937_64 gen(5);
  for (const auto& V : all_potentials()) {
    double bound = 0;
    for (double x : V.v) bound += std::abs(V.g * x);
    for (int L : {5, 20, 64, 200}) {
      auto a = random_seq(gen, L, 1.0);
      CHECK(std::abs(decompose(V, a, L).f_plus) <= bound);
    }
  }
}

TEST_CASE("candidate F_- of the (1,1) potential breaks locality") {
  // Differencing against the candidate form leaves a remainder that moves
  // with alpha_0 and alpha_1, far from the boundary.
  std::mt19937_64 gen(6);
  const auto V = LaurentPotential::of(Family::F11, 1);
  double spread = 0;
  auto a = random_seq(gen, 10, 0.8);
  const auto D = decompose(V, a, 10);
  const double base = D.trace - f_minus_11_candidate(a(0), a(1)) - D.sum_g();
  for (int rep = 0; rep < 5; ++rep) {
    auto b = a;
    b.coeffs(0) = random_seq(gen, 1, 0.8).coeffs(0);
    const auto Db = decompose(V, b, 10);
    const double fp = Db.trace - f_minus_11_candidate(b(0), b(1)) - Db.sum_g();
    spread = std::max(spread, std::abs(fp - base));
    CHECK(std::abs(Db.f_plus - D.f_plus) < 1e-12);
  }
  CHECK(spread > 1e-3);
}

TEST_CASE("trace is invariant under conjugation") {
  std::mt19937_64 gen(7);
  for (const auto& V : all_potentials()) {
    auto a = random_seq(gen, 15, 0.9);
    VerblunskySeq b(a.coeffs.conjugate());
    CHECK(std::abs(trace_direct(V, a, 15) - trace_direct(V, b, 15)) < 1e-13);
  }
}

TEST_CASE("degree three uses the dense trace") {
  LaurentPotential V{{0.5, 0.2, -0.4}, 1.0, Family::Custom};
  std::mt19937_64 gen(8);
  auto a = random_seq(gen, 10, 0.8);
  CHECK(trace_fast(V, a, 10) == trace_direct(V, a, 10));
  try {
    decompose(V, a, 10);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotImplemented);
  }
}

TEST_CASE("R_L and W_L vanish at the reference") {
  std::mt19937_64 gen(9);
  auto a = random_seq(gen, 30, 0.9);
  for (const auto& V : all_potentials())
    for (int L : {3, 10, 30}) {
      CHECK(r_functional(V, a, a, L).value == 0);
      CHECK(w_functional(V, a, a, L).value == 0);
      CHECK(m_bound(a, a, L, V.degree()) == 0);
    }
}

TEST_CASE("R_L with V = 0 is the Szego-Verblunsky sum") {
  std::mt19937_64 gen(10);
  auto a = random_seq(gen, 25, 0.9);
  double s = 0;
  for (int L = 1; L <= 25; ++L) {
    s -= std::log(1 - std::norm(a(L - 1)));
    auto r = r_functional(LaurentPotential::zero(), a, VerblunskySeq::zeros(25), L);
    REQUIRE(r.is_finite());
    CHECK(r.value == doctest::Approx(s).epsilon(1e-15));
  }
}

TEST_CASE("R_L - W_L is the boundary difference") {
  std::mt19937_64 gen(11);
  for (const auto& V : all_potentials()) {
    double worst = 0;
    for (int rep = 0; rep < 20; ++rep) {
      const int L = V.degree() + 1 + rep * 3;
      auto a = random_seq(gen, L, 0.95), ref = random_seq(gen, L, 0.95);
      const double diff = r_functional(V, a, ref, L).value -
                          w_functional(V, a, ref, L).value;
      const double fp =
          decompose(V, a, L).f_plus - decompose(V, ref, L).f_plus;
      worst = std::max(worst, std::abs(diff - fp));
    }
    CHECK(worst < 1e-11);
  }
}

TEST_CASE("a unit coefficient before L gives the infinity marker") {
  VerblunskySeq a({cd(0.2), cd(0, 1), cd(0.1)});
  const auto V = LaurentPotential::of(Family::F10);
  CHECK(!r_functional(V, a, VerblunskySeq::zeros(3), 3).is_finite());
  CHECK(!w_functional(V, a, VerblunskySeq::zeros(3), 2).is_finite());
  VerblunskySeq b({cd(0.2), cd(0.1), cd(0, 1)});
  CHECK(r_functional(V, b, VerblunskySeq::zeros(3), 2).is_finite());
}

TEST_CASE("m_L scaling and decay toward the reference") {
  std::mt19937_64 gen(12);
  auto a = random_seq(gen, 20, 0.9), b = random_seq(gen, 20, 0.9);
  CHECK(m_bound(a, b, 15, 2, 2.0) == doctest::Approx(2 * m_bound(a, b, 15, 2)));

  auto gw = gw_coefficients(2, 80);
  auto lim = VerblunskySeq::constant(80, -std::sqrt(0.5));
  double prev = m_bound(gw, lim, 2, 1);
  for (int L = 4; L <= 14; L += 2) {
    const double m = m_bound(gw, lim, L, 1);
    CHECK(m < prev);
    prev = m;
  }
  CHECK(m_bound(gw, lim, 80, 1) < 1e-8);
}

TEST_CASE("functional CSV layout") {
  std::mt19937_64 gen(13);
  auto a = random_seq(gen, 12, 0.7);
  auto rows = functional_table(LaurentPotential::of(Family::F20, 0.5), a,
                               VerblunskySeq::zeros(12), 12);
  CHECK(rows.size() == 10);
  CHECK(rows.front().L == 3);
  std::ostringstream os;
  write_functional_csv(os, rows);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "L,trace,F_minus,F_plus,sum_G,R_L,W_L,m_L");
  int n = 0;
  while (std::getline(is, line)) ++n;
  CHECK(n == 10);
}
