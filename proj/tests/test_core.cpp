#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include <opuc/coefficients.hpp>
#include <opuc/equilibrium.hpp>
#include <opuc/serialize.hpp>
#include <opuc/sumrule.hpp>

using namespace opuc;
using cd = std::complex<double>;
using std::numbers::pi;

namespace {

using Poly = std::vector<cd>;  // ascending powers

cd poly_eval(const Poly& p, cd z) {
  cd s = 0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) s = s * z + *it;
  return s;
}

cd inner(const Poly& p, const Poly& q, const std::vector<Atom>& atoms) {
  cd s = 0;
  for (const auto& a : atoms) {
    const cd z = std::polar(1.0, a.theta);
    s += a.w * poly_eval(p, z) * std::conj(poly_eval(q, z));
  }
  return s;
}

// Monic orthogonal polynomials by Gram-Schmidt on monomials, alpha_k from
// Phi_{k+1}(0) = -conj(alpha_k).
std::vector<cd> gram_schmidt_alphas(const std::vector<Atom>& atoms, int count) {
  std::vector<Poly> phi{{cd(1)}};
  std::vector<cd> out;
  for (int k = 1; k <= count; ++k) {
    Poly p(k + 1, cd(0));
    p[k] = 1;
    for (int j = 0; j < k; ++j) {
      const cd c = inner(p, phi[j], atoms) / inner(phi[j], phi[j], atoms);
      for (int i = 0; i <= j; ++i) p[i] -= c * phi[j][i];
    }
    out.push_back(-std::conj(p[0]));
    phi.push_back(p);
  }
  return out;
}

std::vector<Atom> random_atoms(std::mt19937_64& gen, int n) {
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<Atom> atoms;
  double total = 0;
  for (int i = 0; i < n; ++i) {
    atoms.push_back({2 * pi * (i + 0.2 + 0.6 * u(gen)) / n, 0.2 + u(gen)});
    total += atoms.back().w;
  }
  for (auto& a : atoms) a.w /= total;
  return atoms;
}

VerblunskySeq random_seq(std::mt19937_64& gen, int n, double rmax,
                         bool terminated) {
  std::uniform_real_distribution<double> u(0, 1);
  VerblunskySeq a = VerblunskySeq::zeros(n);
  for (int k = 0; k < n; ++k)
    a.coeffs(k) = std::polar(rmax * std::sqrt(u(gen)), 2 * pi * u(gen));
  if (terminated) {
    a.coeffs(n - 1) = std::polar(1.0, 2 * pi * u(gen));
    a.terminated = true;
  }
  return a;
}

double max_diff(const VerblunskySeq& a, const VerblunskySeq& b, int n) {
  double e = 0;
  for (int k = 0; k < n; ++k) e = std::max(e, std::abs(a.at(k) - b.at(k)));
  return e;
}

}  // namespace

TEST_CASE("single atom at 0 gives alpha_0 = 1") {
  auto a = verblunsky_from_discrete(CircleMeasure::discrete({{0.0, 1.0}}));
  REQUIRE(a.size() == 1);
  CHECK(a.terminated);
  CHECK(std::abs(a.coeffs(0) - cd(1)) < 1e-15);
}

TEST_CASE("two antipodal atoms match Gram-Schmidt") {
  std::vector<Atom> atoms{{0.0, 0.5}, {pi, 0.5}};
  auto a = verblunsky_from_discrete(CircleMeasure::discrete(atoms));
  auto gs = gram_schmidt_alphas(atoms, 2);
  REQUIRE(a.size() == 2);
  CHECK(std::abs(a.coeffs(0)) < 1e-15);
  CHECK(std::abs(std::abs(a.coeffs(1)) - 1) < 1e-12);
  CHECK(std::abs(a.coeffs(1) - gs[1]) < 1e-12);
}

TEST_CASE("roots of unity give zeros then a unit entry") {
  for (int n : {3, 8, 17}) {
    std::vector<Atom> atoms;
    for (int i = 0; i < n; ++i) atoms.push_back({2 * pi * i / n, 1.0 / n});
    auto a = verblunsky_from_discrete(CircleMeasure::discrete(atoms));
    REQUIRE(a.size() == n);
    for (int k = 0; k + 1 < n; ++k) CHECK(std::abs(a.coeffs(k)) < 1e-12);
    CHECK(std::abs(std::abs(a.coeffs(n - 1)) - 1) < 1e-12);
  }
}

TEST_CASE("random discrete measures match Gram-Schmidt") {
  std::mt19937_64 gen(7);
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 2 + rep % 5;
    auto atoms = random_atoms(gen, n);
    auto a = verblunsky_from_discrete(CircleMeasure::discrete(atoms));
    auto gs = gram_schmidt_alphas(atoms, n);
    for (int k = 0; k < n; ++k) CHECK(std::abs(a.coeffs(k) - gs[k]) < 1e-10);
  }
}

TEST_CASE("duplicate atoms are degenerate, tiny weights warn") {
  try {
    verblunsky_from_discrete(
        CircleMeasure::discrete({{1.0, 0.5}, {1.0 + 1e-12, 0.5}}));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateMeasure);
  }
  auto a = verblunsky_from_discrete(
      CircleMeasure::discrete({{0.0, 1 - 1e-16}, {2.0, 1e-16}}));
  CHECK(!a.warnings.empty());
}

TEST_CASE("uniform density has zero coefficients") {
  auto a = verblunsky_from_density(uniform_measure(), 10);
  REQUIRE(a.size() == 10);
  for (int k = 0; k < 10; ++k) CHECK(std::abs(a.coeffs(k)) < 1e-13);
}

TEST_CASE("Geronimus density has constant coefficients") {
  for (double gamma : {0.2, 0.5, 0.8}) {
    auto a = verblunsky_from_density(geronimus_measure(gamma, -1), 30);
    for (int k = 0; k < 30; ++k)
      CHECK(std::abs(a.coeffs(k) - cd(-gamma)) < 1e-8);
  }
}

TEST_CASE("Gross-Witten density matches the closed form at g = 0.5") {
  const double g = 0.5;
  auto m = build_model(Family::F10, g);
  auto a = verblunsky_from_density(m.measure, 8);
  const double s = std::sqrt(1 / (g * g) - 1);
  const double xp = 1 / g + s, xm = 1 / g - s;
  for (int n = 0; n < 8; ++n) {
    const double closed =
        -(xp - xm) / (std::pow(xp, n + 2) - std::pow(xm, n + 2));
    CHECK(std::abs(a.coeffs(n) - cd(closed)) < 1e-8);
  }
  // The denominator x+^{n+2} - x-^{n} misses already at n = 0.
  const double typo = -(xp - xm) / (std::pow(xp, 2) - 1);
  CHECK(std::abs(a.coeffs(0) - cd(typo)) > 1e-2);
}

TEST_CASE("coarse quadrature without refinement reports the failing degree") {
  QuadratureConfig q;
  q.nodes = 64;
  q.refine = false;
  try {
    verblunsky_from_density(uniform_measure(), 100, q);
    FAIL("expected an error");
  } catch (const IllConditionedError& e) {
    CHECK(e.kind() == ErrorKind::IllConditioned);
    CHECK(e.degree() >= 60);
    CHECK(e.degree() <= 64);
  }
}

TEST_CASE("GGT of the zero sequence is the shift") {
  auto G = ggt_matrix(VerblunskySeq::zeros(3), 3).entries;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(std::abs(G(i, j) - cd(i == j + 1 ? 1 : 0)) < 1e-15);
}

TEST_CASE("GGT entries for constant real coefficients") {
  const double gamma = 0.3;
  auto G = ggt_matrix(VerblunskySeq::constant(5, gamma), 4).entries;
  CHECK(std::abs(G(0, 0) - gamma) < 1e-15);
  CHECK(std::abs(G(0, 1) - gamma * std::sqrt(1 - gamma * gamma)) < 1e-15);
  CHECK(std::abs(G(1, 1) + gamma * gamma) < 1e-15);
  CHECK(std::abs(G(1, 0) - std::sqrt(1 - gamma * gamma)) < 1e-15);
}

TEST_CASE("GGT last column of a terminated length-3 sequence") {
  VerblunskySeq a({cd(0.3, 0.1), cd(-0.2, 0.4), std::polar(1.0, 0.7)}, true);
  auto rep = ggt_matrix(a, 3);
  const cd a0 = a(0), a1 = a(1), a2 = a(2);
  const double r0 = a.rho(0), r1 = a.rho(1);
  CHECK(std::abs(rep.entries(0, 2) - r0 * r1 * std::conj(a2)) < 1e-15);
  CHECK(std::abs(rep.entries(1, 2) + a0 * r1 * std::conj(a2)) < 1e-15);
  CHECK(std::abs(rep.entries(2, 2) + a1 * std::conj(a2)) < 1e-15);
  CHECK(rep.unitarity_defect() < 1e-14);
}

TEST_CASE("sections beyond the available coefficients are rejected") {
  try {
    ggt_matrix(VerblunskySeq::zeros(3), 4);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InsufficientCoefficients);
  }
  CHECK_THROWS_AS(cmv_matrix(VerblunskySeq::zeros(2), 5), Error);
}

TEST_CASE("CMV of the zero sequence is a permutation") {
  VerblunskySeq a({0, 0, 0, 1}, true);
  auto rep = cmv_matrix(a, 4);
  CHECK(rep.unitarity_defect() < 1e-15);
  for (int i = 0; i < 4; ++i) {
    int ones = 0;
    for (int j = 0; j < 4; ++j) {
      const double v = std::abs(rep.entries(i, j));
      CHECK((v < 1e-15 || std::abs(v - 1) < 1e-15));
      ones += v > 0.5;
    }
    CHECK(ones == 1);
  }
}

TEST_CASE("CMV last rows of terminated sequences") {
  VerblunskySeq a3({cd(0.3, 0.1), cd(-0.2, 0.4), std::polar(1.0, 0.7)}, true);
  auto C3 = cmv_matrix(a3, 3).entries;
  CHECK(std::abs(C3(2, 0)) < 1e-15);
  CHECK(std::abs(C3(2, 1) - std::conj(a3(2)) * a3.rho(1)) < 1e-15);
  CHECK(std::abs(C3(2, 2) + std::conj(a3(2)) * a3(1)) < 1e-15);

  VerblunskySeq a4({cd(0.3, 0.1), cd(-0.2, 0.4), cd(0.5, -0.1),
                    std::polar(1.0, 2.0)},
                   true);
  auto C4 = cmv_matrix(a4, 4).entries;
  CHECK(std::abs(C4(3, 0)) < 1e-15);
  CHECK(std::abs(C4(3, 1) - a4.rho(2) * a4.rho(1)) < 1e-15);
  CHECK(std::abs(C4(3, 2) + a4.rho(2) * a4(1)) < 1e-15);
  CHECK(std::abs(C4(3, 3) + std::conj(a4(3)) * a4(2)) < 1e-15);
}

TEST_CASE("CMV is five-diagonal and unitary when full") {
  std::mt19937_64 gen(11);
  for (int n : {5, 12, 25}) {
    auto a = random_seq(gen, n, 0.9, true);
    auto rep = cmv_matrix(a, n);
    CHECK(rep.unitarity_defect() < 1e-13);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (std::abs(i - j) > 2) CHECK(std::abs(rep.entries(i, j)) == 0);
  }
}

TEST_CASE("spectral measure of alpha = [1] is the unit atom at 0") {
  VerblunskySeq a({cd(1)}, true);
  auto mu = spectral_measure(ggt_matrix(a, 1));
  REQUIRE(mu.atoms().size() == 1);
  CHECK(std::abs(mu.atoms()[0].theta) < 1e-15);
  CHECK(std::abs(mu.atoms()[0].w - 1) < 1e-15);
}

TEST_CASE("spectral measure rejects non-unitary sections") {
  VerblunskySeq a = VerblunskySeq::constant(4, 0.5);
  try {
    spectral_measure(ggt_matrix(a, 4));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Domain);
  }
}

TEST_CASE("GGT and CMV give the same spectral measure") {
  std::mt19937_64 gen(3);
  for (int n : {2, 7, 20}) {
    auto a = random_seq(gen, n, 0.8, true);
    auto m1 = spectral_measure(ggt_matrix(a, n));
    auto m2 = spectral_measure(cmv_matrix(a, n));
    REQUIRE(m1.atoms().size() == m2.atoms().size());
    for (size_t i = 0; i < m1.atoms().size(); ++i) {
      CHECK(angular_distance(m1.atoms()[i].theta, m2.atoms()[i].theta) < 1e-9);
      CHECK(std::abs(m1.atoms()[i].w - m2.atoms()[i].w) < 1e-9);
    }
  }
}

TEST_CASE("discrete roundtrip through the CMV matrix") {
  std::mt19937_64 gen(5);
  for (int n = 1; n <= 50; n += 7) {
    auto a = random_seq(gen, n, 0.9, true);
    auto b = verblunsky_from_discrete(spectral_measure(cmv_matrix(a, n)));
    REQUIRE(b.size() == n);
    CHECK(b.terminated);
    CHECK(max_diff(a, b, n) < 1e-8);
  }
}

TEST_CASE("norm product identity") {
  std::mt19937_64 gen(13);
  auto atoms = random_atoms(gen, 30);
  auto a = verblunsky_from_discrete(CircleMeasure::discrete(atoms));
  auto gs = gram_schmidt_alphas(atoms, 12);
  // Rebuild Phi_k by the Szego recursion and integrate |Phi_k|^2.
  Poly phi{cd(1)}, phis{cd(1)};
  double prod = 1;
  for (int k = 0; k < 12; ++k) {
    const double norm2 = inner(phi, phi, atoms).real();
    CHECK(std::abs(norm2 - prod) <= 1e-12 * prod);
    const cd ak = a(k);
    Poly next(k + 2, cd(0)), nexts(k + 2, cd(0));
    for (int i = 0; i <= k; ++i) {
      next[i + 1] += phi[i];
      next[i] -= std::conj(ak) * phis[i];
      nexts[i] += phis[i];
      nexts[i + 1] -= ak * phi[i];
    }
    phi = next;
    phis = nexts;
    prod *= 1 - std::norm(ak);
    CHECK(std::abs(ak - gs[k]) < 1e-10);
  }
}

TEST_CASE("GGT and CMV traces agree on full matrices") {
  std::mt19937_64 gen(17);
  for (int n = 1; n <= 30; n += 4) {
    auto a = random_seq(gen, n, 0.95, true);
    auto G = ggt_matrix(a, n).entries;
    auto C = cmv_matrix(a, n).entries;
    Eigen::MatrixXcd Gk = G, Ck = C;
    for (int k = 1; k <= 4; ++k) {
      CHECK(std::abs(Gk.trace() - Ck.trace()) < 1e-10);
      Gk = Gk * G;
      Ck = Ck * C;
    }
  }
}

TEST_CASE("Aleksandrov rotation") {
  VerblunskySeq ge = VerblunskySeq::constant(6, -0.4);
  CHECK(max_diff(aleksandrov_rotate(ge, cd(1)), ge, 6) == 0);
  auto plus = aleksandrov_rotate(ge, cd(-1));
  for (int k = 0; k < 6; ++k) CHECK(std::abs(plus.coeffs(k) - 0.4) < 1e-15);

  std::mt19937_64 gen(19);
  auto a = random_seq(gen, 10, 0.9, false);
  const cd lambda = std::polar(1.0, 1.3);
  auto back = aleksandrov_rotate(aleksandrov_rotate(a, lambda), std::conj(lambda));
  CHECK(max_diff(a, back, 10) < 1e-15);
  auto r = aleksandrov_rotate(a, lambda);
  for (int k = 0; k < 10; ++k)
    CHECK(std::abs(std::abs(r.coeffs(k)) - std::abs(a.coeffs(k))) < 1e-15);
  CHECK_THROWS_AS(aleksandrov_rotate(a, cd(0.5)), Error);
}

TEST_CASE("Bernstein-Szego measures") {
  auto unif = bernstein_szego_measure(VerblunskySeq{});
  for (double t : {0.0, 1.0, 4.0}) CHECK(std::abs(unif.density(t) - 0.5 / pi) < 1e-15);

  auto mu = bernstein_szego_measure(VerblunskySeq({cd(0.5)}));
  CHECK(std::abs(mu.total_mass() - 1) < 1e-12);
  auto a = verblunsky_from_density(mu, 8);
  CHECK(std::abs(a.coeffs(0) - cd(0.5)) < 1e-9);
  for (int k = 1; k < 8; ++k) CHECK(std::abs(a.coeffs(k)) < 1e-9);
}

TEST_CASE("AC roundtrip through Bernstein-Szego") {
  std::mt19937_64 gen(23);
  for (int rep = 0; rep < 6; ++rep) {
    auto alpha = random_seq(gen, 1 + rep % 5, 0.8, false);
    auto mu = bernstein_szego_measure(alpha);
    CHECK(std::abs(mu.total_mass() - 1) < 1e-10);
    auto a = verblunsky_from_density(mu, alpha.size() + 6);
    CHECK(max_diff(alpha, a, alpha.size() + 6) < 1e-9);
  }
}

TEST_CASE("Levinson on Bernstein-Szego moments") {
  VerblunskySeq alpha({cd(0.3, -0.2), cd(0.1, 0.4)});
  auto mu = bernstein_szego_measure(alpha);
  auto c = trig_moments(mu, 6);
  auto a = levinson_from_moments(c, 6);
  CHECK(max_diff(alpha, a, 6) < 1e-9);
}

TEST_CASE("long double instantiation of the core templates") {
  using L = long double;
  BasicVerblunskySeq<L> a({std::complex<L>(0.25L, 0.1L), std::complex<L>(-0.3L),
                           std::polar(L(1), L(0.4))},
                          true);
  auto G = ggt_matrix(a, 3);
  auto C = cmv_matrix(a, 3);
  CHECK(G.unitarity_defect() < 1e-17L);
  CHECK(std::abs(G.entries.trace() - C.entries.trace()) < 1e-17L);
  std::vector<L> theta{0.1L, 2.0L, 4.0L}, w{0.2L, 0.5L, 0.3L};
  auto b = schur_from_nodes(theta, w, 3, true);
  CHECK(std::abs(std::abs(b.coeffs(2)) - 1) < 1e-15L);
}

TEST_CASE("angles are canonical and JSON roundtrips exactly") {
  CHECK(std::abs(canonical(-0.5) - (2 * pi - 0.5)) < 1e-15);
  CHECK(canonical(2 * pi) == 0);
  CHECK(angular_distance(0.1, 2 * pi - 0.1) == doctest::Approx(0.2));

  std::mt19937_64 gen(29);
  auto a = random_seq(gen, 9, 0.9, true);
  auto b = coeffs_from_json(to_json(a));
  CHECK(b.terminated);
  for (int k = 0; k < 9; ++k) CHECK(b.coeffs(k) == a.coeffs(k));

  auto mu = CircleMeasure::discrete(random_atoms(gen, 7));
  auto j = to_json(mu);
  CHECK(j["type"] == "discrete");
  auto mu2 = discrete_from_json(nlohmann::json::parse(j.dump()));
  REQUIRE(mu2.atoms().size() == 7);
  for (int i = 0; i < 7; ++i) {
    CHECK(mu2.atoms()[i].theta == mu.atoms()[i].theta);
    CHECK(mu2.atoms()[i].w == mu.atoms()[i].w);
  }
}
