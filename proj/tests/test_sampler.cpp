#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include <opuc/coefficients.hpp>
#include <opuc/sampler.hpp>

using namespace opuc;
using cd = std::complex<double>;
using std::numbers::pi;

namespace {

// cdf of |alpha_k|^2 ~ Beta(1, m).
auto beta1_cdf(int m) {
  return [m](double x) { return x <= 0 ? 0.0 : x >= 1 ? 1.0 : 1 - std::pow(1 - x, m); };
}

double uniform_cdf(double x) { return std::clamp(x, 0.0, 1.0); }

double phase01(cd z) { return canonical(std::arg(z)) / (2 * pi); }

}  // namespace

TEST_CASE("SplitMix64 reference stream") {
  SplitMix64 rng(0);
  CHECK(rng.next() == 0xE220A8397B1DCDAFULL);
  CHECK(rng.next() == 0x6E789E6AA1B965F4ULL);
  SplitMix64 a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    CHECK((u > 0 && u < 1));
  }
}

TEST_CASE("CUE coefficient marginals") {
  const int n = 8, draws = 20000;
  SplitMix64 rng(1);
  std::vector<std::vector<double>> mod(n), ph(n);
  for (int i = 0; i < draws; ++i) {
    auto a = sample_cue(n, rng);
    REQUIRE(a.size() == n);
    CHECK(a.terminated);
    CHECK(std::abs(std::abs(a.coeffs(n - 1)) - 1) < 1e-15);
    for (int k = 0; k < n; ++k) {
      mod[k].push_back(std::norm(a.coeffs(k)));
      ph[k].push_back(phase01(a.coeffs(k)));
    }
  }
  const double level = 1e-3 / (2 * n);
  for (int k = 0; k + 1 < n; ++k) {
    CAPTURE(k);
    CHECK(ks_pvalue(ks_statistic(mod[k], beta1_cdf(n - k - 1)), draws) > level);
  }
  for (int k = 0; k < n; ++k) CHECK(ks_pvalue(ks_statistic(ph[k], uniform_cdf), draws) > level);
  // alpha_{n-2} is uniform on the disk: |alpha|^2 ~ U(0, 1).
  CHECK(ks_pvalue(ks_statistic(mod[n - 2], uniform_cdf), draws) > level);
}

TEST_CASE("CUE with n = 1") {
  SplitMix64 rng(2);
  std::vector<double> ph;
  for (int i = 0; i < 5000; ++i) {
    auto a = sample_cue(1, rng);
    REQUIRE(a.size() == 1);
    CHECK(std::abs(std::abs(a.coeffs(0)) - 1) < 1e-15);
    ph.push_back(phase01(a.coeffs(0)));
  }
  CHECK(ks_pvalue(ks_statistic(ph, uniform_cdf), 5000) > 1e-3);
}

TEST_CASE("Dirichlet weights") {
  SplitMix64 rng(3);
  CHECK(dirichlet_weights(1, rng) == std::vector<double>{1.0});
  const int n = 5, draws = 20000;
  std::vector<double> mean(n, 0);
  for (int i = 0; i < draws; ++i) {
    auto w = dirichlet_weights(n, rng);
    double s = 0;
    for (int k = 0; k < n; ++k) {
      CHECK(w[k] > 0);
      s += w[k];
      mean[k] += w[k] / draws;
    }
    CHECK(std::abs(s - 1) < 1e-14);
  }
  for (double m : mean) CHECK(std::abs(m - 0.2) < 0.005);
}

TEST_CASE("local energy differences match full recomputation") {
  SplitMix64 rng(4);
  const std::vector<LaurentPotential> pots{
      LaurentPotential::zero(), LaurentPotential::of(Family::F10, 0.7),
      LaurentPotential::of(Family::F11, -1.2), LaurentPotential::of(Family::F20, 2.0),
      LaurentPotential{{0.4, 0.1, -0.3}, 1.0, Family::Custom}};
  for (const auto& V : pots)
    for (int n : {3, 4, 9, 20}) {
      if (n < V.degree() + 1) continue;
      auto a = sample_cue(n, rng);
      const double h = coeff_energy(V, a);
      for (int j = 0; j < n; ++j) {
        cd z = j == n - 1 ? std::polar(1.0, 2 * pi * rng.uniform())
                          : std::polar(0.95 * std::sqrt(rng.uniform()), 2 * pi * rng.uniform());
        auto b = a;
        b.coeffs(j) = z;
        CHECK(std::abs(coeff_delta_energy(V, a, j, z) - (coeff_energy(V, b) - h)) < 1e-9);
      }
    }
}

TEST_CASE("finite-state stationarity of the Metropolis rule at n = 3") {
  // Grid states (alpha_0, alpha_1, alpha_2) with a symmetric single-site
  // proposal and the chain's acceptance min(1, exp(-dH)).
  const auto V = LaurentPotential::of(Family::F20, 1.5);
  std::vector<cd> disk, circle;
  for (double r : {0.1, 0.45, 0.8})
    for (int k = 0; k < 3; ++k) disk.push_back(std::polar(r, 2 * pi * (k + 0.3 * r) / 3));
  for (int k = 0; k < 4; ++k) circle.push_back(std::polar(1.0, 2 * pi * (k + 0.1) / 4));
  const int m = static_cast<int>(disk.size()), c = static_cast<int>(circle.size());
  const int N = m * m * c;
  auto seq = [&](int s) {
    VerblunskySeq a({disk[s / (m * c)], disk[(s / c) % m], circle[s % c]}, true);
    return a;
  };
  auto index = [&](int i0, int i1, int i2) { return (i0 * m + i1) * c + i2; };

  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(N, N);
  Eigen::VectorXd pi_vec(N);
  for (int s = 0; s < N; ++s) pi_vec(s) = std::exp(-coeff_energy(V, seq(s)));
  pi_vec /= pi_vec.sum();
  for (int s = 0; s < N; ++s) {
    const auto a = seq(s);
    const int i0 = s / (m * c), i1 = (s / c) % m, i2 = s % c;
    for (int site = 0; site < 3; ++site) {
      const int choices = site < 2 ? m : c;
      for (int t = 0; t < choices; ++t) {
        int j0 = i0, j1 = i1, j2 = i2;
        if (site == 0) j0 = t;
        if (site == 1) j1 = t;
        if (site == 2) j2 = t;
        const int u = index(j0, j1, j2);
        if (u == s) continue;
        const cd z = site == 0 ? disk[t] : site == 1 ? disk[t] : circle[t];
        const double dh = coeff_delta_energy(V, a, site, z);
        const double acc = std::min(1.0, std::exp(-dh));
        P(s, u) += acc / (3.0 * (choices - 1));
      }
    }
    P(s, s) = 1 - P.row(s).sum();
  }
  Eigen::VectorXd moved = P.transpose() * pi_vec;
  const double residual = ((moved - pi_vec).cwiseAbs().array() / pi_vec.array()).maxCoeff();
  CHECK(residual < 1e-9);
}

TEST_CASE("V = 0 coefficient chain reproduces the CUE marginals") {
  const int n = 16;
  SplitMix64 rng(5);
  CoeffChainOptions opt;
  opt.thin = 2;
  opt.keep_samples = true;
  auto res = mh_coeff_chain(LaurentPotential::zero(), n, 20000, 0.5, rng, opt);
  REQUIRE(res.samples.size() >= 10000);
  CHECK(res.state.max_drift < 1e-9);
  for (int k = 0; k + 1 < n; ++k) {
    std::vector<double> x;
    for (const auto& a : res.samples) x.push_back(std::norm(a.coeffs(k)));
    CAPTURE(k);
    CHECK(ks_statistic(x, beta1_cdf(n - k - 1)) < 0.05);
  }
  std::vector<double> last;
  for (const auto& a : res.samples) {
    CHECK(std::abs(std::abs(a.coeffs(n - 1)) - 1) < 1e-12);
    last.push_back(phase01(a.coeffs(n - 1)));
  }
  CHECK(ks_statistic(last, uniform_cdf) < 0.05);
}

TEST_CASE("coefficient chain bookkeeping and determinism") {
  const auto V = LaurentPotential::of(Family::F20, 0.8);
  CoeffChainOptions opt;
  opt.warmup_sweeps = 100;
  opt.drift_interval = 500;
  SplitMix64 r1(6), r2(6);
  auto a = mh_coeff_chain(V, 24, 2000, 0.3, r1, opt);
  auto b = mh_coeff_chain(V, 24, 2000, 0.3, r2, opt);
  CHECK(a.state.seed == 6);
  CHECK(a.state.max_drift < 1e-9);
  CHECK(std::abs(a.state.energy - coeff_energy(V, a.state.alpha)) < 1e-9);
  CHECK(a.state.acceptance() > 0.2);
  CHECK(a.state.acceptance() < 0.7);
  for (int k = 0; k < 24; ++k) CHECK(a.state.alpha.coeffs(k) == b.state.alpha.coeffs(k));
  CHECK(a.state.accepted == b.state.accepted);
  for (int k = 0; k + 1 < 24; ++k) CHECK(std::abs(a.state.alpha.coeffs(k)) < 1);
}

TEST_CASE("eigenvalue chain shows level repulsion") {
  const int n = 16;
  SplitMix64 rng(7);
  EigenChainOptions opt;
  opt.keep_samples = true;
  opt.thin = 5;
  auto res = mh_eigen_chain(LaurentPotential::zero(), n, 5000, rng, opt);
  REQUIRE(!res.samples.empty());
  long small = 0, total = 0;
  for (auto th : res.samples) {
    std::sort(th.begin(), th.end());
    for (int i = 0; i < n; ++i) {
      const double gap = i + 1 < n ? th[i + 1] - th[i] : th[0] + 2 * pi - th[n - 1];
      small += gap * n / (2 * pi) < 0.1;
      ++total;
    }
  }
  const double frac = double(small) / total;
  // Independent uniform angles put about 1 - exp(-0.1) = 0.095 there.
  CHECK(frac < 0.03);
}

TEST_CASE("eigenvalue chain determinism and gapped support") {
  const auto V = LaurentPotential::of(Family::F10, 2);
  SplitMix64 r1(8), r2(8);
  auto a = mh_eigen_chain(V, 32, 400, r1);
  auto b = mh_eigen_chain(V, 32, 400, r2);
  CHECK(a.theta == b.theta);
  const double tg = pi / 2;
  int inside = 0;
  for (double t : a.theta) inside += std::abs(canonical(t) - pi) <= pi - tg + 0.3;
  CHECK(inside >= 30);
}

TEST_CASE("KS helpers") {
  std::vector<double> grid;
  for (int i = 0; i < 1000; ++i) grid.push_back((i + 0.5) / 1000);
  CHECK(ks_statistic(grid, uniform_cdf) == doctest::Approx(0.0005));
  CHECK(ks_pvalue(0, 100) == doctest::Approx(1.0));
  CHECK(ks_pvalue(0.05, 1000) < ks_pvalue(0.03, 1000));
  CHECK(ks_pvalue(0.2, 1000) < 1e-10);
}
