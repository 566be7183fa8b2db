#include "opuc/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "opuc/error.hpp"

namespace opuc {

namespace {

// Nodes and weights of the measure under the quadrature rule.
void discretize(const CircleMeasure& mu, const QuadratureConfig& q,
                std::vector<double>& theta, std::vector<double>& w) {
  for (const auto& at : mu.atoms()) {
    theta.push_back(at.theta);
    w.push_back(at.w);
  }
  if (!mu.has_ac()) return;
  for (const auto& arc : mu.ac().arcs) {
    const Rule r = arc_rule(arc.a, arc.b, q);
    for (std::size_t i = 0; i < r.x.size(); ++i) {
      const double wi = r.w[i] * mu.ac().density(r.x[i]);
      if (wi > 0) {
        theta.push_back(r.x[i]);
        w.push_back(wi);
      }
    }
  }
}

}  // namespace

VerblunskySeq verblunsky_from_discrete(const CircleMeasure& mu) {
  if (mu.kind() != CircleMeasure::Kind::Discrete || mu.atoms().empty())
    throw Error(ErrorKind::Domain, "discrete measure with atoms required");
  std::vector<Atom> atoms = mu.atoms();
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& x, const Atom& y) { return x.theta < y.theta; });
  std::vector<double> theta, w;
  double total = 0;
  bool underflow = false;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (!(atoms[i].w > 0))
      throw Error(ErrorKind::Domain, "atom weights must be positive");
    if (i > 0 && angular_distance(atoms[i].theta, atoms[i - 1].theta) < kAtomTol)
      throw Error(ErrorKind::DegenerateMeasure, "duplicate atoms");
    if (atoms[i].w < kWeightUnderflow) underflow = true;
    theta.push_back(atoms[i].theta);
    w.push_back(atoms[i].w);
    total += atoms[i].w;
  }
  if (atoms.size() > 1 &&
      angular_distance(atoms.front().theta, atoms.back().theta) < kAtomTol)
    throw Error(ErrorKind::DegenerateMeasure, "duplicate atoms");
  if (std::abs(total - 1) > 1e-12)
    throw Error(ErrorKind::Domain, "atom weights must sum to one");
  const Eigen::Index n = static_cast<Eigen::Index>(theta.size());
  VerblunskySeq out = schur_from_nodes<double>(theta, w, n, true);
  if (underflow)
    out.warnings.push_back("conditioning: atom weight below 1e-14");
  return out;
}

VerblunskySeq verblunsky_from_density(const CircleMeasure& mu, int count,
                                      const QuadratureConfig& q) {
  if (!mu.has_ac())
    throw Error(ErrorKind::Domain, "measure without absolutely continuous part");
  if (count < 1) throw Error(ErrorKind::Domain, "count must be positive");
  q.validate();
  auto run = [&](const QuadratureConfig& qq) {
    std::vector<double> theta, w;
    discretize(mu, qq, theta, w);
    return schur_from_nodes<double>(theta, w, count, false);
  };
  VerblunskySeq cur = run(q);
  if (!q.refine) return cur;
  // Double the rule until two resolutions agree.
  bool periodic = true;
  for (const auto& arc : mu.ac().arcs) periodic = periodic && arc.full_circle();
  const int cap = periodic ? (1 << 15) : 4096;
  QuadratureConfig qq = q;
  while (qq.nodes < cap) {
    qq.nodes *= 2;
    VerblunskySeq next = run(qq);
    double diff = 0;
    for (Eigen::Index k = 0; k < count; ++k)
      diff = std::max(diff, std::abs(next.coeffs(k) - cur.coeffs(k)));
    cur = std::move(next);
    if (diff <= 1e-13) break;
  }
  return cur;
}

std::vector<std::complex<double>> trig_moments(const CircleMeasure& mu,
                                               int count,
                                               const QuadratureConfig& q) {
  std::vector<double> theta, w;
  discretize(mu, q, theta, w);
  std::vector<std::complex<double>> c(count + 1, 0.0);
  for (std::size_t i = 0; i < theta.size(); ++i)
    for (int k = 0; k <= count; ++k)
      c[k] += w[i] * std::polar(1.0, -k * theta[i]);
  return c;
}

CircleMeasure spectral_measure(const UnitaryMatrixRep<double>& M) {
  const auto sp = spectral_atoms<double>(M);
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < sp.theta.size(); ++i)
    atoms.push_back({sp.theta[i], sp.weight[i]});
  return CircleMeasure::discrete(std::move(atoms));
}

CircleMeasure bernstein_szego_measure(const VerblunskySeq& alpha) {
  for (Eigen::Index k = 0; k < alpha.size(); ++k)
    if (!(std::abs(alpha.coeffs(k)) < 1))
      throw Error(ErrorKind::Domain, "Bernstein-Szego needs |alpha_k| < 1");
  double prod = 1;
  for (Eigen::Index k = 0; k < alpha.size(); ++k)
    prod *= 1 - std::norm(alpha.coeffs(k));
  AcPart ac;
  ac.density = [alpha, prod](double t) {
    const auto p = eval_phi<double>(alpha, std::polar(1.0, t));
    return prod / (2 * std::numbers::pi * std::norm(p));
  };
  ac.arcs = {{0, 2 * std::numbers::pi}};
  ac.family = "bernstein_szego";
  nlohmann::json c = nlohmann::json::array();
  for (Eigen::Index k = 0; k < alpha.size(); ++k)
    c.push_back({alpha.coeffs(k).real(), alpha.coeffs(k).imag()});
  ac.params = {{"coeffs", c}};
  return CircleMeasure::absolutely_continuous(std::move(ac));
}

}  // namespace opuc
