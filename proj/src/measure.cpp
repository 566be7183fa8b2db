#include "opuc/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "opuc/error.hpp"

namespace opuc {

namespace {
constexpr double kTwoPi = 2 * std::numbers::pi;
}

double canonical(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0) t += kTwoPi;
  if (t >= kTwoPi) t -= kTwoPi;
  return t;
}

double angular_distance(double a, double b) {
  const double d = canonical(a - b);
  return std::min(d, kTwoPi - d);
}

bool Arc::full_circle() const { return std::abs(length() - kTwoPi) < 1e-12; }

bool Arc::contains(double theta, double tol) const {
  if (full_circle()) return true;
  const double t = canonical(theta - a);
  return t <= length() + tol || t >= kTwoPi - tol;
}

bool Arc::interior_contains(double theta, double tol) const {
  if (full_circle()) return true;
  const double t = canonical(theta - a);
  return t > tol && t < length() - tol;
}

CircleMeasure CircleMeasure::discrete(std::vector<Atom> atoms) {
  CircleMeasure m;
  m.kind_ = Kind::Discrete;
  for (auto& at : atoms) at.theta = canonical(at.theta);
  m.atoms_ = std::move(atoms);
  return m;
}

CircleMeasure CircleMeasure::absolutely_continuous(AcPart ac) {
  CircleMeasure m;
  m.kind_ = Kind::AbsolutelyContinuous;
  m.ac_ = std::move(ac);
  m.ac_mass_ = 1;
  return m;
}

CircleMeasure CircleMeasure::mixed(AcPart ac, double ac_mass,
                                   std::vector<Atom> atoms) {
  if (!(ac_mass > 0 && ac_mass < 1))
    throw Error(ErrorKind::Domain, "mixed measure needs ac mass in (0,1)");
  CircleMeasure m;
  m.kind_ = Kind::Mixed;
  m.ac_ = std::move(ac);
  m.ac_mass_ = ac_mass;
  for (auto& at : atoms) at.theta = canonical(at.theta);
  m.atoms_ = std::move(atoms);
  return m;
}

bool CircleMeasure::on_ac_support(double theta, double tol) const {
  if (!ac_) return false;
  for (const auto& arc : ac_->arcs)
    if (arc.contains(theta, tol)) return true;
  return false;
}

double CircleMeasure::density(double theta) const {
  if (!ac_) return 0;
  for (const auto& arc : ac_->arcs) {
    if (!arc.contains(theta)) continue;
    // Evaluate in the arc's own parametrization.
    double t = arc.a + canonical(theta - arc.a);
    if (t > arc.b) t -= kTwoPi;
    return ac_->density(t);
  }
  return 0;
}

double CircleMeasure::integrate(const std::function<double(double)>& f,
                                const QuadratureConfig& q) const {
  double s = 0;
  for (const auto& at : atoms_) s += at.w * f(at.theta);
  if (ac_) {
    for (const auto& arc : ac_->arcs) {
      const Rule r = arc_rule(arc.a, arc.b, q);
      for (std::size_t i = 0; i < r.x.size(); ++i)
        s += r.w[i] * ac_->density(r.x[i]) * f(r.x[i]);
    }
  }
  return s;
}

double CircleMeasure::total_mass(const QuadratureConfig& q) const {
  if (!ac_ || !q.refine) return integrate([](double) { return 1.0; }, q);
  double s = 0;
  for (const auto& at : atoms_) s += at.w;
  for (const auto& arc : ac_->arcs) {
    if (arc.full_circle()) {
      s += integrate_periodic_adaptive(ac_->density, arc.a, q.nodes);
    } else {
      const Rule r = arc_rule(arc.a, arc.b, q);
      for (std::size_t i = 0; i < r.x.size(); ++i)
        s += r.w[i] * ac_->density(r.x[i]);
    }
  }
  return s;
}

void CircleMeasure::validate(const QuadratureConfig& q, double tol) const {
  for (const auto& at : atoms_)
    if (!(at.w > 0)) throw Error(ErrorKind::Domain, "atom weights must be positive");
  if (ac_) {
    for (const auto& arc : ac_->arcs)
      if (!(arc.b > arc.a) || arc.length() > kTwoPi + 1e-12)
        throw Error(ErrorKind::Domain, "malformed arc");
    if (kind_ == Kind::Mixed)
      for (const auto& at : atoms_)
        for (const auto& arc : ac_->arcs)
          if (arc.interior_contains(at.theta))
            throw Error(ErrorKind::Domain, "mixed atom inside an arc interior");
    for (const auto& arc : ac_->arcs) {
      const Rule probe = arc_rule(arc.a, arc.b, q);
      for (double t : probe.x)
        if (ac_->density(t) < -1e-12)
          throw Error(ErrorKind::Domain, "negative density");
    }
  }
  const double m = total_mass(q);
  if (std::abs(m - 1) > tol)
    throw Error(ErrorKind::Domain,
                "total mass " + std::to_string(m) + " differs from 1");
}

CircleMeasure uniform_measure() {
  AcPart ac;
  ac.density = [](double) { return 1 / kTwoPi; };
  ac.arcs = {{0, kTwoPi}};
  ac.family = "unif";
  ac.params = nlohmann::json::object();
  return CircleMeasure::absolutely_continuous(std::move(ac));
}

}  // namespace opuc
