#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "quadrature.hpp"

namespace opuc {

struct Arc {
  double a = 0;  // radians, a < b; b - a <= 2 pi; may start below 0
  double b = 0;
  double length() const { return b - a; }
  bool full_circle() const;
  bool contains(double theta, double tol = 0) const;  // closed arc, mod 2 pi
  bool interior_contains(double theta, double tol = 0) const;
};

struct Atom {
  double theta = 0;
  double w = 0;
};

// Absolutely continuous part: density(theta) is the density of this part
// (its integral is the ac mass), zero off the arcs.
struct AcPart {
  std::function<double(double)> density;
  std::vector<Arc> arcs;
  std::vector<double> zeros;  // interior zeros, used as quadrature breaks
  std::string family;
  nlohmann::json params;
};

class CircleMeasure {
 public:
  enum class Kind { Discrete, AbsolutelyContinuous, Mixed };

  static CircleMeasure discrete(std::vector<Atom> atoms);
  static CircleMeasure absolutely_continuous(AcPart ac);
  static CircleMeasure mixed(AcPart ac, double ac_mass, std::vector<Atom> atoms);

  Kind kind() const { return kind_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const AcPart& ac() const { return *ac_; }
  bool has_ac() const { return ac_.has_value(); }
  double ac_mass() const { return ac_mass_; }

  // Density of the ac part at theta (0 off arcs or without ac part).
  double density(double theta) const;
  bool on_ac_support(double theta, double tol = 0) const;

  // Quadrature of the ac part plus atom weights.
  double total_mass(const QuadratureConfig& q = {}) const;
  double integrate(const std::function<double(double)>& f,
                   const QuadratureConfig& q = {}) const;

  void validate(const QuadratureConfig& q = {}, double tol = 1e-12) const;

 private:
  Kind kind_ = Kind::Discrete;
  std::vector<Atom> atoms_;
  std::optional<AcPart> ac_;
  double ac_mass_ = 0;
};

inline constexpr double kAtomTol = 1e-10;

double canonical(double theta);
double angular_distance(double a, double b);

CircleMeasure uniform_measure();

}  // namespace opuc
