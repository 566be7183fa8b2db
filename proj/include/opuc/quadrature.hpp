#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace opuc {

struct QuadratureConfig {
  int nodes = 512;               // power of two, >= 64
  bool edge_substitution = true;  // t = c - h cos(u) on arcs
  bool log_split = true;          // tanh-sinh on pieces split at singular points
  bool refine = true;             // coefficient extraction and mass double nodes to convergence

  void validate() const;
};

struct Rule {
  std::vector<double> x;
  std::vector<double> w;
};

// Gauss-Legendre rule on [-1, 1].
const Rule& gauss_legendre(int n);

// Discrete rule for int_a^b f(t) dt. Full-circle intervals get the periodic
// trapezoid, proper arcs Gauss-Legendre (cosine edge substitution if enabled).
Rule arc_rule(double a, double b, const QuadratureConfig& q);

double tanh_sinh(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-12);

// int_a^b f, splitting at the given interior points.
double integrate(const std::function<double(double)>& f, double a, double b,
                 std::vector<double> breaks, const QuadratureConfig& q);

double integrate_periodic(const std::function<double(double)>& f, int nodes);

// Trapezoid over [a, a + 2 pi), doubling from the given node count until two
// successive estimates agree.
double integrate_periodic_adaptive(const std::function<double(double)>& f,
                                   double a, int nodes, double rel_tol = 1e-14);

}  // namespace opuc
