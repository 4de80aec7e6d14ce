#pragma once

#include <functional>
#include <vector>

namespace aerochan::quad {

/// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Computes the rule by Newton iteration on P_n. Rules are cached per order,
/// so repeated calls are cheap and thread-safe.
const GaussRule& gauss_legendre(int n);

/// Integral of f over [a, b] with the n-point Gauss-Legendre rule.
double gauss_legendre_integrate(const std::function<double(double)>& f,
                                double a, double b, int n);

/// Adaptive Simpson quadrature with a relative tolerance on the whole
/// integral. Throws NumericError if `max_depth` is exhausted without
/// meeting the tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double rel_tol = 1e-10, int max_depth = 48);

}  // namespace aerochan::quad
