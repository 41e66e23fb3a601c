#pragma once

// Gauss-Hermite quadrature rules.
//
// Weights are premultiplied by e^{x_i^2}, so a rule approximates the
// plain integral of g over the real line:
//
//     integral g(x) dx  ~=  sum_i weights[i] * g(nodes[i])
//
// accurate whenever g is close to a Gaussian times a low-order
// polynomial. Rules are computed on first use and cached per order;
// lookup is thread-safe and returned references stay valid.

#include <vector>

namespace oas {

struct HermiteRule {
    std::vector<double> nodes;    // ascending, symmetric about 0
    std::vector<double> weights;  // w_i * e^{x_i^2}, all positive
};

const HermiteRule& hermite_rule(int order);

} // namespace oas
