#include "oas/gauss_hermite.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>

#include "oas/errors.hpp"

namespace oas {

namespace {

// Eigenvalues of a symmetric tridiagonal matrix by the implicit QL
// method with Wilkinson shifts. d is the diagonal, e the subdiagonal
// (e[i] couples rows i and i+1). Eigenvectors are never formed; node
// accuracy is recovered afterwards by Newton polishing.
std::vector<double> tridiagonal_eigenvalues(std::vector<double> d, std::vector<double> e) {
    const int n = static_cast<int>(d.size());
    e.resize(static_cast<std::size_t>(n), 0.0);
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        while (true) {
            int m = l;
            while (m < n - 1) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
                ++m;
            }
            if (m == l) break;
            if (iter++ == 64) {
                throw NumericalError("quadrature eigenvalue iteration stalled at row " +
                                     std::to_string(l));
            }
            double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            double r = std::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
            double s = 1.0;
            double c = 1.0;
            double p = 0.0;
            int i = m - 1;
            for (; i >= l; --i) {
                double f = s * e[i];
                const double b = c * e[i];
                r = std::hypot(f, g);
                e[i + 1] = r;
                if (r == 0.0) {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if (r == 0.0 && i >= l) continue;
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    std::sort(d.begin(), d.end());
    return d;
}

// Normalized Hermite functions psi_j(z) = H_j(z) e^{-z^2/2} / sqrt(2^j j! sqrt(pi)).
// They stay O(1) over the node range, so the recurrence neither overflows
// nor underflows even at order 2048, where e^{-z^2/2} alone would be far
// below the double range. Returns psi_n and psi_{n-1}.
struct PsiPair {
    long double value;
    long double prev;
};

PsiPair hermite_function(int n, long double z) {
    constexpr long double kPi = 3.141592653589793238462643383279502884L;
    const long double psi0 = std::exp(-0.25L * std::log(kPi) - z * z / 2.0L);
    if (n == 0) return {psi0, 0.0L};
    long double prev = psi0;
    long double cur = z * std::sqrt(2.0L) * psi0;
    for (int j = 2; j <= n; ++j) {
        const long double next =
            z * std::sqrt(2.0L / j) * cur - std::sqrt((j - 1.0L) / j) * prev;
        prev = cur;
        cur = next;
    }
    return {cur, prev};
}

HermiteRule build_rule(int order) {
    // Jacobi matrix of the Hermite weight: zero diagonal, subdiagonal sqrt(j/2).
    std::vector<double> diag(static_cast<std::size_t>(order), 0.0);
    std::vector<double> sub(static_cast<std::size_t>(order), 0.0);
    for (int j = 1; j < order; ++j) sub[j - 1] = std::sqrt(j / 2.0);
    std::vector<double> nodes = tridiagonal_eigenvalues(std::move(diag), std::move(sub));

    HermiteRule rule;
    rule.nodes.resize(nodes.size());
    rule.weights.resize(nodes.size());
    for (int i = 0; i < order; ++i) {
        // Two Newton steps on psi_order sharpen the eigenvalue to long
        // double accuracy; psi' follows from the ladder relation.
        long double z = nodes[static_cast<std::size_t>(i)];
        for (int step = 0; step < 2; ++step) {
            const PsiPair psi = hermite_function(order, z);
            const long double deriv =
                std::sqrt(2.0L * order) * psi.prev - z * psi.value;
            if (deriv == 0.0L) break;
            z -= psi.value / deriv;
        }
        const PsiPair psi = hermite_function(order, z);
        // w_i e^{x_i^2} = 1 / (order * psi_{order-1}(x_i)^2).
        const long double w = 1.0L / (order * psi.prev * psi.prev);
        rule.nodes[static_cast<std::size_t>(i)] = static_cast<double>(z);
        rule.weights[static_cast<std::size_t>(i)] = static_cast<double>(w);
    }

    // Enforce the exact +- symmetry of the rule; tiny asymmetries from
    // the eigenvalue pass would otherwise leak into parity properties of
    // everything integrated with it.
    for (int i = 0, j = order - 1; i < j; ++i, --j) {
        const double mag = 0.5 * (rule.nodes[static_cast<std::size_t>(j)] -
                                  rule.nodes[static_cast<std::size_t>(i)]);
        rule.nodes[static_cast<std::size_t>(i)] = -mag;
        rule.nodes[static_cast<std::size_t>(j)] = mag;
        const double w = 0.5 * (rule.weights[static_cast<std::size_t>(i)] +
                                rule.weights[static_cast<std::size_t>(j)]);
        rule.weights[static_cast<std::size_t>(i)] = w;
        rule.weights[static_cast<std::size_t>(j)] = w;
    }
    if (order % 2 == 1) rule.nodes[static_cast<std::size_t>(order / 2)] = 0.0;
    return rule;
}

} // namespace

const HermiteRule& hermite_rule(int order) {
    if (order < 1) {
        throw std::domain_error("quadrature order must be >= 1, got " + std::to_string(order));
    }
    static std::mutex mu;
    static std::map<int, std::unique_ptr<HermiteRule>> cache;
    const std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[order];
    if (!slot) slot = std::make_unique<HermiteRule>(build_rule(order));
    return *slot;
}

} // namespace oas
