#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace tranche {

/// Nodes and weights for integration against the m-dimensional standard
/// Gaussian density. Nodes are stored node-major; weights sum to one.
struct QuadratureRule {
    std::size_t dim = 1;
    int order_1d = 0; // per-dimension order the rule was built from
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const { return weights.size(); }

    std::span<const double> node(std::size_t j) const {
        return {nodes.data() + j * dim, dim};
    }
};

namespace detail {

/// Eigenvalues of a symmetric tridiagonal matrix by the implicit-shift QL
/// algorithm. d holds the diagonal on entry and the eigenvalues (unsorted)
/// on exit; e holds the subdiagonal in e[0..n-2] and is destroyed.
inline void tridiagonal_eigenvalues(std::vector<double>& d, std::vector<double>& e) {
    const int n = static_cast<int>(d.size());
    e.resize(static_cast<std::size_t>(n), 0.0);
    constexpr double eps = 2.22e-16;
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= eps * dd + 1e-300)
                    break;
            }
            if (m != l) {
                if (iter++ == 50)
                    throw std::runtime_error("tridiagonal_eigenvalues: no convergence");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0;
                double c = 1.0;
                double p = 0.0;
                int i;
                for (i = m - 1; i >= l; --i) {
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
                if (r == 0.0 && i >= l)
                    continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

} // namespace detail

/// Gauss-Hermite rule of the given order for the standard normal weight:
/// exact for polynomials up to degree 2*order-1, nodes symmetric about 0.
///
/// Golub-Welsch construction: the nodes are the eigenvalues of the Jacobi
/// matrix of the (monic, probabilists') Hermite recurrence, the weights come
/// from the Christoffel function 1 / sum_k p_k(x)^2 over the orthonormal
/// polynomials. Symmetry is enforced exactly by pairwise averaging.
inline QuadratureRule gauss_hermite_rule(int order) {
    if (order < 2 || order > 256)
        throw std::invalid_argument("gauss_hermite_rule: order out of range [2,256]");

    const std::size_t q = static_cast<std::size_t>(order);
    std::vector<double> nodes(q, 0.0);
    std::vector<double> off(q - 1);
    for (std::size_t k = 1; k < q; ++k)
        off[k - 1] = std::sqrt(static_cast<double>(k));
    detail::tridiagonal_eigenvalues(nodes, off);
    std::sort(nodes.begin(), nodes.end());

    // exact symmetry about the origin
    for (std::size_t j = 0; j < q / 2; ++j) {
        const double x = 0.5 * (nodes[q - 1 - j] - nodes[j]);
        nodes[q - 1 - j] = x;
        nodes[j] = -x;
    }
    if (q % 2 == 1)
        nodes[q / 2] = 0.0;

    QuadratureRule rule;
    rule.dim = 1;
    rule.order_1d = order;
    rule.nodes = nodes;
    rule.weights.resize(q);
    for (std::size_t j = 0; j < q; ++j) {
        // orthonormal recurrence p_{k+1} = (x p_k - sqrt(k) p_{k-1})/sqrt(k+1)
        const double x = nodes[j];
        double prev = 0.0;
        double cur = 1.0;
        double sum = 1.0;
        for (std::size_t k = 0; k + 1 < q; ++k) {
            const double next =
                (x * cur - std::sqrt(static_cast<double>(k)) * prev) /
                std::sqrt(static_cast<double>(k + 1));
            prev = cur;
            cur = next;
            sum += cur * cur;
        }
        rule.weights[j] = 1.0 / sum;
    }
    for (std::size_t j = 0; j < q / 2; ++j) {
        const double w = 0.5 * (rule.weights[j] + rule.weights[q - 1 - j]);
        rule.weights[j] = w;
        rule.weights[q - 1 - j] = w;
    }
    return rule;
}

/// Full tensor product of a 1-d rule over m factor dimensions.
inline QuadratureRule tensor_rule(const QuadratureRule& rule_1d, std::size_t m) {
    if (rule_1d.dim != 1)
        throw std::invalid_argument("tensor_rule: input rule must be one-dimensional");
    if (m < 1 || m > 4)
        throw std::invalid_argument("tensor_rule: dimension out of range [1,4]");
    if (m == 1)
        return rule_1d;

    const std::size_t q = rule_1d.size();
    std::size_t count = 1;
    for (std::size_t k = 0; k < m; ++k)
        count *= q;

    QuadratureRule rule;
    rule.dim = m;
    rule.order_1d = rule_1d.order_1d;
    rule.nodes.resize(count * m);
    rule.weights.resize(count);
    for (std::size_t j = 0; j < count; ++j) {
        std::size_t rem = j;
        double weight = 1.0;
        for (std::size_t k = 0; k < m; ++k) {
            const std::size_t idx = rem % q;
            rem /= q;
            rule.nodes[j * m + k] = rule_1d.nodes[idx];
            weight *= rule_1d.weights[idx];
        }
        rule.weights[j] = weight;
    }
    return rule;
}

/// Weighted sum of f over the rule's nodes, accumulated in fixed node order.
/// f may take either a span over the factor point or, for 1-d rules, a double.
template <class F>
double integrate_gaussian(F&& f, const QuadratureRule& rule) {
    constexpr bool takes_span = std::is_invocable_v<F&, std::span<const double>>;
    static_assert(takes_span || std::is_invocable_v<F&, double>,
                  "integrand must accept a span or a double");
    if constexpr (!takes_span) {
        if (rule.dim != 1)
            throw std::invalid_argument(
                "integrate_gaussian: scalar integrand with multi-dimensional rule");
    }
    double acc = 0.0;
    for (std::size_t j = 0; j < rule.size(); ++j) {
        double value;
        try {
            if constexpr (takes_span)
                value = f(rule.node(j));
            else
                value = f(rule.node(j)[0]);
        } catch (const std::exception& e) {
            throw std::runtime_error("integrate_gaussian: integrand failed at node " +
                                     std::to_string(j) + ": " + e.what());
        }
        acc += rule.weights[j] * value;
    }
    return acc;
}

} // namespace tranche
