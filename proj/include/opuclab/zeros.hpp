#pragma once

// Aberth-Ehrlich simultaneous root finding, the zero-counting measure, and
// grid checks for the classical circle inequalities.

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

#include "opuclab/poly.hpp"
#include "opuclab/specfun.hpp"
#include "opuclab/summation.hpp"

namespace opuclab {

struct RootFindingError : std::runtime_error {
    double residual;
    explicit RootFindingError(double res)
        : std::runtime_error("roots: no convergence after 500 iterations (residual " +
                             std::to_string(res) + ")"),
          residual(res) {}
};

struct ZeroSet {
    std::vector<Complex> roots;
    double residual = 0.0;  // max |P(zeta_j)| / |leading coefficient|
};

namespace detail {

// P and P' at z in one Horner pass.
inline std::pair<Complex, Complex> eval_with_derivative(const std::vector<Complex>& c,
                                                        Complex z) {
    Complex p = c.back(), dp = 0.0;
    for (size_t j = c.size() - 1; j-- > 0;) {
        dp = dp * z + p;
        p = p * z + c[j];
    }
    return {p, dp};
}

}  // namespace detail

/// Simultaneous (Aberth-Ehrlich) iteration. Exact monomial factors z^m are
/// deflated first; iteration stalls on high-multiplicity zeros otherwise.
/// Initial guesses sit on a circle of radius (|c_0/c_n|)^{1/n}, deterministically
/// perturbed. Converged when the largest correction drops below 1e-13 or every
/// residual reaches the evaluation noise floor.
inline ZeroSet roots(const Poly& p) {
    std::vector<Complex> c = p.c;
    while (c.size() > 1 && std::abs(c.back()) == 0.0) c.pop_back();
    const int deg = static_cast<int>(c.size()) - 1;
    if (deg < 1 || std::abs(c.back()) == 0.0)
        throw std::invalid_argument("roots: need degree >= 1 with nonzero leading coefficient");

    ZeroSet out;
    int m = 0;  // multiplicity of the exact zero at the origin
    while (m < deg && std::abs(c[static_cast<size_t>(m)]) == 0.0) ++m;
    for (int i = 0; i < m; ++i) out.roots.emplace_back(0.0, 0.0);
    std::vector<Complex> d(c.begin() + m, c.end());
    const int n = static_cast<int>(d.size()) - 1;

    if (n > 0) {
        const double r = std::pow(std::abs(d[0] / d.back()), 1.0 / n);
        std::vector<Complex> zs(static_cast<size_t>(n));
        for (int j = 0; j < n; ++j) {
            const double ang = 2.0 * detail::kPi * j / n + 0.4;
            zs[static_cast<size_t>(j)] =
                std::polar(r * (1.0 + 1e-3 * std::cos(3.0 * j + 1.0)), ang);
        }
        double coeff_scale = 0.0;
        for (const auto& cj : d) coeff_scale = std::max(coeff_scale, std::abs(cj));

        bool done = false;
        for (int iter = 0; iter < 500 && !done; ++iter) {
            double max_corr = 0.0;
            bool all_floor = true;
            for (int j = 0; j < n; ++j) {
                auto [pv, dpv] = detail::eval_with_derivative(d, zs[static_cast<size_t>(j)]);
                const double zabs = std::abs(zs[static_cast<size_t>(j)]);
                // backward-error floor of Horner evaluation
                const double floor_j =
                    16.0 * 2.22e-16 * coeff_scale * n * std::pow(std::max(1.0, zabs), n);
                if (std::abs(pv) <= floor_j) continue;
                all_floor = false;
                if (dpv == Complex(0.0)) {
                    zs[static_cast<size_t>(j)] += Complex(1e-8, 1e-8);
                    max_corr = 1.0;
                    continue;
                }
                const Complex newton = pv / dpv;
                KahanComplexSum rep;
                for (int k = 0; k < n; ++k)
                    if (k != j)
                        rep.add(1.0 / (zs[static_cast<size_t>(j)] - zs[static_cast<size_t>(k)]));
                const Complex denom = 1.0 - newton * rep.value();
                const Complex corr =
                    (denom == Complex(0.0)) ? newton : newton / denom;
                zs[static_cast<size_t>(j)] -= corr;
                max_corr = std::max(max_corr, std::abs(corr));
            }
            done = all_floor || max_corr < 1e-13;
            if (iter == 499 && !done) {
                double resid = 0.0;
                for (const auto& z : zs) resid = std::max(resid, std::abs(p.eval(z)));
                throw RootFindingError(resid / std::abs(c.back()));
            }
        }
        out.roots.insert(out.roots.end(), zs.begin(), zs.end());
    }

    double resid = 0.0;
    for (const auto& z : out.roots) resid = std::max(resid, std::abs(p.eval(z)));
    out.residual = resid / std::abs(c.back());
    return out;
}

/// j-th moment of the zero-counting measure, (1/n) sum zeta_k^j.
inline Complex zero_measure_moment(const ZeroSet& zs, int j) {
    if (j < 0) throw std::invalid_argument("zero_measure_moment: need j >= 0");
    if (zs.roots.empty()) throw std::invalid_argument("zero_measure_moment: empty zero set");
    KahanComplexSum acc;
    for (const auto& z : zs.roots) acc.add(std::pow(z, j));
    return acc.value() / static_cast<double>(zs.roots.size());
}

struct BernsteinResult {
    double lhsMax = 0.0;  // grid sup of |P'|/n
    double rhsMax = 0.0;  // grid sup of |P|
};

inline BernsteinResult bernstein_check(const Poly& p, int M) {
    const int n = p.degree();
    if (M < 8 * std::max(n, 1)) throw std::invalid_argument("bernstein_check: need M >= 8 deg");
    const Poly dp = poly_derivative(p);
    BernsteinResult r;
    for (int i = 0; i < M; ++i) {
        const Complex z = std::polar(1.0, 2.0 * detail::kPi * (i + 0.5) / M);
        r.lhsMax = std::max(r.lhsMax, std::abs(dp.eval(z)) / std::max(n, 1));
        r.rhsMax = std::max(r.rhsMax, std::abs(p.eval(z)));
    }
    return r;
}

/// min over the grid of |P'| / ((n/2)|P|); requires all zeros in the closed disk.
inline double turan_check(const Poly& p, int M) {
    const int n = p.degree();
    if (M < 8 * std::max(n, 1)) throw std::invalid_argument("turan_check: need M >= 8 deg");
    const ZeroSet zs = roots(p);
    for (const auto& z : zs.roots)
        if (std::abs(z) > 1.0 + 1e-9)
            throw std::domain_error("turan_check: zero outside the closed unit disk");
    const Poly dp = poly_derivative(p);
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i < M; ++i) {
        const Complex z = std::polar(1.0, 2.0 * detail::kPi * (i + 0.5) / M);
        const double denom = 0.5 * n * std::abs(p.eval(z));
        if (denom == 0.0) continue;
        worst = std::min(worst, std::abs(dp.eval(z)) / denom);
    }
    return worst;
}

}  // namespace opuclab
