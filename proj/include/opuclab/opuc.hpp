#pragma once

// Szego recursion, reversed and second-kind polynomials, moment-to-Verblunsky
// inversion, and Christoffel-Darboux kernels.
//
// Conventions (fixed throughout): Phi_{n+1} = z Phi_n - conj(alpha_n) Phi_n^*,
// equivalently Phi^*_{n+1} = Phi^*_n - z alpha_n Phi_n, and
// alpha_n = -conj(Phi_{n+1}(0)).

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "opuclab/measure.hpp"
#include "opuclab/poly.hpp"
#include "opuclab/summation.hpp"

namespace opuclab {

struct PositivityError : std::runtime_error {
    int degree;
    explicit PositivityError(int deg)
        : std::runtime_error("levinson: positive-definiteness failure at degree " +
                             std::to_string(deg)),
          degree(deg) {}
};

struct VerblunskySeq {
    std::vector<Complex> alpha;

    VerblunskySeq() = default;
    explicit VerblunskySeq(std::vector<Complex> a) : alpha(std::move(a)) {
        for (const auto& aj : alpha)
            if (!(std::abs(aj) < 1.0))
                throw std::invalid_argument("VerblunskySeq: need |alpha_j| < 1");
    }
    int size() const { return static_cast<int>(alpha.size()); }

    VerblunskySeq negated() const {
        VerblunskySeq r;
        r.alpha.reserve(alpha.size());
        for (const auto& a : alpha) r.alpha.push_back(-a);
        return r;
    }
};

/// The forward-recursion output: Phi_0..Phi_N, their reversals, and the monic
/// norms |Phi_n| = prod_{j<n} rho_j. Immutable after construction.
struct OpucBasis {
    VerblunskySeq alpha;
    std::vector<Poly> monic;       // Phi_n, degree n, leading coefficient 1
    std::vector<Poly> monic_star;  // Phi_n^*, constant term 1
    std::vector<double> monic_norms;

    int max_degree() const { return static_cast<int>(monic.size()) - 1; }

    Poly normalized(int n) const {
        return (1.0 / monic_norms[static_cast<size_t>(n)]) * Complex(1.0) *
               monic[static_cast<size_t>(n)];
    }
    Poly normalized_star(int n) const {
        return (1.0 / monic_norms[static_cast<size_t>(n)]) * Complex(1.0) *
               monic_star[static_cast<size_t>(n)];
    }
    Complex normalized_at(int n, Complex z) const {
        return monic[static_cast<size_t>(n)].eval(z) / monic_norms[static_cast<size_t>(n)];
    }
    Complex normalized_star_at(int n, Complex z) const {
        return monic_star[static_cast<size_t>(n)].eval(z) /
               monic_norms[static_cast<size_t>(n)];
    }
};

/// Runs the recursion in the Phi^*-form and recovers Phi by reversal; the
/// Phi^*(0) = 1 normalization gives a per-step sanity check for free.
inline OpucBasis szego_forward(const VerblunskySeq& a) {
    const int N = a.size();
    OpucBasis b;
    b.alpha = a;
    b.monic.reserve(static_cast<size_t>(N) + 1);
    b.monic_star.reserve(static_cast<size_t>(N) + 1);
    b.monic_norms.reserve(static_cast<size_t>(N) + 1);
    Poly star(std::vector<Complex>{1.0});
    b.monic.push_back(star);
    b.monic_star.push_back(star);
    b.monic_norms.push_back(1.0);
    double norm = 1.0;
    for (int n = 0; n < N; ++n) {
        const Complex an = a.alpha[static_cast<size_t>(n)];
        const Poly phi = reverse_poly(star, n);
        Poly next_star = star - an * shift_up(phi);
        next_star.c.resize(static_cast<size_t>(n) + 2, Complex(0.0));
        star = std::move(next_star);
        norm *= std::sqrt(1.0 - std::norm(an));
        b.monic_star.push_back(star);
        b.monic.push_back(reverse_poly(star, n + 1));
        b.monic_norms.push_back(norm);
    }
    return b;
}

/// Second-kind polynomials: first-kind basis of the sign-flipped sequence.
inline OpucBasis second_kind(const VerblunskySeq& a) { return szego_forward(a.negated()); }

/// Moment-to-Verblunsky inversion as Szego recursion in coefficient space;
/// alpha_n is read from the orthogonality defect <1, z Phi_n> / |Phi_n|^2.
/// Near-unit |alpha| is a loud failure, not a silent clamp.
inline VerblunskySeq levinson(const MomentTable& mt, int N) {
    if (N > mt.K) throw std::invalid_argument("levinson: N exceeds moment table");
    VerblunskySeq out;
    out.alpha.reserve(static_cast<size_t>(N));
    std::vector<Complex> phi{1.0}, star{1.0};
    double norm2 = 1.0;
    for (int n = 0; n < N; ++n) {
        KahanComplexSum defect;
        for (int j = 0; j <= n; ++j)
            defect.add(phi[static_cast<size_t>(j)] * mt(j + 1));
        const Complex an = std::conj(defect.value()) / norm2;
        if (!(std::abs(an) < 1.0 - 1e-10)) throw PositivityError(n);
        out.alpha.push_back(an);
        std::vector<Complex> next(static_cast<size_t>(n) + 2, Complex(0.0));
        for (int j = 0; j <= n; ++j) {
            next[static_cast<size_t>(j) + 1] += phi[static_cast<size_t>(j)];
            next[static_cast<size_t>(j)] -= std::conj(an) * star[static_cast<size_t>(j)];
        }
        std::vector<Complex> next_star(static_cast<size_t>(n) + 2, Complex(0.0));
        for (int j = 0; j <= n; ++j) {
            next_star[static_cast<size_t>(j)] += star[static_cast<size_t>(j)];
            next_star[static_cast<size_t>(j) + 1] -= an * phi[static_cast<size_t>(j)];
        }
        phi = std::move(next);
        star = std::move(next_star);
        norm2 *= 1.0 - std::norm(an);
    }
    return out;
}

/// Basis for a measure spec: direct recursion when the coefficients are given,
/// Levinson on the exact moment table otherwise.
inline OpucBasis basis_for(const MeasureSpec& m, int N) {
    if (m.family == MeasureSpec::Family::VerblunskyGiven && m.atoms.empty()) {
        std::vector<Complex> a = m.alpha;
        a.resize(static_cast<size_t>(N), Complex(0.0));
        return szego_forward(VerblunskySeq(std::move(a)));
    }
    return szego_forward(levinson(moment_table(m, N), N));
}

/// K_{n-1}(z, w) = sum_{j<n} phi_j(z) conj(phi_j(w)).
inline Complex cd_kernel(const OpucBasis& b, Complex z, Complex w, int n) {
    if (n < 0 || n > b.max_degree())
        throw std::out_of_range("cd_kernel: index out of range");
    KahanComplexSum acc;
    for (int j = 0; j < n; ++j)
        acc.add(b.normalized_at(j, z) * std::conj(b.normalized_at(j, w)));
    return acc.value();
}

/// K_{n-1}(., w) as a polynomial in the first argument.
inline Poly cd_kernel_poly(const OpucBasis& b, Complex w, int n) {
    std::vector<Complex> coef(static_cast<size_t>(std::max(n, 1)), Complex(0.0));
    for (int j = 0; j < n; ++j) {
        const Complex cj = std::conj(b.normalized_at(j, w)) /
                           b.monic_norms[static_cast<size_t>(j)];
        for (int i = 0; i <= j; ++i)
            coef[static_cast<size_t>(i)] += cj * b.monic[static_cast<size_t>(j)].c[static_cast<size_t>(i)];
    }
    return Poly(std::move(coef));
}

/// Exact moments of the measure the basis came from (alpha_j = 0 past the end).
inline MomentTable moments_from_basis(const OpucBasis& b, int K) {
    MomentTable t;
    t.K = K;
    t.g = detail::alpha_to_moments(b.alpha.alpha, K);
    return t;
}

inline void to_json(nlohmann::json& j, const OpucBasis& b) {
    nlohmann::json polys = nlohmann::json::array();
    for (const auto& p : b.monic) {
        nlohmann::json coeffs = nlohmann::json::array();
        for (const auto& c : p.c) coeffs.push_back({c.real(), c.imag()});
        polys.push_back(coeffs);
    }
    nlohmann::json alphas = nlohmann::json::array();
    for (const auto& a : b.alpha.alpha) alphas.push_back({a.real(), a.imag()});
    j = {{"monic", polys}, {"norms", b.monic_norms}, {"alpha", alphas}};
}

}  // namespace opuclab
