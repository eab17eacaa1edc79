#pragma once

// Measure families on the unit circle, their atoms, exact trigonometric
// moment tables, and quadrature helpers. Moments, not quadrature, are the
// primary inner-product path: polynomial inner products are finite moment
// combinations, which stay exact even when the weight itself is unbounded.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "opuclab/poly.hpp"
#include "opuclab/specfun.hpp"
#include "opuclab/summation.hpp"

namespace opuclab {

struct Atom {
    double theta = 0.0;  // location e^{i theta}, theta in [0, 2pi)
    double mass = 0.0;   // mass in the final (normalized) measure
};

struct GenJacobiPoint {
    double theta = 0.0;
    double a = 0.0;  // exponent of |z - e^{i theta}|^{2a}, a > -1/2
};

/// Closed-form trigonometric moment of the circular Jacobi weight,
/// gamma_k(a) = (-1)^k Gamma(a+1)^2 / (Gamma(k+a+1) Gamma(-k+a+1)),
/// with 1/Gamma = 0 at poles (so integer a truncates the sequence).
inline Complex cjacobi_moment(double a, int k) {
    if (a <= -0.5) throw std::invalid_argument("cjacobi_moment: need a > -1/2");
    const double g1 = gamma(a + 1.0);
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    return Complex(sign * g1 * g1 * rgamma(k + a + 1.0) * rgamma(-k + a + 1.0), 0.0);
}

struct MeasureSpec {
    enum class Family {
        Lebesgue,
        CJacobi,
        GeneralizedJacobi,
        ArcUniform,
        VerblunskyGiven,
    };

    Family family = Family::Lebesgue;
    double a = 0.0;                        // CJacobi exponent
    std::vector<GenJacobiPoint> points;    // GeneralizedJacobi singular points
    std::vector<double> g_cos, g_sin;      // trig-poly Lipschitz factor; empty = 1
    double delta = 0.0;                    // ArcUniform gap half-width
    std::vector<Complex> alpha;            // VerblunskyGiven coefficients
    std::vector<Atom> atoms;
    double weight_scale = 1.0;             // mass carried by the a.c. part
    double genjacobi_norm = 1.0;           // integral of the raw genjacobi weight

    static MeasureSpec lebesgue() { return MeasureSpec{}; }

    static MeasureSpec cjacobi(double a) {
        if (a <= -0.5) throw std::invalid_argument("cjacobi: need a > -1/2");
        MeasureSpec m;
        m.family = Family::CJacobi;
        m.a = a;
        return m;
    }

    static MeasureSpec arc_uniform(double delta) {
        if (!(delta > 0.0 && delta < detail::kPi))
            throw std::invalid_argument("arc_uniform: need 0 < delta < pi");
        MeasureSpec m;
        m.family = Family::ArcUniform;
        m.delta = delta;
        return m;
    }

    static MeasureSpec verblunsky_given(std::vector<Complex> alpha) {
        for (const auto& aj : alpha)
            if (!(std::abs(aj) < 1.0))
                throw std::invalid_argument("verblunsky_given: need |alpha_j| < 1");
        MeasureSpec m;
        m.family = Family::VerblunskyGiven;
        m.alpha = std::move(alpha);
        return m;
    }

    static MeasureSpec generalized_jacobi(std::vector<GenJacobiPoint> points,
                                          std::vector<double> g_cos = {},
                                          std::vector<double> g_sin = {});

    /// Trig-poly factor g at theta (1 when no coefficients are given).
    double g_eval(double theta) const {
        if (g_cos.empty() && g_sin.empty()) return 1.0;
        double v = 0.0;
        for (size_t m = 0; m < g_cos.size(); ++m) v += g_cos[m] * std::cos(m * theta);
        for (size_t m = 0; m < g_sin.size(); ++m) v += g_sin[m] * std::sin(m * theta);
        return v;
    }
};

/// Hermitian table gamma_{-K}..gamma_K with gamma_k = int e^{ik theta} dmu.
/// Only k >= 0 is stored; negative indices resolve by conjugation.
struct MomentTable {
    int K = 0;
    std::vector<Complex> g;  // g[k], k = 0..K

    Complex operator()(int k) const {
        const int a = std::abs(k);
        if (a > K) throw std::out_of_range("MomentTable: |k| exceeds table");
        return k >= 0 ? g[static_cast<size_t>(a)] : std::conj(g[static_cast<size_t>(a)]);
    }
};

/// Uniform M-node trapezoid on the half-step-offset grid
/// theta_i = 2pi(i + 1/2)/M; exact for low-degree Laurent polynomials and
/// never samples theta = 0 or theta = pi (for even M).
template <class F>
Complex quadrature_integral(F&& f, int M) {
    if (M < 16) throw std::invalid_argument("quadrature_integral: need M >= 16");
    KahanComplexSum acc;
    for (int i = 0; i < M; ++i) {
        const double theta = 2.0 * detail::kPi * (i + 0.5) / M;
        acc.add(Complex(f(theta)));
    }
    return acc.value() / static_cast<double>(M);
}

namespace detail {

// ---- tanh-sinh panel quadrature -------------------------------------------
//
// Integrates f over [a, b] where f may have integrable endpoint
// singularities. The callable receives (theta, da, db) with da = theta - a
// and db = b - theta computed without cancellation, so weight factors can be
// evaluated accurately arbitrarily close to the endpoints.
template <class F>
Complex de_panel(F&& f, double a, double b, double tol, int max_level = 11) {
    const double width = b - a;
    const double half = 0.5 * width;
    constexpr double u_max = 6.5;

    auto node_contribution = [&](double u) -> Complex {
        const double s = 0.5 * kPi * std::sinh(u);
        // 1 -+ tanh(s) without cancellation
        const double e2s = std::exp(-2.0 * std::abs(s));
        const double near = 2.0 * e2s / (1.0 + e2s);  // distance to nearest end / half
        const double far = 2.0 / (1.0 + e2s);
        double frac_a, frac_b;                        // (theta-a)/half, (b-theta)/half
        if (s >= 0) { frac_a = far; frac_b = near; }
        else        { frac_a = near; frac_b = far; }
        const double da = std::max(half * frac_a, 5e-306);
        const double db = std::max(half * frac_b, 5e-306);
        const double theta = a + da;  // fine except within 1 ulp of b
        const double sech = 1.0 / std::cosh(s);
        const double w = half * 0.5 * kPi * std::cosh(u) * sech * sech;
        if (!(w > 0.0)) return Complex(0.0);
        return w * Complex(f(theta, da, db));
    };

    double h = 0.5;
    KahanComplexSum coarse;
    coarse.add(node_contribution(0.0));
    for (int i = 1; i * h <= u_max; ++i) {
        const Complex c = node_contribution(i * h) + node_contribution(-i * h);
        coarse.add(c);
        if (std::abs(c) < 1e-300) break;
    }
    Complex prev = coarse.value() * h;

    for (int level = 1; level <= max_level; ++level) {
        h *= 0.5;
        KahanComplexSum mid;  // new nodes at odd multiples of the refined h
        for (int i = 1; i * h <= u_max; i += 2) {
            const Complex c = node_contribution(i * h) + node_contribution(-i * h);
            mid.add(c);
            if (std::abs(c) < 1e-300 && i * h > 3.0) break;
        }
        const Complex cur = 0.5 * prev + mid.value() * h;
        if (level >= 3 && std::abs(cur - prev) <= tol * (std::abs(cur) + 1e-30))
            return cur;
        prev = cur;
    }
    return prev;
}

// Raw (unnormalized) generalized Jacobi weight against dtheta/2pi on a panel
// between consecutive singular points; ia/ib are the endpoint point indices.
struct GenJacobiPanels {
    std::vector<double> theta;  // sorted singular locations
    std::vector<double> expo;   // exponents 2*a_k

    double factor(double theta_v, double da, double db, size_t ia, size_t ib) const {
        double w = 1.0;
        for (size_t k = 0; k < theta.size(); ++k) {
            double dist;
            if (k == ia) dist = da;
            else if (k == ib) dist = db;
            else {
                double d = std::remainder(theta_v - theta[k], 2.0 * kPi);
                dist = std::abs(d);
            }
            w *= std::pow(2.0 * std::abs(std::sin(0.5 * dist)), expo[k]);
        }
        return w;
    }
};

inline Complex genjacobi_raw_moment(const MeasureSpec& m, int k, double tol = 5e-13) {
    GenJacobiPanels panels;
    for (const auto& p : m.points) {
        panels.theta.push_back(std::remainder(p.theta, 2.0 * kPi));
        panels.expo.push_back(2.0 * p.a);
    }
    // sort jointly
    std::vector<size_t> idx(panels.theta.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](size_t x, size_t y) { return panels.theta[x] < panels.theta[y]; });
    GenJacobiPanels sorted;
    for (size_t i : idx) {
        sorted.theta.push_back(panels.theta[i]);
        sorted.expo.push_back(panels.expo[i]);
    }
    const size_t np = sorted.theta.size();
    KahanComplexSum total;
    for (size_t i = 0; i < np; ++i) {
        const double a = sorted.theta[i];
        const double b = (i + 1 < np) ? sorted.theta[i + 1] : sorted.theta[0] + 2.0 * kPi;
        const size_t ia = i, ib = (i + 1) % np;
        auto f = [&](double th, double da, double db) -> Complex {
            const double w = sorted.factor(th, da, db, ia, ib) * m.g_eval(th);
            return std::polar(w, k * th);
        };
        total.add(de_panel(f, a, b, tol));
    }
    return total.value() / (2.0 * kPi);
}

// Exact moment reconstruction from Verblunsky coefficients: coefficient-space
// Szego recursion plus gamma_{n+1} = conj(alpha_n) |Phi_n|^2 - sum Phi_n[j] gamma_{j+1}.
// Coefficients beyond the given list are treated as zero (Bernstein-Szego tail).
inline std::vector<Complex> alpha_to_moments(const std::vector<Complex>& alpha, int K) {
    std::vector<Complex> gam(static_cast<size_t>(K) + 1, Complex(0.0));
    gam[0] = 1.0;
    std::vector<Complex> phi{1.0}, phi_star{1.0};  // Phi_n, Phi_n^*
    double norm2 = 1.0;
    for (int n = 0; n < K; ++n) {
        const Complex an =
            n < static_cast<int>(alpha.size()) ? alpha[static_cast<size_t>(n)] : Complex(0.0);
        KahanComplexSum s;
        for (int j = 0; j < n; ++j) s.add(phi[static_cast<size_t>(j)] * gam[static_cast<size_t>(j) + 1]);
        gam[static_cast<size_t>(n) + 1] = std::conj(an) * norm2 - s.value();
        // advance the basis
        std::vector<Complex> next(static_cast<size_t>(n) + 2, Complex(0.0));
        for (int j = 0; j <= n; ++j) next[static_cast<size_t>(j) + 1] = phi[static_cast<size_t>(j)];
        for (int j = 0; j <= n; ++j) next[static_cast<size_t>(j)] -= std::conj(an) * phi_star[static_cast<size_t>(j)];
        std::vector<Complex> next_star(static_cast<size_t>(n) + 2, Complex(0.0));
        for (int j = 0; j <= n; ++j) next_star[static_cast<size_t>(j)] = phi_star[static_cast<size_t>(j)];
        for (int j = 0; j <= n; ++j) next_star[static_cast<size_t>(j) + 1] -= an * phi[static_cast<size_t>(j)];
        phi = std::move(next);
        phi_star = std::move(next_star);
        norm2 *= 1.0 - std::norm(an);
    }
    return gam;
}

}  // namespace detail

inline MeasureSpec MeasureSpec::generalized_jacobi(std::vector<GenJacobiPoint> points,
                                                   std::vector<double> g_cos,
                                                   std::vector<double> g_sin) {
    if (points.empty())
        throw std::invalid_argument("generalized_jacobi: need at least one point");
    for (const auto& p : points)
        if (p.a <= -0.5)
            throw std::invalid_argument("generalized_jacobi: need a_k > -1/2");
    for (size_t i = 0; i < points.size(); ++i)
        for (size_t j = i + 1; j < points.size(); ++j)
            if (std::abs(std::remainder(points[i].theta - points[j].theta,
                                        2.0 * detail::kPi)) < 1e-12)
                throw std::invalid_argument("generalized_jacobi: points must be distinct");
    MeasureSpec m;
    m.family = Family::GeneralizedJacobi;
    m.points = std::move(points);
    m.g_cos = std::move(g_cos);
    m.g_sin = std::move(g_sin);
    for (int i = 0; i < 512; ++i) {
        const double th = 2.0 * detail::kPi * (i + 0.5) / 512;
        if (!(m.g_eval(th) > 0.0))
            throw std::invalid_argument("generalized_jacobi: g must be strictly positive");
    }
    m.genjacobi_norm = detail::genjacobi_raw_moment(m, 0).real();
    if (!(m.genjacobi_norm > 0.0))
        throw std::runtime_error("generalized_jacobi: weight normalization failed");
    return m;
}

namespace detail {

inline Complex family_moment(const MeasureSpec& m, int k,
                             const std::vector<Complex>* alpha_moments) {
    switch (m.family) {
        case MeasureSpec::Family::Lebesgue:
            return k == 0 ? 1.0 : 0.0;
        case MeasureSpec::Family::CJacobi: {
            // ratio recurrence gamma_{k+1} = gamma_k (k - a)/(k + a + 1); never
            // overflows, matches the closed form to roundoff
            double g = 1.0;
            for (int j = 0; j < std::abs(k); ++j) g *= (j - m.a) / (j + m.a + 1.0);
            return Complex(g, 0.0);
        }
        case MeasureSpec::Family::ArcUniform: {
            if (k == 0) return 1.0;
            return Complex(-std::sin(k * m.delta) / (k * (kPi - m.delta)), 0.0);
        }
        case MeasureSpec::Family::GeneralizedJacobi:
            return genjacobi_raw_moment(m, k) / m.genjacobi_norm;
        case MeasureSpec::Family::VerblunskyGiven:
            // only queried with k >= 0; the table stores the upper half
            return (*alpha_moments)[static_cast<size_t>(k)];
    }
    throw std::logic_error("family_moment: unknown family");
}

}  // namespace detail

inline MomentTable moment_table(const MeasureSpec& m, int K) {
    if (K < 0) throw std::invalid_argument("moment_table: need K >= 0");
    std::optional<std::vector<Complex>> alpha_moments;
    if (m.family == MeasureSpec::Family::VerblunskyGiven)
        alpha_moments = detail::alpha_to_moments(m.alpha, K);
    MomentTable t;
    t.K = K;
    t.g.resize(static_cast<size_t>(K) + 1);
    for (int k = 0; k <= K; ++k) {
        Complex v = m.weight_scale *
                    detail::family_moment(m, k, alpha_moments ? &*alpha_moments : nullptr);
        for (const auto& at : m.atoms) v += at.mass * std::polar(1.0, k * at.theta);
        t.g[static_cast<size_t>(k)] = v;
    }
    return t;
}

/// nu_t = (mu + t delta_{theta0}) / (1+t); moment transform
/// gamma_k -> (gamma_k + t e^{ik theta0}) / (1+t).
inline MeasureSpec add_mass_point(const MeasureSpec& m, double theta0, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("add_mass_point: need t > 0");
    MeasureSpec r = m;
    const double s = 1.0 / (1.0 + t);
    r.weight_scale = m.weight_scale * s;
    for (auto& at : r.atoms) at.mass *= s;
    const double th = std::remainder(theta0, 2.0 * detail::kPi);
    bool merged = false;
    for (auto& at : r.atoms) {
        if (std::abs(std::remainder(at.theta - th, 2.0 * detail::kPi)) < 1e-14) {
            at.mass += t * s;
            merged = true;
            break;
        }
    }
    if (!merged) r.atoms.push_back({th < 0 ? th + 2.0 * detail::kPi : th, t * s});
    return r;
}

/// <p, q> = sum conj(p_j) q_k gamma_{k-j}; exact given exact moments.
inline Complex inner_product_poly(const Poly& p, const Poly& q, const MomentTable& mt) {
    if (p.degree() > mt.K || q.degree() > mt.K)
        throw std::invalid_argument("inner_product_poly: degree exceeds moment table");
    KahanComplexSum acc;
    for (int j = 0; j <= p.degree(); ++j) {
        const Complex pj = std::conj(p.c[static_cast<size_t>(j)]);
        if (pj == Complex(0.0)) continue;
        for (int k = 0; k <= q.degree(); ++k)
            acc.add(pj * q.c[static_cast<size_t>(k)] * mt(k - j));
    }
    return acc.value();
}

inline double poly_norm(const Poly& p, const MomentTable& mt) {
    return std::sqrt(std::max(0.0, inner_product_poly(p, p, mt).real()));
}

/// Normalized weight density of the a.c. part (the family density times the
/// a.c. mass fraction). Unbounded points report an error rather than inf.
inline double weight_eval(const MeasureSpec& m, double theta) {
    auto dist_to = [&](double th0) {
        return std::abs(std::remainder(theta - th0, 2.0 * detail::kPi));
    };
    switch (m.family) {
        case MeasureSpec::Family::Lebesgue:
            return m.weight_scale;
        case MeasureSpec::Family::CJacobi: {
            const double d = dist_to(0.0);
            if (d < 1e-14) {
                if (m.a < 0.0)
                    throw std::domain_error("weight_eval: weight unbounded at theta = 0");
                if (m.a > 0.0) return 0.0;
            }
            const double g1 = gamma(m.a + 1.0);
            const double norm = g1 * g1 * rgamma(2.0 * m.a + 1.0);
            return m.weight_scale * norm *
                   std::pow(2.0 * std::abs(std::sin(0.5 * theta)), 2.0 * m.a);
        }
        case MeasureSpec::Family::ArcUniform: {
            const double d = dist_to(0.0);
            return d >= m.delta ? m.weight_scale * detail::kPi / (detail::kPi - m.delta)
                                : 0.0;
        }
        case MeasureSpec::Family::GeneralizedJacobi: {
            double w = m.g_eval(theta);
            for (const auto& p : m.points) {
                const double d = dist_to(p.theta);
                if (d < 1e-14) {
                    if (p.a < 0.0)
                        throw std::domain_error(
                            "weight_eval: weight unbounded at a singular point");
                    if (p.a > 0.0) return 0.0;
                }
                w *= std::pow(2.0 * std::abs(std::sin(0.5 * (theta - p.theta))),
                              2.0 * p.a);
            }
            return m.weight_scale * w / m.genjacobi_norm;
        }
        case MeasureSpec::Family::VerblunskyGiven:
            throw std::domain_error(
                "weight_eval: no pointwise density for verblunsky_given");
    }
    throw std::logic_error("weight_eval: unknown family");
}

// ---- JSON serialization -----------------------------------------------------

inline void to_json(nlohmann::json& j, const MeasureSpec& m) {
    using F = MeasureSpec::Family;
    nlohmann::json params = nlohmann::json::object();
    std::string fam;
    switch (m.family) {
        case F::Lebesgue: fam = "lebesgue"; break;
        case F::CJacobi:
            fam = "cjacobi";
            params["a"] = m.a;
            break;
        case F::GeneralizedJacobi: {
            fam = "generalized_jacobi";
            nlohmann::json pts = nlohmann::json::array();
            for (const auto& p : m.points) pts.push_back({{"theta", p.theta}, {"a", p.a}});
            params["points"] = pts;
            if (!m.g_cos.empty()) params["g_cos"] = m.g_cos;
            if (!m.g_sin.empty()) params["g_sin"] = m.g_sin;
            break;
        }
        case F::ArcUniform:
            fam = "arc_uniform";
            params["delta"] = m.delta;
            break;
        case F::VerblunskyGiven: {
            fam = "verblunsky_given";
            nlohmann::json al = nlohmann::json::array();
            for (const auto& a : m.alpha) al.push_back({a.real(), a.imag()});
            params["alpha"] = al;
            break;
        }
    }
    nlohmann::json atoms = nlohmann::json::array();
    for (const auto& a : m.atoms) atoms.push_back({{"theta", a.theta}, {"mass", a.mass}});
    j = {{"family", fam}, {"params", params}, {"atoms", atoms}};
}

inline void from_json(const nlohmann::json& j, MeasureSpec& m) {
    const std::string fam = j.at("family").get<std::string>();
    const nlohmann::json params =
        j.contains("params") ? j.at("params") : nlohmann::json::object();
    if (fam == "lebesgue") {
        m = MeasureSpec::lebesgue();
    } else if (fam == "cjacobi") {
        m = MeasureSpec::cjacobi(params.at("a").get<double>());
    } else if (fam == "generalized_jacobi") {
        std::vector<GenJacobiPoint> pts;
        for (const auto& p : params.at("points"))
            pts.push_back({p.at("theta").get<double>(), p.at("a").get<double>()});
        std::vector<double> gc, gs;
        if (params.contains("g_cos")) gc = params.at("g_cos").get<std::vector<double>>();
        if (params.contains("g_sin")) gs = params.at("g_sin").get<std::vector<double>>();
        m = MeasureSpec::generalized_jacobi(std::move(pts), std::move(gc), std::move(gs));
    } else if (fam == "arc_uniform") {
        m = MeasureSpec::arc_uniform(params.at("delta").get<double>());
    } else if (fam == "verblunsky_given") {
        std::vector<Complex> al;
        for (const auto& a : params.at("alpha")) {
            if (a.is_array())
                al.emplace_back(a.at(0).get<double>(), a.at(1).get<double>());
            else
                al.emplace_back(a.get<double>(), 0.0);
        }
        m = MeasureSpec::verblunsky_given(std::move(al));
    } else {
        throw std::invalid_argument("MeasureSpec: unknown family '" + fam + "'");
    }
    double total_atom_mass = 0.0;
    if (j.contains("atoms")) {
        for (const auto& a : j.at("atoms")) {
            const Atom at{a.at("theta").get<double>(), a.at("mass").get<double>()};
            if (!(at.mass > 0.0))
                throw std::invalid_argument("MeasureSpec: atom mass must be positive");
            m.atoms.push_back(at);
            total_atom_mass += at.mass;
        }
    }
    if (total_atom_mass >= 1.0)
        throw std::invalid_argument("MeasureSpec: atom masses must sum below 1");
    m.weight_scale = 1.0 - total_atom_mass;
}

}  // namespace opuclab
