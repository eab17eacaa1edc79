#pragma once

// Dense complex polynomial carrier, monomial basis, Horner evaluation.

#include <complex>
#include <stdexcept>
#include <vector>

namespace opuclab {

using Complex = std::complex<double>;

struct Poly {
    // c[j] multiplies z^j
    std::vector<Complex> c;

    Poly() : c{Complex(0.0)} {}
    explicit Poly(std::vector<Complex> coeffs) : c(std::move(coeffs)) {
        if (c.empty()) c.assign(1, Complex(0.0));
    }
    static Poly monomial(int degree, Complex lead = 1.0) {
        std::vector<Complex> v(static_cast<size_t>(degree) + 1, Complex(0.0));
        v.back() = lead;
        return Poly(std::move(v));
    }

    int degree() const { return static_cast<int>(c.size()) - 1; }

    Complex eval(Complex z) const {
        Complex acc = 0.0;
        for (size_t j = c.size(); j-- > 0;) acc = acc * z + c[j];
        return acc;
    }

    Complex operator[](int j) const {
        return (j >= 0 && j < static_cast<int>(c.size())) ? c[static_cast<size_t>(j)]
                                                          : Complex(0.0);
    }
};

inline Poly operator+(const Poly& a, const Poly& b) {
    std::vector<Complex> r(std::max(a.c.size(), b.c.size()), Complex(0.0));
    for (size_t j = 0; j < a.c.size(); ++j) r[j] += a.c[j];
    for (size_t j = 0; j < b.c.size(); ++j) r[j] += b.c[j];
    return Poly(std::move(r));
}

inline Poly operator-(const Poly& a, const Poly& b) {
    std::vector<Complex> r(std::max(a.c.size(), b.c.size()), Complex(0.0));
    for (size_t j = 0; j < a.c.size(); ++j) r[j] += a.c[j];
    for (size_t j = 0; j < b.c.size(); ++j) r[j] -= b.c[j];
    return Poly(std::move(r));
}

inline Poly operator*(Complex s, const Poly& p) {
    Poly r = p;
    for (auto& x : r.c) x *= s;
    return r;
}

/// Multiplication by z (coefficient shift).
inline Poly shift_up(const Poly& p) {
    std::vector<Complex> r(p.c.size() + 1, Complex(0.0));
    for (size_t j = 0; j < p.c.size(); ++j) r[j + 1] = p.c[j];
    return Poly(std::move(r));
}

/// d/dz on coefficients.
inline Poly poly_derivative(const Poly& p) {
    if (p.c.size() <= 1) return Poly();
    std::vector<Complex> r(p.c.size() - 1);
    for (size_t j = 1; j < p.c.size(); ++j) r[j - 1] = static_cast<double>(j) * p.c[j];
    return Poly(std::move(r));
}

/// Reversal at degree n: z^n conj(p(1/conj(z))), i.e. c_j -> conj(c_{n-j}).
inline Poly reverse_poly(const Poly& p, int n) {
    if (p.degree() > n)
        throw std::invalid_argument("reverse_poly: degree exceeds reversal index");
    std::vector<Complex> r(static_cast<size_t>(n) + 1, Complex(0.0));
    for (size_t j = 0; j < p.c.size(); ++j)
        r[static_cast<size_t>(n) - j] = std::conj(p.c[j]);
    return Poly(std::move(r));
}

/// Both sides of nP = zP' + [(P*)']* at the polynomial's stored degree.
/// The outer reversal is the one for degree n-1.
inline std::pair<Poly, Poly> identity_1_8_check(const Poly& p) {
    const int n = p.degree();
    Poly lhs = static_cast<double>(n) * Complex(1.0) * p;
    Poly rhs = shift_up(poly_derivative(p));
    if (n >= 1)
        rhs = rhs + reverse_poly(poly_derivative(reverse_poly(p, n)), n - 1);
    // pad to common length for coefficientwise comparison
    while (lhs.c.size() < rhs.c.size()) lhs.c.emplace_back(0.0);
    while (rhs.c.size() < lhs.c.size()) rhs.c.emplace_back(0.0);
    return {lhs, rhs};
}

}  // namespace opuclab
