#pragma once

// Exact calculus of polynomial phase-space symbols.
//
// Conventions: a monomial is keyed by (i, j) meaning p^i q^j. The star
// product is the standard Moyal product
//
//   f * g = f exp( (i hbar / 2) (<d_q d_p> - <d_p d_q>) ) g,
//
// so that q * p - p * q = i hbar. Some texts write the first-order term as
// hbar {f, g}; that schematic form differs from this one by the factor i/2.

#include <complex>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace wigneton {

using Complex = std::complex<double>;

struct Exponent {
    int p = 0;  // power of p
    int q = 0;  // power of q
    auto operator<=>(const Exponent&) const = default;
};

class PolySymbol {
public:
    using TermMap = std::map<Exponent, Complex>;

    PolySymbol() = default;
    static PolySymbol constant(Complex c);
    static PolySymbol monomial(int p_power, int q_power, Complex c = 1.0);
    static PolySymbol q() { return monomial(0, 1); }
    static PolySymbol p() { return monomial(1, 0); }

    const TermMap& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }
    std::size_t size() const noexcept { return terms_.size(); }

    // Coefficient of p^i q^j (zero if absent).
    Complex coeff(int p_power, int q_power) const;
    void add_term(int p_power, int q_power, Complex c);

    int degree() const;       // total degree, -1 for the zero symbol
    int degree_p() const;
    int degree_q() const;

    bool is_real(double tol = 0.0) const;
    PolySymbol real_part() const;
    PolySymbol imag_part() const;
    double max_abs_coeff() const;

    PolySymbol diff_q(int order = 1) const;
    PolySymbol diff_p(int order = 1) const;

    Complex evaluate(double q, double p) const;

    PolySymbol& operator+=(const PolySymbol& o);
    PolySymbol& operator-=(const PolySymbol& o);
    PolySymbol& operator*=(Complex s);
    friend PolySymbol operator+(PolySymbol a, const PolySymbol& b) { return a += b; }
    friend PolySymbol operator-(PolySymbol a, const PolySymbol& b) { return a -= b; }
    friend PolySymbol operator*(PolySymbol a, Complex s) { return a *= s; }
    friend PolySymbol operator*(Complex s, PolySymbol a) { return a *= s; }
    friend PolySymbol operator*(const PolySymbol& a, const PolySymbol& b);
    PolySymbol operator-() const { return *this * Complex(-1.0); }

    // Canonical maps compare exactly.
    friend bool operator==(const PolySymbol&, const PolySymbol&) = default;

    // Largest coefficient-wise difference.
    friend double max_coeff_diff(const PolySymbol& a, const PolySymbol& b);

    std::string to_string() const;

private:
    TermMap terms_;  // canonical: no exact zeros stored
};

// One term coeff(q,p) * d_q^dq d_p^dp of a finite differential operator.
struct OperatorTerm {
    PolySymbol coeff;
    int dq = 0;
    int dp = 0;
};

class PhaseSpaceOperator {
public:
    PhaseSpaceOperator() = default;
    explicit PhaseSpaceOperator(std::vector<OperatorTerm> terms);

    const std::vector<OperatorTerm>& terms() const noexcept { return terms_; }
    // Coefficient symbol attached to d_q^dq d_p^dp (zero if absent).
    PolySymbol coeff(int dq, int dp) const;
    int max_derivative_order() const;

    PolySymbol apply(const PolySymbol& w) const;

    // Split into the parts with real / imaginary coefficient symbols, so that
    // op = real + i * imag.
    PhaseSpaceOperator real_part() const;
    PhaseSpaceOperator imag_part() const;

private:
    void add(const PolySymbol& c, int dq, int dp);
    std::vector<OperatorTerm> terms_;  // sorted by (dq, dp), nonzero coefficients
};

struct Kick {
    double period = 1.0;
    PolySymbol symbol;
};

struct Hamiltonian {
    PolySymbol base;
    std::vector<Kick> kicks;
    double hbar = 1.0;

    bool time_dependent() const noexcept { return !kicks.empty(); }
    // Throws std::invalid_argument when the invariants do not hold.
    void validate() const;
};

PolySymbol star_product(const PolySymbol& f, const PolySymbol& g, double hbar);
PolySymbol moyal_bracket(const PolySymbol& f, const PolySymbol& g, double hbar);
PolySymbol poisson_bracket(const PolySymbol& f, const PolySymbol& g);

// Operator L with L[W] = H * W (Bopp shift q -> q + (i hbar/2) d_p,
// p -> p - (i hbar/2) d_q).
PhaseSpaceOperator stargen_operator(const PolySymbol& h, double hbar);
// Operator with L[W] = W * H.
PhaseSpaceOperator right_star_operator(const PolySymbol& h, double hbar);
// Operator with dW/dt = L[W] = (H * W - W * H) / (i hbar).
PhaseSpaceOperator evolution_operator(const PolySymbol& h, double hbar);

// JSON array of [i, j, re, im] sorted by (i, j).
nlohmann::json to_json(const PolySymbol& s);
PolySymbol poly_from_json(const nlohmann::json& j);

}  // namespace wigneton
