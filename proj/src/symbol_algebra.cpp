#include "wigneton/symbol_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "wigneton/errors.hpp"

namespace wigneton {

namespace {

double falling_factorial(int n, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= static_cast<double>(n - i);
    return r;
}

double binomial(int n, int k) {
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return static_cast<double>(r);
}

// (i a)^n by repeated multiplication so that zero components stay exact.
Complex imaginary_power(double a, int n) {
    Complex r = 1.0;
    for (int i = 0; i < n; ++i) r *= Complex(0.0, a);
    return r;
}

double factorial(int n) { return falling_factorial(n, n); }

}  // namespace

PolySymbol PolySymbol::constant(Complex c) { return monomial(0, 0, c); }

PolySymbol PolySymbol::monomial(int p_power, int q_power, Complex c) {
    PolySymbol s;
    s.add_term(p_power, q_power, c);
    return s;
}

Complex PolySymbol::coeff(int p_power, int q_power) const {
    auto it = terms_.find({p_power, q_power});
    return it == terms_.end() ? Complex{} : it->second;
}

void PolySymbol::add_term(int p_power, int q_power, Complex c) {
    if (p_power < 0 || q_power < 0) throw std::invalid_argument("PolySymbol: negative exponent");
    if (c == Complex{}) return;
    auto [it, inserted] = terms_.try_emplace({p_power, q_power}, c);
    if (!inserted) {
        it->second += c;
        if (it->second == Complex{}) terms_.erase(it);
    }
}

int PolySymbol::degree() const {
    int d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, e.p + e.q);
    return d;
}

int PolySymbol::degree_p() const {
    int d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, e.p);
    return d;
}

int PolySymbol::degree_q() const {
    int d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, e.q);
    return d;
}

bool PolySymbol::is_real(double tol) const {
    return std::all_of(terms_.begin(), terms_.end(),
                       [tol](const auto& t) { return std::abs(t.second.imag()) <= tol; });
}

PolySymbol PolySymbol::real_part() const {
    PolySymbol r;
    for (const auto& [e, c] : terms_) r.add_term(e.p, e.q, c.real());
    return r;
}

PolySymbol PolySymbol::imag_part() const {
    PolySymbol r;
    for (const auto& [e, c] : terms_) r.add_term(e.p, e.q, c.imag());
    return r;
}

double PolySymbol::max_abs_coeff() const {
    double m = 0.0;
    for (const auto& [e, c] : terms_) m = std::max(m, std::abs(c));
    return m;
}

PolySymbol PolySymbol::diff_q(int order) const {
    PolySymbol r;
    for (const auto& [e, c] : terms_)
        if (e.q >= order) r.add_term(e.p, e.q - order, c * falling_factorial(e.q, order));
    return r;
}

PolySymbol PolySymbol::diff_p(int order) const {
    PolySymbol r;
    for (const auto& [e, c] : terms_)
        if (e.p >= order) r.add_term(e.p - order, e.q, c * falling_factorial(e.p, order));
    return r;
}

Complex PolySymbol::evaluate(double q, double p) const {
    Complex acc{};
    for (const auto& [e, c] : terms_) acc += c * std::pow(p, e.p) * std::pow(q, e.q);
    return acc;
}

PolySymbol& PolySymbol::operator+=(const PolySymbol& o) {
    for (const auto& [e, c] : o.terms_) add_term(e.p, e.q, c);
    return *this;
}

PolySymbol& PolySymbol::operator-=(const PolySymbol& o) {
    for (const auto& [e, c] : o.terms_) add_term(e.p, e.q, -c);
    return *this;
}

PolySymbol& PolySymbol::operator*=(Complex s) {
    if (s == Complex{}) {
        terms_.clear();
        return *this;
    }
    for (auto it = terms_.begin(); it != terms_.end();) {
        it->second *= s;
        if (it->second == Complex{}) it = terms_.erase(it);
        else ++it;
    }
    return *this;
}

PolySymbol operator*(const PolySymbol& a, const PolySymbol& b) {
    PolySymbol r;
    for (const auto& [ea, ca] : a.terms_)
        for (const auto& [eb, cb] : b.terms_) r.add_term(ea.p + eb.p, ea.q + eb.q, ca * cb);
    return r;
}

double max_coeff_diff(const PolySymbol& a, const PolySymbol& b) {
    return (a - b).max_abs_coeff();
}

std::string PolySymbol::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        os << "(" << c.real();
        if (c.imag() != 0.0) os << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << "i";
        os << ")";
        if (e.p) os << "*p^" << e.p;
        if (e.q) os << "*q^" << e.q;
    }
    return os.str();
}

// ---------------------------------------------------------------------------

PhaseSpaceOperator::PhaseSpaceOperator(std::vector<OperatorTerm> terms) {
    for (auto& t : terms) add(t.coeff, t.dq, t.dp);
}

void PhaseSpaceOperator::add(const PolySymbol& c, int dq, int dp) {
    if (dq < 0 || dp < 0) throw std::invalid_argument("PhaseSpaceOperator: negative derivative order");
    auto it = std::find_if(terms_.begin(), terms_.end(),
                           [&](const OperatorTerm& t) { return t.dq == dq && t.dp == dp; });
    if (it == terms_.end()) {
        if (c.is_zero()) return;
        OperatorTerm t{c, dq, dp};
        auto pos = std::lower_bound(terms_.begin(), terms_.end(), t, [](const auto& a, const auto& b) {
            return std::pair(a.dq, a.dp) < std::pair(b.dq, b.dp);
        });
        terms_.insert(pos, std::move(t));
        return;
    }
    it->coeff += c;
    if (it->coeff.is_zero()) terms_.erase(it);
}

PolySymbol PhaseSpaceOperator::coeff(int dq, int dp) const {
    for (const auto& t : terms_)
        if (t.dq == dq && t.dp == dp) return t.coeff;
    return {};
}

int PhaseSpaceOperator::max_derivative_order() const {
    int m = 0;
    for (const auto& t : terms_) m = std::max(m, t.dq + t.dp);
    return m;
}

PolySymbol PhaseSpaceOperator::apply(const PolySymbol& w) const {
    PolySymbol r;
    for (const auto& t : terms_) r += t.coeff * w.diff_q(t.dq).diff_p(t.dp);
    return r;
}

PhaseSpaceOperator PhaseSpaceOperator::real_part() const {
    PhaseSpaceOperator r;
    for (const auto& t : terms_) r.add(t.coeff.real_part(), t.dq, t.dp);
    return r;
}

PhaseSpaceOperator PhaseSpaceOperator::imag_part() const {
    PhaseSpaceOperator r;
    for (const auto& t : terms_) r.add(t.coeff.imag_part(), t.dq, t.dp);
    return r;
}

void Hamiltonian::validate() const {
    if (!(hbar > 0.0) || !std::isfinite(hbar)) throw std::invalid_argument("hamiltonian: hbar must be positive");
    if (!base.is_real()) throw std::invalid_argument("hamiltonian: base symbol must have real coefficients");
    for (const auto& k : kicks) {
        if (!(k.period > 0.0)) throw std::invalid_argument("hamiltonian: kick period must be positive");
        if (!k.symbol.is_real()) throw std::invalid_argument("hamiltonian: kick symbol must be real");
    }
}

// ---------------------------------------------------------------------------
//
// f * g = sum_n (i hbar/2)^n / n! sum_k C(n,k) (-1)^k (d_q^{n-k} d_p^k f)(d_p^{n-k} d_q^k g)
//
// The series terminates once n exceeds min(deg f, deg g).

PolySymbol star_product(const PolySymbol& f, const PolySymbol& g, double hbar) {
    PolySymbol r = f * g;
    if (hbar == 0.0 || f.is_zero() || g.is_zero()) return r;
    const int n_max = std::min(f.degree(), g.degree());
    const Complex half_i_hbar(0.0, 0.5 * hbar);
    Complex prefactor = 1.0;
    for (int n = 1; n <= n_max; ++n) {
        prefactor *= half_i_hbar / static_cast<double>(n);
        for (int k = 0; k <= n; ++k) {
            PolySymbol left = f.diff_q(n - k).diff_p(k);
            if (left.is_zero()) continue;
            PolySymbol right = g.diff_p(n - k).diff_q(k);
            if (right.is_zero()) continue;
            const double sign = (k % 2 == 0) ? 1.0 : -1.0;
            r += (left * right) * (prefactor * binomial(n, k) * sign);
        }
    }
    return r;
}

PolySymbol moyal_bracket(const PolySymbol& f, const PolySymbol& g, double hbar) {
    if (hbar == 0.0)
        throw DegenerateParameter("moyal_bracket: hbar = 0 is degenerate, use poisson_bracket");
    return (star_product(f, g, hbar) - star_product(g, f, hbar)) * (1.0 / Complex(0.0, hbar));
}

PolySymbol poisson_bracket(const PolySymbol& f, const PolySymbol& g) {
    return f.diff_q() * g.diff_p() - f.diff_p() * g.diff_q();
}

PhaseSpaceOperator stargen_operator(const PolySymbol& h, double hbar) {
    std::vector<OperatorTerm> terms{{h, 0, 0}};
    if (hbar != 0.0) {
        for (int n = 1; n <= std::max(h.degree(), 0); ++n) {
            const Complex prefactor = imaginary_power(0.5 * hbar, n) / factorial(n);
            for (int k = 0; k <= n; ++k) {
                PolySymbol c = h.diff_q(n - k).diff_p(k);
                if (c.is_zero()) continue;
                const double sign = (k % 2 == 0) ? 1.0 : -1.0;
                terms.push_back({c * (prefactor * binomial(n, k) * sign), k, n - k});
            }
        }
    }
    return PhaseSpaceOperator(std::move(terms));
}

PhaseSpaceOperator right_star_operator(const PolySymbol& h, double hbar) {
    std::vector<OperatorTerm> terms{{h, 0, 0}};
    if (hbar != 0.0) {
        for (int n = 1; n <= std::max(h.degree(), 0); ++n) {
            const Complex prefactor = imaginary_power(0.5 * hbar, n) / factorial(n);
            for (int k = 0; k <= n; ++k) {
                PolySymbol c = h.diff_p(n - k).diff_q(k);
                if (c.is_zero()) continue;
                const double sign = (k % 2 == 0) ? 1.0 : -1.0;
                terms.push_back({c * (prefactor * binomial(n, k) * sign), n - k, k});
            }
        }
    }
    return PhaseSpaceOperator(std::move(terms));
}

PhaseSpaceOperator evolution_operator(const PolySymbol& h, double hbar) {
    if (hbar == 0.0) {
        // Classical Liouville limit: dW/dt = {H, W}.
        return PhaseSpaceOperator({{h.diff_q(), 0, 1}, {-h.diff_p(), 1, 0}});
    }
    const auto left = stargen_operator(h, hbar);
    const auto right = right_star_operator(h, hbar);
    const Complex scale = 1.0 / Complex(0.0, hbar);
    std::vector<OperatorTerm> terms;
    for (const auto& t : left.terms()) terms.push_back({t.coeff * scale, t.dq, t.dp});
    for (const auto& t : right.terms()) terms.push_back({t.coeff * (-scale), t.dq, t.dp});
    // Even orders cancel exactly; odd orders carry i^n / i, real for real H.
    PhaseSpaceOperator op(std::move(terms));
    if (h.is_real()) return op.real_part();
    return op;
}

nlohmann::json to_json(const PolySymbol& s) {
    auto arr = nlohmann::json::array();
    for (const auto& [e, c] : s.terms()) arr.push_back({e.p, e.q, c.real(), c.imag()});
    return arr;
}

PolySymbol poly_from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw std::invalid_argument("PolySymbol JSON must be an array");
    PolySymbol s;
    for (const auto& e : j) {
        if (!e.is_array() || e.size() != 4 || !e[0].is_number_integer() || !e[1].is_number_integer() ||
            !e[2].is_number() || !e[3].is_number())
            throw std::invalid_argument("PolySymbol JSON entries must be [i, j, re, im]");
        s.add_term(e[0].get<int>(), e[1].get<int>(), {e[2].get<double>(), e[3].get<double>()});
    }
    return s;
}

}  // namespace wigneton
