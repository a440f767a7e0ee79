#pragma once

#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "zhopf/parampoly.hpp"

namespace zhopf {

// Sparse polynomial in the state variables (R, X_3, ..., X_n) with ParamPoly
// coefficients. Variable 0 is always the radial variable R.
class StatePoly {
public:
    using TermMap = std::map<ExpVec, ParamPoly, GrlexLess>;

    StatePoly() : nvars_(0), param_arity_(0) {}
    StatePoly(int nvars, int param_arity) : nvars_(nvars), param_arity_(param_arity) {}

    static StatePoly zero(int nvars, int param_arity) { return StatePoly(nvars, param_arity); }

    static StatePoly constant(int nvars, const ParamPoly& c) {
        StatePoly p(nvars, c.arity());
        if (!c.is_zero()) p.terms_[ExpVec(nvars, 0)] = c;
        return p;
    }

    static StatePoly variable(int nvars, int param_arity, int idx, int power = 1) {
        if (power < 0) throw std::invalid_argument("StatePoly: negative state exponent");
        StatePoly p(nvars, param_arity);
        ExpVec e(nvars, 0);
        e.at(idx) = power;
        p.terms_[e] = ParamPoly::constant(param_arity, Rat(1));
        return p;
    }

    static StatePoly monomial(int nvars, const ExpVec& e, const ParamPoly& c) {
        if (static_cast<int>(e.size()) != nvars) throw std::invalid_argument("StatePoly: exponent arity mismatch");
        for (int x : e)
            if (x < 0) throw std::invalid_argument("StatePoly: negative state exponent");
        StatePoly p(nvars, c.arity());
        if (!c.is_zero()) p.terms_[e] = c;
        return p;
    }

    int nvars() const { return nvars_; }
    int param_arity() const { return param_arity_; }
    bool is_zero() const { return terms_.empty(); }
    const TermMap& terms() const { return terms_; }
    std::size_t term_count() const { return terms_.size(); }

    // Degree of the zero polynomial is -1 by convention.
    long total_degree() const {
        long d = -1;
        for (const auto& [e, c] : terms_) {
            long s = 0;
            for (int x : e) s += x;
            d = std::max(d, s);
        }
        return d;
    }

    void add_term(const ExpVec& e, const ParamPoly& c) {
        if (static_cast<int>(e.size()) != nvars_) throw std::invalid_argument("StatePoly: exponent arity mismatch");
        if (c.is_zero()) return;
        auto it = terms_.find(e);
        if (it == terms_.end()) {
            terms_[e] = c;
        } else {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    StatePoly& operator+=(const StatePoly& o) {
        check_compat(o);
        for (const auto& [e, c] : o.terms_) add_term(e, c);
        return *this;
    }

    StatePoly& operator-=(const StatePoly& o) {
        check_compat(o);
        for (const auto& [e, c] : o.terms_) add_term(e, -c);
        return *this;
    }

    friend StatePoly operator+(StatePoly a, const StatePoly& b) { return a += b; }
    friend StatePoly operator-(StatePoly a, const StatePoly& b) { return a -= b; }

    StatePoly operator-() const {
        StatePoly r(nvars_, param_arity_);
        for (const auto& [e, c] : terms_) r.terms_[e] = -c;
        return r;
    }

    friend StatePoly operator*(const StatePoly& a, const StatePoly& b) {
        a.check_compat(b);
        StatePoly r(a.nvars_, a.param_arity_);
        for (const auto& [ea, ca] : a.terms_) {
            for (const auto& [eb, cb] : b.terms_) {
                ExpVec e(a.nvars_);
                for (int i = 0; i < a.nvars_; ++i) e[i] = ea[i] + eb[i];
                r.add_term(e, ca * cb);
            }
        }
        return r;
    }

    StatePoly& operator*=(const StatePoly& o) { return *this = *this * o; }

    StatePoly& operator*=(const ParamPoly& c) { return *this = *this * constant(nvars_, c); }
    friend StatePoly operator*(StatePoly a, const ParamPoly& c) { return a *= c; }

    StatePoly& operator*=(const Rat& c) {
        if (c == 0) {
            terms_.clear();
            return *this;
        }
        for (auto& [e, v] : terms_) v *= c;
        return *this;
    }
    friend StatePoly operator*(StatePoly a, const Rat& c) { return a *= c; }
    friend StatePoly operator*(const Rat& c, StatePoly a) { return a *= c; }

    bool operator==(const StatePoly& o) const { return nvars_ == o.nvars_ && terms_ == o.terms_; }
    bool operator!=(const StatePoly& o) const { return !(*this == o); }

    StatePoly pow(int e) const {
        if (e < 0) throw std::invalid_argument("StatePoly::pow: negative exponent");
        StatePoly acc = constant(nvars_, ParamPoly::constant(param_arity_, Rat(1)));
        StatePoly b = *this;
        while (e > 0) {
            if (e & 1) acc *= b;
            if (e >>= 1) b *= b;
        }
        return acc;
    }

    StatePoly partial_derivative(int var) const {
        if (var < 0 || var >= nvars_) throw std::invalid_argument("StatePoly::partial_derivative: bad variable");
        StatePoly r(nvars_, param_arity_);
        for (const auto& [e, c] : terms_) {
            if (e[var] == 0) continue;
            ExpVec ne = e;
            ne[var] -= 1;
            r.add_term(ne, c * Rat(e[var]));
        }
        return r;
    }

    bool divisible_by_var(int var) const {
        for (const auto& [e, c] : terms_)
            if (e.at(var) < 1) return false;
        return true;
    }

    StatePoly div_var(int var) const {
        StatePoly r(nvars_, param_arity_);
        for (const auto& [e, c] : terms_) {
            if (e.at(var) < 1) throw std::domain_error("StatePoly::div_var: not divisible");
            ExpVec ne = e;
            ne[var] -= 1;
            r.terms_[ne] = c;
        }
        return r;
    }

    StatePoly mul_var_pow(int var, int power) const {
        if (power < 0) throw std::invalid_argument("StatePoly::mul_var_pow: negative power");
        StatePoly r(nvars_, param_arity_);
        for (const auto& [e, c] : terms_) {
            ExpVec ne = e;
            ne[var] += power;
            r.terms_[ne] = c;
        }
        return r;
    }

    // Full evaluation: parameter bindings plus a state point.
    Rat evaluate(const std::vector<Rat>& param_values, const std::vector<Rat>& point) const {
        if (static_cast<int>(point.size()) != nvars_)
            throw std::invalid_argument("StatePoly::evaluate: point arity mismatch");
        Rat acc(0);
        for (const auto& [e, c] : terms_) {
            Rat t = c.evaluate(param_values);
            for (int i = 0; i < nvars_; ++i)
                if (e[i] != 0) t *= rat_pow(point[i], e[i]);
            acc += t;
        }
        return acc;
    }

    // Binds every parameter, leaving a polynomial with constant coefficients.
    StatePoly bind_params(const std::vector<Rat>& param_values) const {
        StatePoly r(nvars_, 0);
        for (const auto& [e, c] : terms_) r.add_term(e, ParamPoly::constant(0, c.evaluate(param_values)));
        return r;
    }

    StatePoly substitute_param(int idx, const ParamPoly& value) const {
        StatePoly r(nvars_, param_arity_);
        for (const auto& [e, c] : terms_) r.add_term(e, c.substitute(idx, value));
        return r;
    }

    StatePoly map_coefficients(const std::function<ParamPoly(const ParamPoly&)>& f) const {
        StatePoly r(nvars_, param_arity_);
        for (const auto& [e, c] : terms_) r.add_term(e, f(c));
        return r;
    }

    // gcd-style content over all parameter coefficients, signed by the
    // grlex-leading state term.
    Rat content() const {
        if (terms_.empty()) return Rat(0);
        Rat g(0);
        for (const auto& [e, c] : terms_)
            for (const auto& [pe, pc] : c.terms()) g = rat_gcd(g, pc);
        if (terms_.rbegin()->second.content() < 0) g = -g;
        return g;
    }

    std::string to_string(const SymbolTable& table, const std::vector<std::string>& var_names) const {
        if (terms_.empty()) return "0";
        std::ostringstream out;
        bool first = true;
        for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
            if (!first) out << " + ";
            first = false;
            out << "(" << it->second.to_string(table) << ")";
            for (int i = 0; i < nvars_; ++i) {
                int p = it->first[i];
                if (p == 0) continue;
                out << "*" << var_names.at(i);
                if (p != 1) out << "^" << p;
            }
        }
        return out.str();
    }

private:
    void check_compat(const StatePoly& o) const {
        if (nvars_ != o.nvars_ || param_arity_ != o.param_arity_)
            throw std::invalid_argument("StatePoly: arity mismatch");
    }

    int nvars_;
    int param_arity_;
    TermMap terms_;
};

// Numerator / R^mu with mu minimal (numerator not divisible by R when
// mu > 0). Variable 0 of the numerator is R.
struct RationalInR {
    StatePoly num;
    int mu = 0;

    RationalInR() = default;
    RationalInR(StatePoly n, int m) : num(std::move(n)), mu(m) { normalize(); }

    void normalize() {
        if (num.is_zero()) {
            mu = 0;
            return;
        }
        while (mu > 0 && num.divisible_by_var(0)) {
            num = num.div_var(0);
            --mu;
        }
    }

    bool is_zero() const { return num.is_zero(); }

    RationalInR operator+(const RationalInR& o) const {
        int m = std::max(mu, o.mu);
        StatePoly a = num.mul_var_pow(0, m - mu);
        StatePoly b = o.num.mul_var_pow(0, m - o.mu);
        return RationalInR(a + b, m);
    }

    RationalInR operator-(const RationalInR& o) const {
        int m = std::max(mu, o.mu);
        StatePoly a = num.mul_var_pow(0, m - mu);
        StatePoly b = o.num.mul_var_pow(0, m - o.mu);
        return RationalInR(a - b, m);
    }

    RationalInR operator*(const RationalInR& o) const { return RationalInR(num * o.num, mu + o.mu); }

    // d/dR(N/R^mu) = (R*dN/dR - mu*N) / R^(mu+1)
    RationalInR derivative(int var) const {
        if (var == 0) {
            StatePoly n = num.partial_derivative(0).mul_var_pow(0, 1) - num * Rat(mu);
            return RationalInR(n, mu + 1);
        }
        return RationalInR(num.partial_derivative(var), mu);
    }

    bool operator==(const RationalInR& o) const {
        // compare after normalization over a common denominator
        int m = std::max(mu, o.mu);
        return num.mul_var_pow(0, m - mu) == o.num.mul_var_pow(0, m - o.mu);
    }
};

// Smallest mu >= 0 with R^mu * f a polynomial, plus that polynomial.
// Input mu may be non-minimal; common R factors are cancelled.
inline std::pair<int, StatePoly> clear_denominator(const RationalInR& f) {
    RationalInR g = f;
    g.normalize();
    return {g.mu, g.num};
}

}  // namespace zhopf
