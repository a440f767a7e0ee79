#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "zhopf/rat.hpp"
#include "zhopf/symbols.hpp"

namespace zhopf {

using ExpVec = std::vector<int>;

// Graded lexicographic order: total degree first, then lex. Also a valid
// strict weak order on Laurent exponent vectors.
struct GrlexLess {
    bool operator()(const ExpVec& a, const ExpVec& b) const {
        long da = std::accumulate(a.begin(), a.end(), 0L);
        long db = std::accumulate(b.begin(), b.end(), 0L);
        if (da != db) return da < db;
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
    }
};

// Sparse multivariate polynomial over Rat in the parameter symbols.
// Negative exponents are admitted on declared-nonzero symbols only, so
// quantities like 1/b and 1/beta^5 stay inside the ring; the guard lives in
// mul_symbol_pow. No zero coefficients are stored.
class ParamPoly {
public:
    using TermMap = std::map<ExpVec, Rat, GrlexLess>;

    ParamPoly() : arity_(0) {}
    explicit ParamPoly(int arity) : arity_(arity) {}

    static ParamPoly zero(int arity) { return ParamPoly(arity); }

    static ParamPoly constant(int arity, const Rat& c) {
        ParamPoly p(arity);
        if (c != 0) p.terms_[ExpVec(arity, 0)] = c;
        return p;
    }

    static ParamPoly symbol(int arity, int idx, int power = 1) {
        ParamPoly p(arity);
        ExpVec e(arity, 0);
        e.at(idx) = power;
        p.terms_[e] = Rat(1);
        return p;
    }

    static ParamPoly monomial(int arity, const ExpVec& e, const Rat& c) {
        if (static_cast<int>(e.size()) != arity) throw std::invalid_argument("ParamPoly: exponent arity mismatch");
        ParamPoly p(arity);
        if (c != 0) p.terms_[e] = c;
        return p;
    }

    int arity() const { return arity_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }
    const TermMap& terms() const { return terms_; }

    bool is_constant() const {
        if (terms_.empty()) return true;
        if (terms_.size() != 1) return false;
        const ExpVec& e = terms_.begin()->first;
        return std::all_of(e.begin(), e.end(), [](int x) { return x == 0; });
    }

    Rat constant_value() const {
        if (terms_.empty()) return Rat(0);
        if (!is_constant()) throw std::logic_error("ParamPoly: not a constant");
        return terms_.begin()->second;
    }

    // True when the polynomial is c * prod(sym^e): a unit of the Laurent ring.
    bool is_monomial() const { return terms_.size() == 1; }

    void add_term(const ExpVec& e, const Rat& c) {
        if (static_cast<int>(e.size()) != arity_) throw std::invalid_argument("ParamPoly: exponent arity mismatch");
        if (c == 0) return;
        auto it = terms_.find(e);
        if (it == terms_.end()) {
            terms_[e] = c;
        } else {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    ParamPoly& operator+=(const ParamPoly& o) {
        check_arity(o);
        for (const auto& [e, c] : o.terms_) add_term(e, c);
        return *this;
    }

    ParamPoly& operator-=(const ParamPoly& o) {
        check_arity(o);
        for (const auto& [e, c] : o.terms_) add_term(e, -c);
        return *this;
    }

    friend ParamPoly operator+(ParamPoly a, const ParamPoly& b) { return a += b; }
    friend ParamPoly operator-(ParamPoly a, const ParamPoly& b) { return a -= b; }

    ParamPoly operator-() const {
        ParamPoly r(arity_);
        for (const auto& [e, c] : terms_) r.terms_[e] = -c;
        return r;
    }

    friend ParamPoly operator*(const ParamPoly& a, const ParamPoly& b) {
        a.check_arity(b);
        ParamPoly r(a.arity_);
        for (const auto& [ea, ca] : a.terms_) {
            for (const auto& [eb, cb] : b.terms_) {
                ExpVec e(a.arity_);
                for (int i = 0; i < a.arity_; ++i) e[i] = ea[i] + eb[i];
                r.add_term(e, ca * cb);
            }
        }
        return r;
    }

    ParamPoly& operator*=(const ParamPoly& o) { return *this = *this * o; }

    ParamPoly& operator*=(const Rat& c) {
        if (c == 0) {
            terms_.clear();
            return *this;
        }
        for (auto& [e, v] : terms_) v *= c;
        return *this;
    }

    friend ParamPoly operator*(ParamPoly a, const Rat& c) { return a *= c; }
    friend ParamPoly operator*(const Rat& c, ParamPoly a) { return a *= c; }

    bool operator==(const ParamPoly& o) const { return arity_ == o.arity_ && terms_ == o.terms_; }
    bool operator!=(const ParamPoly& o) const { return !(*this == o); }

    ParamPoly pow(int e) const {
        if (e < 0) throw std::invalid_argument("ParamPoly::pow: negative exponent");
        ParamPoly acc = constant(arity_, Rat(1));
        ParamPoly b = *this;
        while (e > 0) {
            if (e & 1) acc *= b;
            if (e >>= 1) b *= b;
        }
        return acc;
    }

    // Multiplies by sym^power; power < 0 requires the symbol to be declared
    // nonzero (this is the only way negative exponents enter).
    ParamPoly mul_symbol_pow(const SymbolTable& table, int idx, int power) const {
        if (power < 0 && !table.nonzero(idx))
            throw std::domain_error("ParamPoly: division by symbol '" + table.name(idx) +
                                    "' not declared nonzero");
        ParamPoly r(arity_);
        for (const auto& [e, c] : terms_) {
            ExpVec ne = e;
            ne.at(idx) += power;
            r.terms_[ne] = c;
        }
        return r;
    }

    bool divisible_by_symbol(int idx) const {
        for (const auto& [e, c] : terms_)
            if (e.at(idx) < 1) return false;
        return true;
    }

    int min_exponent(int idx) const {
        if (terms_.empty()) return 0;
        int m = terms_.begin()->first.at(idx);
        for (const auto& [e, c] : terms_) m = std::min(m, e.at(idx));
        return m;
    }

    bool has_negative_exponents() const {
        for (const auto& [e, c] : terms_)
            for (int x : e)
                if (x < 0) return true;
        return false;
    }

    Rat evaluate(const std::vector<Rat>& values) const {
        if (static_cast<int>(values.size()) != arity_)
            throw std::invalid_argument("ParamPoly::evaluate: binding count mismatch");
        Rat acc(0);
        for (const auto& [e, c] : terms_) {
            Rat t = c;
            for (int i = 0; i < arity_; ++i) {
                if (e[i] == 0) continue;
                if (values[i] == 0 && e[i] < 0)
                    throw std::domain_error("ParamPoly::evaluate: zero value for inverted symbol");
                t *= rat_pow(values[i], e[i]);
            }
            acc += t;
        }
        return acc;
    }

    // Replaces symbol idx by a polynomial. Negative (Laurent) exponents are
    // admitted only when the substituted value is a nonzero constant.
    ParamPoly substitute(int idx, const ParamPoly& value) const {
        check_arity(value);
        ParamPoly r(arity_);
        for (const auto& [e, c] : terms_) {
            int p = e.at(idx);
            ExpVec base = e;
            base[idx] = 0;
            if (p >= 0) {
                r += ParamPoly::monomial(arity_, base, c) * value.pow(p);
            } else {
                if (!value.is_constant() || value.constant_value() == 0)
                    throw std::domain_error(
                        "ParamPoly::substitute: inverted symbol needs a nonzero constant value");
                r.add_term(base, c * rat_pow(value.constant_value(), p));
            }
        }
        return r;
    }

    // Signed content: gcd of coefficients carrying the sign of the grlex
    // leading term, so p / content(p) has positive leading coefficient.
    Rat content() const {
        if (terms_.empty()) return Rat(0);
        Rat g(0);
        for (const auto& [e, c] : terms_) g = rat_gcd(g, c);
        if (terms_.rbegin()->second < 0) g = -g;
        return g;
    }

    std::string to_string(const SymbolTable& table) const {
        if (terms_.empty()) return "0";
        std::ostringstream out;
        bool first = true;
        // grlex descending, leading term first
        for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
            const Rat& c = it->second;
            Rat ac = rat_abs(c);
            if (first) {
                if (c < 0) out << "-";
                first = false;
            } else {
                out << (c < 0 ? " - " : " + ");
            }
            bool have_vars = false;
            std::ostringstream vars;
            for (int i = 0; i < arity_; ++i) {
                int p = it->first[i];
                if (p == 0) continue;
                if (have_vars) vars << "*";
                vars << table.name(i);
                if (p != 1) vars << "^" << p;
                have_vars = true;
            }
            if (!have_vars) {
                out << rat_to_string(ac);
            } else if (ac == 1) {
                out << vars.str();
            } else {
                out << rat_to_string(ac) << "*" << vars.str();
            }
        }
        return out.str();
    }

private:
    void check_arity(const ParamPoly& o) const {
        if (arity_ != o.arity_) throw std::invalid_argument("ParamPoly: arity mismatch");
    }

    int arity_;
    TermMap terms_;
};

// Exact single-divisor long division in grlex order. Returns the quotient
// when den divides num exactly, nothing otherwise. Negative exponents may
// appear only on declared-nonzero symbols.
inline std::optional<ParamPoly> try_divide(const SymbolTable& table, const ParamPoly& num,
                                           const ParamPoly& den) {
    if (den.is_zero()) throw std::domain_error("try_divide: zero divisor");
    ParamPoly p = num;
    ParamPoly q(num.arity());
    const auto& dlead = *den.terms().rbegin();
    while (!p.is_zero()) {
        const auto& plead = *p.terms().rbegin();
        ExpVec e(p.arity());
        for (int i = 0; i < p.arity(); ++i) {
            e[i] = plead.first[i] - dlead.first[i];
            if (e[i] < 0 && !table.nonzero(i)) return std::nullopt;
        }
        ParamPoly t = ParamPoly::monomial(p.arity(), e, plead.second / dlead.second);
        q += t;
        p -= t * den;
        // degree must strictly drop in grlex for termination
        if (!p.is_zero() && !GrlexLess()(p.terms().rbegin()->first, plead.first))
            return std::nullopt;
    }
    return q;
}

}  // namespace zhopf
