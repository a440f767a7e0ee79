#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "zhopf/rat.hpp"

namespace zhopf {

enum class TrigKind { cos, sin };

// One basis element theta^d * cos(h*theta) or theta^d * sin(h*theta).
// Constants are cos with h = 0; sin with h = 0 is identically zero and never
// stored.
struct TrigKey {
    int theta_pow = 0;
    int harmonic = 0;
    TrigKind kind = TrigKind::cos;

    bool operator<(const TrigKey& o) const {
        if (theta_pow != o.theta_pow) return theta_pow < o.theta_pow;
        if (harmonic != o.harmonic) return harmonic < o.harmonic;
        return static_cast<int>(kind) < static_cast<int>(o.kind);
    }
    bool operator==(const TrigKey& o) const {
        return theta_pow == o.theta_pow && harmonic == o.harmonic && kind == o.kind;
    }
};

// Exact polynomial in pi; index = power of pi. Definite integrals over a full
// period produce these ((2*pi)^d factors from theta powers).
struct PiPoly {
    std::vector<Rat> coef;  // coef[j] multiplies pi^j

    static PiPoly zero() { return {}; }
    static PiPoly of(const Rat& c, int pi_pow = 0) {
        PiPoly p;
        if (c != 0) {
            p.coef.assign(pi_pow + 1, Rat(0));
            p.coef[pi_pow] = c;
        }
        return p;
    }

    void add(const Rat& c, int pi_pow) {
        if (c == 0) return;
        if (static_cast<int>(coef.size()) <= pi_pow) coef.resize(pi_pow + 1, Rat(0));
        coef[pi_pow] += c;
        trim();
    }

    void trim() {
        while (!coef.empty() && coef.back() == 0) coef.pop_back();
    }

    bool is_zero() const { return coef.empty(); }

    Rat rational_part() const { return coef.empty() ? Rat(0) : coef[0]; }
    Rat pi_part() const { return coef.size() > 1 ? coef[1] : Rat(0); }

    double to_double() const {
        double x = 0, p = 1;
        for (const Rat& c : coef) {
            x += c.get_d() * p;
            p *= M_PI;
        }
        return x;
    }

    bool operator==(const PiPoly& o) const { return coef == o.coef; }

    std::string to_string() const {
        if (coef.empty()) return "0";
        std::ostringstream out;
        bool first = true;
        for (std::size_t j = 0; j < coef.size(); ++j) {
            if (coef[j] == 0) continue;
            if (!first) out << " + ";
            first = false;
            out << rat_to_string(coef[j]);
            if (j == 1) out << "*pi";
            if (j > 1) out << "*pi^" << j;
        }
        return out.str();
    }
};

// Finite trig series with coefficients in a commutative ring C (Rat,
// ParamPoly or StatePoly). Canonical: one entry per key, no zero
// coefficients, no sin(0).
template <typename C>
class TrigSeries {
public:
    using TermMap = std::map<TrigKey, C>;

    TrigSeries() = default;
    explicit TrigSeries(C zero) : zero_(std::move(zero)) {}

    const C& zero_coeff() const { return zero_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }

    static TrigSeries constant(const C& c) {
        TrigSeries s(ring_zero(c));
        s.add_term({0, 0, TrigKind::cos}, c);
        return s;
    }

    void add_term(TrigKey k, const C& c) {
        if (k.harmonic < 0) {  // cos even, sin odd in the harmonic index
            k.harmonic = -k.harmonic;
            if (k.kind == TrigKind::sin) {
                add_term(k, neg(c));
                return;
            }
        }
        if (k.harmonic == 0 && k.kind == TrigKind::sin) return;
        if (is_ring_zero(c)) return;
        auto it = terms_.find(k);
        if (it == terms_.end()) {
            terms_.emplace(k, c);
        } else {
            it->second = add(it->second, c);
            if (is_ring_zero(it->second)) terms_.erase(it);
        }
    }

    TrigSeries& operator+=(const TrigSeries& o) {
        for (const auto& [k, c] : o.terms_) add_term(k, c);
        return *this;
    }
    TrigSeries& operator-=(const TrigSeries& o) {
        for (const auto& [k, c] : o.terms_) add_term(k, neg(c));
        return *this;
    }
    friend TrigSeries operator+(TrigSeries a, const TrigSeries& b) { return a += b; }
    friend TrigSeries operator-(TrigSeries a, const TrigSeries& b) { return a -= b; }

    TrigSeries operator-() const {
        TrigSeries r(zero_);
        for (const auto& [k, c] : terms_) r.terms_.emplace(k, neg(c));
        return r;
    }

    template <typename S>
    TrigSeries& scale(const S& s) {
        TrigSeries r(zero_);
        for (const auto& [k, c] : terms_) r.add_term(k, c * s);
        return *this = r;
    }

    // Product via the product-to-sum identities; closed on the basis.
    friend TrigSeries operator*(const TrigSeries& a, const TrigSeries& b) {
        TrigSeries r(a.zero_);
        Rat half(1, 2);
        for (const auto& [ka, ca] : a.terms_) {
            for (const auto& [kb, cb] : b.terms_) {
                C c = mul(ca, cb) * half;
                int d = ka.theta_pow + kb.theta_pow;
                int hs = ka.harmonic + kb.harmonic;
                int hd = ka.harmonic - kb.harmonic;
                if (ka.kind == TrigKind::cos && kb.kind == TrigKind::cos) {
                    // cos a cos b = (cos(a-b) + cos(a+b)) / 2
                    r.add_term({d, hd, TrigKind::cos}, c);
                    r.add_term({d, hs, TrigKind::cos}, c);
                } else if (ka.kind == TrigKind::sin && kb.kind == TrigKind::sin) {
                    // sin a sin b = (cos(a-b) - cos(a+b)) / 2
                    r.add_term({d, hd, TrigKind::cos}, c);
                    r.add_term({d, hs, TrigKind::cos}, neg(c));
                } else if (ka.kind == TrigKind::sin) {
                    // sin a cos b = (sin(a+b) + sin(a-b)) / 2
                    r.add_term({d, hs, TrigKind::sin}, c);
                    r.add_term({d, hd, TrigKind::sin}, c);
                } else {
                    // cos a sin b = (sin(a+b) - sin(a-b)) / 2
                    r.add_term({d, hs, TrigKind::sin}, c);
                    r.add_term({d, hd, TrigKind::sin}, neg(c));
                }
            }
        }
        return r;
    }

    TrigSeries& operator*=(const TrigSeries& o) { return *this = *this * o; }

    bool operator==(const TrigSeries& o) const { return terms_ == o.terms_; }
    bool operator!=(const TrigSeries& o) const { return !(*this == o); }

    // d/dtheta, term by term.
    TrigSeries differentiate() const {
        TrigSeries r(zero_);
        for (const auto& [k, c] : terms_) {
            if (k.theta_pow > 0)
                r.add_term({k.theta_pow - 1, k.harmonic, k.kind}, c * Rat(k.theta_pow));
            if (k.harmonic > 0) {
                if (k.kind == TrigKind::cos)
                    r.add_term({k.theta_pow, k.harmonic, TrigKind::sin}, c * Rat(-k.harmonic));
                else
                    r.add_term({k.theta_pow, k.harmonic, TrigKind::cos}, c * Rat(k.harmonic));
            }
        }
        return r;
    }

    // Antiderivative F with F(0) = 0. theta powers can grow by one (constant
    // terms and the by-parts recursion), harmonics are preserved.
    TrigSeries antiderivative() const {
        TrigSeries r(zero_);
        for (const auto& [k, c] : terms_) accumulate_antiderivative(r, k, c);
        // enforce F(0) = 0: subtract the theta^0 cos-terms' value at 0
        C at0 = r.value_at_zero();
        if (!is_ring_zero(at0)) r.add_term({0, 0, TrigKind::cos}, neg(at0));
        return r;
    }

    // Value at theta = 0 (only theta^0 cos terms contribute).
    C value_at_zero() const {
        C acc = zero_;
        for (const auto& [k, c] : terms_)
            if (k.theta_pow == 0 && k.kind == TrigKind::cos) acc = add(acc, c);
        return acc;
    }

    // Value at theta = 2*pi as a polynomial in pi over C:
    // theta^d cos(h theta) -> (2 pi)^d, theta^d sin -> 0.
    std::map<int, C> value_at_two_pi() const {
        std::map<int, C> out;  // pi power -> coefficient
        for (const auto& [k, c] : terms_) {
            if (k.kind == TrigKind::sin) continue;
            C scaled = c * rat_pow(Rat(2), k.theta_pow);
            auto it = out.find(k.theta_pow);
            if (it == out.end()) {
                out.emplace(k.theta_pow, scaled);
            } else {
                it->second = add(it->second, scaled);
                if (is_ring_zero(it->second)) out.erase(it);
            }
        }
        return out;
    }

    std::string to_string(const std::function<std::string(const C&)>& coeff_str) const {
        if (terms_.empty()) return "0";
        std::ostringstream out;
        bool first = true;
        for (const auto& [k, c] : terms_) {
            if (!first) out << " + ";
            first = false;
            out << "(" << coeff_str(c) << ")";
            if (k.theta_pow > 0) {
                out << "*theta";
                if (k.theta_pow > 1) out << "^" << k.theta_pow;
            }
            if (k.harmonic > 0)
                out << "*" << (k.kind == TrigKind::cos ? "cos" : "sin") << "(" << k.harmonic << "t)";
        }
        return out.str();
    }

private:
    static bool is_ring_zero(const C& c) {
        if constexpr (std::is_same_v<C, Rat>)
            return c == 0;
        else
            return c.is_zero();
    }
    static C ring_zero(const C& like) {
        if constexpr (std::is_same_v<C, Rat>)
            return Rat(0);
        else
            return like * Rat(0);
    }
    static C neg(const C& c) { return c * Rat(-1); }
    static C add(const C& a, const C& b) { return a + b; }
    static C mul(const C& a, const C& b) { return a * b; }

    // integral of c * theta^d * basis(h), appended to r (without the F(0)
    // normalization, which the caller applies once).
    // by parts: int theta^j cos = theta^j sin/h - (j/h) int theta^(j-1) sin
    //           int theta^j sin = -theta^j cos/h + (j/h) int theta^(j-1) cos
    static void accumulate_antiderivative(TrigSeries& r, const TrigKey& k, const C& c) {
        int h = k.harmonic;
        if (h == 0) {
            r.add_term({k.theta_pow + 1, 0, TrigKind::cos}, c * Rat(1, k.theta_pow + 1));
            return;
        }
        C coeff = c;
        TrigKind kind = k.kind;
        for (int j = k.theta_pow;; --j) {
            if (kind == TrigKind::cos) {
                r.add_term({j, h, TrigKind::sin}, coeff * Rat(1, h));
                if (j == 0) break;
                coeff = coeff * Rat(-j, h);
                kind = TrigKind::sin;
            } else {
                r.add_term({j, h, TrigKind::cos}, coeff * Rat(-1, h));
                if (j == 0) break;
                coeff = coeff * Rat(j, h);
                kind = TrigKind::cos;
            }
        }
    }

    C zero_;
    TermMap terms_;
};

// Exact Fourier form of cos^i(theta) * sin^j(theta).
inline TrigSeries<Rat> monomial_to_fourier(int i, int j) {
    if (i < 0 || j < 0) throw std::invalid_argument("monomial_to_fourier: negative power");
    TrigSeries<Rat> s = TrigSeries<Rat>::constant(Rat(1));
    TrigSeries<Rat> c1(Rat(0)), s1(Rat(0));
    c1.add_term({0, 1, TrigKind::cos}, Rat(1));
    s1.add_term({0, 1, TrigKind::sin}, Rat(1));
    for (int t = 0; t < i; ++t) s *= c1;
    for (int t = 0; t < j; ++t) s *= s1;
    return s;
}

// I_{i,j} = int_0^{2pi} cos^i sin^j dtheta: zero for odd i or j, otherwise
// 2*pi*(i-1)!!(j-1)!!/(i+j)!!.
inline PiPoly wallis(int i, int j) {
    if (i < 0 || j < 0) throw std::invalid_argument("wallis: negative power");
    if (i % 2 == 1 || j % 2 == 1) return PiPoly::zero();
    Rat v = make_rat(int_double_factorial(i - 1) * int_double_factorial(j - 1),
                     int_double_factorial(i + j));
    return PiPoly::of(2 * v, 1);
}

// int_0^{2pi} of a Rat-coefficient series, exactly, as a pi-polynomial.
inline PiPoly definite_integral_2pi(const TrigSeries<Rat>& s) {
    auto vals = s.antiderivative().value_at_two_pi();
    PiPoly out;
    for (const auto& [d, c] : vals) out.add(c, d);
    return out;
}

// Numeric evaluation for oracle tests.
inline double trig_eval(const TrigSeries<Rat>& s, double theta) {
    double acc = 0;
    for (const auto& [k, c] : s.terms()) {
        double t = c.get_d() * std::pow(theta, k.theta_pow);
        t *= (k.kind == TrigKind::cos) ? std::cos(k.harmonic * theta) : std::sin(k.harmonic * theta);
        acc += t;
    }
    return acc;
}

}  // namespace zhopf
