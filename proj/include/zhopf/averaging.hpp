#pragma once

#include <map>
#include <optional>
#include <vector>

#include "zhopf/perturbed_system.hpp"
#include "zhopf/trig.hpp"

namespace zhopf {

// Trig series over StatePoly numerators divided by R^mu. All terms share the
// denominator; normalization keeps mu minimal.
struct TrigRat {
    TrigSeries<StatePoly> num;
    int mu = 0;

    TrigRat() = default;
    TrigRat(TrigSeries<StatePoly> s, int m) : num(std::move(s)), mu(m) { normalize(); }

    bool is_zero() const { return num.is_zero(); }

    void normalize() {
        if (num.is_zero()) {
            mu = 0;
            return;
        }
        auto divisible = [&]() {
            for (const auto& [k, c] : num.terms())
                if (!c.divisible_by_var(0)) return false;
            return true;
        };
        while (mu > 0 && divisible()) {
            TrigSeries<StatePoly> nn(num.zero_coeff());
            for (const auto& [k, c] : num.terms()) nn.add_term(k, c.div_var(0));
            num = std::move(nn);
            --mu;
        }
    }

    TrigRat operator+(const TrigRat& o) const;
    TrigRat operator-(const TrigRat& o) const;
    TrigRat operator*(const TrigRat& o) const { return TrigRat(num * o.num, mu + o.mu); }

    // State-derivative with the R-quotient rule when var == 0.
    TrigRat derivative(int var) const;

    // Antiderivative in theta with value 0 at theta = 0 (mu untouched).
    TrigRat antiderivative() const { return TrigRat(num.antiderivative(), mu); }

    // Numeric evaluation at (theta, eta) with bound parameters.
    double eval(double theta, const std::vector<double>& eta,
                const std::vector<Rat>& param_values) const;
};

// Integrands F_{i,j} of the standard form, i = 1..k; component 0 is the
// R-equation, components 1..n-2 are X_3..X_n.
struct StandardForm {
    int n = 0, m = 0, k = 0;
    std::vector<std::vector<TrigRat>> F;  // F[i-1][component]

    int nvars() const { return n - 1; }
};

// One averaged component f_{i,j} = (sum_p pi^p N_p(eta)) / R^mu with mu
// minimal over the joint numerators.
struct AveragedComponent {
    int mu = 0;
    std::map<int, StatePoly> by_pi_power;

    bool is_zero() const { return by_pi_power.empty(); }

    // Single pi power and its cleared polynomial; errors on mixed powers.
    std::pair<int, StatePoly> single_pi_term() const;

    long total_degree() const {
        long d = -1;
        for (const auto& [p, poly] : by_pi_power) d = std::max(d, poly.total_degree());
        return d;
    }
};

struct AveragedSystem {
    int n = 0, m = 0, up_to = 0;
    std::vector<std::vector<AveragedComponent>> orders;  // [i-1][component]

    const AveragedComponent& component(int order, int comp) const {
        return orders.at(order - 1).at(comp);
    }
    bool order_vanishes(int order) const {
        for (const auto& c : orders.at(order - 1))
            if (!c.is_zero()) return false;
        return true;
    }
};

enum class Recursion { bell, tuples };

// Lemma-driven polar transform plus exact geometric eps-expansion. The
// denominator bR + sum eps^i S_{i,2} is expanded with the Delta auxiliary
// functions so denominators stay pure powers of bR.
StandardForm to_standard_form(const PerturbedSystem& sys);

// Averaged functions f_1..f_{up_to} through the integral recursion; the Bell
// regrouping is the production path, the raw tuple form is kept for
// cross-checking.
AveragedSystem averaged_functions(const PerturbedSystem& sys, const StandardForm& sf, int up_to,
                                  Recursion mode = Recursion::bell);

inline AveragedSystem averaged_functions(const PerturbedSystem& sys, int up_to,
                                         Recursion mode = Recursion::bell) {
    return averaged_functions(sys, to_standard_form(sys), up_to, mode);
}

// Intermediate integrands y_i(theta, z); exposed for the displacement tests.
std::vector<std::vector<TrigRat>> averaging_integrals(const PerturbedSystem& sys,
                                                      const StandardForm& sf, int up_to,
                                                      Recursion mode);

// Partial Bell polynomial B_{l,m}(x_1, ..., x_{l-m+1}) over any ring with
// +, * and Rat scaling.
template <typename C>
C bell_polynomial(int l, int m, const std::vector<C>& x);

// All tuples [b_1..b_q] >= 0 with sum j*b_j = l; when parts >= 0 the tuples
// are restricted to sum b_j = parts and q = l - parts + 1.
std::vector<std::vector<int>> partition_tuples(int l, int parts = -1);

// Solves the Rat-linear conditions making every coefficient of every
// first-order averaged component vanish identically, eliminating a subset of
// parameter symbols. Returns the substituted system and the substitutions.
struct VanishResult {
    PerturbedSystem system;
    std::vector<std::pair<int, ParamPoly>> substitutions;  // symbol -> value
};
VanishResult vanish_first_order(const PerturbedSystem& sys);

template <typename C>
C bell_polynomial(int l, int m, const std::vector<C>& x) {
    if (l < 1 || m < 1 || m > l) throw std::invalid_argument("bell_polynomial: need 1 <= m <= l");
    if (static_cast<int>(x.size()) < l - m + 1)
        throw std::invalid_argument("bell_polynomial: too few arguments");
    C acc = x[0] * Rat(0);
    for (const auto& tuple : partition_tuples(l, m)) {
        Rat coeff(int_factorial(l));
        std::optional<C> term;
        for (std::size_t j = 0; j < tuple.size(); ++j) {
            if (tuple[j] == 0) continue;
            coeff /= Rat(int_factorial(tuple[j]));
            coeff /= rat_pow(Rat(int_factorial(static_cast<long>(j) + 1)), tuple[j]);
            for (int rep = 0; rep < tuple[j]; ++rep)
                term = term ? *term * x[j] : x[j];
        }
        if (term) acc = acc + *term * coeff;
    }
    return acc;
}

}  // namespace zhopf
