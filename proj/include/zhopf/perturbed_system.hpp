#pragma once

#include <map>
#include <stdexcept>
#include <vector>

#include "zhopf/statepoly.hpp"

namespace zhopf {

// Perturbed polynomial system with a complete zero-Hopf equilibrium at the
// origin: rotation with frequency b in the (x1, x2) plane at order eps^0,
// plus eps^j linear perturbations L_j (j = 1..k) and homogeneous degree-m
// terms whose coefficients carry eps^j (j = 0..k-1).
//
//   dx/dt = A0 x + sum_j eps^j L_j x + sum_j eps^j P^{(j)}(x),
//
// with A0 the block rotation and P^{(j)} homogeneous of degree m. The shape
// itself guarantees a vanishing eps^0 average (no unperturbed drift beyond
// the rotation is representable).
class PerturbedSystem {
public:
    PerturbedSystem(int n, int m, int k, SymbolTable symbols, ParamPoly b_freq)
        : n_(n), m_(m), k_(k), symbols_(std::move(symbols)), b_(std::move(b_freq)) {
        if (n < 3) throw std::invalid_argument("PerturbedSystem: n >= 3 required");
        if (m < 2) throw std::invalid_argument("PerturbedSystem: m >= 2 required");
        if (k < 1) throw std::invalid_argument("PerturbedSystem: k >= 1 required");
        if (!is_invertible(b_)) throw std::domain_error("PerturbedSystem: frequency b must be a nonzero constant or a declared-nonzero monomial");
        linear_.assign(k, std::vector<std::vector<ParamPoly>>(
                              n, std::vector<ParamPoly>(n, ParamPoly::zero(arity()))));
        hom_.resize(k);
    }

    int n() const { return n_; }
    int m() const { return m_; }
    int k() const { return k_; }
    int nvars() const { return n_ - 1; }
    int arity() const { return symbols_.size(); }
    const SymbolTable& symbols() const { return symbols_; }
    SymbolTable& symbols() { return symbols_; }
    const ParamPoly& frequency() const { return b_; }

    // Inverse of the frequency inside the Laurent ring.
    ParamPoly frequency_inverse() const { return invert_monomial(b_); }

    // eps^j * L_j[row][col] * x_col, 1 <= j <= k.
    void add_linear(int j, int row, int col, const ParamPoly& c) {
        check_order(j, 1, k_);
        linear_[j - 1].at(row).at(col) += c;
    }

    // Template sugar matching the diagonal/rotational linear perturbation:
    // rows 1,2 get a_j on the diagonal and -+ b_j off-diagonal, row s gets
    // c_{s,j} x_s.
    void set_a(int j, const ParamPoly& c) {
        add_linear(j, 0, 0, c);
        add_linear(j, 1, 1, c);
    }
    void set_bj(int j, const ParamPoly& c) {
        add_linear(j, 1, 0, c);
        add_linear(j, 0, 1, c * Rat(-1));
    }
    void set_c(int s, int j, const ParamPoly& c) {
        if (s < 3 || s > n_) throw std::invalid_argument("PerturbedSystem::set_c: s out of range");
        add_linear(j, s - 1, s - 1, c);
    }

    // Homogeneous coefficient p_{s, (i1..in), j}, degree sum exactly m,
    // 1 <= s <= n, 0 <= j <= k-1.
    void add_p(int s, const ExpVec& idx, int j, const ParamPoly& c) {
        check_order(j, 0, k_ - 1);
        if (s < 1 || s > n_) throw std::invalid_argument("PerturbedSystem::add_p: s out of range");
        if (static_cast<int>(idx.size()) != n_) throw std::invalid_argument("PerturbedSystem::add_p: index arity");
        long sum = 0;
        for (int e : idx) {
            if (e < 0) throw std::invalid_argument("PerturbedSystem::add_p: negative index");
            sum += e;
        }
        if (sum != m_) throw std::invalid_argument("PerturbedSystem::add_p: multi-index sum != m");
        auto& slot = hom_[j][idx];
        if (slot.empty()) slot.assign(n_, ParamPoly::zero(arity()));
        slot[s - 1] += c;
        if (c.arity() != arity()) throw std::invalid_argument("PerturbedSystem::add_p: coefficient arity");
    }

    const std::vector<std::vector<ParamPoly>>& linear(int j) const {
        check_order(j, 1, k_);
        return linear_[j - 1];
    }

    const std::map<ExpVec, std::vector<ParamPoly>>& homogeneous(int j) const {
        check_order(j, 0, k_ - 1);
        return hom_[j];
    }

    // Applies symbol -> polynomial substitutions to every coefficient
    // (including the frequency, which must stay invertible).
    PerturbedSystem substituted(const std::vector<std::pair<int, ParamPoly>>& subs) const {
        PerturbedSystem out(n_, m_, k_, symbols_, apply_subs(b_, subs));
        for (int j = 1; j <= k_; ++j)
            for (int r = 0; r < n_; ++r)
                for (int c = 0; c < n_; ++c) out.linear_[j - 1][r][c] = apply_subs(linear_[j - 1][r][c], subs);
        for (int j = 0; j < k_; ++j)
            for (const auto& [idx, coeffs] : hom_[j])
                for (int s = 1; s <= n_; ++s) {
                    ParamPoly c = apply_subs(coeffs[s - 1], subs);
                    if (!c.is_zero()) out.add_p(s, idx, j, c);
                }
        return out;
    }

    static bool is_invertible(const ParamPoly& p) { return p.is_monomial(); }

    ParamPoly invert_monomial(const ParamPoly& p) const {
        if (!p.is_monomial()) throw std::domain_error("PerturbedSystem: cannot invert non-monomial");
        const auto& [e, c] = *p.terms().begin();
        ExpVec inv(e.size());
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (e[i] != 0 && !symbols_.nonzero(static_cast<int>(i)))
                throw std::domain_error("PerturbedSystem: inverting symbol not declared nonzero");
            inv[i] = -e[i];
        }
        return ParamPoly::monomial(p.arity(), inv, Rat(1) / c);
    }

private:
    void check_order(int j, int lo, int hi) const {
        if (j < lo || j > hi) throw std::invalid_argument("PerturbedSystem: perturbation order out of range");
    }

    ParamPoly apply_subs(ParamPoly p, const std::vector<std::pair<int, ParamPoly>>& subs) const {
        for (const auto& [idx, val] : subs) p = p.substitute(idx, val);
        return p;
    }

    int n_, m_, k_;
    SymbolTable symbols_;
    ParamPoly b_;
    std::vector<std::vector<std::vector<ParamPoly>>> linear_;   // [j-1][row][col]
    std::vector<std::map<ExpVec, std::vector<ParamPoly>>> hom_; // [j][multi-index][s-1]
};

}  // namespace zhopf
