#pragma once

// Shared builders and oracles for the test suites.

#include <random>
#include <string>
#include <vector>

#include "zhopf/averaging.hpp"
#include "zhopf/io.hpp"

namespace zhopf::testing {

// Multi-indices (i1..in) with sum m.
inline std::vector<ExpVec> multi_indices(int n, int m) {
    std::vector<ExpVec> out;
    ExpVec cur(n, 0);
    std::function<void(int, int)> rec = [&](int pos, int left) {
        if (pos == n - 1) {
            cur[pos] = left;
            out.push_back(cur);
            return;
        }
        for (int v = 0; v <= left; ++v) {
            cur[pos] = v;
            rec(pos + 1, left - v);
        }
    };
    rec(0, m);
    return out;
}

// Fully generic symbolic system in the diagonal/rotational template: one
// fresh symbol per coefficient.
inline PerturbedSystem generic_symbolic_system(int n, int m, int k) {
    SymbolTable table;
    table.add("b", true);
    for (int j = 1; j <= k; ++j) table.add("a" + std::to_string(j));
    for (int j = 1; j <= k; ++j) table.add("bb" + std::to_string(j));
    for (int s = 3; s <= n; ++s)
        for (int j = 1; j <= k; ++j) table.add("c" + std::to_string(s) + "_" + std::to_string(j));
    auto idxs = multi_indices(n, m);
    for (int s = 1; s <= n; ++s)
        for (const auto& idx : idxs)
            for (int j = 0; j <= k - 1; ++j) {
                std::string nm = "p" + std::to_string(s);
                for (int e : idx) nm += "_" + std::to_string(e);
                nm += "__" + std::to_string(j);
                table.add(nm);
            }

    const int A = table.size();
    PerturbedSystem sys(n, m, k, table, ParamPoly::symbol(A, 0));
    const SymbolTable& t = sys.symbols();
    for (int j = 1; j <= k; ++j) sys.set_a(j, ParamPoly::symbol(A, t.require("a" + std::to_string(j))));
    for (int j = 1; j <= k; ++j) sys.set_bj(j, ParamPoly::symbol(A, t.require("bb" + std::to_string(j))));
    for (int s = 3; s <= n; ++s)
        for (int j = 1; j <= k; ++j)
            sys.set_c(s, j, ParamPoly::symbol(A, t.require("c" + std::to_string(s) + "_" + std::to_string(j))));
    for (int s = 1; s <= n; ++s)
        for (const auto& idx : idxs)
            for (int j = 0; j <= k - 1; ++j) {
                std::string nm = "p" + std::to_string(s);
                for (int e : idx) nm += "_" + std::to_string(e);
                nm += "__" + std::to_string(j);
                sys.add_p(s, idx, j, ParamPoly::symbol(A, t.require(nm)));
            }
    return sys;
}

// Random numeric system (all coefficients bound rationals, empty table).
inline PerturbedSystem random_numeric_system(int n, int m, int k, std::mt19937_64& rng,
                                             bool sparse = false) {
    std::uniform_int_distribution<int> num(-4, 4);
    std::uniform_int_distribution<int> den(1, 3);
    std::uniform_int_distribution<int> coin(0, 2);
    auto rnd = [&]() { return ParamPoly::constant(0, make_rat(num(rng), den(rng))); };
    SymbolTable table;
    std::uniform_int_distribution<int> bpick(1, 3);
    PerturbedSystem sys(n, m, k, table, ParamPoly::constant(0, Rat(bpick(rng))));
    for (int j = 1; j <= k; ++j) {
        sys.set_a(j, rnd());
        sys.set_bj(j, rnd());
        for (int s = 3; s <= n; ++s) sys.set_c(s, j, rnd());
    }
    for (int s = 1; s <= n; ++s)
        for (const auto& idx : multi_indices(n, m))
            for (int j = 0; j <= k - 1; ++j) {
                if (sparse && coin(rng) != 0) continue;
                sys.add_p(s, idx, j, rnd());
            }
    return sys;
}

// The cubic-equation case study written down directly from its displayed
// quadratic coefficient lists (the preset derives the same system
// mechanically; the tests compare both).
inline PerturbedSystem cubic_case_study_manual(int k = 2) {
    SymbolTable table;
    table.add("beta", true);
    for (const char* s : {"alpha1", "alpha2", "mu1", "mu2"}) table.add(s);
    for (int i = 1; i <= 6; ++i)
        for (int j = 0; j <= 2; ++j) table.add("a" + std::to_string(i) + std::to_string(j));

    const int A = table.size();
    PerturbedSystem sys(3, 2, k, table, ParamPoly::symbol(A, 0));
    const SymbolTable& t = sys.symbols();
    auto P = [&](const std::string& s) { return parse_param_poly(t, s); };

    sys.set_a(1, P("alpha1"));
    sys.set_c(3, 1, P("mu1"));
    if (k >= 2) {
        sys.set_a(2, P("alpha2"));
        sys.set_c(3, 2, P("mu2"));
    }

    struct Q {
        ExpVec idx;
        std::string g0, g1;
    };
    const std::vector<Q> quads = {
        {{2, 0, 0}, "(beta^4*a60 - beta^2*a30 + a10)/beta^4",
         "(a61*beta^5 - a50*mu1*beta^3 - a31*beta^3 + a20*mu1*beta + a11*beta)/beta^5"},
        {{1, 1, 0}, "(beta^3*a50 - beta*a20)/beta^4",
         "(2*a60*mu1*beta^4 + 2*a60*alpha1*beta^4 + a51*beta^4 - 2*a30*mu1*beta^2 - 2*mu1*a40*beta^2 "
         "- a21*beta^2 + 2*mu1*a10 - 2*alpha1*a10)/beta^5"},
        {{1, 0, 1}, "(beta^2*a30 - 2*a10)/beta^4",
         "(a50*mu1*beta^3 + a31*beta^3 - 2*a20*mu1*beta - 2*a11*beta)/beta^5"},
        {{0, 2, 0}, "beta^2*a40/beta^4",
         "(a50*mu1*beta^3 + a50*alpha1*beta^3 + a41*beta^3 - a20*mu1*beta + alpha1*a20*beta)/beta^5"},
        {{0, 1, 1}, "beta*a20/beta^4",
         "(a30*mu1*beta^2 + a30*alpha1*beta^2 + 2*mu1*a40*beta^2 + a21*beta^2 - 2*mu1*a10 + "
         "2*alpha1*a10)/beta^5"},
        {{0, 0, 2}, "a10/beta^4", "(a20*mu1*beta + a11*beta)/beta^5"},
    };
    for (const auto& q : quads) {
        sys.add_p(1, q.idx, 0, P(q.g0));
        sys.add_p(3, q.idx, 0, P(q.g0));
        if (k >= 2) {
            sys.add_p(1, q.idx, 1, P(q.g1));
            sys.add_p(3, q.idx, 1, P(q.g1));
        }
    }
    return sys;
}

// Vanishing substitution used by the second-order analysis of the cubic
// case study.
inline std::vector<std::pair<int, ParamPoly>> cubic_vanishing_substitution(
    const PerturbedSystem& sys) {
    const SymbolTable& t = sys.symbols();
    const int A = t.size();
    auto zero = ParamPoly::zero(A);
    return {
        {t.require("alpha1"), zero},
        {t.require("mu1"), zero},
        {t.require("a30"), zero},
        {t.require("a10"), zero},
        {t.require("a40"), parse_param_poly(t, "-beta^2*a60")},
    };
}

// Exact evaluation of a theta-free trig series at a rational point
// (cos, sin) on the unit circle, via the Chebyshev-style recurrences.
inline Rat eval_on_circle(const TrigSeries<StatePoly>& s, const Rat& c0, const Rat& s0,
                          const std::vector<Rat>& params, const std::vector<Rat>& pt) {
    int hmax = 0;
    for (const auto& [k, v] : s.terms()) {
        if (k.theta_pow != 0) throw std::logic_error("eval_on_circle: theta power present");
        hmax = std::max(hmax, k.harmonic);
    }
    std::vector<Rat> ch(hmax + 1), sh(hmax + 1);
    ch[0] = Rat(1);
    sh[0] = Rat(0);
    if (hmax >= 1) {
        ch[1] = c0;
        sh[1] = s0;
    }
    for (int h = 2; h <= hmax; ++h) {
        ch[h] = 2 * c0 * ch[h - 1] - ch[h - 2];
        sh[h] = 2 * c0 * sh[h - 1] - sh[h - 2];
    }
    Rat acc(0);
    for (const auto& [k, v] : s.terms()) {
        Rat trig = (k.kind == TrigKind::cos) ? ch[k.harmonic] : sh[k.harmonic];
        acc += v.evaluate(params, pt) * trig;
    }
    return acc;
}

inline Rat eval_on_circle(const TrigRat& f, const Rat& c0, const Rat& s0,
                          const std::vector<Rat>& params, const std::vector<Rat>& pt) {
    return eval_on_circle(f.num, c0, s0, params, pt) / rat_pow(pt.at(0), f.mu);
}

}  // namespace zhopf::testing
