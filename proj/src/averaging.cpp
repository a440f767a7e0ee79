#include "zhopf/averaging.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <tuple>

namespace zhopf {

TrigRat TrigRat::operator+(const TrigRat& o) const {
    int m = std::max(mu, o.mu);
    auto lift = [&](const TrigRat& t, int target) {
        TrigSeries<StatePoly> s = t.num;
        if (target > t.mu) {
            TrigSeries<StatePoly> out(s.zero_coeff());
            for (const auto& [k, c] : s.terms()) out.add_term(k, c.mul_var_pow(0, target - t.mu));
            return out;
        }
        return s;
    };
    TrigSeries<StatePoly> a = lift(*this, m);
    TrigSeries<StatePoly> b = lift(o, m);
    return TrigRat(a + b, m);
}

TrigRat TrigRat::operator-(const TrigRat& o) const {
    TrigRat neg = o;
    neg.num = -neg.num;
    return *this + neg;
}

TrigRat TrigRat::derivative(int var) const {
    TrigSeries<StatePoly> out(num.zero_coeff());
    if (var == 0) {
        // d/dR (c / R^mu) = (R c_R - mu c) / R^(mu+1)
        for (const auto& [k, c] : num.terms())
            out.add_term(k, c.partial_derivative(0).mul_var_pow(0, 1) - c * Rat(mu));
        return TrigRat(out, mu + 1);
    }
    for (const auto& [k, c] : num.terms()) out.add_term(k, c.partial_derivative(var));
    return TrigRat(out, mu);
}

double TrigRat::eval(double theta, const std::vector<double>& eta,
                     const std::vector<Rat>& param_values) const {
    double acc = 0;
    for (const auto& [k, c] : num.terms()) {
        double coeff = 0;
        for (const auto& [e, pc] : c.terms()) {
            double t = pc.evaluate(param_values).get_d();
            for (std::size_t i = 0; i < eta.size(); ++i)
                if (e[i] != 0) t *= std::pow(eta[i], e[i]);
            coeff += t;
        }
        double trig = (k.kind == TrigKind::cos) ? std::cos(k.harmonic * theta)
                                                : std::sin(k.harmonic * theta);
        acc += coeff * std::pow(theta, k.theta_pow) * trig;
    }
    return acc / std::pow(eta[0], mu);
}

std::pair<int, StatePoly> AveragedComponent::single_pi_term() const {
    if (by_pi_power.empty()) return {0, StatePoly()};
    if (by_pi_power.size() != 1)
        throw std::domain_error(
            "AveragedComponent: mixed pi powers (lower-order averaged functions do not vanish)");
    return *by_pi_power.begin();
}

std::vector<std::vector<int>> partition_tuples(int l, int parts) {
    int q = parts < 0 ? l : l - parts + 1;
    std::vector<std::vector<int>> out;
    std::vector<int> cur(q, 0);
    // choose b_j for j = 1..q with sum j*b_j = l (and sum b_j = parts if set)
    std::function<void(int, int, int)> rec = [&](int j, int weight_left, int count_left) {
        if (j == q) {
            if (weight_left == 0 && (parts < 0 || count_left == 0)) out.push_back(cur);
            return;
        }
        int step = j + 1;
        int max_b = weight_left / step;
        if (parts >= 0) max_b = std::min(max_b, count_left);
        for (int b = 0; b <= max_b; ++b) {
            cur[j] = b;
            rec(j + 1, weight_left - b * step, parts < 0 ? -1 : count_left - b);
        }
        cur[j] = 0;
    };
    rec(0, l, parts);
    return out;
}

namespace {

// lifts a Rat trig series into StatePoly coefficients scaled by c * monom
TrigSeries<StatePoly> lift_series(const TrigSeries<Rat>& s, const StatePoly& scale) {
    TrigSeries<StatePoly> out(scale * Rat(0));
    for (const auto& [k, c] : s.terms()) out.add_term(k, scale * c);
    return out;
}

struct PolarBuilder {
    const PerturbedSystem& sys;
    int nv;        // n - 1 state variables
    int arity;

    StatePoly zero_state() const { return StatePoly::zero(nv, arity); }

    TrigSeries<StatePoly> zero_series() const { return TrigSeries<StatePoly>(zero_state()); }

    // polar image of coordinate t (0-based): x1 -> R cos, x2 -> R sin,
    // x_s -> X_s (state var s-2).
    TrigSeries<StatePoly> coordinate(int t) const {
        TrigSeries<StatePoly> s = zero_series();
        if (t == 0) {
            s.add_term({0, 1, TrigKind::cos}, StatePoly::variable(nv, arity, 0));
        } else if (t == 1) {
            s.add_term({0, 1, TrigKind::sin}, StatePoly::variable(nv, arity, 0));
        } else {
            s.add_term({0, 0, TrigKind::cos}, StatePoly::variable(nv, arity, t - 1));
        }
        return s;
    }

    // (L x)_row in polar coordinates for the order-j linear matrix.
    TrigSeries<StatePoly> linear_row(int j, int row) const {
        TrigSeries<StatePoly> acc = zero_series();
        const auto& L = sys.linear(j);
        for (int t = 0; t < sys.n(); ++t) {
            if (L[row][t].is_zero()) continue;
            TrigSeries<StatePoly> c = coordinate(t);
            c.scale(StatePoly::constant(nv, L[row][t]));
            acc += c;
        }
        return acc;
    }

    // P^{(j)}_row in polar coordinates: sum over multi-indices of
    // p * cos^{i1} sin^{i2} R^{i1+i2} X^{i3..}.
    TrigSeries<StatePoly> homogeneous_row(int j, int row) const {
        TrigSeries<StatePoly> acc = zero_series();
        for (const auto& [idx, coeffs] : sys.homogeneous(j)) {
            const ParamPoly& p = coeffs[row];
            if (p.is_zero()) continue;
            ExpVec st(nv, 0);
            st[0] = idx[0] + idx[1];
            for (int s = 2; s < sys.n(); ++s) st[s - 1] = idx[s];
            StatePoly scale = StatePoly::monomial(nv, st, p);
            acc += lift_series(monomial_to_fourier(idx[0], idx[1]), scale);
        }
        return acc;
    }

    TrigSeries<StatePoly> times_cos(const TrigSeries<StatePoly>& s) const {
        TrigSeries<StatePoly> c = zero_series();
        c.add_term({0, 1, TrigKind::cos}, StatePoly::constant(nv, ParamPoly::constant(arity, Rat(1))));
        return s * c;
    }
    TrigSeries<StatePoly> times_sin(const TrigSeries<StatePoly>& s) const {
        TrigSeries<StatePoly> c = zero_series();
        c.add_term({0, 1, TrigKind::sin}, StatePoly::constant(nv, ParamPoly::constant(arity, Rat(1))));
        return s * c;
    }
};

}  // namespace

StandardForm to_standard_form(const PerturbedSystem& sys) {
    const int k = sys.k();
    const int n = sys.n();
    const int nv = sys.nvars();
    PolarBuilder pb{sys, nv, sys.arity()};

    // S[i-1][0] = radial numerator, S[i-1][1] = angular numerator,
    // S[i-1][s-1] = X_s numerators (s = 3..n).
    std::vector<std::vector<TrigSeries<StatePoly>>> S(
        k, std::vector<TrigSeries<StatePoly>>(n, pb.zero_series()));
    for (int i = 1; i <= k; ++i) {
        TrigSeries<StatePoly> row1 = pb.linear_row(i, 0) + pb.homogeneous_row(i - 1, 0);
        TrigSeries<StatePoly> row2 = pb.linear_row(i, 1) + pb.homogeneous_row(i - 1, 1);
        S[i - 1][0] = pb.times_cos(row1) + pb.times_sin(row2);
        S[i - 1][1] = pb.times_cos(row2) - pb.times_sin(row1);
        for (int s = 3; s <= n; ++s)
            S[i - 1][s - 1] = pb.linear_row(i, s - 1) + pb.homogeneous_row(i - 1, s - 1);
    }

    ParamPoly binv = sys.frequency_inverse();
    StatePoly binv_state = StatePoly::constant(nv, binv);

    // composition sums T_h(w) = sum_{i1+...+ih = w} prod S_{it,2}
    // Delta_{h*} = sum_h (-1/b)^h T_h(h*) / R^h, common denominator R^{h*}
    std::vector<std::vector<TrigSeries<StatePoly>>> T(k);  // T[h-1][w-1]
    for (int h = 1; h < k; ++h) {
        T[h - 1].assign(k - 1, pb.zero_series());
        for (int w = 1; w <= k - 1; ++w) {
            if (h == 1) {
                if (w <= k) T[0][w - 1] = S[w - 1][1];
                continue;
            }
            TrigSeries<StatePoly> acc = pb.zero_series();
            for (int i = 1; i <= w - h + 1; ++i) acc += S[i - 1][1] * T[h - 2][w - i - 1];
            T[h - 1][w - 1] = acc;
        }
    }
    std::vector<TrigRat> delta(k);  // delta[h*], h* = 1..k-1
    for (int hs = 1; hs <= k - 1; ++hs) {
        TrigSeries<StatePoly> acc = pb.zero_series();
        for (int h = 1; h <= hs; ++h) {
            TrigSeries<StatePoly> t = T[h - 1][hs - 1];
            StatePoly scale = binv_state.pow(h) * rat_pow(Rat(-1), h);
            scale = scale.mul_var_pow(0, hs - h);  // lift to denominator R^{hs}
            t.scale(scale);
            acc += t;
        }
        delta[hs] = TrigRat(acc, hs);
    }

    StandardForm sf;
    sf.n = n;
    sf.m = sys.m();
    sf.k = k;
    sf.F.assign(k, std::vector<TrigRat>(nv));
    for (int i = 1; i <= k; ++i) {
        for (int comp = 0; comp < nv; ++comp) {
            int row = comp == 0 ? 0 : comp + 1;  // skip the angular slot
            TrigRat acc(S[i - 1][row], 0);
            for (int hs = 1; hs <= i - 1; ++hs) {
                TrigSeries<StatePoly> base = S[i - hs - 1][row];
                acc = acc + TrigRat(base, 0) * delta[hs];
            }
            TrigSeries<StatePoly> scaled(pb.zero_state());
            for (const auto& [key, c] : acc.num.terms()) scaled.add_term(key, c * binv);
            sf.F[i - 1][comp] = TrigRat(scaled, acc.mu);
        }
    }
    return sf;
}

std::vector<std::vector<TrigRat>> averaging_integrals(const PerturbedSystem& sys,
                                                      const StandardForm& sf, int up_to,
                                                      Recursion mode) {
    if (up_to < 1 || up_to > sf.k)
        throw std::invalid_argument("averaging_integrals: order out of range");
    const int nv = sf.nvars();

    // mixed state partials of F[i][comp], memoized by sorted variable list
    std::map<std::tuple<int, int, std::vector<int>>, TrigRat> partial_cache;
    std::function<const TrigRat&(int, int, const std::vector<int>&)> partial =
        [&](int order, int comp, const std::vector<int>& sorted_vars) -> const TrigRat& {
        auto key = std::make_tuple(order, comp, sorted_vars);
        auto it = partial_cache.find(key);
        if (it != partial_cache.end()) return it->second;
        if (sorted_vars.empty()) return partial_cache.emplace(key, sf.F[order - 1][comp]).first->second;
        std::vector<int> prefix(sorted_vars.begin(), sorted_vars.end() - 1);
        TrigRat d = partial(order, comp, prefix).derivative(sorted_vars.back());
        return partial_cache.emplace(key, std::move(d)).first->second;
    };

    std::vector<std::vector<TrigRat>> y(up_to + 1);
    for (int i = 1; i <= up_to; ++i) {
        std::vector<TrigRat> integrand = sf.F[i - 1];
        for (int l = 1; l <= i - 1; ++l) {
            // both recursion forms enumerate tuples b with sum j*b_j = l;
            // the Bell route groups them by L = sum b_j exactly as the
            // partial Bell polynomial does.
            std::vector<std::vector<int>> tuples;
            if (mode == Recursion::bell) {
                for (int mm = 1; mm <= l; ++mm)
                    for (auto& t : partition_tuples(l, mm)) tuples.push_back(std::move(t));
            } else {
                tuples = partition_tuples(l);
            }
            for (const auto& tup : tuples) {
                int L = 0;
                Rat coeff(1);
                for (std::size_t j = 0; j < tup.size(); ++j) {
                    L += tup[j];
                    if (tup[j] == 0) continue;
                    coeff /= Rat(int_factorial(tup[j]));
                    coeff /= rat_pow(Rat(int_factorial(static_cast<long>(j) + 1)), tup[j]);
                }
                if (L == 0) continue;
                // ordered slots: y_1 repeated b_1 times, then y_2, ...
                std::vector<int> slot_order;
                for (std::size_t j = 0; j < tup.size(); ++j)
                    for (int r = 0; r < tup[j]; ++r) slot_order.push_back(static_cast<int>(j) + 1);

                // iterate over all index tuples (i_1..i_L) in [0, nv)
                std::vector<int> idx(L, 0);
                while (true) {
                    std::vector<int> sorted = idx;
                    std::sort(sorted.begin(), sorted.end());
                    for (int comp = 0; comp < nv; ++comp) {
                        const TrigRat& d = partial(i - l, comp, sorted);
                        if (!d.is_zero()) {
                            TrigRat prod = d;
                            for (int t = 0; t < L; ++t) prod = prod * y[slot_order[t]][idx[t]];
                            prod.num.scale(coeff);
                            integrand[comp] = integrand[comp] + prod;
                        }
                    }
                    int pos = L - 1;
                    while (pos >= 0 && idx[pos] == nv - 1) idx[pos--] = 0;
                    if (pos < 0) break;
                    ++idx[pos];
                }
            }
        }
        y[i].resize(nv);
        Rat fact(int_factorial(i));
        for (int comp = 0; comp < nv; ++comp) {
            TrigRat a = integrand[comp].antiderivative();
            a.num.scale(fact);
            a.normalize();
            y[i][comp] = std::move(a);
        }
    }
    y.erase(y.begin());  // drop unused slot 0
    return y;
}

AveragedSystem averaged_functions(const PerturbedSystem& sys, const StandardForm& sf, int up_to,
                                  Recursion mode) {
    auto y = averaging_integrals(sys, sf, up_to, mode);
    AveragedSystem out;
    out.n = sf.n;
    out.m = sf.m;
    out.up_to = up_to;
    out.orders.assign(up_to, std::vector<AveragedComponent>(sf.nvars()));
    for (int i = 1; i <= up_to; ++i) {
        Rat inv_fact = Rat(1) / Rat(int_factorial(i));
        for (int comp = 0; comp < sf.nvars(); ++comp) {
            const TrigRat& yi = y[i - 1][comp];
            AveragedComponent c;
            c.mu = yi.mu;
            for (auto& [pi_pow, poly] : yi.num.value_at_two_pi()) {
                StatePoly v = poly * inv_fact;
                if (!v.is_zero()) c.by_pi_power.emplace(pi_pow, std::move(v));
            }
            // joint minimal denominator over all pi powers
            auto divisible = [&]() {
                for (const auto& [p, poly] : c.by_pi_power)
                    if (!poly.divisible_by_var(0)) return false;
                return !c.by_pi_power.empty();
            };
            while (c.mu > 0 && divisible()) {
                for (auto& [p, poly] : c.by_pi_power) poly = poly.div_var(0);
                --c.mu;
            }
            if (c.by_pi_power.empty()) c.mu = 0;
            out.orders[i - 1][comp] = std::move(c);
        }
    }
    return out;
}

VanishResult vanish_first_order(const PerturbedSystem& sys) {
    if (sys.k() < 2) throw std::invalid_argument("vanish_first_order: needs k >= 2");
    AveragedSystem first = averaged_functions(sys, 1);

    // collect the linear conditions: each state-monomial coefficient of each
    // component, multiplied through by b to clear the 1/b factor
    std::vector<ParamPoly> conditions;
    for (const auto& comp : first.orders[0]) {
        for (const auto& [pi_pow, poly] : comp.by_pi_power)
            for (const auto& [e, c] : poly.terms()) conditions.push_back(c * sys.frequency());
    }

    const int arity = sys.arity();
    std::vector<std::vector<Rat>> rows;  // coefficients per symbol + none constant
    for (const ParamPoly& c : conditions) {
        std::vector<Rat> row(arity, Rat(0));
        for (const auto& [e, v] : c.terms()) {
            int which = -1;
            long total = 0;
            for (int i = 0; i < arity; ++i) {
                if (e[i] < 0) throw std::domain_error("vanish_first_order: conditions are not linear over Q");
                total += e[i];
                if (e[i] == 1) which = i;
            }
            if (total != 1)
                throw std::domain_error("vanish_first_order: conditions are not linear over Q");
            row[which] += v;
        }
        rows.push_back(std::move(row));
    }

    // RREF over Q; pivot on the first nonzero column of each row
    std::size_t rank = 0;
    std::vector<int> pivot_col;
    for (int col = 0; col < arity && rank < rows.size(); ++col) {
        std::size_t sel = rank;
        while (sel < rows.size() && rows[sel][col] == 0) ++sel;
        if (sel == rows.size()) continue;
        std::swap(rows[rank], rows[sel]);
        Rat inv = Rat(1) / rows[rank][col];
        for (int j = 0; j < arity; ++j) rows[rank][j] *= inv;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r == rank || rows[r][col] == 0) continue;
            Rat f = rows[r][col];
            for (int j = 0; j < arity; ++j) rows[r][j] -= f * rows[rank][j];
        }
        pivot_col.push_back(col);
        ++rank;
    }

    std::vector<std::pair<int, ParamPoly>> subs;
    for (std::size_t r = 0; r < rank; ++r) {
        int pc = pivot_col[r];
        ParamPoly value = ParamPoly::zero(arity);
        for (int j = pc + 1; j < arity; ++j)
            if (rows[r][j] != 0) value += ParamPoly::symbol(arity, j) * (-rows[r][j]);
        subs.emplace_back(pc, value);
    }

    VanishResult out{sys.substituted(subs), subs};
    // the substituted system must now average to zero at first order
    AveragedSystem check = averaged_functions(out.system, 1);
    if (!check.order_vanishes(1))
        throw std::logic_error("vanish_first_order: substitution failed to annihilate first order");
    return out;
}

}  // namespace zhopf
