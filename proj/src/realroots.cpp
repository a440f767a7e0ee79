#include "zhopf/realroots.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <random>
#include <sstream>

#include "zhopf/io.hpp"

namespace zhopf {

// ---------------------------------------------------------------------------
// univariate exact polynomials

UPoly upoly_normalize(UPoly p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
    return p;
}

int upoly_degree(const UPoly& p) { return static_cast<int>(p.size()) - 1; }

UPoly upoly_derivative(const UPoly& p) {
    UPoly d;
    for (std::size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * Rat(static_cast<long>(i)));
    return upoly_normalize(std::move(d));
}

Rat upoly_eval(const UPoly& p, const Rat& x) {
    Rat acc(0);
    for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
    return acc;
}

namespace {

UPoly upoly_primitive(UPoly p) {
    Rat c(0);
    for (const Rat& q : p) c = rat_gcd(c, q);
    if (c == 0 || c == 1) return p;
    for (Rat& q : p) q /= c;
    return p;
}

// remainder of a by b over Q[x]
UPoly upoly_rem(UPoly a, const UPoly& b) {
    a = upoly_normalize(std::move(a));
    if (b.empty()) throw std::domain_error("upoly_rem: zero divisor");
    while (upoly_degree(a) >= upoly_degree(b) && !a.empty()) {
        Rat f = a.back() / b.back();
        int shift = upoly_degree(a) - upoly_degree(b);
        for (std::size_t i = 0; i < b.size(); ++i) a[i + shift] -= f * b[i];
        a = upoly_normalize(std::move(a));
    }
    return a;
}

std::vector<UPoly> sturm_chain(const UPoly& p) {
    std::vector<UPoly> chain;
    chain.push_back(upoly_primitive(upoly_normalize(p)));
    if (chain[0].empty()) return chain;
    chain.push_back(upoly_primitive(upoly_derivative(chain[0])));
    while (!chain.back().empty() && upoly_degree(chain.back()) >= 0) {
        if (upoly_degree(chain.back()) == 0) break;
        UPoly r = upoly_rem(chain[chain.size() - 2], chain.back());
        if (r.empty()) break;
        for (Rat& q : r) q = -q;
        chain.push_back(upoly_primitive(std::move(r)));
    }
    return chain;
}

long sign_variations(const std::vector<UPoly>& chain, const Rat& x) {
    long v = 0;
    int prev = 0;
    for (const UPoly& p : chain) {
        if (p.empty()) continue;
        int s = rat_sign(upoly_eval(p, x));
        if (s == 0) continue;
        if (prev != 0 && s != prev) ++v;
        prev = s;
    }
    return v;
}

long sturm_count_chain(const std::vector<UPoly>& chain, const Rat& lo, const Rat& hi) {
    return sign_variations(chain, lo) - sign_variations(chain, hi);
}

}  // namespace

long sturm_count(const UPoly& p, const Rat& lo, const Rat& hi) {
    auto chain = sturm_chain(p);
    return sturm_count_chain(chain, lo, hi);
}

std::vector<RatInterval> isolate_univariate(const UPoly& p_in, const Rat& lo_in, const Rat& hi_in) {
    UPoly p = upoly_normalize(p_in);
    if (p.empty()) throw std::invalid_argument("isolate_univariate: zero polynomial");
    std::vector<RatInterval> out;
    Rat lo = lo_in, hi = hi_in;

    // peel off roots sitting exactly at the endpoints
    auto deflate_at = [&](const Rat& x) {
        while (!p.empty() && upoly_eval(p, x) == 0) {
            // synthetic division by (t - x)
            UPoly q(p.size() - 1);
            Rat carry = p.back();
            for (int i = static_cast<int>(p.size()) - 2; i >= 0; --i) {
                q[i] = carry;
                carry = p[i] + carry * x;
            }
            p = upoly_normalize(std::move(q));
            out.push_back({x, x});
        }
    };
    deflate_at(lo);
    deflate_at(hi);
    // dedupe endpoint roots recorded twice via multiplicities
    std::sort(out.begin(), out.end(), [](const RatInterval& a, const RatInterval& b) { return a.lo < b.lo; });
    out.erase(std::unique(out.begin(), out.end(),
                          [](const RatInterval& a, const RatInterval& b) { return a.lo == b.lo && a.hi == b.hi; }),
              out.end());

    if (p.empty() || upoly_degree(p) == 0) return out;
    auto chain = sturm_chain(p);

    std::function<void(Rat, Rat)> split = [&](Rat a, Rat b) {
        long c = sturm_count_chain(chain, a, b);
        if (c == 0) return;
        if (c == 1) {
            out.push_back({a, b});
            return;
        }
        Rat m = (a + b) / 2;
        if (upoly_eval(p, m) == 0) {
            out.push_back({m, m});
            // exclude an exact neighborhood of m before recursing
            Rat eps = (b - a) / 1000000;
            while (sturm_count_chain(chain, m - eps, m + eps) > 1) eps /= 16;
            split(a, m - eps);
            split(m + eps, b);
            return;
        }
        split(a, m);
        split(m, b);
    };
    split(lo, hi);
    std::sort(out.begin(), out.end(), [](const RatInterval& a, const RatInterval& b) { return a.lo < b.lo; });
    return out;
}

RatInterval refine_root(const UPoly& p_in, RatInterval iv, const Rat& max_width) {
    UPoly p = upoly_normalize(p_in);
    if (iv.width() == 0) return iv;
    auto chain = sturm_chain(p);
    while (iv.width() > max_width) {
        Rat m = iv.mid();
        if (upoly_eval(p, m) == 0) return {m, m};
        if (sturm_count_chain(chain, iv.lo, m) == 1)
            iv.hi = m;
        else
            iv.lo = m;
    }
    return iv;
}

// ---------------------------------------------------------------------------
// bivariate elimination (subresultant pseudo-remainder sequence)

namespace {

UPoly upoly_add(const UPoly& a, const UPoly& b) {
    UPoly r(std::max(a.size(), b.size()), Rat(0));
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    return upoly_normalize(std::move(r));
}

UPoly upoly_mul(const UPoly& a, const UPoly& b) {
    if (a.empty() || b.empty()) return {};
    UPoly r(a.size() + b.size() - 1, Rat(0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return upoly_normalize(std::move(r));
}

UPoly upoly_neg(UPoly a) {
    for (Rat& q : a) q = -q;
    return a;
}

// exact division; throws when not divisible
UPoly upoly_div_exact(UPoly a, const UPoly& b) {
    a = upoly_normalize(std::move(a));
    if (b.empty()) throw std::domain_error("upoly_div_exact: zero divisor");
    if (a.empty()) return {};
    if (upoly_degree(a) < upoly_degree(b)) throw std::logic_error("upoly_div_exact: not divisible");
    UPoly q(a.size() - b.size() + 1, Rat(0));
    while (!a.empty() && upoly_degree(a) >= upoly_degree(b)) {
        Rat f = a.back() / b.back();
        int shift = upoly_degree(a) - upoly_degree(b);
        q[shift] = f;
        for (std::size_t i = 0; i < b.size(); ++i) a[i + shift] -= f * b[i];
        a = upoly_normalize(std::move(a));
    }
    if (!a.empty()) throw std::logic_error("upoly_div_exact: remainder");
    return upoly_normalize(std::move(q));
}

UPoly upoly_pow(const UPoly& a, int e) {
    UPoly acc = {Rat(1)};
    for (int i = 0; i < e; ++i) acc = upoly_mul(acc, a);
    return acc;
}

BPoly bpoly_normalize(BPoly p) {
    for (auto& c : p) c = upoly_normalize(std::move(c));
    while (!p.empty() && p.back().empty()) p.pop_back();
    return p;
}

int bpoly_degree(const BPoly& p) { return static_cast<int>(p.size()) - 1; }

bool bpoly_zero(const BPoly& p) { return p.empty(); }

BPoly bpoly_scale(const BPoly& p, const UPoly& s) {
    BPoly r;
    for (const auto& c : p) r.push_back(upoly_mul(c, s));
    return bpoly_normalize(std::move(r));
}

BPoly bpoly_sub(const BPoly& a, const BPoly& b) {
    BPoly r(std::max(a.size(), b.size()));
    for (std::size_t i = 0; i < r.size(); ++i) {
        UPoly x = i < a.size() ? a[i] : UPoly{};
        UPoly y = i < b.size() ? upoly_neg(b[i]) : UPoly{};
        r[i] = upoly_add(x, y);
    }
    return bpoly_normalize(std::move(r));
}

// pseudo-remainder: lc(B)^(deg A - deg B + 1) A  mod  B. The scale factor is
// applied exactly delta+1 times even when the degree drops faster, which the
// subresultant divisions rely on.
BPoly bpoly_prem(BPoly A, const BPoly& B) {
    int db = bpoly_degree(B);
    const UPoly& lcb = B.back();
    A = bpoly_normalize(std::move(A));
    int steps = bpoly_degree(A) - db + 1;
    int applied = 0;
    while (applied < steps && !bpoly_zero(A) && bpoly_degree(A) >= db) {
        UPoly lca = A.back();
        int shift = bpoly_degree(A) - db;
        BPoly scaled = bpoly_scale(A, lcb);
        // subtract lca * y^shift * B
        BPoly sub(shift + B.size());
        for (std::size_t i = 0; i < B.size(); ++i) sub[i + shift] = upoly_mul(lca, B[i]);
        A = bpoly_sub(scaled, bpoly_normalize(std::move(sub)));
        ++applied;
    }
    for (; applied < steps; ++applied) A = bpoly_scale(A, lcb);
    return A;
}

BPoly bpoly_div_exact(const BPoly& a, const UPoly& d) {
    BPoly r;
    for (const auto& c : a) r.push_back(c.empty() ? UPoly{} : upoly_div_exact(c, d));
    return bpoly_normalize(std::move(r));
}

}  // namespace

BPoly to_bpoly(const StatePoly& p, int var_x, int var_y) {
    if (p.param_arity() != 0) throw std::invalid_argument("to_bpoly: parameters must be bound");
    BPoly out;
    for (const auto& [e, c] : p.terms()) {
        for (std::size_t i = 0; i < e.size(); ++i)
            if (static_cast<int>(i) != var_x && static_cast<int>(i) != var_y && e[i] != 0)
                throw std::invalid_argument("to_bpoly: polynomial involves other variables");
        int dy = e[var_y], dx = e[var_x];
        if (static_cast<int>(out.size()) <= dy) out.resize(dy + 1);
        UPoly& slot = out[dy];
        if (static_cast<int>(slot.size()) <= dx) slot.resize(dx + 1, Rat(0));
        slot[dx] += c.constant_value();
    }
    return bpoly_normalize(std::move(out));
}

UPoly eliminate(const BPoly& f_in, const BPoly& g_in) {
    BPoly A = bpoly_normalize(f_in), B = bpoly_normalize(g_in);
    if (bpoly_zero(A) || bpoly_zero(B)) return {};
    if (bpoly_degree(A) < bpoly_degree(B)) std::swap(A, B);
    if (bpoly_degree(B) == 0) return upoly_pow(B[0], std::max(bpoly_degree(A), 0));
    UPoly g = {Rat(1)}, h = {Rat(1)};
    while (true) {
        int delta = bpoly_degree(A) - bpoly_degree(B);
        BPoly R = bpoly_prem(A, B);
        if (bpoly_zero(R)) return {};  // common factor: resultant identically zero
        A = B;
        B = bpoly_div_exact(R, upoly_mul(g, upoly_pow(h, delta)));
        g = A.back();
        // h = h^(1-delta) g^delta
        if (delta > 0) {
            UPoly num = upoly_pow(g, delta);
            h = (delta == 1) ? num : upoly_div_exact(num, upoly_pow(h, delta - 1));
        }
        if (bpoly_degree(B) <= 0) {
            if (bpoly_zero(B)) return {};
            int da = bpoly_degree(A);
            // resultant = lc(B)^deg(A) / h^(deg(A)-1)
            UPoly num = upoly_pow(B[0], da);
            return (da <= 1) ? num : upoly_div_exact(num, upoly_pow(h, da - 1));
        }
    }
}

// ---------------------------------------------------------------------------
// interval evaluation

namespace {

struct CompiledPoly {
    struct Term {
        Iv c;
        double cd;
        ExpVec e;
    };
    int nvars = 0;
    std::vector<Term> terms;

    static CompiledPoly from(const StatePoly& p) {
        CompiledPoly out;
        out.nvars = p.nvars();
        for (const auto& [e, c] : p.terms()) {
            Rat v = c.constant_value();
            out.terms.push_back({Iv::from_rat(v), v.get_d(), e});
        }
        return out;
    }

    Iv eval(const std::vector<Iv>& x) const {
        Iv acc(0.0);
        for (const auto& t : terms) {
            Iv term = t.c;
            for (int i = 0; i < nvars; ++i)
                if (t.e[i] != 0) term = term * x[i].pow(t.e[i]);
            acc = acc + term;
        }
        return acc;
    }

    double eval_d(const std::vector<double>& x) const {
        double acc = 0;
        for (const auto& t : terms) {
            double term = t.cd;
            for (int i = 0; i < nvars; ++i)
                for (int k = 0; k < t.e[i]; ++k) term *= x[i];
            acc += term;
        }
        return acc;
    }
};

struct KrawczykSystem {
    int d = 0;
    std::vector<CompiledPoly> F;
    std::vector<std::vector<CompiledPoly>> J;

    static KrawczykSystem from(const std::vector<StatePoly>& fs) {
        KrawczykSystem sys;
        sys.d = static_cast<int>(fs.size());
        for (const auto& f : fs) {
            if (f.nvars() != sys.d)
                throw std::invalid_argument("KrawczykSystem: non-square system");
            sys.F.push_back(CompiledPoly::from(f));
            std::vector<CompiledPoly> row;
            for (int v = 0; v < sys.d; ++v) row.push_back(CompiledPoly::from(f.partial_derivative(v)));
            sys.J.push_back(std::move(row));
        }
        return sys;
    }
};

enum class KStatus { certified, empty, undecided };

// double-precision inverse via Gauss elimination; empty on singularity
std::vector<std::vector<double>> approx_inverse(std::vector<std::vector<double>> m) {
    const int n = static_cast<int>(m.size());
    std::vector<std::vector<double>> inv(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) inv[i][i] = 1.0;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
        if (m[piv][col] == 0 || !std::isfinite(m[piv][col])) return {};
        std::swap(m[piv], m[col]);
        std::swap(inv[piv], inv[col]);
        double f = m[col][col];
        for (int c = 0; c < n; ++c) {
            m[col][c] /= f;
            inv[col][c] /= f;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col || m[r][col] == 0) continue;
            double g = m[r][col];
            for (int c = 0; c < n; ++c) {
                m[r][c] -= g * m[col][c];
                inv[r][c] -= g * inv[col][c];
            }
        }
    }
    return inv;
}

// One Krawczyk step: contracts X in place when possible. Exclusion combines
// the naive enclosure with the mean-value form F(m) + J(X)(X - m); the
// latter avoids the catastrophic dependency blowup of near-cancelling
// polynomials on wide boxes.
KStatus krawczyk_step(const KrawczykSystem& sys, std::vector<Iv>& X) {
    const int d = sys.d;
    for (int i = 0; i < d; ++i)
        if (!sys.F[i].eval(X).contains_zero()) return KStatus::empty;

    std::vector<double> m(d);
    for (int i = 0; i < d; ++i) m[i] = X[i].mid();

    std::vector<Iv> mi(d), Fm(d);
    for (int i = 0; i < d; ++i) mi[i] = Iv(m[i]);
    for (int i = 0; i < d; ++i) Fm[i] = sys.F[i].eval(mi);

    std::vector<std::vector<Iv>> JX(d, std::vector<Iv>(d));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) JX[i][j] = sys.J[i][j].eval(X);

    for (int i = 0; i < d; ++i) {
        Iv centered = Fm[i];
        for (int j = 0; j < d; ++j) centered = centered + JX[i][j] * (X[j] - mi[j]);
        if (!centered.contains_zero()) return KStatus::empty;
    }

    std::vector<std::vector<double>> Jm(d, std::vector<double>(d));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) Jm[i][j] = sys.J[i][j].eval_d(m);
    auto Y = approx_inverse(Jm);
    if (Y.empty()) return KStatus::undecided;

    // K = m - Y F(m) + (I - Y J(X)) (X - m)

    std::vector<Iv> K(d);
    bool inside = true;
    for (int i = 0; i < d; ++i) {
        Iv acc(m[i]);
        for (int j = 0; j < d; ++j) acc = acc - Iv(Y[i][j]) * Fm[j];
        // (I - Y J(X)) row i times (X - m)
        for (int j = 0; j < d; ++j) {
            Iv hij = (i == j) ? Iv(1.0) : Iv(0.0);
            for (int k = 0; k < d; ++k) hij = hij - Iv(Y[i][k]) * JX[k][j];
            acc = acc + hij * (X[j] - Iv(m[j]));
        }
        K[i] = acc;
    }
    for (int i = 0; i < d; ++i)
        if (!(K[i].lo > X[i].lo && K[i].hi < X[i].hi)) inside = false;

    // empty intersection proves no root
    for (int i = 0; i < d; ++i)
        if (!K[i].intersects(X[i])) return KStatus::empty;
    for (int i = 0; i < d; ++i) X[i] = K[i].intersect(X[i]);
    return inside ? KStatus::certified : KStatus::undecided;
}

}  // namespace

// ---------------------------------------------------------------------------
// counting

std::vector<std::pair<Rat, Rat>> SemiAlgSystem::default_box(int nvars) {
    std::vector<std::pair<Rat, Rat>> box;
    box.emplace_back(make_rat(1, 1000000), Rat(1000));  // R
    for (int i = 1; i < nvars; ++i) box.emplace_back(Rat(-1000), Rat(1000));
    return box;
}

namespace {

struct CertBuilder {
    const SemiAlgSystem& sys;
    const KrawczykSystem& ksys;
    CompiledPoly jac_det;
    std::vector<CompiledPoly> nonvan;

    CertBuilder(const SemiAlgSystem& s, const KrawczykSystem& k)
        : sys(s), ksys(k), jac_det(CompiledPoly::from(jacobian_det_poly(s.equations))) {
        for (const auto& nv : s.nonvanishing) nonvan.push_back(CompiledPoly::from(nv));
    }

    // refine a certified box to a tight enclosure
    std::vector<Iv> tighten(std::vector<Iv> X) const {
        for (int it = 0; it < 60; ++it) {
            double w = 0;
            for (const auto& x : X) w = std::max(w, x.width());
            if (w < 1e-12) break;
            std::vector<Iv> prev = X;
            if (krawczyk_step(ksys, X) == KStatus::empty) break;
            double shrink = 0;
            for (std::size_t i = 0; i < X.size(); ++i)
                shrink = std::max(shrink, X[i].width() / std::max(prev[i].width(), 1e-300));
            if (shrink > 0.9) break;
        }
        return X;
    }

    // returns std::nullopt when a side condition fails or cannot be resolved
    std::optional<RootCertificate> build(const std::vector<Iv>& Xt, bool& resolved) const {
        resolved = true;
        RootCertificate cert;
        for (const auto& x : Xt) {
            cert.box.emplace_back(Rat(x.lo), Rat(x.hi));
            cert.midpoint.push_back(x.mid());
        }
        // positivity: enforced through the search box; flag near-wall roots
        for (int v : sys.positive_vars)
            if (Xt[v].lo < sys.box[v].first.get_d() + 1e-9) cert.boundary_suspect = true;
        // nonvanishing constraints must resolve a sign over the box
        for (const auto& nv : nonvan) {
            Iv val = nv.eval(Xt);
            if (val.contains_zero()) {
                resolved = false;
                return std::nullopt;
            }
        }
        Iv dj = jac_det.eval(Xt);
        if (dj.contains_zero()) {
            resolved = false;
            return std::nullopt;
        }
        cert.jacobian_sign = dj.lo > 0 ? 1 : -1;
        cert.multiplicity_one = true;
        return cert;
    }
};

bool boxes_intersect(const std::vector<Iv>& a, const std::vector<Iv>& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!a[i].intersects(b[i])) return false;
    return true;
}

}  // namespace

StatePoly jacobian_det_poly(const std::vector<StatePoly>& fs) {
    const int d = static_cast<int>(fs.size());
    if (d == 0) throw std::invalid_argument("jacobian_det_poly: empty system");
    for (const auto& f : fs)
        if (f.nvars() != d) throw std::invalid_argument("jacobian_det_poly: non-square system");
    std::vector<std::vector<StatePoly>> J(d, std::vector<StatePoly>(d));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) J[i][j] = fs[i].partial_derivative(j);
    // Laplace expansion; d <= 4 in practice
    std::function<StatePoly(std::vector<int>, std::vector<int>)> det =
        [&](std::vector<int> rows, std::vector<int> cols) -> StatePoly {
        if (rows.size() == 1) return J[rows[0]][cols[0]];
        StatePoly acc = StatePoly::zero(d, fs[0].param_arity());
        for (std::size_t k = 0; k < cols.size(); ++k) {
            std::vector<int> rrows(rows.begin() + 1, rows.end());
            std::vector<int> rcols;
            for (std::size_t j = 0; j < cols.size(); ++j)
                if (j != k) rcols.push_back(cols[j]);
            StatePoly minor = det(rrows, rcols);
            StatePoly term = J[rows[0]][cols[k]] * minor;
            acc += (k % 2 == 0) ? term : -term;
        }
        return acc;
    };
    std::vector<int> idx(d);
    for (int i = 0; i < d; ++i) idx[i] = i;
    return det(idx, idx);
}

JacobianDet jacobian_det(const std::vector<AveragedComponent>& fs) {
    const int d = static_cast<int>(fs.size());
    if (d == 0) throw std::invalid_argument("jacobian_det: empty system");
    int pi_power = 0;
    std::vector<RationalInR> f(d);
    for (int i = 0; i < d; ++i) {
        auto [p, poly] = fs[i].single_pi_term();
        pi_power += p;
        f[i] = RationalInR(poly, fs[i].mu);
    }
    std::vector<std::vector<RationalInR>> J(d, std::vector<RationalInR>(d));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) J[i][j] = f[i].derivative(j);
    std::function<RationalInR(std::vector<int>, std::vector<int>)> det =
        [&](std::vector<int> rows, std::vector<int> cols) -> RationalInR {
        if (rows.size() == 1) return J[rows[0]][cols[0]];
        RationalInR acc;
        acc.num = StatePoly::zero(f[0].num.nvars(), f[0].num.param_arity());
        for (std::size_t k = 0; k < cols.size(); ++k) {
            std::vector<int> rrows(rows.begin() + 1, rows.end());
            std::vector<int> rcols;
            for (std::size_t j = 0; j < cols.size(); ++j)
                if (j != k) rcols.push_back(cols[j]);
            RationalInR term = J[rows[0]][cols[k]] * det(rrows, rcols);
            if (k % 2 == 1) term.num = -term.num;
            acc = acc + term;
        }
        return acc;
    };
    std::vector<int> idx(d);
    for (int i = 0; i < d; ++i) idx[i] = i;
    RationalInR D = det(idx, idx);
    D.normalize();
    JacobianDet out;
    out.num = D.num;
    out.mu = D.mu;
    out.pi_power = pi_power;
    return out;
}

CountResult count_box(const SemiAlgSystem& sys, long max_boxes) {
    const int d = sys.nvars();
    if (d > 4) throw std::invalid_argument("count_box: more than 4 variables unsupported");
    if (static_cast<int>(sys.equations.size()) != d)
        throw std::invalid_argument("count_box: equation/variable count mismatch");
    KrawczykSystem ksys = KrawczykSystem::from(sys.equations);
    CertBuilder cb(sys, ksys);

    std::vector<Iv> root(d);
    for (int i = 0; i < d; ++i) {
        Rat lo = sys.box[i].first, hi = sys.box[i].second;
        for (int v : sys.positive_vars)
            if (v == i && lo <= 0) lo = make_rat(1, 1000000);
        root[i] = Iv(lo.get_d(), hi.get_d());
    }

    CountResult result;
    std::vector<std::vector<Iv>> enclosures;
    std::deque<std::vector<Iv>> work{root};
    long processed = 0;
    while (!work.empty()) {
        if (++processed > max_boxes) {
            result.complete = false;
            result.undecided_boxes += static_cast<long>(work.size());
            break;
        }
        std::vector<Iv> X = work.front();
        work.pop_front();

        bool excluded = false;
        for (int i = 0; i < d && !excluded; ++i)
            if (!ksys.F[i].eval(X).contains_zero()) excluded = true;
        if (excluded) continue;

        std::vector<Iv> Xk = X;
        KStatus st = KStatus::undecided;
        try {
            st = krawczyk_step(ksys, Xk);
        } catch (const std::domain_error&) {
            st = KStatus::empty;  // empty intersection during contraction
        }
        if (st == KStatus::empty) continue;

        // roots sitting exactly on a bisection plane never end up strictly
        // inside a sub-box; retry small undecided boxes after inflation
        if (st == KStatus::undecided) {
            double w = 0;
            for (const auto& x : Xk) w = std::max(w, x.width());
            if (w < 1e-7) {
                std::vector<Iv> infl(d);
                for (int i = 0; i < d; ++i) {
                    double pad = 8 * w + 1e-12;
                    infl[i] = Iv(std::max(Xk[i].lo - pad, root[i].lo),
                                 std::min(Xk[i].hi + pad, root[i].hi));
                }
                try {
                    if (krawczyk_step(ksys, infl) == KStatus::certified) {
                        st = KStatus::certified;
                        Xk = infl;
                    }
                } catch (const std::domain_error&) {
                }
            }
        }
        if (st == KStatus::certified) {
            std::vector<Iv> tight = cb.tighten(Xk);
            bool dup = false;
            for (const auto& e : enclosures)
                if (boxes_intersect(e, tight)) dup = true;
            if (!dup) {
                enclosures.push_back(tight);
                bool resolved = true;
                auto cert = cb.build(tight, resolved);
                if (cert) {
                    result.certificates.push_back(*cert);
                } else if (!resolved) {
                    result.complete = false;
                    ++result.undecided_boxes;
                }
                // side condition failed with a resolved sign: root excluded
            }
            continue;
        }

        double w = 0;
        int axis = 0;
        double wrel = 0;
        for (int i = 0; i < d; ++i) {
            if (Xk[i].width() > w) {
                w = Xk[i].width();
                axis = i;
            }
            wrel = std::max(wrel, Xk[i].width() / std::max(1.0, std::abs(Xk[i].mid())));
        }
        if (wrel < 1e-12) {
            result.complete = false;
            ++result.undecided_boxes;
            continue;
        }
        double m = Xk[axis].mid();
        std::vector<Iv> L = Xk, R = Xk;
        L[axis] = Iv(Xk[axis].lo, m);
        R[axis] = Iv(m, Xk[axis].hi);
        work.push_back(L);
        work.push_back(R);
    }
    result.count = static_cast<long>(result.certificates.size());
    return result;
}

CountResult count_bivariate(const SemiAlgSystem& sys) {
    if (sys.nvars() != 2 || sys.equations.size() != 2)
        throw std::invalid_argument("count_bivariate: needs 2 equations in 2 variables");

    BPoly f = to_bpoly(sys.equations[0], 0, 1);
    BPoly g = to_bpoly(sys.equations[1], 0, 1);
    // degenerate shapes go straight to the subdivision solver
    if (bpoly_degree(f) < 1 || bpoly_degree(g) < 1) return count_box(sys);

    UPoly elim_r = eliminate(f, g);  // roots cover solution R-coordinates
    BPoly fx = to_bpoly(sys.equations[0], 1, 0);
    BPoly gx = to_bpoly(sys.equations[1], 1, 0);
    UPoly elim_x = (bpoly_degree(fx) < 1 || bpoly_degree(gx) < 1) ? UPoly{} : eliminate(fx, gx);

    if (elim_r.empty() || (elim_x.empty() && bpoly_degree(fx) >= 1 && bpoly_degree(gx) >= 1))
        throw std::domain_error("count_bivariate: non-isolated solutions (vanishing eliminant)");
    if (elim_x.empty()) return count_box(sys);

    // candidate coordinates include roots of the leading coefficients, where
    // the resultant argument degenerates; each interval is refined against
    // the polynomial that produced it
    Rat target = make_rat(1, 1L << 24);
    auto add_roots = [&](const UPoly& p, const Rat& lo, const Rat& hi, std::vector<RatInterval>& out) {
        if (upoly_degree(upoly_normalize(p)) < 1) return;
        for (auto& iv : isolate_univariate(p, lo, hi)) {
            if (iv.width() > 0) iv = refine_root(p, iv, target);
            out.push_back(iv);
        }
    };
    std::vector<RatInterval> r_cands, x_cands;
    add_roots(elim_r, sys.box[0].first, sys.box[0].second, r_cands);
    add_roots(f.back(), sys.box[0].first, sys.box[0].second, r_cands);
    add_roots(g.back(), sys.box[0].first, sys.box[0].second, r_cands);
    add_roots(elim_x, sys.box[1].first, sys.box[1].second, x_cands);
    add_roots(fx.back(), sys.box[1].first, sys.box[1].second, x_cands);
    add_roots(gx.back(), sys.box[1].first, sys.box[1].second, x_cands);

    KrawczykSystem ksys = KrawczykSystem::from(sys.equations);
    CertBuilder cb(sys, ksys);
    CountResult result;
    std::vector<std::vector<Iv>> enclosures;

    for (const auto& ir : r_cands) {
        for (const auto& ix : x_cands) {
            // inflate cells so boundary roots sit strictly inside
            auto inflate = [&](const RatInterval& iv, const std::pair<Rat, Rat>& lim) {
                Rat w = iv.width();
                Rat pad = w / 4 + make_rat(1, 1L << 40);
                Rat lo = iv.lo - pad, hi = iv.hi + pad;
                if (lo < lim.first) lo = lim.first;
                if (hi > lim.second) hi = lim.second;
                return Iv(lo.get_d(), hi.get_d());
            };
            std::vector<Iv> X = {inflate(ir, sys.box[0]), inflate(ix, sys.box[1])};
            bool excluded = false;
            for (int i = 0; i < 2 && !excluded; ++i)
                if (!ksys.F[i].eval(X).contains_zero()) excluded = true;
            if (excluded) continue;

            KStatus st = KStatus::undecided;
            for (int it = 0; it < 60 && st == KStatus::undecided; ++it) {
                try {
                    st = krawczyk_step(ksys, X);
                } catch (const std::domain_error&) {
                    st = KStatus::empty;
                }
                if (st == KStatus::undecided) {
                    double w = std::max(X[0].width(), X[1].width());
                    if (w < 1e-14) break;
                }
            }
            if (st != KStatus::certified) {
                if (st == KStatus::undecided) {
                    // fall back to subdivision inside this cell; the cell is
                    // tiny, so a modest budget suffices (degenerate roots
                    // stay flagged as undecided)
                    SemiAlgSystem cell = sys;
                    cell.box = {{Rat(X[0].lo), Rat(X[0].hi)}, {Rat(X[1].lo), Rat(X[1].hi)}};
                    CountResult sub = count_box(cell, 300'000);
                    for (auto& cert : sub.certificates) {
                        std::vector<Iv> tight;
                        for (auto& [lo, hi] : cert.box) tight.push_back(Iv(lo.get_d(), hi.get_d()));
                        bool dup = false;
                        for (const auto& e : enclosures)
                            if (boxes_intersect(e, tight)) dup = true;
                        if (!dup) {
                            enclosures.push_back(tight);
                            result.certificates.push_back(cert);
                        }
                    }
                    if (!sub.complete) {
                        result.complete = false;
                        result.undecided_boxes += sub.undecided_boxes;
                    }
                }
                continue;
            }
            std::vector<Iv> tight = cb.tighten(X);
            bool dup = false;
            for (const auto& e : enclosures)
                if (boxes_intersect(e, tight)) dup = true;
            if (dup) continue;
            enclosures.push_back(tight);
            bool resolved = true;
            auto cert = cb.build(tight, resolved);
            if (cert) {
                result.certificates.push_back(*cert);
            } else if (!resolved) {
                result.complete = false;
                ++result.undecided_boxes;
            }
        }
    }
    result.count = static_cast<long>(result.certificates.size());
    return result;
}

SemiAlgSystem semialg_from_averaged(const AveragedSystem& avg, int order,
                                    const std::vector<Rat>& param_values) {
    const auto& comps = avg.orders.at(order - 1);
    SemiAlgSystem sys;
    for (const auto& c : comps) {
        auto [p, poly] = c.single_pi_term();
        StatePoly bound = poly.bind_params(param_values);
        if (bound.is_zero())
            throw std::domain_error("semialg_from_averaged: an averaged component vanishes identically");
        sys.equations.push_back(std::move(bound));
    }
    JacobianDet dj = jacobian_det(comps);
    StatePoly dbar = dj.num.bind_params(param_values);
    if (!dbar.is_zero()) sys.nonvanishing.push_back(std::move(dbar));
    sys.positive_vars = {0};
    sys.box = SemiAlgSystem::default_box(static_cast<int>(sys.equations.size()));
    return sys;
}

// ---------------------------------------------------------------------------
// extremal instances

namespace {

// prod (w - i) for i = 1..r
UPoly prescribed_roots_poly(int r) {
    UPoly p = {Rat(1)};
    for (int i = 1; i <= r; ++i) p = upoly_mul(p, UPoly{Rat(-i), Rat(1)});
    return p;
}

StatePoly poly2(const std::vector<std::tuple<int, int, Rat>>& terms) {
    StatePoly p(2, 0);
    for (const auto& [er, ex, c] : terms) p.add_term({er, ex}, ParamPoly::constant(0, c));
    return p;
}

}  // namespace

long extremal_3d_expected_count(int m) { return m % 2 == 0 ? m / 2 : m; }

SemiAlgSystem construct_extremal_3d(int m) {
    if (m < 2) throw std::invalid_argument("construct_extremal_3d: m >= 2");
    SemiAlgSystem sys;
    std::vector<std::tuple<int, int, Rat>> f1, f3;
    if (m % 2 == 0) {
        // f1 = 1 + sum_{t odd} R^(m-1-t) X^t, f3 = X + sum B_{2t} R^(m-2t) X^(2t)
        // with B chosen so the eliminated equation in w = (X/R)^2 has simple
        // roots w = 1..m/2
        UPoly c = prescribed_roots_poly(m / 2);
        f1.emplace_back(0, 0, Rat(1));
        for (int t = 1; t <= m - 1; t += 2) f1.emplace_back(m - 1 - t, t, Rat(1));
        f3.emplace_back(0, 1, Rat(1));
        f3.emplace_back(m, 0, c[0]);  // B0 = c0
        for (int t = 1; t <= m / 2; ++t) f3.emplace_back(m - 2 * t, 2 * t, c[t] + 1);
    } else {
        // f1 = 1 - R^(m-1); f3 = X (1 + R^(m-1) Q((X/R)^2)),
        // Q(u) = prod(u - i) - 1 over i = 1..(m-1)/2
        int r = (m - 1) / 2;
        UPoly q = prescribed_roots_poly(r);
        q[0] -= 1;
        f1.emplace_back(0, 0, Rat(1));
        f1.emplace_back(m - 1, 0, Rat(-1));
        f3.emplace_back(0, 1, Rat(1));
        for (int j = 0; j <= r; ++j) f3.emplace_back(m - 1 - 2 * j, 2 * j + 1, q[j]);
    }
    sys.equations = {poly2(f1), poly2(f3)};
    sys.positive_vars = {0};
    sys.box = SemiAlgSystem::default_box(2);
    // zeros live well inside [1e-2, 4] x [-4, 4]; keep the default wall but
    // shrink the roof for speed
    sys.box[0].second = Rat(8);
    sys.box[1] = {Rat(-8), Rat(8)};
    return sys;
}

SemiAlgSystem random_first_order_3d(int m, unsigned long seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> num(-9, 9);
    std::uniform_int_distribution<int> den(1, 5);
    auto rnd = [&]() {
        Rat q = make_rat(num(rng), den(rng));
        return q == 0 ? Rat(1) : q;
    };
    SemiAlgSystem sys;
    std::vector<std::tuple<int, int, Rat>> f1, f3;
    if (m % 2 == 0) {
        f1.emplace_back(0, 0, rnd());
        for (int t = 1; t <= m - 1; t += 2) f1.emplace_back(m - 1 - t, t, rnd());
        f3.emplace_back(0, 1, rnd());
        f3.emplace_back(m, 0, rnd());
        for (int t = 1; t <= m / 2; ++t) f3.emplace_back(m - 2 * t, 2 * t, rnd());
    } else {
        int r = (m - 1) / 2;
        f1.emplace_back(0, 0, rnd());
        f1.emplace_back(m - 1, 0, rnd());
        for (int t = 2; t <= m - 1; t += 2) f1.emplace_back(m - 1 - t, t, rnd());
        f3.emplace_back(0, 1, rnd());
        for (int j = 0; j <= r; ++j) f3.emplace_back(m - 1 - 2 * j, 2 * j + 1, rnd());
    }
    sys.equations = {poly2(f1), poly2(f3)};
    sys.positive_vars = {0};
    sys.box = SemiAlgSystem::default_box(2);
    sys.box[0].second = Rat(100);
    sys.box[1] = {Rat(-100), Rat(100)};
    return sys;
}

// ---------------------------------------------------------------------------
// printed condition sets

namespace {

struct ConditionTables {
    SymbolTable table;
    std::vector<ParamPoly> quantities_c;     // R1..R3
    std::vector<ParamPoly> quantities_cbar;  // R1b..R5b
    std::vector<ParamPoly> quantities_t;     // a60, b20, a51, a11, lambda
    std::vector<ParamPoly> quantities_tbar;  // b10, a20, b21, a52, a12, R7b and R6b
    ParamPoly r6bar;

    ConditionTables() {
        for (const char* s :
             {"beta",  "alpha1", "alpha2", "mu1", "mu2", "a10", "a11", "a12", "a20", "a21",
              "a22",   "a30",    "a31",    "a32", "a40", "a41", "a42", "a50", "a51", "a52",
              "a60",   "a61",    "a62",    "a70", "a71", "a72", "b10", "b11", "b12", "b20",
              "b21",   "b22"})
            table.add(s);
        auto P = [&](const std::string& s) { return parse_param_poly(table, s); };
        quantities_c = {
            P("alpha1"),
            P("a60*beta^4 + (a40 - a30)*beta^2 + a10"),
            P("a30*mu1*beta^2 - 2*a10*mu1 - 2*a10*alpha1"),
        };
        quantities_cbar = {
            P("alpha2"),
            P("2*a31*beta^2 - 3*a11"),
            P("a31*mu2*beta^2 - 2*a11*mu2 - 2*a11*alpha2"),
            P("2*a61*a31^2*beta^8"
              " + (4*a20*a31*a60*alpha2 - a20*a31*a60*mu2 - 8*a11*a31*a61 - 2*a31^3 + 2*a41*a31^2)*beta^6"
              " + (2*a20*a11*a60*mu2 - 4*a20*a11*a60*alpha2 + 8*a11^2*a61 + 10*a11*a31^2 - 8*a11*a41*a31)*beta^4"
              " + (8*a11^2*a41 - 16*a11^2*a31)*beta^2 + 8*a11^3"),
            P("4*a31^2*a61^2*beta^12"
              " + (16*a20*a31*a60*a61*alpha2 - 4*a20*a31*a60*a61*mu2 - 16*a11*a31*a61^2 - 8*a31^3*a61"
              " + 8*a31^2*a41*a61)*beta^10"
              " + (a20^2*a60^2*mu2^2 + 8*a20^2*a60^2*mu2*alpha2 + 16*a20^2*a60^2*alpha2^2"
              " + 8*a11*a20*a60*a61*mu2 - 16*a11*a20*a60*a61*alpha2 + 4*a31^2*mu2*a20*a60"
              " - 16*a31^2*alpha2*a20*a60 - 4*a20*a31*a41*a60*mu2 + 16*a11^2*a61^2"
              " + 16*a20*a31*a41*a60*alpha2 + 40*a11*a31^2*a61 - 32*a11*a31*a41*a61 + 4*a31^4"
              " - 8*a31^3*a41 + 4*a31^2*a41^2)*beta^8"
              " + (32*a11*a31*alpha2*a20*a60 - 12*a11*a31*mu2*a20*a60 + 8*a11*a20*a41*a60*mu2"
              " - 16*a11*a20*a41*a60*alpha2 - 64*a11^2*a31*a61 + 32*a11^2*a41*a61 - 24*a11*a31^3"
              " + 40*a11*a31^2*a41 - 16*a11*a31*a41^2)*beta^6"
              " + (8*a11^2*mu2*a20*a60 - 16*a11^2*alpha2*a20*a60 + 32*a11^3*a61 + 52*a11^2*a31^2"
              " - 64*a11^2*a31*a41 + 16*a11^2*a41^2)*beta^4"
              " + (32*a11^3*a41 - 48*a11^3*a31)*beta^2 + 16*a11^4"),
        };
        quantities_t = {P("a60"), P("b20"), P("a51"), P("a11"), P("(beta^2 + 1)*a20 - a40")};
        r6bar = P("(beta^2 + 1)*a21 + a20*a31");
        quantities_tbar = {
            P("b10"),
            P("a20"),
            P("b21"),
            P("a52"),
            P("a12"),
            P("a21^2*a60*beta^4"
              " + (2*a20*a21*a31*a60 - 4*a12*a20*b10 + 2*a21^2*a60)*beta^2"
              " + a20^2*a31^2*a60 + 2*a20*a21*a31*a60 + a21^2*a60"),
        };
    }

    std::vector<Rat> bind(const std::map<std::string, Rat>& params) const {
        std::vector<Rat> values(table.size(), Rat(0));
        std::vector<bool> bound(table.size(), false);
        for (const auto& [name, value] : params) {
            int i = table.index_of(name);
            if (i < 0) throw std::invalid_argument("eval_condition: unknown parameter '" + name + "'");
            values[i] = value;
            bound[i] = true;
        }
        return values;
    }
};

const ConditionTables& tables() {
    static ConditionTables t;
    return t;
}

// sign pattern tables; +1 means "> 0", -1 means "< 0"
const int kCond_C[4][3] = {
    {-1, -1, +1},
    {-1, +1, -1},
    {+1, -1, -1},
    {+1, +1, +1},
};

// order: R1b, R2b, R3b signs, R4b relation (+1: >= 0, -1: <= 0), R5b > 0 always
const int kCond_Cbar[4][4] = {
    {-1, -1, -1, +1},
    {-1, +1, +1, -1},
    {+1, -1, +1, +1},
    {+1, +1, -1, -1},
};

// order: a60, b20, a51, a11, lambda (all strict)
const int kCond_T[16][5] = {
    {-1, -1, -1, -1, +1}, {-1, -1, -1, +1, -1}, {-1, -1, +1, -1, -1}, {-1, -1, +1, +1, +1},
    {+1, -1, -1, -1, -1}, {+1, -1, -1, +1, +1}, {+1, -1, +1, -1, +1}, {+1, -1, +1, +1, -1},
    {-1, +1, -1, -1, -1}, {-1, +1, -1, +1, +1}, {-1, +1, +1, -1, +1}, {-1, +1, +1, +1, -1},
    {+1, +1, -1, -1, +1}, {+1, +1, -1, +1, -1}, {+1, +1, +1, -1, -1}, {+1, +1, +1, +1, +1},
};

// order: b10, a20, b21, a52, a12, R7b strict signs plus R6b relation
// (+1: >= 0, -1: <= 0)
const int kCond_Tbar[32][7] = {
    {-1, -1, -1, -1, -1, -1, +1}, {-1, -1, -1, -1, +1, +1, +1}, {-1, -1, -1, +1, -1, -1, -1},
    {-1, -1, -1, +1, +1, +1, -1}, {-1, -1, +1, -1, -1, -1, -1}, {-1, -1, +1, -1, +1, +1, -1},
    {-1, -1, +1, +1, -1, -1, +1}, {-1, -1, +1, +1, +1, +1, +1}, {-1, +1, -1, -1, -1, +1, -1},
    {-1, +1, -1, -1, +1, -1, -1}, {-1, +1, -1, +1, -1, +1, +1}, {-1, +1, -1, +1, +1, -1, +1},
    {-1, +1, +1, -1, -1, +1, +1}, {-1, +1, +1, -1, +1, -1, +1}, {-1, +1, +1, +1, -1, +1, -1},
    {-1, +1, +1, +1, +1, -1, -1}, {+1, -1, -1, -1, -1, +1, -1}, {+1, -1, -1, -1, +1, -1, -1},
    {+1, -1, -1, +1, -1, +1, +1}, {+1, -1, -1, +1, +1, -1, +1}, {+1, -1, +1, -1, -1, +1, +1},
    {+1, -1, +1, -1, +1, -1, +1}, {+1, -1, +1, +1, -1, +1, -1}, {+1, -1, +1, +1, +1, -1, -1},
    {+1, +1, -1, -1, -1, -1, +1}, {+1, +1, -1, -1, +1, +1, +1}, {+1, +1, -1, +1, -1, -1, -1},
    {+1, +1, -1, +1, +1, +1, -1}, {+1, +1, +1, -1, -1, -1, -1}, {+1, +1, +1, -1, +1, +1, -1},
    {+1, +1, +1, +1, -1, -1, +1}, {+1, +1, +1, +1, +1, +1, +1},
};

}  // namespace

int condition_count(ConditionFamily family) {
    switch (family) {
        case ConditionFamily::C: return 4;
        case ConditionFamily::Cbar: return 4;
        case ConditionFamily::T: return 16;
        case ConditionFamily::Tbar: return 32;
    }
    return 0;
}

bool eval_condition(ConditionFamily family, int index, const std::map<std::string, Rat>& params) {
    if (index < 1 || index > condition_count(family))
        throw std::invalid_argument("eval_condition: index out of range");
    const ConditionTables& t = tables();
    std::vector<Rat> values = t.bind(params);
    auto strict = [&](const ParamPoly& q, int want) {
        int s = rat_sign(q.evaluate(values));
        return want > 0 ? s > 0 : s < 0;
    };
    auto weak = [&](const ParamPoly& q, int dir) {
        int s = rat_sign(q.evaluate(values));
        return dir > 0 ? s >= 0 : s <= 0;
    };
    switch (family) {
        case ConditionFamily::C: {
            for (int i = 0; i < 3; ++i)
                if (!strict(t.quantities_c[i], kCond_C[index - 1][i])) return false;
            return true;
        }
        case ConditionFamily::Cbar: {
            for (int i = 0; i < 3; ++i)
                if (!strict(t.quantities_cbar[i], kCond_Cbar[index - 1][i])) return false;
            if (!weak(t.quantities_cbar[3], kCond_Cbar[index - 1][3])) return false;
            return strict(t.quantities_cbar[4], +1);
        }
        case ConditionFamily::T: {
            for (int i = 0; i < 5; ++i)
                if (!strict(t.quantities_t[i], kCond_T[index - 1][i])) return false;
            return true;
        }
        case ConditionFamily::Tbar: {
            for (int i = 0; i < 6; ++i)
                if (!strict(t.quantities_tbar[i], kCond_Tbar[index - 1][i])) return false;
            return weak(t.r6bar, kCond_Tbar[index - 1][6]);
        }
    }
    return false;
}

}  // namespace zhopf
