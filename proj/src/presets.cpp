#include "zhopf/presets.hpp"

#include <functional>

#include "zhopf/io.hpp"

namespace zhopf {

namespace {

ParamPoly laurent_inverse(const SymbolTable& table, const ParamPoly& p) {
    if (!p.is_monomial()) throw std::domain_error("laurent_inverse: non-monomial");
    const auto& [e, c] = *p.terms().begin();
    ParamPoly r = ParamPoly::constant(p.arity(), Rat(1) / c);
    for (std::size_t i = 0; i < e.size(); ++i)
        if (e[i] != 0) r = r.mul_symbol_pow(table, static_cast<int>(i), -e[i]);
    return r;
}

// Truncated power series in eps with ParamPoly coefficients.
class EpsSeries {
public:
    EpsSeries() = default;
    EpsSeries(int order, int arity) : order_(order), c_(order + 1, ParamPoly::zero(arity)) {}

    static EpsSeries constant(int order, const ParamPoly& p) {
        EpsSeries s(order, p.arity());
        s.c_[0] = p;
        return s;
    }

    int order() const { return order_; }
    const ParamPoly& at(int i) const { return c_.at(i); }
    ParamPoly& at(int i) { return c_.at(i); }

    bool is_zero() const {
        for (const auto& c : c_)
            if (!c.is_zero()) return false;
        return true;
    }

    friend EpsSeries operator+(const EpsSeries& a, const EpsSeries& b) {
        EpsSeries r = a;
        for (int i = 0; i <= r.order_; ++i) r.c_[i] += b.c_.at(i);
        return r;
    }
    friend EpsSeries operator-(const EpsSeries& a, const EpsSeries& b) {
        EpsSeries r = a;
        for (int i = 0; i <= r.order_; ++i) r.c_[i] -= b.c_.at(i);
        return r;
    }
    friend EpsSeries operator*(const EpsSeries& a, const EpsSeries& b) {
        EpsSeries r(a.order_, a.c_[0].arity());
        for (int i = 0; i <= a.order_; ++i) {
            if (a.c_[i].is_zero()) continue;
            for (int j = 0; i + j <= a.order_; ++j) {
                if (b.c_[j].is_zero()) continue;
                r.c_[i + j] += a.c_[i] * b.c_[j];
            }
        }
        return r;
    }

    // multiplicative inverse; the eps^0 coefficient must be an invertible
    // Laurent monomial
    EpsSeries inverse(const SymbolTable& table) const {
        EpsSeries r(order_, c_[0].arity());
        ParamPoly inv0 = laurent_inverse(table, c_[0]);
        r.c_[0] = inv0;
        for (int n = 1; n <= order_; ++n) {
            ParamPoly acc = ParamPoly::zero(c_[0].arity());
            for (int i = 1; i <= n; ++i) acc += c_[i] * r.c_[n - i];
            r.c_[n] = acc * inv0 * Rat(-1);
        }
        return r;
    }

private:
    int order_ = 0;
    std::vector<ParamPoly> c_;
};

using SeriesMatrix = std::vector<std::vector<EpsSeries>>;

SeriesMatrix matmul(const SeriesMatrix& a, const SeriesMatrix& b) {
    std::size_t n = a.size(), m = b[0].size(), k = b.size();
    SeriesMatrix r(n, std::vector<EpsSeries>(m, EpsSeries(a[0][0].order(), a[0][0].at(0).arity())));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t t = 0; t < k; ++t) r[i][j] = r[i][j] + a[i][t] * b[t][j];
    return r;
}

// determinant and adjugate by cofactor expansion (n <= 4)
EpsSeries series_det(const SeriesMatrix& m) {
    std::size_t n = m.size();
    if (n == 1) return m[0][0];
    EpsSeries acc(m[0][0].order(), m[0][0].at(0).arity());
    for (std::size_t j = 0; j < n; ++j) {
        SeriesMatrix minor;
        for (std::size_t r = 1; r < n; ++r) {
            std::vector<EpsSeries> row;
            for (std::size_t c = 0; c < n; ++c)
                if (c != j) row.push_back(m[r][c]);
            minor.push_back(std::move(row));
        }
        EpsSeries term = m[0][j] * series_det(minor);
        if (j % 2 == 0)
            acc = acc + term;
        else
            acc = acc - term;
    }
    return acc;
}

SeriesMatrix series_adjugate(const SeriesMatrix& m) {
    std::size_t n = m.size();
    SeriesMatrix adj(n, std::vector<EpsSeries>(n, EpsSeries(m[0][0].order(), m[0][0].at(0).arity())));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            SeriesMatrix minor;
            for (std::size_t r = 0; r < n; ++r) {
                if (r == i) continue;
                std::vector<EpsSeries> row;
                for (std::size_t c = 0; c < n; ++c)
                    if (c != j) row.push_back(m[r][c]);
                minor.push_back(std::move(row));
            }
            EpsSeries cof = series_det(minor);
            if ((i + j) % 2 == 1) cof = EpsSeries(cof.order(), cof.at(0).arity()) - cof;
            adj[j][i] = cof;  // transpose of the cofactor matrix
        }
    }
    return adj;
}

// quadratic form bookkeeping: coefficients of u_a u_b (a <= b) as series
struct QuadraticField {
    int n;
    SeriesMatrix linear;                         // n x n
    std::map<std::pair<int, int>, std::vector<EpsSeries>> quad;  // (a<=b) -> per-row coefficient

    QuadraticField(int n_, int order, int arity)
        : n(n_), linear(n_, std::vector<EpsSeries>(n_, EpsSeries(order, arity))) {}

    void add_quad(int row, int a, int b, const EpsSeries& c) {
        if (a > b) std::swap(a, b);
        auto& slot = quad[{a, b}];
        if (slot.empty()) slot.assign(n, EpsSeries(c.order(), c.at(0).arity()));
        slot[row] = slot[row] + c;
    }
};

// products of linear forms: given rows u -> sum_t W[i][t] u_t, expands
// (W x)_a (W x)_b into coefficients of u_p u_q
void expand_product(QuadraticField& out, int row, const SeriesMatrix& W, int a, int b,
                    const EpsSeries& scale) {
    int n = out.n;
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
            EpsSeries c = scale * W[a][p] * W[b][q];
            if (c.is_zero()) continue;
            out.add_quad(row, std::min(p, q), std::max(p, q), c);
        }
}

// Extracts a PerturbedSystem from the transformed field; verifies the eps^0
// part is exactly the rotation.
PerturbedSystem extract_system(const std::string& what, int n, int m, int k,
                               const SymbolTable& table, const ParamPoly& freq,
                               const QuadraticField& field) {
    const int A = table.size();
    // eps^0 linear part must be the rotation; everything else must vanish
    ParamPoly zero = ParamPoly::zero(A);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            ParamPoly want = zero;
            if (r == 0 && c == 1) want = freq * Rat(-1);
            if (r == 1 && c == 0) want = freq;
            if (field.linear[r][c].at(0) != want)
                throw std::logic_error(what + ": unperturbed linear part is not the plain rotation");
        }

    PerturbedSystem sys(n, m, k, table, freq);
    for (int j = 1; j <= k; ++j)
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c)
                if (!field.linear[r][c].at(j).is_zero()) sys.add_linear(j, r, c, field.linear[r][c].at(j));
    for (const auto& [ab, rows] : field.quad) {
        ExpVec idx(n, 0);
        idx[ab.first] += 1;
        idx[ab.second] += 1;
        for (int r = 0; r < n; ++r)
            for (int j = 0; j <= k - 1; ++j)
                if (!rows[r].at(j).is_zero()) sys.add_p(r + 1, idx, j, rows[r].at(j));
    }
    return sys;
}

CaseStudyPreset build_third_order(int k) {
    if (k < 1 || k > 3) throw std::invalid_argument("third_order: k in 1..3");
    SymbolTable table;
    table.add("beta", true);
    for (const char* s : {"alpha1", "alpha2", "mu1", "mu2"}) table.add(s);
    for (int i = 1; i <= 6; ++i)
        for (int j = 0; j <= 2; ++j) table.add("a" + std::to_string(i) + std::to_string(j));
    const int A = table.size();
    const int K = k;  // series truncation order
    auto P = [&](const std::string& s) { return parse_param_poly(table, s); };
    auto S = [&](const ParamPoly& p) { return EpsSeries::constant(K, p); };
    auto sym = [&](const std::string& s) { return P(s); };

    EpsSeries eps(K, A);
    if (K >= 1) eps.at(1) = ParamPoly::constant(A, Rat(1));

    // model parameters as eps-polynomials
    EpsSeries mu = S(sym("mu1")) + eps * S(sym("mu2"));        // mu1 + eps mu2
    EpsSeries al = S(sym("alpha1")) + eps * S(sym("alpha2"));  // alpha1 + eps alpha2
    EpsSeries beta2 = S(P("beta^2"));
    EpsSeries ell = EpsSeries(K, A) - eps * mu * (eps * eps * al * al + beta2);
    EpsSeries pp = EpsSeries(K, A) - eps * (mu + al + al);
    EpsSeries qq = beta2 + eps * eps * al * (mu + mu + al);
    std::vector<EpsSeries> a(7, EpsSeries(K, A));
    for (int i = 1; i <= 6; ++i) {
        a[i] = S(sym("a" + std::to_string(i) + "0")) + eps * S(sym("a" + std::to_string(i) + "1")) +
               eps * eps * S(sym("a" + std::to_string(i) + "2"));
    }

    // change of variables (x, y, z) = M (x1, x2, x3)
    SeriesMatrix M(3, std::vector<EpsSeries>(3, EpsSeries(K, A)));
    M[0][0] = eps * eps * mu * al;
    M[0][1] = EpsSeries(K, A) - eps * (mu + al);
    M[0][2] = S(P("1"));
    M[1][0] = EpsSeries(K, A) - eps * S(sym("beta")) * mu;
    M[1][1] = S(sym("beta"));
    M[1][2] = EpsSeries(K, A);
    M[2][0] = beta2 + eps * eps * al * al;
    M[2][1] = EpsSeries(K, A) - eps * (al + al);
    M[2][2] = S(P("1"));

    EpsSeries det = series_det(M);
    SeriesMatrix adj = series_adjugate(M);
    EpsSeries detinv = det.inverse(table);
    SeriesMatrix W(3, std::vector<EpsSeries>(3, EpsSeries(K, A)));  // M^{-1}
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) W[i][j] = adj[i][j] * detinv;

    // companion field: x1' = x2, x2' = x3, x3' = -l x1 - q x2 - p x3 + f
    SeriesMatrix Amat(3, std::vector<EpsSeries>(3, EpsSeries(K, A)));
    Amat[0][1] = S(P("1"));
    Amat[1][2] = S(P("1"));
    Amat[2][0] = EpsSeries(K, A) - ell;
    Amat[2][1] = EpsSeries(K, A) - qq;
    Amat[2][2] = EpsSeries(K, A) - pp;

    QuadraticField field(3, K, A);
    field.linear = matmul(matmul(M, Amat), W);
    // f enters rows x and z through M[.][2] = (1, 0, 1)
    struct FQ {
        int a, b, idx;
    };
    const FQ fq[] = {{0, 0, 1}, {0, 1, 2}, {0, 2, 3}, {1, 1, 4}, {1, 2, 5}, {2, 2, 6}};
    for (const auto& q : fq) {
        for (int row : {0, 2}) {
            EpsSeries scale = M[row][2] * a[q.idx];
            expand_product(field, row, W, q.a, q.b, scale);
        }
    }

    CaseStudyPreset preset{
        "third_order",
        extract_system("third_order", 3, 2, k, table, P("beta"), field),
        {
            {table.require("alpha1"), ParamPoly::zero(A)},
            {table.require("mu1"), ParamPoly::zero(A)},
            {table.require("a30"), ParamPoly::zero(A)},
            {table.require("a10"), ParamPoly::zero(A)},
            {table.require("a40"), P("-beta^2*a60")},
        },
        {}};
    return preset;
}

CaseStudyPreset build_hyperchaotic(int k) {
    if (k < 1 || k > 2) throw std::invalid_argument("hyperchaotic: k in 1..2");
    SymbolTable table;
    table.add("beta", true);
    table.add("xi", true);
    for (int i = 1; i <= 7; ++i)
        for (int j = 0; j <= 2; ++j) table.add("a" + std::to_string(i) + std::to_string(j));
    for (int i = 1; i <= 2; ++i)
        for (int j = 0; j <= 2; ++j) table.add("b" + std::to_string(i) + std::to_string(j));
    const int A = table.size();
    const int K = k;
    auto P = [&](const std::string& s) { return parse_param_poly(table, s); };
    auto S = [&](const ParamPoly& p) { return EpsSeries::constant(K, p); };

    EpsSeries eps(K, A);
    if (K >= 1) eps.at(1) = ParamPoly::constant(A, Rat(1));

    // zero-Hopf constraints pin the eps^0 values of a1, a3, a5, a7
    auto coeff_series = [&](const std::string& base, const ParamPoly& at0) {
        EpsSeries s = S(at0);
        s = s + eps * S(P(base + "1"));
        if (K >= 2) s = s + eps * eps * S(P(base + "2"));
        return s;
    };
    EpsSeries a1 = coeff_series("a1", P("-1"));
    EpsSeries a2 = coeff_series("a2", P("a20"));
    EpsSeries a3 = coeff_series("a3", P("beta^2 + 1"));
    EpsSeries a4 = coeff_series("a4", P("a40"));
    EpsSeries a5 = coeff_series("a5", ParamPoly::zero(A));
    EpsSeries a6 = coeff_series("a6", P("a60"));
    EpsSeries a7 = coeff_series("a7", ParamPoly::zero(A));
    EpsSeries b1 = coeff_series("b1", P("b10"));
    EpsSeries b2 = coeff_series("b2", P("b20"));

    // constant change of variables (x, y, z, w) = N (x1, x2, x3, x4)
    SeriesMatrix N(4, std::vector<EpsSeries>(4, EpsSeries(K, A)));
    N[0][0] = S(P("(a20 - a40)/beta^2"));
    N[0][1] = S(P("-a20/beta"));
    N[0][3] = S(P("(a40 - a20)/beta^2"));
    N[1][0] = S(P("(a20*(beta^2 + 1) - a40)/beta^2"));
    N[1][1] = S(P("-a40/beta"));
    N[1][3] = S(P("(a40 - a20*(beta^2 + 1))/beta^2"));
    N[2][2] = S(P("1"));
    N[2][3] = S(P("-1"));
    N[3][3] = S(P("1"));

    // det N = xi / beta^3 with xi = beta^2 a20^2 + (a20 - a40)^2; verified
    // exactly, then the inverse uses the declared symbol xi
    ParamPoly xi_def = P("beta^2*a20^2 + (a20 - a40)^2");
    EpsSeries detN = series_det(N);
    if (!(detN.at(0) * P("beta^3") == xi_def))
        throw std::logic_error("hyperchaotic: transform determinant mismatch");
    for (int i = 1; i <= K; ++i)
        if (!detN.at(i).is_zero()) throw std::logic_error("hyperchaotic: transform not constant");
    SeriesMatrix adj = series_adjugate(N);
    ParamPoly inv_scale = P("beta^3/xi");
    SeriesMatrix W(4, std::vector<EpsSeries>(4, EpsSeries(K, A)));  // N^{-1}
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) W[i][j] = adj[i][j] * S(inv_scale);

    // original field: linear matrix plus three quadratic couplings
    SeriesMatrix Amat(4, std::vector<EpsSeries>(4, EpsSeries(K, A)));
    Amat[0][0] = EpsSeries(K, A) - a1;
    Amat[0][1] = a1;
    Amat[0][3] = EpsSeries(K, A) - a2;
    Amat[1][0] = a3;
    Amat[1][1] = S(P("-1"));
    Amat[1][3] = EpsSeries(K, A) - a4;
    Amat[2][2] = EpsSeries(K, A) - a5;
    Amat[3][3] = EpsSeries(K, A) - a7;

    QuadraticField field(4, K, A);
    field.linear = matmul(matmul(W, Amat), N);

    // cancel xi from coefficients divisible by its defining polynomial, so
    // entries like -beta*xi/xi come out in their reduced form
    int xi_idx = table.require("xi");
    auto reduce_xi = [&](const ParamPoly& p) {
        int e = std::max(0, -p.min_exponent(xi_idx));
        if (e == 0) return p;
        ParamPoly q = p.mul_symbol_pow(table, xi_idx, e);
        while (e > 0) {
            auto quot = try_divide(table, q, xi_def);
            if (!quot) break;
            q = *quot;
            --e;
        }
        return q.mul_symbol_pow(table, xi_idx, -e);
    };
    auto reduce_series = [&](EpsSeries& s) {
        for (int i = 0; i <= s.order(); ++i) s.at(i) = reduce_xi(s.at(i));
    };

    // quadratic rows in original coordinates: y: -b1 x z, z: b2 x y, w: a6 y z
    // transformed: W * (rows), with x = (N u)_0, y = (N u)_1, z = (N u)_2
    struct QE {
        int row, a, b;
        EpsSeries coeff;
    };
    std::vector<QE> quads;
    quads.push_back({1, 0, 2, EpsSeries(K, A) - b1});
    quads.push_back({2, 0, 1, b2});
    quads.push_back({3, 1, 2, a6});
    for (const auto& q : quads) {
        for (int target = 0; target < 4; ++target) {
            EpsSeries scale = W[target][q.row] * q.coeff;
            if (scale.is_zero()) continue;
            // expand (N u)_a (N u)_b
            for (int p = 0; p < 4; ++p)
                for (int r = 0; r < 4; ++r) {
                    EpsSeries c = scale * N[q.a][p] * N[q.b][r];
                    if (c.is_zero()) continue;
                    field.add_quad(target, std::min(p, r), std::max(p, r), c);
                }
        }
    }
    for (auto& row : field.linear)
        for (auto& entry : row) reduce_series(entry);
    for (auto& [ab, rows] : field.quad)
        for (auto& entry : rows) reduce_series(entry);

    CaseStudyPreset preset{
        "hyperchaotic",
        extract_system("hyperchaotic", 4, 2, k, table, P("beta"), field),
        {
            {table.require("a40"), P("(beta^2 + 1)*a20")},
            {table.require("b20"), ParamPoly::zero(A)},
            {table.require("a51"), ParamPoly::zero(A)},
            {table.require("a71"), ParamPoly::zero(A)},
            {table.require("a11"), ParamPoly::zero(A)},
        },
        {{table.require("xi"), xi_def}}};
    return preset;
}

}  // namespace

std::vector<Rat> CaseStudyPreset::bind(const std::map<std::string, Rat>& values,
                                       bool vanished) const {
    const SymbolTable& table = system.symbols();
    std::vector<Rat> out(table.size(), Rat(0));
    for (const auto& [name, v] : values) out[table.require(name)] = v;
    if (vanished)
        for (const auto& [idx, poly] : vanishing) out[idx] = poly.evaluate(out);
    for (const auto& [idx, poly] : defined) out[idx] = poly.evaluate(out);
    for (int i = 0; i < table.size(); ++i)
        if (table.nonzero(i) && out[i] == 0)
            throw std::domain_error("preset binding: declared-nonzero symbol '" + table.name(i) +
                                    "' evaluates to zero");
    return out;
}

CaseStudyPreset build_preset(const std::string& name, int k) {
    if (name == "third_order") return build_third_order(k);
    if (name == "hyperchaotic") return build_hyperchaotic(k);
    throw std::invalid_argument("build_preset: unknown preset '" + name + "'");
}

}  // namespace zhopf
