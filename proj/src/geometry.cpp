#include "zhopf/geometry.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace zhopf {

namespace {

using Matrix = std::vector<std::vector<Rat>>;

// exact determinant by fraction-free-ish Gaussian elimination
Rat det(Matrix m) {
    const std::size_t n = m.size();
    Rat d(1);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && m[piv][col] == 0) ++piv;
        if (piv == n) return Rat(0);
        if (piv != col) {
            std::swap(m[piv], m[col]);
            d = -d;
        }
        d *= m[col][col];
        Rat inv = Rat(1) / m[col][col];
        for (std::size_t r = col + 1; r < n; ++r) {
            if (m[r][col] == 0) continue;
            Rat f = m[r][col] * inv;
            for (std::size_t c = col; c < n; ++c) m[r][c] -= f * m[col][c];
        }
    }
    return d;
}

// rank of the difference vectors p_i - p_0; also returns indices of points
// realizing an affine basis (p_0 plus rank points). Maintains RREF rows.
int affine_basis(const std::vector<RatPoint>& pts, std::vector<std::size_t>& basis) {
    basis.clear();
    if (pts.empty()) return -1;
    basis.push_back(0);
    const std::size_t d = pts[0].size();
    Matrix rows;                   // RREF, each row lead coefficient 1
    std::vector<std::size_t> leads;
    for (std::size_t i = 1; i < pts.size() && rows.size() < d; ++i) {
        std::vector<Rat> w(d);
        for (std::size_t j = 0; j < d; ++j) w[j] = pts[i][j] - pts[0][j];
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (w[leads[r]] == 0) continue;
            Rat f = w[leads[r]];
            for (std::size_t j = 0; j < d; ++j) w[j] -= f * rows[r][j];
        }
        std::size_t lead = 0;
        while (lead < d && w[lead] == 0) ++lead;
        if (lead == d) continue;
        Rat inv = Rat(1) / w[lead];
        for (auto& x : w) x *= inv;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (rows[r][lead] == 0) continue;
            Rat f = rows[r][lead];
            for (std::size_t j = 0; j < d; ++j) rows[r][j] -= f * w[j];
        }
        rows.push_back(w);
        leads.push_back(lead);
        basis.push_back(i);
    }
    return static_cast<int>(rows.size());
}

struct Facet {
    std::vector<std::size_t> verts;  // d vertex indices
    std::vector<Rat> normal;         // outward
    Rat offset;                      // normal . x <= offset on the hull
};

// generalized cross product: normal of the hyperplane through d points
std::vector<Rat> facet_normal(const std::vector<RatPoint>& pts,
                              const std::vector<std::size_t>& verts) {
    const std::size_t d = pts[0].size();
    Matrix diff(d - 1, std::vector<Rat>(d));
    for (std::size_t i = 0; i + 1 < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            diff[i][j] = pts[verts[i + 1]][j] - pts[verts[0]][j];
    std::vector<Rat> n(d);
    for (std::size_t j = 0; j < d; ++j) {
        Matrix minor(d - 1, std::vector<Rat>(d - 1));
        for (std::size_t r = 0; r + 1 < d; ++r) {
            std::size_t cc = 0;
            for (std::size_t c = 0; c < d; ++c) {
                if (c == j) continue;
                minor[r][cc++] = diff[r][c];
            }
        }
        n[j] = (j % 2 == 0 ? 1 : -1) * det(minor);
    }
    return n;
}

Rat dot(const std::vector<Rat>& a, const RatPoint& b) {
    Rat s(0);
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// exact feasibility: is v a convex combination of pts[others]? Phase-one
// simplex on {W lambda = v, sum lambda = 1, lambda >= 0}.
bool in_convex_hull(const RatPoint& v, const std::vector<RatPoint>& pts,
                    const std::vector<std::size_t>& others) {
    const std::size_t d = v.size();
    const std::size_t rows = d + 1;
    const std::size_t nvars = others.size();
    // tableau: columns = lambda vars + artificials, rhs
    Matrix T(rows, std::vector<Rat>(nvars + rows + 1, Rat(0)));
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < nvars; ++c)
            T[r][c] = (r < d) ? pts[others[c]][r] : Rat(1);
        T[r][nvars + rows] = (r < d) ? v[r] : Rat(1);
        if (T[r][nvars + rows] < 0)
            for (auto& x : T[r]) x = -x;
        T[r][nvars + r] = Rat(1);
    }
    std::vector<long> basis(rows);
    std::vector<Rat> cost(nvars + rows, Rat(0));
    for (std::size_t r = 0; r < rows; ++r) {
        basis[r] = static_cast<long>(nvars + r);
        cost[nvars + r] = Rat(1);
    }
    // reduced costs z_j - c_j for minimizing sum of artificials
    auto objective = [&]() {
        Rat obj(0);
        for (std::size_t r = 0; r < rows; ++r)
            if (basis[r] >= static_cast<long>(nvars)) obj += T[r][nvars + rows];
        return obj;
    };
    while (true) {
        // Bland's rule: smallest index with negative reduced cost
        long enter = -1;
        for (std::size_t j = 0; j < nvars + rows; ++j) {
            Rat red = -cost[j];
            for (std::size_t r = 0; r < rows; ++r)
                if (cost[basis[r]] != 0) red += cost[basis[r]] * T[r][j];
            if (red > 0) {  // improving for minimization
                bool basic = false;
                for (std::size_t r = 0; r < rows; ++r)
                    if (basis[r] == static_cast<long>(j)) basic = true;
                if (!basic) {
                    enter = static_cast<long>(j);
                    break;
                }
            }
        }
        if (enter < 0) break;
        long leave = -1;
        Rat best;
        for (std::size_t r = 0; r < rows; ++r) {
            if (T[r][enter] > 0) {
                Rat ratio = T[r][nvars + rows] / T[r][enter];
                if (leave < 0 || ratio < best ||
                    (ratio == best && basis[r] < basis[leave])) {
                    best = ratio;
                    leave = static_cast<long>(r);
                }
            }
        }
        if (leave < 0) break;  // unbounded; cannot happen in phase one
        // pivot
        Rat piv = T[leave][enter];
        for (auto& x : T[leave]) x /= piv;
        for (std::size_t r = 0; r < rows; ++r) {
            if (static_cast<long>(r) == leave || T[r][enter] == 0) continue;
            Rat f = T[r][enter];
            for (std::size_t c = 0; c < T[r].size(); ++c) T[r][c] -= f * T[leave][c];
        }
        basis[leave] = enter;
    }
    return objective() == 0;
}

std::vector<RatPoint> dedupe(const std::vector<RatPoint>& points) {
    std::set<std::vector<Rat>> s(points.begin(), points.end());
    return {s.begin(), s.end()};
}

// full-dimensional incremental hull; returns the set of vertex indices that
// appear on facets plus the facet list
std::vector<Facet> incremental_hull(const std::vector<RatPoint>& pts,
                                    const std::vector<std::size_t>& seed) {
    const std::size_t d = pts[0].size();
    // interior reference point: centroid of the seed simplex
    RatPoint center(d, Rat(0));
    for (std::size_t i : seed)
        for (std::size_t j = 0; j < d; ++j) center[j] += pts[i][j];
    for (std::size_t j = 0; j < d; ++j) center[j] /= Rat(static_cast<long>(seed.size()));

    auto make_facet = [&](std::vector<std::size_t> verts) {
        Facet f;
        f.verts = std::move(verts);
        f.normal = facet_normal(pts, f.verts);
        f.offset = dot(f.normal, pts[f.verts[0]]);
        if (dot(f.normal, center) > f.offset) {
            for (auto& x : f.normal) x = -x;
            f.offset = -f.offset;
        }
        return f;
    };

    std::vector<Facet> facets;
    for (std::size_t skip = 0; skip < seed.size(); ++skip) {
        std::vector<std::size_t> verts;
        for (std::size_t i = 0; i < seed.size(); ++i)
            if (i != skip) verts.push_back(seed[i]);
        facets.push_back(make_facet(verts));
    }

    std::set<std::size_t> in_seed(seed.begin(), seed.end());
    for (std::size_t p = 0; p < pts.size(); ++p) {
        if (in_seed.count(p)) continue;
        std::vector<std::size_t> visible;
        for (std::size_t fi = 0; fi < facets.size(); ++fi)
            if (dot(facets[fi].normal, pts[p]) > facets[fi].offset) visible.push_back(fi);
        if (visible.empty()) continue;

        // horizon ridges: (d-1)-subsets of visible facets shared with an
        // invisible facet (or used once overall)
        std::map<std::vector<std::size_t>, int> ridge_count;
        std::set<std::size_t> vis(visible.begin(), visible.end());
        for (std::size_t fi : visible) {
            const auto& fv = facets[fi].verts;
            for (std::size_t skip = 0; skip < fv.size(); ++skip) {
                std::vector<std::size_t> ridge;
                for (std::size_t i = 0; i < fv.size(); ++i)
                    if (i != skip) ridge.push_back(fv[i]);
                std::sort(ridge.begin(), ridge.end());
                ridge_count[ridge] += 1;
            }
        }
        std::vector<Facet> next;
        for (std::size_t fi = 0; fi < facets.size(); ++fi)
            if (!vis.count(fi)) next.push_back(std::move(facets[fi]));
        for (const auto& [ridge, cnt] : ridge_count) {
            if (cnt != 1) continue;  // interior ridge of the visible region
            std::vector<std::size_t> verts = ridge;
            verts.push_back(p);
            next.push_back(make_facet(verts));
        }
        facets = std::move(next);
    }
    return facets;
}

}  // namespace

Polytope convex_hull(int dim, const std::vector<RatPoint>& points_in) {
    for (const auto& p : points_in)
        if (static_cast<int>(p.size()) != dim) throw std::invalid_argument("convex_hull: arity");
    std::vector<RatPoint> pts = dedupe(points_in);
    if (pts.empty()) throw std::invalid_argument("convex_hull: empty input");

    Polytope out;
    out.dim = dim;
    if (pts.size() == 1) {
        out.vertices = pts;
        return out;
    }

    std::vector<std::size_t> basis;
    int rank = affine_basis(pts, basis);

    if (rank < dim) {
        // lower-dimensional hull: project onto an independent coordinate
        // subset (affine bijection on the affine hull), recurse, lift back
        if (rank == 0) {
            out.vertices = {pts[0]};
            return out;
        }
        // choose rank coordinates on which the difference space is injective
        std::vector<int> coords;
        {
            Matrix diffs;
            for (std::size_t i = 1; i < basis.size(); ++i) {
                std::vector<Rat> v(dim);
                for (int j = 0; j < dim; ++j) v[j] = pts[basis[i]][j] - pts[0][j];
                diffs.push_back(v);
            }
            // greedy column selection by exact rank growth
            Matrix sel(diffs.size());
            for (int c = 0; c < dim && static_cast<int>(coords.size()) < rank; ++c) {
                Matrix candidate = sel;
                for (std::size_t r = 0; r < diffs.size(); ++r) candidate[r].push_back(diffs[r][c]);
                // rank test via affine_basis-style elimination on columns
                Matrix m = candidate;
                int rk = 0;
                std::size_t ncols = m[0].size();
                std::vector<bool> used(m.size(), false);
                for (std::size_t col = 0; col < ncols; ++col) {
                    std::size_t piv = m.size();
                    for (std::size_t r = 0; r < m.size(); ++r)
                        if (!used[r] && m[r][col] != 0) {
                            piv = r;
                            break;
                        }
                    if (piv == m.size()) continue;
                    used[piv] = true;
                    ++rk;
                    for (std::size_t r = 0; r < m.size(); ++r) {
                        if (r == piv || m[r][col] == 0) continue;
                        Rat f = m[r][col] / m[piv][col];
                        for (std::size_t cc = 0; cc < ncols; ++cc) m[r][cc] -= f * m[piv][cc];
                    }
                }
                if (rk == static_cast<int>(coords.size()) + 1) {
                    coords.push_back(c);
                    sel = candidate;
                }
            }
        }
        if (static_cast<int>(coords.size()) != rank)
            throw std::logic_error("convex_hull: projection selection failed");
        std::vector<RatPoint> proj;
        for (const auto& p : pts) {
            RatPoint q(rank);
            for (int i = 0; i < rank; ++i) q[i] = p[coords[i]];
            proj.push_back(q);
        }
        Polytope small = convex_hull(rank, proj);
        // lift vertices back: match projected coordinates
        for (const auto& v : small.vertices) {
            for (std::size_t i = 0; i < pts.size(); ++i) {
                RatPoint q(rank);
                for (int j = 0; j < rank; ++j) q[j] = pts[i][coords[j]];
                if (q == v) {
                    out.vertices.push_back(pts[i]);
                    break;
                }
            }
        }
        std::sort(out.vertices.begin(), out.vertices.end());
        return out;
    }

    std::vector<Facet> facets = incremental_hull(pts, basis);
    std::set<std::size_t> on_hull;
    for (const auto& f : facets)
        for (std::size_t v : f.verts) on_hull.insert(v);

    // drop non-extreme points sitting on facets
    std::vector<std::size_t> hull_pts(on_hull.begin(), on_hull.end());
    for (std::size_t v : hull_pts) {
        std::vector<std::size_t> others;
        for (std::size_t w : hull_pts)
            if (w != v) others.push_back(w);
        if (!in_convex_hull(pts[v], pts, others)) out.vertices.push_back(pts[v]);
    }
    std::sort(out.vertices.begin(), out.vertices.end());
    return out;
}

Polytope newton_polytope(const LatticeSupport& support) {
    if (support.points.empty()) throw std::invalid_argument("newton_polytope: empty support");
    std::vector<RatPoint> pts;
    for (const auto& e : support.points) {
        RatPoint p(support.dim);
        for (int i = 0; i < support.dim; ++i) p[i] = Rat(e[i]);
        pts.push_back(p);
    }
    return convex_hull(support.dim, pts);
}

Rat polytope_volume(const Polytope& p) {
    const int d = p.dim;
    if (d > 6) throw std::invalid_argument("polytope_volume: dimension > 6 unsupported");
    if (static_cast<int>(p.vertices.size()) < d + 1) return Rat(0);
    std::vector<std::size_t> basis;
    int rank = affine_basis(p.vertices, basis);
    if (rank < d) return Rat(0);

    std::vector<Facet> facets = incremental_hull(p.vertices, basis);
    RatPoint o = p.vertices[basis[0]];
    Rat vol(0);
    Rat dfact(int_factorial(d));
    for (const auto& f : facets) {
        Matrix m(d, std::vector<Rat>(d));
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) m[i][j] = p.vertices[f.verts[i]][j] - o[j];
        vol += rat_abs(det(m)) / dfact;
    }
    return vol;
}

Polytope minkowski_sum(const Polytope& a, const Polytope& b) {
    if (a.dim != b.dim) throw std::invalid_argument("minkowski_sum: dimension mismatch");
    std::vector<RatPoint> sums;
    for (const auto& u : a.vertices)
        for (const auto& v : b.vertices) {
            RatPoint w(a.dim);
            for (int i = 0; i < a.dim; ++i) w[i] = u[i] + v[i];
            sums.push_back(w);
        }
    return convex_hull(a.dim, sums);
}

Rat mixed_volume(const std::vector<Polytope>& ps) {
    const int d = static_cast<int>(ps.size());
    if (d == 0) throw std::invalid_argument("mixed_volume: no polytopes");
    if (d > 5) throw std::invalid_argument("mixed_volume: dimension > 5 unsupported");
    for (const auto& p : ps)
        if (p.dim != d) throw std::invalid_argument("mixed_volume: need d polytopes in dimension d");
    Rat mv(0);
    for (unsigned mask = 1; mask < (1u << d); ++mask) {
        Polytope sum;
        bool first = true;
        int bits = 0;
        for (int i = 0; i < d; ++i) {
            if (!(mask & (1u << i))) continue;
            ++bits;
            sum = first ? ps[i] : minkowski_sum(sum, ps[i]);
            first = false;
        }
        Rat v = polytope_volume(sum);
        mv += ((d - bits) % 2 == 0 ? v : -v);
    }
    return mv;
}

Int mixed_volume_lattice(const std::vector<LatticeSupport>& supports) {
    std::vector<Polytope> ps;
    for (const auto& s : supports) ps.push_back(newton_polytope(s));
    Rat mv = mixed_volume(ps);
    if (mv.get_den() != 1) throw std::logic_error("mixed_volume_lattice: non-integer mixed volume");
    return mv.get_num();
}

namespace {

// all vectors in N^len with coordinate sum total
std::vector<ExpVec> compositions(int len, int total) {
    std::vector<ExpVec> out;
    ExpVec cur(len, 0);
    std::function<void(int, int)> rec = [&](int pos, int left) {
        if (pos == len - 1) {
            cur[pos] = left;
            out.push_back(cur);
            return;
        }
        for (int v = 0; v <= left; ++v) {
            cur[pos] = v;
            rec(pos + 1, left - v);
        }
    };
    if (len == 0) {
        if (total == 0) out.push_back({});
        return out;
    }
    rec(0, total);
    return out;
}

ExpVec prepend(int head, const ExpVec& tail) {
    ExpVec v;
    v.reserve(tail.size() + 1);
    v.push_back(head);
    v.insert(v.end(), tail.begin(), tail.end());
    return v;
}

}  // namespace

std::vector<LatticeSupport> first_order_supports(int n, int m) {
    if (n < 3 || m < 2) throw std::invalid_argument("first_order_supports: need n >= 3, m >= 2");
    const int d = n - 1;   // (rho, X_3..X_n)
    const int nx = n - 2;  // X-block length
    std::vector<LatticeSupport> out;

    if (m % 2 == 0) {
        std::vector<ExpVec> a1 = {ExpVec(d, 0)};
        for (int t = 1; t <= m / 2; ++t)
            for (const auto& e : compositions(nx, 2 * t - 1)) a1.push_back(prepend(m / 2 - t, e));
        out.emplace_back(d, a1);
        for (int s = 3; s <= n; ++s) {
            std::vector<ExpVec> as;
            for (int t = 1; t <= m / 2; ++t)
                for (const auto& e : compositions(nx, 2 * t)) as.push_back(prepend(m / 2 - t, e));
            ExpVec unit(d, 0);
            unit[s - 2] = 1;  // X_s coordinate
            as.push_back(unit);
            ExpVec rho_only(d, 0);
            rho_only[0] = m / 2;
            as.push_back(rho_only);
            out.emplace_back(d, as);
        }
    } else {
        std::vector<ExpVec> a1 = {ExpVec(d, 0)};
        ExpVec rho_only(d, 0);
        rho_only[0] = (m - 1) / 2;
        a1.push_back(rho_only);
        for (int t = 1; t <= (m - 1) / 2; ++t)
            for (const auto& e : compositions(nx, 2 * t)) a1.push_back(prepend((m - 1) / 2 - t, e));
        out.emplace_back(d, a1);
        for (int s = 3; s <= n; ++s) {
            std::vector<ExpVec> as;
            for (int t = 1; t <= (m + 1) / 2; ++t)
                for (const auto& e : compositions(nx, 2 * t - 1))
                    as.push_back(prepend((m + 1) / 2 - t, e));
            ExpVec unit(d, 0);
            unit[s - 2] = 1;
            as.push_back(unit);
            out.emplace_back(d, as);
        }
    }
    return out;
}

Int bkk_first_order(int n, int m) {
    if (n - 1 > 5) throw std::invalid_argument("bkk_first_order: dimension n-1 > 5 unsupported");
    auto supports = first_order_supports(n, m);
    std::vector<LatticeSupport> aug;
    aug.push_back(supports[0]);  // already contains the origin
    for (std::size_t i = 1; i < supports.size(); ++i) aug.push_back(supports[i].with_origin());
    return mixed_volume_lattice(aug);
}

BezoutBounds bezout_bounds(int n, int m, int k) {
    if (n < 3 || m < 2 || k < 1) throw std::invalid_argument("bezout_bounds: bad arguments");
    auto ipow = [](Int base, int e) {
        Int acc = 1;
        for (int i = 0; i < e; ++i) acc *= base;
        return acc;
    };
    BezoutBounds b;
    b.order_k = ipow(Int(static_cast<long>(k) * m), n - 1);
    b.first_order = Int(m - 1) * ipow(Int(m), n - 2);
    return b;
}

LatticeSupport support_of(const StatePoly& poly, bool rho_coords) {
    LatticeSupport s;
    s.dim = poly.nvars();
    for (const auto& [e, c] : poly.terms()) {
        ExpVec v = e;
        if (rho_coords) {
            if (v[0] % 2 != 0)
                throw std::domain_error("support_of: odd R-exponent in rho coordinates");
            v[0] /= 2;
        }
        s.points.insert(v);
    }
    return s;
}

LatticeSupport support_of(const AveragedComponent& comp, bool rho_coords) {
    LatticeSupport s;
    bool first = true;
    for (const auto& [p, poly] : comp.by_pi_power) {
        LatticeSupport part = support_of(poly, rho_coords);
        if (first) {
            s = part;
            first = false;
        } else {
            s.points.insert(part.points.begin(), part.points.end());
        }
    }
    return s;
}

Int bkk_second_order(int n, int m) {
    if (n - 1 > 5) throw std::invalid_argument("bkk_second_order: dimension n-1 > 5 unsupported");
    // generic symbolic system, first order annihilated, order-2 supports
    SymbolTable table;
    table.add("b", true);
    std::vector<ExpVec> idxs;
    {
        ExpVec cur(n, 0);
        std::function<void(int, int)> rec = [&](int pos, int left) {
            if (pos == n - 1) {
                cur[pos] = left;
                idxs.push_back(cur);
                return;
            }
            for (int v = 0; v <= left; ++v) {
                cur[pos] = v;
                rec(pos + 1, left - v);
            }
        };
        rec(0, m);
    }
    for (int j = 1; j <= 2; ++j) table.add("a_" + std::to_string(j));
    for (int j = 1; j <= 2; ++j) table.add("r_" + std::to_string(j));
    for (int s = 3; s <= n; ++s)
        for (int j = 1; j <= 2; ++j) table.add("c_" + std::to_string(s) + "_" + std::to_string(j));
    for (int s = 1; s <= n; ++s)
        for (std::size_t t = 0; t < idxs.size(); ++t)
            for (int j = 0; j <= 1; ++j)
                table.add("p" + std::to_string(s) + "_" + std::to_string(t) + "_" + std::to_string(j));

    const int A = table.size();
    PerturbedSystem sys(n, m, 2, table, ParamPoly::symbol(A, 0));
    const SymbolTable& tt = sys.symbols();
    for (int j = 1; j <= 2; ++j) {
        sys.set_a(j, ParamPoly::symbol(A, tt.require("a_" + std::to_string(j))));
        sys.set_bj(j, ParamPoly::symbol(A, tt.require("r_" + std::to_string(j))));
        for (int s = 3; s <= n; ++s)
            sys.set_c(s, j, ParamPoly::symbol(A, tt.require("c_" + std::to_string(s) + "_" + std::to_string(j))));
    }
    for (int s = 1; s <= n; ++s)
        for (std::size_t t = 0; t < idxs.size(); ++t)
            for (int j = 0; j <= 1; ++j)
                sys.add_p(s, idxs[t], j,
                          ParamPoly::symbol(A, tt.require("p" + std::to_string(s) + "_" +
                                                          std::to_string(t) + "_" + std::to_string(j))));

    VanishResult vr = vanish_first_order(sys);
    AveragedSystem avg = averaged_functions(vr.system, 2);

    // factor the common R power out of each component (R > 0 on the zero set
    // of interest), then pass to rho = R^2 when every exponent stays even
    std::vector<StatePoly> cleared;
    bool all_even = true;
    for (int comp = 0; comp < n - 1; ++comp) {
        auto [pi_pow, poly] = avg.component(2, comp).single_pi_term();
        while (!poly.is_zero() && poly.divisible_by_var(0)) poly = poly.div_var(0);
        for (const auto& [e, c] : poly.terms())
            if (e[0] % 2 != 0) all_even = false;
        cleared.push_back(std::move(poly));
    }
    std::vector<LatticeSupport> supports;
    for (const auto& poly : cleared) supports.push_back(support_of(poly, all_even).with_origin());
    return mixed_volume_lattice(supports);
}

}  // namespace zhopf
