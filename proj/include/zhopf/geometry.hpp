#pragma once

#include <set>
#include <vector>

#include "zhopf/averaging.hpp"
#include "zhopf/rat.hpp"

namespace zhopf {

// Finite set of integer exponent vectors.
struct LatticeSupport {
    int dim = 0;
    std::set<ExpVec> points;

    LatticeSupport() = default;
    LatticeSupport(int d, std::vector<ExpVec> pts) : dim(d) {
        for (auto& p : pts) {
            if (static_cast<int>(p.size()) != d)
                throw std::invalid_argument("LatticeSupport: arity mismatch");
            points.insert(std::move(p));
        }
    }

    LatticeSupport with_origin() const {
        LatticeSupport s = *this;
        s.points.insert(ExpVec(dim, 0));
        return s;
    }

    bool operator==(const LatticeSupport& o) const { return dim == o.dim && points == o.points; }
};

// Exact-vertex polytope. Vertices are the extreme points only.
struct Polytope {
    int dim = 0;
    std::vector<std::vector<Rat>> vertices;
};

using RatPoint = std::vector<Rat>;

Polytope convex_hull(int dim, const std::vector<RatPoint>& points);
Polytope newton_polytope(const LatticeSupport& support);

// Exact Euclidean d-volume (0 for lower-dimensional hulls).
Rat polytope_volume(const Polytope& p);

Polytope minkowski_sum(const Polytope& a, const Polytope& b);

// Inclusion-exclusion mixed volume of dim polytopes in dimension dim.
Rat mixed_volume(const std::vector<Polytope>& ps);

Int mixed_volume_lattice(const std::vector<LatticeSupport>& supports);

// First-order support constructors in the (rho, X_3, ..., X_n) variables,
// rho = R^2; returns supports for components 1, 3, ..., n.
std::vector<LatticeSupport> first_order_supports(int n, int m);

// Mixed volume of the origin-augmented first-order supports.
Int bkk_first_order(int n, int m);

struct BezoutBounds {
    Int order_k;      // (k m)^(n-1)
    Int first_order;  // (m-1) m^(n-2)
};
BezoutBounds bezout_bounds(int n, int m, int k);

// Exponent support of a cleared averaged component. When rho_coords is set,
// R-exponents are halved (they must all be even).
LatticeSupport support_of(const StatePoly& poly, bool rho_coords = false);
LatticeSupport support_of(const AveragedComponent& comp, bool rho_coords = false);

// BKK bound of the order-2 averaged system of the fully generic system after
// first-order vanishing: mixed volume of the origin-augmented supports.
Int bkk_second_order(int n, int m);

}  // namespace zhopf
