#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "zhopf/geometry.hpp"

using namespace zhopf;
using namespace zhopf::testing;

namespace {

LatticeSupport supp(int dim, std::vector<ExpVec> pts) { return LatticeSupport(dim, std::move(pts)); }

Polytope simplex(int d) {
    std::vector<ExpVec> pts = {ExpVec(d, 0)};
    for (int i = 0; i < d; ++i) {
        ExpVec e(d, 0);
        e[i] = 1;
        pts.push_back(e);
    }
    return newton_polytope(supp(d, pts));
}

Polytope dilate(const Polytope& p, long f) {
    Polytope q = p;
    for (auto& v : q.vertices)
        for (auto& x : v) x *= f;
    return q;
}

LatticeSupport random_support(std::mt19937_64& rng, int d, int count, int lo, int hi) {
    std::uniform_int_distribution<int> coord(lo, hi);
    std::vector<ExpVec> pts;
    for (int i = 0; i < count; ++i) {
        ExpVec e(d);
        for (int j = 0; j < d; ++j) e[j] = coord(rng);
        pts.push_back(e);
    }
    return supp(d, pts);
}

}  // namespace

TEST_CASE("hull vertex extraction") {
    // unit square
    auto sq = newton_polytope(supp(2, {{0, 0}, {1, 0}, {0, 1}, {1, 1}}));
    CHECK(sq.vertices.size() == 4);
    // collinear points collapse to a segment
    auto seg = newton_polytope(supp(2, {{0, 0}, {1, 1}, {2, 2}}));
    CHECK(seg.vertices.size() == 2);
    CHECK(polytope_volume(seg) == 0);
    // interior and edge-midpoint points are dropped
    auto tri = newton_polytope(supp(2, {{0, 0}, {4, 0}, {0, 4}, {1, 1}, {2, 0}, {2, 2}}));
    CHECK(tri.vertices.size() == 3);
    // a 3D degenerate configuration inside a plane
    auto planar = newton_polytope(supp(3, {{0, 0, 0}, {1, 0, 1}, {0, 1, 1}, {1, 1, 2}}));
    CHECK(planar.vertices.size() == 4);
    CHECK(polytope_volume(planar) == 0);
}

TEST_CASE("volumes of reference bodies") {
    CHECK(polytope_volume(simplex(2)) == make_rat(1, 2));
    CHECK(polytope_volume(simplex(3)) == make_rat(1, 6));
    CHECK(polytope_volume(simplex(4)) == make_rat(1, 24));
    auto sq = newton_polytope(supp(2, {{0, 0}, {1, 0}, {0, 1}, {1, 1}}));
    CHECK(polytope_volume(sq) == 1);
    auto sq2 = newton_polytope(supp(2, {{0, 0}, {2, 0}, {0, 2}, {2, 2}}));
    CHECK(polytope_volume(sq2) == 4);
    auto cube = newton_polytope(
        supp(3, {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0}, {1, 0, 1}, {0, 1, 1}, {1, 1, 1}}));
    CHECK(polytope_volume(cube) == 1);
}

TEST_CASE("minkowski sums") {
    auto segx = newton_polytope(supp(2, {{0, 0}, {1, 0}}));
    auto segy = newton_polytope(supp(2, {{0, 0}, {0, 1}}));
    auto sum = minkowski_sum(segx, segy);
    CHECK(sum.vertices.size() == 4);
    CHECK(polytope_volume(sum) == 1);

    // P + point translates
    auto tri = simplex(2);
    auto pt = newton_polytope(supp(2, {{3, 5}}));
    auto tr = minkowski_sum(tri, pt);
    CHECK(polytope_volume(tr) == polytope_volume(tri));
    CHECK(tr.vertices[0][0] >= 3);

    // simplex + simplex = dilated simplex
    auto two = minkowski_sum(tri, tri);
    CHECK(polytope_volume(two) == 4 * polytope_volume(tri));
    CHECK(two.vertices.size() == 3);
}

TEST_CASE("mixed volume basics") {
    auto tri = simplex(2);
    CHECK(mixed_volume({tri, tri}) == 1);
    CHECK(mixed_volume({dilate(tri, 2), dilate(tri, 3)}) == 6);
    // MV(P,...,P) = d! Vol(P)
    std::mt19937_64 rng(5150);
    for (int d = 2; d <= 4; ++d) {
        for (int trial = 0; trial < 3; ++trial) {
            auto s = random_support(rng, d, d + 3, 0, 2);
            auto p = newton_polytope(s);
            std::vector<Polytope> copies(d, p);
            CHECK(mixed_volume(copies) == Rat(int_factorial(d)) * polytope_volume(p));
        }
    }
}

TEST_CASE("mixed volume multilinearity and Bezout on dense supports") {
    std::mt19937_64 rng(6021);
    // dilation multilinearity in the first slot
    for (int trial = 0; trial < 4; ++trial) {
        auto p = newton_polytope(random_support(rng, 3, 5, 0, 2));
        auto q = newton_polytope(random_support(rng, 3, 5, 0, 2));
        auto r = newton_polytope(random_support(rng, 3, 5, 0, 2));
        Rat base = mixed_volume({p, q, r});
        CHECK(mixed_volume({dilate(p, 3), q, r}) == 3 * base);
    }
    // MV(d1 S, ..., dd S) = prod d_i for the unit simplex
    CHECK(mixed_volume({dilate(simplex(2), 2), dilate(simplex(2), 5)}) == 10);
    CHECK(mixed_volume({dilate(simplex(3), 2), dilate(simplex(3), 3), dilate(simplex(3), 4)}) == 24);
}

TEST_CASE("first-order supports match the formulas and the engine") {
    // n=3, m=2
    auto s32 = first_order_supports(3, 2);
    CHECK(s32[0] == supp(2, {{0, 1}, {0, 0}}));
    CHECK(s32[1] == supp(2, {{0, 2}, {0, 1}, {1, 0}}));
    // cardinalities: |A1| = 1 + C(1,1), |As| = 2 + C(2,2)
    CHECK(s32[0].points.size() == 2);
    CHECK(s32[1].points.size() == 3);

    // odd m: A1 contains ((m-1)/2, 0...)
    auto s33 = first_order_supports(3, 3);
    CHECK(s33[0].points.count({1, 0}) == 1);

    // supports of the symbolic first-order averaged functions equal the
    // formula-generated ones (after factoring R from the radial component)
    for (int n : {3, 4}) {
        for (int m : {2, 3, 4, 5}) {
            PerturbedSystem sys = generic_symbolic_system(n, m, 1);
            AveragedSystem avg = averaged_functions(sys, 1);
            auto formula = first_order_supports(n, m);
            for (int comp = 0; comp < n - 1; ++comp) {
                AveragedComponent c = avg.component(1, comp);
                REQUIRE(c.by_pi_power.size() == 1);
                StatePoly poly = c.by_pi_power.begin()->second;
                if (comp == 0) poly = poly.div_var(0);  // fbar_{1,1} = b f_{1,1} / R
                CHECK(support_of(poly, /*rho_coords=*/true) == formula[comp]);
            }
        }
    }
}

TEST_CASE("cardinality formulas for the first-order supports") {
    auto binom = [](long n, long k) { return int_binomial(n, k).get_si(); };
    for (int n : {3, 4, 5}) {
        for (int m : {2, 3, 4, 5, 6}) {
            auto s = first_order_supports(n, m);
            long a1 = 0, as = 0;
            if (m % 2 == 0) {
                a1 = 1;
                for (int t = 1; t <= m / 2; ++t) a1 += binom(n + 2 * t - 4, 2 * t - 1);
                as = 2;
                for (int t = 1; t <= m / 2; ++t) as += binom(n + 2 * t - 3, 2 * t);
            } else {
                a1 = 2;
                for (int t = 1; t <= (m - 1) / 2; ++t) a1 += binom(n + 2 * t - 3, 2 * t);
                as = 1;
                for (int t = 1; t <= (m + 1) / 2; ++t) as += binom(n + 2 * t - 4, 2 * t - 1);
            }
            CHECK(static_cast<long>(s[0].points.size()) == a1);
            CHECK(static_cast<long>(s[1].points.size()) == as);
        }
    }
}

TEST_CASE("first-order BKK bounds reproduce the published grid") {
    // n = 3 row: 1, 3, 6, 10, 15, 21, 28 for m = 2..8
    const long row3[] = {1, 3, 6, 10, 15, 21, 28};
    for (int m = 2; m <= 8; ++m) CHECK(bkk_first_order(3, m) == row3[m - 2]);
    // n = 4 row: 2, 9, 24, 50 for m = 2..5
    const long row4[] = {2, 9, 24, 50};
    for (int m = 2; m <= 5; ++m) CHECK(bkk_first_order(4, m) == row4[m - 2]);
}

TEST_CASE("closed-form special cases of the BKK bound") {
    // m = 2: 2^(n-3); m = 3: 3^(n-2)
    CHECK(bkk_first_order(3, 2) == 1);
    CHECK(bkk_first_order(4, 2) == 2);
    CHECK(bkk_first_order(5, 2) == 4);
    CHECK(bkk_first_order(3, 3) == 3);
    CHECK(bkk_first_order(4, 3) == 9);
    CHECK(bkk_first_order(5, 3) == 27);
}

TEST_CASE("Bezout bounds and BKK dominance") {
    auto b321 = bezout_bounds(3, 2, 1);
    CHECK(b321.order_k == 4);
    CHECK(b321.first_order == 2);
    CHECK(bezout_bounds(3, 2, 2).order_k == 16);
    CHECK(bezout_bounds(5, 4, 1).first_order == 192);
    for (int n = 3; n <= 4; ++n)
        for (int m = 2; m <= 5; ++m)
            CHECK(bkk_first_order(n, m) <= bezout_bounds(n, m, 1).first_order);
}

TEST_CASE("second-order BKK spot checks") {
    CHECK(bkk_second_order(3, 2) == 3);
}
