#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "zhopf/averaging.hpp"
#include "zhopf/interval.hpp"
#include "zhopf/statepoly.hpp"

namespace zhopf {

// ---------------------------------------------------------------------------
// univariate exact machinery

using UPoly = std::vector<Rat>;  // coefficient of x^i at index i

UPoly upoly_normalize(UPoly p);
UPoly upoly_derivative(const UPoly& p);
Rat upoly_eval(const UPoly& p, const Rat& x);
int upoly_degree(const UPoly& p);

struct RatInterval {
    Rat lo, hi;
    Rat mid() const { return (lo + hi) / 2; }
    Rat width() const { return hi - lo; }
};

// Disjoint isolating intervals (one distinct real root each) inside [lo, hi],
// by Sturm bisection. Exact; endpoints are never roots.
std::vector<RatInterval> isolate_univariate(const UPoly& p, const Rat& lo, const Rat& hi);

// Refines an isolating interval below the requested width.
RatInterval refine_root(const UPoly& p, RatInterval iv, const Rat& max_width);

// Number of distinct real roots in (lo, hi].
long sturm_count(const UPoly& p, const Rat& lo, const Rat& hi);

// ---------------------------------------------------------------------------
// bivariate elimination

// polynomial in y with UPoly-in-x coefficients; index = degree in y
using BPoly = std::vector<UPoly>;

BPoly to_bpoly(const StatePoly& p, int var_x, int var_y);

// Subresultant pseudo-remainder elimination of y. The result vanishes at
// every x-coordinate of a common root (given nonvanishing leading
// coefficients, which the caller accounts for separately).
UPoly eliminate(const BPoly& f, const BPoly& g);

// ---------------------------------------------------------------------------
// semi-algebraic counting

struct SemiAlgSystem {
    std::vector<StatePoly> equations;            // arity-0 coefficients
    std::vector<int> positive_vars;              // variables constrained > 0
    std::vector<StatePoly> nonvanishing;         // must be nonzero at solutions
    std::vector<std::pair<Rat, Rat>> box;        // search box per variable

    int nvars() const { return equations.empty() ? 0 : equations[0].nvars(); }
    static std::vector<std::pair<Rat, Rat>> default_box(int nvars);
};

struct RootCertificate {
    std::vector<std::pair<Rat, Rat>> box;  // rational isolating box
    std::vector<double> midpoint;
    int jacobian_sign = 0;                 // sign of det J over the box
    bool multiplicity_one = true;
    bool boundary_suspect = false;         // within 1e-9 of the R > 0 wall
};

struct CountResult {
    long count = 0;
    std::vector<RootCertificate> certificates;
    bool complete = true;      // false when refinement budget exhausted
    long undecided_boxes = 0;  // count is then a verified lower bound
};

// Resultant-elimination counting for two equations in two variables, with
// Krawczyk certification of every counted root.
CountResult count_bivariate(const SemiAlgSystem& sys);

// Branch-and-prune subdivision counting for up to 4 variables.
CountResult count_box(const SemiAlgSystem& sys, long max_boxes = 10'000'000);

// ---------------------------------------------------------------------------
// Jacobians

// Exact symbolic determinant of the Jacobian of plain polynomial components.
StatePoly jacobian_det_poly(const std::vector<StatePoly>& fs);

// Determinant of the Jacobian of full averaged components (pi powers and
// R denominators included); returns the cleared numerator with its scale
// data: det = pi^pi_power * num / R^mu.
struct JacobianDet {
    StatePoly num;
    int mu = 0;
    int pi_power = 0;
};
JacobianDet jacobian_det(const std::vector<AveragedComponent>& fs);

// Counting problem for the order-k averaged system: equations are the
// cleared numerators (pi scales and R denominators dropped; both are nonzero
// on the R > 0 zero set), the nonvanishing constraint is the Jacobian-
// determinant numerator. Parameter values bind any remaining symbols.
SemiAlgSystem semialg_from_averaged(const AveragedSystem& avg, int order,
                                    const std::vector<Rat>& param_values);

// ---------------------------------------------------------------------------
// extremal three-dimensional instances

// Coefficient choice realizing the maximal first-order count for n = 3:
// m/2 cycles for even m, m for odd m.
SemiAlgSystem construct_extremal_3d(int m);
long extremal_3d_expected_count(int m);

// Random instance on the same first-order support shapes (for bound sweeps).
SemiAlgSystem random_first_order_3d(int m, unsigned long seed);

// ---------------------------------------------------------------------------
// printed condition sets

enum class ConditionFamily { C, Cbar, T, Tbar };

// Evaluates the printed sign-condition lists. Parameters are bound by name
// (beta, alpha1, mu1, a10..a62 for C/Cbar; beta, a10..a72, b10..b22 for
// T/Tbar). Throws on a missing binding.
bool eval_condition(ConditionFamily family, int index,
                    const std::map<std::string, Rat>& params);

// Number of conditions in a family (4, 4, 16, 32).
int condition_count(ConditionFamily family);

}  // namespace zhopf
