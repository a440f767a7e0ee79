#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "zhopf/realroots.hpp"

using namespace zhopf;
using namespace zhopf::testing;

namespace {

// binds the cubic case study parameters by name; unlisted symbols get 0
std::vector<Rat> cubic_binding(const PerturbedSystem& sys, const std::map<std::string, Rat>& vals) {
    std::vector<Rat> out(sys.arity(), Rat(0));
    for (const auto& [name, v] : vals) out[sys.symbols().require(name)] = v;
    return out;
}

bool cert_contains(const RootCertificate& cert, const std::vector<double>& pt, double tol) {
    for (std::size_t i = 0; i < pt.size(); ++i)
        if (std::abs(cert.midpoint[i] - pt[i]) > tol) return false;
    return true;
}

}  // namespace

TEST_CASE("univariate isolation") {
    // x^2 - 2 on [-2, 2]: two roots
    UPoly p = {Rat(-2), Rat(0), Rat(1)};
    auto ivs = isolate_univariate(p, Rat(-2), Rat(2));
    CHECK(ivs.size() == 2);
    // x^2 + 1: none
    CHECK(isolate_univariate({Rat(1), Rat(0), Rat(1)}, Rat(-10), Rat(10)).empty());
    // x^3 - 3x + 1 on [-2, 2]: three roots, cross-checked by sign scanning
    UPoly q = {Rat(1), Rat(-3), Rat(0), Rat(1)};
    auto qi = isolate_univariate(q, Rat(-2), Rat(2));
    CHECK(qi.size() == 3);
    long brute = 0;
    double prev = std::nan("");
    for (int i = 0; i <= 4000; ++i) {
        double x = -2 + 4.0 * i / 4000;
        double v = x * x * x - 3 * x + 1;
        if (!std::isnan(prev) && prev * v < 0) ++brute;
        prev = v;
    }
    CHECK(brute == 3);
    // refinement tightens without losing the root
    auto r0 = refine_root(q, qi[0], make_rat(1, 1000000));
    CHECK(r0.width() <= make_rat(1, 1000000));
    CHECK(sturm_count(q, r0.lo, r0.hi) == 1);
    // exact rational root lands on a point interval eventually
    UPoly lin = {Rat(-1), Rat(1)};  // x - 1
    auto li = isolate_univariate(lin, Rat(0), Rat(2));
    REQUIRE(li.size() == 1);
}

TEST_CASE("resultant elimination discovers solution coordinates") {
    // f = R^2 + X^2 - 5, g = R X - 2: solutions (1,2),(2,1),(-1,-2),(-2,-1)
    SymbolTable t;
    auto vars = std::vector<std::string>{"R", "X"};
    StatePoly f = parse_state_poly(t, vars, "R^2 + X^2 - 5");
    StatePoly g = parse_state_poly(t, vars, "R*X - 2");
    UPoly er = eliminate(to_bpoly(f, 0, 1), to_bpoly(g, 0, 1));
    // roots of the eliminant include R in {1, 2, -1, -2}
    for (long r : {1L, 2L, -1L, -2L}) CHECK(upoly_eval(er, Rat(r)) == 0);
    CHECK(upoly_eval(er, Rat(3)) != 0);
}

TEST_CASE("count_bivariate on a hand-checkable system") {
    SymbolTable t;
    auto vars = std::vector<std::string>{"R", "X"};
    SemiAlgSystem sys;
    sys.equations = {parse_state_poly(t, vars, "R^2 + X^2 - 5").bind_params({}),
                     parse_state_poly(t, vars, "R*X - 2").bind_params({})};
    sys.positive_vars = {0};
    sys.box = SemiAlgSystem::default_box(2);
    CountResult res = count_bivariate(sys);
    CHECK(res.complete);
    CHECK(res.count == 2);  // only the R > 0 pair
    bool saw12 = false, saw21 = false;
    for (const auto& c : res.certificates) {
        if (cert_contains(c, {1, 2}, 1e-9)) saw12 = true;
        if (cert_contains(c, {2, 1}, 1e-9)) saw21 = true;
    }
    CHECK(saw12);
    CHECK(saw21);

    CountResult box = count_box(sys);
    CHECK(box.complete);
    CHECK(box.count == 2);
}

TEST_CASE("count_box on a linear system in three variables") {
    SymbolTable t;
    auto vars = std::vector<std::string>{"R", "X3", "X4"};
    SemiAlgSystem sys;
    sys.equations = {parse_state_poly(t, vars, "R - 1").bind_params({}),
                     parse_state_poly(t, vars, "X3 - 2").bind_params({}),
                     parse_state_poly(t, vars, "X4 + 1").bind_params({})};
    sys.positive_vars = {0};
    sys.box = SemiAlgSystem::default_box(3);
    CountResult res = count_box(sys);
    CHECK(res.complete);
    REQUIRE(res.count == 1);
    CHECK(cert_contains(res.certificates[0], {1, 2, -1}, 1e-9));
    CHECK(res.certificates[0].jacobian_sign != 0);
}

TEST_CASE("jacobian determinants") {
    SymbolTable t;
    auto vars = std::vector<std::string>{"R", "X"};
    // identity map
    auto id = jacobian_det_poly({parse_state_poly(t, vars, "R").bind_params({}),
                                 parse_state_poly(t, vars, "X").bind_params({})});
    CHECK(id == parse_state_poly(t, vars, "1").bind_params({}));
    // diagonal squares
    auto diag = jacobian_det_poly({parse_state_poly(t, vars, "R^2").bind_params({}),
                                   parse_state_poly(t, vars, "X^2").bind_params({})});
    CHECK(diag == parse_state_poly(t, vars, "4*R*X").bind_params({}));
}

TEST_CASE("cubic case study: first-order Jacobian numerator golden form") {
    PerturbedSystem sys = cubic_case_study_manual(1);
    AveragedSystem avg = averaged_functions(sys, 1);
    JacobianDet dj = jacobian_det(avg.orders[0]);
    CHECK(dj.pi_power == 2);
    CHECK(dj.mu == 0);

    const SymbolTable& t = sys.symbols();
    auto vars = state_var_names(3);
    // D_1 = -(2 pi^2 / beta^10) Dbar_1
    StatePoly dbar = parse_state_poly(
        t, vars,
        "-2*beta^8*mu1*alpha1 + (-2*beta^2*a10*a30 + 4*a10^2)*X3^2"
        " + (beta^6*a30*a60 - 2*beta^4*a10*a60 - beta^4*a30^2 + beta^4*a30*a40 + 3*beta^2*a10*a30"
        " - 2*beta^2*a10*a40 - 2*a10^2)*R^2"
        " + (-beta^6*a30*mu1 + 2*beta^4*a10*mu1 - 4*beta^4*a10*alpha1)*X3");
    StatePoly expected = dbar * parse_param_poly(t, "-2/beta^10");
    CHECK(dj.num == expected);
}

TEST_CASE("cubic case study: second-order Jacobian numerator golden form") {
    PerturbedSystem base = cubic_case_study_manual(2);
    PerturbedSystem sys = base.substituted(cubic_vanishing_substitution(base));
    AveragedSystem avg = averaged_functions(sys, 2);
    JacobianDet dj = jacobian_det(avg.orders[1]);
    CHECK(dj.pi_power == 2);

    const SymbolTable& t = sys.symbols();
    auto vars = state_var_names(3);
    // D_2 = -(pi^2 / (4 beta^10)) Dbar_2
    StatePoly dbar = parse_state_poly(
        t, vars,
        "-16*beta^8*mu2*alpha2 + 3*R^4*a20^2*a60^2"
        " + (-16*beta^2*a11*a31 + 32*a11^2)*X3^2"
        " + (-4*beta^2*a20*a31*a60 - 4*a11*a20*a60)*R^2*X3"
        " + (-8*beta^6*a31*mu2 + 16*beta^4*a11*mu2 - 32*beta^4*a11*alpha2)*X3"
        " + (8*beta^4*a20*a60*alpha2 - 6*beta^4*a20*a60*mu2 - 16*a11^2 - 16*beta^2*a11*a41"
        " + 24*beta^2*a11*a31 + 8*beta^4*a31*a41 - 8*beta^4*a31^2 - 16*beta^4*a11*a61"
        " + 8*beta^6*a31*a61)*R^2");
    StatePoly expected = dbar * parse_param_poly(t, "-1/(4*beta^10)");
    CHECK(dj.num == expected);
}

TEST_CASE("cubic case study: certified count at the sample satisfying the fourth condition") {
    PerturbedSystem sys = cubic_case_study_manual(1);
    AveragedSystem avg = averaged_functions(sys, 1);
    auto binding = cubic_binding(sys, {{"beta", Rat(1)},
                                       {"alpha1", Rat(1)},
                                       {"mu1", Rat(-2)},
                                       {"a10", Rat(1)},
                                       {"a30", Rat(0)},
                                       {"a40", Rat(0)},
                                       {"a60", Rat(1)}});
    SemiAlgSystem sas = semialg_from_averaged(avg, 1, binding);
    CountResult res = count_bivariate(sas);
    CHECK(res.complete);
    REQUIRE(res.count == 1);
    CHECK(cert_contains(res.certificates[0], {1, 1}, 1e-9));
    CHECK(res.certificates[0].jacobian_sign != 0);

    CountResult box = count_box(sas);
    CHECK(box.count == 1);
}

TEST_CASE("cubic case study: order-2 count at a sample satisfying the fourth barred condition") {
    PerturbedSystem base = cubic_case_study_manual(2);
    PerturbedSystem sys = base.substituted(cubic_vanishing_substitution(base));
    AveragedSystem avg = averaged_functions(sys, 2);
    REQUIRE(averaged_functions(sys, 1).order_vanishes(1));

    std::map<std::string, Rat> sample = {{"beta", Rat(1)}, {"alpha2", Rat(1)}, {"mu2", Rat(1)},
                                         {"a11", Rat(1)},  {"a31", Rat(2)},   {"a20", Rat(1)},
                                         {"a60", Rat(-1)}, {"a41", Rat(0)},   {"a61", Rat(0)}};
    // the sample satisfies the fourth barred condition
    CHECK(eval_condition(ConditionFamily::Cbar, 4, sample));

    auto binding = cubic_binding(sys, sample);
    SemiAlgSystem sas = semialg_from_averaged(avg, 2, binding);
    CountResult res = count_bivariate(sas);
    CHECK(res.complete);
    CHECK(res.count == 2);
    CountResult box = count_box(sas);
    CHECK(box.count == 2);
}

TEST_CASE("condition predicates") {
    std::map<std::string, Rat> c4_sample = {{"beta", Rat(1)}, {"alpha1", Rat(1)}, {"mu1", Rat(-2)},
                                            {"a10", Rat(1)},  {"a30", Rat(0)},   {"a40", Rat(0)},
                                            {"a60", Rat(1)}};
    CHECK(eval_condition(ConditionFamily::C, 4, c4_sample));
    CHECK_FALSE(eval_condition(ConditionFamily::C, 1, c4_sample));

    std::map<std::string, Rat> t16_sample = {{"beta", Rat(1)}, {"a60", Rat(1)}, {"b20", Rat(1)},
                                             {"a51", Rat(1)},  {"a11", Rat(1)}, {"a20", Rat(1)},
                                             {"a40", Rat(1)}};
    CHECK(eval_condition(ConditionFamily::T, 16, t16_sample));
    CHECK_FALSE(eval_condition(ConditionFamily::T, 1, t16_sample));

    // the 16 patterns are exactly the even-sign-change vectors: product > 0
    std::map<std::string, Rat> probe = t16_sample;
    probe["a60"] = Rat(-1);
    probe["b20"] = Rat(-1);
    bool any = false;
    for (int i = 1; i <= 16; ++i) any = any || eval_condition(ConditionFamily::T, i, probe);
    CHECK(any);
    probe["b20"] = Rat(1);  // odd number of negatives: no condition holds
    bool none = false;
    for (int i = 1; i <= 16; ++i) none = none || eval_condition(ConditionFamily::T, i, probe);
    CHECK_FALSE(none);
}

TEST_CASE("extremal three-dimensional instances achieve the exact counts") {
    for (int m = 2; m <= 5; ++m) {
        SemiAlgSystem sys = construct_extremal_3d(m);
        CountResult res = count_bivariate(sys);
        CHECK(res.complete);
        CHECK(res.count == extremal_3d_expected_count(m));
    }
}

TEST_CASE("random instances never exceed the three-dimensional maximum") {
    for (int m = 2; m <= 5; ++m) {
        for (unsigned long seed = 0; seed < 10; ++seed) {
            SemiAlgSystem sys = random_first_order_3d(m, 900 + seed);
            CountResult res = count_box(sys);
            if (res.complete) CHECK(res.count <= extremal_3d_expected_count(m));
        }
    }
}

TEST_CASE("certificate stability under bisection") {
    SymbolTable t;
    auto vars = std::vector<std::string>{"R", "X"};
    SemiAlgSystem sys;
    sys.equations = {parse_state_poly(t, vars, "R^2 + X^2 - 5").bind_params({}),
                     parse_state_poly(t, vars, "R*X - 2").bind_params({})};
    sys.positive_vars = {0};
    sys.box = SemiAlgSystem::default_box(2);
    CountResult res = count_bivariate(sys);
    REQUIRE(res.count == 2);
    for (const auto& cert : res.certificates) {
        // re-run the solver on a small box around the certificate
        SemiAlgSystem local = sys;
        local.box.clear();
        for (const auto& [lo, hi] : cert.box) {
            Rat w = hi - lo;
            Rat pad = w + make_rat(1, 1000);
            local.box.emplace_back(lo - pad, hi + pad);
        }
        if (local.box[0].first <= 0) local.box[0].first = make_rat(1, 1000000);
        CountResult again = count_box(local);
        CHECK(again.count == 1);
    }
}
