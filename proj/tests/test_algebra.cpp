#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "zhopf/statepoly.hpp"

using namespace zhopf;

namespace {

SymbolTable basic_table() {
    SymbolTable t;
    t.add("b", true);
    t.add("u");
    t.add("v");
    return t;
}

StatePoly random_state_poly(std::mt19937_64& rng, int nvars, int arity, int max_deg, int terms) {
    std::uniform_int_distribution<int> deg(0, max_deg);
    std::uniform_int_distribution<int> num(-6, 6);
    std::uniform_int_distribution<int> den(1, 4);
    StatePoly p(nvars, arity);
    for (int t = 0; t < terms; ++t) {
        ExpVec e(nvars);
        for (int i = 0; i < nvars; ++i) e[i] = deg(rng);
        p.add_term(e, ParamPoly::constant(arity, make_rat(num(rng), den(rng))));
    }
    return p;
}

}  // namespace

TEST_CASE("rational scalars stay canonical") {
    Rat a = make_rat(4, -6);
    CHECK(a.get_num() == -2);
    CHECK(a.get_den() == 3);
    CHECK(rat_pow(make_rat(2, 3), -2) == make_rat(9, 4));
    CHECK(rat_gcd(make_rat(4, 3), make_rat(2, 9)) == make_rat(2, 9));
    CHECK(parse_rat("-7/21") == make_rat(-1, 3));
}

TEST_CASE("state polynomial arithmetic identities") {
    SymbolTable table = basic_table();
    const int A = table.size();
    auto R = StatePoly::variable(2, A, 0);
    auto X = StatePoly::variable(2, A, 1);
    auto one = StatePoly::constant(2, ParamPoly::constant(A, Rat(1)));

    // (R + X)(R - X) = R^2 - X^2
    CHECK((R + X) * (R - X) == R * R - X * X);
    // p * 0 = 0
    CHECK((R * R + X).is_zero() == false);
    CHECK(((R * R + X) * StatePoly::zero(2, A)).is_zero());
    // cancellation
    auto p = R * R * X + one;
    auto q = -(R * R * X);
    CHECK(p + q == one);
    CHECK((p + q).total_degree() == 0);
    CHECK(StatePoly::zero(2, A).total_degree() == -1);
}

TEST_CASE("ring axioms hold on random triples") {
    SymbolTable table = basic_table();
    std::mt19937_64 rng(20240811);
    for (int trial = 0; trial < 40; ++trial) {
        auto p = random_state_poly(rng, 2, table.size(), 3, 4);
        auto q = random_state_poly(rng, 2, table.size(), 3, 4);
        auto r = random_state_poly(rng, 2, table.size(), 3, 4);
        CHECK((p * q) * r == p * (q * r));
        CHECK(p * (q + r) == p * q + p * r);
        CHECK(p + q == q + p);
    }
}

TEST_CASE("partial derivatives") {
    SymbolTable table = basic_table();
    const int A = table.size();
    auto R = StatePoly::variable(2, A, 0);
    auto X = StatePoly::variable(2, A, 1);
    // d/dR R^3 X = 3 R^2 X
    CHECK((R.pow(3) * X).partial_derivative(0) == R * R * X * Rat(3));
    // d/dX R^2 = 0
    CHECK((R * R).partial_derivative(1).is_zero());
}

TEST_CASE("quotient rule on RationalInR agrees with rational sampling") {
    SymbolTable table = basic_table();
    std::mt19937_64 rng(7);
    std::vector<Rat> params = {Rat(2), make_rat(1, 3), make_rat(-2, 5)};
    for (int trial = 0; trial < 10; ++trial) {
        auto num = random_state_poly(rng, 2, table.size(), 3, 4);
        RationalInR f(num, 2);
        RationalInR df = f.derivative(0);
        std::vector<Rat> pt = {make_rat(3, 2), make_rat(-1, 2)};
        Rat rv = pt[0];
        // f = N / R^mu; f' = N'/R^mu - mu N / R^(mu+1)
        Rat N = f.num.evaluate(params, pt);
        Rat Np = f.num.partial_derivative(0).evaluate(params, pt);
        Rat lhs = df.num.evaluate(params, pt) / rat_pow(rv, df.mu);
        Rat rhs = Np / rat_pow(rv, f.mu) - Rat(f.mu) * N / rat_pow(rv, f.mu + 1);
        CHECK(lhs == rhs);
    }
}

TEST_CASE("clear_denominator keeps mu minimal") {
    SymbolTable table = basic_table();
    const int A = table.size();
    auto R = StatePoly::variable(2, A, 0);
    auto X = StatePoly::variable(2, A, 1);

    // (R^2 X + R)/R -> mu = 0, R X + 1
    auto [mu1, f1] = clear_denominator(RationalInR(R * R * X + R, 1));
    CHECK(mu1 == 0);
    CHECK(f1 == R * X + StatePoly::constant(2, ParamPoly::constant(A, Rat(1))));

    // X^2 / R^2 -> untouched
    auto [mu2, f2] = clear_denominator(RationalInR(X * X, 2));
    CHECK(mu2 == 2);
    CHECK(f2 == X * X);

    auto [mu3, f3] = clear_denominator(RationalInR(StatePoly::zero(2, A), 2));
    CHECK(mu3 == 0);
    CHECK(f3.is_zero());
}

TEST_CASE("evaluate is a ring homomorphism") {
    SymbolTable table = basic_table();
    std::mt19937_64 rng(99);
    std::vector<Rat> params = {make_rat(5, 2), Rat(-1), make_rat(2, 7)};
    std::vector<Rat> pt = {make_rat(3, 4), make_rat(-5, 3)};
    for (int trial = 0; trial < 20; ++trial) {
        auto p = random_state_poly(rng, 2, table.size(), 3, 3);
        auto q = random_state_poly(rng, 2, table.size(), 3, 3);
        CHECK((p * q).evaluate(params, pt) == p.evaluate(params, pt) * q.evaluate(params, pt));
        CHECK((p + q).evaluate(params, pt) == p.evaluate(params, pt) + q.evaluate(params, pt));
    }
    CHECK((StatePoly::variable(2, table.size(), 0).pow(2) +
           StatePoly::variable(2, table.size(), 1).pow(2))
              .evaluate(params, {Rat(3), Rat(4)}) == Rat(25));
}

TEST_CASE("Laurent exponents restricted to declared-nonzero symbols") {
    SymbolTable table = basic_table();
    auto b = ParamPoly::symbol(table.size(), 0);
    auto u = ParamPoly::symbol(table.size(), 1);
    CHECK_NOTHROW(b.mul_symbol_pow(table, 0, -2));
    CHECK_THROWS_AS(u.mul_symbol_pow(table, 1, -1), std::domain_error);
    auto binv = b.mul_symbol_pow(table, 0, -2);  // b^-1
    CHECK((binv * b) == ParamPoly::constant(table.size(), Rat(1)));
}

TEST_CASE("substitution and canonical text form") {
    SymbolTable table = basic_table();
    const int A = table.size();
    auto u = ParamPoly::symbol(A, 1);
    auto v = ParamPoly::symbol(A, 2);
    auto p = u * u + v * Rat(2);
    auto q = p.substitute(1, v + ParamPoly::constant(A, Rat(1)));  // u -> v + 1
    CHECK(q == (v + ParamPoly::constant(A, Rat(1))).pow(2) + v * Rat(2));
    CHECK(p.to_string(table) == "u^2 + 2*v");
}
