#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "heightlab/json_io.hpp"
#include "heightlab/poly.hpp"
#include "heightlab/series.hpp"
#include "oracles.hpp"

#include <random>

using namespace hl;

namespace {

oracle::Sparse to_sparse(const Poly& P) {
    oracle::Sparse out;
    for (const auto& [m, c] : P.terms()) out[m.to_index(P.nvars())] = c;
    return out;
}

Poly random_poly(std::mt19937_64& gen, std::vector<std::string> vars, int deg, int terms) {
    std::uniform_int_distribution<int> coef(-9, 9), e(0, deg);
    std::vector<Poly::Term> ts;
    for (int k = 0; k < terms; ++k) {
        MultiIndex I(vars.size());
        int left = deg;
        for (auto& x : I) {
            x = std::min(left, e(gen));
            left -= x;
        }
        ts.emplace_back(Mono::from(I), Rational(coef(gen)));
    }
    return Poly::from_terms(std::move(vars), std::move(ts));
}

}  // namespace

TEST_CASE("multi-index helpers") {
    CHECK(length({2, 0, 3}) == 5);
    CHECK(mi_factorial({2, 3}) == 12);
    CHECK(mi_binomial({3, 2}, {1, 1}) == 6);
    CHECK(indices_of_length(2, 2).size() == 3);
    CHECK(indices_up_to(3, 2).size() == 10);
}

TEST_CASE("canonical storage") {
    Poly P = parse_poly_text("X^2 + 2*X - X^2 - 2*X");
    CHECK(P.is_zero());
    Poly Q = parse_poly_text("3*X*Y + 0*Y + 1/2");
    CHECK(Q.size() == 2);
    CHECK(Q.total_degree() == 2);
    CHECK(Q.constant_term() == ratio(1, 2));
    CHECK(Q.to_string() == "3*X*Y + 1/2");
}

TEST_CASE("infix parser against JSON round trip") {
    Poly P = parse_poly_text("(X0 - 2*X1)^3 + 5/3*X1*X0^2", {"X0", "X1"});
    Poly Q = poly_from_json(poly_to_json(P));
    CHECK(P == Q);
    CHECK(P.coefficient({0, 3}) == -8);
    CHECK(P.coefficient({2, 1}) == ratio(-6, 1) + ratio(5, 3));
    CHECK(parse_poly(poly_to_json(P).dump()) == P);
    CHECK_THROWS(parse_poly_text("X +"));
    CHECK_THROWS(parse_poly_text("X*Z", {"X", "Y"}));
}

TEST_CASE("divided derivatives") {
    CHECK(parse_poly_text("X^3").divided_derivative({2}) == parse_poly_text("3*X"));
    Poly P = parse_poly_text("X^2*Y + X*Y", {"X", "Y"});
    CHECK(P.divided_derivative({0, 0}) == P);
    CHECK(P.divided_derivative({1, 1}) == parse_poly_text("2*X + 1", {"X", "Y"}));
    // Against repeated single derivatives divided by I!.
    std::mt19937_64 gen(3);
    for (int k = 0; k < 50; ++k) {
        Poly R = random_poly(gen, {"X", "Y", "Z"}, 6, 8);
        MultiIndex I{static_cast<int>(gen() % 3), static_cast<int>(gen() % 3), static_cast<int>(gen() % 2)};
        Poly D = R;
        for (int v = 0; v < 3; ++v)
            for (int j = 0; j < I[v]; ++j) D = D.derivative(v);
        D *= Rational(1, 1) / Rational(mi_factorial(I));
        CHECK(R.divided_derivative(I) == D);
    }
}

TEST_CASE("length at places") {
    CHECK(length_v(parse_poly_text("3*X - 2"), Place::infinite()) == 5);
    CHECK(length_v(Poly({"X"}), Place::infinite()) == 0);
    CHECK(length_v(parse_poly_text("6*X + 4"), Place::finite(2)) == ratio(3, 4));
}

TEST_CASE("substitution") {
    Poly P = parse_poly_text("T^2 - Y", {"T", "Y"});
    std::vector<std::string> u{"U"};
    Poly img = P.substitute({parse_poly_text("1 + U", u), Poly::constant(u, 1)});
    CHECK(img == parse_poly_text("U^2 + 2*U", u));
    Poly Q = parse_poly_text("X0*X1", {"X0", "X1"});
    std::vector<std::string> t{"T"};
    CHECK(Q.substitute({Poly::constant(t, 1), parse_poly_text("1 + T", t)}) == parse_poly_text("1 + T", t));
}

TEST_CASE("multiplication against the oracle") {
    std::mt19937_64 gen(17);
    for (int k = 0; k < 100; ++k) {
        Poly A = random_poly(gen, {"X", "Y", "Z"}, 4, 6), B = random_poly(gen, {"X", "Y", "Z"}, 4, 6);
        CHECK(to_sparse(A * B) == oracle::mul(to_sparse(A), to_sparse(B)));
        CHECK(to_sparse(A.pow(3)) == oracle::power(to_sparse(A), 3, 3));
    }
}

TEST_CASE("truncated series") {
    using S = TruncatedSeries<Rational>;
    std::vector<std::string> t{"T"};
    S s = S::constant(t, 2, 1) + S::variable(t, 2, 0, 1);
    s.set(Mono::from({2}), 1);
    S sq = substitute_series(parse_poly_text("X^2"), std::vector<S>{s});
    CHECK(sq.coefficient(MultiIndex{0}) == 1);
    CHECK(sq.coefficient(MultiIndex{1}) == 2);
    CHECK(sq.coefficient(MultiIndex{2}) == 3);

    std::vector<std::string> t2{"T1", "T2"};
    S a = S::constant(t2, 3, 1) + S::variable(t2, 3, 0, 2);
    a.set(Mono::from({1, 1}), 1);
    auto slices = a.homogeneous_decomposition();
    REQUIRE(slices.size() == 4);
    CHECK(slices[0].coefficient(MultiIndex{0, 0}) == 1);
    CHECK(slices[1].coefficient(MultiIndex{1, 0}) == 2);
    CHECK(slices[2].coefficient(MultiIndex{1, 1}) == 1);
    CHECK(slices[3].is_zero());

    S one = S::constant(t, 2, 1) + S::variable(t, 2, 0, 1);
    S cube = one * one * one;
    CHECK(cube.coefficient(MultiIndex{1}) == 3);
    CHECK(cube.coefficient(MultiIndex{2}) == 3);
    CHECK(cube.terms().size() == 3);
    CHECK((one * one.inverse()).coefficient(MultiIndex{1}) == 0);
}

TEST_CASE("evaluation and homogeneity") {
    Poly P = parse_poly_text("X0^2*X1 - 3*X1^3", {"X0", "X1"});
    CHECK(P.is_homogeneous());
    CHECK(P.evaluate({2, ratio(1, 3)}) == ratio(4, 3) - ratio(1, 9));
    CHECK(parse_poly_text("X0*X2 + X1*X3", {"X0", "X1", "X2", "X3"}).is_multihomogeneous({2, 2}));
    CHECK_FALSE(parse_poly_text("X0*X1 + X2", {"X0", "X1", "X2"}).is_homogeneous());
}
