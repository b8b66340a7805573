#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "heightlab/arith.hpp"
#include "heightlab/certify.hpp"
#include "oracles.hpp"

#include <random>

using namespace hl;

TEST_CASE("rationals stay canonical") {
    Rational a = ratio(6, -4);
    CHECK(a.get_num() == -3);
    CHECK(a.get_den() == 2);
    CHECK(to_string(ratio(0, 7)) == "0");
    CHECK(to_string(ratio(10, 5)) == "2");
    CHECK(parse_rational("-12/8") == ratio(-3, 2));
    CHECK(to_string(parse_rational("-12/8")) == "-3/2");
    CHECK_THROWS(parse_rational("1/0"));
    CHECK_THROWS(parse_rational("abc"));
}

TEST_CASE("abs_v at infinity and at primes") {
    CHECK(abs_v(2, Place::infinite()) == 2);
    CHECK(abs_v(6, Place::finite(2)) == ratio(1, 2));
    CHECK(abs_v(ratio(3, 8), Place::finite(2)) == 8);
    CHECK(abs_v(ratio(-3, 8), Place::infinite()) == ratio(3, 8));
    CHECK(abs_v(0, Place::finite(5)) == 0);
    CHECK_THROWS(Place::finite(4));
    CHECK(valuation(Rational(ratio(3, 8)), Integer(2)) == -3);
}

TEST_CASE("abs_v agrees with a factorization oracle") {
    std::mt19937_64 gen(11);
    std::uniform_int_distribution<long> num(-5000, 5000), den(1, 5000);
    for (int k = 0; k < 300; ++k) {
        long a = num(gen);
        if (a == 0) continue;
        long b = den(gen);
        Rational x = ratio(a, b);
        for (long p : {2L, 3L, 5L, 7L, 11L, 13L}) {
            // oracle: strip p from numerator and denominator by hand
            long va = 0, vb = 0, aa = std::labs(a), bb = b;
            while (aa % p == 0) aa /= p, ++va;
            while (bb % p == 0) bb /= p, ++vb;
            Rational expect = rpow(Rational(p), vb - va);
            CHECK(abs_v(x, Place::finite(p)) == expect);
        }
    }
}

TEST_CASE("relevant places") {
    auto names = [](const std::vector<Place>& ps) {
        std::vector<std::string> out;
        for (const auto& p : ps) out.push_back(p.to_string());
        return out;
    };
    CHECK(names(relevant_places({6, -4})) == std::vector<std::string>{"inf", "p:2", "p:3"});
    CHECK(names(relevant_places({1})) == std::vector<std::string>{"inf"});
    CHECK(names(relevant_places({ratio(3, 8), 5})) == std::vector<std::string>{"inf", "p:2", "p:3", "p:5"});
}

TEST_CASE("product formula is exactly zero") {
    CHECK(product_formula_form(1).is_zero());
    CHECK(product_formula_form(6).is_zero());
    CHECK(product_formula_form(ratio(-3, 8)).is_zero());
    CHECK(product_formula_check(ratio(-3, 8)) == 0);
    std::mt19937_64 gen(5);
    std::uniform_int_distribution<long> num(-100000, 100000), den(1, 100000);
    for (int k = 0; k < 200; ++k) {
        long a = num(gen);
        if (a == 0) continue;
        CHECK(product_formula_check(ratio(a, den(gen))) == 0);
    }
}

TEST_CASE("log forms") {
    LogForm a = LogForm::log_of(12);
    CHECK(a.coef.at(2) == 2);
    CHECK(a.coef.at(3) == 1);
    CHECK((LogForm::log_of(ratio(9, 4)) - LogForm::log_of(3) * 2 + LogForm::log_of(2) * 2).is_zero());
    // log_raw keeps 6 unfactored, yet its value agrees.
    LogForm r = LogForm::log_raw(6);
    CHECK(r.coef.count(6) == 1);
    CHECK(abs(r.value() - LogForm::log_of(6).value()) < Real(1e-30));
    CHECK_THROWS(LogForm::log_of(0));
    CHECK_THROWS(LogForm::log_of(-2));
}

TEST_CASE("precision is configurable") {
    const unsigned old = precision_bits();
    set_precision_bits(200);
    CHECK(precision_bits() == 200);
    Real third = to_real(ratio(1, 3));
    CHECK(abs(third * 3 - 1) < pow(Real(2), -190));
    set_precision_bits(old);
}

TEST_CASE("verdicts") {
    CHECK(le_exact("x", 1, 2).verdict == Verdict::holds);
    CHECK(le_exact("x", 2, 2).verdict == Verdict::holds);
    CHECK(le_exact("x", 3, 2).verdict == Verdict::failed);
    CHECK(le_real("x", Real(1), Real(1.5), Real(0.1)).verdict == Verdict::holds);
    CHECK(le_real("x", Real(1.55), Real(1.5), Real(0.1)).verdict == Verdict::inconclusive);
    CHECK(le_real("x", Real(2), Real(1.5), Real(0.1)).verdict == Verdict::failed);
    CHECK(le_log("x", LogForm::log_of(2), LogForm::log_of(3)).verdict == Verdict::holds);
    CHECK(le_log("x", LogForm::log_of(4), LogForm::log_of(2) * 2).verdict == Verdict::holds);
    CHECK(le_log("x", LogForm::log_of(5), LogForm::log_of(3)).verdict == Verdict::failed);
    Tally t;
    t.add({le_exact("a", 1, 2), le_exact("b", 3, 2)});
    CHECK(t.holds == 1);
    CHECK(t.failed == 1);
    CHECK(to_string(Verdict::failed) == "FAILED");
}

TEST_CASE("binomials and factorials") {
    CHECK(binomial(5, 2) == 10);
    CHECK(binomial(3, 5) == 0);
    CHECK(factorial(6) == 720);
    for (int n = 0; n < 30; ++n)
        for (int k = 0; k <= n; ++k) CHECK(Rational(binomial(n, k)) == oracle::binom(n, k));
}
