#pragma once

#include <gmpxx.h>

#include <boost/multiprecision/mpfr.hpp>

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace hl {

using Integer = mpz_class;
using Rational = mpq_class;
using Real = boost::multiprecision::mpfr_float;

// Canonical text form: "p/q" or "p".
std::string to_string(const Rational& x);
std::string to_string(const Integer& x);
Rational parse_rational(const std::string& s);
// a / b in lowest terms (mpq_class(a, b) alone does not reduce).
inline Rational ratio(const Integer& a, const Integer& b) {
    Rational r(a, b);
    r.canonicalize();
    return r;
}

Rational make_rational(long num, long den = 1);
Rational rabs(const Rational& x);
Rational rpow(const Rational& x, long e);
Rational rmax(const Rational& a, const Rational& b);
Integer binomial(unsigned long n, unsigned long k);
Integer factorial(unsigned long n);

// ---- working precision -----------------------------------------------------

void set_precision_bits(unsigned bits);
unsigned precision_bits();
Real to_real(const Rational& x);
Real to_real(const Integer& x);
double to_double(const Real& x);
std::string real_to_string(const Real& x, int digits = 20);

// ---- primes and factorization ---------------------------------------------

bool is_prime(const Integer& n);
// Prime factorization of |n| (n != 0), sorted by prime.
std::vector<std::pair<Integer, unsigned long>> factor(const Integer& n);

// ---- places ---------------------------------------------------------------

class Place {
public:
    static Place infinite();
    static Place finite(const Integer& p);  // throws unless p is prime

    bool is_infinite() const { return inf_; }
    const Integer& prime() const { return p_; }
    std::string to_string() const;
    static Place parse(const std::string& s);

    friend bool operator==(const Place& a, const Place& b) {
        return a.inf_ == b.inf_ && (a.inf_ || a.p_ == b.p_);
    }
    friend bool operator<(const Place& a, const Place& b) {
        if (a.inf_ != b.inf_) return a.inf_;
        return !a.inf_ && a.p_ < b.p_;
    }

private:
    bool inf_ = true;
    Integer p_ = 0;
};

// v_p(x); x must be nonzero.
long valuation(const Rational& x, const Integer& p);
long valuation(const Integer& x, const Integer& p);

// |x|_v as an exact rational (|x| at infinity, p^{-v_p(x)} at p).
Rational abs_v(const Rational& x, const Place& v);

std::vector<Place> relevant_places(const std::vector<Rational>& xs);

// ---- exact log-linear forms -----------------------------------------------

// constant + sum_b c_b log b, all coefficients rational. Bases b >= 2 are
// primes when built by log_of; log_raw keeps numerator and denominator unfactored.
struct LogForm {
    Rational constant = 0;
    std::map<Integer, Rational> coef;

    static LogForm log_of(const Rational& x);   // x > 0, fully factored
    static LogForm log_raw(const Rational& x);  // x > 0, no factoring
    static LogForm from_constant(const Rational& c);

    LogForm& operator+=(const LogForm& o);
    LogForm& operator-=(const LogForm& o);
    LogForm& operator*=(const Rational& s);
    friend LogForm operator+(LogForm a, const LogForm& b) { return a += b; }
    friend LogForm operator-(LogForm a, const LogForm& b) { return a -= b; }
    friend LogForm operator*(LogForm a, const Rational& s) { return a *= s; }

    bool is_zero() const;  // after dropping zero coefficients
    Real value() const;
    std::string to_string() const;
};

// Sum over places of log|x|_v, computed as an exact log form; always zero.
LogForm product_formula_form(const Rational& x);
// The same, evaluated as a LogValue (exactly 0 when the form cancels).
Real product_formula_check(const Rational& x);

}  // namespace hl
