#include "heightlab/arith.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hl {

std::string to_string(const Rational& x) {
    if (x.get_den() == 1) return x.get_num().get_str();
    return x.get_num().get_str() + "/" + x.get_den().get_str();
}

std::string to_string(const Integer& x) { return x.get_str(); }

Rational parse_rational(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("empty rational");
    auto slash = s.find('/');
    Rational r;
    try {
        if (slash == std::string::npos) {
            r = Rational(Integer(s), 1);
        } else {
            Integer n(s.substr(0, slash)), d(s.substr(slash + 1));
            if (d == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
            r = Rational(n, d);
        }
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument("malformed rational '" + s + "'");
    }
    r.canonicalize();
    return r;
}

Rational make_rational(long num, long den) {
    Rational r(num, den);
    r.canonicalize();
    return r;
}

Rational rabs(const Rational& x) { return x < 0 ? Rational(-x) : x; }

Rational rpow(const Rational& x, long e) {
    if (e < 0) {
        if (x == 0) throw std::domain_error("zero to negative power");
        return rpow(Rational(1) / x, -e);
    }
    Rational r;
    mpz_pow_ui(r.get_num_mpz_t(), x.get_num_mpz_t(), static_cast<unsigned long>(e));
    mpz_pow_ui(r.get_den_mpz_t(), x.get_den_mpz_t(), static_cast<unsigned long>(e));
    return r;
}

Rational rmax(const Rational& a, const Rational& b) { return a < b ? b : a; }

Integer binomial(unsigned long n, unsigned long k) {
    Integer r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

Integer factorial(unsigned long n) {
    Integer r;
    mpz_fac_ui(r.get_mpz_t(), n);
    return r;
}

// ---- precision --------------------------------------------------------------

namespace {
unsigned g_bits = 128;

unsigned digits_for_bits(unsigned bits) {
    return static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 1;
}

struct PrecisionInit {
    PrecisionInit() { Real::default_precision(digits_for_bits(g_bits)); }
} g_precision_init;
}  // namespace

void set_precision_bits(unsigned bits) {
    if (bits < 60) throw std::invalid_argument("working precision must be >= 60 bits");
    g_bits = bits;
    Real::default_precision(digits_for_bits(bits));
}

unsigned precision_bits() { return g_bits; }

Real to_real(const Rational& x) {
    Real r;
    r.backend() = x.get_mpq_t();
    return r;
}

Real to_real(const Integer& x) {
    Real r;
    r.backend() = x.get_mpz_t();
    return r;
}

double to_double(const Real& x) { return x.convert_to<double>(); }

std::string real_to_string(const Real& x, int digits) {
    std::ostringstream os;
    os.precision(digits);
    os << x;
    return os.str();
}

// ---- primes -----------------------------------------------------------------

namespace {

constexpr unsigned long kTrialLimit = 1000000;

const std::vector<unsigned long>& small_primes() {
    static const std::vector<unsigned long> primes = [] {
        std::vector<bool> sieve(kTrialLimit + 1, true);
        std::vector<unsigned long> out;
        sieve[0] = sieve[1] = false;
        for (unsigned long i = 2; i <= kTrialLimit; ++i) {
            if (!sieve[i]) continue;
            out.push_back(i);
            for (unsigned long j = i * i; j <= kTrialLimit; j += i) sieve[j] = false;
        }
        return out;
    }();
    return primes;
}

bool miller_rabin_witness(const Integer& n, const Integer& a, const Integer& d, unsigned long s) {
    Integer x;
    mpz_powm(x.get_mpz_t(), a.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
    if (x == 1 || x == n - 1) return false;
    for (unsigned long r = 1; r < s; ++r) {
        x = (x * x) % n;
        if (x == n - 1) return false;
    }
    return true;
}

// Deterministic for n < 3.3e24 with the first 13 prime bases.
bool miller_rabin(const Integer& n) {
    Integer d = n - 1;
    unsigned long s = 0;
    while (mpz_even_p(d.get_mpz_t())) {
        d /= 2;
        ++s;
    }
    static const Integer kDetBound("3317044064679887385961981");
    static const unsigned long bases[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41};
    for (unsigned long b : bases) {
        if (Integer(b) >= n) break;
        if (miller_rabin_witness(n, Integer(b), d, s)) return false;
    }
    if (n < kDetBound) return true;
    // Beyond the deterministic range: BPSW plus extra random rounds from GMP.
    return mpz_probab_prime_p(n.get_mpz_t(), 40) != 0;
}

Integer pollard_brent(const Integer& n) {
    if (mpz_even_p(n.get_mpz_t())) return 2;
    for (unsigned long c = 1;; ++c) {
        Integer y = 2, x, g = 1, q = 1, ys;
        unsigned long r = 1, m = 128;
        auto f = [&](const Integer& v) { return (v * v + c) % n; };
        do {
            x = y;
            for (unsigned long i = 0; i < r; ++i) y = f(y);
            unsigned long k = 0;
            do {
                ys = y;
                for (unsigned long i = 0; i < std::min(m, r - k); ++i) {
                    y = f(y);
                    Integer diff = x - y;
                    if (diff < 0) diff = -diff;
                    q = (q * diff) % n;
                }
                mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
                k += m;
            } while (k < r && g == 1);
            r *= 2;
        } while (g == 1);
        if (g == n) {
            do {
                ys = f(ys);
                Integer diff = x - ys;
                if (diff < 0) diff = -diff;
                mpz_gcd(g.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
            } while (g == 1);
        }
        if (g != n) return g;
    }
}

void factor_rec(const Integer& n, std::map<Integer, unsigned long>& out) {
    if (n == 1) return;
    if (is_prime(n)) {
        ++out[n];
        return;
    }
    Integer d = pollard_brent(n);
    factor_rec(d, out);
    factor_rec(n / d, out);
}

}  // namespace

bool is_prime(const Integer& n) {
    if (n < 2) return false;
    if (n <= kTrialLimit) {
        const auto& ps = small_primes();
        return std::binary_search(ps.begin(), ps.end(), n.get_ui());
    }
    for (unsigned long p : small_primes()) {
        if (Integer(p) * p > n) return true;
        if (mpz_divisible_ui_p(n.get_mpz_t(), p)) return false;
    }
    return miller_rabin(n);
}

std::vector<std::pair<Integer, unsigned long>> factor(const Integer& n0) {
    if (n0 == 0) throw std::domain_error("factor(0)");
    Integer n = abs(n0);
    std::map<Integer, unsigned long> acc;
    for (unsigned long p : small_primes()) {
        if (n == 1) break;
        if (Integer(p) * p > n) break;
        while (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
            n /= p;
            ++acc[Integer(p)];
        }
    }
    if (n > 1) factor_rec(n, acc);
    return {acc.begin(), acc.end()};
}

// ---- places -----------------------------------------------------------------

Place Place::infinite() { return Place(); }

Place Place::finite(const Integer& p) {
    if (!is_prime(p)) throw std::invalid_argument("place p:" + p.get_str() + " is not prime");
    Place v;
    v.inf_ = false;
    v.p_ = p;
    return v;
}

std::string Place::to_string() const { return inf_ ? "inf" : "p:" + p_.get_str(); }

Place Place::parse(const std::string& s) {
    if (s == "inf") return infinite();
    if (s.rfind("p:", 0) == 0) return finite(Integer(s.substr(2)));
    throw std::invalid_argument("malformed place '" + s + "'");
}

long valuation(const Integer& x, const Integer& p) {
    if (x == 0) throw std::domain_error("valuation of zero");
    Integer rem;
    long v = static_cast<long>(mpz_remove(rem.get_mpz_t(), x.get_mpz_t(), p.get_mpz_t()));
    return v;
}

long valuation(const Rational& x, const Integer& p) {
    return valuation(x.get_num(), p) - valuation(x.get_den(), p);
}

Rational abs_v(const Rational& x, const Place& v) {
    if (x == 0) return 0;
    if (v.is_infinite()) return rabs(x);
    long k = valuation(x, v.prime());
    return rpow(Rational(v.prime()), -k);
}

std::vector<Place> relevant_places(const std::vector<Rational>& xs) {
    std::map<Integer, bool> primes;
    for (const auto& x : xs) {
        if (x == 0) continue;
        for (const auto& [p, e] : factor(x.get_num())) primes[p] = true;
        for (const auto& [p, e] : factor(x.get_den())) primes[p] = true;
    }
    std::vector<Place> out{Place::infinite()};
    for (const auto& [p, b] : primes) out.push_back(Place::finite(p));
    return out;
}

// ---- log forms ----------------------------------------------------------------

LogForm LogForm::log_of(const Rational& x) {
    if (x <= 0) throw std::domain_error("log of non-positive rational");
    LogForm f;
    for (const auto& [p, e] : factor(x.get_num())) f.coef[p] += Rational(static_cast<long>(e));
    for (const auto& [p, e] : factor(x.get_den())) f.coef[p] -= Rational(static_cast<long>(e));
    return f;
}

LogForm LogForm::log_raw(const Rational& x) {
    if (x <= 0) throw std::domain_error("log of non-positive rational");
    LogForm f;
    if (x.get_num() > 1) f.coef[x.get_num()] += 1;
    if (x.get_den() > 1) f.coef[x.get_den()] -= 1;
    return f;
}

LogForm LogForm::from_constant(const Rational& c) {
    LogForm f;
    f.constant = c;
    return f;
}

LogForm& LogForm::operator+=(const LogForm& o) {
    constant += o.constant;
    for (const auto& [p, c] : o.coef) coef[p] += c;
    return *this;
}

LogForm& LogForm::operator-=(const LogForm& o) {
    constant -= o.constant;
    for (const auto& [p, c] : o.coef) coef[p] -= c;
    return *this;
}

LogForm& LogForm::operator*=(const Rational& s) {
    constant *= s;
    for (auto& [p, c] : coef) c *= s;
    return *this;
}

bool LogForm::is_zero() const {
    if (constant != 0) return false;
    return std::all_of(coef.begin(), coef.end(), [](const auto& kv) { return kv.second == 0; });
}

Real LogForm::value() const {
    Real r = to_real(constant);
    for (const auto& [p, c] : coef) {
        if (c == 0) continue;
        r += to_real(c) * log(to_real(p));
    }
    return r;
}

std::string LogForm::to_string() const {
    std::string s = hl::to_string(constant);
    for (const auto& [p, c] : coef) {
        if (c == 0) continue;
        s += (c < 0 ? " - " : " + ") + hl::to_string(rabs(c)) + "*log(" + p.get_str() + ")";
    }
    return s;
}

LogForm product_formula_form(const Rational& x) {
    if (x == 0) throw std::domain_error("product formula needs a nonzero rational");
    LogForm f = LogForm::log_of(rabs(x));  // infinite place
    for (const auto& v : relevant_places({x})) {
        if (v.is_infinite()) continue;
        f -= LogForm::log_of(Rational(v.prime())) * Rational(valuation(x, v.prime()));
    }
    return f;
}

Real product_formula_check(const Rational& x) {
    LogForm f = product_formula_form(x);
    if (f.is_zero()) return Real(0);
    return f.value();
}

}  // namespace hl
