#pragma once

#include "heightlab/arith.hpp"

#include <array>
#include <cstring>
#include <climits>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <type_traits>
#include <vector>

namespace hl {

constexpr int kMaxVars = 16;
constexpr int kMaxDegree = 64;
// Total degree of the zero polynomial; below every integer.
constexpr long kMinusInfinity = LONG_MIN;

// A multi-index I = (i_1, ..., i_n); |I| is its length.
using MultiIndex = std::vector<int>;
long length(const MultiIndex& I);
Integer mi_factorial(const MultiIndex& I);
// prod binom(J_k, I_k); zero when some I_k > J_k.
Integer mi_binomial(const MultiIndex& J, const MultiIndex& I);
// All multi-indices of arity n and length exactly m, in graded-lex descending order.
std::vector<MultiIndex> indices_of_length(int n, int m);
// All multi-indices of arity n and length <= m.
std::vector<MultiIndex> indices_up_to(int n, int m);
std::string mi_to_string(const MultiIndex& I);

// Fixed-capacity exponent vector.
struct Mono {
    std::array<std::uint8_t, kMaxVars> e{};
    int deg() const {
        std::uint64_t lo, hi;
        std::memcpy(&lo, e.data(), 8);
        std::memcpy(&hi, e.data() + 8, 8);
        // byte sums; each block total stays below 256 since total degree <= 64
        return static_cast<int>(((lo * 0x0101010101010101ULL) >> 56) + ((hi * 0x0101010101010101ULL) >> 56));
    }
    friend bool operator==(const Mono& a, const Mono& b) { return a.e == b.e; }
    friend bool operator!=(const Mono& a, const Mono& b) { return a.e != b.e; }
    static Mono from(const MultiIndex& I);
    MultiIndex to_index(int n) const;
};

// Graded lexicographic order, "a comes first" = a is larger.
bool grlex_greater(const Mono& a, const Mono& b);

struct MonoHash {
    std::size_t operator()(const Mono& m) const noexcept;
};

class Poly {
public:
    using Term = std::pair<Mono, Rational>;

    Poly() = default;
    explicit Poly(std::vector<std::string> vars);
    static Poly constant(std::vector<std::string> vars, const Rational& c);
    static Poly variable(std::vector<std::string> vars, int i);
    static Poly monomial(std::vector<std::string> vars, const MultiIndex& I, const Rational& c);
    // Takes (mono, coef) pairs in any order; merges duplicates, drops zeros.
    static Poly from_terms(std::vector<std::string> vars, std::vector<Term> terms);

    const std::vector<std::string>& vars() const { return vars_; }
    int nvars() const { return static_cast<int>(vars_.size()); }
    const std::vector<Term>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    Rational constant_term() const;

    long total_degree() const;
    int degree_in(int var) const;
    bool is_homogeneous() const;
    // Homogeneous in each block of consecutive variables with sizes `blocks`.
    bool is_multihomogeneous(const std::vector<int>& blocks) const;
    std::vector<long> multidegree(const std::vector<int>& blocks) const;

    Rational coefficient(const MultiIndex& I) const;
    // Coefficient of the graded-lex largest monomial.
    Rational leading_coefficient() const;
    std::vector<Rational> coefficients() const;

    Poly operator-() const;
    Poly& operator+=(const Poly& o);
    Poly& operator-=(const Poly& o);
    Poly& operator*=(const Poly& o);
    Poly& operator*=(const Rational& c);
    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator*(const Poly& a, const Poly& b);
    friend Poly operator*(Poly a, const Rational& c) { return a *= c; }
    friend Poly operator*(const Rational& c, Poly a) { return a *= c; }
    friend bool operator==(const Poly& a, const Poly& b);
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

    Poly pow(unsigned e) const;
    Poly derivative(int var) const;
    Poly divided_derivative(const MultiIndex& I) const;
    Poly homogeneous_part(long d) const;

    Rational evaluate(const std::vector<Rational>& x) const;
    template <class T>
    T evaluate_as(const std::vector<T>& x) const;

    // Substitute a polynomial (over a common variable list) for every variable.
    Poly substitute(const std::vector<Poly>& images) const;
    // Re-express over a new variable list; var i of this maps to index map[i].
    Poly embed(std::vector<std::string> new_vars, const std::vector<int>& map) const;
    // Rename variables (same arity).
    Poly renamed(std::vector<std::string> new_vars) const;

    // Exact division; returns false if divisor does not divide this.
    bool divide_exact(const Poly& divisor, Poly& quotient) const;

    std::string to_string() const;

private:
    std::vector<std::string> vars_;
    std::vector<Term> terms_;  // grlex descending, nonzero coefficients
    void normalize();
    friend class PolyAccess;
};

// c * A * B, summed; one accumulation pass for the whole list.
struct ScaledProduct {
    Rational c;
    const Poly* a;
    const Poly* b;
};
Poly sum_of_products(const std::vector<ScaledProduct>& ps);

// L_v(P) = sum of |c|_v.
Rational length_v(const Poly& P, const Place& v);

template <class T>
T coef_as(const Rational& c) {
    if constexpr (std::is_same_v<T, Real>)
        return to_real(c);
    else
        return T(c.get_d());
}

template <class T>
T Poly::evaluate_as(const std::vector<T>& x) const {
    T acc = T(0);
    const int n = nvars();
    // Per-variable power tables.
    std::vector<std::vector<T>> pw(n);
    for (int i = 0; i < n; ++i) {
        int dmax = degree_in(i);
        pw[i].resize(dmax + 1, T(1));
        for (int k = 1; k <= dmax; ++k) pw[i][k] = pw[i][k - 1] * x[i];
    }
    for (const auto& [m, c] : terms_) {
        T t = coef_as<T>(c);
        for (int i = 0; i < n; ++i)
            if (m.e[i]) t *= pw[i][m.e[i]];
        acc += t;
    }
    return acc;
}

// An element num / D^k of the localization by a fixed polynomial D (= P'_T).
class Localizer {
public:
    explicit Localizer(Poly D) : D_(std::move(D)) { pow_.push_back(Poly::constant(D_.vars(), 1)); }
    const Poly& denominator() const { return D_; }
    const Poly& power(int k) const;

private:
    Poly D_;
    mutable std::vector<Poly> pow_;
};

class LocalizedPolynomial {
public:
    LocalizedPolynomial() = default;
    LocalizedPolynomial(std::shared_ptr<const Localizer> ctx, Poly num, int k)
        : ctx_(std::move(ctx)), num_(std::move(num)), k_(k) {}

    const Poly& numerator() const { return num_; }
    int denom_power() const { return k_; }
    const std::shared_ptr<const Localizer>& context() const { return ctx_; }
    bool is_zero() const { return num_.is_zero(); }

    LocalizedPolynomial& operator+=(const LocalizedPolynomial& o);
    LocalizedPolynomial& operator-=(const LocalizedPolynomial& o);
    LocalizedPolynomial& operator*=(const LocalizedPolynomial& o);
    friend LocalizedPolynomial operator+(LocalizedPolynomial a, const LocalizedPolynomial& b) { return a += b; }
    friend LocalizedPolynomial operator-(LocalizedPolynomial a, const LocalizedPolynomial& b) { return a -= b; }
    friend LocalizedPolynomial operator*(LocalizedPolynomial a, const LocalizedPolynomial& b) { return a *= b; }
    LocalizedPolynomial operator-() const { return {ctx_, -num_, k_}; }
    LocalizedPolynomial scaled(const Rational& c) const { return {ctx_, num_ * c, k_}; }
    // Divide by D: raises the power.
    LocalizedPolynomial divided_by_denominator() const { return {ctx_, num_, k_ + 1}; }

    // Cancel factors of D from the numerator while possible.
    LocalizedPolynomial reduced() const;
    // num * D^(target - k); requires target >= k.
    Poly cleared_to(int target) const;
    Rational evaluate(const std::vector<Rational>& x) const;

private:
    std::shared_ptr<const Localizer> ctx_;
    Poly num_;
    int k_ = 0;
};

inline bool is_zero(const Rational& x) { return x == 0; }
inline bool is_zero(const LocalizedPolynomial& x) { return x.is_zero(); }
inline bool is_zero(double x) { return x == 0.0; }
inline bool is_zero(const Real& x) { return x == 0; }

}  // namespace hl
