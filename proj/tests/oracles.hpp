#pragma once
// Test-side reference computations. Nothing here calls into the library's algorithms:
// every oracle takes plain data (coefficient maps, exponent vectors) and recomputes from scratch.

#include <Eigen/Dense>
#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numeric>
#include <vector>

namespace oracle {

using Q = mpq_class;
using Exp = std::vector<int>;
using Sparse = std::map<Exp, Q>;  // exponent -> coefficient

inline Q q(long a, long b = 1) {
    Q r(a, b);
    r.canonicalize();
    return r;
}

// ---- sparse polynomials on plain maps --------------------------------------------

inline void add_into(Sparse& a, const Exp& e, const Q& c) {
    auto& slot = a[e];
    slot += c;
    if (slot == 0) a.erase(e);
}

inline Sparse mul(const Sparse& a, const Sparse& b) {
    Sparse out;
    for (const auto& [ea, ca] : a)
        for (const auto& [eb, cb] : b) {
            Exp e(ea.size());
            for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
            add_into(out, e, ca * cb);
        }
    return out;
}

inline Sparse power(const Sparse& a, int k, std::size_t nvars) {
    Sparse out{{Exp(nvars, 0), Q(1)}};
    for (int i = 0; i < k; ++i) out = mul(out, a);
    return out;
}

// Drop every term of total degree above `order`.
inline Sparse truncate(Sparse a, int order) {
    for (auto it = a.begin(); it != a.end();) {
        if (std::accumulate(it->first.begin(), it->first.end(), 0) > order)
            it = a.erase(it);
        else
            ++it;
    }
    return a;
}

inline Sparse mul_trunc(const Sparse& a, const Sparse& b, int order) { return truncate(mul(a, b), order); }

inline Q binom(long n, long k) {
    if (k < 0 || k > n) return 0;
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return Q(r);
}

// ---- Mahler measure of a univariate polynomial via companion-matrix eigenvalues ---

// coeffs low to high, leading coefficient nonzero.
inline double log_mahler_companion(const std::vector<double>& c) {
    std::size_t lo = 0;
    while (c[lo] == 0) ++lo;
    const std::size_t D = c.size() - 1;
    double out = std::log(std::abs(c[D]));
    const std::size_t k = D - lo;
    if (k == 0) return out;
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(k, k);
    for (std::size_t i = 1; i < k; ++i) M(i, i - 1) = 1;
    for (std::size_t i = 0; i < k; ++i) M(i, k - 1) = -c[lo + i] / c[D];
    Eigen::EigenSolver<Eigen::MatrixXd> es(M, false);
    for (std::size_t i = 0; i < k; ++i) out += std::max(0.0, std::log(std::abs(es.eigenvalues()[i])));
    return out;
}

// Plain 2D midpoint rule for log|P(e^{is}, e^{it})| in long double; P given as (i, j) -> coefficient.
inline double log_mahler_grid2(const std::map<std::pair<int, int>, double>& P, int n) {
    long double acc = 0;
    const long double tau = 2 * 3.14159265358979323846264338327950288L;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            const long double s = tau * (a + 0.5L) / n, t = tau * (b + 0.5L) / n;
            std::complex<long double> z = 0;
            for (const auto& [e, c] : P) z += static_cast<long double>(c) * std::polar(1.0L, e.first * s + e.second * t);
            acc += std::log(std::abs(z));
        }
    return static_cast<double>(acc / (static_cast<long double>(n) * n));
}

// ---- implicit series by plain fixed-point iteration --------------------------------

// P over (Y_1..Y_n, T) as a sparse map; base point (y, t) with P(y, t) = 0, P_T(y, t) != 0.
// phi <- phi - P(y + X, phi) / P_T(y, t); each pass fixes one more degree. Returns a_I for |I| <= order.
inline std::map<Exp, Q> implicit_taylor(const Sparse& P, const std::vector<Q>& y, const Q& t, int order) {
    const std::size_t n = y.size();
    auto point_value = [&](const Sparse& F) {
        Q v = 0;
        for (const auto& [e, c] : F) {
            Q m = c;
            for (std::size_t i = 0; i < n; ++i)
                for (int k = 0; k < e[i]; ++k) m *= y[i];
            for (int k = 0; k < e[n]; ++k) m *= t;
            v += m;
        }
        return v;
    };
    Sparse PT;
    for (const auto& [e, c] : P)
        if (e[n] > 0) {
            Exp f = e;
            --f[n];
            add_into(PT, f, c * e[n]);
        }
    const Q pt = point_value(PT);
    const Exp zero(n, 0);
    Sparse phi{{zero, t}};
    for (int pass = 0; pass <= order; ++pass) {
        // Y_i -> y_i + X_i, T -> phi.
        std::vector<Sparse> Ysub(n);
        for (std::size_t i = 0; i < n; ++i) {
            Exp ei(n, 0);
            ei[i] = 1;
            Ysub[i] = Sparse{{ei, Q(1)}};
            if (y[i] != 0) Ysub[i][zero] = y[i];
        }
        Sparse value;
        for (const auto& [e, c] : P) {
            Sparse term{{zero, c}};
            for (std::size_t i = 0; i < n; ++i)
                for (int k = 0; k < e[i]; ++k) term = mul_trunc(term, Ysub[i], order);
            for (int k = 0; k < e[n]; ++k) term = mul_trunc(term, phi, order);
            for (const auto& [f, d] : term) add_into(value, f, d);
        }
        for (const auto& [f, d] : value) add_into(phi, f, -d / pt);
    }
    std::map<Exp, Q> out;
    for (const auto& [e, c] : phi) out[e] = c;
    return out;
}

// ---- Delta operator on G_m^{n_1} x ... by literal expansion -----------------------

// P on coordinates (X_{l,0..n_l})_l; returns the T^I coefficient of P(X * Y) after X_l0 -> 1, X_li -> 1 + T_li,
// as a map over the Y exponents.
inline Sparse delta_by_expansion(const Sparse& P, const std::vector<int>& n, const Exp& I) {
    std::size_t coords = 0, g = 0;
    for (int k : n) coords += k + 1, g += k;
    Sparse out;
    for (const auto& [e, c] : P) {
        // prod over tangent coordinates of (1 + T)^{e}; work in the T variables only.
        Sparse tpart{{Exp(g, 0), c}};
        std::size_t pos = 0, tpos = 0;
        for (int nl : n) {
            ++pos;  // X_l0 -> 1
            for (int i = 1; i <= nl; ++i, ++pos, ++tpos) {
                Exp one(g, 0), tt(g, 0);
                tt[tpos] = 1;
                Sparse lin{{one, Q(1)}, {tt, Q(1)}};
                tpart = mul(tpart, power(lin, e[pos], g));
            }
        }
        auto it = tpart.find(I);
        if (it != tpart.end()) add_into(out, e, it->second);
    }
    (void)coords;
    return out;
}

// ---- staircases, Segre-Veronese counts ---------------------------------------------

// Brute-force W(delta, eps): every alpha in the box with sum_l |alpha_l| / delta_l < eps.
inline std::vector<Exp> staircase_brute(const std::vector<Q>& delta, const Q& eps, const std::vector<int>& blocks) {
    std::vector<int> owner, cap;
    for (std::size_t l = 0; l < blocks.size(); ++l)
        for (int i = 0; i < blocks[l]; ++i) {
            owner.push_back(static_cast<int>(l));
            Q b = eps * delta[l];
            cap.push_back(static_cast<int>(mpz_class(b.get_num() / b.get_den()).get_si()));
        }
    const std::size_t g = owner.size();
    std::vector<Exp> out;
    Exp a(g, 0);
    for (;;) {
        std::vector<long> len(blocks.size(), 0);
        for (std::size_t j = 0; j < g; ++j) len[owner[j]] += a[j];
        Q s = 0;
        for (std::size_t l = 0; l < blocks.size(); ++l) s += Q(len[l]) / delta[l];
        if (s < eps) out.push_back(a);
        std::size_t j = 0;
        while (j < g && a[j] == cap[j]) a[j++] = 0;
        if (j == g) break;
        ++a[j];
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Number of exponent vectors of total degree d in k variables, by enumeration.
inline long count_degree(int k, int d) {
    if (k == 1) return 1;
    long s = 0;
    for (int a = 0; a <= d; ++a) s += count_degree(k - 1, d - a);
    return s;
}

// Grid count of {x in [0, eps*delta_j]^k : sum x_j / delta_j < eps}: fraction of midpoints times the box.
inline double simplex_volume_grid(const std::vector<long>& delta_axis, double eps, int per_axis) {
    const std::size_t k = delta_axis.size();
    double box = 1;
    for (long d : delta_axis) box *= eps * d;
    std::vector<int> a(k, 0);
    long hit = 0, total = 0;
    for (;;) {
        double s = 0;
        for (std::size_t j = 0; j < k; ++j) s += (a[j] + 0.5) / per_axis;
        ++total;
        if (s < 1) ++hit;
        std::size_t j = 0;
        while (j < k && a[j] == per_axis - 1) a[j++] = 0;
        if (j == k) break;
        ++a[j];
    }
    return box * static_cast<double>(hit) / static_cast<double>(total);
}

// ---- heights -----------------------------------------------------------------------

// h(P_n) = (n+1)/2 * sum_{k=2}^{n+1} 1/k in long double.
inline long double projective_space_height(long n) {
    long double s = 0;
    for (long k = n + 1; k >= 2; --k) s += 1.0L / k;
    return (n + 1) / 2.0L * s;
}

// Projective height of a rational point: scale to a primitive integer vector, then log max |x_i|.
inline double point_height(const std::vector<Q>& x) {
    mpz_class L = 1, G = 0;
    for (const auto& v : x) mpz_lcm(L.get_mpz_t(), L.get_mpz_t(), v.get_den().get_mpz_t());
    std::vector<mpz_class> z;
    for (const auto& v : x) {
        Q w = v * L;
        z.push_back(w.get_num());
        mpz_gcd(G.get_mpz_t(), G.get_mpz_t(), z.back().get_mpz_t());
    }
    mpz_class m = 0;
    for (auto& v : z) {
        v /= G;
        if (abs(v) > m) m = abs(v);
    }
    return std::log(m.get_d());
}

}  // namespace oracle
