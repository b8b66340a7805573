#include "heightlab/measures.hpp"

#include "heightlab/rng.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <limits>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace hl {

using cld = std::complex<long double>;
using cd = std::complex<double>;

json Estimate::to_json() const {
    return json{{"value", real_to_string(value)}, {"err", real_to_string(err, 6)}, {"method", method}};
}

// ---- Gauss-Weil and projective heights ---------------------------------------------

Rational gauss_weil_measure_v(const Poly& P, const Place& v) {
    if (P.is_zero()) throw std::domain_error("measure of the zero polynomial");
    Rational m = 0;
    for (const auto& [mono, c] : P.terms()) m = rmax(m, abs_v(c, v));
    return m;
}

std::vector<Place> places_of(const Poly& P) { return relevant_places(P.coefficients()); }

LogForm finite_part_height(const Poly& P) {
    if (P.is_zero()) throw std::domain_error("height of the zero polynomial");
    LogForm f;
    for (const auto& v : places_of(P)) {
        if (v.is_infinite()) continue;
        long vmin = LONG_MAX;
        for (const auto& [m, c] : P.terms()) vmin = std::min(vmin, valuation(c, v.prime()));
        if (vmin != 0) f.coef[v.prime()] += Rational(-vmin);
    }
    return f;
}

LogForm height_gauss_weil(const Poly& P) {
    return LogForm::log_of(gauss_weil_measure_v(P, Place::infinite())) + finite_part_height(P);
}

LogForm projective_height(const std::vector<Rational>& x) {
    // Scale to a primitive integer vector c; then h = log max|c_i|.
    Integer L = 1, G = 0;
    for (const auto& c : x) mpz_lcm(L.get_mpz_t(), L.get_mpz_t(), c.get_den_mpz_t());
    Integer mx = 0;
    for (const auto& c : x) {
        Integer v = abs(c.get_num() * (L / c.get_den()));
        mpz_gcd(G.get_mpz_t(), G.get_mpz_t(), v.get_mpz_t());
        if (v > mx) mx = v;
    }
    if (mx == 0) throw std::domain_error("projective height of the zero vector");
    Rational h(mx, G);
    h.canonicalize();
    // Small values are factored so that exact cancellations stay visible.
    if (h.get_num() < Integer("1000000000000")) return LogForm::log_of(h);
    return LogForm::log_raw(h);
}

LogForm affine_height(const std::vector<Rational>& x) {
    std::vector<Rational> v{Rational(1)};
    v.insert(v.end(), x.begin(), x.end());
    return projective_height(v);
}

Rational l2_norm_squared(const Poly& P) {
    Rational s = 0;
    for (const auto& [m, c] : P.terms()) s += c * c;
    return s;
}

// ---- roots ------------------------------------------------------------------------

namespace {

template <class Cx>
Cx horner(const std::vector<Cx>& a, Cx z) {
    Cx r = a.back();
    for (std::size_t k = a.size() - 1; k-- > 0;) r = r * z + a[k];
    return r;
}

// Aberth-Ehrlich on a polynomial with nonzero constant and leading coefficients.
RootSet aberth(const std::vector<cld>& a) {
    const int D = static_cast<int>(a.size()) - 1;
    RootSet out;
    if (D <= 0) return out;
    std::vector<cld> monic(a.size());
    for (int k = 0; k <= D; ++k) monic[k] = a[k] / a[D];
    std::vector<cld> dmonic(D);
    for (int k = 1; k <= D; ++k) dmonic[k - 1] = monic[k] * static_cast<long double>(k);

    // Cauchy bound for the starting circle.
    long double R = 0;
    for (int k = 0; k < D; ++k) R = std::max(R, std::abs(monic[k]));
    R = std::min(1 + R, 2 * std::pow(R, 1.0L / D) + 1);
    std::vector<cld> z(D);
    for (int k = 0; k < D; ++k) {
        long double ang = 6.28318530717958647692528676655900577L * k / D + 0.4L;
        z[k] = std::polar(R * 0.9L, ang);
    }
    if (D == 1) {
        z[0] = -monic[0];
    } else {
        for (int it = 0; it < 1000; ++it) {
            long double maxstep = 0;
            for (int i = 0; i < D; ++i) {
                cld p = horner(monic, z[i]);
                if (p == cld(0)) continue;
                cld ratio = p / horner(dmonic, z[i]);
                cld s = 0;
                for (int j = 0; j < D; ++j)
                    if (j != i) s += 1.0L / (z[i] - z[j]);
                cld w = ratio / (1.0L - ratio * s);
                if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) w = ratio;
                z[i] -= w;
                maxstep = std::max(maxstep, std::abs(w) / std::max(1.0L, std::abs(z[i])));
            }
            if (maxstep < 1e-17L) break;
        }
    }
    out.roots = z;
    out.radius.resize(D);
    for (int i = 0; i < D; ++i) {
        long double prod = 1;
        for (int j = 0; j < D; ++j)
            if (j != i) prod *= std::abs(z[i] - z[j]);
        long double pv = std::abs(horner(monic, z[i]));
        // Rounding floor of the evaluation itself.
        long double scale = 0, az = std::abs(z[i]), pw = 1;
        for (int k = 0; k <= D; ++k, pw *= az) scale += std::abs(monic[k]) * pw;
        pv += scale * 64 * std::numeric_limits<long double>::epsilon();
        out.radius[i] = prod > 0 ? D * pv / prod : std::numeric_limits<long double>::infinity();
    }
    // Overlapping disks: a connected component of k disks holds k roots; widen to its diameter.
    std::vector<int> comp(D);
    std::iota(comp.begin(), comp.end(), 0);
    std::function<int(int)> find = [&](int x) { return comp[x] == x ? x : comp[x] = find(comp[x]); };
    for (int i = 0; i < D; ++i)
        for (int j = i + 1; j < D; ++j)
            if (std::abs(z[i] - z[j]) <= out.radius[i] + out.radius[j]) comp[find(i)] = find(j);
    std::vector<long double> diam(D, 0);
    std::vector<int> count(D, 0);
    for (int i = 0; i < D; ++i) {
        diam[find(i)] += 2 * out.radius[i];
        ++count[find(i)];
    }
    for (int i = 0; i < D; ++i)
        if (count[find(i)] > 1) out.radius[i] = diam[find(i)];
    return out;
}

// log M of a complex-coefficient univariate polynomial (low to high), with error bound.
std::pair<long double, long double> log_mahler_complex(std::vector<cld> a) {
    while (!a.empty() && a.back() == cld(0)) a.pop_back();
    if (a.empty()) throw std::domain_error("Mahler measure of the zero polynomial");
    std::size_t low = 0;
    while (a[low] == cld(0)) ++low;
    a.erase(a.begin(), a.begin() + static_cast<long>(low));
    long double val = std::log(std::abs(a.back()));
    long double err = 0;
    if (a.size() == 1) return {val, err};
    RootSet rs = aberth(a);
    for (std::size_t i = 0; i < rs.roots.size(); ++i) {
        long double r = std::abs(rs.roots[i]);
        if (r > 1) val += std::log(r);
        err += std::min(rs.radius[i], std::max(r, 1.0L));
    }
    return {val, err};
}

// Variables that actually occur in P.
std::vector<int> used_vars(const Poly& P) {
    std::vector<int> out;
    for (int k = 0; k < P.nvars(); ++k)
        if (P.degree_in(k) > 0) out.push_back(k);
    return out;
}

// Restrict to occurring variables; dehomogenize a form in >= 2 of them.
Poly reduce_for_mahler(const Poly& P) {
    auto used = used_vars(P);
    std::vector<std::string> names;
    std::vector<int> map(P.nvars(), 0);
    for (std::size_t i = 0; i < used.size(); ++i) {
        names.push_back(P.vars()[used[i]]);
        map[used[i]] = static_cast<int>(i);
    }
    std::vector<Poly::Term> terms;
    for (const auto& [m, c] : P.terms()) {
        Mono mm;
        for (std::size_t i = 0; i < used.size(); ++i) mm.e[i] = m.e[used[i]];
        terms.emplace_back(mm, c);
    }
    Poly R = Poly::from_terms(names, terms);
    if (R.nvars() >= 2 && R.is_homogeneous()) {
        std::vector<std::string> rest(names.begin() + 1, names.end());
        std::vector<Poly::Term> t2;
        for (const auto& [m, c] : R.terms()) {
            Mono mm;
            for (int i = 1; i < R.nvars(); ++i) mm.e[i - 1] = m.e[i];
            t2.emplace_back(mm, c);
        }
        R = Poly::from_terms(rest, t2);
    }
    return R;
}

// Dense complex evaluator for numeric loops.
struct CompiledPoly {
    int n = 0;
    std::vector<int> maxdeg;
    std::vector<cd> coef;
    std::vector<std::array<std::uint8_t, kMaxVars>> exps;

    explicit CompiledPoly(const Poly& P) : n(P.nvars()), maxdeg(P.nvars()) {
        for (int k = 0; k < n; ++k) maxdeg[k] = P.degree_in(k);
        for (const auto& [m, c] : P.terms()) {
            coef.emplace_back(c.get_d(), 0.0);
            exps.push_back(m.e);
        }
    }
    cd eval(const cd* z, std::vector<std::vector<cd>>& pw) const {
        for (int k = 0; k < n; ++k) {
            pw[k].resize(maxdeg[k] + 1);
            pw[k][0] = 1;
            for (int e = 1; e <= maxdeg[k]; ++e) pw[k][e] = pw[k][e - 1] * z[k];
        }
        cd acc = 0;
        for (std::size_t t = 0; t < coef.size(); ++t) {
            cd v = coef[t];
            for (int k = 0; k < n; ++k)
                if (exps[t][k]) v *= pw[k][exps[t][k]];
            acc += v;
        }
        return acc;
    }
};

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Bivariate P as coefficients c_k(X) of Y^k, each a dense vector in X.
struct Bivariate {
    std::vector<std::vector<double>> c;  // c[k][l] = coefficient of X^l Y^k
    explicit Bivariate(const Poly& P) {
        int dy = P.degree_in(1), dx = P.degree_in(0);
        c.assign(dy + 1, std::vector<double>(dx + 1, 0.0));
        for (const auto& [m, a] : P.terms()) c[m.e[1]][m.e[0]] = a.get_d();
    }
    void row(cd x, std::vector<cd>& out) const {
        out.resize(c.size());
        for (std::size_t k = 0; k < c.size(); ++k) {
            cd r = 0;
            for (std::size_t l = c[k].size(); l-- > 0;) r = r * x + c[k][l];
            out[k] = r;
        }
    }
};

struct QuadResult {
    long double value = 0;
    long perturbed = 0;
    long double inner_err = 0;
};

QuadResult midpoint_2d(const Bivariate& B, int N) {
    QuadResult q;
    std::vector<cd> nodes(N);
    for (int j = 0; j < N; ++j) nodes[j] = std::polar(1.0, kTwoPi * (j + 0.5) / N);
    std::vector<cd> coeffs;
    long double total = 0;
    for (int j = 0; j < N; ++j) {
        B.row(nodes[j], coeffs);
        long double rowsum = 0;
        for (int k = 0; k < N; ++k) {
            cd y = nodes[k];
            cd v = coeffs.back();
            for (std::size_t t = coeffs.size() - 1; t-- > 0;) v = v * y + coeffs[t];
            double a = std::norm(v);
            if (a == 0.0) {
                // Node on the zero set: shift it by a quarter cell and record.
                ++q.perturbed;
                cd y2 = std::polar(1.0, kTwoPi * (k + 0.75) / N);
                cd x2 = std::polar(1.0, kTwoPi * (j + 0.75) / N);
                std::vector<cd> c2;
                B.row(x2, c2);
                v = c2.back();
                for (std::size_t t = c2.size() - 1; t-- > 0;) v = v * y2 + c2[t];
                a = std::norm(v);
                if (a == 0.0) a = std::numeric_limits<double>::min();
            }
            rowsum += 0.5L * std::log(static_cast<long double>(a));
        }
        total += rowsum;
    }
    q.value = total / (static_cast<long double>(N) * N);
    return q;
}

QuadResult jensen_outer(const Bivariate& B, int N) {
    QuadResult q;
    std::vector<cd> coeffs;
    long double total = 0, err = 0;
    for (int j = 0; j < N; ++j) {
        B.row(std::polar(1.0, kTwoPi * (j + 0.5) / N), coeffs);
        std::vector<cld> a(coeffs.begin(), coeffs.end());
        while (a.size() > 1 && std::abs(a.back()) == 0) a.pop_back();
        bool allzero = std::all_of(a.begin(), a.end(), [](const cld& z) { return z == cld(0); });
        if (allzero) {
            ++q.perturbed;
            B.row(std::polar(1.0, kTwoPi * (j + 0.75) / N), coeffs);
            a.assign(coeffs.begin(), coeffs.end());
        }
        auto [v, e] = log_mahler_complex(a);
        total += v;
        err += e;
    }
    q.value = total / N;
    q.inner_err = err / N;
    return q;
}

}  // namespace

RootSet univariate_roots(const std::vector<Rational>& coeffs) {
    std::vector<cld> a;
    for (const auto& c : coeffs) a.emplace_back(static_cast<long double>(c.get_d()), 0.0L);
    while (!a.empty() && a.back() == cld(0)) a.pop_back();
    if (a.empty()) throw std::domain_error("roots of the zero polynomial");
    std::size_t low = 0;
    while (a[low] == cld(0)) ++low;
    std::vector<cld> core(a.begin() + static_cast<long>(low), a.end());
    RootSet rs = aberth(core);
    for (std::size_t k = 0; k < low; ++k) {
        rs.roots.emplace_back(0.0L, 0.0L);
        rs.radius.push_back(0.0L);
    }
    return rs;
}

Estimate log_mahler_univariate(const Poly& P) {
    if (P.is_zero()) throw std::domain_error("Mahler measure of the zero polynomial");
    auto used = used_vars(P);
    if (used.size() > 1) throw std::invalid_argument("exact_univariate needs one variable");
    Estimate e;
    e.method = "exact_univariate";
    if (used.empty()) {
        e.value = log(to_real(rabs(P.constant_term())));
        return e;
    }
    const int var = used[0];
    const int D = P.degree_in(var);
    std::vector<Rational> coeffs(D + 1, Rational(0));
    for (const auto& [m, c] : P.terms()) coeffs[m.e[var]] = c;
    std::size_t low = 0;
    while (coeffs[low] == 0) ++low;
    // Exact leading part, numeric roots.
    e.value = log(to_real(rabs(coeffs[D])));
    RootSet rs = univariate_roots(coeffs);
    long double sum = 0, err = 0;
    for (std::size_t i = 0; i < rs.roots.size(); ++i) {
        long double r = std::abs(rs.roots[i]);
        if (r > 1) sum += std::log(r);
        err += std::min(rs.radius[i], std::max(r, 1.0L));
    }
    e.value += Real(sum);
    // Roots at 0 are exact; the rounding floor only covers the others.
    e.err = Real(err) + Real(1e-15) * static_cast<long>(D - low);
    return e;
}

Estimate log_mahler_quadrature(const Poly& P0, int N, const std::string& rule) {
    if (P0.is_zero()) throw std::domain_error("Mahler measure of the zero polynomial");
    Poly P = reduce_for_mahler(P0);
    if (P.nvars() <= 1) return log_mahler_univariate(P);
    if (P.nvars() > 2) throw std::invalid_argument("torus quadrature supports at most two variables");
    if (N < 2 || N % 2) throw std::invalid_argument("points per dimension must be even and >= 2");
    Bivariate B(P);
    Estimate e;
    QuadResult full, half;
    if (rule == "midpoint") {
        full = midpoint_2d(B, N);
        half = midpoint_2d(B, N / 2);
        e.method = "quadrature(" + std::to_string(N) + ")";
    } else if (rule == "jensen") {
        full = jensen_outer(B, N);
        half = jensen_outer(B, N / 2);
        e.method = "quadrature_jensen(" + std::to_string(N) + ")";
    } else {
        throw std::invalid_argument("unknown torus rule '" + rule + "'");
    }
    e.value = Real(static_cast<double>(full.value));
    e.err = Real(static_cast<double>(std::abs(full.value - half.value) + full.inner_err + 1e-13L));
    if (full.perturbed + half.perturbed > 0)
        e.method += ";perturbed_nodes=" + std::to_string(full.perturbed + half.perturbed);
    return e;
}

Estimate log_mahler_monte_carlo(const Poly& P0, long samples, std::uint64_t seed) {
    if (P0.is_zero()) throw std::domain_error("Mahler measure of the zero polynomial");
    if (samples < 2) throw std::invalid_argument("need at least two samples");
    Poly P = reduce_for_mahler(P0);
    CompiledPoly C(P);
    Rng rng(seed);
    std::vector<cd> z(P.nvars());
    std::vector<std::vector<cd>> pw(P.nvars());
    long double sum = 0, sum2 = 0;
    for (long s = 0; s < samples; ++s) {
        for (auto& w : z) w = std::polar(1.0, kTwoPi * rng.uniform());
        double a = std::norm(C.eval(z.data(), pw));
        if (a == 0.0) a = std::numeric_limits<double>::min();
        long double l = 0.5L * std::log(static_cast<long double>(a));
        sum += l;
        sum2 += l * l;
    }
    long double mean = sum / samples;
    long double var = (sum2 / samples - mean * mean) * samples / (samples - 1);
    long double se = std::sqrt(std::max(var, 0.0L) / samples);
    Estimate e;
    e.value = Real(static_cast<double>(mean));
    e.err = Real(static_cast<double>(4 * se));
    e.method = "monte_carlo(" + std::to_string(samples) + ",std_err=" + std::to_string(static_cast<double>(se)) + ")";
    return e;
}

Estimate log_mahler(const Poly& P0, const MeasureOptions& opt) {
    if (P0.is_zero()) throw std::domain_error("Mahler measure of the zero polynomial");
    Poly P = reduce_for_mahler(P0);
    if (P.nvars() <= 1) return log_mahler_univariate(P);
    if (P.nvars() == 2) {
        int N = opt.points_per_dim;
        Estimate e = log_mahler_quadrature(P, N, opt.torus_rule);
        while (opt.target_err > 0 && e.err > opt.target_err && 2 * N <= opt.max_points_per_dim) {
            N *= 2;
            e = log_mahler_quadrature(P, N, opt.torus_rule);
        }
        return e;
    }
    return log_mahler_monte_carlo(P, opt.mc_samples, opt.seed);
}

// ---- unitary measure ---------------------------------------------------------------

Rational stokes_constant(long d, int n) {
    Rational s = 0;
    for (int j = 1; j <= n; ++j) s += Rational(1, 2 * j);
    return s * d;
}

Estimate log_unitary(const Poly& P, const std::vector<int>& blocks, const MeasureOptions& opt) {
    if (P.is_zero()) throw std::domain_error("unitary measure of the zero polynomial");
    if (!P.is_multihomogeneous(blocks)) throw std::invalid_argument("unitary measure needs a (multi)homogeneous form");
    auto degs = P.multidegree(blocks);
    Rational stokes = 0;
    for (std::size_t b = 0; b < blocks.size(); ++b) stokes += stokes_constant(degs[b], blocks[b] - 1);

    if (opt.unitary_exact_binary && blocks.size() == 1 && blocks[0] == 2) {
        // P = a z0^(d-d') prod (z1 - alpha z0): log M = log|a| + 1/2 sum log(1 + |alpha|^2).
        const int d = static_cast<int>(degs[0]);
        std::vector<Rational> f(d + 1, Rational(0));
        for (const auto& [m, c] : P.terms()) f[m.e[1]] = c;
        int top = d;
        while (f[top] == 0) --top;
        Estimate e;
        e.method = "exact_binary";
        e.value = log(to_real(rabs(f[top])));
        if (top > 0) {
            std::vector<Rational> g(f.begin(), f.begin() + top + 1);
            RootSet rs = univariate_roots(g);
            long double s = 0, err = 0;
            for (std::size_t i = 0; i < rs.roots.size(); ++i) {
                long double r = std::abs(rs.roots[i]);
                s += 0.5L * std::log1p(r * r);
                err += 0.5L * std::min<long double>(rs.radius[i], 2 * (1 + r));
            }
            int low = 0;
            while (g[low] == 0) ++low;
            e.value += Real(static_cast<double>(s));
            e.err = Real(static_cast<double>(err)) + Real(1e-15) * (top - low);
        }
        return e;
    }

    if (opt.mc_samples < 1000) throw std::invalid_argument("unitary measure needs at least 1000 samples");
    CompiledPoly C(P);
    Rng rng(opt.seed);
    std::vector<cd> z(P.nvars());
    std::vector<std::vector<cd>> pw(P.nvars());
    long double sum = 0, sum2 = 0;
    const long S = opt.mc_samples;
    for (long s = 0; s < S; ++s) {
        int off = 0;
        for (int b : blocks) {
            double norm2 = 0;
            for (int k = off; k < off + b; ++k) {
                z[k] = cd(rng.normal(), rng.normal());
                norm2 += std::norm(z[k]);
            }
            double inv = 1.0 / std::sqrt(norm2);
            for (int k = off; k < off + b; ++k) z[k] *= inv;
            off += b;
        }
        double a = std::norm(C.eval(z.data(), pw));
        if (a == 0.0) a = std::numeric_limits<double>::min();
        long double l = 0.5L * std::log(static_cast<long double>(a));
        sum += l;
        sum2 += l * l;
    }
    long double mean = sum / S;
    long double var = (sum2 / S - mean * mean) * S / (S - 1);
    long double se = std::sqrt(std::max(var, 0.0L) / S);
    Estimate e;
    e.value = Real(static_cast<double>(mean)) + to_real(stokes);
    e.err = Real(static_cast<double>(4 * se));
    e.method = "monte_carlo(" + std::to_string(S) + ",std_err=" + std::to_string(static_cast<double>(se)) + ")";
    return e;
}

// ---- heights ----------------------------------------------------------------------

Estimate height_mahler(const Poly& P, const MeasureOptions& opt) {
    Estimate e = log_mahler(P, opt);
    e.value += finite_part_height(P).value();
    return e;
}

Estimate height_unitary(const Poly& P, const std::vector<int>& blocks, const MeasureOptions& opt) {
    Estimate e = log_unitary(P, blocks, opt);
    e.value += finite_part_height(P).value();
    return e;
}

json measure_report(const Poly& P, const MeasureOptions& opt, bool homogeneous) {
    json r;
    Rational gw = gauss_weil_measure_v(P, Place::infinite());
    r["gauss_weil"] = json{{"value", real_to_string(log(to_real(gw)))}, {"err", "0"}, {"method", "exact"},
                           {"measure", to_string(gw)}};
    r["mahler"] = log_mahler(P, opt).to_json();
    if (homogeneous) r["unitary"] = log_unitary(P, {P.nvars()}, opt).to_json();
    Rational l2 = l2_norm_squared(P);
    r["l2_norm"] = json{{"value", real_to_string(log(to_real(l2)) / 2)}, {"err", "0"}, {"method", "exact"},
                        {"squared", to_string(l2)}};
    r["scale"] = "log";
    json places = json::array();
    for (const auto& v : places_of(P)) {
        if (v.is_infinite()) continue;
        places.push_back(json{{"place", v.to_string()}, {"gauss_weil", to_string(gauss_weil_measure_v(P, v))}});
    }
    r["finite_places"] = places;
    json h;
    h["gauss_weil"] = json{{"value", real_to_string(height_gauss_weil(P).value())},
                           {"form", height_gauss_weil(P).to_string()}};
    h["mahler"] = height_mahler(P, opt).to_json();
    if (homogeneous) h["unitary"] = height_unitary(P, {P.nvars()}, opt).to_json();
    r["heights"] = h;
    return r;
}

// ---- comparisons ------------------------------------------------------------------

Comparison parse_comparison(const std::string& s) {
    if (s == "eq_1_7" || s == "1.7") return Comparison::eq_1_7;
    if (s == "eq_1_19" || s == "1.19") return Comparison::eq_1_19;
    if (s == "eq_1_20" || s == "1.20") return Comparison::eq_1_20;
    if (s == "eq_1_21" || s == "1.21") return Comparison::eq_1_21;
    if (s == "l2_chain") return Comparison::l2_chain;
    throw std::invalid_argument("unknown comparison '" + s + "'");
}

std::string to_string(Comparison c) {
    switch (c) {
        case Comparison::eq_1_7: return "eq_1_7";
        case Comparison::eq_1_19: return "eq_1_19";
        case Comparison::eq_1_20: return "eq_1_20";
        case Comparison::eq_1_21: return "eq_1_21";
        case Comparison::l2_chain: return "l2_chain";
    }
    return "?";
}

std::vector<CheckRecord> check_comparison(const Poly& P, Comparison which, const MeasureOptions& opt) {
    if (P.is_zero()) throw std::domain_error("comparison on the zero polynomial");
    const long d = std::max<long>(P.total_degree(), 0);
    std::vector<CheckRecord> out;
    const Real log2 = log(Real(2));
    auto tag = [&](CheckRecord r, const std::string& method) {
        r.detail["method"] = method;
        r.detail["n"] = which == Comparison::eq_1_20 || which == Comparison::eq_1_21 ? P.nvars() - 1 : P.nvars();
        r.detail["d"] = d;
        out.push_back(std::move(r));
    };

    switch (which) {
        case Comparison::eq_1_7: {
            const int n = P.nvars();
            Estimate lm = log_mahler(P, opt);
            Real lg = log(to_real(gauss_weil_measure_v(P, Place::infinite())));
            Real lb = log(to_real(binomial(d + n, n))) / 2;
            tag(le_real("eq_1_7.lower", lm.value - lb, lg, lm.err), lm.method);
            tag(le_real("eq_1_7.upper", lg, lm.value + log2 * (n * d), lm.err), lm.method);
            break;
        }
        case Comparison::l2_chain: {
            const int n = P.nvars();
            Estimate lm = log_mahler(P, opt);
            Rational l2 = l2_norm_squared(P);
            tag(le_real("l2_chain.mahler_le_l2", lm.value, log(to_real(l2)) / 2, lm.err), lm.method);
            Rational g = gauss_weil_measure_v(P, Place::infinite());
            tag(le_exact("l2_chain.l2sq_le_binom_gw2", l2, Rational(binomial(d + n, n)) * g * g), "exact");
            break;
        }
        case Comparison::eq_1_19: {
            const int n = P.nvars();
            Estimate hb = height_mahler(P, opt);
            Real ht = height_gauss_weil(P).value();
            Real lb = log(to_real(binomial(d + n, n))) / 2;
            tag(le_real("eq_1_19.lower", hb.value - lb, ht, hb.err), hb.method);
            tag(le_real("eq_1_19.upper", ht, hb.value + log2 * (n * d), hb.err), hb.method);
            break;
        }
        case Comparison::eq_1_20:
        case Comparison::eq_1_21: {
            if (!P.is_homogeneous()) throw std::invalid_argument("relation needs a homogeneous form");
            if (P.nvars() < 1) throw std::invalid_argument("relation needs at least one variable");
            const int n = P.nvars() - 1;
            Estimate hb = height_mahler(P, opt);
            Estimate hu = height_unitary(P, {P.nvars()}, opt);
            Real st = to_real(stokes_constant(d, n));
            Real err = hb.err + hu.err;
            std::string method = hb.method + "|" + hu.method;
            if (which == Comparison::eq_1_20) {
                tag(le_real("eq_1_20.lower", hb.value, hu.value, err), method);
                tag(le_real("eq_1_20.upper", hu.value, hb.value + st, err), method);
            } else {
                Real ht = height_gauss_weil(P).value();
                Real lb = log(to_real(binomial(d + n, n))) / 2;
                tag(le_real("eq_1_21.lower", hu.value - lb - st, ht, hu.err), hu.method);
                tag(le_real("eq_1_21.upper", ht, hu.value + log2 * (n * d), hu.err), hu.method);
            }
            break;
        }
    }
    return out;
}

}  // namespace hl
