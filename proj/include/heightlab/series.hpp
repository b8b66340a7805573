#pragma once

#include "heightlab/poly.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace hl {

struct GrlexOrder {
    bool operator()(const Mono& a, const Mono& b) const { return grlex_greater(a, b); }
};

// Multivariate power series truncated at total degree `order`, coefficients in C.
// C is Rational, LocalizedPolynomial, Real or double.
template <class C>
class TruncatedSeries {
public:
    using Map = std::map<Mono, C, GrlexOrder>;

    TruncatedSeries() = default;
    TruncatedSeries(std::vector<std::string> vars, int order) : vars_(std::move(vars)), order_(order) {
        if (order < 0) throw std::invalid_argument("negative truncation order");
        if (vars_.size() > static_cast<std::size_t>(kMaxVars)) throw std::invalid_argument("at most 16 variables");
    }

    static TruncatedSeries constant(std::vector<std::string> vars, int order, const C& c) {
        TruncatedSeries s(std::move(vars), order);
        s.set(Mono{}, c);
        return s;
    }
    static TruncatedSeries variable(std::vector<std::string> vars, int order, int i, const C& one) {
        TruncatedSeries s(std::move(vars), order);
        Mono m;
        m.e[i] = 1;
        s.set(m, one);
        return s;
    }

    const std::vector<std::string>& vars() const { return vars_; }
    int nvars() const { return static_cast<int>(vars_.size()); }
    int order() const { return order_; }
    const Map& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    // Stores c at m; drops it when zero or beyond the order.
    void set(const Mono& m, C c) {
        if (m.deg() > order_) return;
        if (hl::is_zero(c)) {
            terms_.erase(m);
            return;
        }
        terms_[m] = std::move(c);
    }
    void add_to(const Mono& m, const C& c) {
        if (m.deg() > order_) return;
        auto it = terms_.find(m);
        if (it == terms_.end()) {
            if (!hl::is_zero(c)) terms_.emplace(m, c);
            return;
        }
        it->second += c;
        if (hl::is_zero(it->second)) terms_.erase(it);
    }

    C coefficient(const MultiIndex& I) const {
        auto it = terms_.find(Mono::from(I));
        return it == terms_.end() ? C() : it->second;
    }
    C coefficient(const Mono& m) const {
        auto it = terms_.find(m);
        return it == terms_.end() ? C() : it->second;
    }

    // Degree-d slice (the V_d of a series).
    TruncatedSeries homogeneous_part(int d) const {
        TruncatedSeries s(vars_, order_);
        for (const auto& [m, c] : terms_)
            if (m.deg() == d) s.terms_.emplace(m, c);
        return s;
    }
    std::vector<TruncatedSeries> homogeneous_decomposition() const {
        std::vector<TruncatedSeries> out;
        for (int d = 0; d <= order_; ++d) out.push_back(homogeneous_part(d));
        return out;
    }
    // Lowest degree with a nonzero coefficient; order+1 when zero.
    int valuation() const {
        int v = order_ + 1;
        for (const auto& [m, c] : terms_) v = std::min(v, m.deg());
        return v;
    }

    TruncatedSeries& operator+=(const TruncatedSeries& o) {
        check(o);
        for (const auto& [m, c] : o.terms_) add_to(m, c);
        return *this;
    }
    TruncatedSeries& operator-=(const TruncatedSeries& o) {
        check(o);
        for (const auto& [m, c] : o.terms_) add_to(m, -c);
        return *this;
    }
    TruncatedSeries operator-() const {
        TruncatedSeries s = *this;
        for (auto& [m, c] : s.terms_) c = -c;
        return s;
    }
    friend TruncatedSeries operator+(TruncatedSeries a, const TruncatedSeries& b) { return a += b; }
    friend TruncatedSeries operator-(TruncatedSeries a, const TruncatedSeries& b) { return a -= b; }

    friend TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) {
        a.check(b);
        TruncatedSeries s(a.vars_, a.order_);
        for (const auto& [ma, ca] : a.terms_) {
            const int da = ma.deg();
            for (const auto& [mb, cb] : b.terms_) {
                if (da + mb.deg() > a.order_) continue;
                Mono m;
                for (int k = 0; k < kMaxVars; ++k) m.e[k] = static_cast<std::uint8_t>(ma.e[k] + mb.e[k]);
                s.add_to(m, ca * cb);
            }
        }
        return s;
    }
    TruncatedSeries scaled(const C& c) const {
        TruncatedSeries s(vars_, order_);
        for (const auto& [m, x] : terms_) s.set(m, x * c);
        return s;
    }

    // Multiplicative inverse; needs an invertible constant term (field coefficients only).
    TruncatedSeries inverse() const {
        auto it = terms_.find(Mono{});
        if (it == terms_.end()) throw std::domain_error("series without constant term is not invertible");
        const C inv0 = C(1) / it->second;
        // 1/(c0 (1 + r)) = inv0 * sum (-r)^k
        TruncatedSeries r = scaled(inv0);
        r.terms_.erase(Mono{});
        TruncatedSeries acc = constant(vars_, order_, C(1));
        TruncatedSeries pw = acc;
        for (int k = 1; k <= order_; ++k) {
            pw = pw * r;
            if (pw.is_zero()) break;
            if (k % 2) acc -= pw;
            else acc += pw;
        }
        return acc.scaled(inv0);
    }

    friend bool operator==(const TruncatedSeries& a, const TruncatedSeries& b) {
        if (a.order_ != b.order_ || a.vars_ != b.vars_ || a.terms_.size() != b.terms_.size()) return false;
        auto ia = a.terms_.begin();
        for (auto ib = b.terms_.begin(); ib != b.terms_.end(); ++ia, ++ib)
            if (ia->first != ib->first || !(ia->second == ib->second)) return false;
        return true;
    }

private:
    std::vector<std::string> vars_;
    int order_ = 0;
    Map terms_;

    void check(const TruncatedSeries& o) const {
        if (o.order_ != order_) throw std::invalid_argument("inconsistent truncation orders");
        if (o.vars_ != vars_) throw std::invalid_argument("series variable lists differ");
    }
};

// Substitute series for every variable of P; all images must share one order.
// `lift` converts a rational coefficient of P into C.
template <class C, class Lift>
TruncatedSeries<C> substitute_series(const Poly& P, const std::vector<TruncatedSeries<C>>& images, Lift lift) {
    if (static_cast<int>(images.size()) != P.nvars()) throw std::invalid_argument("substitution arity mismatch");
    if (images.empty()) throw std::invalid_argument("no series images supplied");
    const auto& vars = images.front().vars();
    const int order = images.front().order();
    for (const auto& s : images)
        if (s.order() != order || s.vars() != vars) throw std::invalid_argument("inconsistent truncation orders");
    const C one = lift(Rational(1));
    std::vector<std::vector<TruncatedSeries<C>>> pw(P.nvars());
    for (int i = 0; i < P.nvars(); ++i) {
        pw[i].push_back(TruncatedSeries<C>::constant(vars, order, one));
        for (int k = 1; k <= P.degree_in(i); ++k) pw[i].push_back(pw[i].back() * images[i]);
    }
    TruncatedSeries<C> acc(vars, order);
    for (const auto& [m, c] : P.terms()) {
        TruncatedSeries<C> t = TruncatedSeries<C>::constant(vars, order, lift(c));
        for (int i = 0; i < P.nvars(); ++i)
            if (m.e[i]) t = t * pw[i][m.e[i]];
        acc += t;
    }
    return acc;
}

inline TruncatedSeries<Rational> substitute_series(const Poly& P, const std::vector<TruncatedSeries<Rational>>& images) {
    return substitute_series<Rational>(P, images, [](const Rational& c) { return c; });
}

}  // namespace hl
