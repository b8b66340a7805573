#include "heightlab/poly.hpp"

#include <cstring>

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace hl {

// ---- multi-indices ------------------------------------------------------------

long length(const MultiIndex& I) {
    long s = 0;
    for (int x : I) s += x;
    return s;
}

Integer mi_factorial(const MultiIndex& I) {
    Integer r = 1;
    for (int x : I) r *= factorial(static_cast<unsigned long>(x));
    return r;
}

Integer mi_binomial(const MultiIndex& J, const MultiIndex& I) {
    if (J.size() != I.size()) throw std::invalid_argument("multi-index arity mismatch");
    Integer r = 1;
    for (std::size_t k = 0; k < I.size(); ++k) {
        if (I[k] > J[k]) return 0;
        r *= binomial(static_cast<unsigned long>(J[k]), static_cast<unsigned long>(I[k]));
    }
    return r;
}

namespace {
void gen_indices(int n, int pos, int remaining, MultiIndex& cur, std::vector<MultiIndex>& out) {
    if (pos == n - 1) {
        cur[pos] = remaining;
        out.push_back(cur);
        return;
    }
    for (int v = remaining; v >= 0; --v) {
        cur[pos] = v;
        gen_indices(n, pos + 1, remaining - v, cur, out);
    }
}
}  // namespace

std::vector<MultiIndex> indices_of_length(int n, int m) {
    std::vector<MultiIndex> out;
    if (n == 0) {
        if (m == 0) out.push_back({});
        return out;
    }
    MultiIndex cur(n, 0);
    gen_indices(n, 0, m, cur, out);
    return out;
}

std::vector<MultiIndex> indices_up_to(int n, int m) {
    std::vector<MultiIndex> out;
    for (int k = 0; k <= m; ++k) {
        auto part = indices_of_length(n, k);
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

std::string mi_to_string(const MultiIndex& I) {
    std::string s = "(";
    for (std::size_t k = 0; k < I.size(); ++k) {
        if (k) s += ",";
        s += std::to_string(I[k]);
    }
    return s + ")";
}

Mono Mono::from(const MultiIndex& I) {
    if (I.size() > static_cast<std::size_t>(kMaxVars)) throw std::invalid_argument("arity exceeds 16");
    Mono m;
    for (std::size_t k = 0; k < I.size(); ++k) {
        if (I[k] < 0 || I[k] > kMaxDegree) throw std::invalid_argument("exponent out of range");
        m.e[k] = static_cast<std::uint8_t>(I[k]);
    }
    return m;
}

MultiIndex Mono::to_index(int n) const {
    MultiIndex I(n);
    for (int k = 0; k < n; ++k) I[k] = e[k];
    return I;
}

bool grlex_greater(const Mono& a, const Mono& b) {
    int da = a.deg(), db = b.deg();
    if (da != db) return da > db;
    return std::memcmp(a.e.data(), b.e.data(), kMaxVars) > 0;
}

std::size_t MonoHash::operator()(const Mono& m) const noexcept {
    std::uint64_t lo = 0, hi = 0;
    for (int i = 0; i < 8; ++i) lo |= static_cast<std::uint64_t>(m.e[i]) << (8 * i);
    for (int i = 0; i < 8; ++i) hi |= static_cast<std::uint64_t>(m.e[8 + i]) << (8 * i);
    std::uint64_t h = lo * 0x9E3779B97F4A7C15ULL ^ (hi + 0x7F4A7C159E3779B9ULL + (lo << 6) + (lo >> 2));
    return static_cast<std::size_t>(h ^ (h >> 29));
}

// ---- Poly -------------------------------------------------------------------

namespace {

void check_vars(const std::vector<std::string>& vars) {
    if (vars.size() > static_cast<std::size_t>(kMaxVars))
        throw std::invalid_argument("at most 16 variables are supported");
}

// Variable list of a binary operation; constants with no variables adapt.
const std::vector<std::string>& common_vars(const Poly& a, const Poly& b) {
    if (a.vars() == b.vars()) return a.vars();
    if (a.nvars() == 0 && a.is_constant()) return b.vars();
    if (b.nvars() == 0 && b.is_constant()) return a.vars();
    throw std::invalid_argument("polynomial variable lists differ");
}

__int128 to_i128(const mpz_class& z) {
    std::size_t n = mpz_size(z.get_mpz_t());
    unsigned __int128 u = 0;
    if (n > 0) u = mpz_getlimbn(z.get_mpz_t(), 0);
    if (n > 1) u |= static_cast<unsigned __int128>(mpz_getlimbn(z.get_mpz_t(), 1)) << 64;
    return mpz_sgn(z.get_mpz_t()) < 0 ? -static_cast<__int128>(u) : static_cast<__int128>(u);
}

mpz_class from_i128(__int128 v) {
    bool neg = v < 0;
    unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
    mpz_class r = static_cast<unsigned long>(u >> 64);
    r <<= 64;
    r += static_cast<unsigned long>(u & 0xFFFFFFFFFFFFFFFFULL);
    return neg ? mpz_class(-r) : r;
}

std::size_t max_bits(const std::vector<mpz_class>& v) {
    std::size_t b = 0;
    for (const auto& z : v) b = std::max(b, mpz_sizeinbase(z.get_mpz_t(), 2));
    return b;
}

// Scale coefficients to integers: returns numerators and the common denominator.
Integer integerize(const std::vector<Poly::Term>& t, std::vector<mpz_class>& nums) {
    Integer L = 1;
    for (const auto& [m, c] : t) mpz_lcm(L.get_mpz_t(), L.get_mpz_t(), c.get_den_mpz_t());
    nums.resize(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) nums[i] = t[i].second.get_num() * (L / t[i].second.get_den());
    return L;
}

constexpr std::size_t kDenseBoxCap = std::size_t(1) << 22;

}  // namespace

class PolyAccess {
public:
    static std::vector<Poly::Term>& terms(Poly& p) { return p.terms_; }
    static void set_vars(Poly& p, std::vector<std::string> v) { p.vars_ = std::move(v); }
};

Poly::Poly(std::vector<std::string> vars) : vars_(std::move(vars)) { check_vars(vars_); }

Poly Poly::constant(std::vector<std::string> vars, const Rational& c) {
    Poly p(std::move(vars));
    if (c != 0) p.terms_.push_back({Mono{}, c});
    return p;
}

Poly Poly::variable(std::vector<std::string> vars, int i) {
    Poly p(std::move(vars));
    if (i < 0 || i >= p.nvars()) throw std::out_of_range("variable index");
    Mono m;
    m.e[i] = 1;
    p.terms_.push_back({m, Rational(1)});
    return p;
}

Poly Poly::monomial(std::vector<std::string> vars, const MultiIndex& I, const Rational& c) {
    Poly p(std::move(vars));
    if (static_cast<int>(I.size()) != p.nvars()) throw std::invalid_argument("monomial arity mismatch");
    if (c != 0) p.terms_.push_back({Mono::from(I), c});
    return p;
}

Poly Poly::from_terms(std::vector<std::string> vars, std::vector<Term> terms) {
    Poly p(std::move(vars));
    p.terms_ = std::move(terms);
    for (auto& t : p.terms_) {
        for (int k = p.nvars(); k < kMaxVars; ++k)
            if (t.first.e[k]) throw std::invalid_argument("exponent beyond arity");
        int total = 0;
        for (auto x : t.first.e) total += x;
        if (total > kMaxDegree) throw std::invalid_argument("total degree exceeds 64");
    }
    p.normalize();
    return p;
}

void Poly::normalize() {
    std::sort(terms_.begin(), terms_.end(),
              [](const Term& a, const Term& b) { return grlex_greater(a.first, b.first); });
    std::vector<Term> out;
    out.reserve(terms_.size());
    for (auto& t : terms_) {
        if (!out.empty() && out.back().first == t.first) {
            out.back().second += t.second;
        } else {
            if (!out.empty() && out.back().second == 0) out.pop_back();
            out.push_back(std::move(t));
        }
    }
    if (!out.empty() && out.back().second == 0) out.pop_back();
    terms_ = std::move(out);
}

bool Poly::is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].first.deg() == 0); }

Rational Poly::constant_term() const {
    if (!terms_.empty() && terms_.back().first.deg() == 0) return terms_.back().second;
    return 0;
}

long Poly::total_degree() const {
    if (terms_.empty()) return kMinusInfinity;
    return terms_.front().first.deg();
}

int Poly::degree_in(int var) const {
    int d = 0;
    for (const auto& t : terms_) d = std::max<int>(d, t.first.e[var]);
    return d;
}

bool Poly::is_homogeneous() const {
    if (terms_.empty()) return true;
    int d = terms_.front().first.deg();
    return std::all_of(terms_.begin(), terms_.end(), [d](const Term& t) { return t.first.deg() == d; });
}

std::vector<long> Poly::multidegree(const std::vector<int>& blocks) const {
    std::vector<long> out(blocks.size(), kMinusInfinity);
    if (terms_.empty()) return out;
    int off = 0;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        long d = 0;
        for (int k = off; k < off + blocks[b]; ++k) d += terms_.front().first.e[k];
        out[b] = d;
        off += blocks[b];
    }
    return out;
}

bool Poly::is_multihomogeneous(const std::vector<int>& blocks) const {
    int total = 0;
    for (int b : blocks) total += b;
    if (total != nvars()) throw std::invalid_argument("block sizes do not cover the variables");
    if (terms_.empty()) return true;
    auto ref = multidegree(blocks);
    for (const auto& t : terms_) {
        int off = 0;
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            long d = 0;
            for (int k = off; k < off + blocks[b]; ++k) d += t.first.e[k];
            if (d != ref[b]) return false;
            off += blocks[b];
        }
    }
    return true;
}

Rational Poly::coefficient(const MultiIndex& I) const {
    Mono m = Mono::from(I);
    auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                               [](const Term& t, const Mono& x) { return grlex_greater(t.first, x); });
    if (it != terms_.end() && it->first == m) return it->second;
    return 0;
}

Rational Poly::leading_coefficient() const {
    if (terms_.empty()) throw std::domain_error("leading coefficient of zero polynomial");
    return terms_.front().second;
}

std::vector<Rational> Poly::coefficients() const {
    std::vector<Rational> out;
    out.reserve(terms_.size());
    for (const auto& t : terms_) out.push_back(t.second);
    return out;
}

Poly Poly::operator-() const {
    Poly r = *this;
    for (auto& t : r.terms_) t.second = -t.second;
    return r;
}

namespace {
std::vector<Poly::Term> merge_terms(const std::vector<Poly::Term>& a, const std::vector<Poly::Term>& b, bool subtract) {
    std::vector<Poly::Term> out;
    out.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && grlex_greater(a[i].first, b[j].first))) {
            out.push_back(a[i++]);
        } else if (i == a.size() || grlex_greater(b[j].first, a[i].first)) {
            out.push_back({b[j].first, subtract ? Rational(-b[j].second) : b[j].second});
            ++j;
        } else {
            Rational c = subtract ? Rational(a[i].second - b[j].second) : Rational(a[i].second + b[j].second);
            if (c != 0) out.push_back({a[i].first, std::move(c)});
            ++i;
            ++j;
        }
    }
    return out;
}
}  // namespace

Poly& Poly::operator+=(const Poly& o) {
    vars_ = common_vars(*this, o);
    terms_ = merge_terms(terms_, o.terms_, false);
    return *this;
}

Poly& Poly::operator-=(const Poly& o) {
    vars_ = common_vars(*this, o);
    terms_ = merge_terms(terms_, o.terms_, true);
    return *this;
}

Poly& Poly::operator*=(const Rational& c) {
    if (c == 0) {
        terms_.clear();
        return *this;
    }
    for (auto& t : terms_) t.second *= c;
    return *this;
}

Poly& Poly::operator*=(const Poly& o) {
    *this = *this * o;
    return *this;
}

namespace {

Poly mul_sparse(const std::vector<std::string>& vars, const Poly& a, const Poly& b) {
    std::unordered_map<Mono, Rational, MonoHash> acc;
    acc.reserve(a.size() * b.size());
    Rational prod;
    for (const auto& [ma, ca] : a.terms()) {
        for (const auto& [mb, cb] : b.terms()) {
            Mono m;
            for (int k = 0; k < kMaxVars; ++k) m.e[k] = static_cast<std::uint8_t>(ma.e[k] + mb.e[k]);
            mpq_mul(prod.get_mpq_t(), ca.get_mpq_t(), cb.get_mpq_t());
            acc[m] += prod;
        }
    }
    std::vector<Poly::Term> terms;
    terms.reserve(acc.size());
    for (auto& kv : acc)
        if (kv.second != 0) terms.emplace_back(kv.first, std::move(kv.second));
    return Poly::from_terms(vars, std::move(terms));
}

}  // namespace

namespace {

struct Operand {
    Integer scale;  // integer weight w_i of the product
    std::vector<mpz_class> na, nb;
    std::vector<std::size_t> ia, ib;
};

template <class Acc>
std::vector<Acc>& scratch_for() {
    thread_local std::vector<Acc> buf;
    return buf;
}

// Accumulates sum_i w_i * A_i * B_i into the all-zero scratch, then drains it in sweep order.
template <class Acc, class Sweep>
void accumulate_fixed(const std::vector<Operand>& ops, std::size_t box, const Sweep& sweep, const Integer& den,
                      std::vector<Poly::Term>& terms) {
    auto& scratch = scratch_for<Acc>();
    if (scratch.size() < box) scratch.assign(box, 0);
    Acc* acc = scratch.data();
    try {
        for (const auto& op : ops) {
            std::vector<Acc> va(op.na.size()), vb(op.nb.size());
            Integer w = op.scale;
            for (std::size_t i = 0; i < va.size(); ++i) {
                Integer x = op.na[i] * w;
                va[i] = static_cast<Acc>(to_i128(x));
            }
            for (std::size_t j = 0; j < vb.size(); ++j) vb[j] = static_cast<Acc>(to_i128(op.nb[j]));
            const std::size_t nbsz = vb.size();
            const Acc* pb = vb.data();
            const std::size_t* ib = op.ib.data();
            for (std::size_t i = 0; i < va.size(); ++i) {
                const Acc x = va[i];
                Acc* base = acc + op.ia[i];
                for (std::size_t j = 0; j < nbsz; ++j) base[ib[j]] += x * pb[j];
            }
        }
        sweep([&](const std::vector<int>& e, std::size_t idx) {
            if (acc[idx] == 0) return;
            Rational c(from_i128(static_cast<__int128>(acc[idx])), den);
            acc[idx] = 0;
            c.canonicalize();
            Mono m;
            for (std::size_t k = 0; k < e.size(); ++k) m.e[k] = static_cast<std::uint8_t>(e[k]);
            terms.emplace_back(m, std::move(c));
        });
    } catch (...) {
        std::fill(scratch.begin(), scratch.end(), Acc(0));
        throw;
    }
}

}  // namespace

Poly sum_of_products(const std::vector<ScaledProduct>& ps) {
    std::vector<const ScaledProduct*> live;
    std::vector<std::string> vars;
    bool have_vars = false;
    for (const auto& p : ps) {
        if (!have_vars || vars.empty()) {
            const auto& v = common_vars(*p.a, *p.b);
            if (!v.empty() || !have_vars) vars = v;
            have_vars = true;
        } else {
            const auto& v = common_vars(*p.a, *p.b);
            if (!v.empty() && v != vars) throw std::invalid_argument("polynomial variable lists differ");
        }
        if (p.c != 0 && !p.a->is_zero() && !p.b->is_zero()) live.push_back(&p);
    }
    if (live.empty()) return Poly(vars);
    const int n = static_cast<int>(vars.size());
    std::vector<int> radix(n, 1);
    int dmax = 0, dmin = kMaxDegree * kMaxVars;
    std::size_t work = 0;
    for (const auto* p : live) {
        for (int k = 0; k < n; ++k) {
            long dk = p->a->degree_in(k) + p->b->degree_in(k);
            if (dk > kMaxDegree) throw std::overflow_error("degree exceeds 64");
            radix[k] = std::max<int>(radix[k], static_cast<int>(dk) + 1);
        }
        long td = p->a->total_degree() + p->b->total_degree();
        if (td > kMaxDegree) throw std::overflow_error("total degree exceeds 64");
        dmax = std::max<int>(dmax, static_cast<int>(td));
        dmin = std::min(dmin, p->a->terms().back().first.deg() + p->b->terms().back().first.deg());
        work += p->a->size() * p->b->size();
    }

    std::vector<std::size_t> stride(n + 1, 1);
    bool dense = work > 64;
    for (int k = 0; k < n && dense; ++k) {
        stride[k + 1] = stride[k] * radix[k];
        if (stride[k + 1] > kDenseBoxCap) dense = false;
    }
    if (dense && stride[n] > 64 * work) dense = false;
    if (!dense) {
        Poly r(vars);
        for (const auto* p : live) r += mul_sparse(vars, *p->a, *p->b) * p->c;
        return r;
    }
    const std::size_t box = stride[n];
    auto index_of = [&](const Mono& m) {
        std::size_t idx = 0;
        for (int k = 0; k < n; ++k) idx += m.e[k] * stride[k];
        return idx;
    };

    // Weights: c_i / (la_i lb_i) = w_i / den with integer w_i.
    std::vector<Operand> ops(live.size());
    std::vector<Rational> s(live.size());
    Integer den = 1;
    for (std::size_t i = 0; i < live.size(); ++i) {
        const auto* p = live[i];
        Integer la = integerize(p->a->terms(), ops[i].na);
        Integer lb = integerize(p->b->terms(), ops[i].nb);
        s[i] = p->c / Rational(la * lb);
        mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), s[i].get_den_mpz_t());
        ops[i].ia.resize(p->a->size());
        ops[i].ib.resize(p->b->size());
        for (std::size_t j = 0; j < p->a->size(); ++j) ops[i].ia[j] = index_of(p->a->terms()[j].first);
        for (std::size_t j = 0; j < p->b->size(); ++j) ops[i].ib[j] = index_of(p->b->terms()[j].first);
    }
    std::size_t bits = 0;
    for (std::size_t i = 0; i < live.size(); ++i) {
        ops[i].scale = s[i].get_num() * (den / s[i].get_den());
        std::size_t tmin = std::min(live[i]->a->size(), live[i]->b->size());
        std::size_t lg = 0;
        while ((std::size_t(1) << lg) < tmin) ++lg;
        bits = std::max(bits, mpz_sizeinbase(ops[i].scale.get_mpz_t(), 2) + max_bits(ops[i].na) +
                                  max_bits(ops[i].nb) + lg);
    }
    std::size_t lgp = 0;
    while ((std::size_t(1) << lgp) < live.size()) ++lgp;
    bits += lgp + 1;

    // Visits the cells of total degree dmax..dmin in grlex-descending order.
    auto sweep = [&](auto&& take) {
        std::vector<int> e(n, 0), rest(n + 1, 0);
        for (int k = n - 1; k >= 0; --k) rest[k] = rest[k + 1] + radix[k] - 1;
        auto rec = [&](auto&& self, int k, int left, std::size_t idx) -> void {
            if (k == n - 1) {
                if (left > radix[k] - 1) return;
                e[k] = left;
                take(e, idx + left * stride[k]);
                return;
            }
            int hi = std::min(left, radix[k] - 1);
            int lo = std::max(0, left - rest[k + 1]);
            for (int v = hi; v >= lo; --v) {
                e[k] = v;
                self(self, k + 1, left - v, idx + v * stride[k]);
            }
        };
        if (n == 0) {
            take(e, 0);
            return;
        }
        for (int D = dmax; D >= dmin; --D)
            if (D <= rest[0]) rec(rec, 0, D, 0);
    };

    std::vector<Poly::Term> terms;
    if (bits <= 62) {
        accumulate_fixed<std::int64_t>(ops, box, sweep, den, terms);
    } else if (bits <= 126) {
        accumulate_fixed<__int128>(ops, box, sweep, den, terms);
    } else {
        std::vector<mpz_class> acc(box);
        for (const auto& op : ops) {
            std::vector<mpz_class> wa(op.na.size());
            for (std::size_t i = 0; i < wa.size(); ++i) wa[i] = op.na[i] * op.scale;
            for (std::size_t i = 0; i < wa.size(); ++i)
                for (std::size_t j = 0; j < op.nb.size(); ++j)
                    mpz_addmul(acc[op.ia[i] + op.ib[j]].get_mpz_t(), wa[i].get_mpz_t(), op.nb[j].get_mpz_t());
        }
        sweep([&](const std::vector<int>& e, std::size_t idx) {
            if (acc[idx] == 0) return;
            Rational c(acc[idx], den);
            c.canonicalize();
            Mono m;
            for (int k = 0; k < n; ++k) m.e[k] = static_cast<std::uint8_t>(e[k]);
            terms.emplace_back(m, std::move(c));
        });
    }
    Poly r(vars);
    PolyAccess::terms(r) = std::move(terms);
    return r;
}

Poly operator*(const Poly& a, const Poly& b) {
    const auto& vars = common_vars(a, b);
    if (a.is_zero() || b.is_zero()) return Poly(vars);
    if (a.size() * b.size() <= 64) {
        for (int k = 0; k < static_cast<int>(vars.size()); ++k)
            if (a.degree_in(k) + b.degree_in(k) > kMaxDegree) throw std::overflow_error("degree exceeds 64");
        if (a.total_degree() + b.total_degree() > kMaxDegree) throw std::overflow_error("total degree exceeds 64");
        return mul_sparse(vars, a, b);
    }
    return sum_of_products({{Rational(1), &a, &b}});
}

bool operator==(const Poly& a, const Poly& b) {
    if (a.terms_.size() != b.terms_.size()) return false;
    if (a.vars_ != b.vars_ && !(a.is_zero() && b.is_zero())) {
        if (!(a.is_constant() && b.is_constant() && (a.nvars() == 0 || b.nvars() == 0))) return false;
    }
    for (std::size_t i = 0; i < a.terms_.size(); ++i)
        if (a.terms_[i].first != b.terms_[i].first || a.terms_[i].second != b.terms_[i].second) return false;
    return true;
}

Poly Poly::pow(unsigned e) const {
    Poly r = Poly::constant(vars_, 1);
    Poly base = *this;
    while (e) {
        if (e & 1u) r = r * base;
        e >>= 1;
        if (e) base = base * base;
    }
    return r;
}

Poly Poly::derivative(int var) const {
    if (var < 0 || var >= nvars()) throw std::out_of_range("derivative variable");
    Poly r(vars_);
    for (const auto& [m, c] : terms_) {
        if (m.e[var] == 0) continue;
        Mono mm = m;
        --mm.e[var];
        r.terms_.push_back({mm, c * m.e[var]});
    }
    r.normalize();
    return r;
}

Poly Poly::divided_derivative(const MultiIndex& I) const {
    if (static_cast<int>(I.size()) != nvars()) throw std::invalid_argument("divided derivative arity mismatch");
    Poly r(vars_);
    for (const auto& [m, c] : terms_) {
        Integer coef = 1;
        Mono mm = m;
        bool zero = false;
        for (int k = 0; k < nvars(); ++k) {
            if (I[k] < 0) throw std::invalid_argument("negative multi-index entry");
            if (m.e[k] < I[k]) {
                zero = true;
                break;
            }
            coef *= binomial(m.e[k], static_cast<unsigned long>(I[k]));
            mm.e[k] = static_cast<std::uint8_t>(m.e[k] - I[k]);
        }
        if (!zero) r.terms_.push_back({mm, c * coef});
    }
    r.normalize();
    return r;
}

Poly Poly::homogeneous_part(long d) const {
    Poly r(vars_);
    for (const auto& t : terms_)
        if (t.first.deg() == d) r.terms_.push_back(t);
    return r;
}

Rational Poly::evaluate(const std::vector<Rational>& x) const {
    if (static_cast<int>(x.size()) != nvars()) throw std::invalid_argument("evaluation arity mismatch");
    std::vector<std::vector<Rational>> pw(nvars());
    for (int i = 0; i < nvars(); ++i) {
        int dmax = degree_in(i);
        pw[i].resize(dmax + 1, Rational(1));
        for (int k = 1; k <= dmax; ++k) pw[i][k] = pw[i][k - 1] * x[i];
    }
    Rational acc = 0, t;
    for (const auto& [m, c] : terms_) {
        t = c;
        for (int i = 0; i < nvars(); ++i)
            if (m.e[i]) t *= pw[i][m.e[i]];
        acc += t;
    }
    return acc;
}

Poly Poly::substitute(const std::vector<Poly>& images) const {
    if (static_cast<int>(images.size()) != nvars()) throw std::invalid_argument("substitution arity mismatch");
    std::vector<std::string> target;
    for (const auto& im : images)
        if (im.nvars() > 0) {
            target = im.vars();
            break;
        }
    for (const auto& im : images)
        if (im.nvars() > 0 && im.vars() != target) throw std::invalid_argument("substitution images differ in variables");
    std::vector<std::vector<Poly>> pw(nvars());
    for (int i = 0; i < nvars(); ++i) {
        int dmax = degree_in(i);
        pw[i].push_back(Poly::constant(target, 1));
        for (int k = 1; k <= dmax; ++k) pw[i].push_back(pw[i].back() * images[i]);
    }
    Poly acc(target);
    for (const auto& [m, c] : terms_) {
        Poly t = Poly::constant(target, c);
        for (int i = 0; i < nvars(); ++i)
            if (m.e[i]) t = t * pw[i][m.e[i]];
        acc += t;
    }
    return acc;
}

Poly Poly::embed(std::vector<std::string> new_vars, const std::vector<int>& map) const {
    if (static_cast<int>(map.size()) != nvars()) throw std::invalid_argument("embedding arity mismatch");
    Poly r(std::move(new_vars));
    for (const auto& [m, c] : terms_) {
        Mono mm;
        for (int k = 0; k < nvars(); ++k) {
            if (map[k] < 0 || map[k] >= r.nvars()) throw std::out_of_range("embedding target");
            mm.e[map[k]] = static_cast<std::uint8_t>(mm.e[map[k]] + m.e[k]);
        }
        r.terms_.push_back({mm, c});
    }
    r.normalize();
    return r;
}

Poly Poly::renamed(std::vector<std::string> new_vars) const {
    if (static_cast<int>(new_vars.size()) != nvars()) throw std::invalid_argument("rename arity mismatch");
    Poly r = *this;
    r.vars_ = std::move(new_vars);
    return r;
}

bool Poly::divide_exact(const Poly& divisor, Poly& quotient) const {
    if (divisor.is_zero()) throw std::domain_error("division by zero polynomial");
    const auto& vars = common_vars(*this, divisor);
    quotient = Poly(vars);
    Poly r = *this;
    if (r.nvars() == 0) r.vars_ = vars;
    const Mono& ld = divisor.terms_.front().first;
    const Rational& lc = divisor.terms_.front().second;
    std::vector<Term> qterms;
    while (!r.is_zero()) {
        const Mono& lr = r.terms_.front().first;
        Mono q;
        for (int k = 0; k < kMaxVars; ++k) {
            if (lr.e[k] < ld.e[k]) return false;
            q.e[k] = static_cast<std::uint8_t>(lr.e[k] - ld.e[k]);
        }
        Rational qc = r.terms_.front().second / lc;
        Poly t(vars);
        t.terms_.push_back({q, qc});
        qterms.push_back({q, qc});
        r -= t * divisor;
    }
    quotient = Poly::from_terms(vars, std::move(qterms));
    return true;
}

std::string Poly::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : terms_) {
        Rational a = rabs(c);
        if (first)
            os << (c < 0 ? "-" : "");
        else
            os << (c < 0 ? " - " : " + ");
        first = false;
        bool unit = (a == 1) && m.deg() > 0;
        if (!unit) os << hl::to_string(a);
        bool need_star = !unit;
        for (int k = 0; k < nvars(); ++k) {
            if (!m.e[k]) continue;
            if (need_star) os << "*";
            os << vars_[k];
            if (m.e[k] > 1) os << "^" << static_cast<int>(m.e[k]);
            need_star = true;
        }
    }
    return os.str();
}

Rational length_v(const Poly& P, const Place& v) {
    Rational s = 0;
    for (const auto& t : P.terms()) s += abs_v(t.second, v);
    return s;
}

// ---- localization -------------------------------------------------------------

const Poly& Localizer::power(int k) const {
    if (k < 0) throw std::invalid_argument("negative denominator power");
    while (static_cast<int>(pow_.size()) <= k) pow_.push_back(pow_.back() * D_);
    return pow_[k];
}

namespace {
std::shared_ptr<const Localizer> pick_ctx(const std::shared_ptr<const Localizer>& a,
                                          const std::shared_ptr<const Localizer>& b) {
    if (a && b && a != b && a->denominator() != b->denominator())
        throw std::invalid_argument("localized polynomials over different denominators");
    return a ? a : b;
}
}  // namespace

LocalizedPolynomial& LocalizedPolynomial::operator+=(const LocalizedPolynomial& o) {
    auto ctx = pick_ctx(ctx_, o.ctx_);
    if (o.is_zero()) {
        if (is_zero()) k_ = std::max(k_, o.k_);
        ctx_ = ctx;
        return *this;
    }
    if (is_zero() && k_ <= o.k_) {
        num_ = o.num_;
        k_ = o.k_;
        ctx_ = ctx;
        return *this;
    }
    int k = std::max(k_, o.k_);
    Poly a = k_ < k ? num_ * ctx->power(k - k_) : num_;
    Poly b = o.k_ < k ? o.num_ * ctx->power(k - o.k_) : o.num_;
    num_ = a + b;
    k_ = k;
    ctx_ = ctx;
    return *this;
}

LocalizedPolynomial& LocalizedPolynomial::operator-=(const LocalizedPolynomial& o) { return *this += -o; }

LocalizedPolynomial& LocalizedPolynomial::operator*=(const LocalizedPolynomial& o) {
    ctx_ = pick_ctx(ctx_, o.ctx_);
    num_ = num_ * o.num_;
    k_ += o.k_;
    return *this;
}

LocalizedPolynomial LocalizedPolynomial::reduced() const {
    if (!ctx_ || is_zero()) return {ctx_, num_, 0};
    Poly cur = num_;
    int k = k_;
    while (k > 0) {
        Poly q;
        if (!cur.divide_exact(ctx_->denominator(), q)) break;
        cur = std::move(q);
        --k;
    }
    return {ctx_, cur, k};
}

Poly LocalizedPolynomial::cleared_to(int target) const {
    if (target < k_) throw std::invalid_argument("cannot clear to a lower power");
    if (target == k_ || is_zero()) return num_;
    return num_ * ctx_->power(target - k_);
}

Rational LocalizedPolynomial::evaluate(const std::vector<Rational>& x) const {
    if (is_zero()) return 0;
    Rational d = ctx_ ? ctx_->denominator().evaluate(x) : Rational(1);
    if (k_ > 0 && d == 0) throw std::domain_error("denominator vanishes at evaluation point");
    return num_.evaluate(x) / rpow(d, k_);
}

}  // namespace hl
