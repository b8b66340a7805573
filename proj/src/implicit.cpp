#include "heightlab/implicit.hpp"

#include "heightlab/json_io.hpp"
#include "heightlab/measures.hpp"

#include <algorithm>
#include <stdexcept>

namespace hl {

// ---- problem ----------------------------------------------------------------------

std::vector<Rational> ImplicitProblem::point() const {
    std::vector<Rational> x = y;
    x.push_back(t);
    return x;
}

void ImplicitProblem::validate() const {
    if (P.nvars() < 2) throw std::invalid_argument("implicit problem needs variables Y_1..Y_n, T with n >= 1");
    if (static_cast<int>(y.size()) != n()) throw std::invalid_argument("base point arity differs from n");
    if (P.total_degree() > degree_bound()) throw std::invalid_argument("total degree exceeds the declared bound");
    if (P.evaluate(point()) != 0) throw std::invalid_argument("P does not vanish at the base point");
    if (dT().evaluate(point()) == 0) throw std::invalid_argument("dP/dT vanishes at the base point");
}

json ImplicitProblem::to_json() const {
    json j;
    j["P"] = poly_to_json(P);
    j["y"] = rationals_to_json(y);
    j["t"] = hl::to_string(t);
    j["d"] = degree_bound();
    return j;
}

ImplicitProblem ImplicitProblem::from_json(const json& j) {
    ImplicitProblem pb;
    pb.P = poly_from_json(j.at("P"));
    pb.y = rationals_from_json(j.at("y"));
    pb.t = rational_from_json(j.at("t"));
    if (j.contains("d")) pb.d = j.at("d").get<long>();
    return pb;
}

// ---- series iteration -------------------------------------------------------------

namespace {

std::vector<std::string> series_vars(int n) {
    std::vector<std::string> v;
    for (int i = 1; i <= n; ++i) v.push_back("X" + std::to_string(i));
    return v;
}

// acc += c * X^J * S
template <class C>
void add_shifted(TruncatedSeries<C>& acc, const C& c, const Mono& J, const TruncatedSeries<C>& S) {
    for (const auto& [m, s] : S.terms()) {
        Mono mm;
        for (int k = 0; k < kMaxVars; ++k) mm.e[k] = static_cast<std::uint8_t>(m.e[k] + J.e[k]);
        acc.add_to(mm, c * s);
    }
}

struct TaylorTerm {
    Mono J;  // exponent in X
    int j;   // power of U
    Poly D;  // D^{(J,j)} P
};

// Nonzero D^{(J,j)}P, (J,j) != 0, |J| + j <= maxdeg.
std::vector<TaylorTerm> taylor_terms(const Poly& P, int maxdeg) {
    const int n = P.nvars() - 1;
    std::vector<TaylorTerm> out;
    for (const auto& idx : indices_up_to(n + 1, maxdeg)) {
        if (length(idx) == 0) continue;
        Poly D = P.divided_derivative(idx);
        if (D.is_zero()) continue;
        MultiIndex J(idx.begin(), idx.end() - 1);
        out.push_back({Mono::from(J), idx.back(), std::move(D)});
    }
    return out;
}

// U = sum V_m with V_m = -B_m / P'_T, B_m the degree-m slice of Phi_{U_{m-1}}.
// Returns V_1..V_order (index 0 unused) and the slices B_1..B_{order+1}.
template <class C, class Ops>
void iterate(const Poly& P, int order, Ops& ops, std::vector<TruncatedSeries<C>>& V,
             std::vector<TruncatedSeries<C>>& B) {
    const int n = P.nvars() - 1;
    const int top = order + 1;
    const auto vars = series_vars(n);
    const long d = P.total_degree();
    auto terms = taylor_terms(P, static_cast<int>(std::min<long>(d, top)));
    std::vector<C> coef;
    for (const auto& t : terms) coef.push_back(ops.coef(t.D));

    // pw[j][m] = degree-m slice of U^j (only final slices are ever read).
    std::vector<std::vector<TruncatedSeries<C>>> pw(top + 1, std::vector<TruncatedSeries<C>>(top + 1));
    for (auto& row : pw)
        for (auto& s : row) s = TruncatedSeries<C>(vars, top);
    V.assign(top + 1, TruncatedSeries<C>(vars, top));
    B.assign(top + 1, TruncatedSeries<C>(vars, top));

    for (int k = 1; k <= top; ++k) {
        for (int j = 2; j <= k; ++j)
            for (int a = 1; a <= k - (j - 1); ++a) pw[j][k] += V[a] * pw[j - 1][k - a];
        TruncatedSeries<C> b(vars, top);
        for (std::size_t t = 0; t < terms.size(); ++t) {
            const int lenJ = terms[t].J.deg();
            const int j = terms[t].j;
            if (lenJ + j > k) continue;
            if (j == 0) {
                if (lenJ == k) b.add_to(terms[t].J, coef[t]);
                continue;
            }
            if (j == 1 && lenJ == 0) continue;  // P'_T * (slice k of U_{k-1}) = 0
            add_shifted(b, coef[t], terms[t].J, pw[j][k - lenJ]);
        }
        B[k] = b;
        if (k <= order) {
            TruncatedSeries<C> v(vars, top);
            for (const auto& [m, c] : b.terms()) v.set(m, ops.div_neg_pt(c));
            V[k] = v;
            pw[1][k] = v;
        }
    }
}

// Fused arithmetic on series with coefficients in the localization by P'_T: every output
// coefficient is assembled by one sum_of_products call, lifting lower powers through
// cached products with powers of P'_T.
class LocalizedEngine {
public:
    using Series = TruncatedSeries<LocalizedPolynomial>;

    LocalizedEngine(const Poly& P, std::shared_ptr<const Localizer> ctx, int top)
        : ctx_(std::move(ctx)), top_(top), vars_(series_vars(P.nvars() - 1)), bvars_(P.vars()) {
        const long d = P.total_degree();
        terms_ = taylor_terms(P, static_cast<int>(std::min<long>(d, top)));
        maxj_ = 0;
        for (const auto& t : terms_) maxj_ = std::max(maxj_, t.j);
        one_ = Poly::constant(bvars_, 1);
        pw_.assign(maxj_ + 1, std::vector<Series>(top + 1, Series(vars_, top)));
    }

    const std::vector<std::string>& vars() const { return vars_; }
    int top() const { return top_; }
    // Slice k of U (k >= 1); must be set in increasing k.
    void set_slice(int k, const Series& v) {
        if (maxj_ >= 1) pw_[1][k] = v;
    }
    // Slices of U^j of degree k for j = 2..min(k, maxj), from slices of U below k.
    void extend_powers(int k) {
        for (int j = 2; j <= std::min(k, maxj_); ++j) {
            Pending acc;
            for (int a = 1; a <= k - (j - 1); ++a)
                for (const auto& [mu, cu] : pw_[1][a].terms())
                    for (const auto& [nu, cv] : pw_[j - 1][k - a].terms())
                        acc[add(mu, nu)].push_back({Rational(1), &cu.numerator(), &cv.numerator(),
                                                    cu.denom_power() + cv.denom_power()});
            pw_[j][k] = finish(acc);
        }
    }
    // Degree-k slice of Phi_U = sum D^{(J,j)}P X^J U^j, (J, j) != 0, with U's slices so far.
    // skip_linear drops the P'_T * U_k term (used by the iteration, where U_k is unknown yet).
    Series phi_slice(int k, bool skip_linear) {
        Pending acc;
        for (const auto& t : terms_) {
            const int lenJ = t.J.deg();
            if (lenJ + t.j > k) continue;
            if (t.j == 0) {
                if (lenJ == k) acc[t.J].push_back({Rational(1), &t.D, &one_, 0});
                continue;
            }
            if (t.j == 1 && lenJ == 0 && skip_linear) continue;
            for (const auto& [nu, cv] : pw_[t.j][k - lenJ].terms())
                acc[add(t.J, nu)].push_back({Rational(1), &t.D, &cv.numerator(), cv.denom_power()});
        }
        return finish(acc);
    }

private:
    struct Item {
        Rational c;
        const Poly* a;
        const Poly* b;
        int power;
    };
    using Pending = std::map<Mono, std::vector<Item>, GrlexOrder>;

    static Mono add(const Mono& a, const Mono& b) {
        Mono m;
        for (int i = 0; i < kMaxVars; ++i) m.e[i] = static_cast<std::uint8_t>(a.e[i] + b.e[i]);
        return m;
    }

    const Poly& lifted(const Poly* a, int e) {
        if (e == 0) return *a;
        auto key = std::make_pair(a, e);
        auto it = lift_.find(key);
        if (it != lift_.end()) return it->second;
        return lift_.emplace(key, *a * ctx_->power(e)).first->second;
    }

    Series finish(Pending& acc) {
        Series out(vars_, top_);
        for (auto& [m, items] : acc) {
            int target = 0;
            for (const auto& it : items) target = std::max(target, it.power);
            std::vector<ScaledProduct> ps;
            ps.reserve(items.size());
            for (const auto& it : items) {
                // lift the factor with fewer terms
                if (it.power == target)
                    ps.push_back({it.c, it.a, it.b});
                else if (it.a->size() <= it.b->size())
                    ps.push_back({it.c, &lifted(it.a, target - it.power), it.b});
                else
                    ps.push_back({it.c, it.a, &lifted(it.b, target - it.power)});
            }
            Poly num = sum_of_products(ps);
            if (!num.is_zero()) out.set(m, LocalizedPolynomial{ctx_, std::move(num), target});
        }
        return out;
    }

    std::shared_ptr<const Localizer> ctx_;
    int top_;
    std::vector<std::string> vars_, bvars_;
    std::vector<TaylorTerm> terms_;
    int maxj_;
    Poly one_;
    std::vector<std::vector<Series>> pw_;  // pw_[j][k]: degree-k slice of U^j
    std::map<std::pair<const Poly*, int>, Poly> lift_;
};

// Symbolic iteration: V_k = -B_k / P'_T with B_k the degree-k slice of Phi_{U_{k-1}}.
void iterate_localized(const Poly& P, int order, int top, const std::shared_ptr<const Localizer>& ctx,
                       std::vector<TruncatedSeries<LocalizedPolynomial>>& V,
                       std::vector<TruncatedSeries<LocalizedPolynomial>>& B) {
    LocalizedEngine eng(P, ctx, top);
    const auto& vars = eng.vars();
    V.assign(top + 1, TruncatedSeries<LocalizedPolynomial>(vars, top));
    B.assign(top + 1, TruncatedSeries<LocalizedPolynomial>(vars, top));
    for (int k = 1; k <= top; ++k) {
        eng.extend_powers(k);
        B[k] = eng.phi_slice(k, true);
        if (k <= order) {
            TruncatedSeries<LocalizedPolynomial> v(vars, top);
            for (const auto& [m, c] : B[k].terms()) v.set(m, (-c).divided_by_denominator());
            V[k] = v;
            eng.set_slice(k, v);
        }
    }
}

struct RationalOps {
    std::vector<Rational> x;
    Rational pt;
    Rational coef(const Poly& Q) const { return Q.evaluate(x); }
    Rational div_neg_pt(const Rational& b) const { return -b / pt; }
};

}  // namespace

TaylorTable solve_series_at_point(const ImplicitProblem& pb, int order) {
    pb.validate();
    if (order < 0) throw std::invalid_argument("negative order");
    RationalOps ops{pb.point(), pb.dT().evaluate(pb.point())};
    std::vector<TruncatedSeries<Rational>> V, B;
    iterate<Rational>(pb.P, order, ops, V, B);
    TaylorTable a;
    const int n = pb.n();
    for (int m = 0; m <= order; ++m)
        for (const auto& I : indices_of_length(n, m)) a[I] = m == 0 ? pb.t : V[m].coefficient(I);
    return a;
}

SeriesSolution solve_series(const ImplicitProblem& pb, int order, bool next_slice) {
    pb.validate();
    if (order < 0) throw std::invalid_argument("negative order");
    SeriesSolution sol;
    sol.order = order;
    sol.ctx = std::make_shared<Localizer>(pb.dT());
    std::vector<TruncatedSeries<LocalizedPolynomial>> V, B;
    iterate_localized(pb.P, order, next_slice ? order + 1 : order, sol.ctx, V, B);
    const auto vars = series_vars(pb.n());
    sol.U = TruncatedSeries<LocalizedPolynomial>(vars, order);
    for (int m = 1; m <= order; ++m)
        for (const auto& [mono, c] : V[m].terms()) sol.U.set(mono, c);
    sol.phi_slices = B;
    const auto x = pb.point();
    for (int m = 0; m <= order; ++m)
        for (const auto& I : indices_of_length(pb.n(), m))
            sol.taylor[I] = m == 0 ? pb.t : sol.U.coefficient(I).evaluate(x);
    return sol;
}

std::map<MultiIndex, Real> newton_series(const ImplicitProblem& pb, int order) {
    pb.validate();
    const int n = pb.n();
    const auto vars = series_vars(n);
    auto lift = [](const Rational& c) { return to_real(c); };
    std::vector<TruncatedSeries<Real>> args;
    for (int i = 0; i < n; ++i) {
        auto s = TruncatedSeries<Real>::constant(vars, order, to_real(pb.y[i]));
        s += TruncatedSeries<Real>::variable(vars, order, i, Real(1));
        args.push_back(s);
    }
    auto S = TruncatedSeries<Real>::constant(vars, order, to_real(pb.t));
    const Poly PT = pb.dT();
    // Quadratic convergence: precision doubles each step.
    int steps = 1;
    while ((1 << (steps - 1)) <= order) ++steps;
    for (int it = 0; it < steps; ++it) {
        auto full = args;
        full.push_back(S);
        auto F = substitute_series<Real>(pb.P, full, lift);
        auto Fp = substitute_series<Real>(PT, full, lift);
        S -= F * Fp.inverse();
    }
    std::map<MultiIndex, Real> out;
    for (int m = 0; m <= order; ++m)
        for (const auto& I : indices_of_length(n, m)) out[I] = S.coefficient(I);
    return out;
}

// ---- cofactor recursion -----------------------------------------------------------

CofactorRecursion::CofactorRecursion(ImplicitProblem pb) : pb_(std::move(pb)) {
    pb_.validate();
    const int n = pb_.n();
    PT_ = pb_.dT();
    PT2_ = PT_ * PT_;
    Poly PTT = PT_.derivative(n);
    for (int k = 0; k < n; ++k) {
        Poly PY = pb_.P.derivative(k);
        PYk_.push_back(PY);
        PTPYk_.push_back(PT_ * PY);
        cross_.push_back(PT_ * PT_.derivative(k) - PY * PTT);
    }
    pt_at_x_ = PT_.evaluate(pb_.point());
}

const Poly& CofactorRecursion::get(const MultiIndex& I) {
    const int n = pb_.n();
    if (static_cast<int>(I.size()) != n) throw std::invalid_argument("multi-index arity differs from n");
    const long m1 = length(I);
    if (m1 == 0) throw std::invalid_argument("P_I is defined for |I| >= 1 only");
    auto it = memo_.find(I);
    if (it != memo_.end()) return it->second;
    // k with i_k maximal, smallest such k.
    int k = static_cast<int>(std::max_element(I.begin(), I.end()) - I.begin());
    if (m1 == 1) return memo_.emplace(I, -PYk_[k]).first->second;
    MultiIndex J = I;
    --J[k];
    const Poly& Q = get(J);
    const long m = m1 - 1;
    const Poly dQk = Q.derivative(k), dQT = Q.derivative(n);
    const Rational inv(1, I[k]);
    Poly R = sum_of_products({{inv, &dQk, &PT2_},
                              {-inv, &dQT, &PTPYk_[k]},
                              {ratio(-(2 * m - 1), I[k]), &Q, &cross_[k]}});
    return memo_.emplace(I, std::move(R)).first->second;
}

Rational CofactorRecursion::coefficient(const MultiIndex& I) {
    const long m = length(I);
    if (m == 0) return pb_.t;
    return get(I).evaluate(pb_.point()) / rpow(pt_at_x_, 2 * m - 1);
}

TaylorTable CofactorRecursion::table(int order) {
    TaylorTable a;
    for (const auto& I : indices_up_to(pb_.n(), order)) a[I] = coefficient(I);
    return a;
}

CofactorPolynomial cofactor_recursion(const ImplicitProblem& pb, const MultiIndex& I) {
    CofactorRecursion rec(pb);
    return {I, rec.get(I), static_cast<int>(length(I))};
}

// ---- verification: cofactor bounds and denominators-------------------------------

std::vector<CheckRecord> verify_lemma_2_1(CofactorRecursion& rec, int order) {
    const auto& pb = rec.problem();
    const int n = pb.n();
    const long d = pb.degree_bound();
    const Rational LP = length_v(pb.P, Place::infinite());
    std::vector<CheckRecord> out;
    for (const auto& I : indices_up_to(n, order)) {
        const long m = length(I);
        if (m == 0) continue;
        const Poly& PI = rec.get(I);
        CheckRecord deg = PI.is_zero() ? le_exact("lemma_2_1.degree", Rational(-1), Rational((2 * m - 1) * (d - 1)))
                                       : le_exact("lemma_2_1.degree", Rational(PI.total_degree()),
                                                  Rational((2 * m - 1) * (d - 1)));
        if (PI.is_zero()) deg.lhs = "-inf";
        deg.detail["I"] = I;
        out.push_back(deg);
        Rational rhs = rpow(Rational(8 * n), m - 1) * rpow(Rational(d), 3 * m - 2) * rpow(LP, 2 * m - 1);
        CheckRecord len = le_exact("lemma_2_1.length", length_v(PI, Place::infinite()), rhs);
        len.detail["I"] = I;
        out.push_back(len);
    }
    return out;
}

namespace {

// Phi_{U_n} = sum over Taylor terms of D^{(J,j)}P X^J U_n^j, truncated at `top`.
TruncatedSeries<LocalizedPolynomial> phi_of(const Poly& P, const std::shared_ptr<const Localizer>& ctx,
                                            const TruncatedSeries<LocalizedPolynomial>& Un, int top) {
    LocalizedEngine eng(P, ctx, top);
    TruncatedSeries<LocalizedPolynomial> acc(eng.vars(), top);
    for (int k = 1; k <= top; ++k) {
        TruncatedSeries<LocalizedPolynomial> slice(eng.vars(), top);
        for (const auto& [m, c] : Un.terms())
            if (m.deg() == k) slice.set(m, c);
        eng.set_slice(k, slice);
        eng.extend_powers(k);
        auto part = eng.phi_slice(k, false);
        for (const auto& [m, c] : part.terms()) acc.set(m, c);
    }
    return acc;
}

}  // namespace

std::vector<CheckRecord> verify_denominator_bounds(const ImplicitProblem& pb, const SeriesSolution& sol,
                                                   CofactorRecursion* rec, int phi_order) {
    std::vector<CheckRecord> out;
    const int order = sol.order;
    if (phi_order < 0 || phi_order > order) phi_order = order;
    // Slices V_m clear at power 2m-1.
    for (int m = 1; m <= order; ++m) {
        int worst = 0;
        bool cleared = true, matches = true;
        json mismatches = json::array();
        for (const auto& [mono, c] : sol.U.terms()) {
            if (mono.deg() != m) continue;
            worst = std::max(worst, c.denom_power());
            if (c.denom_power() > 2 * m - 1) {
                cleared = false;
                continue;
            }
            Poly num = c.cleared_to(2 * m - 1);
            if (rec) {
                MultiIndex I = mono.to_index(pb.n());
                if (num != rec->get(I)) {
                    matches = false;
                    mismatches.push_back(I);
                }
            }
        }
        CheckRecord r = le_exact("cor_2_3.slice_power", Rational(worst), Rational(2 * m - 1));
        if (!cleared) r.verdict = Verdict::failed;
        r.detail["m"] = m;
        out.push_back(r);
        if (rec) {
            CheckRecord p = predicate("cor_2_3.numerator_equals_P_I", matches, json{{"m", m}});
            if (!matches) p.detail["mismatches"] = mismatches;
            out.push_back(p);
        }
    }
    // Phi_{U_n}: slices of degree <= n vanish, degree d >= n+1 slices clear at 2d-2.
    const int top = phi_order + 1;
    for (int n = 1; n <= phi_order; ++n) {
        TruncatedSeries<LocalizedPolynomial> Un(sol.U.vars(), top);
        for (const auto& [mono, c] : sol.U.terms())
            if (mono.deg() <= n) Un.set(mono, c);
        auto phi = phi_of(pb.P, sol.ctx, Un, top);
        bool vanishes = true;
        std::vector<int> worst(top + 1, 0);
        for (const auto& [mono, c] : phi.terms()) {
            if (mono.deg() <= n) vanishes = false;
            worst[mono.deg()] = std::max(worst[mono.deg()], c.denom_power());
        }
        out.push_back(predicate("lemma_2_2.phi_order", vanishes, json{{"n", n}}));
        for (int d = n + 1; d <= top; ++d) {
            CheckRecord r = le_exact("cor_2_3.phi_power", Rational(worst[d]), Rational(2 * d - 2));
            r.detail["n"] = n;
            r.detail["degree"] = d;
            out.push_back(r);
        }
        if (n + 1 < static_cast<int>(sol.phi_slices.size())) {
            // The iteration's B_{n+1} is the degree-(n+1) slice of Phi_{U_n}.
            bool same = true;
            for (const auto& [mono, c] : phi.terms()) {
                if (mono.deg() != n + 1) continue;
                auto other = sol.phi_slices[n + 1].coefficient(mono);
                int k = std::max(c.denom_power(), other.denom_power());
                if (c.cleared_to(k) != other.cleared_to(k)) same = false;
            }
            for (const auto& [mono, c] : sol.phi_slices[n + 1].terms())
                if (phi.coefficient(mono).is_zero()) same = false;
            out.push_back(predicate("lemma_2_2.phi_slice_consistent", same, json{{"n", n}}));
        }
    }
    // Specialized coefficients: a_I P'_T(x)^(2|I|-1) equals the numerator at x.
    const auto x = pb.point();
    const Rational ptx = pb.dT().evaluate(x);
    bool spec_ok = true;
    for (const auto& [mono, c] : sol.U.terms()) {
        const int m = mono.deg();
        Rational lhs = sol.taylor.at(mono.to_index(pb.n())) * rpow(ptx, 2 * m - 1);
        if (lhs != c.cleared_to(2 * m - 1).evaluate(x)) spec_ok = false;
    }
    out.push_back(predicate("cor_2_4.specialization", spec_ok));
    return out;
}

bool defining_identity_holds(const ImplicitProblem& pb, const SeriesSolution& sol) {
    const int n = pb.n();
    const int order = sol.order;
    const auto& vars = sol.U.vars();
    const auto& ctx = sol.ctx;
    const auto& bvars = pb.P.vars();
    auto lift = [&](const Rational& c) { return LocalizedPolynomial{ctx, Poly::constant(bvars, c), 0}; };
    std::vector<TruncatedSeries<LocalizedPolynomial>> args;
    for (int i = 0; i < n; ++i) {
        auto s = TruncatedSeries<LocalizedPolynomial>::constant(vars, order,
                                                              {ctx, Poly::variable(bvars, i), 0});
        s += TruncatedSeries<LocalizedPolynomial>::variable(vars, order, i, lift(1));
        args.push_back(s);
    }
    auto T = TruncatedSeries<LocalizedPolynomial>::constant(vars, order, {ctx, Poly::variable(bvars, n), 0});
    T += sol.U;
    args.push_back(T);
    auto lhs = substitute_series<LocalizedPolynomial>(pb.P, args, lift);
    // Subtract P(Y, T) from the constant term.
    lhs.add_to(Mono{}, LocalizedPolynomial{ctx, -pb.P, 0});
    return lhs.is_zero();
}

// ---- local coefficient and height bounds --------------------------------------------

namespace {

Rational max_one_abs(const std::vector<Rational>& xs, const Place& v) {
    Rational m = 1;
    for (const auto& x : xs) m = rmax(m, abs_v(x, v));
    return m;
}

// Scale so that some coefficient equals 1 (grlex-leading one when none does).
Rational normalizing_factor(const Poly& P) {
    for (const auto& [m, c] : P.terms())
        if (c == 1) return 1;
    return Rational(1) / P.leading_coefficient();
}

}  // namespace

std::vector<Place> lemma_2_5_places(const ImplicitProblem& pb) {
    std::vector<Rational> support = pb.P.coefficients();
    for (const auto& c : pb.point()) support.push_back(c);
    support.push_back(pb.dT().evaluate(pb.point()));
    for (long p : {2, 3, 5, 7, 11, 13}) support.push_back(Rational(p));
    return relevant_places(support);
}

std::vector<CheckRecord> verify_lemma_2_5(const ImplicitProblem& pb, const TaylorTable& a, int m,
                                          const std::vector<Place>& places) {
    pb.validate();
    const int n = pb.n();
    const long d = pb.degree_bound();
    const Rational scale = normalizing_factor(pb.P);
    const Poly P = pb.P * scale;
    const auto x = pb.point();
    const Rational ptx = P.derivative(n).evaluate(x);
    std::vector<CheckRecord> out;

    for (const auto& v : places) {
        const Rational H = gauss_weil_measure_v(P, v);
        const Rational H1x = max_one_abs(x, v);
        const Rational inv = rmax(Rational(1), abs_v(Rational(1) / ptx, v));
        Rational base = H * H * rpow(H1x, 2 * (d - 1)) * inv * inv;
        if (v.is_infinite())
            base *= Rational(8 * n) * rpow(Rational(d), 3) * rpow(Rational(d + 1), 2 * (n + 1));
        Rational lhs = 1;
        for (int k = 0; k <= m; ++k) {
            for (const auto& I : indices_of_length(n, k)) lhs = rmax(lhs, abs_v(a.at(I), v));
            CheckRecord r = le_exact(v.is_infinite() ? "lemma_2_5.eq_1_4" : "lemma_2_5.eq_1_5", lhs,
                                     rpow(base, k) * H1x);
            r.detail["place"] = v.to_string();
            r.detail["m"] = k;
            if (scale != 1) r.detail["rescaled_by"] = to_string(scale);
            out.push_back(r);
        }
    }

    const LogForm hP = height_gauss_weil(P);
    const LogForm h1x = affine_height(x);
    LogForm slope = hP * Rational(4) + h1x * Rational(4 * (d - 1)) +
                    (LogForm::log_of(Rational(d)) + LogForm::from_constant(1)) * Rational(4 * n + 9);
    std::vector<Rational> vals{Rational(1)};
    for (int k = 0; k <= m; ++k) {
        for (const auto& I : indices_of_length(n, k)) vals.push_back(a.at(I));
        CheckRecord r = le_log("lemma_2_5.height", projective_height(vals), slope * Rational(k) + h1x);
        r.detail["m"] = k;
        out.push_back(r);
    }
    return out;
}

// ---- charts ----------------------------------------------------------------------------

long GroupChart::degree() const {
    if (dG >= 0) return dG;
    long d = 0;
    for (const auto& f : forms) d = std::max(d, f.total_degree());
    return d;
}

void GroupChart::normalize() {
    rescaled.assign(forms.size(), Rational(1));
    for (std::size_t i = 0; i < forms.size(); ++i) {
        Rational s = normalizing_factor(forms[i]);
        if (s != 1) forms[i] *= s;
        rescaled[i] = s;
    }
}

void GroupChart::validate() const {
    if (g < 1 || N < g) throw std::invalid_argument("chart needs 1 <= g <= N");
    if (static_cast<int>(forms.size()) != N - g) throw std::invalid_argument("chart needs N - g defining forms");
    if (static_cast<int>(e.size()) != N + 1) throw std::invalid_argument("neutral point needs N + 1 coordinates");
    if (e[0] != 1) throw std::invalid_argument("neutral point must have e_0 = 1");
    for (std::size_t k = 0; k < forms.size(); ++k) {
        const Poly& f = forms[k];
        if (f.nvars() != g + 2) throw std::invalid_argument("each form lives in X_0..X_g, X_i");
        if (f.is_zero() || !f.is_homogeneous()) throw std::invalid_argument("defining forms must be nonzero and homogeneous");
        bool has_one = false;
        for (const auto& [m, c] : f.terms()) has_one = has_one || c == 1;
        if (!has_one) throw std::invalid_argument("each defining form needs a coefficient equal to 1");
        problem(g + 1 + static_cast<int>(k)).validate();
    }
}

ImplicitProblem GroupChart::problem(int i) const {
    const Poly& f = forms.at(i - g - 1);
    std::vector<std::string> vars(f.vars().begin() + 1, f.vars().end());
    std::vector<Poly::Term> terms;
    for (const auto& [m, c] : f.terms()) {
        Mono mm;
        for (int k = 1; k < f.nvars(); ++k) mm.e[k - 1] = m.e[k];
        terms.emplace_back(mm, c);
    }
    ImplicitProblem pb;
    pb.P = Poly::from_terms(vars, std::move(terms));
    pb.y.assign(e.begin() + 1, e.begin() + 1 + g);
    pb.t = e[i];
    pb.d = pb.P.total_degree();
    return pb;
}

json GroupChart::to_json() const {
    json j;
    j["g"] = g;
    j["N"] = N;
    json fs = json::array();
    for (const auto& f : forms) fs.push_back(poly_to_json(f));
    j["forms"] = fs;
    j["e"] = rationals_to_json(e);
    if (dG >= 0) j["dG"] = dG;
    return j;
}

GroupChart GroupChart::from_json(const json& j) {
    GroupChart c;
    c.g = j.at("g").get<int>();
    c.N = j.at("N").get<int>();
    for (const auto& f : j.at("forms")) c.forms.push_back(poly_from_json(f));
    c.e = rationals_from_json(j.at("e"));
    if (j.contains("dG")) c.dG = j.at("dG").get<long>();
    return c;
}

std::vector<TaylorTable> parametrize_group_chart(const GroupChart& chart, int order) {
    chart.validate();
    const int g = chart.g;
    std::vector<TaylorTable> rows(chart.N + 1);
    const auto all = indices_up_to(g, order);
    for (const auto& I : all) {
        const long m = length(I);
        rows[0][I] = m == 0 ? Rational(1) : Rational(0);
        for (int i = 1; i <= g; ++i) {
            Rational v = 0;
            if (m == 0) v = chart.e[i];
            else if (m == 1 && I[i - 1] == 1) v = 1;
            rows[i][I] = v;
        }
    }
    for (int i = g + 1; i <= chart.N; ++i) rows[i] = solve_series_at_point(chart.problem(i), order);
    return rows;
}

Rational neutral_height_v(const GroupChart& chart, const Place& v) {
    Rational He = 0;
    for (const auto& c : chart.e) He = rmax(He, abs_v(c, v));
    return He;
}

Rational lemma_3_1_constant(const GroupChart& chart, const Place& v) {
    const int g = chart.g;
    const long dG = chart.degree();
    Rational E = rpow(neutral_height_v(chart, v), 2 * (dG - 1));
    for (std::size_t k = 0; k < chart.forms.size(); ++k) {
        const int i = g + 1 + static_cast<int>(k);
        Rational H = gauss_weil_measure_v(chart.forms[k], v);
        auto pb = chart.problem(i);
        Rational inv = rmax(Rational(1), abs_v(Rational(1) / pb.dT().evaluate(pb.point()), v));
        E *= H * H * inv * inv;
    }
    if (v.is_infinite()) E *= Rational(8 * g) * rpow(Rational(dG), 3) * rpow(Rational(dG + 1), 2 * (g + 1));
    return E;
}

std::vector<Place> chart_places(const GroupChart& chart) {
    std::vector<Rational> support(chart.e.begin(), chart.e.end());
    for (std::size_t k = 0; k < chart.forms.size(); ++k) {
        for (const auto& c : chart.forms[k].coefficients()) support.push_back(c);
        auto pb = chart.problem(chart.g + 1 + static_cast<int>(k));
        support.push_back(pb.dT().evaluate(pb.point()));
    }
    return relevant_places(support);
}

std::vector<CheckRecord> verify_lemma_3_1(const GroupChart& chart, const std::vector<TaylorTable>& table,
                                          const std::vector<Place>& places) {
    const int g = chart.g;
    std::vector<CheckRecord> out;
    int order = 0;
    for (const auto& [I, a] : table.at(0)) order = std::max<int>(order, static_cast<int>(length(I)));
    for (const auto& v : places) {
        const Rational He = neutral_height_v(chart, v);
        const Rational E = lemma_3_1_constant(chart, v);
        for (int i = 0; i <= chart.N; ++i) {
            for (int m = 0; m <= order; ++m) {
                Rational lhs = 1;
                for (const auto& I : indices_of_length(g, m)) lhs = rmax(lhs, abs_v(table[i].at(I), v));
                CheckRecord r = le_exact(v.is_infinite() ? "lemma_3_1.eq_1_23" : "lemma_3_1.eq_1_24", lhs,
                                         rpow(E, m) * He);
                r.detail["place"] = v.to_string();
                r.detail["i"] = i;
                r.detail["m"] = m;
                out.push_back(r);
            }
        }
    }
    return out;
}

// ---- explicit bounds -----------------------------------------------------------------

Rational height_projective_space(long n) {
    if (n < 0) throw std::invalid_argument("h(P_n) needs n >= 0");
    Rational s = 0;
    for (long k = 2; k <= n + 1; ++k) s += Rational(1, k);
    return ratio(n + 1, 2) * s;
}

Real psi(long n) { return log(Real(2)) * (n + 1) - to_real(height_projective_space(n)); }

std::vector<Real> psi_table(long n_max) {
    if (n_max < 0) throw std::invalid_argument("psi_table needs n_max >= 0");
    std::vector<Real> out;
    out.reserve(n_max + 1);
    const Real log2 = log(Real(2));
    Rational s = 0;  // sum_{k=2}^{n+1} 1/k
    for (long n = 0; n <= n_max; ++n) {
        if (n > 0) s += Rational(1, n + 1);
        out.push_back(log2 * (n + 1) - to_real(Rational(ratio(n + 1, 2) * s)));
    }
    return out;
}

Real lemma_5_9_bound(long N, long g, const Real& dG, const Real& hG, const Real& h_e) {
    if (g < 1 || N < g) throw std::invalid_argument("f(N, G, e) needs N >= g >= 1");
    if (dG < 1) throw std::invalid_argument("f(N, G, e) needs d(G) >= 1");
    const long a = N - g;
    return 4 * a * hG + (2 * (a + 1) * h_e + 4 * a) * dG + (a + 1) * (2 * g + 5) * (log(dG) + 1) -
           2 * (a + 1) * h_e;
}

}  // namespace hl
