#include "heightlab/groupops.hpp"

#include "heightlab/json_io.hpp"
#include "heightlab/measures.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace hl {

// ---- model ---------------------------------------------------------------------------

int MultiplicativeGroupModel::g() const { return std::accumulate(n.begin(), n.end(), 0); }

int MultiplicativeGroupModel::coordinates() const { return g() + p(); }

std::vector<int> MultiplicativeGroupModel::form_blocks() const {
    std::vector<int> b;
    for (int k : n) b.push_back(k + 1);
    return b;
}

std::vector<int> MultiplicativeGroupModel::tangent_blocks() const { return n; }

namespace {

std::vector<std::string> block_names(const MultiplicativeGroupModel& G, const std::string& stem, bool with_zero) {
    std::vector<std::string> out;
    for (int l = 0; l < G.p(); ++l)
        for (int i = with_zero ? 0 : 1; i <= G.n[l]; ++i)
            out.push_back(G.p() == 1 ? stem + std::to_string(i)
                                     : stem + std::to_string(l + 1) + "_" + std::to_string(i));
    return out;
}

}  // namespace

std::vector<std::string> MultiplicativeGroupModel::x_vars() const { return block_names(*this, "X", true); }
std::vector<std::string> MultiplicativeGroupModel::y_vars() const { return block_names(*this, "Y", true); }
std::vector<std::string> MultiplicativeGroupModel::t_vars() const { return block_names(*this, "T", false); }

int MultiplicativeGroupModel::coordinate(int l, int i) const {
    int off = 0;
    for (int k = 0; k < l; ++k) off += n[k] + 1;
    return off + i;
}

void MultiplicativeGroupModel::validate() const {
    if (n.empty()) throw std::invalid_argument("model needs at least one block");
    for (int k : n)
        if (k < 1) throw std::invalid_argument("block dimensions must be >= 1");
    if (coordinates() + g() > kMaxVars) throw std::invalid_argument("model too large: coordinates + g exceeds 16");
}

json MultiplicativeGroupModel::to_json() const {
    json hs = json::array(), ds = json::array();
    for (int l = 0; l < p(); ++l) hs.push_back(to_string(height(l))), ds.push_back(1);
    return json{{"n", n}, {"c", 1}, {"c_prime", 1}, {"degree", ds}, {"height", hs}};
}

void MultiForm::validate(const MultiplicativeGroupModel& G) const {
    G.validate();
    if (P.nvars() != G.coordinates()) throw std::invalid_argument("form arity differs from the model's coordinates");
    if (P.is_zero()) throw std::invalid_argument("form must be nonzero");
    if (!P.is_multihomogeneous(G.form_blocks())) throw std::invalid_argument("form is not multihomogeneous");
    if (P.multidegree(G.form_blocks()) != delta) throw std::invalid_argument("form multidegree differs from delta");
}

MultiForm MultiForm::from_poly(const MultiplicativeGroupModel& G, Poly P) {
    MultiForm F;
    if (P.is_zero() || !P.is_multihomogeneous(G.form_blocks()))
        throw std::invalid_argument("form must be nonzero and multihomogeneous");
    F.delta = P.multidegree(G.form_blocks());
    F.P = std::move(P);
    F.validate(G);
    return F;
}

// ---- Delta operators ---------------------------------------------------------------------

namespace {

void check_arity(const MultiplicativeGroupModel& G, const Poly& P, const MultiIndex& I) {
    G.validate();
    if (P.nvars() != G.coordinates()) throw std::invalid_argument("polynomial arity differs from the model");
    if (static_cast<int>(I.size()) != G.g()) throw std::invalid_argument("multi-index arity must be g");
}

// Position in the tangent index of coordinate (l, i), i >= 1.
int tangent_pos(const MultiplicativeGroupModel& G, int l, int i) {
    int off = 0;
    for (int k = 0; k < l; ++k) off += G.n[k];
    return off + i - 1;
}

// All J <= I componentwise.
std::vector<MultiIndex> sub_indices(const MultiIndex& I) {
    std::vector<MultiIndex> out;
    MultiIndex cur(I.size(), 0);
    std::function<void(std::size_t)> rec = [&](std::size_t k) {
        if (k == I.size()) {
            out.push_back(cur);
            return;
        }
        for (int v = 0; v <= I[k]; ++v) {
            cur[k] = v;
            rec(k + 1);
        }
    };
    rec(0);
    return out;
}

}  // namespace

std::map<MultiIndex, Poly> delta_family(const MultiplicativeGroupModel& G, const Poly& P,
                                        const std::vector<MultiIndex>& Is) {
    for (const auto& I : Is) check_arity(G, P, I);
    const int C = G.coordinates(), g = G.g();
    std::vector<std::string> vars = G.y_vars();
    for (const auto& t : G.t_vars()) vars.push_back(t);
    std::vector<Poly> images(C);
    for (int l = 0; l < G.p(); ++l) {
        images[G.coordinate(l, 0)] = Poly::variable(vars, G.coordinate(l, 0));
        for (int i = 1; i <= G.n[l]; ++i) {
            const int y = G.coordinate(l, i);
            Poly Y = Poly::variable(vars, y);
            images[y] = Y + Y * Poly::variable(vars, C + tangent_pos(G, l, i));
        }
    }
    const Poly shifted = P.substitute(images);

    std::map<MultiIndex, std::vector<Poly::Term>> buckets;
    for (const auto& I : Is) buckets[I];
    for (const auto& [m, c] : shifted.terms()) {
        MultiIndex J(g);
        for (int k = 0; k < g; ++k) J[k] = m.e[C + k];
        auto it = buckets.find(J);
        if (it == buckets.end()) continue;
        Mono y;
        for (int k = 0; k < C; ++k) y.e[k] = m.e[k];
        it->second.emplace_back(y, c);
    }
    std::map<MultiIndex, Poly> out;
    for (auto& [I, terms] : buckets) out.emplace(I, Poly::from_terms(G.y_vars(), std::move(terms)));
    return out;
}

Poly delta_operator(const MultiplicativeGroupModel& G, const Poly& P, const MultiIndex& I) {
    return delta_family(G, P, {I}).at(I);
}

Poly delta_closed_form(const MultiplicativeGroupModel& G, const Poly& P, const MultiIndex& I) {
    check_arity(G, P, I);
    std::vector<Poly::Term> terms;
    for (const auto& [m, c] : P.terms()) {
        Integer b = 1;
        for (int l = 0; l < G.p() && b != 0; ++l)
            for (int i = 1; i <= G.n[l]; ++i) b *= binomial(m.e[G.coordinate(l, i)], I[tangent_pos(G, l, i)]);
        if (b != 0) terms.emplace_back(m, c * Rational(b));
    }
    return Poly::from_terms(G.y_vars(), std::move(terms));
}

std::vector<CheckRecord> verify_delta_identities(const MultiplicativeGroupModel& G, const Poly& P, const Poly& Q,
                                                 const MultiIndex& I) {
    check_arity(G, Q, I);
    const auto blocks = G.form_blocks();
    std::vector<CheckRecord> out;
    const json inst{{"P", poly_to_json(P)}, {"Q", poly_to_json(Q)}, {"I", I}};

    const bool same = P.is_zero() || Q.is_zero() ||
                      (P.is_multihomogeneous(blocks) && Q.is_multihomogeneous(blocks) &&
                       P.multidegree(blocks) == Q.multidegree(blocks));
    if (same) {
        Poly diff = delta_operator(G, P + Q, I) - delta_operator(G, P, I) - delta_operator(G, Q, I);
        json d;
        if (!diff.is_zero()) d["difference"] = poly_to_json(diff);
        CheckRecord r = predicate("delta.additivity", diff.is_zero(), d);
        r.instance = inst;
        out.push_back(r);
    }

    const auto parts = sub_indices(I);
    const auto dP = delta_family(G, P, parts);
    const auto dQ = delta_family(G, Q, parts);
    Poly rhs(G.y_vars());
    for (const auto& I1 : parts) {
        MultiIndex I2(I.size());
        for (std::size_t k = 0; k < I.size(); ++k) I2[k] = I[k] - I1[k];
        rhs += dP.at(I1) * dQ.at(I2);
    }
    Poly diff = delta_operator(G, P * Q, I) - rhs;
    json d;
    if (!diff.is_zero()) d["difference"] = poly_to_json(diff);
    CheckRecord r = predicate("delta.product_rule", diff.is_zero(), d);
    r.instance = inst;
    out.push_back(r);
    return out;
}

json VanishingResult::to_json() const {
    json w = json::array();
    for (const auto& I : witnesses) w.push_back(I);
    return json{{"vanishes", vanishes}, {"witnesses", w}};
}

namespace {

void check_torus_point(const MultiplicativeGroupModel& G, const std::vector<Rational>& x) {
    if (static_cast<int>(x.size()) != G.coordinates()) throw std::invalid_argument("point needs one value per coordinate");
    for (const auto& c : x)
        if (c == 0) throw std::invalid_argument("point is not on the torus (a coordinate is zero)");
}

}  // namespace

VanishingResult vanishing_multiplicity_check(const MultiplicativeGroupModel& G, const Poly& P,
                                             const std::vector<Rational>& x, const Staircase& W) {
    check_torus_point(G, x);
    VanishingResult res;
    if (W.empty()) return res;
    if (W.arity() != G.g()) throw std::invalid_argument("staircase arity must be g");
    std::vector<MultiIndex> Is(W.members().begin(), W.members().end());
    const auto fam = delta_family(G, P, Is);
    for (const auto& I : Is)
        if (fam.at(I).evaluate(x) != 0) res.witnesses.push_back(I);
    res.vanishes = res.witnesses.empty();
    return res;
}

VanishingResult vanishing_by_taylor(const MultiplicativeGroupModel& G, const Poly& P, const std::vector<Rational>& x,
                                    const Staircase& W) {
    check_torus_point(G, x);
    VanishingResult res;
    if (W.empty()) return res;
    if (W.arity() != G.g()) throw std::invalid_argument("staircase arity must be g");
    const auto tv = G.t_vars();
    std::vector<Poly> images(G.coordinates());
    for (int l = 0; l < G.p(); ++l) {
        images[G.coordinate(l, 0)] = Poly::constant(tv, x[G.coordinate(l, 0)]);
        for (int i = 1; i <= G.n[l]; ++i) {
            const Rational& xi = x[G.coordinate(l, i)];
            images[G.coordinate(l, i)] = Poly::constant(tv, xi) + Poly::variable(tv, tangent_pos(G, l, i)) * xi;
        }
    }
    const Poly f = P.substitute(images);
    for (const auto& I : W.members())
        if (f.coefficient(I) != 0) res.witnesses.push_back(I);
    res.vanishes = res.witnesses.empty();
    return res;
}

json CompositionConstants::to_json() const {
    json cs = json::array();
    for (const auto& [L, v] : c) cs.push_back(json{{"L", L}, {"c", to_string(v)}});
    return json{{"constants", cs}, {"constants_ok", constants_ok}, {"identity_ok", identity_ok}};
}

CompositionConstants delta_composition_membership(const MultiplicativeGroupModel& G, const Poly& P,
                                                  const MultiIndex& I, const MultiIndex& J) {
    check_arity(G, P, I);
    check_arity(G, P, J);
    MultiIndex top(I.size());
    for (std::size_t k = 0; k < I.size(); ++k) top[k] = I[k] + J[k];
    const auto box = sub_indices(top);
    auto f = [&](const MultiIndex& j) { return Rational(mi_binomial(j, I) * mi_binomial(j, J)); };

    // Newton inversion: c_L = sum_{j <= L} (-1)^{|L-j|} binom(L, j) f(j).
    CompositionConstants out;
    for (const auto& L : box) {
        Rational c = 0;
        for (const auto& j : sub_indices(L)) {
            Rational t = Rational(mi_binomial(L, j)) * f(j);
            if ((length(L) - length(j)) % 2) c -= t;
            else c += t;
        }
        if (c != 0) out.c[L] = c;
    }
    out.constants_ok = true;
    for (const auto& j : box) {
        Rational s = 0;
        for (const auto& [L, c] : out.c) s += c * Rational(mi_binomial(j, L));
        if (s != f(j)) out.constants_ok = false;
    }

    const Poly inner = delta_operator(G, P, J).renamed(G.x_vars());
    const Poly lhs = delta_operator(G, inner, I);
    std::vector<MultiIndex> Ls;
    for (const auto& [L, c] : out.c) Ls.push_back(L);
    const auto fam = delta_family(G, P, Ls);
    Poly rhs(G.y_vars());
    for (const auto& [L, c] : out.c) rhs += fam.at(L) * c;
    out.identity_ok = lhs == rhs;
    return out;
}

// ---- parametrizations ----------------------------------------------------------------------

Rational Parametrization::E_at(const Place& v, int l) const {
    auto it = E_v.find(v);
    return it == E_v.end() ? Rational(1) : it->second.at(l);
}

Rational Parametrization::He_at(const Place& v, int l) const {
    auto it = He_v.find(v);
    return it == He_v.end() ? Rational(1) : it->second.at(l);
}

LogForm Parametrization::log_E(int l) const {
    LogForm s;
    for (const auto& v : places) s += LogForm::log_raw(E_at(v, l));
    return s;
}

LogForm Parametrization::h_e(int l) const {
    LogForm s;
    for (const auto& v : places) s += LogForm::log_raw(He_at(v, l));
    return s;
}

std::vector<long> Parametrization::t(const MultiIndex& I) const {
    std::vector<long> out;
    std::size_t k = 0;
    for (int b : g_blocks) {
        long s = 0;
        for (int i = 0; i < b; ++i) s += I[k++];
        out.push_back(s);
    }
    return out;
}

Parametrization gm_parametrization(const MultiplicativeGroupModel& G, const std::vector<long>& delta, int order) {
    G.validate();
    const auto sv = SegreVeroneseMap::make(G.n, delta);
    Parametrization d;
    d.g = G.g();
    d.g_blocks = G.n;
    d.delta = delta;
    d.s = 2;
    d.order = order;
    d.places = {Place::infinite()};
    const auto all = indices_up_to(d.g, order);
    for (const auto& alpha : sv.index) {
        TaylorTable row;
        for (const auto& I : all) {
            Integer b = 1;
            for (int l = 0; l < G.p(); ++l)
                for (int i = 1; i <= G.n[l]; ++i) b *= binomial(alpha[G.coordinate(l, i)], I[tangent_pos(G, l, i)]);
            row[I] = Rational(b);
        }
        d.rows.push_back(std::move(row));
    }
    return d;
}

Parametrization chart_parametrization(const GroupChart& chart, int order) {
    Parametrization d;
    d.g = chart.g;
    d.g_blocks = {chart.g};
    d.delta = {1};
    d.s = 1;
    d.order = order;
    d.rows = parametrize_group_chart(chart, order);
    d.places = chart_places(chart);
    for (const auto& v : d.places) {
        d.E_v[v] = {lemma_3_1_constant(chart, v)};
        d.He_v[v] = {neutral_height_v(chart, v)};
    }
    return d;
}

TaylorTable series_product(const TaylorTable& a, const TaylorTable& b, int g, int order) {
    TaylorTable out;
    for (const auto& I : indices_up_to(g, order)) out[I] = 0;
    for (const auto& [I, x] : a) {
        if (x == 0) continue;
        const long li = length(I);
        if (li > order) continue;
        for (const auto& [J, y] : b) {
            if (y == 0 || li + length(J) > order) continue;
            MultiIndex K(g);
            for (int k = 0; k < g; ++k) K[k] = I[k] + J[k];
            out[K] += x * y;
        }
    }
    return out;
}

TaylorTable coefficient_table_C(const Parametrization& data, const MultiIndex& i, int order) {
    if (order > data.order) throw std::invalid_argument("insufficient truncation: series known to order " +
                                                        std::to_string(data.order));
    if (static_cast<int>(i.size()) != data.N() + 1) throw std::invalid_argument("exponent needs N + 1 entries");
    TaylorTable acc;
    for (const auto& I : indices_up_to(data.g, order)) acc[I] = length(I) == 0 ? 1 : 0;
    for (std::size_t j = 0; j < i.size(); ++j)
        for (int r = 0; r < i[j]; ++r) acc = series_product(acc, data.rows[j], data.g, order);
    return acc;
}

namespace {

// The record of the smallest margin among exact comparisons.
struct WorstCase {
    bool any = false;
    Rational lhs, rhs;
    json where;
    long count = 0;
    void add(const Rational& l, const Rational& r, json w) {
        ++count;
        if (!any || r - l < rhs - lhs) {
            any = true;
            lhs = l;
            rhs = r;
            where = std::move(w);
        }
    }
    CheckRecord record(const std::string& name) const {
        CheckRecord r = le_exact(name, lhs, rhs);
        r.detail["worst"] = where;
        r.detail["compared"] = count;
        return r;
    }
};

Rational hypothesis_rhs(const Parametrization& d, const Place& v, const std::vector<long>& t, long k) {
    long gd = 0;
    for (std::size_t l = 0; l < d.delta.size(); ++l) gd += d.g_blocks[l] * d.delta[l];
    Rational r = v.is_infinite() ? rpow(d.s, k * gd) : Rational(1);
    for (std::size_t l = 0; l < d.delta.size(); ++l)
        r *= rpow(d.E_at(v, static_cast<int>(l)), t[l]) * rpow(d.He_at(v, static_cast<int>(l)), k * d.delta[l]);
    return r;
}

std::vector<Place> places_with(const Parametrization& d, const std::vector<Rational>& values) {
    std::set<Place> s(d.places.begin(), d.places.end());
    std::vector<Rational> nz;
    for (const auto& x : values)
        if (x != 0) nz.push_back(x);
    if (!nz.empty())
        for (const auto& v : relevant_places(nz)) s.insert(v);
    return {s.begin(), s.end()};
}

bool within(const std::vector<long>& t, const std::vector<long>& m) {
    for (std::size_t l = 0; l < t.size(); ++l)
        if (t[l] > m[l]) return false;
    return true;
}

void check_budget(const Parametrization& d, const std::vector<long>& m) {
    if (m.size() != d.g_blocks.size()) throw std::invalid_argument("need one m_l per block");
    long total = 0;
    for (long x : m) {
        if (x < 1) throw std::invalid_argument("m_l must be positive");
        total += x;
    }
    if (total > d.order) throw std::invalid_argument("insufficient truncation: need order >= sum m_l");
}

LogForm height_rhs_common(const Parametrization& d, long k, const std::vector<long>& m, bool with_two) {
    LogForm r;
    const LogForm log2 = LogForm::log_of(2);
    const LogForm logs = LogForm::log_raw(d.s);
    for (std::size_t l = 0; l < m.size(); ++l) {
        LogForm e = d.log_E(static_cast<int>(l));
        if (with_two) e += log2;
        r += e * Rational(m[l]);
        r += (d.h_e(static_cast<int>(l)) + logs * Rational(d.g_blocks[l])) * Rational(k * d.delta[l]);
    }
    if (with_two) r += log2 * Rational(k * d.g);
    return r;
}

}  // namespace

std::vector<CheckRecord> verify_coefficient_hypothesis(const Parametrization& data) {
    std::vector<Rational> all;
    for (const auto& row : data.rows)
        for (const auto& [I, a] : row) all.push_back(a);
    std::vector<CheckRecord> out;
    for (const auto& v : places_with(data, all)) {
        WorstCase w;
        for (const auto& I : indices_up_to(data.g, data.order)) {
            Rational lhs = 0;
            int arg = 0;
            for (int i = 0; i <= data.N(); ++i) {
                Rational a = abs_v(data.rows[i].at(I), v);
                if (a > lhs) lhs = a, arg = i;
            }
            w.add(lhs, hypothesis_rhs(data, v, data.t(I), 1), json{{"I", I}, {"i", arg}});
        }
        CheckRecord r = w.record("coefficients.hypothesis");
        r.detail["place"] = v.to_string();
        out.push_back(r);
    }
    return out;
}

std::vector<CheckRecord> verify_product_bounds(const Parametrization& data, int k, const std::vector<long>& m) {
    if (k < 1) throw std::invalid_argument("k must be positive");
    check_budget(data, m);
    const std::size_t p = m.size();
    // tau vectors with tau_l <= m_l, mixed radix.
    std::vector<long> radix(p);
    long cells = 1;
    for (std::size_t l = 0; l < p; ++l) radix[l] = m[l] + 1, cells *= radix[l];
    auto encode = [&](const std::vector<long>& t) {
        long c = 0;
        for (std::size_t l = p; l-- > 0;) c = c * radix[l] + t[l];
        return c;
    };
    auto decode = [&](long c) {
        std::vector<long> t(p);
        for (std::size_t l = 0; l < p; ++l) t[l] = c % radix[l], c /= radix[l];
        return t;
    };
    std::vector<Rational> all;
    std::vector<MultiIndex> Is;
    long M = std::accumulate(m.begin(), m.end(), 0L);
    for (const auto& I : indices_up_to(data.g, static_cast<int>(M)))
        if (within(data.t(I), m)) {
            Is.push_back(I);
            for (int i = 0; i <= data.N(); ++i) all.push_back(data.rows[i].at(I));
        }

    std::vector<CheckRecord> out;
    LogForm lhs_height;
    for (const auto& v : places_with(data, all)) {
        std::vector<Rational> f1(cells, Rational(0));
        for (const auto& I : Is) {
            long c = encode(data.t(I));
            for (int i = 0; i <= data.N(); ++i) f1[c] = rmax(f1[c], abs_v(data.rows[i].at(I), v));
        }
        std::vector<Rational> fk = f1;
        for (int r = 1; r < k; ++r) {
            std::vector<Rational> nx(cells, Rational(0));
            for (long a = 0; a < cells; ++a) {
                if (fk[a] == 0) continue;
                auto ta = decode(a);
                for (long b = 0; b < cells; ++b) {
                    if (f1[b] == 0) continue;
                    auto tb = decode(b);
                    std::vector<long> ts(p);
                    for (std::size_t l = 0; l < p; ++l) ts[l] = ta[l] + tb[l];
                    if (!within(ts, m)) continue;
                    long c = encode(ts);
                    nx[c] = rmax(nx[c], fk[a] * f1[b]);
                }
            }
            fk = std::move(nx);
        }
        Rational lhs = 0;
        for (const auto& x : fk) lhs = rmax(lhs, x);
        CheckRecord rec = le_exact("products.local", lhs, hypothesis_rhs(data, v, m, k));
        rec.detail["place"] = v.to_string();
        rec.detail["k"] = k;
        rec.detail["m"] = m;
        out.push_back(rec);
        if (lhs > 0) lhs_height += LogForm::log_raw(lhs);
    }
    CheckRecord h = le_log("products.height", lhs_height, height_rhs_common(data, k, m, false));
    h.detail["k"] = k;
    h.detail["m"] = m;
    out.push_back(h);
    return out;
}

std::vector<CheckRecord> verify_coefficient_table_bounds(const Parametrization& data, int k,
                                                         const std::vector<long>& m) {
    if (k < 1) throw std::invalid_argument("k must be positive");
    check_budget(data, m);
    const long M = std::accumulate(m.begin(), m.end(), 0L);
    std::vector<Rational> row_values;
    for (const auto& row : data.rows)
        for (const auto& [I, a] : row)
            if (length(I) <= M) row_values.push_back(a);
    std::vector<Rational> family;
    std::vector<std::pair<MultiIndex, MultiIndex>> where;
    for (const auto& i : indices_of_length(data.N() + 1, k)) {
        const auto C = coefficient_table_C(data, i, static_cast<int>(M));
        for (const auto& [I, c] : C)
            if (within(data.t(I), m)) family.push_back(c), where.emplace_back(i, I);
    }
    std::vector<CheckRecord> out;
    LogForm lhs_height;
    for (const auto& v : places_with(data, row_values)) {
        Rational lhs = 0;
        std::size_t arg = 0;
        for (std::size_t q = 0; q < family.size(); ++q) {
            Rational a = abs_v(family[q], v);
            if (a > lhs) lhs = a, arg = q;
        }
        Rational rhs = hypothesis_rhs(data, v, m, k);
        if (v.is_infinite()) rhs *= rpow(Rational(2), M + static_cast<long>(data.g) * (k - 1));
        CheckRecord rec = le_exact("coefficient_table.local", lhs, rhs);
        rec.detail["place"] = v.to_string();
        rec.detail["k"] = k;
        rec.detail["m"] = m;
        if (!family.empty()) rec.detail["worst"] = json{{"i", where[arg].first}, {"I", where[arg].second}};
        out.push_back(rec);
        if (lhs > 0) lhs_height += LogForm::log_raw(lhs);
    }
    CheckRecord h = le_log("coefficient_table.height", lhs_height, height_rhs_common(data, k, m, true));
    h.detail["k"] = k;
    h.detail["m"] = m;
    out.push_back(h);
    return out;
}

// ---- Segre-Veronese ----------------------------------------------------------------------

SegreVeroneseMap SegreVeroneseMap::make(std::vector<int> n, std::vector<long> delta) {
    if (n.size() != delta.size() || n.empty()) throw std::invalid_argument("need one degree per block");
    for (std::size_t l = 0; l < n.size(); ++l)
        if (n[l] < 1 || delta[l] < 0) throw std::invalid_argument("need n_l >= 1 and delta_l >= 0");
    SegreVeroneseMap s;
    s.n = std::move(n);
    s.delta = std::move(delta);
    std::vector<MultiIndex> acc{{}};
    for (std::size_t l = 0; l < s.n.size(); ++l) {
        const auto part = indices_of_length(s.n[l] + 1, static_cast<int>(s.delta[l]));
        std::vector<MultiIndex> next;
        next.reserve(acc.size() * part.size());
        for (const auto& a : acc)
            for (const auto& b : part) {
                MultiIndex c = a;
                c.insert(c.end(), b.begin(), b.end());
                next.push_back(std::move(c));
            }
        acc = std::move(next);
    }
    s.index = std::move(acc);
    return s;
}

Integer SegreVeroneseMap::card_formula() const {
    Integer r = 1;
    for (std::size_t l = 0; l < n.size(); ++l) r *= binomial(n[l] + delta[l], delta[l]);
    return r;
}

std::vector<std::string> SegreVeroneseMap::z_vars() const {
    std::vector<std::string> out;
    for (std::size_t k = 0; k < index.size(); ++k) out.push_back("Z" + std::to_string(k));
    return out;
}

std::vector<Rational> SegreVeroneseMap::image(const std::vector<Rational>& x) const {
    std::size_t C = 0;
    for (int k : n) C += k + 1;
    if (x.size() != C) throw std::invalid_argument("point needs one value per coordinate");
    std::vector<Rational> out;
    out.reserve(index.size());
    for (const auto& a : index) {
        Rational v = 1;
        for (std::size_t k = 0; k < C; ++k)
            if (a[k]) v *= rpow(x[k], a[k]);
        out.push_back(v);
    }
    return out;
}

std::vector<Rational> SegreVeroneseMap::linear_form(const Poly& P) const {
    std::vector<int> blocks;
    for (int k : n) blocks.push_back(k + 1);
    if (P.is_zero() || !P.is_multihomogeneous(blocks) ||
        P.multidegree(blocks) != std::vector<long>(delta.begin(), delta.end()))
        throw std::invalid_argument("form multidegree differs from the map's degrees");
    std::map<MultiIndex, std::size_t> pos;
    for (std::size_t k = 0; k < index.size(); ++k) pos[index[k]] = k;
    std::vector<Rational> L(index.size(), Rational(0));
    for (const auto& [m, c] : P.terms()) L[pos.at(m.to_index(P.nvars()))] = c;
    return L;
}

Rational SegreVeroneseMap::apply(const std::vector<Rational>& L, const std::vector<Rational>& z) {
    if (L.size() != z.size()) throw std::invalid_argument("linear form and point differ in length");
    Rational s = 0;
    for (std::size_t k = 0; k < L.size(); ++k)
        if (L[k] != 0) s += L[k] * z[k];
    return s;
}

LogForm SegreVeroneseMap::height(const std::vector<Rational>& L) {
    std::vector<Rational> nz;
    for (const auto& c : L)
        if (c != 0) nz.push_back(c);
    return projective_height(nz);
}

json SegreVeroneseMap::to_json() const {
    json idx = json::array();
    for (const auto& a : index) idx.push_back(a);
    return json{{"n", n},
                {"delta", delta},
                {"card", index.size()},
                {"N", N()},
                {"convention", "N = card - 1, ambient P_N has N + 1 coordinates"},
                {"index", idx}};
}

std::vector<CheckRecord> verify_delta_height_bound(const MultiplicativeGroupModel& G, const MultiForm& F,
                                                   const std::vector<long>& m) {
    F.validate(G);
    if (static_cast<int>(m.size()) != G.p()) throw std::invalid_argument("need one m_l per block");
    std::vector<MultiIndex> Is{{}};
    for (int l = 0; l < G.p(); ++l) {
        if (m[l] < 1) throw std::invalid_argument("m_l must be positive");
        std::vector<MultiIndex> next;
        for (const auto& a : Is)
            for (const auto& b : indices_up_to(G.n[l], static_cast<int>(m[l]))) {
                MultiIndex c = a;
                c.insert(c.end(), b.begin(), b.end());
                next.push_back(std::move(c));
            }
        Is = std::move(next);
    }
    const auto fam = delta_family(G, F.P, Is);
    std::vector<CheckRecord> out;

    bool same = true;
    std::vector<Rational> coeffs;
    for (const auto& [I, D] : fam) {
        if (D.is_zero()) continue;
        if (!D.is_multihomogeneous(G.form_blocks()) || D.multidegree(G.form_blocks()) != F.delta) same = false;
        for (const auto& c : D.coefficients()) coeffs.push_back(c);
    }
    out.push_back(predicate("delta.multidegree", same));

    const auto sv = SegreVeroneseMap::make(G.n, F.delta);
    const LogForm hP = height_gauss_weil(F.P);
    out.push_back(predicate("segre.height_equal", (SegreVeroneseMap::height(sv.linear_form(F.P)) - hP).is_zero()));

    // The linear form on P_N: degree 1, s = 2, E_l = 1, h(e_l) = 0, h~(B) = 0, c = c' = 1.
    const LogForm log2 = LogForm::log_of(2);
    LogForm rhs = hP;
    long msum = 0, gd = 0;
    for (int l = 0; l < G.p(); ++l) msum += m[l], gd += G.n[l] * F.delta[l];
    rhs += log2 * Rational(msum + G.g() + gd);
    rhs += LogForm::log_of(Rational(sv.N() + 1)) * Rational(4);
    CheckRecord r = le_log("delta.height_bound", projective_height(coeffs), rhs);
    r.instance = json{{"P", poly_to_json(F.P)}, {"m", m}};

    BoundInputs in = BoundInputs::from_model(G);
    std::vector<Real> ones(G.p(), Real(1)), ml, dl, zeros(G.p(), Real(0));
    for (int l = 0; l < G.p(); ++l) ml.push_back(Real(m[l])), dl.push_back(Real(F.delta[l]));
    in.set("delta", Real(1)).set("N", Real(sv.N())).set("hP", hP.value()).set("hA", Real(0)).set("s", Real(2));
    in.set("E_l", ones).set("m_l", ml).set("delta_l", dl).set("h_e_l", zeros);
    r.detail["evaluator"] = real_to_string(prop_4_16_bound(in).value("rhs"));
    out.push_back(r);
    return out;
}

// ---- bound evaluators --------------------------------------------------------------------

Real BoundInputs::at(const std::string& k) const {
    auto it = scalars.find(k);
    if (it == scalars.end()) throw std::invalid_argument("missing scalar: " + k);
    return it->second;
}

const std::vector<Real>& BoundInputs::vec(const std::string& k, std::size_t size) const {
    auto it = vectors.find(k);
    if (it == vectors.end()) throw std::invalid_argument("missing scalar: " + k);
    if (it->second.size() != size)
        throw std::invalid_argument("scalar list " + k + " needs " + std::to_string(size) + " entries");
    return it->second;
}

BoundInputs BoundInputs::from_model(const MultiplicativeGroupModel& G) {
    G.validate();
    BoundInputs in;
    std::vector<Real> nl, ones, zeros, hG;
    for (int l = 0; l < G.p(); ++l) {
        nl.push_back(Real(G.n[l]));
        ones.push_back(Real(1));
        zeros.push_back(Real(0));
        hG.push_back(to_real(G.height(l)));
    }
    in.set("p", Real(G.p())).set("g", Real(G.g())).set("c", Real(1)).set("c'", Real(1));
    in.set("n_l", nl).set("g_l", nl).set("dG_l", ones).set("hG_l", hG).set("h_e_l", zeros).set("hA_l", zeros);
    if (G.p() == 1) {
        in.set("degG", Real(1)).set("hG", hG[0]).set("h_e", Real(0)).set("hA", Real(0)).set("N", Real(G.n[0]));
    }
    return in;
}

Real BoundResult::value(const std::string& k) const {
    for (const auto& [name, v] : values)
        if (name == k) return v;
    throw std::invalid_argument("bound result has no value " + k);
}

json BoundResult::to_json() const {
    json vs = json::object();
    for (const auto& [name, v] : values) vs[name] = real_to_string(v, 30);
    return json{{"bound", bound}, {"values", vs}, {"warnings", warnings}};
}

namespace {

std::size_t block_count(const BoundInputs& in) {
    const Real p = in.at("p");
    if (p < 1 || p != floor(p)) throw std::invalid_argument("p must be a positive integer");
    return static_cast<std::size_t>(p.convert_to<long>());
}

void warn_negative(BoundResult& r, const BoundInputs& in, std::initializer_list<const char*> keys) {
    for (const char* k : keys)
        if (in.scalars.count(k) && in.scalars.at(k) < 0) r.warnings.push_back(std::string(k) + " is negative");
}

Real f_expression(const Real& N, const Real& g, const Real& dG, const Real& hG, const Real& h_e) {
    const Real a = N - g;
    return 4 * a * hG + (2 * (a + 1) * h_e + 4 * a) * dG + (a + 1) * (2 * g + 5) * (log(dG) + 1) -
           2 * (a + 1) * h_e;
}

}  // namespace

BoundResult lemma_4_10_bounds(const BoundInputs& in) {
    BoundResult r{"lemma_4_10", {}, {}};
    const Real degG = in.at("degG"), delta = in.at("delta"), d = in.at("d"), hG = in.at("hG"), g = in.at("g"),
               eta = in.at("eta");
    warn_negative(r, in, {"degG", "delta", "d", "g"});
    if (eta <= 0) r.warnings.push_back("eta should be positive");
    r.values.emplace_back("degree_rhs", degG * pow(delta, d));
    r.values.emplace_back("height_rhs",
                          hG * pow(delta, d) + g * (eta + 3 * log(degG * pow(delta, g) + 1)) * degG * pow(delta, d - 1));
    return r;
}

BoundResult prop_4_16_bound(const BoundInputs& in) {
    BoundResult r{"prop_4_16", {}, {}};
    const std::size_t p = block_count(in);
    const Real g = in.at("g"), c = in.at("c"), cp = in.at("c'"), delta = in.at("delta"), N = in.at("N"),
               hP = in.at("hP"), hA = in.at("hA"), s = in.at("s");
    const auto &E = in.vec("E_l", p), &m = in.vec("m_l", p), &dl = in.vec("delta_l", p), &he = in.vec("h_e_l", p),
               &gl = in.vec("g_l", p);
    const Real log2 = log(Real(2));
    Real a = 0, b = 0;
    for (std::size_t l = 0; l < p; ++l) {
        a += (log(E[l]) + log2) * m[l];
        b += dl[l] * (he[l] + gl[l] * log(s));
        if (m[l] < 1) r.warnings.push_back("m_l should be >= 1");
    }
    r.values.emplace_back("rhs", a + c * delta * (g * log2 + b) + hP + delta * hA + delta * (2 * c + cp + 1) * log(N + 1));
    return r;
}

BoundResult thm_4_13_degree_bound(const BoundInputs& in) {
    BoundResult r{"thm_4_13.degree", {}, {}};
    const Real degG = in.at("degG"), g = in.at("g"), d = in.at("d"), cp = in.at("c'"), delta = in.at("delta");
    warn_negative(r, in, {"degG", "g", "d", "delta"});
    r.values.emplace_back("degree_rhs", degG * pow(cp * delta, g - d));
    return r;
}

BoundResult thm_4_13_bounds(const BoundInputs& in) {
    BoundResult r{"thm_4_13", {}, {}};
    const std::size_t p = block_count(in);
    const Real degG = in.at("degG"), hG = in.at("hG"), g = in.at("g"), d = in.at("d"), c = in.at("c"),
               cp = in.at("c'"), delta = in.at("delta"), N = in.at("N"), hP = in.at("hP"), hA = in.at("hA"),
               s = in.at("s");
    const auto &E = in.vec("E_l", p), &t = in.vec("t_l", p), &dl = in.vec("delta_l", p), &he = in.vec("h_e_l", p),
               &gl = in.vec("g_l", p);
    warn_negative(r, in, {"degG", "g", "d", "delta", "N"});
    if (d > g - 1) r.warnings.push_back("d should be at most g - 1");
    const Real log2 = log(Real(2));
    const Real cd = cp * delta;
    Real a = 0, b = 0;
    for (std::size_t l = 0; l < p; ++l) {
        a += (log(E[l]) + log2) * t[l];
        b += dl[l] * (he[l] + gl[l] * log(s));
    }
    const Real bracket = a + c * delta * (b + g * log2) + hP + delta * hA + delta * (2 * c + 2 * cp + 1) * (log(N) + 1) +
                         3 * log(degG * pow(cd, g) + 1);
    r.values.emplace_back("degree_rhs", degG * pow(cd, g - d));
    r.values.emplace_back("height_rhs", hG * pow(cd, g - d) + g * bracket * degG * pow(cd, g - d - 1));
    return r;
}

BoundResult thm_5_17_bounds(const BoundInputs& in) {
    BoundResult r{"thm_5_17", {}, {}};
    const Real degG = in.at("degG"), hG = in.at("hG"), g = in.at("g"), d = in.at("d"), c = in.at("c"),
               cp = in.at("c'"), delta = in.at("delta"), N = in.at("N"), hP = in.at("hP"), hA = in.at("hA"),
               he = in.at("h_e"), H = in.at("H");
    warn_negative(r, in, {"degG", "g", "d", "delta", "N", "H"});
    if (N < g) r.warnings.push_back("N should be at least g");
    const Real log2 = log(Real(2));
    const Real cd = cp * delta;
    const Real f = f_expression(N, g, degG, hG, he);
    // d°A: total degree c + c' of the addition forms.
    const Real bracket = f * H + c * delta * (he + g * log2) + hP + delta * hA +
                         delta * (2 * (c + cp) + 1) * (log(N) + 1) + 3 * log(degG * pow(cd, g) + 1);
    r.values.emplace_back("f", f);
    r.values.emplace_back("degree_rhs", degG * pow(cd, g - d));
    r.values.emplace_back("height_rhs", hG * pow(cd, g - d) + g * bracket * degG * pow(cd, g - d - 1));
    return r;
}

BoundResult thm_5_19_bounds(const BoundInputs& in) {
    BoundResult r{"thm_5_19", {}, {}};
    const std::size_t p = block_count(in);
    const Real g = in.at("g"), c = in.at("c"), cp = in.at("c'"), eps = in.at("eps"), dimV = in.at("dimV"),
               hP = in.at("hP");
    const auto &dl = in.vec("delta_l", p), &nl = in.vec("n_l", p), &gl = in.vec("g_l", p), &dG = in.vec("dG_l", p),
               &hG = in.vec("hG_l", p), &he = in.vec("h_e_l", p), &hA = in.vec("hA_l", p);
    if (eps <= 0 || eps > 1) r.warnings.push_back("eps should lie in (0, 1]");
    const Real log2 = log(Real(2));
    Real prod_dG = 1, sum_log_dG = 0, sumR = 0;
    for (std::size_t l = 0; l < p; ++l) {
        prod_dG *= dG[l];
        sum_log_dG += log(dG[l]);
        if (dl[l] < gl[l] + 1) r.warnings.push_back("delta_" + std::to_string(l + 1) + " < g_l + 1");
    }
    for (std::size_t l = 0; l < p; ++l) {
        const Real R = hG[l] / (dG[l] * (gl[l] + 1)) + (g - 1) * eps * f_expression(nl[l], gl[l], dG[l], hG[l], he[l]) +
                       c * (he[l] + gl[l] * log2) + hA[l] + (3 * c + 3 * cp + 4) * log(nl[l] + 1);
        r.values.emplace_back("R_" + std::to_string(l + 1), R);
        sumR += R * dl[l];
    }
    const Real S = 3 * sum_log_dG + g * (3 * log(Real(p)) + 3 * log(cp) + c * log2) + 2 * c + 2 * cp + 4;
    r.values.emplace_back("S", S);
    const Real threshold = pow(Real(p) * cp / eps, g) * prod_dG;
    r.values.emplace_back("condition_threshold", threshold);
    for (std::size_t l = 0; l + 1 < p; ++l)
        if (!(dl[l] / dl[l + 1] > threshold))
            r.warnings.push_back("condition fails between blocks " + std::to_string(l + 1) + " and " +
                                 std::to_string(l + 2));
    r.values.emplace_back("degree_rhs", pow(g * cp / eps, g - dimV) * prod_dG);
    r.values.emplace_back("height_rhs", pow((g + 1) * cp / eps, g - dimV) * (hP + sumR + S));
    return r;
}

BoundResult corollary_bounds(const BoundInputs& in) {
    BoundResult r{"corollary", {}, {}};
    const std::size_t p = block_count(in);
    const Real eps = in.at("eps"), dimV = in.at("dimV"), hP = in.at("hP");
    const auto &nl = in.vec("n_l", p), &dl = in.vec("delta_l", p);
    if (eps <= 0 || eps > 1) r.warnings.push_back("eps should lie in (0, 1]");
    Real n = 0, sum = 0;
    for (std::size_t l = 0; l < p; ++l) {
        n += nl[l];
        sum += (2 * nl[l] + 5) * dl[l];
        if (dl[l] < nl[l] + 1) r.warnings.push_back("delta_" + std::to_string(l + 1) + " < n_l + 1");
    }
    const Real threshold = pow(Real(p) / eps, n);
    for (std::size_t l = 0; l + 1 < p; ++l)
        if (!(dl[l] / dl[l + 1] > threshold))
            r.warnings.push_back("ratio condition fails between blocks " + std::to_string(l + 1) + " and " +
                                 std::to_string(l + 2));
    r.values.emplace_back("degree_rhs", pow(n / eps, n - dimV));
    r.values.emplace_back("height_rhs", pow((n + 1) / eps, n - dimV) *
                                            (hP + (n * eps + 2) * sum + 3 * (n + 1) * (log(Real(p)) + 2)));
    return r;
}

CorollaryExact corollary_bounds_exact(const std::vector<long>& n, const Rational& eps,
                                      const std::vector<Rational>& delta, long dimV, const LogForm& hP) {
    if (n.empty() || n.size() != delta.size()) throw std::invalid_argument("need one degree per block");
    if (eps <= 0) throw std::invalid_argument("eps must be positive");
    long nn = 0;
    Rational sum = 0;
    for (std::size_t l = 0; l < n.size(); ++l) nn += n[l], sum += Rational(2 * n[l] + 5) * delta[l];
    const long e = nn - dimV;
    if (e < 0) throw std::invalid_argument("dim V exceeds n");
    CorollaryExact out;
    out.degree_rhs = rpow(Rational(nn) / eps, e);
    LogForm brace = hP + LogForm::from_constant((Rational(nn) * eps + 2) * sum + Rational(6 * (nn + 1)));
    brace += LogForm::log_of(Rational(static_cast<long>(n.size()))) * Rational(3 * (nn + 1));
    out.height_rhs = brace * rpow(Rational(nn + 1) / eps, e);
    return out;
}

Rational condition_1_33_threshold(long p, long g, const Rational& c_prime, const Rational& eps,
                                  const std::vector<Rational>& dG) {
    if (eps == 0) throw std::invalid_argument("eps must be nonzero");
    Rational t = rpow(Rational(p) * c_prime / eps, g);
    for (const auto& d : dG) t *= d;
    return t;
}

std::vector<bool> condition_1_33(const std::vector<Rational>& delta, long g, const Rational& c_prime,
                                 const Rational& eps, const std::vector<Rational>& dG) {
    const Rational t = condition_1_33_threshold(static_cast<long>(delta.size()), g, c_prime, eps, dG);
    std::vector<bool> out;
    for (std::size_t l = 0; l + 1 < delta.size(); ++l) {
        if (delta[l + 1] == 0) throw std::invalid_argument("delta entries must be nonzero");
        out.push_back(delta[l] / delta[l + 1] > t);
    }
    return out;
}

}  // namespace hl
