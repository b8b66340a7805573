#include "heightlab/campaign.hpp"

#include "heightlab/json_io.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace hl {

namespace {

constexpr const char* kToolVersion = "heightlab 1.0.0";

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) h = (h ^ c) * 0x100000001b3ULL;
    return h;
}

Rational nonzero_coef(Rng& rng, int box) {
    long c;
    do c = rng.uniform_int(-box, box);
    while (c == 0);
    return Rational(c);
}

Mono random_mono(Rng& rng, int nvars, int deg) {
    Mono m;
    for (int k = 0; k < deg; ++k) ++m.e[rng.uniform_int(0, nvars - 1)];
    return m;
}

std::vector<std::string> numbered(const std::string& stem, int n, int from = 1) {
    std::vector<std::string> v;
    for (int i = 0; i < n; ++i) v.push_back(stem + std::to_string(i + from));
    return v;
}

}  // namespace

void Caps::validate() const {
    if (n < 1 || n > 8) throw std::invalid_argument("caps: n must lie in [1, 8]");
    if (d < 1 || d > 8) throw std::invalid_argument("caps: d must lie in [1, 8]");
    if (coef < 1 || point < 0) throw std::invalid_argument("caps: coefficient box must be positive");
    if (order < 0 || order > 8) throw std::invalid_argument("caps: order must lie in [0, 8]");
    if (symbolic_order < 0 || symbolic_order > order) throw std::invalid_argument("caps: symbolic_order must lie in [0, order]");
    if (terms < 1) throw std::invalid_argument("caps: terms must be positive");
    if (blocks < 1 || block_dim < 1 || blocks * (2 * block_dim + 1) > kMaxVars)
        throw std::invalid_argument("caps: G_m model too large");
    if (form_degree < 1 || form_degree > 6) throw std::invalid_argument("caps: form_degree must lie in [1, 6]");
}

json Caps::to_json() const {
    return json{{"n", n},         {"d", d},           {"coef", coef},
                {"point", point}, {"order", order},   {"terms", terms},
                {"blocks", blocks}, {"block_dim", block_dim}, {"form_degree", form_degree},
                {"symbolic_order", symbolic_order}};
}

Caps Caps::from_json(const json& j) {
    Caps c;
    c.n = j.value("n", c.n);
    c.d = j.value("d", c.d);
    c.coef = j.value("coef", c.coef);
    c.point = j.value("point", c.point);
    c.order = j.value("order", c.order);
    c.terms = j.value("terms", c.terms);
    c.blocks = j.value("blocks", c.blocks);
    c.block_dim = j.value("block_dim", c.block_dim);
    c.form_degree = j.value("form_degree", c.form_degree);
    c.symbolic_order = j.value("symbolic_order", c.symbolic_order);
    c.validate();
    return c;
}

// ---- instances ------------------------------------------------------------------------

Poly generate_poly(Rng& rng, const std::vector<std::string>& vars, int d, int coef, int terms) {
    const int n = static_cast<int>(vars.size());
    for (long attempt = 0; attempt < kRejectionBudget; ++attempt) {
        const int t = static_cast<int>(rng.uniform_int(1, terms));
        std::map<Mono, Rational, decltype(&grlex_greater)> ts(&grlex_greater);
        ts.emplace(random_mono(rng, n, d), nonzero_coef(rng, coef));
        for (int k = 1; k < t; ++k)
            ts.emplace(random_mono(rng, n, static_cast<int>(rng.uniform_int(0, d))), nonzero_coef(rng, coef));
        Poly P = Poly::from_terms(vars, {ts.begin(), ts.end()});
        if (P.total_degree() == d) return P;
    }
    throw std::runtime_error("rejection budget exhausted drawing a polynomial");
}

ImplicitProblem generate_implicit(Rng& rng, const Caps& caps) {
    caps.validate();
    const int n = static_cast<int>(rng.uniform_int(1, caps.n));
    const int d = static_cast<int>(rng.uniform_int(std::min(2, caps.d), caps.d));
    auto vars = numbered("Y", n);
    vars.push_back("T");
    for (long attempt = 0; attempt < kRejectionBudget; ++attempt) {
        std::vector<Rational> x;
        for (int k = 0; k <= n; ++k) x.push_back(Rational(rng.uniform_int(-caps.point, caps.point)));
        Poly Q = generate_poly(rng, vars, d, caps.coef, caps.terms);
        Q -= Poly::constant(vars, Q.constant_term());
        const Rational q = Q.evaluate(x);
        if (rabs(q) > caps.coef) continue;
        Poly P = Q - Poly::constant(vars, q);
        if (P.total_degree() != d || P.derivative(n).evaluate(x) == 0) continue;
        ImplicitProblem pb;
        pb.P = std::move(P);
        pb.y.assign(x.begin(), x.begin() + n);
        pb.t = x[n];
        pb.validate();
        return pb;
    }
    throw std::runtime_error("rejection budget exhausted drawing an implicit problem");
}

Poly generate_multiform(Rng& rng, const std::vector<std::string>& vars, const std::vector<int>& blocks,
                        const std::vector<long>& delta, int coef, int terms) {
    for (long attempt = 0; attempt < kRejectionBudget; ++attempt) {
        const int t = static_cast<int>(rng.uniform_int(1, terms));
        std::map<Mono, Rational, decltype(&grlex_greater)> ts(&grlex_greater);
        for (int k = 0; k < t; ++k) {
            Mono m;
            int off = 0;
            for (std::size_t l = 0; l < blocks.size(); ++l) {
                Mono part = random_mono(rng, blocks[l], static_cast<int>(delta[l]));
                for (int i = 0; i < blocks[l]; ++i) m.e[off + i] = part.e[i];
                off += blocks[l];
            }
            ts.emplace(m, nonzero_coef(rng, coef));
        }
        Poly P = Poly::from_terms(vars, {ts.begin(), ts.end()});
        if (!P.is_zero()) return P;
    }
    throw std::runtime_error("rejection budget exhausted drawing a form");
}

SimplexStaircase generate_staircase(Rng& rng, const Caps& caps) {
    SimplexStaircase W;
    const int p = static_cast<int>(rng.uniform_int(1, caps.blocks));
    for (int l = 0; l < p; ++l) {
        W.blocks.push_back(static_cast<int>(rng.uniform_int(1, 2)));
        W.delta.push_back(Rational(rng.uniform_int(1, 6)));
    }
    const long b = rng.uniform_int(1, 6);
    W.epsilon = ratio(rng.uniform_int(1, b), b);
    W.validate();
    return W;
}

GroupChart generate_chart(Rng& rng, const Caps& caps) {
    for (long attempt = 0; attempt < kRejectionBudget; ++attempt) {
        GroupChart c;
        c.g = static_cast<int>(rng.uniform_int(1, 2));
        c.N = c.g + static_cast<int>(rng.uniform_int(1, 2));
        c.e.push_back(1);
        for (int i = 1; i <= c.N; ++i) c.e.push_back(Rational(rng.uniform_int(-caps.point, caps.point)));
        bool ok = true;
        for (int i = c.g + 1; i <= c.N && ok; ++i) {
            auto vars = numbered("X", c.g + 1, 0);
            vars.push_back("X" + std::to_string(i));
            const int deg = static_cast<int>(rng.uniform_int(1, 3));
            std::vector<Poly::Term> ts;
            const int t = static_cast<int>(rng.uniform_int(2, std::max(2, caps.terms)));
            for (int k = 0; k < t; ++k)
                ts.emplace_back(random_mono(rng, c.g + 2, deg), nonzero_coef(rng, caps.coef));
            // X_i must occur so that the chart solves for it.
            Mono mi;
            mi.e[c.g + 1] = 1;
            mi.e[0] = static_cast<std::uint8_t>(deg - 1);
            ts.emplace_back(mi, nonzero_coef(rng, caps.coef));
            Poly f = Poly::from_terms(vars, std::move(ts));
            std::vector<Rational> at(c.e.begin(), c.e.begin() + c.g + 1);
            at.push_back(c.e[i]);
            Mono m0;
            m0.e[0] = static_cast<std::uint8_t>(deg);
            f -= Poly::from_terms(vars, {{m0, f.evaluate(at)}});
            if (f.is_zero() || !f.is_homogeneous()) ok = false;
            c.forms.push_back(std::move(f));
        }
        if (!ok) continue;
        c.normalize();
        try {
            c.validate();
        } catch (const std::invalid_argument&) {
            continue;
        }
        return c;
    }
    throw std::runtime_error("rejection budget exhausted drawing a chart");
}

json MultiFormInstance::to_json() const {
    return json{{"model", G.to_json()}, {"form", poly_to_json(F.P)}, {"delta", F.delta}, {"point", rationals_to_json(x)}};
}

namespace {

MultiplicativeGroupModel generate_model(Rng& rng, const Caps& caps) {
    MultiplicativeGroupModel G;
    const int p = static_cast<int>(rng.uniform_int(1, caps.blocks));
    for (int l = 0; l < p; ++l) G.n.push_back(static_cast<int>(rng.uniform_int(1, caps.block_dim)));
    G.validate();
    return G;
}

std::vector<long> generate_degrees(Rng& rng, const MultiplicativeGroupModel& G, int cap) {
    std::vector<long> d;
    for (int l = 0; l < G.p(); ++l) d.push_back(rng.uniform_int(1, cap));
    return d;
}

std::vector<Rational> torus_point(Rng& rng, int coords) {
    std::vector<Rational> x;
    for (int k = 0; k < coords; ++k) {
        long a;
        do a = rng.uniform_int(-3, 3);
        while (a == 0);
        x.push_back(ratio(a, rng.uniform_int(1, 2)));
    }
    return x;
}

}  // namespace

MultiFormInstance generate_vanishing_multiform(Rng& rng, const Caps& caps) {
    MultiFormInstance inst;
    inst.G = generate_model(rng, caps);
    const auto delta = generate_degrees(rng, inst.G, caps.form_degree);
    for (long attempt = 0; attempt < kRejectionBudget; ++attempt) {
        inst.x = torus_point(rng, inst.G.coordinates());
        Poly P = generate_multiform(rng, inst.G.x_vars(), inst.G.form_blocks(), delta, caps.coef,
                                    std::max(2, caps.terms));
        // Solve the leading coefficient from the single constraint P(x) = 0.
        const Mono lead = P.terms().front().first;
        const Rational xm = Poly::from_terms(P.vars(), {{lead, Rational(1)}}).evaluate(inst.x);
        P -= Poly::from_terms(P.vars(), {{lead, P.evaluate(inst.x) / xm}});
        if (P.is_zero()) continue;
        inst.F = MultiForm{std::move(P), delta};
        inst.F.validate(inst.G);
        return inst;
    }
    throw std::runtime_error("rejection budget exhausted drawing a vanishing form");
}

json generate_instance(const std::string& kind, std::uint64_t seed, const Caps& caps) {
    caps.validate();
    Rng rng(seed);
    if (kind == "implicit") return generate_implicit(rng, caps).to_json();
    if (kind == "staircase") return generate_staircase(rng, caps).to_json();
    if (kind == "chart") return generate_chart(rng, caps).to_json();
    if (kind == "multiform") return generate_vanishing_multiform(rng, caps).to_json();
    if (kind == "poly") {
        const int n = static_cast<int>(rng.uniform_int(1, 2));
        return poly_to_json(generate_poly(rng, numbered("X", n), static_cast<int>(rng.uniform_int(1, caps.d)),
                                          caps.coef, caps.terms));
    }
    throw std::invalid_argument("unknown instance kind: " + kind);
}

// ---- campaigns ------------------------------------------------------------------------

const std::vector<std::string> kAllLemmas = {"1.1",  "heights",          "2.1",           "2.3",
                                             "2.5",  "3.1",              "4.8",           "4.15",
                                             "4.16", "delta-identities", "staircase-sum", "5.9-psi",
                                             "segre-roundtrip", "corollary-bounds"};

void CampaignConfig::validate() const {
    for (const auto& l : lemmas)
        if (std::find(kAllLemmas.begin(), kAllLemmas.end(), l) == kAllLemmas.end())
            throw std::invalid_argument("unknown lemma: " + l);
    if (count < 0) throw std::invalid_argument("count must be non-negative");
    if (precision_bits < 60) throw std::invalid_argument("precision must be at least 60 bits");
    if (quadrature_points < 8) throw std::invalid_argument("quadrature needs at least 8 points per dimension");
    if (mc_samples < 1000) throw std::invalid_argument("Monte-Carlo needs at least 1000 samples");
    caps.validate();
}

json CampaignConfig::to_json() const {
    json ps = json::array();
    for (const auto& p : places) ps.push_back(p.to_string());
    return json{{"seed", seed},
                {"lemmas", lemmas},
                {"count", count},
                {"caps", caps.to_json()},
                {"places", ps},
                {"precision_bits", precision_bits},
                {"quadrature_points", quadrature_points},
                {"mc_samples", mc_samples}};
}

CampaignConfig CampaignConfig::from_json(const json& j) {
    CampaignConfig c;
    c.seed = j.value("seed", c.seed);
    if (j.contains("lemmas")) c.lemmas = j.at("lemmas").get<std::vector<std::string>>();
    c.count = j.value("count", c.count);
    if (j.contains("caps")) c.caps = Caps::from_json(j.at("caps"));
    if (j.contains("places"))
        for (const auto& p : j.at("places")) c.places.push_back(Place::parse(p.get<std::string>()));
    c.precision_bits = j.value("precision_bits", c.precision_bits);
    c.quadrature_points = j.value("quadrature_points", c.quadrature_points);
    c.mc_samples = j.value("mc_samples", c.mc_samples);
    c.validate();
    return c;
}

json CampaignSummary::to_json() const {
    return json{{"type", "summary"},
                {"instances", instances},
                {"errors", errors},
                {"checks", tally.to_json()},
                {"warnings", tally.inconclusive},
                {"exit_code", exit_code()}};
}

namespace {

using Records = std::vector<CheckRecord>;

void append(Records& out, Records more) {
    for (auto& r : more) out.push_back(std::move(r));
}

std::vector<Place> merge_places(std::vector<Place> a, const std::vector<Place>& b) {
    std::set<Place> s(a.begin(), a.end());
    s.insert(b.begin(), b.end());
    return {s.begin(), s.end()};
}

MeasureOptions measure_options(const CampaignConfig& cfg, std::uint64_t seed) {
    MeasureOptions opt;
    opt.points_per_dim = cfg.quadrature_points;
    opt.mc_samples = cfg.mc_samples;
    opt.seed = seed;
    opt.torus_rule = "jensen";
    opt.target_err = 1e-4;
    return opt;
}

// Random m_l >= 1 with sum m_l <= total.
std::vector<long> random_budget(Rng& rng, std::size_t p, long total) {
    std::vector<long> m(p, 1);
    long left = total - static_cast<long>(p);
    for (std::size_t l = 0; l < p && left > 0; ++l) {
        long extra = rng.uniform_int(0, left);
        m[l] += extra;
        left -= extra;
    }
    return m;
}

MultiIndex random_index(Rng& rng, int arity, int maxlen) {
    MultiIndex I(arity, 0);
    const long len = rng.uniform_int(0, maxlen);
    for (long k = 0; k < len; ++k) ++I[rng.uniform_int(0, arity - 1)];
    return I;
}

Records lemma_1_1(const CampaignConfig& cfg, Rng& rng, json& inst, std::uint64_t seed) {
    const bool bivariate = rng.uniform_int(0, 4) == 0;
    Poly P = bivariate ? generate_poly(rng, {"X1", "X2"}, static_cast<int>(rng.uniform_int(1, 3)), 9, 6)
                       : generate_poly(rng, {"X"}, static_cast<int>(rng.uniform_int(1, 6)), 20, 7);
    inst = poly_to_json(P);
    const auto opt = measure_options(cfg, seed);
    Records out = check_comparison(P, Comparison::eq_1_7, opt);
    append(out, check_comparison(P, Comparison::l2_chain, opt));
    return out;
}

Records lemma_heights(const CampaignConfig& cfg, Rng& rng, json& inst, std::uint64_t seed) {
    const int d = static_cast<int>(rng.uniform_int(1, 5));
    Poly P = generate_multiform(rng, {"X0", "X1"}, {2}, {d}, 9, 5);
    inst = poly_to_json(P);
    const auto opt = measure_options(cfg, seed);
    Records out = check_comparison(P, Comparison::eq_1_19, opt);
    append(out, check_comparison(P, Comparison::eq_1_20, opt));
    append(out, check_comparison(P, Comparison::eq_1_21, opt));
    const Rational c = ratio(nonzero_coef(rng, 30).get_num(), rng.uniform_int(1, 30));
    const Poly cP = P * c;
    out.push_back(predicate("heights.gauss_weil_scaling", (height_gauss_weil(cP) - height_gauss_weil(P)).is_zero(),
                            json{{"scale", to_string(c)}}));
    const Estimate a = height_mahler(P, opt), b = height_mahler(cP, opt);
    // Equal within the combined error bars plus rounding at the working precision.
    const Real ulp = ldexp(Real(1), 8 - static_cast<int>(precision_bits())) * (1 + abs(a.value) + abs(b.value));
    out.push_back(le_real("heights.mahler_scaling", abs(a.value - b.value), a.err + b.err + ulp, Real(0)));
    out.push_back(predicate("heights.product_formula", product_formula_form(c).is_zero(),
                            json{{"x", to_string(c)}}));
    return out;
}

Records lemma_2_1(const CampaignConfig& cfg, Rng& rng, json& inst) {
    const auto pb = generate_implicit(rng, cfg.caps);
    inst = pb.to_json();
    CofactorRecursion rec(pb);
    Records out = verify_lemma_2_1(rec, cfg.caps.order);
    const auto a = rec.table(cfg.caps.order);
    const auto b = solve_series_at_point(pb, cfg.caps.order);
    json bad = json::array();
    for (const auto& [I, v] : a)
        if (b.at(I) != v) bad.push_back(json{{"I", I}, {"recursion", to_string(v)}, {"series", to_string(b.at(I))}});
    out.push_back(predicate("oracle.recursion_equals_series", bad.empty(), json{{"mismatches", bad}}));
    return out;
}

Records lemma_2_3(const CampaignConfig& cfg, Rng& rng, json& inst) {
    const auto pb = generate_implicit(rng, cfg.caps);
    inst = pb.to_json();
    const int order = cfg.caps.symbolic_order;
    CofactorRecursion rec(pb);
    const auto sol = solve_series(pb, order, false);
    Records out = verify_denominator_bounds(pb, sol, &rec, std::min(order, 2));
    out.push_back(predicate("lemma_2_2.defining_identity", defining_identity_holds(pb, sol)));
    return out;
}

Records lemma_2_5(const CampaignConfig& cfg, Rng& rng, json& inst) {
    const auto pb = generate_implicit(rng, cfg.caps);
    inst = pb.to_json();
    CofactorRecursion rec(pb);
    return verify_lemma_2_5(pb, rec.table(cfg.caps.order), cfg.caps.order,
                            merge_places(lemma_2_5_places(pb), cfg.places));
}

Records lemma_3_1(const CampaignConfig& cfg, Rng& rng, json& inst) {
    const auto chart = generate_chart(rng, cfg.caps);
    inst = chart.to_json();
    const int order = std::min(cfg.caps.order, 4);
    std::vector<Rational> small{2, 3, 5, 7, 11, 13};
    return verify_lemma_3_1(chart, parametrize_group_chart(chart, order),
                            merge_places(merge_places(chart_places(chart), relevant_places(small)), cfg.places));
}

Parametrization random_parametrization(const CampaignConfig& cfg, Rng& rng, json& inst, int order) {
    if (rng.uniform_int(0, 1) == 0) {
        const auto chart = generate_chart(rng, cfg.caps);
        inst = json{{"chart", chart.to_json()}};
        return chart_parametrization(chart, order);
    }
    const auto G = generate_model(rng, cfg.caps);
    const auto delta = generate_degrees(rng, G, 2);
    inst = json{{"model", G.to_json()}, {"delta", delta}};
    return gm_parametrization(G, delta, order);
}

Records lemma_4_8(const CampaignConfig& cfg, Rng& rng, json& inst) {
    const int order = 3;
    const auto data = random_parametrization(cfg, rng, inst, order);
    const auto m = random_budget(rng, data.g_blocks.size(), order);
    const int k = static_cast<int>(rng.uniform_int(1, 3));
    inst["m"] = m;
    inst["k"] = k;
    Records out = verify_coefficient_hypothesis(data);
    append(out, verify_product_bounds(data, k, m));
    return out;
}

Records lemma_4_15(const CampaignConfig& cfg, Rng& rng, json& inst) {
    const int order = 3;
    const auto data = random_parametrization(cfg, rng, inst, order);
    const auto m = random_budget(rng, data.g_blocks.size(), order);
    const int k = data.N() > 12 ? 1 : static_cast<int>(rng.uniform_int(1, 2));
    inst["m"] = m;
    inst["k"] = k;
    return verify_coefficient_table_bounds(data, k, m);
}

Records lemma_4_16(const CampaignConfig& cfg, Rng& rng, json& inst) {
    const auto fi = generate_vanishing_multiform(rng, cfg.caps);
    inst = fi.to_json();
    const auto m = random_budget(rng, fi.G.n.size(), 2 * fi.G.n.size());
    inst["m"] = m;
    Records out = verify_delta_height_bound(fi.G, fi.F, m);
    const auto W = enumerate(SimplexStaircase{std::vector<Rational>(fi.G.p(), Rational(2)), Rational(1), fi.G.n});
    const auto a = vanishing_multiplicity_check(fi.G, fi.F.P, fi.x, origin_staircase(fi.G.n));
    out.push_back(predicate("vanishing.forced_at_point", a.vanishes));
    const auto b = vanishing_multiplicity_check(fi.G, fi.F.P, fi.x, W);
    const auto c = vanishing_by_taylor(fi.G, fi.F.P, fi.x, W);
    out.push_back(predicate("vanishing.delta_equals_taylor", b.vanishes == c.vanishes && b.witnesses == c.witnesses,
                            json{{"delta", b.to_json()}, {"taylor", c.to_json()}}));
    return out;
}

Records lemma_delta(const CampaignConfig& cfg, Rng& rng, json& inst) {
    const auto G = generate_model(rng, cfg.caps);
    const auto dp = generate_degrees(rng, G, 2), dq = generate_degrees(rng, G, 2);
    const Poly P = generate_multiform(rng, G.x_vars(), G.form_blocks(), dp, cfg.caps.coef, cfg.caps.terms);
    const Poly Q = generate_multiform(rng, G.x_vars(), G.form_blocks(), dq, cfg.caps.coef, cfg.caps.terms);
    const Poly Q2 = generate_multiform(rng, G.x_vars(), G.form_blocks(), dp, cfg.caps.coef, cfg.caps.terms);
    const MultiIndex I = random_index(rng, G.g(), 4);
    const int a = static_cast<int>(rng.uniform_int(0, 4));
    const MultiIndex I1 = random_index(rng, G.g(), a), J1 = random_index(rng, G.g(), 4 - a);
    inst = json{{"model", G.to_json()}, {"P", poly_to_json(P)}, {"Q", poly_to_json(Q)}, {"Q2", poly_to_json(Q2)},
                {"I", I}, {"I1", I1}, {"J1", J1}};
    Records out;
    out.push_back(predicate("delta.closed_form_equals_substitution",
                            delta_closed_form(G, P, I) == delta_operator(G, P, I)));
    append(out, verify_delta_identities(G, P, Q, I));
    append(out, verify_delta_identities(G, P, Q2, I));
    const auto cc = delta_composition_membership(G, P, I1, J1);
    out.push_back(predicate("delta.composition_constants", cc.constants_ok, cc.to_json()));
    out.push_back(predicate("delta.composition_identity", cc.identity_ok));
    return out;
}

Records lemma_staircase(const CampaignConfig& /*cfg*/, Rng& rng, json& inst) {
    const auto W = generate_staircase(rng, Caps{});
    inst = W.to_json();
    Records out;
    const auto S = enumerate(W);
    const auto F = functionals(S);
    out.push_back(predicate("staircase.lengths_add_up", F.lengths_add_up));
    bool tl = true;
    for (std::size_t l = 0; l < W.delta.size(); ++l) tl = tl && Rational(F.t[l]) <= W.epsilon * W.delta[l];
    out.push_back(predicate("staircase.t_le_eps_delta", tl, F.to_json()));
    SimplexStaircase half = W;
    half.epsilon = W.epsilon / 2;
    bool mono = true;
    const auto Shalf = enumerate(half);
    for (const auto& I : Shalf.members()) mono = mono && S.contains(I);
    out.push_back(predicate("staircase.monotone_in_eps", mono));
    const int g = W.arity();
    const auto cmp = compare_sum_with_dilate(W, g);
    out.push_back(predicate("staircase.sum_in_dilate", cmp.sum_in_target(), cmp.to_json()));
    inst["dilate_comparison"] = cmp.to_json();
    std::vector<int> axes;
    for (int j = 0; j < g && axes.size() < 3; ++j)
        if (rng.uniform_int(0, 1) == 0 || (axes.empty() && j == g - 1)) axes.push_back(j);
    const double exact = multiplicity_volume(W, axes).get_d();
    const double lat = lattice_volume(W, axes, 64);
    out.push_back(le_real("staircase.volume_vs_lattice", Real(std::abs(lat - exact) / exact), Real(0.01), Real(0)));
    return out;
}

Records lemma_psi(const CampaignConfig& /*cfg*/, long index) {
    Records out;
    const long lo = index * 200, hi = std::min<long>(lo + 199, 10000);
    bool le1 = true, neg = true;
    long bad = -1;
    const auto table = psi_table(hi);
    for (long n = lo; n <= hi; ++n) {
        const Real& v = table[n];
        if (v > 1) le1 = false, bad = n;
        if (n >= 5 && !(v < 0)) neg = false, bad = n;
    }
    out.push_back(predicate("psi.le_one", le1, json{{"from", lo}, {"to", hi}}));
    out.push_back(predicate("psi.negative_from_5", neg, json{{"from", lo}, {"to", hi}, {"first_bad", bad}}));
    if (index == 0) {
        const Real f = lemma_5_9_bound(1, 1, Real(1), Real(0), Real(0));
        out.push_back(predicate("lemma_5_9.f_gm1", f == 7, json{{"f", real_to_string(f)}}));
    }
    return out;
}

Records lemma_segre(const CampaignConfig& /*cfg*/, Rng& rng, json& inst) {
    Caps caps;
    caps.blocks = 2;
    caps.block_dim = 3;
    MultiplicativeGroupModel G;
    const int p = static_cast<int>(rng.uniform_int(1, 2));
    for (int l = 0; l < p; ++l) G.n.push_back(static_cast<int>(rng.uniform_int(1, 3)));
    const auto delta = generate_degrees(rng, G, 4);
    const auto sv = SegreVeroneseMap::make(G.n, delta);
    const Poly P = generate_multiform(rng, G.x_vars(), G.form_blocks(), delta, 9, 8);
    inst = json{{"n", G.n}, {"delta", delta}, {"P", poly_to_json(P)}};
    Records out;
    out.push_back(predicate("segre.card_formula", Integer(static_cast<long>(sv.card())) == sv.card_formula(),
                            json{{"card", sv.card()}, {"formula", to_string(sv.card_formula())}}));
    const auto L = sv.linear_form(P);
    bool ok = true;
    for (int k = 0; k < 20; ++k) {
        std::vector<Rational> x;
        for (int c = 0; c < G.coordinates(); ++c) x.push_back(ratio(rng.uniform_int(-7, 7), rng.uniform_int(1, 5)));
        ok = ok && SegreVeroneseMap::apply(L, sv.image(x)) == P.evaluate(x);
    }
    out.push_back(predicate("segre.round_trip", ok));
    out.push_back(predicate("segre.height_equal", (SegreVeroneseMap::height(L) - height_gauss_weil(P)).is_zero()));
    return out;
}

Records lemma_corollary(const CampaignConfig& /*cfg*/, Rng& rng, json& inst) {
    const long p = rng.uniform_int(1, 2);
    std::vector<long> n;
    std::vector<Rational> delta;
    long nn = 0;
    for (long l = 0; l < p; ++l) {
        n.push_back(rng.uniform_int(1, 3));
        nn += n.back();
        delta.push_back(Rational(rng.uniform_int(1, 40)));
    }
    const long b = rng.uniform_int(1, 5);
    const Rational eps = ratio(rng.uniform_int(1, b), b);
    const long dimV = rng.uniform_int(0, nn - 1);
    const Rational hx = ratio(rng.uniform_int(1, 50), rng.uniform_int(1, 50));
    const LogForm hP = LogForm::log_of(hx);
    inst = json{{"n", n}, {"eps", to_string(eps)}, {"delta", rationals_to_json(delta)}, {"dimV", dimV},
                {"hP", hP.to_string()}};
    const auto exact = corollary_bounds_exact(n, eps, delta, dimV, hP);
    BoundInputs in;
    std::vector<Real> nl, dl;
    for (long l = 0; l < p; ++l) nl.push_back(Real(n[l])), dl.push_back(to_real(delta[l]));
    in.set("p", Real(p)).set("eps", to_real(eps)).set("dimV", Real(dimV)).set("hP", hP.value());
    in.set("n_l", nl).set("delta_l", dl);
    const auto r = corollary_bounds(in);
    const Real tol = pow(Real(2), -static_cast<int>(precision_bits()) + 24) * (1 + abs(r.value("height_rhs")));
    Records out;
    out.push_back(le_real("corollary.degree_exact_vs_real", abs(r.value("degree_rhs") - to_real(exact.degree_rhs)),
                          tol, Real(0)));
    out.push_back(le_real("corollary.height_exact_vs_real", abs(r.value("height_rhs") - exact.height_rhs.value()),
                          tol, Real(0)));

    // Degree-ratio condition on sequences straddling the threshold.
    const Rational t = condition_1_33_threshold(2, nn, 1, eps, {1, 1});
    const Rational step = ratio(1, rng.uniform_int(1, 1000));
    std::vector<Rational> at{t, 1}, above{t + step, 1}, below{t - step, 1};
    const bool ok = !condition_1_33(at, nn, 1, eps, {1, 1})[0] && condition_1_33(above, nn, 1, eps, {1, 1})[0] &&
                    !condition_1_33(below, nn, 1, eps, {1, 1})[0];
    out.push_back(predicate("condition_1_33.straddle", ok, json{{"threshold", to_string(t)}}));
    return out;
}

}  // namespace

json run_instance(const CampaignConfig& cfg, const std::string& lemma, long index) {
    const std::uint64_t seed = Rng::derive(cfg.seed ^ fnv1a(lemma), static_cast<std::uint64_t>(index));
    Rng rng(seed);
    json rec{{"type", "instance"}, {"lemma", lemma}, {"index", index}, {"seed", seed}};
    json inst = json::object();
    try {
        Records checks;
        if (lemma == "1.1") checks = lemma_1_1(cfg, rng, inst, seed);
        else if (lemma == "heights") checks = lemma_heights(cfg, rng, inst, seed);
        else if (lemma == "2.1") checks = lemma_2_1(cfg, rng, inst);
        else if (lemma == "2.3") checks = lemma_2_3(cfg, rng, inst);
        else if (lemma == "2.5") checks = lemma_2_5(cfg, rng, inst);
        else if (lemma == "3.1") checks = lemma_3_1(cfg, rng, inst);
        else if (lemma == "4.8") checks = lemma_4_8(cfg, rng, inst);
        else if (lemma == "4.15") checks = lemma_4_15(cfg, rng, inst);
        else if (lemma == "4.16") checks = lemma_4_16(cfg, rng, inst);
        else if (lemma == "delta-identities") checks = lemma_delta(cfg, rng, inst);
        else if (lemma == "staircase-sum") checks = lemma_staircase(cfg, rng, inst);
        else if (lemma == "5.9-psi") checks = lemma_psi(cfg, index);
        else if (lemma == "segre-roundtrip") checks = lemma_segre(cfg, rng, inst);
        else if (lemma == "corollary-bounds") checks = lemma_corollary(cfg, rng, inst);
        else throw std::invalid_argument("unknown lemma: " + lemma);
        Verdict worst = Verdict::holds;
        json cs = json::array();
        for (const auto& c : checks) {
            if (c.verdict == Verdict::failed) worst = Verdict::failed;
            else if (c.verdict == Verdict::inconclusive && worst == Verdict::holds) worst = Verdict::inconclusive;
            cs.push_back(c.to_json());
        }
        rec["instance"] = inst;
        rec["checks"] = cs;
        rec["verdict"] = to_string(worst);
    } catch (const std::exception& e) {
        rec["instance"] = inst;
        rec["verdict"] = "error";
        rec["error"] = e.what();
    }
    return rec;
}

CampaignSummary run_campaign(const CampaignConfig& cfg, std::ostream& out) {
    cfg.validate();
    set_precision_bits(cfg.precision_bits);
    json head{{"type", "config"}, {"tool_version", kToolVersion}, {"config", cfg.to_json()}};
    out << head.dump() << "\n";
    CampaignSummary sum;
    for (const auto& lemma : cfg.lemmas) {
        const long count = lemma == "5.9-psi" ? std::min<long>(cfg.count, 51) : cfg.count;
        for (long i = 0; i < count; ++i) {
            json rec = run_instance(cfg, lemma, i);
            ++sum.instances;
            if (rec["verdict"] == "error") ++sum.errors;
            if (rec.contains("checks"))
                for (const auto& c : rec["checks"]) {
                    const std::string v = c["verdict"];
                    if (v == "holds") ++sum.tally.holds;
                    else if (v == "inconclusive") ++sum.tally.inconclusive;
                    else ++sum.tally.failed;
                }
            out << rec.dump() << "\n";
        }
    }
    out << sum.to_json().dump() << "\n";
    return sum;
}

}  // namespace hl
