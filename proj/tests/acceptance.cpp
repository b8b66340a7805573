// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include "heightlab/campaign.hpp"
#include "heightlab/json_io.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>

using namespace hl;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream info;
    void require(bool ok, const std::string& what) {
        if (!ok && pass) info << "first failure: " << what << "; ";
        pass = pass && ok;
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

oracle::Sparse to_sparse(const Poly& P) {
    oracle::Sparse out;
    for (const auto& [m, c] : P.terms()) out[m.to_index(P.nvars())] = c;
    return out;
}

long count_failed(const std::vector<CheckRecord>& rs) {
    long n = 0;
    for (const auto& r : rs) n += r.verdict == Verdict::failed;
    return n;
}

std::vector<Place> primes_to_13() { return relevant_places({2, 3, 5, 7, 11, 13}); }

std::vector<Place> merge(std::vector<Place> a, const std::vector<Place>& b) {
    std::set<Place> s(a.begin(), a.end());
    s.insert(b.begin(), b.end());
    return {s.begin(), s.end()};
}

// The shared pool for criteria 1-4: n <= 3, d <= 4, coefficients in [-5, 5].
const std::vector<ImplicitProblem>& implicit_pool() {
    static const std::vector<ImplicitProblem> pool = [] {
        Caps caps;
        caps.n = 3;
        caps.d = 4;
        caps.coef = 5;
        std::vector<ImplicitProblem> v;
        for (int k = 0; k < 300; ++k) {
            Rng rng(Rng::derive(2024, k));
            v.push_back(generate_implicit(rng, caps));
        }
        return v;
    }();
    return pool;
}

constexpr int kOrder = 5;

void c1(Outcome& o) {
    const auto t0 = Clock::now();
    long mismatches = 0, coefficients = 0, oracle_checked = 0;
    for (const auto& pb : implicit_pool()) {
        CofactorRecursion rec(pb);
        const auto a = rec.table(kOrder);
        const auto b = solve_series_at_point(pb, kOrder);
        for (const auto& [I, v] : a) {
            ++coefficients;
            mismatches += b.at(I) != v;
        }
        if (pb.n() == 1) {
            auto fixed = oracle::implicit_taylor(to_sparse(pb.P), pb.y, pb.t, kOrder);
            for (const auto& [I, v] : a) mismatches += fixed[I] != v;
            ++oracle_checked;
        }
    }
    const double s = seconds_since(t0);
    o.require(implicit_pool().size() >= 300, "instance count");
    o.require(mismatches == 0, std::to_string(mismatches) + " mismatching coefficients");
    o.require(s <= 60, "runtime");
    o.info << implicit_pool().size() << " problems, " << coefficients << " coefficients, " << oracle_checked
           << " also against the fixed-point oracle, " << s << " s";
}

void c2(Outcome& o) {
    long checks = 0, failed = 0;
    for (const auto& pb : implicit_pool()) {
        CofactorRecursion rec(pb);
        const auto rs = verify_lemma_2_1(rec, kOrder);
        checks += static_cast<long>(rs.size());
        failed += count_failed(rs);
    }
    o.require(failed == 0, std::to_string(failed) + " failed checks");
    o.info << checks << " exact degree/length comparisons, " << failed << " failed";
}

void c3(Outcome& o) {
    const auto t0 = Clock::now();
    long checks = 0, failed = 0, identity = 0;
    for (const auto& pb : implicit_pool()) {
        CofactorRecursion rec(pb);
        const auto sol = solve_series(pb, kOrder, false);
        const auto rs = verify_denominator_bounds(pb, sol, &rec, 2);
        checks += static_cast<long>(rs.size());
        failed += count_failed(rs);
        identity += !defining_identity_holds(pb, sol);
    }
    o.require(failed == 0, std::to_string(failed) + " failed checks");
    o.require(identity == 0, "defining identity");
    o.info << checks << " slice checks up to order " << kOrder << ", " << failed << " failed, " << seconds_since(t0)
           << " s";
}

void c4(Outcome& o) {
    long checks = 0, failed = 0, inconclusive = 0, bad_inconclusive = 0;
    for (const auto& pb : implicit_pool()) {
        CofactorRecursion rec(pb);
        const auto rs = verify_lemma_2_5(pb, rec.table(kOrder), kOrder, merge(lemma_2_5_places(pb), primes_to_13()));
        checks += static_cast<long>(rs.size());
        failed += count_failed(rs);
        for (const auto& r : rs)
            if (r.verdict == Verdict::inconclusive) {
                ++inconclusive;
                const bool at_inf = r.detail.value("place", std::string("inf")) == "inf";
                bad_inconclusive += !(at_inf && std::abs(std::stod(r.margin)) <= 1e-9);
            }
    }
    o.require(failed == 0, std::to_string(failed) + " FAILED");
    o.require(bad_inconclusive == 0, "inconclusive outside the allowed band");
    o.info << checks << " checks, " << failed << " FAILED, " << inconclusive << " inconclusive";
}

Poly random_poly(std::mt19937_64& gen, const std::vector<std::string>& vars, int deg, int box) {
    std::uniform_int_distribution<int> c(-box, box);
    std::vector<Poly::Term> ts;
    for (const auto& I : indices_up_to(static_cast<int>(vars.size()), deg)) ts.emplace_back(Mono::from(I), c(gen));
    return Poly::from_terms(vars, ts);
}

void c5(Outcome& o) {
    const auto t0 = Clock::now();
    MeasureOptions opt;
    opt.points_per_dim = 256;
    opt.torus_rule = "jensen";
    opt.target_err = 1e-4;
    std::mt19937_64 gen(55);
    long uni = 0, bi = 0, failed = 0, inconclusive = 0;
    double worst_err = 0, worst_eig = 0;
    while (uni < 200) {
        const int d = 1 + static_cast<int>(gen() % 8);
        Poly P = random_poly(gen, {"X"}, d, 20);
        if (P.total_degree() < 1) continue;
        ++uni;
        // companion-matrix oracle for the exact Mahler measure
        std::vector<double> co(P.total_degree() + 1, 0.0);
        for (const auto& [m, c] : P.terms()) co[m.e[0]] = c.get_d();
        const auto e = log_mahler(P, opt);
        worst_eig = std::max(worst_eig, std::abs(to_double(e.value) - oracle::log_mahler_companion(co)));
        for (auto which : {Comparison::eq_1_7, Comparison::l2_chain}) {
            const auto rs = check_comparison(P, which, opt);
            failed += count_failed(rs);
            for (const auto& r : rs) inconclusive += r.verdict == Verdict::inconclusive;
        }
    }
    while (bi < 50) {
        Poly P = random_poly(gen, {"X1", "X2"}, 1 + static_cast<int>(gen() % 3), 9);
        if (P.total_degree() < 1) continue;
        ++bi;
        const auto e = log_mahler(P, opt);
        worst_err = std::max(worst_err, to_double(e.err));
        for (auto which : {Comparison::eq_1_7, Comparison::l2_chain}) {
            const auto rs = check_comparison(P, which, opt);
            failed += count_failed(rs);
            for (const auto& r : rs) inconclusive += r.verdict == Verdict::inconclusive;
        }
    }
    const double s = seconds_since(t0);
    o.require(failed == 0, std::to_string(failed) + " FAILED");
    o.require(inconclusive == 0, std::to_string(inconclusive) + " inside error bars");
    o.require(worst_err <= 1e-4, "bivariate error bar");
    o.require(worst_eig < 1e-8, "companion oracle");
    o.require(s <= 120, "runtime");
    o.info << uni << " univariate + " << bi << " bivariate, worst bivariate error bar " << worst_err
           << ", worst companion deviation " << worst_eig << ", " << s << " s";
}

void c6(Outcome& o) {
    MeasureOptions opt;
    opt.points_per_dim = 256;
    opt.torus_rule = "jensen";
    std::mt19937_64 gen(66);
    std::uniform_int_distribution<int> c(-9, 9), deg(1, 5), sc(1, 40);
    long failed = 0, scaling = 0, n19 = 0, n20 = 0;
    for (int k = 0; k < 200; ++k) {
        const int d = deg(gen);
        std::vector<Poly::Term> ts;
        for (int i = 0; i <= d; ++i) ts.emplace_back(Mono::from({i, d - i}), c(gen));
        Poly P = Poly::from_terms({"X0", "X1"}, ts);
        if (P.is_zero()) P = Poly::from_terms({"X0", "X1"}, {{Mono::from({d, 0}), 1}});
        failed += count_failed(check_comparison(P, Comparison::eq_1_19, opt));
        failed += count_failed(check_comparison(P, Comparison::eq_1_20, opt));
        ++n19, ++n20;
        const Rational s = ratio(sc(gen) * (gen() % 2 ? 1 : -1), sc(gen));
        const Poly sP = P * s;
        scaling += !(height_gauss_weil(sP) - height_gauss_weil(P)).is_zero();
        for (const auto& v : relevant_places({2, 3, 5, 7, s}))
            if (!v.is_infinite()) {
                // finite places: M~_v(sP) = |s|_v M~_v(P), exactly
                scaling += gauss_weil_measure_v(sP, v) != abs_v(s, v) * gauss_weil_measure_v(P, v);
            }
        const auto a = height_mahler(P, opt), b = height_mahler(sP, opt);
        scaling += abs(a.value - b.value) > a.err + b.err + Real(1e-30);
        const auto u = height_unitary(P, {2}, opt), w = height_unitary(sP, {2}, opt);
        scaling += abs(u.value - w.value) > u.err + w.err + Real(1e-30);
    }
    long nonzero = 0;
    for (int k = 0; k < 1000; ++k) {
        std::uniform_int_distribution<long> big(-1000000, 1000000);
        long num = big(gen), den = std::abs(big(gen)) + 1;
        if (num == 0) num = 1;
        nonzero += product_formula_check(ratio(num, den)) != 0;
    }
    o.require(failed == 0, std::to_string(failed) + " FAILED relations");
    o.require(scaling == 0, std::to_string(scaling) + " scaling violations");
    o.require(nonzero == 0, "product formula");
    o.info << n19 << " + " << n20 << " instances, scaling exact at finite places, product formula 0 on 1000 rationals";
}

void c7(Outcome& o) {
    const auto tab = psi_table(10000);
    long le1 = 0, neg = 0, drift = 0;
    for (long n = 0; n <= 10000; ++n) {
        le1 += !(tab[n] <= 1);
        if (n >= 5) neg += !(tab[n] < 0);
        // independent harmonic sum in long double
        const long double ref = (n + 1) * std::log(2.0L) - oracle::projective_space_height(n);
        drift += std::abs(to_double(tab[n]) - static_cast<double>(ref)) > 1e-9 * (1 + std::abs(static_cast<double>(ref)));
    }
    const Real f = lemma_5_9_bound(1, 1, Real(1), Real(0), Real(0));
    o.require(le1 == 0, "psi <= 1");
    o.require(neg == 0, "psi < 0 from 5");
    o.require(drift == 0, "harmonic oracle");
    o.require(f == 7, "f(1, G_m, e)");
    o.info << "n <= 10000, psi(10000) = " << to_double(tab[10000]) << ", f = " << to_double(f);
}

MultiplicativeGroupModel small_model(Rng& rng) {
    MultiplicativeGroupModel G;
    const int p = static_cast<int>(rng.uniform_int(1, 2));
    for (int l = 0; l < p; ++l) G.n.push_back(static_cast<int>(rng.uniform_int(1, 2)));
    return G;
}

std::vector<long> small_degrees(Rng& rng, const MultiplicativeGroupModel& G, long hi) {
    std::vector<long> d;
    for (std::size_t l = 0; l < G.n.size(); ++l) d.push_back(rng.uniform_int(1, hi));
    return d;
}

// All (I, J) with |I| + |J| <= total.
void index_pairs(int g, int total, const std::function<void(const MultiIndex&, const MultiIndex&)>& f) {
    const auto all = indices_up_to(2 * g, total);
    for (const auto& K : all) f(MultiIndex(K.begin(), K.begin() + g), MultiIndex(K.begin() + g, K.end()));
}

void c8(Outcome& o) {
    long closed = 0, expansion = 0, ident = 0, comp_pairs = 0, comp_bad = 0;
    for (int k = 0; k < 300; ++k) {
        Rng rng(Rng::derive(88, k));
        const auto G = small_model(rng);
        const auto dp = small_degrees(rng, G, 3), dq = small_degrees(rng, G, 3);
        const Poly P = generate_multiform(rng, G.x_vars(), G.form_blocks(), dp, 6, 8);
        const Poly Q = generate_multiform(rng, G.x_vars(), G.form_blocks(), dq, 6, 8);
        const Poly R = generate_multiform(rng, G.x_vars(), G.form_blocks(), dp, 6, 8);
        MultiIndex I(G.g(), 0);
        for (auto& x : I) x = static_cast<int>(rng.uniform_int(0, 2));
        const Poly a = delta_operator(G, P, I);
        closed += a != delta_closed_form(G, P, I);
        expansion += to_sparse(a) != oracle::delta_by_expansion(to_sparse(P), G.n, I);
        ident += count_failed(verify_delta_identities(G, P, Q, I));
        ident += count_failed(verify_delta_identities(G, P, R, I));
    }
    const MultiplicativeGroupModel Gm{{1}};
    const Poly S = parse_poly_text("X1^2 - 2*X0*X1 + X0^2", Gm.x_vars());
    const bool triple = delta_operator(Gm, S, {0}) == parse_poly_text("(Y1 - Y0)^2", Gm.y_vars()) &&
                        delta_operator(Gm, S, {1}) == parse_poly_text("2*Y1*(Y1 - Y0)", Gm.y_vars()) &&
                        delta_operator(Gm, S, {2}) == parse_poly_text("Y1^2", Gm.y_vars());
    for (int k = 0; k < 100; ++k) {
        Rng rng(Rng::derive(89, k));
        const auto G = small_model(rng);
        const Poly P = generate_multiform(rng, G.x_vars(), G.form_blocks(), small_degrees(rng, G, 3), 6, 6);
        index_pairs(G.g(), 4, [&](const MultiIndex& I, const MultiIndex& J) {
            const auto cc = delta_composition_membership(G, P, I, J);
            ++comp_pairs;
            comp_bad += !(cc.constants_ok && cc.identity_ok);
        });
    }
    o.require(closed == 0, "closed form vs substitution");
    o.require(expansion == 0, "literal expansion oracle");
    o.require(ident == 0, "additivity / product identities");
    o.require(triple, "worked triple");
    o.require(comp_bad == 0, "composition constants");
    o.info << "300 seeds closed form and expansion oracle, worked triple, " << comp_pairs
           << " composition pairs on 100 seeds";
}

void c9(Outcome& o) {
    long cards = 0, card_bad = 0;
    for (int n1 = 1; n1 <= 6; ++n1)
        for (int d1 = 1; d1 <= 6; ++d1) {
            const auto s = SegreVeroneseMap::make({n1}, {d1});
            ++cards;
            card_bad += static_cast<long>(s.card()) != oracle::count_degree(n1 + 1, d1) ||
                        s.card_formula() != Integer(oracle::count_degree(n1 + 1, d1));
            for (int n2 = 1; n2 <= 6; ++n2)
                for (int d2 = 1; d2 <= 6; ++d2) {
                    const auto t = SegreVeroneseMap::make({n1, n2}, {d1, d2});
                    const long want = oracle::count_degree(n1 + 1, d1) * oracle::count_degree(n2 + 1, d2);
                    ++cards;
                    card_bad += static_cast<long>(t.card()) != want || t.card_formula() != Integer(want);
                }
        }
    long trips = 0, trip_bad = 0, height_bad = 0;
    for (int k = 0; k < 100; ++k) {
        Rng rng(Rng::derive(99, k));
        MultiplicativeGroupModel G;
        const int p = static_cast<int>(rng.uniform_int(1, 2));
        for (int l = 0; l < p; ++l) G.n.push_back(static_cast<int>(rng.uniform_int(1, 3)));
        const auto delta = small_degrees(rng, G, 4);
        const auto sv = SegreVeroneseMap::make(G.n, delta);
        const Poly P = generate_multiform(rng, G.x_vars(), G.form_blocks(), delta, 9, 8);
        const auto L = sv.linear_form(P);
        for (int j = 0; j < 20; ++j) {
            std::vector<Rational> x;
            for (int c = 0; c < G.coordinates(); ++c) x.push_back(ratio(rng.uniform_int(-7, 7), rng.uniform_int(1, 5)));
            ++trips;
            trip_bad += SegreVeroneseMap::apply(L, sv.image(x)) != P.evaluate(x);
        }
        height_bad += !(SegreVeroneseMap::height(L) - height_gauss_weil(P)).is_zero();
    }
    o.require(card_bad == 0, "card formula");
    o.require(trip_bad == 0, "round trip");
    o.require(height_bad == 0, "height equality");
    o.info << cards << " (n, delta) shapes, " << trips << " round trips on 100 instances";
}

std::vector<oracle::Q> to_q(const std::vector<Rational>& xs) { return {xs.begin(), xs.end()}; }

void c10(Outcome& o) {
    const auto W = enumerate(SimplexStaircase{{3, 2}, 1, {1, 1}});
    const std::vector<MultiIndex> listed{{0, 0}, {0, 1}, {1, 0}, {1, 1}, {2, 0}};
    o.require(std::vector<MultiIndex>(W.members().begin(), W.members().end()) == listed, "W((3,2),1)");
    long sub_bad = 0, dilate_bad = 0, strict = 0, counterexamples = 0, vol_bad = 0;
    double worst_vol = 0;
    for (int k = 0; k < 50; ++k) {
        Rng rng(Rng::derive(1010, k));
        auto A = generate_staircase(rng, Caps{});
        SimplexStaircase B = A;
        const long b = rng.uniform_int(1, 6);
        B.epsilon = ratio(rng.uniform_int(1, b), b);
        // W(delta, e1) + W(delta, e2) inside W(delta, e1 + e2), target by brute force
        const auto sum = minkowski_sum(enumerate(A), enumerate(B));
        const auto target = oracle::staircase_brute(to_q(A.delta), A.epsilon + B.epsilon, A.blocks);
        const std::set<MultiIndex> tset(target.begin(), target.end());
        for (const auto& x : sum.members()) sub_bad += !tset.count(x);
        // both directions of the g-fold sum against the g-dilate
        const auto cmp = compare_sum_with_dilate(A, A.arity());
        dilate_bad += !cmp.sum_in_target();
        strict += !cmp.target_in_sum();
        counterexamples += static_cast<long>(cmp.only_in_target.size());
        std::vector<int> axes;
        for (int j = 0; j < A.arity() && axes.size() < 3; ++j) axes.push_back(j);
        const double exact = multiplicity_volume(A, axes).get_d();
        const double rel = std::abs(lattice_volume(A, axes, 64) - exact) / exact;
        worst_vol = std::max(worst_vol, rel);
        vol_bad += rel >= 0.01;
    }
    o.require(sub_bad == 0, "subadditivity");
    o.require(dilate_bad == 0, "sum inside dilate");
    o.require(vol_bad == 0, "volume vs lattice");
    o.info << "50 instances; reverse inclusion strict on " << strict << " (" << counterexamples
           << " counterexamples reported); worst volume deviation " << worst_vol;
}

void c11(Outcome& o) {
    BoundInputs in;
    in.set("p", Real(1)).set("eps", Real(1)).set("dimV", Real(0)).set("hP", Real(0));
    in.set("n_l", std::vector<Real>{Real(1)}).set("delta_l", std::vector<Real>{Real(2)});
    const auto r = corollary_bounds(in);
    const auto ex = corollary_bounds_exact({1}, 1, {2}, 0, LogForm{});
    o.require(r.value("degree_rhs") == 1 && ex.degree_rhs == 1, "degree RHS");
    o.require(abs(r.value("height_rhs") - 108) < Real(1e-30) && (ex.height_rhs - LogForm::from_constant(108)).is_zero(),
              "height RHS");
    // threshold (p c' / eps)^g prod d(G_l) with p = 2, g = 2, c' = 1, eps = 1/2 is 16
    const Rational t = condition_1_33_threshold(2, 2, 1, ratio(1, 2), {1, 1});
    o.require(t == 16, "threshold");
    const Rational t3 = condition_1_33_threshold(3, 2, 1, ratio(1, 2), {1, 1, 1});
    o.require(t3 == 36, "threshold with three blocks");
    long wrong = 0;
    for (long k = 1; k <= 50; ++k) {
        const Rational h = ratio(1, k);
        wrong += condition_1_33({t + h, 1}, 2, 1, ratio(1, 2), {1, 1}) != std::vector<bool>{true};
        wrong += condition_1_33({t, 1}, 2, 1, ratio(1, 2), {1, 1}) != std::vector<bool>{false};
        wrong += condition_1_33({t - h, 1}, 2, 1, ratio(1, 2), {1, 1}) != std::vector<bool>{false};
        // a three-step sequence: first ratio above, second below
        wrong += condition_1_33({(t3 + h) * (t3 - h), t3 - h, 1}, 2, 1, ratio(1, 2), {1, 1, 1}) !=
                 std::vector<bool>{true, false};
    }
    o.require(wrong == 0, "straddle");
    o.info << "degree " << to_double(r.value("degree_rhs")) << ", height " << to_double(r.value("height_rhs"))
           << ", 200 straddling sequences";
}

}  // namespace

int main() {
    set_precision_bits(128);
    const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
        {"implicit oracle equivalence", c1},
        {"cofactor degree and length bounds", c2},
        {"series denominators", c3},
        {"local and height bounds at all places", c4},
        {"Mahler, Gauss-Weil and L2 comparisons", c5},
        {"height relations, scaling, product formula", c6},
        {"psi suite", c7},
        {"Delta operator suite", c8},
        {"Segre-Veronese", c9},
        {"staircases", c10},
        {"bound evaluators", c11},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            criteria[i].second(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.info << "exception: " << e.what();
        }
        failed += !o.pass;
        std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    o.info.str().c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
