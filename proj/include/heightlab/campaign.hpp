#pragma once

#include "heightlab/certify.hpp"
#include "heightlab/groupops.hpp"
#include "heightlab/implicit.hpp"
#include "heightlab/measures.hpp"
#include "heightlab/rng.hpp"
#include "heightlab/staircase.hpp"

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace hl {

constexpr long kRejectionBudget = 10000;

struct Caps {
    int n = 3;             // implicit: number of Y variables
    int d = 4;             // implicit: total degree
    int coef = 5;          // coefficient box [-coef, coef]
    int point = 2;         // base point box
    int order = 5;         // Taylor order for the implicit checks
    int terms = 12;        // random polynomials draw at most this many monomials
    int blocks = 2;        // G_m models: at most this many blocks
    int block_dim = 2;     // and block dimension
    int form_degree = 3;   // multiform degree per block
    int symbolic_order = 5;  // order of the symbolic series check
    void validate() const;
    json to_json() const;
    static Caps from_json(const json& j);
};

// ---- instances ----------------------------------------------------------------------

// P = Q - Q(x) with Q drawn sparse in [-coef, coef]; redrawn until deg P = deg Q, the constant stays
// in the box and P'_T(x) != 0. Throws std::runtime_error when the budget is exhausted.
ImplicitProblem generate_implicit(Rng& rng, const Caps& caps);
// Random sparse polynomial in nvars variables, total degree exactly d.
Poly generate_poly(Rng& rng, const std::vector<std::string>& vars, int d, int coef, int terms);
// Random form, homogeneous of degree delta_l in each block.
Poly generate_multiform(Rng& rng, const std::vector<std::string>& vars, const std::vector<int>& blocks,
                        const std::vector<long>& delta, int coef, int terms);
// delta in [1, 6], blocks of size 1..2, eps = a/b in (0, 1] with b <= 6.
SimplexStaircase generate_staircase(Rng& rng, const Caps& caps);
// One defining form per extra coordinate, normalized, through a random integral neutral point.
GroupChart generate_chart(Rng& rng, const Caps& caps);

struct MultiFormInstance {
    MultiplicativeGroupModel G;
    MultiForm F;
    std::vector<Rational> x;  // torus point where F vanishes
    json to_json() const;
};
// A form vanishing at a random torus point (one coefficient solved for).
MultiFormInstance generate_vanishing_multiform(Rng& rng, const Caps& caps);

// Kinds: implicit, staircase, chart, multiform, poly.
json generate_instance(const std::string& kind, std::uint64_t seed, const Caps& caps);

// ---- campaigns ----------------------------------------------------------------------

extern const std::vector<std::string> kAllLemmas;

struct CampaignConfig {
    std::uint64_t seed = 1;
    std::vector<std::string> lemmas;
    long count = 50;
    Caps caps;
    std::vector<Place> places;  // extra places for the v-adic checks
    unsigned precision_bits = 128;
    int quadrature_points = 256;  // per dimension, bivariate Mahler measures
    long mc_samples = 20000;      // Monte-Carlo unitary measures beyond binary forms

    void validate() const;
    json to_json() const;
    static CampaignConfig from_json(const json& j);
};

struct CampaignSummary {
    Tally tally;
    long instances = 0, errors = 0;
    int exit_code() const { return tally.failed > 0 ? 1 : 0; }
    json to_json() const;
};

// Checks for one instance of one lemma; module errors become an "error" record.
json run_instance(const CampaignConfig& cfg, const std::string& lemma, long index);
// JSON Lines: config line, one line per instance (in index order), summary line.
CampaignSummary run_campaign(const CampaignConfig& cfg, std::ostream& out);

}  // namespace hl
