#pragma once

#include "heightlab/arith.hpp"
#include "heightlab/certify.hpp"
#include "heightlab/poly.hpp"

#include <set>
#include <vector>

namespace hl {

// A finite lower set of N^g, with the coordinates grouped in blocks g_1 + ... + g_p = g.
class Staircase {
public:
    Staircase() = default;
    // Throws std::invalid_argument unless members form a lower set (and blocks sum to g).
    Staircase(std::vector<int> blocks, std::set<MultiIndex> members);

    int arity() const { return g_; }
    const std::vector<int>& blocks() const { return blocks_; }
    const std::set<MultiIndex>& members() const { return members_; }
    std::size_t size() const { return members_.size(); }
    bool contains(const MultiIndex& I) const { return members_.count(I) != 0; }
    bool empty() const { return members_.empty(); }

    // Block lengths t_l(I).
    std::vector<long> block_lengths(const MultiIndex& I) const;

    json to_json() const;

private:
    int g_ = 0;
    std::vector<int> blocks_;
    std::set<MultiIndex> members_;
};

bool is_lower_set(const std::set<MultiIndex>& members);

// W(delta, eps) = {alpha : sum_l |alpha_l| / delta_l < eps}.
struct SimplexStaircase {
    std::vector<Rational> delta;
    Rational epsilon;
    std::vector<int> blocks;

    void validate() const;
    int arity() const;
    bool contains(const MultiIndex& I) const;
    json to_json() const;
};

constexpr std::size_t kStaircaseCap = 10000000;

Staircase enumerate(const SimplexStaircase& W, std::size_t cap = kStaircaseCap);
Staircase minkowski_sum(const Staircase& A, const Staircase& B);
// {0} in the given blocks.
Staircase origin_staircase(const std::vector<int>& blocks);

struct Functionals {
    std::vector<long> t;  // t_l(W)
    long H = 0;           // max |I|
    bool lengths_add_up = true;
    json to_json() const;
};
Functionals functionals(const Staircase& W);

// Vol{x in R_+^k : sum_j x_j / delta_{block(j)} < eps} = eps^k prod delta_{block(j)} / k!.
Rational multiplicity_volume(const SimplexStaircase& W, const std::vector<int>& axes);
// k! * volume.
Rational multiplicity_value(const SimplexStaircase& W, const std::vector<int>& axes);
// Midpoint lattice count at `refinement` points per axis over the bounding box.
double lattice_volume(const SimplexStaircase& W, const std::vector<int>& axes, int refinement = 64);

// W_0 + W_1 + ... + W_r with W_0 = {0}, W_i = W(delta, eps), compared with W(delta, r eps).
struct SumComparison {
    std::size_t sum_size = 0, target_size = 0;
    std::vector<MultiIndex> only_in_sum;     // violations of the inclusion sum in target
    std::vector<MultiIndex> only_in_target;  // strictness counterexamples to the reverse inclusion
    bool sum_in_target() const { return only_in_sum.empty(); }
    bool target_in_sum() const { return only_in_target.empty(); }
    json to_json() const;
};
SumComparison compare_sum_with_dilate(const SimplexStaircase& W, int r);

}  // namespace hl
