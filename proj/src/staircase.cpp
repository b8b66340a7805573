#include "heightlab/staircase.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace hl {

namespace {

int check_blocks(const std::vector<int>& blocks) {
    int g = 0;
    for (int b : blocks) {
        if (b <= 0) throw std::invalid_argument("block sizes must be positive");
        g += b;
    }
    if (g > kMaxVars) throw std::invalid_argument("staircase arity exceeds 16");
    return g;
}

std::vector<int> block_of_axis(const std::vector<int>& blocks) {
    std::vector<int> out;
    for (std::size_t l = 0; l < blocks.size(); ++l)
        for (int i = 0; i < blocks[l]; ++i) out.push_back(static_cast<int>(l));
    return out;
}

}  // namespace

bool is_lower_set(const std::set<MultiIndex>& members) {
    for (const auto& I : members) {
        MultiIndex J = I;
        for (std::size_t k = 0; k < I.size(); ++k) {
            if (I[k] == 0) continue;
            --J[k];
            bool in = members.count(J) != 0;
            ++J[k];
            if (!in) return false;
        }
    }
    return true;
}

Staircase::Staircase(std::vector<int> blocks, std::set<MultiIndex> members)
    : g_(check_blocks(blocks)), blocks_(std::move(blocks)), members_(std::move(members)) {
    for (const auto& I : members_) {
        if (static_cast<int>(I.size()) != g_) throw std::invalid_argument("member arity differs from the blocks");
        for (int x : I)
            if (x < 0) throw std::invalid_argument("negative exponent in staircase");
    }
    if (!is_lower_set(members_)) throw std::invalid_argument("members do not form a lower set");
}

std::vector<long> Staircase::block_lengths(const MultiIndex& I) const {
    std::vector<long> t(blocks_.size(), 0);
    int k = 0;
    for (std::size_t l = 0; l < blocks_.size(); ++l)
        for (int i = 0; i < blocks_[l]; ++i) t[l] += I[k++];
    return t;
}

json Staircase::to_json() const {
    json j;
    j["blocks"] = blocks_;
    j["cardinality"] = members_.size();
    json m = json::array();
    for (const auto& I : members_) m.push_back(I);
    j["members"] = m;
    return j;
}

// ---- simplex staircases -------------------------------------------------------------

void SimplexStaircase::validate() const {
    check_blocks(blocks);
    if (delta.size() != blocks.size()) throw std::invalid_argument("need one delta per block");
    for (const auto& d : delta)
        if (d <= 0) throw std::invalid_argument("delta must be positive");
    if (epsilon <= 0) throw std::invalid_argument("epsilon must be positive");
}

int SimplexStaircase::arity() const {
    int g = 0;
    for (int b : blocks) g += b;
    return g;
}

bool SimplexStaircase::contains(const MultiIndex& I) const {
    Rational w = 0;
    int k = 0;
    for (std::size_t l = 0; l < blocks.size(); ++l) {
        long len = 0;
        for (int i = 0; i < blocks[l]; ++i) {
            if (I[k] < 0) return false;
            len += I[k++];
        }
        w += Rational(len) / delta[l];
    }
    return w < epsilon;
}

json SimplexStaircase::to_json() const {
    json j;
    json d = json::array();
    for (const auto& x : delta) d.push_back(to_string(x));
    j["delta"] = d;
    j["epsilon"] = to_string(epsilon);
    j["blocks"] = blocks;
    return j;
}

Staircase enumerate(const SimplexStaircase& W, std::size_t cap) {
    W.validate();
    const std::size_t p = W.blocks.size();
    // Block-length tuples (L_1..L_p) with sum L_l / delta_l < eps, exact.
    std::vector<std::vector<long>> tuples;
    std::vector<long> L(p, 0);
    std::function<void(std::size_t, const Rational&)> rec = [&](std::size_t l, const Rational& used) {
        if (l == p) {
            tuples.push_back(L);
            return;
        }
        for (long v = 0;; ++v) {
            Rational w = used + Rational(v) / W.delta[l];
            if (!(w < W.epsilon)) break;
            L[l] = v;
            rec(l + 1, w);
        }
        L[l] = 0;
    };
    rec(0, Rational(0));

    std::size_t count = 0;
    for (const auto& t : tuples) {
        Integer c = 1;
        for (std::size_t l = 0; l < p; ++l) c *= binomial(t[l] + W.blocks[l] - 1, W.blocks[l] - 1);
        if (c > Integer(static_cast<unsigned long>(cap))) throw std::length_error("staircase exceeds the member cap");
        count += c.get_ui();
        if (count > cap) throw std::length_error("staircase exceeds the member cap");
    }

    std::set<MultiIndex> members;
    const int g = W.arity();
    MultiIndex I(g, 0);
    for (const auto& t : tuples) {
        // all splittings of each block length into its coordinates
        std::function<void(std::size_t, int)> fill_block = [&](std::size_t l, int offset) {
            if (l == p) {
                members.insert(I);
                return;
            }
            std::function<void(int, long)> comp = [&](int i, long left) {
                if (i == W.blocks[l] - 1) {
                    I[offset + i] = static_cast<int>(left);
                    fill_block(l + 1, offset + W.blocks[l]);
                    return;
                }
                for (long v = left; v >= 0; --v) {
                    I[offset + i] = static_cast<int>(v);
                    comp(i + 1, left - v);
                }
            };
            comp(0, t[l]);
        };
        fill_block(0, 0);
    }
    return Staircase(W.blocks, std::move(members));
}

Staircase origin_staircase(const std::vector<int>& blocks) {
    int g = check_blocks(blocks);
    return Staircase(blocks, {MultiIndex(g, 0)});
}

Staircase minkowski_sum(const Staircase& A, const Staircase& B) {
    if (A.blocks() != B.blocks()) throw std::invalid_argument("staircase arity or blocks differ");
    std::set<MultiIndex> out;
    for (const auto& a : A.members())
        for (const auto& b : B.members()) {
            MultiIndex c = a;
            for (std::size_t k = 0; k < c.size(); ++k) c[k] += b[k];
            out.insert(std::move(c));
        }
    if (!is_lower_set(out)) throw std::logic_error("Minkowski sum of lower sets is not a lower set");
    return Staircase(A.blocks(), std::move(out));
}

json Functionals::to_json() const { return json{{"t", t}, {"H", H}, {"lengths_add_up", lengths_add_up}}; }

Functionals functionals(const Staircase& W) {
    if (W.empty()) throw std::invalid_argument("functionals of an empty staircase");
    Functionals f;
    f.t.assign(W.blocks().size(), 0);
    for (const auto& I : W.members()) {
        auto t = W.block_lengths(I);
        long total = 0, sum_t = 0;
        for (int x : I) total += x;
        for (std::size_t l = 0; l < t.size(); ++l) {
            f.t[l] = std::max(f.t[l], t[l]);
            sum_t += t[l];
        }
        if (sum_t != total) f.lengths_add_up = false;
        f.H = std::max(f.H, total);
    }
    return f;
}

// ---- volumes ------------------------------------------------------------------------

namespace {

std::vector<Rational> axis_deltas(const SimplexStaircase& W, const std::vector<int>& axes) {
    W.validate();
    if (axes.empty()) throw std::invalid_argument("axis subset must be nonempty");
    auto blk = block_of_axis(W.blocks);
    std::vector<Rational> out;
    std::set<int> seen;
    for (int a : axes) {
        if (a < 0 || a >= static_cast<int>(blk.size())) throw std::invalid_argument("axis out of range");
        if (!seen.insert(a).second) throw std::invalid_argument("repeated axis");
        out.push_back(W.delta[blk[a]]);
    }
    return out;
}

}  // namespace

Rational multiplicity_volume(const SimplexStaircase& W, const std::vector<int>& axes) {
    auto ds = axis_deltas(W, axes);
    const long k = static_cast<long>(ds.size());
    Rational v = rpow(W.epsilon, k);
    for (const auto& d : ds) v *= d;
    return v / Rational(factorial(k));
}

Rational multiplicity_value(const SimplexStaircase& W, const std::vector<int>& axes) {
    return multiplicity_volume(W, axes) * Rational(factorial(static_cast<long>(axes.size())));
}

double lattice_volume(const SimplexStaircase& W, const std::vector<int>& axes, int refinement) {
    auto ds = axis_deltas(W, axes);
    if (refinement <= 0) throw std::invalid_argument("refinement must be positive");
    const int k = static_cast<int>(ds.size());
    // In units of eps*delta_j per axis the region is the open unit simplex. Midpoints are
    // counted in half-steps; a midpoint exactly on the face sum = 1 counts one half.
    const long full = 2L * refinement;
    std::function<double(int, long)> count = [&](int j, long used) -> double {
        if (j == k) return used < full ? 1.0 : 0.5;
        double c = 0;
        for (int i = 0; i < refinement; ++i) {
            long u = used + 2L * i + 1;
            if (u > full) break;
            c += count(j + 1, u);
        }
        return c;
    };
    double box = 1.0;
    for (const auto& d : ds) box *= Rational(W.epsilon * d).get_d();
    return box * count(0, 0) / std::pow(static_cast<double>(refinement), k);
}

json SumComparison::to_json() const {
    json a = json::array(), b = json::array();
    for (const auto& I : only_in_sum) a.push_back(I);
    for (const auto& I : only_in_target) b.push_back(I);
    return json{{"sum_size", sum_size},
                {"target_size", target_size},
                {"sum_in_target", sum_in_target()},
                {"target_in_sum", target_in_sum()},
                {"only_in_sum", a},
                {"only_in_target", b}};
}

SumComparison compare_sum_with_dilate(const SimplexStaircase& W, int r) {
    if (r < 1) throw std::invalid_argument("need at least one summand");
    Staircase base = enumerate(W);
    Staircase sum = origin_staircase(W.blocks);
    for (int i = 0; i < r; ++i) sum = minkowski_sum(sum, base);
    SimplexStaircase D = W;
    D.epsilon = W.epsilon * r;
    Staircase target = enumerate(D);
    SumComparison c;
    c.sum_size = sum.size();
    c.target_size = target.size();
    std::set_difference(sum.members().begin(), sum.members().end(), target.members().begin(),
                        target.members().end(), std::back_inserter(c.only_in_sum));
    std::set_difference(target.members().begin(), target.members().end(), sum.members().begin(),
                        sum.members().end(), std::back_inserter(c.only_in_target));
    return c;
}

}  // namespace hl
