#pragma once

#include "heightlab/arith.hpp"
#include "heightlab/certify.hpp"
#include "heightlab/implicit.hpp"
#include "heightlab/poly.hpp"
#include "heightlab/staircase.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace hl {

// G = G_m^{n_1} x ... x G_m^{n_p}, block l embedded in P_{n_l} by (x_1..x_n) -> (1 : x_1 : ... : x_n).
// The addition law is coordinatewise: A_l(X_l, Y_l) = (X_l0 Y_l0, ..., X_ln Y_ln), bidegree (1, 1).
struct MultiplicativeGroupModel {
    std::vector<int> n;  // n_l >= 1

    int p() const { return static_cast<int>(n.size()); }
    int g() const;                            // sum n_l
    int coordinates() const;                  // sum (n_l + 1)
    std::vector<int> form_blocks() const;     // n_l + 1 per block
    std::vector<int> tangent_blocks() const;  // n_l per block
    std::vector<std::string> x_vars() const;
    std::vector<std::string> y_vars() const;
    std::vector<std::string> t_vars() const;
    // Index into the coordinate list of X_{l,i}.
    int coordinate(int l, int i) const;

    int c() const { return 1; }
    int c_prime() const { return 1; }
    Rational degree(int /*l*/) const { return 1; }
    Rational height(int l) const { return height_projective_space(n.at(l)); }  // h(P_{n_l})
    void validate() const;
    json to_json() const;
};

// A form of multidegree delta on the model's coordinates (names are positional).
struct MultiForm {
    Poly P;
    std::vector<long> delta;

    // Throws unless P is nonzero and homogeneous of degree delta_l in block l.
    void validate(const MultiplicativeGroupModel& G) const;
    static MultiForm from_poly(const MultiplicativeGroupModel& G, Poly P);
};

// ---- Delta operators -------------------------------------------------------------------

// T^I coefficient of P(X*Y) after X_l0 -> 1, X_li -> 1 + T_li; result in the Y variables.
Poly delta_operator(const MultiplicativeGroupModel& G, const Poly& P, const MultiIndex& I);
// The same for several I from one expansion.
std::map<MultiIndex, Poly> delta_family(const MultiplicativeGroupModel& G, const Poly& P,
                                        const std::vector<MultiIndex>& Is);
// sum_j c_j prod binom(j_li, I_li) Y^j.
Poly delta_closed_form(const MultiplicativeGroupModel& G, const Poly& P, const MultiIndex& I);

// Additivity (when P and Q share a multidegree) and the product rule, exact.
std::vector<CheckRecord> verify_delta_identities(const MultiplicativeGroupModel& G, const Poly& P, const Poly& Q,
                                                 const MultiIndex& I);

struct VanishingResult {
    bool vanishes = true;
    std::vector<MultiIndex> witnesses;  // I in W with (Delta^I P)(x) != 0
    json to_json() const;
};
// x: all coordinates, block by block; must be nonzero.
VanishingResult vanishing_multiplicity_check(const MultiplicativeGroupModel& G, const Poly& P,
                                             const std::vector<Rational>& x, const Staircase& W);
// Taylor coefficients of P(x_l0, x_l1 (1 + T_l1), ...) at every I in W.
VanishingResult vanishing_by_taylor(const MultiplicativeGroupModel& G, const Poly& P, const std::vector<Rational>& x,
                                    const Staircase& W);

struct CompositionConstants {
    std::map<MultiIndex, Rational> c;  // nonzero c_L only
    bool constants_ok = false;         // binom(j,I) binom(j,J) = sum_L c_L binom(j,L) on the box j <= I+J
    bool identity_ok = false;          // Delta^I Delta^J P = sum_L c_L Delta^L P
    json to_json() const;
};
CompositionConstants delta_composition_membership(const MultiplicativeGroupModel& G, const Poly& P,
                                                  const MultiIndex& I, const MultiIndex& J);

// ---- parametrization data and coefficient tables ----------------------------------------

// Series phi(X_i) = sum_I a_I^(i) T^I for i = 0..N, with the constants of the coefficient bound
//   |a_I^(i)|_v <= s_v^{sum g_l delta_l} prod E_{l,v}^{t_l(I)} prod H_v(e_l)^{delta_l}.
struct Parametrization {
    int g = 0;
    std::vector<int> g_blocks;  // t_l(I) = length of block l of I
    std::vector<long> delta;
    Rational s = 1;
    int order = 0;
    std::vector<TaylorTable> rows;
    std::vector<Place> places;                   // every place where some E_{l,v} or H_v(e_l) differs from 1
    std::map<Place, std::vector<Rational>> E_v;  // per block
    std::map<Place, std::vector<Rational>> He_v;

    int N() const { return static_cast<int>(rows.size()) - 1; }
    Rational E_at(const Place& v, int l) const;
    Rational He_at(const Place& v, int l) const;
    LogForm log_E(int l) const;  // log E_l = sum_v log E_{l,v}
    LogForm h_e(int l) const;    // h(e_l) = sum_v log H_v(e_l)
    std::vector<long> t(const MultiIndex& I) const;
};

// Segre-Veronese coordinates of the G_m model at multidegree delta: a_I^(alpha) = prod binom(alpha_li, I_li),
// with s = 2 and E_{l,v} = 1.
Parametrization gm_parametrization(const MultiplicativeGroupModel& G, const std::vector<long>& delta, int order);
// One-block chart: s = 1, delta = 1, E_v from the chart bound, e_1 = e.
Parametrization chart_parametrization(const GroupChart& chart, int order);

// Product of two truncated series in g variables.
TaylorTable series_product(const TaylorTable& a, const TaylorTable& b, int g, int order);
// phi(X^i) = prod phi(X_j)^{i_j} truncated at `order` (<= data.order).
TaylorTable coefficient_table_C(const Parametrization& data, const MultiIndex& i, int order);

// The coefficient hypothesis itself, per place and I.
std::vector<CheckRecord> verify_coefficient_hypothesis(const Parametrization& data);
// Local and global bounds on products a_{I_1}^(i_1)...a_{I_k}^(i_k) with t_l(sum I) <= m_l.
std::vector<CheckRecord> verify_product_bounds(const Parametrization& data, int k, const std::vector<long>& m);
// Local and global bounds on C(i, I), |i| = k, t_l(I) <= m_l.
std::vector<CheckRecord> verify_coefficient_table_bounds(const Parametrization& data, int k,
                                                         const std::vector<long>& m);

// ---- Segre-Veronese --------------------------------------------------------------------

struct SegreVeroneseMap {
    std::vector<int> n;
    std::vector<long> delta;
    std::vector<MultiIndex> index;  // concatenated exponents, graded-lex descending

    static SegreVeroneseMap make(std::vector<int> n, std::vector<long> delta);
    std::size_t card() const { return index.size(); }
    long N() const { return static_cast<long>(index.size()) - 1; }  // ambient P_N
    Integer card_formula() const;                                   // prod binom(n_l + delta_l, delta_l)
    std::vector<std::string> z_vars() const;
    std::vector<Rational> image(const std::vector<Rational>& x) const;
    // Coefficients of L_P, parallel to index; throws on a multidegree mismatch.
    std::vector<Rational> linear_form(const Poly& P) const;
    static Rational apply(const std::vector<Rational>& L, const std::vector<Rational>& z);
    // h~(L) = projective height of the nonzero coefficients.
    static LogForm height(const std::vector<Rational>& L);
    json to_json() const;
};

// ---- multidegree-preserving check and Delta-family height bound ------------------------------

// h~ of the family {Delta^I P : t_l(I) <= m_l} against its bound through the Segre-Veronese linear form.
std::vector<CheckRecord> verify_delta_height_bound(const MultiplicativeGroupModel& G, const MultiForm& F,
                                                   const std::vector<long>& m);

// ---- bound evaluators -------------------------------------------------------------------

// Named scalar and per-block inputs; lookups of absent names throw std::invalid_argument naming them.
struct BoundInputs {
    std::map<std::string, Real> scalars;
    std::map<std::string, std::vector<Real>> vectors;

    BoundInputs& set(const std::string& k, const Real& x) {
        scalars[k] = x;
        return *this;
    }
    BoundInputs& set(const std::string& k, std::vector<Real> x) {
        vectors[k] = std::move(x);
        return *this;
    }
    bool has(const std::string& k) const { return scalars.count(k) || vectors.count(k); }
    Real at(const std::string& k) const;
    const std::vector<Real>& vec(const std::string& k, std::size_t size) const;
    // Fills p, g, c, c', n_l, g_l, d(G_l), h(G_l), h(e_l), h~(A_l) (and deg G, h(G) when p = 1) from the model.
    static BoundInputs from_model(const MultiplicativeGroupModel& G);
};

struct BoundResult {
    std::string bound;
    std::vector<std::pair<std::string, Real>> values;
    std::vector<std::string> warnings;
    Real value(const std::string& k) const;
    json to_json() const;
};

// degG, delta, d, hG, g, eta.
BoundResult lemma_4_10_bounds(const BoundInputs& in);
// g, c, c', delta, N, hP, hA, s, p and per block E_l, m_l, delta_l, h_e_l, g_l.
BoundResult prop_4_16_bound(const BoundInputs& in);
// degG, g, d, c', delta only.
BoundResult thm_4_13_degree_bound(const BoundInputs& in);
// degG, hG, g, d, c, c', delta, N, hP, hA, s, p and per block E_l, t_l, delta_l, h_e_l, g_l.
BoundResult thm_4_13_bounds(const BoundInputs& in);
// degG, hG, g, d, c, c', delta, N, hP, hA, h_e, H.
BoundResult thm_5_17_bounds(const BoundInputs& in);
// p, g, c, c', eps, dimV, hP and per block delta_l, n_l, g_l, dG_l, hG_l, h_e_l, hA_l.
BoundResult thm_5_19_bounds(const BoundInputs& in);
// p, eps, dimV, hP and per block n_l, delta_l.
BoundResult corollary_bounds(const BoundInputs& in);

// The corollary with exact inputs: the degree side is rational and the height side a log form.
struct CorollaryExact {
    Rational degree_rhs;
    LogForm height_rhs;
};
CorollaryExact corollary_bounds_exact(const std::vector<long>& n, const Rational& eps,
                                      const std::vector<Rational>& delta, long dimV, const LogForm& hP);

// delta_l / delta_{l+1} > (p c'/eps)^g d(G_1)...d(G_p), one boolean per adjacent pair, exact.
std::vector<bool> condition_1_33(const std::vector<Rational>& delta, long g, const Rational& c_prime,
                                 const Rational& eps, const std::vector<Rational>& dG);
Rational condition_1_33_threshold(long p, long g, const Rational& c_prime, const Rational& eps,
                                  const std::vector<Rational>& dG);

}  // namespace hl
