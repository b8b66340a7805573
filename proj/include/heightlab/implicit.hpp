#pragma once

#include "heightlab/certify.hpp"
#include "heightlab/poly.hpp"
#include "heightlab/series.hpp"

#include <map>
#include <memory>
#include <vector>

namespace hl {

// P(Y_1..Y_n, T) with T the last variable, and a base point x = (y, t) on P = 0.
struct ImplicitProblem {
    Poly P;
    std::vector<Rational> y;
    Rational t;
    long d = -1;  // declared total-degree bound; -1 means total_degree(P)

    int n() const { return P.nvars() - 1; }
    long degree_bound() const { return d < 0 ? P.total_degree() : d; }
    std::vector<Rational> point() const;
    Poly dT() const { return P.derivative(n()); }
    // Throws std::invalid_argument on violated hypotheses.
    void validate() const;
    json to_json() const;
    static ImplicitProblem from_json(const json& j);
};

// a_I keyed by multi-index; a_0 = t.
using TaylorTable = std::map<MultiIndex, Rational>;

struct SeriesSolution {
    int order = 0;
    std::shared_ptr<const Localizer> ctx;  // denominator P'_T
    TruncatedSeries<LocalizedPolynomial> U;
    // phi_slices[k] = degree-k slice of Phi_{U_{k-1}}, k = 1 .. order (+1).
    std::vector<TruncatedSeries<LocalizedPolynomial>> phi_slices;
    TaylorTable taylor;
};

// Symbolic solve over the localization, plus the specialized table at x. With next_slice the
// degree-(order+1) slice of Phi_{U_order} is kept in phi_slices as well.
SeriesSolution solve_series(const ImplicitProblem& pb, int order, bool next_slice = true);
// The same iteration carried out after specializing at x (rational coefficients).
TaylorTable solve_series_at_point(const ImplicitProblem& pb, int order);
// Numeric Newton iteration on truncated series in working-precision floats (smoke test).
std::map<MultiIndex, Real> newton_series(const ImplicitProblem& pb, int order);

// ---- cofactor recursion -----------------------------------------------------------

struct CofactorPolynomial {
    MultiIndex I;
    Poly P_I;
    int m = 0;
};

// Memoized recursion P_{e_k} = -dP/dY_k, P_{I+e_k} from P_I.
class CofactorRecursion {
public:
    explicit CofactorRecursion(ImplicitProblem pb);
    const ImplicitProblem& problem() const { return pb_; }
    const Poly& get(const MultiIndex& I);
    // a_I = P_I(x) / P'_T(x)^(2|I|-1); a_0 = t.
    Rational coefficient(const MultiIndex& I);
    TaylorTable table(int order);

private:
    ImplicitProblem pb_;
    Poly PT_, PT2_;
    std::vector<Poly> PYk_, PTPYk_, cross_;
    std::map<MultiIndex, Poly> memo_;
    Rational pt_at_x_;
};

CofactorPolynomial cofactor_recursion(const ImplicitProblem& pb, const MultiIndex& I);

// ---- verification -----------------------------------------------------------------

// Degree and length bounds on every P_I with 1 <= |I| <= order.
std::vector<CheckRecord> verify_lemma_2_1(CofactorRecursion& rec, int order);
// Denominator powers of the slices V_m (and numerator == P_I when rec is given), then
// Phi_{U_n} for n <= phi_order (-1: the solution order; 0: skipped), slices up to phi_order + 1.
std::vector<CheckRecord> verify_denominator_bounds(const ImplicitProblem& pb, const SeriesSolution& sol,
                                                   CofactorRecursion* rec = nullptr, int phi_order = -1);
// Direct substitution P(Y+X, T+U) - P(Y, T) == 0 through the order, over the localization.
bool defining_identity_holds(const ImplicitProblem& pb, const SeriesSolution& sol);

// Places for the local coefficient bounds: infinity, primes <= 13, and primes of P, x and P'_T(x).
std::vector<Place> lemma_2_5_places(const ImplicitProblem& pb);
std::vector<CheckRecord> verify_lemma_2_5(const ImplicitProblem& pb, const TaylorTable& a, int m,
                                          const std::vector<Place>& places);

// ---- parametrized charts ------------------------------------------------------------

// g-dimensional chart of a variety in P_N: forms Pt_i(X_0..X_g, X_i), i = g+1..N.
struct GroupChart {
    int g = 0, N = 0;
    std::vector<Poly> forms;     // forms[i-g-1], variables (X0..Xg, Xi)
    std::vector<Rational> e;     // neutral point, e[0] = 1
    long dG = -1;                // d(G); -1 means max total degree of the forms
    std::vector<Rational> rescaled;  // scale factors applied by normalize()

    void normalize();  // makes the grlex-leading coefficient of each form 1 if no coefficient is 1
    void validate() const;
    long degree() const;
    // P_i(X1..Xg, Xi) = Pt_i(1, X1..Xg, Xi) with base point (e_1..e_g, e_i).
    ImplicitProblem problem(int i) const;
    json to_json() const;
    static GroupChart from_json(const json& j);
};

// Rows 0..N of a_I^{(i)} for |I| <= order.
std::vector<TaylorTable> parametrize_group_chart(const GroupChart& chart, int order);
// H_v(e) = max_i |e_i|_v.
Rational neutral_height_v(const GroupChart& chart, const Place& v);
// E_v of the chart bound: max(1, |a_I^(i)|_v; |I| <= m) <= E_v^m H_v(e).
Rational lemma_3_1_constant(const GroupChart& chart, const Place& v);
// Infinity plus the primes of e, of the form coefficients and of each P'_T(e).
std::vector<Place> chart_places(const GroupChart& chart);
std::vector<CheckRecord> verify_lemma_3_1(const GroupChart& chart, const std::vector<TaylorTable>& table,
                                          const std::vector<Place>& places);

// ---- explicit bounds ------------------------------------------------------------------

// h(P_n) = ((n+1)/2) sum_{k=2}^{n+1} 1/k, exact.
Rational height_projective_space(long n);
// psi(n) = (n+1) log 2 - h(P_n).
Real psi(long n);
// psi(0..n_max) from one running harmonic sum.
std::vector<Real> psi_table(long n_max);
// f(N, G, e) = 4(N-g)hG + [2(N-g+1)h_e + 4(N-g)]dG + (N-g+1)(2g+5)(log dG + 1) - 2(N-g+1)h_e.
Real lemma_5_9_bound(long N, long g, const Real& dG, const Real& hG, const Real& h_e);

}  // namespace hl
