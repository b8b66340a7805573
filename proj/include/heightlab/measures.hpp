#pragma once

#include "heightlab/certify.hpp"
#include "heightlab/poly.hpp"

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace hl {

// A real quantity with an absolute error bound and the method that produced it.
struct Estimate {
    Real value = 0;
    Real err = 0;
    std::string method = "exact";
    json to_json() const;
};

struct MeasureOptions {
    int points_per_dim = 4096;   // torus quadrature, n <= 2
    long mc_samples = 1000000;   // Monte-Carlo, n >= 3 and unitary measure
    std::uint64_t seed = 0;
    // "midpoint": composite midpoint on the full torus grid.
    // "jensen": exact inner integral via roots, midpoint rule on the outer circle.
    std::string torus_rule = "midpoint";
    bool unitary_exact_binary = true;  // closed form for binary forms
    // When positive, torus quadrature doubles points_per_dim until the error bar is at most
    // target_err or the grid would exceed max_points_per_dim.
    double target_err = 0;
    int max_points_per_dim = 65536;
};

// ---- Gauss-Weil ----------------------------------------------------------------

// max_c |c|_v over the coefficients of P (P != 0).
Rational gauss_weil_measure_v(const Poly& P, const Place& v);
// Places relevant to the coefficient set of P.
std::vector<Place> places_of(const Poly& P);
// h~(P) = sum_v log M~_v(P), exact.
LogForm height_gauss_weil(const Poly& P);
// Sum over finite places of log M~_v(P), exact.
LogForm finite_part_height(const Poly& P);
// Projective height sum_v log max_i |x_i|_v (not all zero).
LogForm projective_height(const std::vector<Rational>& x);
// h(1 : x) = projective height of (1, x_1, ...).
LogForm affine_height(const std::vector<Rational>& x);

// ---- Mahler measure -------------------------------------------------------------

// Complex roots of a univariate polynomial with their inclusion radii (Aberth-Ehrlich).
struct RootSet {
    std::vector<std::complex<long double>> roots;
    std::vector<long double> radius;  // rigorous up to rounding for isolated clusters
};
RootSet univariate_roots(const std::vector<Rational>& coeffs_low_to_high);

// log M-bar(P) at the infinite place.
Estimate log_mahler_univariate(const Poly& P);
Estimate log_mahler_quadrature(const Poly& P, int points_per_dim, const std::string& rule = "midpoint");
Estimate log_mahler_monte_carlo(const Poly& P, long samples, std::uint64_t seed);
// Dispatch on the number of effective variables; forms are dehomogenized first.
Estimate log_mahler(const Poly& P, const MeasureOptions& opt = {});

// ---- unitary measure ------------------------------------------------------------

// log M(P) for P homogeneous in each block (block sizes sum to nvars).
Estimate log_unitary(const Poly& P, const std::vector<int>& blocks, const MeasureOptions& opt = {});
// d * sum_{j=1}^{n} 1/(2j), exact.
Rational stokes_constant(long d, int n);

// ---- heights ---------------------------------------------------------------------

Estimate height_mahler(const Poly& P, const MeasureOptions& opt = {});
Estimate height_unitary(const Poly& P, const std::vector<int>& blocks, const MeasureOptions& opt = {});

// ||P||_2^2 = sum |c|^2, exact.
Rational l2_norm_squared(const Poly& P);

json measure_report(const Poly& P, const MeasureOptions& opt, bool homogeneous);

// ---- comparison inequalities -------------------------------------------------------

enum class Comparison { eq_1_7, eq_1_19, eq_1_20, eq_1_21, l2_chain };
Comparison parse_comparison(const std::string& s);
std::string to_string(Comparison c);
std::vector<CheckRecord> check_comparison(const Poly& P, Comparison which, const MeasureOptions& opt = {});

}  // namespace hl
