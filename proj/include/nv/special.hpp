#ifndef NV_SPECIAL_HPP
#define NV_SPECIAL_HPP

#include "nv/grid.hpp"

namespace nv {

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

// Principal-branch exponential integral E1(w) = int_1^inf e^{-wt}/t dt.
cplx exp_integral_e1(cplx w);

// e^w E1(w); finite for large |w| where E1 itself under/overflows.
cplx e1_scaled(cplx w);

// Entire part Ein(w) = sum_{n>=1} (-1)^{n+1} w^n/(n n!), so E1 = -gamma - log w + Ein.
cplx entire_ein(cplx w);

// e^{-a} Ei(a) for a > 0 (real part of -E1 on the cut, scaled).
double ei_scaled(double a);

// Faddeev Green's function g_k(z) = g1(kz), fundamental solution of -Delta - 4ik dbar.
cplx faddeev_g(cplx k, cplx z);
cplx faddeev_g1(cplx z);

// G_k(z) = e^{ikz} g_k(z) = Re E1(-ikz)/(2 pi), the Laplace-type Faddeev function.
double faddeev_laplace_g(cplx k, cplx z);
// Smooth part G_k - G0 + l(k) = Re Ein(-ikz)/(2 pi).
double faddeev_laplace_smooth(cplx k, cplx z);

// Truncated large-z expansion of g1 with N+1 terms, and its error bound.
cplx g1_asymptotic(cplx z, int N);
double g1_error_bound(double abs_z, int N);

double log_potential_g0(cplx z);
double small_k_shift(cplx k);
// Average of G0 over the h x h cell centred at the origin.
double g0_cell_average(double h);

// g_k sampled at the grid points; the origin sample uses the cell average of G0 shifted by -l(k).
struct GreenTable {
    cplx k;
    PeriodicGrid grid;
    Field2D samples;
};

GreenTable make_green_table(cplx k, const PeriodicGrid& g);

// Reorders a centred-layout field (origin at index n/2) into FFT wrap layout (origin at index 0).
CMatrix to_wrap_layout(const CMatrix& centred);
CMatrix to_centred_layout(const CMatrix& wrapped);

}  // namespace nv

#endif
