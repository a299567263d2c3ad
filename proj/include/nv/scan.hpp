#ifndef NV_SCAN_HPP
#define NV_SCAN_HPP

#include <functional>
#include <utility>
#include <vector>

#include "nv/scatter.hpp"

namespace nv {

struct ScanOptions {
    double half_side = 2.0;  // grid for the bump family
    int n = 128;
    LsOptions ls;
    DnOptions dn;
    double dn_below = 0.5;  // |k| below which the DN method is used
    bool with_det2 = false;
    int det2_n = 64;  // grid used by the dense determinant
    // bisection levels spent on a sign change of Re t with only one side above the threshold; 0 disables
    int refine_depth = 10;
    double factor = 20.0;
};

struct ScanResult {
    std::vector<double> lambdas;
    std::vector<double> k_samples;
    Eigen::MatrixXcd t_profiles;                 // lambdas x k_samples
    std::vector<std::vector<SampleFlag>> flags;  // same shape
    std::vector<std::vector<double>> singular_radii;
    Eigen::MatrixXd det2;  // empty unless requested
};

ScanResult lambda_sweep(const std::vector<double>& lambdas, const std::vector<double>& ks,
                        const ScanOptions& opt = {});

// Radii where adjacent samples both exceed factor * median |t| with opposite real parts, plus
// midpoints of contiguous no_converge blocks.
std::vector<double> detect_singularities(const std::vector<double>& ks, const std::vector<cplx>& t,
                                         const std::vector<SampleFlag>& flags, double factor = 20.0);

struct Det2Value {
    double value = 1.0;  // real part of det2(I - T_k)
    double imag = 0.0;   // discretisation diagnostic
    int size = 0;        // matrix dimension (grid points in the support)
};

// Bisects [k0, k1], which brackets a sign change of Re t, until both ends exceed thr (a pole: returns
// the final midpoint) or the depth runs out (returns NaN). A failed solve counts as a pole.
double refine_sign_jump(const std::function<std::pair<cplx, SampleFlag>(double)>& t_of, double k0, cplx t0, double k1,
                        cplx t1, double thr, int depth);

// det(I - T) exp(tr T) for T psi = -g_k * (q psi), discretised on q's own grid.
// Throws MatrixTooLarge when the grid has more than max_n points per axis.
Det2Value det2(const Potential& q, cplx k, int max_n = 128);
// Midpoints of sign changes of a sampled real profile.
std::vector<double> sign_changes(const std::vector<double>& ks, const std::vector<double>& v);

// KdV ring on a grid large enough that the LS grid coincides with it.
Potential ring_scan_potential(int n = 1024);
ScatteringData ring_profile(const std::vector<double>& ks, int n = 1024, const LsOptions& ls = {});

}  // namespace nv

#endif
