#ifndef NV_SCATTER_HPP
#define NV_SCATTER_HPP

#include <functional>
#include <string>
#include <vector>

#include "nv/grid.hpp"
#include "nv/krylov.hpp"

namespace nv {

enum class Classification { subcritical, critical, supercritical, unknown };
std::string to_string(Classification c);

struct Potential {
    Field2D q;  // real-tagged
    double support_radius = 0.0;
    Classification hint = Classification::unknown;
    // Optional exact evaluator q(x, y); used off-grid (polar DN grid) when present.
    std::function<double(double, double)> analytic;

    double value(double x, double y) const;
};

// Smallest radius r with mass outside r at most rel * total mass (grid quadrature).
double support_radius_for(const Field2D& q, double rel = 1e-10);
// Checks the support invariant; throws InvalidArgument when violated.
void validate_potential(const Potential& p);
Potential make_potential(Field2D q, Classification hint, double support_radius = -1.0);

struct CGOSolution {
    cplx k;
    Field2D mu;  // on the LS grid
    bool converged = false;
    int iterations = 0;
    double residual = 0.0;  // ||mu - 1 + g_k*(q mu)|| / ||mu||
};

enum class SampleFlag { ok, no_converge, skipped };
std::string to_string(SampleFlag f);
SampleFlag sample_flag_from_string(const std::string& s);

struct ScatteringData {
    std::vector<cplx> k_points;
    std::vector<cplx> t_values, s_values;
    std::vector<SampleFlag> flags;
    std::vector<int> iterations;
    std::vector<double> residuals;
};

struct LsOptions {
    double tol = 1e-8;
    int restart = 30;
    int max_iterations = 300;
};

// Grid used by the LS solver: same spacing as q's grid, side >= 4 * support radius.
PeriodicGrid ls_grid_for(const Potential& p);
// q resampled (copied / zero padded / cropped) onto the LS grid.
CMatrix potential_on_grid(const Potential& p, const PeriodicGrid& g);

CGOSolution solve_cgo_ls(const Potential& p, cplx k, const LsOptions& opt = {});
// Applies mu -> g_k * (q mu) on the LS grid for the given k (q, mu in centred layout).
CMatrix ls_convolve(const Potential& p, cplx k, const CMatrix& f);

cplx scattering_t(const Potential& p, const CGOSolution& sol);
cplx scattering_s(const Potential& p, const CGOSolution& sol);

struct DtoNMap {
    int M = 0;
    Eigen::MatrixXcd matrix;   // Lambda_q, modes -M..M (index m + M)
    Eigen::MatrixXcd lambda0;  // same discretisation with q = 0
    Eigen::MatrixXcd delta() const { return matrix - lambda0; }
};

struct DnOptions {
    int M = 16;
    int radial = 512;
    int boundary_nodes = 128;
};

DtoNMap dn_map(const Potential& p, int M = 16, int radial = 512);

struct BoundaryTrace {
    cplx k;
    Eigen::VectorXcd psi_hat;  // Fourier coefficients of psi on |z| = 1, modes -M..M
    Eigen::VectorXcd phi_hat;  // (Lambda_q - Lambda_0) psi, same modes
    bool ok = true;
    double condition = 0.0;  // reciprocal condition estimate of the Nystrom matrix
};

BoundaryTrace solve_cgo_boundary(const DtoNMap& dn, cplx k, int boundary_nodes = 128);
// psi(theta) on the unit circle from a boundary solution.
cplx boundary_psi(const DtoNMap& dn, const BoundaryTrace& tr, double theta, int boundary_nodes = 128);
cplx scattering_t_dn(const DtoNMap& dn, cplx k, int boundary_nodes = 128);
cplx scattering_t_dn(const DtoNMap& dn, const BoundaryTrace& tr);

enum class ScatterMethod { ls, dn, both };

// Parallel sweep over k; ordering follows ks. With method both, DN is used for |k| < 0.5.
ScatteringData scatter_sweep(const Potential& p, const std::vector<cplx>& ks, ScatterMethod method,
                             const LsOptions& ls = {}, const DnOptions& dn = {});

std::vector<cplx> conserved_quantities(const Potential& p, int j_max = 2);

struct LargeKReport {
    double fitted_deviation = 0.0;   // rel L2 of the 1/k-extrapolated k(mu-1) against c0
    double deviation_at_max_k = 0.0; // rel L2 of k(mu-1) - c0 at the largest k
    double decay_exponent = 0.0;     // log-log slope of ||mu - 1||_inf
};

LargeKReport large_k_expansion_check(const Potential& p, const std::vector<CGOSolution>& sols);

}  // namespace nv

#endif
