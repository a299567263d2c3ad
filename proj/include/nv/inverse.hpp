#ifndef NV_INVERSE_HPP
#define NV_INVERSE_HPP

#include <vector>

#include "nv/grid.hpp"
#include "nv/krylov.hpp"

namespace nv {

// t#(k) = t(k) / (4 pi conj(k)) on a k-plane grid, zero at k = 0 and for |k| > R.
struct TSharpField {
    PeriodicGrid k_grid;
    CMatrix values;
    double truncation_radius = 0.0;
};

// Smallest sampled radius beyond which |t#| stays below rel * max |t#|; the last radius otherwise.
double default_truncation_radius(const std::vector<double>& kabs, const std::vector<cplx>& t, double rel = 1e-6);

// Radial profile t(|k|) on a uniform grid of |k| (cubic B-spline in between).
// R <= 0 selects default_truncation_radius; the k-grid spans [-R-1, R+1]^2 with n points per axis.
TSharpField tsharp_from_profile(const std::vector<double>& kabs, const std::vector<cplx>& t, double R = -1.0,
                                int n = 256);
// t sampled directly on a k-grid.
TSharpField tsharp_from_field(const Field2D& t, double R);

// t# -> t# exp(i tau (k^3 + conj(k)^3)).
TSharpField evolve_scattering(const TSharpField& ts, double tau);

struct DbarSolution {
    cplx z;
    Field2D mu;  // on the k-grid
    bool converged = false;
    int iterations = 0;
    double residual = 0.0;
};

struct DbarOptions {
    double tol = 1e-8;
    int restart = 30;
    int max_iterations = 200;
};

// Solves mu = 1 + P_k[a conj(mu)], a = t#(k) exp(i tau(k^3+kb^3)) e_{-k}(z), as a doubled real system.
DbarSolution solve_dbar_k(const TSharpField& ts, cplx z, double tau = 0.0, const DbarOptions& opt = {},
                          const Eigen::VectorXd* initial = nullptr);
// Residual of the integral form at selected k-grid indices, evaluated by direct quadrature.
double dbar_collocation_residual(const TSharpField& ts, const DbarSolution& s, double tau,
                                 const std::vector<std::pair<int, int>>& points);

enum class ReconstructionMethod { q_formula, conductivity };

struct ReconstructionResult {
    Field2D q;    // on the z lattice
    Field2D mu0;  // mu(z, 0)
    ReconstructionMethod method = ReconstructionMethod::q_formula;
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> valid;  // false where a solve failed
    int failures = 0;
};

// z lattice = points of z_grid. The Q formula differentiates with 4th-order centred differences,
// the conductivity route applies the 5-point Laplacian; both use the lattice spacing.
ReconstructionResult reconstruct_q(const TSharpField& ts, const PeriodicGrid& z_grid, double tau = 0.0,
                                   const DbarOptions& opt = {});
ReconstructionResult reconstruct_conductivity(const TSharpField& ts, const PeriodicGrid& z_grid, double tau = 0.0,
                                              const DbarOptions& opt = {});

}  // namespace nv

#endif
