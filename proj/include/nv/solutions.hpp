#ifndef NV_SOLUTIONS_HPP
#define NV_SOLUTIONS_HPP

#include <array>
#include <functional>
#include <string>

#include "nv/grid.hpp"
#include "nv/scatter.hpp"

namespace nv {

double dispersion(double k1, double k2);
std::array<double, 2> phase_velocity(double k1, double k2);
std::array<double, 2> group_velocity(double k1, double k2);

struct Triple {
    double q = 0.0, u1 = 0.0, u2 = 0.0;
};

// canonical: q_t = -q_xxx/4 + 3q_xyy/4 + 3/4 div((q-E)u), u1_x - u2_y = q_x, u2_x + u1_y = -q_y.
// hirota:    same evolution law, auxiliary relations q_x = (u1)_y, q_y = (u2)_x.
enum class Convention { canonical, hirota };

struct ClosedFormSolution {
    std::function<Triple(double x, double y, double t)> evaluator;
    std::function<bool(double x, double y, double t)> singular;  // may be empty
    std::string singular_set = "none";
    Convention convention = Convention::canonical;
    double energy = 0.0;

    // Throws SingularPoint on the singular set.
    Triple operator()(double x, double y, double t) const;
};

ClosedFormSolution kdv_soliton(double c);
// q(x,y,t) = v(x cos a + y sin a, cos(3a) t) for a profile v solving v_t = -v'''/4 + 3 v v'/2.
ClosedFormSolution planar_kdv(double alpha, std::function<double(double s, double t)> v);
double kdv_kappa(double alpha);
// Max NV residual of planar_kdv on a box around the origin.
double kdv_reduction_check(double alpha, std::function<double(double s, double t)> v, double t = 0.3);

Field2D kdv_ring(const PeriodicGrid& g, double amplitude = 0.5, double radius = 20.0, double width = 2.0);
Potential kdv_ring_potential(const PeriodicGrid& g, double amplitude = 0.5, double radius = 20.0,
                             double width = 2.0);

struct HirotaParams {
    double k1 = 1.0, C1 = 1.0;
    double k2 = 2.0, C2 = 1.0;
};
double hirota_a12(double k1, double k2);
ClosedFormSolution hirota(int n_solitons, const HirotaParams& p = {});
// Maps a hirota-convention solution onto the canonical form (q -> -2q, u = (0, 2q)).
ClosedFormSolution to_canonical(const ClosedFormSolution& s);

enum class EmaKind { static_solution, breather };
ClosedFormSolution ema_solution(EmaKind kind, double C);

struct ResidualReport {
    double main = 0.0;  // max |q_t - rhs|
    double aux = 0.0;   // max auxiliary-relation error
    double scale = 0.0; // max magnitude of the individual terms
    double max() const { return std::max(main, aux); }
};

// 6th-order central differences with step delta over an nx x ny lattice of the box at time t.
ResidualReport nv_residual(const ClosedFormSolution& s, double x0, double x1, double y0, double y1, double t,
                           int nx = 9, int ny = 9, double delta = 2e-3);

// Samples q on the grid; planar solutions are periodised by summing images x + 2Lj, |j| <= images.
Field2D sample_q(const ClosedFormSolution& s, const PeriodicGrid& g, double t, int images = 0);

struct SigmaSpec {
    double amplitude = 0.5;
    double width = 0.25;
    double cutoff_inner = 0.5;
    double cutoff_outer = 0.9;
};
double gaussian_sigma(double x, double y, const SigmaSpec& s = {});

enum class ConductivityKind { gaussian_sigma, custom };
// gaussian_sigma uses SigmaSpec defaults; custom requires sigma.
Potential conductivity_fixture(ConductivityKind kind, const PeriodicGrid& g, const SigmaSpec& spec = {},
                               std::function<double(double, double)> sigma = {});
PeriodicGrid default_fixture_grid(int n = 256);

struct LambdaBumpSpec {
    double lambda = 0.0;
};
double bump_w(double r);
Potential lambda_bump(const LambdaBumpSpec& spec, const PeriodicGrid& g);

}  // namespace nv

#endif
