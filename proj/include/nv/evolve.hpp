#ifndef NV_EVOLVE_HPP
#define NV_EVOLVE_HPP

#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "nv/grid.hpp"

namespace nv {

enum class Dealias { two_thirds, none };

struct EvolutionConfig {
    double energy = 0.0;
    double dt = 0.01;
    double t_end = 1.0;
    Dealias dealias = Dealias::two_thirds;
    double blowup_growth_factor = 10.0;
    double tail_fraction_max = 0.1;
    int tail_sustain_steps = 10;
    // q_t = linear_scale (-q_xxx/4 + 3q_xyy/4 - 3E/4 div u) + nonlinear_scale 3/4 div(q u)
    double linear_scale = 1.0;
    double nonlinear_scale = 1.0;
    int checkpoint_every = 0;   // steps; 0 disables
    int diagnostics_every = 1;  // steps between history entries
    bool conserved_diagnostics = false;  // fills s1_value / s2_value
};

struct Diagnostics {
    double time = 0.0;
    double l2_norm = 0.0;
    cplx zero_mode = 0.0;  // q_hat(0, 0), unnormalised FFT coefficient
    // periodic analogues of the first two nontrivial conserved quantities (NaN when not tracked)
    cplx s1_value = std::numeric_limits<double>::quiet_NaN();
    cplx s2_value = std::numeric_limits<double>::quiet_NaN();
    double tail_fraction = 0.0;
    bool blowup_flag = false;
};

struct EvolutionState {
    PeriodicGrid grid;
    double time = 0.0;
    long steps = 0;
    CMatrix q_hat;
    std::vector<Diagnostics> history;
    bool blowup = false;
    double blowup_time = std::numeric_limits<double>::quiet_NaN();
    double initial_l2 = 0.0;
    int tail_run = 0;  // consecutive steps above tail_fraction_max

    Field2D q() const;
};

EvolutionState make_state(const Field2D& q0, const EvolutionConfig& cfg = {});

// Fourier symbols of u = S q: (xi^2 - eta^2)/|xi|^2 and -2 xi eta/|xi|^2, zero at the origin.
std::pair<CMatrix, CMatrix> aux_from_q(const PeriodicGrid& g, const CMatrix& q_hat);

// Linear Fourier-mode rate: dc/dt = i omega c.
double linear_rate(double xi, double eta, double energy);

Diagnostics diagnose(const EvolutionState& s, const EvolutionConfig& cfg);

// One CN / explicit-midpoint step. Throws BlowupDetected (state untouched) when a threshold trips
// and NonFinite on non-finite coefficients.
void step(EvolutionState& s, const EvolutionConfig& cfg);

// Integrates to t_end. Blow-up stops the run and is reported through blowup / blowup_time.
EvolutionState run(const Field2D& q0, const EvolutionConfig& cfg,
                   const std::function<void(const EvolutionState&)>& checkpoint = {});
void advance(EvolutionState& s, const EvolutionConfig& cfg,
             const std::function<void(const EvolutionState&)>& checkpoint = {});

// Rotation by 2pi/3 or 4pi/3 about the origin, sampled with bicubic interpolation.
Field2D rotate_field(const Field2D& q, double angle);

}  // namespace nv

#endif
