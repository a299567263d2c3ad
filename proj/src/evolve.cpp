#include "nv/evolve.hpp"

#include <cmath>
#include <memory>
#include <mutex>

namespace nv {

double linear_rate(double xi, double eta, double energy) {
    double r2 = xi * xi + eta * eta;
    if (r2 == 0.0) return 0.0;
    return 0.25 * (xi * xi * xi - 3.0 * xi * eta * eta) * (1.0 - 3.0 * energy / r2);
}

std::pair<CMatrix, CMatrix> aux_from_q(const PeriodicGrid& g, const CMatrix& q_hat) {
    CMatrix u1(g.n, g.n), u2(g.n, g.n);
    for (int jy = 0; jy < g.n; ++jy) {
        double eta = g.frequency(jy);
        for (int jx = 0; jx < g.n; ++jx) {
            double xi = g.frequency(jx), r2 = xi * xi + eta * eta;
            if (r2 == 0.0) {
                u1(jy, jx) = u2(jy, jx) = 0.0;
                continue;
            }
            u1(jy, jx) = q_hat(jy, jx) * ((xi * xi - eta * eta) / r2);
            u2(jy, jx) = q_hat(jy, jx) * (-2.0 * xi * eta / r2);
        }
    }
    return {u1, u2};
}

Field2D EvolutionState::q() const { return Field2D(grid, fft_inverse(q_hat), true); }

namespace {

struct StepTables {
    PeriodicGrid grid;
    double dt, energy, lin, nonlin;
    Dealias dealias;
    CMatrix half_num, half_den_inv, full_num, full_den_inv;  // CN factors for dt/2 and dt
    Eigen::ArrayXd xi, eta;                                  // per column / row
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> mask;  // kept modes
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> tail;  // tail band

    bool matches(const PeriodicGrid& g, const EvolutionConfig& c, double d) const {
        return grid == g && dt == d && energy == c.energy && lin == c.linear_scale && nonlin == c.nonlinear_scale &&
               dealias == c.dealias;
    }
};

std::shared_ptr<const StepTables> tables_for(const PeriodicGrid& g, const EvolutionConfig& c, double dt) {
    static std::mutex m;
    static std::shared_ptr<const StepTables> last;
    std::lock_guard<std::mutex> lock(m);
    if (last && last->matches(g, c, dt)) return last;
    auto t = std::make_shared<StepTables>();
    t->grid = g;
    t->dt = dt;
    t->energy = c.energy;
    t->lin = c.linear_scale;
    t->nonlin = c.nonlinear_scale;
    t->dealias = c.dealias;
    const int n = g.n;
    t->xi.resize(n);
    t->eta.resize(n);
    for (int j = 0; j < n; ++j) t->xi(j) = t->eta(j) = g.frequency(j);
    t->half_num.resize(n, n);
    t->half_den_inv.resize(n, n);
    t->full_num.resize(n, n);
    t->full_den_inv.resize(n, n);
    t->mask.resize(n, n);
    t->tail.resize(n, n);
    const int keep = c.dealias == Dealias::two_thirds ? n / 3 : n / 2 - 1;
    for (int jy = 0; jy < n; ++jy) {
        int my = g.wrap_index(jy);
        for (int jx = 0; jx < n; ++jx) {
            int mx = g.wrap_index(jx);
            bool nyq = mx == -n / 2 || my == -n / 2;
            double om = nyq ? 0.0 : c.linear_scale * linear_rate(t->xi(jx), t->eta(jy), c.energy);
            cplx a = cplx(0.0, om * dt);
            t->half_num(jy, jx) = 1.0 + 0.25 * a;
            t->half_den_inv(jy, jx) = 1.0 / (1.0 - 0.25 * a);
            t->full_num(jy, jx) = 1.0 + 0.5 * a;
            t->full_den_inv(jy, jx) = 1.0 / (1.0 - 0.5 * a);
            int ma = std::max(std::abs(mx), std::abs(my));
            t->mask(jy, jx) = !nyq && ma <= keep;
            t->tail(jy, jx) = 9 * ma > 2 * n && 3 * ma <= n;
        }
    }
    last = t;
    return t;
}

// nonlinear_scale * 3/4 div(q u), dealiased
CMatrix nonlinear_term(const StepTables& t, const CMatrix& q_hat) {
    const int n = t.grid.n;
    auto [u1h, u2h] = aux_from_q(t.grid, q_hat);
    CMatrix q = fft_inverse(q_hat);
    fft_inverse_inplace(u1h);
    fft_inverse_inplace(u2h);
    CMatrix f1 = q.cwiseProduct(u1h), f2 = q.cwiseProduct(u2h);
    fft_forward_inplace(f1);
    fft_forward_inplace(f2);
    const double c = 0.75 * t.nonlin;
    CMatrix out(n, n);
    for (int jy = 0; jy < n; ++jy)
        for (int jx = 0; jx < n; ++jx)
            out(jy, jx) = t.mask(jy, jx) ? c * cplx(0.0, 1.0) * (t.xi(jx) * f1(jy, jx) + t.eta(jy) * f2(jy, jx))
                                         : cplx(0.0);
    return out;
}

double l2_from_hat(const PeriodicGrid& g, const CMatrix& q_hat) {
    double h = g.spacing();
    return std::sqrt(q_hat.squaredNorm()) * h / g.n;
}

double tail_fraction(const StepTables& t, const CMatrix& q_hat) {
    double tot = q_hat.squaredNorm();
    if (tot == 0.0) return 0.0;
    double tail = 0.0;
    for (int jy = 0; jy < t.grid.n; ++jy)
        for (int jx = 0; jx < t.grid.n; ++jx)
            if (t.tail(jy, jx)) tail += std::norm(q_hat(jy, jx));
    return tail / tot;
}

}  // namespace

EvolutionState make_state(const Field2D& q0, const EvolutionConfig& cfg) {
    if (!(cfg.dt > 0.0)) throw InvalidArgument("evolution: dt must be positive");
    if (!(cfg.t_end >= 0.0)) throw InvalidArgument("evolution: t_end must be non-negative");
    if (!q0.samples().allFinite()) throw NonFinite("evolution: initial data is not finite");
    EvolutionState s;
    s.grid = q0.grid();
    CMatrix q = q0.samples();
    if (q0.is_real()) q = q.real().cast<cplx>();
    s.q_hat = fft_forward(q);
    s.initial_l2 = l2_from_hat(s.grid, s.q_hat);
    s.history.push_back(diagnose(s, cfg));
    return s;
}

Diagnostics diagnose(const EvolutionState& s, const EvolutionConfig& cfg) {
    auto t = tables_for(s.grid, cfg, cfg.dt);
    Diagnostics d;
    d.time = s.time;
    d.l2_norm = l2_from_hat(s.grid, s.q_hat);
    d.zero_mode = s.q_hat(0, 0);
    d.tail_fraction = tail_fraction(*t, s.q_hat);
    d.blowup_flag = s.blowup;
    if (cfg.conserved_diagnostics) {
        // s1 = int q (1/4i) P q, s2 = (1/4) int q S q with the periodic symbols of P and S
        const double w = s.grid.spacing() * s.grid.spacing() / (double(s.grid.n) * s.grid.n);
        cplx s1 = 0.0, s2 = 0.0;
        for (int jy = 0; jy < s.grid.n; ++jy)
            for (int jx = 0; jx < s.grid.n; ++jx) {
                cplx zeta(t->xi(jx), t->eta(jy));
                if (zeta == cplx(0.0)) continue;
                double e = std::norm(s.q_hat(jy, jx));
                s1 += e * (2.0 / (cplx(0.0, 1.0) * zeta)) / cplx(0.0, 4.0);
                s2 += e * 0.25 * std::conj(zeta) / zeta;
            }
        d.s1_value = s1 * w;
        d.s2_value = s2 * w;
    }
    return d;
}

void step(EvolutionState& s, const EvolutionConfig& cfg) {
    double dt = std::min(cfg.dt, cfg.t_end - s.time);
    if (!(dt > 0.0)) dt = cfg.dt;
    auto t = tables_for(s.grid, cfg, dt);
    const CMatrix& q = s.q_hat;
    CMatrix N0 = nonlinear_term(*t, q);
    CMatrix mid = (t->half_num.cwiseProduct(q) + 0.5 * dt * N0).cwiseProduct(t->half_den_inv);
    CMatrix N1 = nonlinear_term(*t, mid);
    CMatrix next = (t->full_num.cwiseProduct(q) + dt * N1).cwiseProduct(t->full_den_inv);
    // keep the zero mode bit-exact: both contributions vanish there analytically
    next(0, 0) = q(0, 0);
    if (!next.allFinite()) throw NonFinite("evolution: non-finite Fourier coefficients");

    double l2 = l2_from_hat(s.grid, next);
    double tail = tail_fraction(*t, next);
    int tail_run = tail > cfg.tail_fraction_max ? s.tail_run + 1 : 0;
    double tnew = s.time + dt;
    if (s.initial_l2 > 0.0 && l2 >= cfg.blowup_growth_factor * s.initial_l2)
        throw BlowupDetected("evolution: L2 norm grew beyond the blow-up factor", tnew);
    if (tail_run >= cfg.tail_sustain_steps)
        throw BlowupDetected("evolution: sustained high-frequency tail", tnew);
    s.q_hat = std::move(next);
    s.time = tnew;
    s.tail_run = tail_run;
    ++s.steps;
}

void advance(EvolutionState& s, const EvolutionConfig& cfg, const std::function<void(const EvolutionState&)>& checkpoint) {
    const double eps = 1e-9 * cfg.dt;
    while (s.time < cfg.t_end - eps) {
        try {
            step(s, cfg);
        } catch (const BlowupDetected& e) {
            s.blowup = true;
            s.blowup_time = e.time();
            Diagnostics d = diagnose(s, cfg);
            d.blowup_flag = true;
            s.history.push_back(d);
            return;
        }
        if (cfg.diagnostics_every > 0 && s.steps % cfg.diagnostics_every == 0) s.history.push_back(diagnose(s, cfg));
        if (checkpoint && cfg.checkpoint_every > 0 && s.steps % cfg.checkpoint_every == 0) checkpoint(s);
    }
}

EvolutionState run(const Field2D& q0, const EvolutionConfig& cfg,
                   const std::function<void(const EvolutionState&)>& checkpoint) {
    EvolutionState s = make_state(q0, cfg);
    advance(s, cfg, checkpoint);
    return s;
}

Field2D rotate_field(const Field2D& q, double angle) {
    const double a1 = 2.0 * M_PI / 3.0, a2 = 4.0 * M_PI / 3.0;
    if (std::abs(angle - a1) > 1e-12 && std::abs(angle - a2) > 1e-12)
        throw InvalidArgument("rotate_field: angle must be 2pi/3 or 4pi/3");
    cplx rot = std::polar(1.0, -angle);
    return Field2D::from_function(
        q.grid(),
        [&](cplx z) {
            cplx w = rot * z;
            // preimages off the square see the field as zero, not its periodic image
            const double L = q.grid().half_side;
            if (std::abs(w.real()) >= L || std::abs(w.imag()) >= L) return cplx(0.0);
            return interpolate_bicubic(q, w.real(), w.imag());
        },
        q.is_real());
}

}  // namespace nv
