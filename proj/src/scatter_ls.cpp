#include <algorithm>
#include <cmath>
#include <optional>

#include "nv/parallel.hpp"
#include "nv/scatter.hpp"
#include "nv/special.hpp"

namespace nv {

std::string to_string(Classification c) {
    switch (c) {
        case Classification::subcritical: return "subcritical";
        case Classification::critical: return "critical";
        case Classification::supercritical: return "supercritical";
        default: return "unknown";
    }
}

std::string to_string(SampleFlag f) {
    switch (f) {
        case SampleFlag::ok: return "ok";
        case SampleFlag::no_converge: return "no_converge";
        default: return "skipped";
    }
}

SampleFlag sample_flag_from_string(const std::string& s) {
    if (s == "ok") return SampleFlag::ok;
    if (s == "no_converge") return SampleFlag::no_converge;
    if (s == "skipped") return SampleFlag::skipped;
    throw InvalidArgument("unknown sample flag '" + s + "'");
}

double Potential::value(double x, double y) const {
    if (analytic) return analytic(x, y);
    return interpolate_bicubic(q, x, y).real();
}

double support_radius_for(const Field2D& q, double rel) {
    const auto& g = q.grid();
    std::vector<std::pair<double, double>> rm;
    rm.reserve(static_cast<size_t>(g.n) * g.n);
    double total = 0.0;
    for (int jy = 0; jy < g.n; ++jy)
        for (int jx = 0; jx < g.n; ++jx) {
            double a = std::abs(q(jy, jx));
            if (a == 0.0) continue;
            rm.emplace_back(std::abs(g.point(jy, jx)), a);
            total += a;
        }
    if (total == 0.0) return g.spacing();
    std::sort(rm.begin(), rm.end());
    double outside = 0.0;
    for (size_t i = rm.size(); i-- > 0;) {
        if (outside + rm[i].second > rel * total) return rm[i].first + 1e-12;
        outside += rm[i].second;
    }
    return rm.front().first + 1e-12;
}

void validate_potential(const Potential& p) {
    const auto& g = p.q.grid();
    double total = 0.0, outside = 0.0;
    for (int jy = 0; jy < g.n; ++jy)
        for (int jx = 0; jx < g.n; ++jx) {
            double a = std::abs(p.q(jy, jx));
            total += a;
            if (std::abs(g.point(jy, jx)) > p.support_radius) outside += a;
        }
    if (outside > 1e-10 * total)
        throw InvalidArgument("potential: mass outside support radius exceeds 1e-10 of total");
}

Potential make_potential(Field2D q, Classification hint, double support_radius) {
    Potential p;
    p.q = std::move(q);
    p.q.set_real(true);
    p.hint = hint;
    p.support_radius = support_radius > 0 ? support_radius : support_radius_for(p.q);
    validate_potential(p);
    return p;
}

PeriodicGrid ls_grid_for(const Potential& p) {
    double h = p.q.grid().spacing();
    if (p.support_radius / h < 16.0)
        throw GridTooCoarse("LS: support radius spans fewer than 16 grid cells");
    int n = 8;
    while (n * h < 4.0 * p.support_radius - 1e-12) n *= 2;
    return PeriodicGrid(0.5 * n * h, n);
}

CMatrix potential_on_grid(const Potential& p, const PeriodicGrid& g) {
    const auto& src = p.q.grid();
    if (g == src) return p.q.samples().real().cast<cplx>();
    if (std::abs(g.spacing() - src.spacing()) > 1e-12 * src.spacing())
        throw InvalidArgument("potential_on_grid: spacings differ");
    // Both grids contain the origin at index n/2, so samples coincide.
    CMatrix out = CMatrix::Zero(g.n, g.n);
    int off = g.n / 2 - src.n / 2;
    for (int jy = 0; jy < src.n; ++jy) {
        int ty = jy + off;
        if (ty < 0 || ty >= g.n) continue;
        for (int jx = 0; jx < src.n; ++jx) {
            int tx = jx + off;
            if (tx < 0 || tx >= g.n) continue;
            out(ty, tx) = p.q(jy, jx).real();
        }
    }
    return out;
}

namespace {

struct LsOperator {
    PeriodicGrid grid;
    CMatrix q;
    CMatrix kernel_hat;

    LsOperator(const Potential& p, cplx k) : grid(ls_grid_for(p)) {
        q = potential_on_grid(p, grid);
        double h = grid.spacing();
        GreenTable tab = make_green_table(k, grid);
        kernel_hat = fft_forward(to_wrap_layout(tab.samples.samples()));
        kernel_hat *= h * h;
    }

    // g_k * f on the grid (circular convolution with the minimal-image kernel)
    CMatrix convolve(const CMatrix& f) const {
        CMatrix a = fft_forward(f);
        a.array() *= kernel_hat.array();
        fft_inverse_inplace(a);
        return a;
    }

    CMatrix apply(const CMatrix& mu) const { return mu + convolve(q.cwiseProduct(mu)); }
};

using Vec = Eigen::VectorXcd;

Eigen::Map<const Vec> as_vec(const CMatrix& m) { return {m.data(), m.size()}; }

}  // namespace

CMatrix ls_convolve(const Potential& p, cplx k, const CMatrix& f) {
    if (k == cplx(0.0, 0.0)) throw DomainZero("LS: k = 0");
    LsOperator op(p, k);
    return op.convolve(op.q.cwiseProduct(f));
}

CGOSolution solve_cgo_ls(const Potential& p, cplx k, const LsOptions& opt) {
    if (k == cplx(0.0, 0.0)) throw DomainZero("LS: k = 0");
    LsOperator op(p, k);
    const int n = op.grid.n;
    CGOSolution sol;
    sol.k = k;
    if (op.q.cwiseAbs().maxCoeff() == 0.0) {
        sol.mu = Field2D(op.grid, CMatrix::Ones(n, n));
        sol.converged = true;
        return sol;
    }
    auto apply = [&](const Vec& x, Vec& y) {
        CMatrix m = Eigen::Map<const CMatrix>(x.data(), n, n);
        CMatrix r = op.apply(m);
        y = as_vec(r);
    };
    Vec b = Vec::Ones(static_cast<Eigen::Index>(n) * n);
    GmresOptions go{opt.restart, opt.tol, opt.max_iterations};
    auto res = gmres<cplx>(apply, b, b, go);
    int iters = res.iterations;
    // The invariant is stated relative to ||mu||; tighten once if needed.
    auto mu_resid = [&](const Vec& x) {
        Vec y(x.size());
        apply(x, y);
        return (y - b).norm() / x.norm();
    };
    double r = mu_resid(res.x);
    if (res.converged && r > opt.tol && iters < opt.max_iterations) {
        GmresOptions g2 = go;
        g2.tol = opt.tol * std::min(1.0, res.x.norm() / b.norm()) * 0.5;
        g2.max_iterations = opt.max_iterations - iters;
        auto res2 = gmres<cplx>(apply, b, res.x, g2);
        iters += res2.iterations;
        res = res2;
        r = mu_resid(res.x);
    }
    sol.mu = Field2D(op.grid, Eigen::Map<const CMatrix>(res.x.data(), n, n));
    sol.iterations = iters;
    sol.residual = r;
    sol.converged = std::isfinite(r) && r <= opt.tol;
    return sol;
}

namespace {
cplx quadrature(const Potential& p, const CGOSolution& sol, bool with_phase) {
    if (!sol.converged) throw NotConverged("scattering: CGO solution did not converge");
    const auto& g = sol.mu.grid();
    CMatrix q = potential_on_grid(p, g);
    double h = g.spacing();
    cplx acc = 0.0;
    for (int jy = 0; jy < g.n; ++jy)
        for (int jx = 0; jx < g.n; ++jx) {
            if (q(jy, jx) == 0.0) continue;
            cplx v = q(jy, jx) * sol.mu(jy, jx);
            if (with_phase) v *= std::exp(cplx(0.0, 2.0 * (sol.k * g.point(jy, jx)).real()));
            acc += v;
        }
    return h * h * acc;
}
}  // namespace

cplx scattering_t(const Potential& p, const CGOSolution& sol) { return quadrature(p, sol, true); }
cplx scattering_s(const Potential& p, const CGOSolution& sol) { return quadrature(p, sol, false); }

ScatteringData scatter_sweep(const Potential& p, const std::vector<cplx>& ks, ScatterMethod method,
                             const LsOptions& ls, const DnOptions& dno) {
    const size_t N = ks.size();
    ScatteringData out;
    out.k_points = ks;
    out.t_values.assign(N, 0.0);
    out.s_values.assign(N, 0.0);
    out.flags.assign(N, SampleFlag::skipped);
    out.iterations.assign(N, 0);
    out.residuals.assign(N, 0.0);

    bool dn_possible = p.support_radius < 1.0;
    if (method == ScatterMethod::dn && !dn_possible)
        throw InvalidArgument("DN method requires the potential supported in the unit disc");
    std::optional<DtoNMap> dn;
    auto use_dn = [&](cplx k) {
        if (method == ScatterMethod::dn) return true;
        return method == ScatterMethod::both && dn_possible && std::abs(k) < 0.5;
    };
    for (cplx k : ks)
        if (use_dn(k)) {
            dn = dn_map(p, dno.M, dno.radial);
            break;
        }

    parallel_for(static_cast<int>(N), [&](int i) {
        cplx k = ks[i];
        if (std::abs(k) < 0.05 && p.hint != Classification::critical) return;
        if (k == cplx(0.0, 0.0)) return;
        if (use_dn(k)) {
            BoundaryTrace tr = solve_cgo_boundary(*dn, k, dno.boundary_nodes);
            out.residuals[i] = tr.condition;
            if (!tr.ok) {
                out.flags[i] = SampleFlag::no_converge;
                return;
            }
            out.t_values[i] = scattering_t_dn(*dn, tr);
            out.flags[i] = SampleFlag::ok;
            return;
        }
        CGOSolution sol = solve_cgo_ls(p, k, ls);
        out.iterations[i] = sol.iterations;
        out.residuals[i] = sol.residual;
        if (!sol.converged) {
            out.flags[i] = SampleFlag::no_converge;
            return;
        }
        out.t_values[i] = scattering_t(p, sol);
        out.s_values[i] = scattering_s(p, sol);
        out.flags[i] = SampleFlag::ok;
    });
    return out;
}

}  // namespace nv
