#include "nv/inverse.hpp"

#include <cmath>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include "nv/calderon.hpp"
#include "nv/parallel.hpp"

namespace nv {

double default_truncation_radius(const std::vector<double>& kabs, const std::vector<cplx>& t, double rel) {
    if (kabs.size() != t.size() || kabs.empty()) throw InvalidArgument("truncation radius: profile size mismatch");
    std::vector<double> ts(kabs.size());
    double mx = 0.0;
    for (size_t i = 0; i < kabs.size(); ++i) {
        ts[i] = kabs[i] > 0 ? std::abs(t[i]) / (4.0 * M_PI * kabs[i]) : 0.0;
        mx = std::max(mx, ts[i]);
    }
    if (mx == 0.0) return kabs.back();
    size_t i = kabs.size();
    while (i > 0 && ts[i - 1] < rel * mx) --i;
    return i < kabs.size() ? kabs[i] : kabs.back();
}

namespace {
CMatrix tsharp_samples(const PeriodicGrid& g, double R, const std::function<cplx(cplx)>& t) {
    CMatrix v = CMatrix::Zero(g.n, g.n);
    for (int jy = 0; jy < g.n; ++jy)
        for (int jx = 0; jx < g.n; ++jx) {
            cplx k = g.point(jy, jx);
            double r = std::abs(k);
            if (r == 0.0 || r > R) continue;
            v(jy, jx) = t(k) / (4.0 * M_PI * std::conj(k));
        }
    return v;
}
}  // namespace

TSharpField tsharp_from_profile(const std::vector<double>& kabs, const std::vector<cplx>& t, double R, int n) {
    const size_t m = kabs.size();
    if (m < 4 || t.size() != m) throw InvalidArgument("tsharp_from_profile: need at least 4 samples");
    const double dk = (kabs.back() - kabs.front()) / static_cast<double>(m - 1);
    for (size_t i = 0; i < m; ++i)
        if (std::abs(kabs[i] - (kabs.front() + i * dk)) > 1e-9 * std::max(1.0, kabs.back()))
            throw InvalidArgument("tsharp_from_profile: |k| samples must be uniform");
    if (R <= 0.0) R = default_truncation_radius(kabs, t);
    R = std::min(R, kabs.back());
    std::vector<double> re(m), im(m);
    for (size_t i = 0; i < m; ++i) {
        re[i] = t[i].real();
        im[i] = t[i].imag();
    }
    using Spline = boost::math::interpolators::cardinal_cubic_b_spline<double>;
    Spline sr(re.begin(), re.end(), kabs.front(), dk), si(im.begin(), im.end(), kabs.front(), dk);
    TSharpField ts;
    ts.truncation_radius = R;
    ts.k_grid = PeriodicGrid(R + 1.0, n);
    const double k0 = kabs.front();
    ts.values = tsharp_samples(ts.k_grid, R, [&](cplx k) {
        double r = std::max(std::abs(k), k0);
        return cplx(sr(r), si(r));
    });
    return ts;
}

TSharpField tsharp_from_field(const Field2D& t, double R) {
    TSharpField ts;
    ts.k_grid = t.grid();
    ts.truncation_radius = R > 0 ? R : t.grid().half_side * std::sqrt(2.0);
    const auto& g = t.grid();
    ts.values = CMatrix::Zero(g.n, g.n);
    for (int jy = 0; jy < g.n; ++jy)
        for (int jx = 0; jx < g.n; ++jx) {
            cplx k = g.point(jy, jx);
            if (k == cplx(0.0) || std::abs(k) > ts.truncation_radius) continue;
            ts.values(jy, jx) = t(jy, jx) / (4.0 * M_PI * std::conj(k));
        }
    return ts;
}

namespace {
cplx evolution_factor(cplx k, double tau) {
    double s = 2.0 * (k * k * k).real();  // k^3 + conj(k)^3
    return std::exp(cplx(0.0, tau * s));
}
}  // namespace

TSharpField evolve_scattering(const TSharpField& ts, double tau) {
    TSharpField out = ts;
    if (tau == 0.0) return out;
    const auto& g = ts.k_grid;
    for (int jy = 0; jy < g.n; ++jy)
        for (int jx = 0; jx < g.n; ++jx) out.values(jy, jx) *= evolution_factor(g.point(jy, jx), tau);
    return out;
}

namespace {

// a(k) = t#(k) exp(i tau(k^3+kb^3)) e_{-k}(z)
CMatrix dbar_coefficient(const TSharpField& ts, cplx z, double tau) {
    const auto& g = ts.k_grid;
    CMatrix a(g.n, g.n);
    for (int jy = 0; jy < g.n; ++jy)
        for (int jx = 0; jx < g.n; ++jx) {
            cplx v = ts.values(jy, jx);
            if (v == cplx(0.0)) {
                a(jy, jx) = 0.0;
                continue;
            }
            cplx k = g.point(jy, jx);
            double ph = -2.0 * (k * z).real();
            if (tau != 0.0) ph += 2.0 * tau * (k * k * k).real();
            a(jy, jx) = v * std::polar(1.0, ph);
        }
    return a;
}

}  // namespace

DbarSolution solve_dbar_k(const TSharpField& ts, cplx z, double tau, const DbarOptions& opt,
                          const Eigen::VectorXd* initial) {
    const auto& g = ts.k_grid;
    const int n = g.n;
    const Eigen::Index N = static_cast<Eigen::Index>(n) * n;
    DbarSolution sol;
    sol.z = z;
    CMatrix a = dbar_coefficient(ts, z, tau);
    if (a.cwiseAbs().maxCoeff() == 0.0) {
        sol.mu = Field2D(g, CMatrix::Ones(n, n));
        sol.converged = true;
        return sol;
    }
    auto P = CauchyConvolver::get(g, CauchyConvolver::Kind::cauchy);
    // x = [Re mu; Im mu]; A x = mu - P[a conj(mu)]
    auto apply = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
        CMatrix f(n, n);
        for (Eigen::Index i = 0; i < N; ++i) f.data()[i] = a.data()[i] * cplx(x[i], -x[N + i]);
        CMatrix pf = P->apply(f);
        y.resize(2 * N);
        for (Eigen::Index i = 0; i < N; ++i) {
            y[i] = x[i] - pf.data()[i].real();
            y[N + i] = x[N + i] - pf.data()[i].imag();
        }
    };
    Eigen::VectorXd b = Eigen::VectorXd::Zero(2 * N);
    b.head(N).setOnes();
    GmresOptions go{opt.restart, opt.tol, opt.max_iterations};
    auto res = gmres<double>(apply, b, initial ? *initial : b, go);
    CMatrix mu(n, n);
    for (Eigen::Index i = 0; i < N; ++i) mu.data()[i] = cplx(res.x[i], res.x[N + i]);
    sol.mu = Field2D(g, mu);
    sol.converged = res.converged && mu.allFinite();
    sol.iterations = res.iterations;
    sol.residual = res.residual;
    return sol;
}

double dbar_collocation_residual(const TSharpField& ts, const DbarSolution& s, double tau,
                                 const std::vector<std::pair<int, int>>& points) {
    const auto& g = ts.k_grid;
    CMatrix a = dbar_coefficient(ts, s.z, tau);
    CMatrix f = a.cwiseProduct(s.mu.samples().conjugate());
    const double h2 = g.spacing() * g.spacing();
    // P applied by direct summation; the singular cell is dropped, which the symmetric
    // neighbourhood makes accurate to O(h) at smooth f.
    double worst = 0.0;
    for (auto [py, px] : points) {
        cplx k = g.point(py, px);
        cplx acc = 0.0;
        for (int jy = 0; jy < g.n; ++jy)
            for (int jx = 0; jx < g.n; ++jx) {
                if ((jy == py && jx == px) || f(jy, jx) == cplx(0.0)) continue;
                acc += f(jy, jx) / (k - g.point(jy, jx));
            }
        acc *= h2 / M_PI;
        worst = std::max(worst, std::abs(s.mu(py, px) - 1.0 - acc));
    }
    return worst;
}

namespace {

struct LatticeSolves {
    CMatrix c;    // (1/pi) int a conj(mu) dk on the extended lattice
    CMatrix mu0;  // mu(z, 0)
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> ok;
};

// Solves on the z lattice extended by `ghost` layers.
LatticeSolves lattice_solves(const TSharpField& ts, const PeriodicGrid& zg, int ghost, double tau,
                             const DbarOptions& opt) {
    const int m = zg.n + 2 * ghost;
    LatticeSolves out;
    out.c = CMatrix::Zero(m, m);
    out.mu0 = CMatrix::Zero(m, m);
    out.ok.setConstant(m, m, false);
    const auto& kg = ts.k_grid;
    const double h2 = kg.spacing() * kg.spacing();
    const int i0 = kg.n / 2;
    parallel_for(m * m, [&](int idx) {
        int ey = idx / m, ex = idx % m;
        cplx z(zg.coord(ex - ghost), zg.coord(ey - ghost));
        DbarSolution s = solve_dbar_k(ts, z, tau, opt);
        if (!s.converged) return;
        CMatrix a = dbar_coefficient(ts, z, tau);
        cplx acc = (a.array() * s.mu.samples().array().conjugate()).sum();
        out.c(ey, ex) = acc * h2 / M_PI;
        out.mu0(ey, ex) = s.mu(i0, i0);
        out.ok(ey, ex) = true;
    });
    return out;
}

}  // namespace

ReconstructionResult reconstruct_q(const TSharpField& ts, const PeriodicGrid& zg, double tau,
                                   const DbarOptions& opt) {
    const int G = 2, n = zg.n;
    LatticeSolves ls = lattice_solves(ts, zg, G, tau, opt);
    ReconstructionResult r;
    r.method = ReconstructionMethod::q_formula;
    r.q = Field2D(zg, true);
    r.mu0 = Field2D(zg);
    r.valid.setConstant(n, n, false);
    const double h = zg.spacing();
    const double w[5] = {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12};
    for (int jy = 0; jy < n; ++jy)
        for (int jx = 0; jx < n; ++jx) {
            int ey = jy + G, ex = jx + G;
            bool ok = true;
            cplx cx = 0.0, cy = 0.0;
            for (int s = -2; s <= 2; ++s) {
                ok = ok && ls.ok(ey, ex + s) && ls.ok(ey + s, ex);
                cx += w[s + 2] * ls.c(ey, ex + s);
                cy += w[s + 2] * ls.c(ey + s, ex);
            }
            r.mu0(jy, jx) = ls.mu0(ey, ex);
            if (!ok) {
                ++r.failures;
                continue;
            }
            cplx dbar = 0.5 * (cx + cplx(0.0, 1.0) * cy) / h;
            r.q(jy, jx) = cplx(0.0, 4.0) * dbar;
            r.valid(jy, jx) = true;
        }
    return r;
}

ReconstructionResult reconstruct_conductivity(const TSharpField& ts, const PeriodicGrid& zg, double tau,
                                              const DbarOptions& opt) {
    const int G = 1, n = zg.n;
    LatticeSolves ls = lattice_solves(ts, zg, G, tau, opt);
    for (int i = 0; i < ls.mu0.rows(); ++i)
        for (int j = 0; j < ls.mu0.cols(); ++j) {
            if (!ls.ok(i, j)) continue;
            cplx m = ls.mu0(i, j);
            if (!(m.real() > 0.0) || std::abs(m.imag()) > 0.01 * std::abs(m))
                throw NotConductivityType("reconstruct_conductivity: mu(z,0) is not real and positive");
        }
    ReconstructionResult r;
    r.method = ReconstructionMethod::conductivity;
    r.q = Field2D(zg, true);
    r.mu0 = Field2D(zg);
    r.valid.setConstant(n, n, false);
    const double h = zg.spacing();
    for (int jy = 0; jy < n; ++jy)
        for (int jx = 0; jx < n; ++jx) {
            int ey = jy + G, ex = jx + G;
            r.mu0(jy, jx) = ls.mu0(ey, ex).real();
            bool ok = ls.ok(ey, ex) && ls.ok(ey - 1, ex) && ls.ok(ey + 1, ex) && ls.ok(ey, ex - 1) && ls.ok(ey, ex + 1);
            if (!ok) {
                ++r.failures;
                continue;
            }
            double lap = (ls.mu0(ey - 1, ex).real() + ls.mu0(ey + 1, ex).real() + ls.mu0(ey, ex - 1).real() +
                          ls.mu0(ey, ex + 1).real() - 4.0 * ls.mu0(ey, ex).real()) /
                         (h * h);
            r.q(jy, jx) = lap / ls.mu0(ey, ex).real();
            r.valid(jy, jx) = true;
        }
    return r;
}

}  // namespace nv
