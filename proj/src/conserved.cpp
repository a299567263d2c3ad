#include <cmath>

#include "nv/calderon.hpp"
#include "nv/scatter.hpp"

namespace nv {

std::vector<cplx> conserved_quantities(const Potential& p, int j_max) {
    if (j_max < 0 || j_max > 2) throw InvalidArgument("conserved_quantities: j_max must be 0, 1 or 2");
    const Field2D& q = p.q;
    std::vector<cplx> s;
    s.push_back(integrate(q));
    if (j_max == 0) return s;
    const cplx inv4i = 1.0 / cplx(0.0, 4.0);
    Field2D a1(q.grid(), inv4i * cauchy_transform(q).samples());
    s.push_back(integrate(Field2D(q.grid(), q.samples().cwiseProduct(a1.samples()))));
    if (j_max == 1) return s;
    // i d a1 = (1/4) d P q = (1/4) S q
    CMatrix a2 = 0.25 * beurling_transform(q).samples();
    a2 += inv4i * cauchy_transform(Field2D(q.grid(), q.samples().cwiseProduct(a1.samples()))).samples();
    s.push_back(integrate(Field2D(q.grid(), q.samples().cwiseProduct(a2))));
    return s;
}

LargeKReport large_k_expansion_check(const Potential& p, const std::vector<CGOSolution>& sols) {
    LargeKReport rep;
    if (sols.empty()) return rep;
    for (const auto& s : sols)
        if (!s.converged) throw NotConverged("large_k_expansion_check: unconverged solution");
    const PeriodicGrid g = sols.front().mu.grid();
    Field2D qg(g, potential_on_grid(p, g), true);
    CMatrix c0 = cplx(0.0, -0.25) * cauchy_transform(qg).samples();

    // comparisons restricted to the support disc, where the periodic LS solution is exact
    std::vector<std::pair<int, int>> pts;
    for (int jy = 0; jy < g.n; ++jy)
        for (int jx = 0; jx < g.n; ++jx)
            if (std::abs(g.point(jy, jx)) <= p.support_radius) pts.emplace_back(jy, jx);
    auto rel = [&](const CMatrix& a) {
        double num = 0.0, den = 0.0;
        for (auto [jy, jx] : pts) {
            num += std::norm(a(jy, jx) - c0(jy, jx));
            den += std::norm(c0(jy, jx));
        }
        return den > 0 ? std::sqrt(num / den) : std::sqrt(num);
    };

    size_t imax = 0;
    for (size_t i = 1; i < sols.size(); ++i)
        if (std::abs(sols[i].k) > std::abs(sols[imax].k)) imax = i;
    auto scaled = [&](const CGOSolution& s) {
        CMatrix a = s.mu.samples();
        a.array() -= 1.0;
        return CMatrix(s.k * a);
    };
    rep.deviation_at_max_k = rel(scaled(sols[imax]));

    // Polynomial extrapolation in 1/k to 1/k = 0 through all supplied k.
    const size_t m = sols.size();
    CMatrix fit = CMatrix::Zero(g.n, g.n);
    for (size_t i = 0; i < m; ++i) {
        cplx w = 1.0;
        cplx xi = 1.0 / sols[i].k;
        for (size_t j = 0; j < m; ++j)
            if (j != i) {
                cplx xj = 1.0 / sols[j].k;
                w *= -xj / (xi - xj);
            }
        fit += w * scaled(sols[i]);
    }
    rep.fitted_deviation = rel(fit);

    if (m >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (const auto& s : sols) {
            CMatrix a = s.mu.samples();
            a.array() -= 1.0;
            double x = std::log(std::abs(s.k));
            double y = std::log(std::max(a.cwiseAbs().maxCoeff(), 1e-300));
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        double dm = static_cast<double>(m);
        rep.decay_exponent = (dm * sxy - sx * sy) / (dm * sxx - sx * sx);
    }
    return rep;
}

}  // namespace nv
