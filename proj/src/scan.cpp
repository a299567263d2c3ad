#include "nv/scan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/LU>

#include "nv/parallel.hpp"
#include "nv/solutions.hpp"
#include "nv/special.hpp"

namespace nv {

namespace {
double median_abs(const std::vector<cplx>& t, const std::vector<SampleFlag>& flags) {
    std::vector<double> mags;
    for (size_t i = 0; i < t.size(); ++i)
        if (flags[i] == SampleFlag::ok) mags.push_back(std::abs(t[i]));
    if (mags.empty()) return 0.0;
    std::nth_element(mags.begin(), mags.begin() + mags.size() / 2, mags.end());
    return mags[mags.size() / 2];
}
}  // namespace

ScanResult lambda_sweep(const std::vector<double>& lambdas, const std::vector<double>& ks, const ScanOptions& opt) {
    ScanResult r;
    r.lambdas = lambdas;
    r.k_samples = ks;
    const int nl = static_cast<int>(lambdas.size()), nk = static_cast<int>(ks.size());
    r.t_profiles = Eigen::MatrixXcd::Zero(nl, nk);
    r.flags.assign(nl, std::vector<SampleFlag>(nk, SampleFlag::skipped));
    r.singular_radii.assign(nl, {});
    if (opt.with_det2) r.det2 = Eigen::MatrixXd::Zero(nl, nk);
    PeriodicGrid g(opt.half_side, opt.n);
    PeriodicGrid gd(opt.half_side, opt.det2_n);
    for (int i = 0; i < nl; ++i) {
        Potential p = lambda_bump({lambdas[i]}, g);
        std::vector<cplx> kc(ks.begin(), ks.end());
        // DN below dn_below, LS above
        std::vector<cplx> k_dn, k_ls;
        std::vector<int> i_dn, i_ls;
        for (int j = 0; j < nk; ++j) {
            if (ks[j] < opt.dn_below && p.support_radius < 1.0) {
                k_dn.push_back(kc[j]);
                i_dn.push_back(j);
            } else {
                k_ls.push_back(kc[j]);
                i_ls.push_back(j);
            }
        }
        auto fill = [&](const ScatteringData& d, const std::vector<int>& idx) {
            for (size_t m = 0; m < idx.size(); ++m) {
                r.t_profiles(i, idx[m]) = d.t_values[m];
                r.flags[i][idx[m]] = d.flags[m];
            }
        };
        if (!k_dn.empty()) fill(scatter_sweep(p, k_dn, ScatterMethod::dn, opt.ls, opt.dn), i_dn);
        if (!k_ls.empty()) fill(scatter_sweep(p, k_ls, ScatterMethod::ls, opt.ls, opt.dn), i_ls);
        std::vector<cplx> prof(nk);
        for (int j = 0; j < nk; ++j) prof[j] = r.t_profiles(i, j);
        auto& radii = r.singular_radii[i];
        radii = detect_singularities(ks, prof, r.flags[i], opt.factor);
        if (opt.refine_depth > 0) {
            const double thr = opt.factor * median_abs(prof, r.flags[i]);
            auto t_of = [&](double k) {
                ScatteringData d = scatter_sweep(p, {cplx(k)}, ScatterMethod::ls, opt.ls, opt.dn);
                return std::pair{d.t_values[0], d.flags[0]};
            };
            for (int j = 0; j + 1 < nk; ++j) {
                if (r.flags[i][j] != SampleFlag::ok || r.flags[i][j + 1] != SampleFlag::ok) continue;
                cplx a = prof[j], b = prof[j + 1];
                if (a.real() * b.real() >= 0.0 || std::max(std::abs(a), std::abs(b)) <= thr) continue;
                if (std::min(std::abs(a), std::abs(b)) > thr) continue;  // already reported
                double k = refine_sign_jump(t_of, ks[j], a, ks[j + 1], b, thr, opt.refine_depth);
                if (!std::isnan(k)) radii.push_back(k);
            }
            std::sort(radii.begin(), radii.end());
        }
        if (opt.with_det2) {
            Potential pd = lambda_bump({lambdas[i]}, gd);
            parallel_for(nk, [&](int j) { r.det2(i, j) = det2(pd, ks[j]).value; });
        }
    }
    return r;
}

double refine_sign_jump(const std::function<std::pair<cplx, SampleFlag>(double)>& t_of, double k0, cplx t0, double k1,
                        cplx t1, double thr, int depth) {
    if (t0.real() * t1.real() >= 0.0) throw InvalidArgument("refine_sign_jump: no sign change in the bracket");
    for (int level = 0; level < depth; ++level) {
        if (std::abs(t0) > thr && std::abs(t1) > thr) return 0.5 * (k0 + k1);
        double km = 0.5 * (k0 + k1);
        auto [tm, flag] = t_of(km);
        if (flag != SampleFlag::ok) return km;
        if (t0.real() * tm.real() < 0.0) {
            k1 = km;
            t1 = tm;
        } else {
            k0 = km;
            t0 = tm;
        }
    }
    if (std::abs(t0) > thr && std::abs(t1) > thr) return 0.5 * (k0 + k1);
    return std::numeric_limits<double>::quiet_NaN();
}

std::vector<double> detect_singularities(const std::vector<double>& ks, const std::vector<cplx>& t,
                                         const std::vector<SampleFlag>& flags, double factor) {
    const size_t n = ks.size();
    if (t.size() != n || flags.size() != n) throw InvalidArgument("detect_singularities: size mismatch");
    std::vector<double> out;
    if (std::any_of(flags.begin(), flags.end(), [](SampleFlag f) { return f == SampleFlag::ok; })) {
        double thr = factor * median_abs(t, flags);
        for (size_t i = 0; i + 1 < n; ++i) {
            if (flags[i] != SampleFlag::ok || flags[i + 1] != SampleFlag::ok) continue;
            if (std::abs(t[i]) > thr && std::abs(t[i + 1]) > thr && t[i].real() * t[i + 1].real() < 0.0)
                out.push_back(0.5 * (ks[i] + ks[i + 1]));
        }
    }
    for (size_t i = 0; i < n;) {
        if (flags[i] != SampleFlag::no_converge) {
            ++i;
            continue;
        }
        size_t j = i;
        while (j + 1 < n && flags[j + 1] == SampleFlag::no_converge) ++j;
        out.push_back(0.5 * (ks[i] + ks[j]));
        i = j + 1;
    }
    std::sort(out.begin(), out.end());
    return out;
}

Det2Value det2(const Potential& p, cplx k, int max_n) {
    const auto& g = p.q.grid();
    if (g.n > max_n) throw MatrixTooLarge("det2: grid exceeds the dense-matrix limit");
    if (k == cplx(0.0)) throw DomainZero("det2: k = 0");
    std::vector<std::pair<int, int>> pts;
    std::vector<double> qv;
    for (int jy = 0; jy < g.n; ++jy)
        for (int jx = 0; jx < g.n; ++jx)
            if (p.q(jy, jx).real() != 0.0) {
                pts.emplace_back(jy, jx);
                qv.push_back(p.q(jy, jx).real());
            }
    Det2Value r;
    r.size = static_cast<int>(pts.size());
    if (pts.empty()) return r;
    // differences up to n - 1 cells in each direction
    GreenTable tab = make_green_table(k, PeriodicGrid(2.0 * g.half_side, 2 * g.n));
    const double h2 = g.spacing() * g.spacing();
    const int N = r.size, c = g.n;
    Eigen::MatrixXcd A(N, N);
    cplx trace = 0.0;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            int dy = pts[i].first - pts[j].first, dx = pts[i].second - pts[j].second;
            cplx kij = h2 * tab.samples(dy + c, dx + c) * qv[j];
            A(i, j) = (i == j ? 1.0 : 0.0) + kij;
            if (i == j) trace += kij;
        }
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
    const auto& U = lu.matrixLU();
    cplx logdet = std::log(cplx(lu.permutationP().determinant()));
    for (int i = 0; i < N; ++i) logdet += std::log(U(i, i));
    // T = -K, so exp(tr T) = exp(-tr K)
    cplx d = std::exp(logdet - trace);
    r.value = d.real();
    r.imag = d.imag();
    return r;
}

std::vector<double> sign_changes(const std::vector<double>& ks, const std::vector<double>& v) {
    std::vector<double> out;
    for (size_t i = 0; i + 1 < ks.size(); ++i)
        if (v[i] * v[i + 1] < 0.0) out.push_back(0.5 * (ks[i] + ks[i + 1]));
    return out;
}

Potential ring_scan_potential(int n) { return kdv_ring_potential(PeriodicGrid(88.0, n)); }

ScatteringData ring_profile(const std::vector<double>& ks, int n, const LsOptions& ls) {
    Potential p = ring_scan_potential(n);
    std::vector<cplx> kc(ks.begin(), ks.end());
    return scatter_sweep(p, kc, ScatterMethod::ls, ls);
}

}  // namespace nv
