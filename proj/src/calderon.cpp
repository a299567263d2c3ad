#include "nv/calderon.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

namespace nv {

namespace {

// Fourier transform of the truncated kernel at frequency (xi, eta).
cplx truncated_symbol(CauchyConvolver::Kind kind, double xi, double eta, double R) {
    double rho = std::hypot(xi, eta);
    if (rho == 0.0) return 0.0;
    double cut = 1.0 - std::cyl_bessel_j(0.0, rho * R);
    const cplx I(0.0, 1.0);
    switch (kind) {
        case CauchyConvolver::Kind::cauchy: return 2.0 * cut / (I * cplx(xi, eta));
        case CauchyConvolver::Kind::cauchy_conj: return 2.0 * cut / (I * cplx(xi, -eta));
        default: return cut * cplx(xi, -eta) / cplx(xi, eta);
    }
}

}  // namespace

CauchyConvolver::CauchyConvolver(const PeriodicGrid& g, Kind kind) : grid_(g) {
    const int n = g.n, M = 4 * n, N = 2 * n;
    const double h = g.spacing();
    const double R = 2.0 * std::sqrt(2.0) * g.half_side;
    const double dxi = 2.0 * M_PI / (M * h);
    CMatrix big(M, M);
    for (int jy = 0; jy < M; ++jy) {
        double eta = dxi * (jy < M / 2 ? jy : jy - M);
        for (int jx = 0; jx < M; ++jx) {
            double xi = dxi * (jx < M / 2 ? jx : jx - M);
            big(jy, jx) = truncated_symbol(kind, xi, eta, R);
        }
    }
    // Back to real space: samples of the band-limited kernel times h^2 integration weight
    // (inverse FFT gives (1/(M h)^2) sum, i.e. kernel values times h^2).
    fft_inverse_inplace(big);
    big /= (h * h);
    CMatrix ker(N, N);
    for (int jy = 0; jy < N; ++jy) {
        int sy = jy < n ? jy : M - (N - jy);
        for (int jx = 0; jx < N; ++jx) {
            int sx = jx < n ? jx : M - (N - jx);
            ker(jy, jx) = big(sy, sx) * (h * h);
        }
    }
    kernel_hat_ = fft_forward(ker);
}

CMatrix CauchyConvolver::apply(const CMatrix& f) const {
    const int n = grid_.n, N = 2 * n;
    CMatrix pad = CMatrix::Zero(N, N);
    pad.topLeftCorner(n, n) = f;
    fft_forward_inplace(pad);
    pad.array() *= kernel_hat_.array();
    fft_inverse_inplace(pad);
    return pad.topLeftCorner(n, n);
}

std::shared_ptr<const CauchyConvolver> CauchyConvolver::get(const PeriodicGrid& g, Kind kind) {
    static std::mutex m;
    static std::map<std::tuple<double, int, int>, std::shared_ptr<const CauchyConvolver>> cache;
    auto key = std::make_tuple(g.half_side, g.n, static_cast<int>(kind));
    {
        std::lock_guard<std::mutex> lock(m);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    auto conv = std::make_shared<const CauchyConvolver>(g, kind);
    std::lock_guard<std::mutex> lock(m);
    return cache.emplace(key, conv).first->second;
}

void check_support(const Field2D& f) {
    const auto& g = f.grid();
    double total = 0.0, edge = 0.0, lim = 0.75 * g.half_side;
    for (int jy = 0; jy < g.n; ++jy)
        for (int jx = 0; jx < g.n; ++jx) {
            double a = std::abs(f(jy, jx));
            total += a;
            if (std::max(std::abs(g.coord(jx)), std::abs(g.coord(jy))) > lim) edge += a;
        }
    if (total > 0.0 && edge > 1e-8 * total)
        throw SupportViolation("input mass near the grid boundary: fraction " + std::to_string(edge / total));
}

namespace {
Field2D convolve(const Field2D& f, CauchyConvolver::Kind kind) {
    check_support(f);
    auto conv = CauchyConvolver::get(f.grid(), kind);
    return Field2D(f.grid(), conv->apply(f.samples()));
}
}  // namespace

Field2D cauchy_transform(const Field2D& f) { return convolve(f, CauchyConvolver::Kind::cauchy); }
Field2D cauchy_transform_conj(const Field2D& f) { return convolve(f, CauchyConvolver::Kind::cauchy_conj); }
Field2D beurling_transform(const Field2D& f) { return convolve(f, CauchyConvolver::Kind::beurling); }
Field2D aux_field_u(const Field2D& q) { return beurling_transform(q); }

}  // namespace nv
