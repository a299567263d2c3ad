#include "nv/grid.hpp"

#include <fftw3.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>

namespace nv {

namespace {

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;
};

std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

// Plans are created once per size with FFTW_ESTIMATE so results are bitwise reproducible.
const PlanPair& plans_for(int rows, int cols) {
    static std::map<std::pair<int, int>, PlanPair> cache;
    std::lock_guard<std::mutex> lock(plan_mutex());
    auto it = cache.find({rows, cols});
    if (it != cache.end()) return it->second;
    auto* buf = fftw_alloc_complex(static_cast<size_t>(rows) * cols);
    PlanPair p;
    unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    p.fwd = fftw_plan_dft_2d(rows, cols, buf, buf, FFTW_FORWARD, flags);
    p.inv = fftw_plan_dft_2d(rows, cols, buf, buf, FFTW_BACKWARD, flags);
    fftw_free(buf);
    return cache.emplace(std::make_pair(rows, cols), p).first->second;
}

fftw_complex* as_fftw(CMatrix& a) { return reinterpret_cast<fftw_complex*>(a.data()); }

template <class T>
void put(std::ostream& os, T v) {
    if constexpr (std::endian::native == std::endian::big) {
        unsigned char b[sizeof(T)];
        std::memcpy(b, &v, sizeof(T));
        for (size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
        os.write(reinterpret_cast<const char*>(b), sizeof(T));
    } else {
        os.write(reinterpret_cast<const char*>(&v), sizeof(T));
    }
}

template <class T>
T get(std::istream& is) {
    unsigned char b[sizeof(T)];
    is.read(reinterpret_cast<char*>(b), sizeof(T));
    if (!is) throw IOError("NVF1: truncated file");
    if constexpr (std::endian::native == std::endian::big)
        for (size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    T v;
    std::memcpy(&v, b, sizeof(T));
    return v;
}

const char kMagic[8] = {'N', 'V', 'F', '1', 0, 0, 0, 0};

}  // namespace

PeriodicGrid::PeriodicGrid(double L, int n_) : half_side(L), n(n_) {
    if (!(L > 0.0) || !std::isfinite(L)) throw InvalidArgument("PeriodicGrid: half side must be positive");
    if (n_ < 8 || !is_pow2(n_)) throw InvalidArgument("PeriodicGrid: n must be a power of two >= 8");
}

double PeriodicGrid::frequency(int j) const { return M_PI * wrap_index(j) / half_side; }

void enforce_real(Field2D& f, double rel_tol) {
    double re = 0.0, im = 0.0;
    for (Eigen::Index i = 0; i < f.samples().size(); ++i) {
        re = std::max(re, std::abs(f.samples().data()[i].real()));
        im = std::max(im, std::abs(f.samples().data()[i].imag()));
    }
    if (im > rel_tol * re && im > 1e-300)
        throw NonFinite("enforce_real: imaginary part " + std::to_string(im) + " exceeds tolerance");
    f.samples() = f.samples().real().cast<cplx>();
    f.set_real(true);
}

void fft_forward_inplace(CMatrix& a) {
    const auto& p = plans_for(static_cast<int>(a.rows()), static_cast<int>(a.cols()));
    fftw_execute_dft(p.fwd, as_fftw(a), as_fftw(a));
}

void fft_inverse_inplace(CMatrix& a) {
    const auto& p = plans_for(static_cast<int>(a.rows()), static_cast<int>(a.cols()));
    fftw_execute_dft(p.inv, as_fftw(a), as_fftw(a));
    a /= static_cast<double>(a.size());
}

CMatrix fft_forward(const CMatrix& a) {
    CMatrix b = a;
    fft_forward_inplace(b);
    return b;
}

CMatrix fft_inverse(const CMatrix& a) {
    CMatrix b = a;
    fft_inverse_inplace(b);
    return b;
}

CMatrix symbol_table(const PeriodicGrid& g, const SpectralMultiplier& m) {
    CMatrix s(g.n, g.n);
    for (int jy = 0; jy < g.n; ++jy) {
        double eta = g.frequency(jy);
        for (int jx = 0; jx < g.n; ++jx) {
            if (jx == 0 && jy == 0) {
                s(0, 0) = m.zero_mode;
                continue;
            }
            if (m.zero_nyquist && (jx == g.n / 2 || jy == g.n / 2)) {
                s(jy, jx) = 0.0;
                continue;
            }
            cplx v = m.symbol(g.frequency(jx), eta);
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw NonFiniteSymbol("apply_multiplier: symbol is not finite at a nonzero frequency");
            s(jy, jx) = v;
        }
    }
    return s;
}

Field2D apply_multiplier(const Field2D& f, const SpectralMultiplier& m) {
    CMatrix a = fft_forward(f.samples());
    a.array() *= symbol_table(f.grid(), m).array();
    fft_inverse_inplace(a);
    return Field2D(f.grid(), std::move(a));
}

SpectralMultiplier dbar_symbol() {
    return {[](double xi, double eta) { return cplx(0.0, 0.5) * cplx(xi, eta); }, 0.0, true};
}

SpectralMultiplier d_symbol() {
    return {[](double xi, double eta) { return cplx(0.0, 0.5) * cplx(xi, -eta); }, 0.0, true};
}

SpectralMultiplier laplacian_symbol() {
    return {[](double xi, double eta) { return cplx(-(xi * xi + eta * eta), 0.0); }, 0.0, false};
}

namespace {
Field2D keep_real(Field2D out, bool real) {
    if (real) enforce_real(out);
    return out;
}
}  // namespace

Field2D d_bar(const Field2D& f) { return apply_multiplier(f, dbar_symbol()); }
Field2D d(const Field2D& f) { return apply_multiplier(f, d_symbol()); }
Field2D laplacian(const Field2D& f) { return keep_real(apply_multiplier(f, laplacian_symbol()), f.is_real()); }

Field2D dx(const Field2D& f) {
    SpectralMultiplier m{[](double xi, double) { return cplx(0.0, xi); }, 0.0, true};
    return keep_real(apply_multiplier(f, m), f.is_real());
}

Field2D dy(const Field2D& f) {
    SpectralMultiplier m{[](double, double eta) { return cplx(0.0, eta); }, 0.0, true};
    return keep_real(apply_multiplier(f, m), f.is_real());
}

cplx integrate(const Field2D& f) {
    double h = f.grid().spacing();
    return h * h * f.samples().sum();
}

double l2_norm(const Field2D& f) {
    double h = f.grid().spacing();
    return std::sqrt(h * h * f.samples().squaredNorm());
}

double l2_norm_spectral(const Field2D& f) {
    double h = f.grid().spacing();
    CMatrix a = fft_forward(f.samples());
    return std::sqrt(h * h * a.squaredNorm() / static_cast<double>(a.size()));
}

double max_abs(const Field2D& f) { return f.samples().cwiseAbs().maxCoeff(); }

double rel_l2(const CMatrix& a, const CMatrix& ref) {
    double r = ref.norm();
    return r > 0 ? (a - ref).norm() / r : (a - ref).norm();
}

double rel_linf(const CMatrix& a, const CMatrix& ref) {
    double r = ref.cwiseAbs().maxCoeff();
    double e = (a - ref).cwiseAbs().maxCoeff();
    return r > 0 ? e / r : e;
}

void write_nvf(const std::string& path, const Field2D& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IOError("cannot open " + path + " for writing");
    os.write(kMagic, 8);
    put<uint32_t>(os, static_cast<uint32_t>(f.n()));
    put<double>(os, f.grid().half_side);
    for (int jy = 0; jy < f.n(); ++jy)
        for (int jx = 0; jx < f.n(); ++jx) {
            put<double>(os, f(jy, jx).real());
            put<double>(os, f(jy, jx).imag());
        }
    if (!os) throw IOError("write failed: " + path);
}

Field2D read_nvf(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IOError("cannot open " + path);
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kMagic, 8) != 0) throw IOError(path + ": not an NVF1 file");
    auto n = get<uint32_t>(is);
    auto L = get<double>(is);
    PeriodicGrid g(L, static_cast<int>(n));
    Field2D f(g);
    bool real = true;
    for (int jy = 0; jy < g.n; ++jy)
        for (int jx = 0; jx < g.n; ++jx) {
            double re = get<double>(is);
            double im = get<double>(is);
            f(jy, jx) = {re, im};
            if (im != 0.0) real = false;
        }
    f.set_real(real);
    return f;
}

namespace {
// Catmull-Rom weights for fractional offset t in [0,1).
void cr_weights(double t, double w[4]) {
    double t2 = t * t, t3 = t2 * t;
    w[0] = 0.5 * (-t3 + 2 * t2 - t);
    w[1] = 0.5 * (3 * t3 - 5 * t2 + 2);
    w[2] = 0.5 * (-3 * t3 + 4 * t2 + t);
    w[3] = 0.5 * (t3 - t2);
}
}  // namespace

cplx interpolate_bicubic(const Field2D& f, double x, double y) {
    const auto& g = f.grid();
    double h = g.spacing();
    double sx = (x + g.half_side) / h, sy = (y + g.half_side) / h;
    double fx = std::floor(sx), fy = std::floor(sy);
    int ix = static_cast<int>(fx), iy = static_cast<int>(fy);
    double wx[4], wy[4];
    cr_weights(sx - fx, wx);
    cr_weights(sy - fy, wy);
    auto wrap = [n = g.n](int j) { return ((j % n) + n) % n; };
    cplx acc = 0.0;
    for (int a = 0; a < 4; ++a) {
        int jy = wrap(iy - 1 + a);
        cplx row = 0.0;
        for (int b = 0; b < 4; ++b) row += wx[b] * f(jy, wrap(ix - 1 + b));
        acc += wy[a] * row;
    }
    return acc;
}

}  // namespace nv
