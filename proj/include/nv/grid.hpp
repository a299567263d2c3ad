#ifndef NV_GRID_HPP
#define NV_GRID_HPP

#include <complex>
#include <functional>
#include <string>

#include <Eigen/Dense>

#include "nv/errors.hpp"

namespace nv {

using cplx = std::complex<double>;

// Square periodic grid on [-L, L]^2 with n samples per axis.
struct PeriodicGrid {
    double half_side = 1.0;
    int n = 8;

    PeriodicGrid() = default;
    PeriodicGrid(double L, int n_);

    double spacing() const { return 2.0 * half_side / n; }
    double coord(int j) const { return -half_side + j * spacing(); }
    // Physical frequency of FFT index j (standard wrap layout).
    double frequency(int j) const;
    int wrap_index(int j) const { return j < n / 2 ? j : j - n; }
    double area() const { return 4.0 * half_side * half_side; }
    cplx point(int jy, int jx) const { return {coord(jx), coord(jy)}; }

    bool operator==(const PeriodicGrid& o) const { return half_side == o.half_side && n == o.n; }
    bool operator!=(const PeriodicGrid& o) const { return !(*this == o); }
};

// Samples on a PeriodicGrid. Row index is j_y, column index is j_x.
template <class Scalar>
class Field {
public:
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

    Field() = default;
    explicit Field(const PeriodicGrid& g, bool real = false)
        : grid_(g), samples_(Matrix::Zero(g.n, g.n)), real_(real) {}
    Field(const PeriodicGrid& g, Matrix m, bool real = false)
        : grid_(g), samples_(std::move(m)), real_(real) {
        if (samples_.rows() != g.n || samples_.cols() != g.n)
            throw InvalidArgument("Field: sample matrix does not match grid size");
    }

    const PeriodicGrid& grid() const { return grid_; }
    int n() const { return grid_.n; }
    const Matrix& samples() const { return samples_; }
    Matrix& samples() { return samples_; }
    Scalar& operator()(int jy, int jx) { return samples_(jy, jx); }
    const Scalar& operator()(int jy, int jx) const { return samples_(jy, jx); }

    bool is_real() const { return real_; }
    void set_real(bool r) { real_ = r; }

    // Fill from a function of the point z = x + iy.
    template <class F>
    static Field from_function(const PeriodicGrid& g, F&& f, bool real = false) {
        Field out(g, real);
        for (int jy = 0; jy < g.n; ++jy)
            for (int jx = 0; jx < g.n; ++jx) out.samples_(jy, jx) = Scalar(f(g.point(jy, jx)));
        return out;
    }

private:
    PeriodicGrid grid_;
    Matrix samples_;
    bool real_ = false;
};

using Field2D = Field<cplx>;
using CMatrix = Field2D::Matrix;

// Drops imaginary parts of a real-tagged field once they are at roundoff level.
// Throws NonFinite when the field is not real within the 1e-12 tolerance.
void enforce_real(Field2D& f, double rel_tol = 1e-12);

struct SpectralMultiplier {
    std::function<cplx(double xi, double eta)> symbol;
    cplx zero_mode = 0.0;
    bool zero_nyquist = false;
};

// Forward/inverse 2-D FFT in standard layout; inverse is normalised by 1/n^2.
CMatrix fft_forward(const CMatrix& a);
CMatrix fft_inverse(const CMatrix& a);
void fft_forward_inplace(CMatrix& a);
void fft_inverse_inplace(CMatrix& a);

// Symbol samples in FFT layout for the grid.
CMatrix symbol_table(const PeriodicGrid& g, const SpectralMultiplier& m);

Field2D apply_multiplier(const Field2D& f, const SpectralMultiplier& m);
Field2D d_bar(const Field2D& f);
Field2D d(const Field2D& f);
Field2D laplacian(const Field2D& f);
Field2D dx(const Field2D& f);
Field2D dy(const Field2D& f);

SpectralMultiplier dbar_symbol();
SpectralMultiplier d_symbol();
SpectralMultiplier laplacian_symbol();

cplx integrate(const Field2D& f);
double l2_norm(const Field2D& f);
double l2_norm_spectral(const Field2D& f);
double max_abs(const Field2D& f);

// Relative L2 and max-norm differences.
double rel_l2(const CMatrix& a, const CMatrix& ref);
double rel_linf(const CMatrix& a, const CMatrix& ref);

void write_nvf(const std::string& path, const Field2D& f);
Field2D read_nvf(const std::string& path);

// Bicubic (Catmull-Rom) periodic interpolation at a physical point.
cplx interpolate_bicubic(const Field2D& f, double x, double y);

}  // namespace nv

#endif
