#include <cmath>
#include <cstdio>
#include <random>

#include "doctest.h"
#include "nv/grid.hpp"

using namespace nv;

namespace {
const cplx I(0.0, 1.0);

Field2D plane_wave(const PeriodicGrid& g, double xi, double eta) {
    return Field2D::from_function(g, [&](cplx z) { return std::exp(I * (xi * z.real() + eta * z.imag())); });
}

Field2D smooth_field(const PeriodicGrid& g) {
    // band-limited: a few low modes
    return Field2D::from_function(
        g,
        [](cplx z) {
            double x = z.real(), y = z.imag();
            return std::cos(x) + 0.5 * std::sin(2.0 * y + x) + 0.25 * std::cos(3.0 * x - y) + 0.1;
        },
        true);
}
}  // namespace

TEST_CASE("grid rejects invalid sizes") {
    CHECK_THROWS_AS(PeriodicGrid(1.0, 12), InvalidArgument);
    CHECK_THROWS_AS(PeriodicGrid(1.0, 4), InvalidArgument);
    CHECK_THROWS_AS(PeriodicGrid(0.0, 16), InvalidArgument);
    PeriodicGrid g(M_PI, 16);
    CHECK(g.spacing() == doctest::Approx(2.0 * M_PI / 16));
    CHECK(g.frequency(1) == doctest::Approx(1.0));
    CHECK(g.frequency(15) == doctest::Approx(-1.0));
    CHECK(g.frequency(8) == doctest::Approx(-8.0));
}

TEST_CASE("plane wave derivatives") {
    PeriodicGrid g(M_PI, 32);
    Field2D f = plane_wave(g, 1.0, 0.0);
    CHECK(rel_l2(d_bar(f).samples(), (0.5 * I) * f.samples()) < 1e-12);
    CHECK(rel_l2(d(f).samples(), (0.5 * I) * f.samples()) < 1e-12);
    Field2D f2 = plane_wave(g, 1.0, 2.0);
    CHECK(rel_l2(laplacian(f2).samples(), -5.0 * f2.samples()) < 1e-12);
    // d = (dx - i dy)/2 on e^{i(x+2y)}: (i + 2)/2
    CHECK(rel_l2(d(f2).samples(), (0.5 * (I + 2.0)) * f2.samples()) < 1e-12);
    CHECK(rel_l2(d_bar(f2).samples(), (0.5 * (I - 2.0)) * f2.samples()) < 1e-12);
}

TEST_CASE("constant field has zero derivatives") {
    PeriodicGrid g(2.0, 16);
    Field2D c = Field2D::from_function(g, [](cplx) { return cplx(3.0, 0.0); }, true);
    CHECK(max_abs(d_bar(c)) < 1e-13);
    CHECK(max_abs(d(c)) < 1e-13);
    CHECK(max_abs(laplacian(c)) < 1e-13);
}

TEST_CASE("multiplier application") {
    PeriodicGrid g(M_PI, 32);
    Field2D f = smooth_field(g);
    SpectralMultiplier id{[](double, double) { return cplx(1.0); }, 1.0, false};
    CHECK(rel_l2(apply_multiplier(f, id).samples(), f.samples()) < 1e-13);

    SpectralMultiplier lap{[](double a, double b) { return cplx(-(a * a + b * b)); }, 0.0, false};
    Field2D e = plane_wave(g, 1.0, 0.0);
    CHECK(rel_l2(apply_multiplier(e, lap).samples(), -e.samples()) < 1e-12);

    SpectralMultiplier u1{[](double a, double b) { return cplx((a * a - b * b) / (a * a + b * b)); }, 0.0, false};
    Field2D w = plane_wave(g, 2.0, 1.0);
    CHECK(rel_l2(apply_multiplier(w, u1).samples(), (3.0 / 5.0) * w.samples()) < 1e-12);

    SpectralMultiplier bad{[](double a, double) { return cplx(1.0 / (a - 1.0)); }, 0.0, false};
    CHECK_THROWS_AS(apply_multiplier(w, bad), NonFiniteSymbol);
}

TEST_CASE("multiplier composition") {
    PeriodicGrid g(3.0, 32);
    Field2D f = smooth_field(g);
    SpectralMultiplier a{[](double x, double y) { return cplx(x, y); }, 0.0, false};
    SpectralMultiplier b{[](double x, double y) { return cplx(1.0 + x * x, -y); }, 2.0, false};
    SpectralMultiplier ab{[](double x, double y) { return cplx(x, y) * cplx(1.0 + x * x, -y); }, 0.0, false};
    CHECK(rel_l2(apply_multiplier(apply_multiplier(f, a), b).samples(), apply_multiplier(f, ab).samples()) < 1e-12);
}

TEST_CASE("d and d_bar commute and factor the Laplacian") {
    PeriodicGrid g(M_PI, 32);
    Field2D f = smooth_field(g);
    CMatrix lap4 = 0.25 * laplacian(f).samples();
    CHECK(rel_l2(d(d_bar(f)).samples(), lap4) < 1e-12);
    CHECK(rel_l2(d_bar(d(f)).samples(), lap4) < 1e-12);
}

TEST_CASE("real fields stay real under odd derivatives") {
    PeriodicGrid g(2.0, 16);
    std::mt19937 rng(7);
    std::normal_distribution<double> nd;
    Field2D f(g, true);
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) f(i, j) = nd(rng);
    Field2D fx = dx(f);
    CHECK(fx.samples().imag().cwiseAbs().maxCoeff() == 0.0);
    CHECK(fx.is_real());
}

TEST_CASE("quadrature") {
    PeriodicGrid g1(1.0, 16);
    Field2D one = Field2D::from_function(g1, [](cplx) { return cplx(1.0); }, true);
    CHECK(std::abs(integrate(one) - 4.0) < 1e-13);
    PeriodicGrid g(M_PI, 32);
    CHECK(std::abs(integrate(plane_wave(g, 1.0, 0.0))) < 1e-12);
    PeriodicGrid gg(8.0, 256);
    Field2D gauss = Field2D::from_function(gg, [](cplx z) { return std::exp(-std::norm(z)); }, true);
    CHECK(std::abs(integrate(gauss) - M_PI) < 1e-10);
}

TEST_CASE("Parseval") {
    PeriodicGrid g(2.5, 64);
    Field2D f = smooth_field(g);
    CHECK(std::abs(l2_norm(f) - l2_norm_spectral(f)) <= 1e-12 * l2_norm(f));
}

TEST_CASE("enforce_real") {
    PeriodicGrid g(1.0, 8);
    Field2D f(g, true);
    f(0, 0) = cplx(1.0, 1e-14);
    enforce_real(f);
    CHECK(f(0, 0).imag() == 0.0);
    f(0, 0) = cplx(1.0, 1e-6);
    CHECK_THROWS_AS(enforce_real(f), NonFinite);
}

TEST_CASE("NVF1 roundtrip is bit exact") {
    PeriodicGrid g(1.7, 16);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-1, 1);
    Field2D f(g);
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) f(i, j) = cplx(u(rng), u(rng));
    std::string path = "test_grid_roundtrip.nvf";
    write_nvf(path, f);
    Field2D r = read_nvf(path);
    CHECK(r.grid() == g);
    CHECK((r.samples().array() == f.samples().array()).all());
    std::remove(path.c_str());
    CHECK_THROWS_AS(read_nvf("does_not_exist.nvf"), IOError);
}

TEST_CASE("bicubic interpolation reproduces samples") {
    PeriodicGrid g(M_PI, 32);
    Field2D f = smooth_field(g);
    CHECK(std::abs(interpolate_bicubic(f, g.coord(5), g.coord(9)) - f(9, 5)) < 1e-14);
    double x = 0.3, y = -1.1;
    double exact = std::cos(x) + 0.5 * std::sin(2.0 * y + x) + 0.25 * std::cos(3.0 * x - y) + 0.1;
    CHECK(std::abs(interpolate_bicubic(f, x, y).real() - exact) < 1e-2);
}
