#include "nv/solutions.hpp"

#include <cmath>

namespace nv {

double dispersion(double k1, double k2) { return -0.25 * k1 * k1 * k1 + 0.75 * k1 * k2 * k2; }

std::array<double, 2> phase_velocity(double k1, double k2) {
    double r2 = k1 * k1 + k2 * k2;
    if (r2 == 0.0) throw DomainZero("phase velocity undefined at k = 0");
    double w = dispersion(k1, k2);
    return {w / r2 * k1, w / r2 * k2};
}

std::array<double, 2> group_velocity(double k1, double k2) {
    return {0.75 * (-k1 * k1 + k2 * k2), 0.75 * 2.0 * k1 * k2};
}

Triple ClosedFormSolution::operator()(double x, double y, double t) const {
    if (singular && singular(x, y, t)) throw SingularPoint("closed-form solution evaluated on its singular set");
    return evaluator(x, y, t);
}

namespace {
double sech2(double a) {
    double c = std::cosh(a);
    return std::isfinite(c) ? 1.0 / (c * c) : 0.0;
}
}  // namespace

ClosedFormSolution kdv_soliton(double c) {
    if (!(c > 0.0)) throw InvalidArgument("kdv_soliton: c must be positive");
    ClosedFormSolution s;
    s.evaluator = [c](double x, double, double t) {
        double q = -2.0 * c * sech2(std::sqrt(c) * (x - c * t));
        return Triple{q, q, 0.0};
    };
    return s;
}

double kdv_kappa(double alpha) { return std::cos(3.0 * alpha); }

ClosedFormSolution planar_kdv(double alpha, std::function<double(double, double)> v) {
    ClosedFormSolution s;
    double ca = std::cos(alpha), sa = std::sin(alpha), kappa = kdv_kappa(alpha);
    double c2 = std::cos(2.0 * alpha), s2 = std::sin(2.0 * alpha);
    s.evaluator = [=](double x, double y, double t) {
        double q = v(x * ca + y * sa, kappa * t);
        return Triple{q, c2 * q, -s2 * q};
    };
    return s;
}

double kdv_reduction_check(double alpha, std::function<double(double, double)> v, double t) {
    auto s = planar_kdv(alpha, std::move(v));
    return nv_residual(s, -3.0, 3.0, -3.0, 3.0, t).max();
}

Field2D kdv_ring(const PeriodicGrid& g, double amplitude, double radius, double width) {
    if (g.half_side < 2.0 * radius) throw GridTooSmall("kdv_ring: need L >= 2 * radius");
    return Field2D::from_function(
        g, [=](cplx z) { return -amplitude * sech2((std::abs(z) - radius) / width); }, true);
}

Potential kdv_ring_potential(const PeriodicGrid& g, double amplitude, double radius, double width) {
    Potential p;
    p.q = Field2D::from_function(
        g, [=](cplx z) { return -amplitude * sech2((std::abs(z) - radius) / width); }, true);
    p.hint = Classification::supercritical;
    p.support_radius = support_radius_for(p.q);
    p.analytic = [=](double x, double y) { return -amplitude * sech2((std::hypot(x, y) - radius) / width); };
    validate_potential(p);
    return p;
}

double hirota_a12(double k1, double k2) {
    if (k1 + k2 == 0.0) throw DegenerateParams("hirota: k1 + k2 = 0");
    return (k1 - k2) * (k1 - k2) / ((k1 + k2) * (k1 + k2));
}

namespace {
// 2 (log f)_ss for f = sum_j c_j exp(e_j), written without cancellation:
// (log f)'' = sum_{i<j} c_i c_j (kap_i - kap_j)^2 e^{e_i + e_j} / f^2.
template <size_t N>
double log_second_derivative(const std::array<double, N>& c, const std::array<double, N>& e,
                             const std::array<double, N>& kap) {
    double emax = -INFINITY;
    for (size_t j = 0; j < N; ++j)
        if (c[j] != 0.0) emax = std::max(emax, e[j]);
    if (!std::isfinite(emax)) return 0.0;
    double f = 0.0;
    std::array<double, N> w{};
    for (size_t j = 0; j < N; ++j) {
        w[j] = c[j] == 0.0 ? 0.0 : c[j] * std::exp(e[j] - emax);
        f += w[j];
    }
    double acc = 0.0;
    for (size_t i = 0; i < N; ++i)
        for (size_t j = i + 1; j < N; ++j) acc += w[i] * w[j] * (kap[i] - kap[j]) * (kap[i] - kap[j]);
    return 2.0 * acc / (f * f);
}
}  // namespace

ClosedFormSolution hirota(int n_solitons, const HirotaParams& p) {
    ClosedFormSolution s;
    s.convention = Convention::hirota;
    if (n_solitons == 1) {
        if (p.k1 == 0.0) throw DegenerateParams("hirota: k = 0");
        double k = p.k1, C = p.C1;
        s.evaluator = [k, C](double x, double y, double t) {
            double th = k * (x + y) + k * k * k * t / 2.0;
            double q = log_second_derivative<2>({1.0, C}, {0.0, th}, {0.0, k});
            return Triple{q, q, q};
        };
    } else if (n_solitons == 2) {
        if (p.k1 == 0.0 || p.k2 == 0.0) throw DegenerateParams("hirota: k = 0");
        double a12 = hirota_a12(p.k1, p.k2);
        HirotaParams hp = p;
        s.evaluator = [hp, a12](double x, double y, double t) {
            double sxy = x + y;
            double t1 = hp.k1 * sxy + hp.k1 * hp.k1 * hp.k1 * t / 2.0;
            double t2 = hp.k2 * sxy + hp.k2 * hp.k2 * hp.k2 * t / 2.0;
            double q = log_second_derivative<4>({1.0, hp.C1, hp.C2, a12 * hp.C1 * hp.C2}, {0.0, t1, t2, t1 + t2},
                                                {0.0, hp.k1, hp.k2, hp.k1 + hp.k2});
            return Triple{q, q, q};
        };
    } else {
        throw InvalidArgument("hirota: only 1- and 2-soliton solutions are available");
    }
    return s;
}

ClosedFormSolution to_canonical(const ClosedFormSolution& s) {
    if (s.convention == Convention::canonical) return s;
    ClosedFormSolution c = s;
    c.convention = Convention::canonical;
    auto ev = s.evaluator;
    c.evaluator = [ev](double x, double y, double t) {
        Triple h = ev(x, y, t);
        return Triple{-2.0 * h.q, 0.0, 2.0 * h.q};
    };
    return c;
}

ClosedFormSolution ema_solution(EmaKind kind, double C) {
    ClosedFormSolution s;
    s.singular_set = "y = 0 or 12 y^2 = 1";
    s.singular = [](double, double y, double) {
        return std::abs(y) < 1e-12 || std::abs(12.0 * y * y - 1.0) < 1e-12;
    };
    bool breather = kind == EmaKind::breather;
    s.evaluator = [C, breather](double x, double y, double t) {
        double y2 = y * y, y4 = y2 * y2, y6 = y4 * y2;
        double A = breather ? 1.0 + x + y2 + 4.0 * std::cos(t) : x + y2;
        double T = std::tanh(A), T2 = T * T;
        double rat = (-1728.0 * y6 + (-96.0 + 1728.0 * C) * y4 + (-40.0 + 288.0 * C) * y2 - 36.0 * C + 5.0) /
                     (432.0 * y4 - 36.0 * y2);
        double vnum = 144.0 * y4 + (-12.0 + 432.0 * C) * y2 - 36.0 * C + 5.0;
        if (breather) vnum -= 192.0 * std::sin(t) * y2;
        Triple r;
        r.q = rat - 4.0 * T + (2.0 + 8.0 * y2) * T2;
        r.u1 = vnum / (36.0 * y2) + 4.0 * T + (2.0 - 8.0 * y2) * T2;
        r.u2 = 8.0 * y - 8.0 * y * T2;
        return r;
    };
    return s;
}

namespace {
const double kD1[7] = {-1.0 / 60, 9.0 / 60, -45.0 / 60, 0.0, 45.0 / 60, -9.0 / 60, 1.0 / 60};
const double kD2[7] = {1.0 / 90, -3.0 / 20, 3.0 / 2, -49.0 / 18, 3.0 / 2, -3.0 / 20, 1.0 / 90};
const double kD3[9] = {-7.0 / 240, 3.0 / 10, -169.0 / 120, 61.0 / 30, 0.0, -61.0 / 30, 169.0 / 120, -3.0 / 10, 7.0 / 240};
}  // namespace

ResidualReport nv_residual(const ClosedFormSolution& s, double x0, double x1, double y0, double y1, double t,
                           int nx, int ny, double h) {
    ResidualReport rep;
    const double E = s.energy;
    auto T = [&](double x, double y, double tt) { return s(x, y, tt); };
    for (int a = 0; a < nx; ++a)
        for (int b = 0; b < ny; ++b) {
            double x = nx > 1 ? x0 + (x1 - x0) * a / (nx - 1) : x0;
            double y = ny > 1 ? y0 + (y1 - y0) * b / (ny - 1) : y0;
            double qt = 0, qxxx = 0, qxyy = 0, fx = 0, gy = 0;
            double qx = 0, qy = 0, u1x = 0, u1y = 0, u2x = 0, u2y = 0;
            for (int j = -3; j <= 3; ++j) {
                double w = kD1[j + 3] / h;
                if (w == 0.0) continue;
                qt += w * T(x, y, t + j * h).q;
                Triple px = T(x + j * h, y, t), py = T(x, y + j * h, t);
                fx += w * (px.q - E) * px.u1;
                gy += w * (py.q - E) * py.u2;
                qx += w * px.q;
                qy += w * py.q;
                u1x += w * px.u1;
                u2x += w * px.u2;
                u1y += w * py.u1;
                u2y += w * py.u2;
                double yy = 0.0;
                for (int i = -3; i <= 3; ++i) yy += kD2[i + 3] / (h * h) * T(x + j * h, y + i * h, t).q;
                qxyy += w * yy;
            }
            for (int j = -4; j <= 4; ++j) qxxx += kD3[j + 4] / (h * h * h) * T(x + j * h, y, t).q;
            double rhs = -0.25 * qxxx + 0.75 * qxyy + 0.75 * (fx + gy);
            rep.main = std::max(rep.main, std::abs(qt - rhs));
            double aux;
            if (s.convention == Convention::canonical)
                aux = std::max(std::abs(u1x - u2y - qx), std::abs(u2x + u1y + qy));
            else
                aux = std::max(std::abs(qx - u1y), std::abs(qy - u2x));
            rep.aux = std::max(rep.aux, aux);
            rep.scale = std::max({rep.scale, std::abs(qt), std::abs(qxxx), std::abs(qxyy), std::abs(fx), std::abs(gy)});
        }
    return rep;
}

Field2D sample_q(const ClosedFormSolution& s, const PeriodicGrid& g, double t, int images) {
    double P = 2.0 * g.half_side;
    return Field2D::from_function(
        g,
        [&](cplx z) {
            double acc = 0.0;
            for (int j = -images; j <= images; ++j) acc += s(z.real() + j * P, z.imag(), t).q;
            return acc;
        },
        true);
}

namespace {
double smooth_step(double u) {
    // 0 for u <= 0, 1 for u >= 1, C-infinity in between
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    double a = std::exp(-1.0 / u), b = std::exp(-1.0 / (1.0 - u));
    return a / (a + b);
}

// 4th-order central Laplacian of an exactly known function
double fd_laplacian(const std::function<double(double, double)>& f, double x, double y, double d = 1e-3) {
    const double c[5] = {-1.0 / 12, 4.0 / 3, -5.0 / 2, 4.0 / 3, -1.0 / 12};
    double acc = 0.0;
    for (int j = -2; j <= 2; ++j) acc += c[j + 2] * (f(x + j * d, y) + f(x, y + j * d));
    return acc / (d * d);
}
}  // namespace

double gaussian_sigma(double x, double y, const SigmaSpec& s) {
    double r = std::hypot(x, y);
    double chi = smooth_step((s.cutoff_outer - r) / (s.cutoff_outer - s.cutoff_inner));
    return 1.0 + s.amplitude * std::exp(-r * r / (s.width * s.width)) * chi;
}

PeriodicGrid default_fixture_grid(int n) { return PeriodicGrid(1.8, n); }

Potential conductivity_fixture(ConductivityKind kind, const PeriodicGrid& g, const SigmaSpec& spec,
                               std::function<double(double, double)> sigma) {
    if (kind == ConductivityKind::gaussian_sigma) {
        if (spec.amplitude <= -1.0) throw NonPositiveSigma("gaussian_sigma: amplitude must exceed -1");
        sigma = [spec](double x, double y) { return gaussian_sigma(x, y, spec); };
    } else if (!sigma) {
        throw InvalidArgument("conductivity_fixture: custom kind needs a sigma function");
    }
    Field2D root(g, true);
    for (int jy = 0; jy < g.n; ++jy)
        for (int jx = 0; jx < g.n; ++jx) {
            double s = sigma(g.coord(jx), g.coord(jy));
            if (!(s > 0.0)) throw NonPositiveSigma("conductivity_fixture: sigma must be positive");
            root(jy, jx) = std::sqrt(s);
        }
    Field2D lap = laplacian(root);
    Potential p;
    p.q = Field2D(g, lap.samples().cwiseQuotient(root.samples()), true);
    enforce_real(p.q);
    // q vanishes identically where sigma = 1; drop the spectral roundoff floor there
    for (int jy = 0; jy < g.n; ++jy)
        for (int jx = 0; jx < g.n; ++jx)
            if (root(jy, jx).real() == 1.0) p.q(jy, jx) = 0.0;
    p.hint = Classification::critical;
    auto root_fn = [sigma](double x, double y) { return std::sqrt(sigma(x, y)); };
    p.analytic = [root_fn](double x, double y) { return fd_laplacian(root_fn, x, y) / root_fn(x, y); };
    p.support_radius = support_radius_for(p.q);
    validate_potential(p);
    return p;
}

double bump_w(double r) {
    if (r >= 1.0) return 0.0;
    double a = 1.0 - r * r;
    return a * a * a;
}

Potential lambda_bump(const LambdaBumpSpec& spec, const PeriodicGrid& g) {
    Potential p;
    double lam = spec.lambda;
    p.q = Field2D::from_function(g, [lam](cplx z) { return lam * bump_w(std::abs(z)); }, true);
    p.hint = lam < 0 ? Classification::supercritical : lam > 0 ? Classification::subcritical : Classification::critical;
    p.analytic = [lam](double x, double y) { return lam * bump_w(std::hypot(x, y)); };
    p.support_radius = lam == 0.0 ? 1.0 : support_radius_for(p.q);
    validate_potential(p);
    return p;
}

}  // namespace nv
