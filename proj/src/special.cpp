#include "nv/special.hpp"

#include <cmath>
#include <limits>

#include "nv/parallel.hpp"

namespace nv {

namespace {

constexpr double kEps = 1e-17;

bool on_cut(cplx w) { return w.imag() == 0.0 && w.real() <= 0.0; }

// sum_{n>=1} (-w)^n / (n n!)
cplx power_tail(cplx w) {
    cplx term = 1.0, sum = 0.0;
    for (int n = 1; n < 1000; ++n) {
        term *= -w / static_cast<double>(n);
        cplx add = term / static_cast<double>(n);
        sum += add;
        if (std::abs(add) <= kEps * std::abs(sum)) break;
    }
    return sum;
}

cplx e1_series(cplx w) { return -kEulerGamma - std::log(w) - power_tail(w); }

// Modified Lentz evaluation of the even continued fraction; returns e^w E1(w).
cplx e1_scaled_cf(cplx w) {
    const double tiny = 1e-300;
    cplx b = w + 1.0;
    cplx c = 1.0 / tiny;
    cplx dd = 1.0 / b;
    cplx h = dd;
    for (int i = 1; i < 5000; ++i) {
        double an = -static_cast<double>(i) * i;
        b += 2.0;
        dd = an * dd + b;
        if (std::abs(dd) < tiny) dd = tiny;
        dd = 1.0 / dd;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        cplx del = c * dd;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return h;
}

// Optimally truncated asymptotic series sum (-1)^n n!/w^{n+1}.
cplx e1_scaled_asymptotic(cplx w) {
    cplx term = 1.0 / w, sum = term;
    double prev = std::abs(term);
    for (int n = 1; n < 400; ++n) {
        cplx next = -term * static_cast<double>(n) / w;
        double a = std::abs(next);
        if (a > prev) break;
        term = next;
        sum += term;
        prev = a;
        if (a <= kEps * std::abs(sum)) break;
    }
    return sum;
}

enum class E1Route { series, fraction, asymptotic };

E1Route route_for(cplx w) {
    double a = std::abs(w);
    if (a >= 40.0) return E1Route::asymptotic;
    if (a <= 2.0 || a + w.real() <= 6.0) return E1Route::series;
    return E1Route::fraction;
}

void check_domain(cplx w) {
    if (w == cplx(0.0, 0.0)) throw DomainZero("E1: argument is zero");
    if (on_cut(w)) throw BranchCut("E1: argument on the negative real axis");
}

}  // namespace

cplx exp_integral_e1(cplx w) {
    check_domain(w);
    switch (route_for(w)) {
        case E1Route::series: return e1_series(w);
        case E1Route::fraction: return std::exp(-w) * e1_scaled_cf(w);
        default: return std::exp(-w) * e1_scaled_asymptotic(w);
    }
}

cplx e1_scaled(cplx w) {
    check_domain(w);
    switch (route_for(w)) {
        case E1Route::series: return std::exp(w) * e1_series(w);
        case E1Route::fraction: return e1_scaled_cf(w);
        default: return e1_scaled_asymptotic(w);
    }
}

cplx entire_ein(cplx w) {
    if (std::abs(w) <= 8.0) return -power_tail(w);
    if (on_cut(w)) {
        // Ein is entire: approach the cut from above, the log and E1 jumps cancel.
        double a = -w.real();
        return cplx(-std::exp(a) * ei_scaled(a), -M_PI) + kEulerGamma + cplx(std::log(a), M_PI);
    }
    return exp_integral_e1(w) + kEulerGamma + std::log(w);
}

double ei_scaled(double a) {
    if (!(a > 0.0)) throw DomainZero("Ei: argument must be positive");
    if (a <= 40.0) {
        double term = 1.0, sum = 0.0;
        for (int n = 1; n < 1000; ++n) {
            term *= a / n;
            double add = term / n;
            sum += add;
            if (add <= kEps * sum) break;
        }
        return std::exp(-a) * (kEulerGamma + std::log(a) + sum);
    }
    double term = 1.0 / a, sum = term, prev = term;
    for (int n = 1; n < 400; ++n) {
        double next = term * n / a;
        if (next > prev) break;
        term = next;
        sum += term;
        prev = next;
        if (next <= kEps * sum) break;
    }
    return sum;
}

cplx faddeev_g1(cplx z) {
    if (z == cplx(0.0, 0.0)) throw DomainZero("g1: z = 0");
    cplx w = cplx(0.0, -1.0) * z;
    if (on_cut(w)) return -ei_scaled(-w.real()) / (2.0 * M_PI);
    cplx phase = std::exp(cplx(0.0, -2.0 * z.real()));
    return (e1_scaled(w) + phase * e1_scaled(std::conj(w))) / (4.0 * M_PI);
}

cplx faddeev_g(cplx k, cplx z) {
    if (k == cplx(0.0, 0.0)) throw DomainZero("faddeev_g: k = 0");
    if (z == cplx(0.0, 0.0)) throw DomainZero("faddeev_g: z = 0");
    return faddeev_g1(k * z);
}

double faddeev_laplace_g(cplx k, cplx z) {
    if (k == cplx(0.0, 0.0) || z == cplx(0.0, 0.0)) throw DomainZero("G_k: zero argument");
    cplx w = cplx(0.0, -1.0) * k * z;
    if (on_cut(w)) return -std::exp(-w.real()) * ei_scaled(-w.real()) / (2.0 * M_PI);
    return exp_integral_e1(w).real() / (2.0 * M_PI);
}

double faddeev_laplace_smooth(cplx k, cplx z) {
    return entire_ein(cplx(0.0, -1.0) * k * z).real() / (2.0 * M_PI);
}

cplx g1_asymptotic(cplx z, int N) {
    if (z == cplx(0.0, 0.0)) throw DomainZero("g1_asymptotic: z = 0");
    if (N < 0) throw InvalidArgument("g1_asymptotic: N must be non-negative");
    if (z.real() < 0.0) return std::conj(g1_asymptotic(-std::conj(z), N));
    const cplx I(0.0, 1.0);
    cplx a = I * z, b = -I * std::conj(z);
    cplx phase = std::exp(cplx(0.0, -2.0 * z.real()));
    cplx sum = 0.0, pa = a, pb = b;
    double fact = 1.0;
    for (int j = 0; j <= N; ++j) {
        if (j > 0) {
            fact *= j;
            pa *= a;
            pb *= b;
        }
        sum += fact / pa + phase * fact / pb;
    }
    return -sum / (4.0 * M_PI);
}

double g1_error_bound(double abs_z, int N) {
    double fact = std::tgamma(N + 2.0);
    return fact * std::pow(2.0, 0.5 * (N + 1)) / (M_PI * std::pow(abs_z, N + 2.0));
}

double log_potential_g0(cplx z) {
    if (z == cplx(0.0, 0.0)) throw DomainZero("G0: z = 0");
    return -std::log(std::abs(z)) / (2.0 * M_PI);
}

double small_k_shift(cplx k) {
    if (k == cplx(0.0, 0.0)) throw DomainZero("l(k): k = 0");
    return (std::log(std::abs(k)) + kEulerGamma) / (2.0 * M_PI);
}

double g0_cell_average(double h) {
    double a = 0.5 * h;
    double mean_log = 0.5 * (2.0 * std::log(a) - 3.0 + 0.5 * M_PI + std::log(2.0));
    return -mean_log / (2.0 * M_PI);
}

GreenTable make_green_table(cplx k, const PeriodicGrid& g) {
    if (k == cplx(0.0, 0.0)) throw DomainZero("make_green_table: k = 0");
    Field2D f(g);
    int n = g.n;
    double centre = g0_cell_average(g.spacing()) - small_k_shift(k);
    // real k: g1(-x1 + i x2) = conj(g1(x1 + i x2)) mirrors the table in x
    const bool mirror = k.imag() == 0.0;
    parallel_for(n, [&](int jy) {
        for (int jx = 0; jx < n; ++jx) {
            if (mirror && jx > 0 && jx < n / 2) continue;
            cplx z = g.point(jy, jx);
            f(jy, jx) = (jx == n / 2 && jy == n / 2) ? cplx(centre, 0.0) : faddeev_g1(k * z);
        }
        if (mirror)
            for (int jx = 1; jx < n / 2; ++jx) f(jy, jx) = std::conj(f(jy, n - jx));
    });
    return {k, g, std::move(f)};
}

CMatrix to_wrap_layout(const CMatrix& c) {
    int n = static_cast<int>(c.rows()), h = n / 2;
    // index n/2 (origin) lands at 0
    CMatrix out(n, n);
    for (int jy = 0; jy < n; ++jy)
        for (int jx = 0; jx < n; ++jx) out(jy, jx) = c((jy + h) % n, (jx + h) % n);
    return out;
}

CMatrix to_centred_layout(const CMatrix& w) {
    int n = static_cast<int>(w.rows()), h = n / 2;
    CMatrix out(n, n);
    for (int jy = 0; jy < n; ++jy)
        for (int jx = 0; jx < n; ++jx) out((jy + h) % n, (jx + h) % n) = w(jy, jx);
    return out;
}

}  // namespace nv
