#ifndef NV_KRYLOV_HPP
#define NV_KRYLOV_HPP

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace nv {

struct GmresOptions {
    int restart = 30;
    double tol = 1e-8;
    int max_iterations = 300;
};

template <class Scalar>
struct GmresResult {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x;
    bool converged = false;
    int iterations = 0;
    double residual = 0.0;  // ||b - A x|| / ||b||, recomputed from the final iterate
};

namespace detail {
inline double conj(double v) { return v; }
inline std::complex<double> conj(const std::complex<double>& v) { return std::conj(v); }
template <class Scalar>
Scalar unit_phase(const Scalar& a) {
    double m = std::abs(a);
    return m == 0.0 ? Scalar(1.0) : a / m;
}
}  // namespace detail

// Restarted GMRES with modified Gram-Schmidt and Givens rotations.
// apply(x, y) writes y = A x.
template <class Scalar, class Apply>
GmresResult<Scalar> gmres(Apply&& apply, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& b,
                          const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x0, const GmresOptions& opt = {}) {
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    GmresResult<Scalar> res;
    res.x = x0;
    const double bnorm = b.norm();
    if (bnorm == 0.0) {
        res.x.setZero();
        res.converged = true;
        return res;
    }
    const int m = opt.restart;
    std::vector<Vec> V(m + 1);
    Mat H(m + 1, m);
    Eigen::VectorXd cs(m);
    Vec sn(m), g(m + 1);
    Vec w(b.size());

    int total = 0;
    while (true) {
        apply(res.x, w);
        Vec r = b - w;
        double beta = r.norm();
        res.residual = beta / bnorm;
        if (res.residual <= opt.tol) {
            res.converged = true;
            break;
        }
        if (total >= opt.max_iterations) break;

        V[0] = r / beta;
        g.setZero();
        g(0) = beta;
        H.setZero();
        int j = 0;
        while (j < m && total < opt.max_iterations) {
            apply(V[j], w);
            ++total;
            for (int i = 0; i <= j; ++i) {
                H(i, j) = V[i].dot(w);
                w -= H(i, j) * V[i];
            }
            double hn = w.norm();
            H(j + 1, j) = hn;
            if (hn > 0.0) V[j + 1] = w / hn;
            for (int i = 0; i < j; ++i) {
                Scalar t = cs(i) * H(i, j) + sn(i) * H(i + 1, j);
                H(i + 1, j) = -detail::conj(sn(i)) * H(i, j) + cs(i) * H(i + 1, j);
                H(i, j) = t;
            }
            // rotation [c s; -conj(s) c] annihilating H(j+1, j)
            double a = std::abs(H(j, j)), bb = std::abs(H(j + 1, j));
            double dn = std::hypot(a, bb);
            if (dn == 0.0) {
                cs(j) = 1.0;
                sn(j) = 0.0;
            } else {
                cs(j) = a / dn;
                sn(j) = detail::unit_phase(H(j, j)) * detail::conj(H(j + 1, j)) / dn;
            }
            H(j, j) = cs(j) * H(j, j) + sn(j) * H(j + 1, j);
            H(j + 1, j) = 0.0;
            g(j + 1) = -detail::conj(sn(j)) * g(j);
            g(j) = cs(j) * g(j);
            ++j;
            if (std::abs(g(j)) / bnorm <= opt.tol || hn == 0.0) break;
        }
        Vec y = H.topLeftCorner(j, j).template triangularView<Eigen::Upper>().solve(g.head(j));
        for (int i = 0; i < j; ++i) res.x += y(i) * V[i];
    }
    res.iterations = total;
    return res;
}

}  // namespace nv

#endif
