#include <cmath>

#include <Eigen/LU>
#include <Eigen/SVD>
#include <Eigen/SparseLU>

#include "nv/scatter.hpp"
#include "nv/special.hpp"

namespace nv {

namespace {

// Angular Fourier coefficients q_l(r_i), |l| <= L, at every radial node.
Eigen::MatrixXcd angular_coefficients(const Potential& p, int radial, int L) {
    const int nq = std::max(64, 4 * (2 * L + 1));
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(radial + 1, 2 * L + 1);
    std::vector<double> samples(nq);
    for (int i = 0; i <= radial; ++i) {
        double r = static_cast<double>(i) / radial;
        for (int j = 0; j < nq; ++j) {
            double th = 2.0 * M_PI * j / nq;
            samples[j] = p.value(r * std::cos(th), r * std::sin(th));
        }
        for (int l = -L; l <= L; ++l) {
            cplx acc = 0.0;
            for (int j = 0; j < nq; ++j) acc += samples[j] * std::exp(cplx(0.0, -2.0 * M_PI * l * j / nq));
            c(i, l + L) = acc / static_cast<double>(nq);
        }
    }
    return c;
}

// Solves (-Delta + q) u = 0 in the unit disc for Dirichlet data e^{i m0 theta}, |m0| <= M,
// and returns the flux matrix. qc holds angular coefficients (|l| <= 2 Mp).
Eigen::MatrixXcd flux_matrix(const Eigen::MatrixXcd& qc, int M, int radial) {
    const int Mp = M + 2, K = 2 * Mp + 1, N = radial, L = 2 * Mp;
    const double h = 1.0 / N;
    const int unknowns = N * K;
    auto idx = [K, Mp](int i, int m) { return i * K + (m + Mp); };
    bool coupled = false;
    double q0max = qc.col(L).cwiseAbs().maxCoeff();
    for (int l = -L; l <= L; ++l)
        if (l != 0 && qc.col(l + L).cwiseAbs().maxCoeff() > 1e-12 * std::max(q0max, 1e-300)) coupled = true;
    auto qhat = [&](int i, int l) -> cplx { return (l < -L || l > L) ? cplx(0.0) : qc(i, l + L); };

    std::vector<Eigen::Triplet<cplx>> trip;
    trip.reserve(static_cast<size_t>(unknowns) * (coupled ? K + 3 : 4));
    Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(unknowns, 2 * M + 1);
    for (int m = -Mp; m <= Mp; ++m) {
        if (m == 0) {
            trip.emplace_back(idx(0, 0), idx(0, 0), -4.0 / (h * h) - qhat(0, 0));
            trip.emplace_back(idx(0, 0), idx(1, 0), 4.0 / (h * h));
        } else {
            trip.emplace_back(idx(0, m), idx(0, m), 1.0);
        }
    }
    for (int i = 1; i < N; ++i) {
        double r = i * h;
        double lo = 1.0 / (h * h) - 1.0 / (2.0 * r * h);
        double hi = 1.0 / (h * h) + 1.0 / (2.0 * r * h);
        for (int m = -Mp; m <= Mp; ++m) {
            int row = idx(i, m);
            trip.emplace_back(row, idx(i - 1, m), lo);
            trip.emplace_back(row, row, -2.0 / (h * h) - double(m) * m / (r * r));
            if (i + 1 < N) {
                trip.emplace_back(row, idx(i + 1, m), hi);
            } else if (std::abs(m) <= M) {
                rhs(row, m + M) -= hi;  // u_N = delta_{m, m0}
            }
            if (coupled) {
                for (int mp = -Mp; mp <= Mp; ++mp) {
                    cplx c = qhat(i, m - mp);
                    if (c != 0.0) trip.emplace_back(row, idx(i, mp), -c);
                }
            } else {
                trip.emplace_back(row, row, -qhat(i, 0));
            }
        }
    }
    Eigen::SparseMatrix<cplx> A(unknowns, unknowns);
    A.setFromTriplets(trip.begin(), trip.end());
    A.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<cplx>> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success) throw DirichletEigenvalue("DN map: interior Dirichlet problem is singular");
    Eigen::MatrixXcd U = lu.solve(rhs);
    if (!U.allFinite()) throw DirichletEigenvalue("DN map: interior solve produced non-finite values");

    // Flux from a ghost node that satisfies the discrete equation at r = 1.
    Eigen::MatrixXcd lam(2 * M + 1, 2 * M + 1);
    const double a = 1.0 / (h * h) + 1.0 / (2.0 * h);
    for (int m0 = -M; m0 <= M; ++m0) {
        auto uN = [&](int m) -> cplx { return m == m0 ? cplx(1.0) : cplx(0.0); };
        for (int m = -M; m <= M; ++m) {
            cplx qu = 0.0;
            if (coupled) {
                for (int mp = -Mp; mp <= Mp; ++mp) qu += qhat(N, m - mp) * uN(mp);
            } else {
                qu = qhat(N, 0) * uN(m);
            }
            cplx um1 = U(idx(N - 1, m), m0 + M);
            cplx ghost = (2.0 * uN(m) / (h * h) - um1 / (h * h) + um1 / (2.0 * h) + double(m) * m * uN(m) + qu) / a;
            lam(m + M, m0 + M) = (ghost - um1) / (2.0 * h);
        }
    }
    return lam;
}

}  // namespace

DtoNMap dn_map(const Potential& p, int M, int radial) {
    if (M < 1 || radial < 8) throw InvalidArgument("dn_map: need M >= 1 and radial >= 8");
    if (p.support_radius >= 1.0) throw InvalidArgument("dn_map: potential must be supported in the unit disc");
    const int L = 2 * (M + 2);
    DtoNMap dn;
    dn.M = M;
    dn.matrix = flux_matrix(angular_coefficients(p, radial, L), M, radial);
    dn.lambda0 = flux_matrix(Eigen::MatrixXcd::Zero(radial + 1, 2 * L + 1), M, radial);
    return dn;
}

namespace {

// Fourier matrix of the single layer with kernel G_k on the unit circle, modes -M..M.
Eigen::MatrixXcd single_layer(cplx k, int M, int nb) {
    const int K = 2 * M + 1;
    Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(K, K);
    for (int m = -M; m <= M; ++m)
        if (m != 0) S(m + M, m + M) = 1.0 / (2.0 * std::abs(m));
    S(M, M) -= 2.0 * M_PI * small_k_shift(k);
    // smooth part by the trapezoid rule
    Eigen::MatrixXd H(nb, nb);
    for (int i = 0; i < nb; ++i) {
        cplx zi = std::polar(1.0, 2.0 * M_PI * i / nb);
        for (int j = 0; j < nb; ++j) {
            cplx zj = std::polar(1.0, 2.0 * M_PI * j / nb);
            H(i, j) = i == j ? 0.0 : faddeev_laplace_smooth(k, zi - zj) * (2.0 * M_PI / nb);
        }
    }
    Eigen::MatrixXcd E(nb, K);  // E(j, m) = e^{i m theta_j}
    for (int j = 0; j < nb; ++j)
        for (int m = -M; m <= M; ++m) E(j, m + M) = std::exp(cplx(0.0, m * 2.0 * M_PI * j / nb));
    S += E.adjoint() * (H.cast<cplx>() * E) / static_cast<double>(nb);
    return S;
}

Eigen::VectorXcd plane_wave_coefficients(cplx k, int M) {
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(2 * M + 1);
    cplx term = 1.0;
    for (int m = 0; m <= M; ++m) {
        if (m > 0) term *= cplx(0.0, 1.0) * k / static_cast<double>(m);
        e(m + M) = term;
    }
    return e;
}

}  // namespace

BoundaryTrace solve_cgo_boundary(const DtoNMap& dn, cplx k, int nb) {
    if (k == cplx(0.0, 0.0)) throw DomainZero("boundary CGO: k = 0");
    const int M = dn.M, K = 2 * M + 1;
    BoundaryTrace tr;
    tr.k = k;
    Eigen::MatrixXcd D = dn.delta();
    Eigen::VectorXcd e = plane_wave_coefficients(k, M);
    if (D.cwiseAbs().maxCoeff() == 0.0) {
        tr.psi_hat = e;
        tr.phi_hat = Eigen::VectorXcd::Zero(K);
        tr.condition = 1.0;
        return tr;
    }
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(K, K) + single_layer(k, M, nb) * D;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
    const auto& sv = svd.singularValues();
    tr.condition = sv(K - 1) / sv(0);
    if (!(tr.condition > 1e-12)) {
        tr.ok = false;
        tr.psi_hat = Eigen::VectorXcd::Zero(K);
        tr.phi_hat = Eigen::VectorXcd::Zero(K);
        return tr;
    }
    tr.psi_hat = A.partialPivLu().solve(e);
    tr.phi_hat = D * tr.psi_hat;
    return tr;
}

cplx boundary_psi(const DtoNMap& dn, const BoundaryTrace& tr, double theta, int nb) {
    const int M = dn.M;
    cplx z = std::polar(1.0, theta);
    cplx val = std::exp(cplx(0.0, 1.0) * tr.k * z);
    cplx layer = -2.0 * M_PI * small_k_shift(tr.k) * tr.phi_hat(M);
    for (int m = -M; m <= M; ++m)
        if (m != 0) layer += tr.phi_hat(m + M) * std::exp(cplx(0.0, m * theta)) / (2.0 * std::abs(m));
    for (int j = 0; j < nb; ++j) {
        double tj = 2.0 * M_PI * j / nb;
        cplx phi = 0.0;
        for (int m = -M; m <= M; ++m) phi += tr.phi_hat(m + M) * std::exp(cplx(0.0, m * tj));
        cplx d = z - std::polar(1.0, tj);
        if (std::abs(d) > 0.0) layer += faddeev_laplace_smooth(tr.k, d) * phi * (2.0 * M_PI / nb);
    }
    return val - layer;
}

cplx scattering_t_dn(const DtoNMap& dn, const BoundaryTrace& tr) {
    if (!tr.ok) throw SolverSingular("boundary integral equation is singular at this k");
    const int M = dn.M;
    cplx acc = 0.0, term = 1.0;
    cplx ikb = cplx(0.0, 1.0) * std::conj(tr.k);
    for (int n = 0; n <= M; ++n) {
        if (n > 0) term *= ikb / static_cast<double>(n);
        acc += term * tr.phi_hat(n + M);
    }
    return 2.0 * M_PI * acc;
}

cplx scattering_t_dn(const DtoNMap& dn, cplx k, int nb) { return scattering_t_dn(dn, solve_cgo_boundary(dn, k, nb)); }

}  // namespace nv
