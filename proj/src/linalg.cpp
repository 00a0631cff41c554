#include "anchorlab/linalg.hpp"

#include <cmath>

namespace anchorlab {

Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Vec kron_vec(const Vec& a, const Vec& b) {
    Vec out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i)
        out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

EigSym eig_sym(const Mat& a) {
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(a));
    require(es.info() == Eigen::Success, "EIGENSOLVE_FAILED",
            "self-adjoint eigensolver did not converge");
    return {es.eigenvalues(), es.eigenvectors()};
}

double hermiticity_defect(const Mat& a) {
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

Mat psd_power(const Mat& a, double power, double cutoff) {
    EigSym es = eig_sym(a);
    Vec diag(es.values.size());
    for (Eigen::Index i = 0; i < es.values.size(); ++i) {
        double v = es.values(i);
        if (v <= cutoff) {
            // On-support functions of a PSD matrix: clipped eigenvalues map
            // to zero even for negative powers (pseudo-inverse behaviour).
            diag(i) = 0.0;
        } else {
            diag(i) = std::pow(v, power);
        }
    }
    return es.vectors * diag.asDiagonal() * es.vectors.adjoint();
}

double trace_norm(const Mat& a) {
    Eigen::JacobiSVD<Mat> svd(a);
    return svd.singularValues().sum();
}

double trace_norm_hermitian(const Mat& a) {
    EigSym es = eig_sym(a);
    double s = 0.0;
    for (Eigen::Index i = 0; i < es.values.size(); ++i) s += std::abs(es.values(i));
    return s;
}

bool is_unitary(const Mat& u, double tol) {
    if (u.rows() != u.cols()) return false;
    Mat d = u.adjoint() * u - Mat::Identity(u.rows(), u.cols());
    return d.cwiseAbs().maxCoeff() <= tol;
}

Mat random_unitary(Eigen::Index dim, Rng& rng) {
    Mat g(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j)
            g(i, j) = Cplx(gaussian(rng), gaussian(rng));
    Eigen::HouseholderQR<Mat> qr(g);
    Mat q = qr.householderQ();
    // Fix the phase convention so the factorization is unique-ish; keeps
    // seeded draws stable under refactoring.
    Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < dim; ++i) {
        Cplx d = r(i, i);
        double m = std::abs(d);
        if (m > 0) q.col(i) *= d / m;
    }
    return q;
}

Mat random_density(Eigen::Index dim, Rng& rng) {
    Mat g(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j)
            g(i, j) = Cplx(gaussian(rng), gaussian(rng));
    Mat rho = g * g.adjoint();
    rho /= rho.trace().real();
    return hermitize(rho);
}

Vec random_unit_vector(Eigen::Index dim, Rng& rng) {
    Vec v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v(i) = Cplx(gaussian(rng), gaussian(rng));
    v.normalize();
    return v;
}

Mat support_projector(const Mat& m, double cutoff) {
    EigSym es = eig_sym(m);
    Mat p = Mat::Zero(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < es.values.size(); ++i)
        if (es.values(i) > cutoff)
            p += es.vectors.col(i) * es.vectors.col(i).adjoint();
    return p;
}

double support_leak(const Mat& rho, const Mat& sigma) {
    Mat comp = Mat::Identity(rho.rows(), rho.cols()) - support_projector(sigma);
    return (comp * rho).trace().real();
}

} // namespace anchorlab
