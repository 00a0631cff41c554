#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "anchorlab/errors.hpp"
#include "anchorlab/rng.hpp"

namespace anchorlab {

using Cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// Eigenvalues below this threshold count as zero when deciding supports.
inline constexpr double kSupportCutoff = 1e-10;

// Dimension-aware tolerance: floor at `abs_floor`, grow with matrix size.
inline double scaled_tol(double abs_floor, Eigen::Index dim) {
    double rel = static_cast<double>(dim) * 2.220446049250313e-16 * 100.0;
    return rel > abs_floor ? rel : abs_floor;
}

Mat kron(const Mat& a, const Mat& b);
Vec kron_vec(const Vec& a, const Vec& b);

inline Mat hermitize(const Mat& a) { return 0.5 * (a + a.adjoint()); }

struct EigSym {
    Eigen::VectorXd values;  // ascending
    Mat vectors;             // columns
};

// Hermitian eigendecomposition (input is symmetrized first).
EigSym eig_sym(const Mat& a);

double hermiticity_defect(const Mat& a);

// Spectral functions of a Hermitian PSD matrix; eigenvalues below `cutoff`
// are treated as exactly zero (so negative powers stay on the support).
Mat psd_power(const Mat& a, double power, double cutoff = kSupportCutoff);

inline Mat psd_sqrt(const Mat& a) { return psd_power(a, 0.5); }

// Trace norm = sum of singular values; for Hermitian input this equals the
// sum of absolute eigenvalues.
double trace_norm(const Mat& a);
double trace_norm_hermitian(const Mat& a);

bool is_unitary(const Mat& u, double tol);

// Projector onto the support (eigenvalues above the cutoff) of a Hermitian
// PSD matrix, and the mass of rho lying outside the support of sigma.
Mat support_projector(const Mat& m, double cutoff = kSupportCutoff);
double support_leak(const Mat& rho, const Mat& sigma);

// Haar-like random unitary via QR of a Gaussian matrix.
Mat random_unitary(Eigen::Index dim, Rng& rng);

// Random density matrix: G G^dagger / Tr for Gaussian G.
Mat random_density(Eigen::Index dim, Rng& rng);

// Random unit vector with Gaussian entries.
Vec random_unit_vector(Eigen::Index dim, Rng& rng);

} // namespace anchorlab
