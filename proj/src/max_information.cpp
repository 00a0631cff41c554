#include "anchorlab/max_information.hpp"

#include "anchorlab/quantum_info.hpp"
#include "anchorlab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace anchorlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Score one candidate sigma: S_eps_inf(rho_YZ || rho_Y (x) sigma).  Scores
// +inf instead of throwing when the support condition fails, so the search
// can simply skip the candidate.
double score_sigma(const DensityOperator& rho, const Mat& rho_y, const Mat& sigma,
                   double eps) {
    Mat ref = kron(rho_y, sigma);
    DensityOperator sigma_op =
        DensityOperator::make(rho.space, hermitize(ref / ref.trace().real()));
    if (eps <= 0.0) return relative_min_entropy(rho, sigma_op);
    try {
        return smooth_min_entropy_witness(rho, sigma_op, eps).value;
    } catch (const Error&) {
        return kInf;
    }
}

Mat project_to_density(const Mat& m, Eigen::Index d) {
    EigSym es = eig_sym(hermitize(m));
    Mat out = Mat::Zero(d, d);
    double tr = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
        double v = std::max(es.values(i), 0.0);
        tr += v;
        out += v * es.vectors.col(i) * es.vectors.col(i).adjoint();
    }
    if (tr < 1e-14) return Mat::Identity(d, d) / static_cast<double>(d);
    return hermitize(out / tr);
}

} // namespace

MaxInfoResult max_information_witness(const DensityOperator& rho_yz, double eps) {
    require(rho_yz.space.factors().size() == 2, "DIMENSION_GUARD",
            "state must be bipartite (two factors)");
    require(eps >= 0.0, "PARAM_RANGE", "eps must be nonnegative");
    const Eigen::Index dy = rho_yz.space.factors()[0].dim;
    const Eigen::Index dz = rho_yz.space.factors()[1].dim;
    require(dz <= 4, "DIMENSION_GUARD", "second factor dimension exceeds 4");

    const std::string y_name = rho_yz.space.factors()[0].name;
    const std::string z_name = rho_yz.space.factors()[1].name;
    Mat rho_y = partial_trace_matrix(rho_yz.matrix, rho_yz.space, {z_name});
    Mat rho_z = partial_trace_matrix(rho_yz.matrix, rho_yz.space, {y_name});

    // Conjugating by rho_Y^{-1/2} and tracing out Y yields a sigma with
    // rho_YZ <= dy^2 * rho_Y (x) sigma, so this candidate certifies the
    // 2 log2(dy) half of the dimension bound; the maximally mixed candidate
    // certifies the 2 log2(dz) half.
    Mat inv_sqrt_y = kron(psd_power(rho_y, -0.5), Mat::Identity(dz, dz));
    Mat conj = inv_sqrt_y * rho_yz.matrix * inv_sqrt_y;
    Mat hat_z = partial_trace_matrix(conj, rho_yz.space, {y_name});
    double hat_tr = hat_z.trace().real();

    std::vector<Mat> candidates;
    candidates.push_back(Mat::Identity(dz, dz) / static_cast<double>(dz));
    candidates.push_back(project_to_density(rho_z, dz));
    if (hat_tr > 1e-14) candidates.push_back(project_to_density(hat_z / hat_tr, dz));
    Rng rng(mix_seed(0xA11CE5EEDuLL, static_cast<std::uint64_t>(dy * 64 + dz)));
    for (int r = 0; r < 8; ++r) candidates.push_back(random_density(dz, rng));

    MaxInfoResult best;
    best.value = kInf;
    for (const auto& cand : candidates) {
        double v = score_sigma(rho_yz, rho_y, cand, eps);
        if (v < best.value) {
            best.value = v;
            best.sigma = cand;
        }
    }

    // Local descent from the best start: random Hermitian perturbations with
    // a shrinking step, projected back onto density matrices.
    double step = 0.25;
    int stale = 0;
    for (int it = 0; it < 150 && step > 1e-6; ++it) {
        Mat h(dz, dz);
        for (Eigen::Index r = 0; r < dz; ++r)
            for (Eigen::Index c = 0; c < dz; ++c)
                h(r, c) = Cplx(gaussian(rng), gaussian(rng));
        Mat cand = project_to_density(best.sigma + step * hermitize(h), dz);
        double v = score_sigma(rho_yz, rho_y, cand, eps);
        if (v < best.value - 1e-12) {
            best.value = v;
            best.sigma = cand;
            stale = 0;
        } else if (++stale >= 12) {
            step *= 0.5;
            stale = 0;
        }
    }

    // Structured grid fallback for small second factors: mixtures of the
    // maximally mixed state with seeded rank-one directions.
    if (dz <= 3) {
        Mat eye = Mat::Identity(dz, dz) / static_cast<double>(dz);
        Rng grng(mix_seed(0xF00DuLL, static_cast<std::uint64_t>(dz)));
        std::vector<Vec> dirs;
        for (Eigen::Index i = 0; i < dz; ++i) {
            Vec e = Vec::Zero(dz);
            e(i) = 1.0;
            dirs.push_back(e);
        }
        for (int i = 0; i < 18; ++i) dirs.push_back(random_unit_vector(dz, grng));
        for (const Vec& v : dirs)
            for (double t : {0.0, 0.15, 0.3, 0.45, 0.6, 0.75, 0.9, 0.99}) {
                Mat cand = hermitize((1.0 - t) * eye + t * (v * v.adjoint()));
                double val = score_sigma(rho_yz, rho_y, cand, eps);
                if (val < best.value) {
                    best.value = val;
                    best.sigma = cand;
                }
            }
    }

    require(std::isfinite(best.value), "WITNESS_NOT_FOUND",
            "no feasible reference state found");
    return best;
}

double max_information(const DensityOperator& rho_yz, double eps) {
    return max_information_witness(rho_yz, eps).value;
}

} // namespace anchorlab
