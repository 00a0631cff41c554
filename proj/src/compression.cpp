#include "anchorlab/compression.hpp"

#include "anchorlab/quantum_facts.hpp"
#include "anchorlab/quantum_info.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace anchorlab {

CompressionResult compression_measurement(const PureState& state,
                                          const CompressionWitness& witness,
                                          double delta) {
    require(delta > 0.0 && delta < 1.0, "FORM_VIOLATION", "delta must lie in (0,1)");
    const auto& factors = state.space.factors();
    require(factors.size() >= 3, "FORM_VIOLATION",
            "need label, label copy and at least one more factor");
    const Eigen::Index dx = factors[0].dim;
    require(factors[1].dim == dx, "FORM_VIOLATION",
            "label copy dimension must match the label dimension");
    const Eigen::Index db = factors.back().dim;
    const Eigen::Index total = state.space.dim();
    const Eigen::Index front = total / db;
    const Eigen::Index rest = front / (dx * dx);  // middle factors (x) last one

    // Matricize the state with rows over everything but the last factor and
    // check the diagonal label/copy structure.
    Mat m(front, db);
    for (Eigen::Index f = 0; f < front; ++f)
        for (Eigen::Index b = 0; b < db; ++b) m(f, b) = state.vector(f * db + b);
    double off_mass = 0.0;
    std::vector<double> p(static_cast<std::size_t>(dx), 0.0);
    for (Eigen::Index x = 0; x < dx; ++x)
        for (Eigen::Index xc = 0; xc < dx; ++xc) {
            double block = 0.0;
            for (Eigen::Index r = 0; r < rest; ++r)
                block += m.row((x * dx + xc) * rest + r).squaredNorm();
            if (x == xc) p[static_cast<std::size_t>(x)] = block;
            else off_mass += block;
        }
    require(off_mass <= 1e-9, "FORM_VIOLATION",
            "label and its copy are not perfectly correlated");
    for (double px : p)
        require(px > 1e-12, "FORM_VIOLATION",
                "every label value needs positive probability");

    // Witness validation: the smoothed state must live on (label, last
    // factor), stay within delta of the true reduced state, and certify a
    // finite max-relative entropy against label-marginal (x) reference.
    require(witness.rho_prime.space.factors().size() == 2 &&
                witness.rho_prime.space.factors()[0].dim == dx &&
                witness.rho_prime.space.factors()[1].dim == db &&
                witness.theta.space.dim() == db,
            "FORM_VIOLATION", "witness shapes do not match the state");
    Mat rho_xb = Mat::Zero(dx * db, dx * db);
    for (Eigen::Index x = 0; x < dx; ++x) {
        Mat block = Mat::Zero(db, db);
        for (Eigen::Index r = 0; r < rest; ++r) {
            Vec row = m.row((x * dx + x) * rest + r);
            block += row * row.adjoint();
        }
        rho_xb.block(x * db, x * db, db, db) = block;
    }
    DensityOperator rho_xb_op =
        DensityOperator::make(witness.rho_prime.space, hermitize(rho_xb));
    require(trace_distance(rho_xb_op, witness.rho_prime) <= delta + 1e-6,
            "FORM_VIOLATION", "witness state is farther than delta from the input");
    Mat diag_p = Mat::Zero(dx, dx);
    for (Eigen::Index x = 0; x < dx; ++x)
        diag_p(x, x) = p[static_cast<std::size_t>(x)];
    DensityOperator reference = DensityOperator::make(
        witness.rho_prime.space,
        hermitize(kron(diag_p, witness.theta.matrix)));
    double k = relative_min_entropy(witness.rho_prime, reference);
    double required_alpha = std::isfinite(k) ? std::pow(2.0, -k / delta) / 4.0 : 0.0;

    // Transfer construction: Pi_x = sqrt(alpha) T_x M^+ steers the state
    // exactly onto its labelled component, with T_x the matricization of
    // |x x>|sigma_x>.  The pseudo-inverse keeps every operator supported on
    // the state's row space, which is contained in the factors before the
    // last one.
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    double smax = sv.size() ? sv(0) : 0.0;
    Mat pinv = Mat::Zero(db, front);
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > 1e-9 * smax)
            pinv += (1.0 / sv(i)) * svd.matrixV().col(i) * svd.matrixU().col(i).adjoint();

    std::vector<Mat> transfers;
    double alpha = 1.0;
    for (Eigen::Index x = 0; x < dx; ++x) {
        Mat t = Mat::Zero(front, db);
        double scale = 1.0 / std::sqrt(p[static_cast<std::size_t>(x)]);
        for (Eigen::Index r = 0; r < rest; ++r)
            t.row((x * dx + x) * rest + r) = scale * m.row((x * dx + x) * rest + r);
        Mat raw = t * pinv;  // front x front
        double opnorm = raw.jacobiSvd().singularValues()(0);
        alpha = std::min(alpha, 1.0 / (opnorm * opnorm));
        transfers.push_back(std::move(raw));
    }
    alpha *= 1.0 - 1e-9;  // keep every operator strictly inside the unit ball

    // A common rescaling keeps the family a genuine sub-measurement: the
    // positive parts must not exceed the identity in total.
    Mat gram = Mat::Zero(front, front);
    for (const Mat& t : transfers) gram += alpha * (t.adjoint() * t);
    double top = eig_sym(gram).values.maxCoeff();
    if (top > 1.0) alpha /= top * (1.0 + 1e-12);

    CompressionResult out;
    double root = std::sqrt(alpha);
    for (const Mat& t : transfers) out.operators.push_back(root * t);

    // Achieved properties, evaluated through the same verifier the battery
    // uses; acceptance is defined by those margins alone.
    QuantumFactInstance check;
    check.fact = "JRS_VERIFY";
    check.pures = {state};
    check.operators = out.operators;
    check.alpha = required_alpha;
    check.delta = 2.0 * delta;
    auto [success_margin, closeness_margin] = jrs_margins(check);
    require(success_margin >= -1e-9 && closeness_margin >= -1e-9,
            "CONSTRUCTION_FAILED", "verified properties do not meet the targets");

    double min_success = success_margin + required_alpha;
    out.alpha = min_success;
    out.closeness = 2.0 * delta - closeness_margin;
    return out;
}

} // namespace anchorlab
