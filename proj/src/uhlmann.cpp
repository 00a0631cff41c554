#include "anchorlab/uhlmann.hpp"

#include "anchorlab/quantum_info.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <set>

namespace anchorlab {

UhlmannResult uhlmann_unitary(const PureState& psi, const PureState& phi,
                              const std::vector<std::string>& fixed) {
    require(psi.space == phi.space, "SPACE_MISMATCH", "states live on different spaces");
    require(!fixed.empty(), "TRIVIAL_COMPLEMENT", "no fixed factor given");
    std::set<std::string> fixed_set;
    for (const auto& name : fixed) {
        psi.space.factor_index(name);  // UNKNOWN_FACTOR
        fixed_set.insert(name);
    }
    std::vector<Factor> comp_factors;
    for (const auto& f : psi.space.factors())
        if (!fixed_set.count(f.name)) comp_factors.push_back(f);
    require(!comp_factors.empty(), "TRIVIAL_COMPLEMENT",
            "fixed factors cover the whole space");

    // Matricize with rows indexed by the fixed group: <psi|(I (x) U)|phi>
    // = Tr[(Psi^dag Phi)^T U], so the best unitary comes from the SVD of
    // that cross-Gram operator and the best overlap is its trace norm.
    Mat big_psi = matricize(psi.vector, psi.space, fixed);
    Mat big_phi = matricize(phi.vector, phi.space, fixed);
    Mat a = (big_psi.adjoint() * big_phi).transpose();
    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    UhlmannResult out;
    out.unitary = svd.matrixV() * svd.matrixU().adjoint();
    out.complement = HilbertSpace(std::move(comp_factors));
    out.overlap = svd.singularValues().sum();

    // Optimality check against the independently computed reduced-state
    // fidelity.  The reduced states on the fixed group are Gram matrices of
    // the matricized vectors; forming them directly avoids materializing the
    // full rank-one density operator.
    std::vector<Factor> fixed_factors;
    for (const auto& f : psi.space.factors())
        if (fixed_set.count(f.name)) fixed_factors.push_back(f);
    HilbertSpace fixed_space(fixed_factors);
    double fid = fidelity(DensityOperator::make(fixed_space, big_psi * big_psi.adjoint()),
                          DensityOperator::make(fixed_space, big_phi * big_phi.adjoint()));
    require(std::abs(out.overlap - fid) <= 1e-8, "NUMERIC_CHECK_FAILED",
            "overlap disagrees with reduced-state fidelity");
    return out;
}

} // namespace anchorlab
