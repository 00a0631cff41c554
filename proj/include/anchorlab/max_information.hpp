#pragma once

#include "anchorlab/density.hpp"
#include "anchorlab/linalg.hpp"

namespace anchorlab {

// Witness for the bipartite max-information estimate: the value is
// min over tried sigma of the (smoothed, when eps > 0) max-relative entropy
// of rho_YZ from rho_Y (x) sigma, so it upper-bounds the true infimum.
struct MaxInfoResult {
    double value = 0.0;
    Mat sigma;  // the second-factor state achieving the reported value
};

// rho must be bipartite (exactly two factors, in order Y then Z); the second
// factor dimension is capped at 4 (DIMENSION_GUARD) so the grid fallback
// stays tractable.  eps >= 0; eps = 0 computes the unsmoothed variant.
MaxInfoResult max_information_witness(const DensityOperator& rho_yz, double eps);

double max_information(const DensityOperator& rho_yz, double eps);

} // namespace anchorlab
