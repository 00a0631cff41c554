#pragma once

#include "anchorlab/density.hpp"
#include "anchorlab/linalg.hpp"

#include <vector>

namespace anchorlab {

// Evidence that the label register carries little max-information about the
// last factor: a smoothed state together with the reference used to bound
// its max-relative entropy.
struct CompressionWitness {
    DensityOperator rho_prime;  // smoothed label/last-factor state
    DensityOperator theta;      // reference state on the last factor
};

struct CompressionResult {
    std::vector<Mat> operators;  // one per label value, acting on all factors
                                 // except the last
    double alpha = 0.0;          // common success probability achieved
    double closeness = 0.0;      // expected trace distance of the post states
};

// Builds label-extraction measurement operators for a state of the form
// sum_x sqrt(P(x)) |x x> |sigma_x>: factors ordered label, label copy,
// middle factors, last factor.  Each operator succeeds with the same
// probability and steers the state onto its labelled component.  The result
// is accepted only if the verified success and closeness properties hold with
// the relaxed constants (success >= 2^{-k/delta} / 4, closeness <= 2 delta,
// where k is the max-relative entropy certified by the witness); otherwise
// CONSTRUCTION_FAILED is raised.  FORM_VIOLATION flags inputs not of the
// stated shape.
CompressionResult compression_measurement(const PureState& state,
                                          const CompressionWitness& witness,
                                          double delta);

} // namespace anchorlab
