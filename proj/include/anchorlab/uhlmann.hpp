#pragma once

#include "anchorlab/density.hpp"
#include "anchorlab/linalg.hpp"

#include <string>
#include <vector>

namespace anchorlab {

// Result of the reduced-state alignment problem: the unitary acts only on the
// factors NOT listed as fixed, and the achieved overlap |<psi|(I (x) U)|phi>|
// equals the fidelity of the two reduced states on the fixed factors.
struct UhlmannResult {
    Mat unitary;                  // on the complement space, in factor order
    HilbertSpace complement;      // factors the unitary acts on
    double overlap = 0.0;
};

// Finds the unitary on the complement of `fixed` maximizing the transition
// amplitude between psi and (I (x) U) phi.  Errors: SPACE_MISMATCH when the
// states live on different spaces, TRIVIAL_COMPLEMENT when `fixed` is empty
// or covers every factor.
UhlmannResult uhlmann_unitary(const PureState& psi, const PureState& phi,
                              const std::vector<std::string>& fixed);

} // namespace anchorlab
