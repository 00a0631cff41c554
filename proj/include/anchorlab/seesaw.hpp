#pragma once

#include "anchorlab/game.hpp"

#include <cstdint>
#include <vector>

namespace anchorlab {

struct SeesawResult {
    double value = 0.0;
    EntangledStrategy strategy;
    std::vector<double> objective_trace;  // winning restart, one entry per iteration
    bool converged = true;                // false signals the NO_CONVERGENCE warning
};

// Alternating lower-bound maximization of the entangled value at local
// dimension d: exact binary-outcome measurement responses via the positive
// eigenspace of the effect difference, an iterative discrimination fixed
// point for more outcomes, and a principal-eigenvector state update.  Every
// restart is independently seeded from (seed, restart index) and the best
// result is selected by (value, restart index), so scheduling cannot change
// the outcome.  The per-iteration objective never decreases (within 1e-10).
SeesawResult entangled_value_seesaw(const Game& game, Eigen::Index d, int restarts,
                                    int max_iters, double tol, std::uint64_t seed);

} // namespace anchorlab
