#pragma once

#include <cstdint>
#include <vector>

#include "anchorlab/distribution.hpp"
#include "anchorlab/rng.hpp"

namespace anchorlab {

// `count` i.i.d. index tuples from p; deterministic given seed.
std::vector<Tuple> sample(const FiniteDistribution& p, std::size_t count,
                          std::uint64_t seed);

struct CorrelatedDraw {
    std::size_t a = 0;        // flat index distributed as p
    std::size_t b = 0;        // flat index distributed as q
    std::size_t rounds = 0;   // shared-stream rounds consumed
};

// One correlated draw from two distributions on the same axes.  Both parties
// scan a shared stream of (label, threshold) pairs and each accepts the first
// pair falling under their own density; marginals are exact and
// Pr[a != b] <= l1_distance(p, q) (i.e. 2 * total-variation distance).
//            code ALPHABET_MISMATCH | STREAM_EXHAUSTED (cap 1e6 rounds)
CorrelatedDraw correlated_sample(const FiniteDistribution& p,
                                 const FiniteDistribution& q,
                                 std::uint64_t seed);

// Stream-based variant for callers that need many draws from one generator.
CorrelatedDraw correlated_sample(const FiniteDistribution& p,
                                 const FiniteDistribution& q, Rng& rng);

struct EmbedResult {
    FiniteDistribution empirical;  // over (X, Y, R_A, R_B)
    double distance = 0.0;         // l1 to the perfectly-correlated target
    double slack = 0.0;            // Monte-Carlo allowance 3*sqrt(cells/trials)
    double hypothesis_x = 0.0;     // || P_xyr - P_xy * P_{r|x} ||_1
    double hypothesis_y = 0.0;     // || P_xyr - P_xy * P_{r|y} ||_1
};

// Local embedding experiment: inputs (x, y) ~ p_xy; Alice samples from the
// conditional row r|x of target, Bob from r|y, joined per trial by
// correlated_sample on a shared stream.  The empirical (X, Y, R_A, R_B) law
// is compared against target extended with a duplicated, perfectly
// correlated copy of its last axis.  Both closeness hypotheses (each side's
// conditional reconstruction of the target within eps) are checked first.
//            code HYPOTHESIS_VIOLATED | AXIS_MISMATCH; pre trials >= 1e4
EmbedResult embed_inputs(const FiniteDistribution& p_xy,
                         const FiniteDistribution& target_xyr, double eps,
                         std::uint64_t seed, std::size_t trials);

} // namespace anchorlab
