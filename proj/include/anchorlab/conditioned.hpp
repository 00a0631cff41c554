#pragma once

#include <optional>
#include <string>
#include <vector>

#include "anchorlab/correlation_break.hpp"
#include "anchorlab/density.hpp"
#include "anchorlab/game.hpp"

namespace anchorlab {

// One value of the per-coordinate auxiliary pair (coin, hint) across all k
// coordinates, with the success-conditioned state given that value.
struct ConditionedBlock {
    Tuple d;                       // per-coordinate coin values
    Tuple g;                       // per-coordinate hint label indices
    double prob = 0.0;             // P(coin, hint)
    double gamma = 0.0;            // P(win on the conditioned coordinates | coin, hint)
    std::optional<CQState> state;  // absent when gamma vanishes
};

// Success-conditioned dissection of a strategy for the k-fold repeated game:
// inputs drawn coordinate-wise through the correlation-breaking table, the
// strategy's measurement applied, and the state conditioned on winning every
// coordinate in `coords`.  Classical registers (inputs everywhere, answers on
// conditioned coordinates) stay classical; answers of free coordinates and
// the shared state stay quantum.
struct ConditionedAnalysis {
    Game game;                       // single-instance game
    EntangledStrategy strategy;      // strategy for the k-fold repetition
    std::vector<std::size_t> coords; // conditioned coordinate set, sorted, 1-based
    std::size_t k = 1;
    double success_probability = 0.0;
    FiniteDistribution coordinate_joint;  // per-coordinate (X_i, Y_i, D_i, G_i)
    std::vector<ConditionedBlock> blocks;

    // Per coordinate i (0-based slot i-1): mutual information between the
    // coordinate's input on one side and every register of the other side,
    // averaged over blocks with success-conditioned weights.
    std::vector<double> x_side_mi;
    std::vector<double> y_side_mi;

    // Caches reused by the repair step: for each repeated input pair and each
    // conditioned-answer pair, the subnormalized quantum part (free answers
    // (x) both shares), plus the success mass summed over winning pairs.
    std::vector<std::vector<std::vector<Vec>>> post_vectors;
    std::vector<std::vector<double>> win_mass;

    nlohmann::ordered_json summary_json() const;
};

// errors: SIZE_GUARD (k > 3, d > 2, or conditioned-state dimension > 4096);
//         SUCCESS_TOO_RARE (success probability < 1e-12);
//         PARAM_RANGE (bad coordinate set); SHAPE_MISMATCH (strategy shape).
ConditionedAnalysis conditioned_state(const Game& game,
                                      const EntangledStrategy& strategy,
                                      const std::vector<std::size_t>& coords,
                                      std::size_t k);

// One Uhlmann solve: the unitary on the moving side taking the anchored
// conditioned state to the target, with the cross-Gram operator whose trace
// norm certifies the best achievable overlap.
struct RepairSolve {
    std::string side;        // "x" (moving Alice) or "y" (moving Bob)
    std::size_t label = 0;   // x_i or y_i alphabet index
    std::size_t r_index = 0; // which conditioning value
    double weight = 0.0;     // P(label, r | success)
    Mat cross_gram;          // best overlap = trace norm of this operator
    Mat unitary;
    double overlap = 0.0;
    double distance = 0.0;   // 2 sqrt(1 - overlap^2) for this single step
};

struct RepairTermRecord {
    std::size_t x = 0;
    std::size_t y = 0;
    std::size_t r_index = 0;
    double weight = 0.0;     // P(x_i, y_i, r | success)
    double distance = 0.0;   // combined two-sided repair gap
};

struct RepairReport {
    std::size_t coordinate = 0;  // 1-based, outside the conditioned set
    std::vector<std::string> r_keys;
    double expected_distance = 0.0;    // E ||(U_x (x) U_y) src - target||_1
    double expected_x_distance = 0.0;  // Alice-side step alone
    double expected_y_distance = 0.0;  // Bob-side step alone
    std::vector<RepairSolve> solves;
    std::vector<RepairTermRecord> terms;

    nlohmann::ordered_json to_json() const;
};

// Builds the per-conditioning-value Uhlmann unitaries moving the anchored
// state to each input's state and evaluates the achieved repair distances.
// errors: NO_ANCHOR (game has no anchor label); PARAM_RANGE (coordinate in
//         the conditioned set or out of range); SIZE_GUARD.
RepairReport repair_unitaries(const ConditionedAnalysis& analysis,
                              std::size_t coordinate);

} // namespace anchorlab
