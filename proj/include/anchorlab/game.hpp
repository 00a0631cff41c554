#pragma once

#include "anchorlab/density.hpp"
#include "anchorlab/distribution.hpp"

#include <cstdint>
#include <functional>
#include <json.hpp>
#include <string>
#include <vector>

namespace anchorlab {

// Two-player one-round game: referee draws (x,y) from q, players answer
// (a,b), the predicate decides the win.  The input table q always carries
// axes named "x" and "y"; the predicate table is x-major, then y, a, b.
struct Game {
    std::vector<std::string> x_alphabet, y_alphabet, a_alphabet, b_alphabet;
    FiniteDistribution q;
    std::vector<std::uint8_t> predicate;

    bool wins(std::size_t x, std::size_t y, std::size_t a, std::size_t b) const {
        return predicate[((x * y_alphabet.size() + y) * a_alphabet.size() + a) *
                             b_alphabet.size() +
                         b] != 0;
    }
    double input_weight(std::size_t x, std::size_t y) const {
        return q.weights()[x * y_alphabet.size() + y];
    }

    nlohmann::ordered_json to_json() const;
    static Game from_json(const nlohmann::json& j);  // validates like validate_game
};

// Raw, unvalidated description.  The predicate is an explicit entry list so
// that incomplete or contradictory tables are detectable.
struct PredicateEntry {
    std::string x, y, a, b;
    bool accept = false;
};

struct GameDraft {
    std::vector<std::string> x, y, a, b;
    std::vector<std::vector<double>> q;  // rows per x, columns per y
    std::vector<PredicateEntry> predicate;
};

// Checks alphabets (EMPTY_ALPHABET), the input table (BAD_DISTRIBUTION) and
// predicate totality/uniqueness (PREDICATE_SHAPE).
Game validate_game(const GameDraft& draft);

// Convenience builder for programmatic games: the callable decides each
// (x,y,a,b) index tuple.
Game build_game(std::vector<std::string> x, std::vector<std::string> y,
                std::vector<std::string> a, std::vector<std::string> b,
                std::vector<double> q_flat,
                const std::function<bool(std::size_t, std::size_t, std::size_t,
                                         std::size_t)>& wins);

// The standard two-input two-answer parity game (uniform inputs; answers
// must disagree exactly on the (1,1) input).
Game chsh_game();

struct DeterministicStrategy {
    std::vector<std::size_t> g;  // answer index per x
    std::vector<std::size_t> h;  // answer index per y
};

struct ClassicalValue {
    double value = 0.0;
    DeterministicStrategy strategy;
};

// Exact optimum over deterministic strategy pairs; shared randomness never
// helps, so this is the classical value.  ENUMERATION_GUARD above
// |A|^|X| * |B|^|Y| = 1e8.
ClassicalValue classical_value_exact(const Game& game);

// Shared entangled strategy at local dimension d: the joint state lives on
// factors "qa" (x) "qb", one measurement per input on each side.
struct EntangledStrategy {
    Eigen::Index d = 1;
    PureState state;
    std::vector<POVM> alice;  // per x, one element per a
    std::vector<POVM> bob;    // per y, one element per b
};

double strategy_value(const Game& game, const DeterministicStrategy& s);
double strategy_value(const Game& game, const EntangledStrategy& s);

// side "y": the y alphabet gains the anchor label, which with probability
// zeta replaces the drawn y; every answer wins there.  side "x" symmetric;
// side "both" composes the two maps (the order does not matter on the
// distribution).  zeta = 0 is permitted as the zero-mass degenerate case.
struct AnchorSpec {
    std::string side = "y";  // "x" | "y" | "both"
    double zeta = 0.0;
    std::string x_label = "__anchor__";
    std::string y_label = "__anchor__";
};

Game anchor_game(const Game& game, const AnchorSpec& spec);

// k independent copies played in parallel; repeated labels join coordinate
// labels with commas, coordinate 1 varying slowest.  SIZE_GUARD above
// (|X||Y||A||B|)^k = 1e8.
Game repeat_game(const Game& game, int k);

enum class TheoremKind { dpt, par_rep };

struct TheoremParams {
    double omega = 0.0;   // par_rep: single-shot entangled value
    double eps = 0.0;     // dpt: error parameter
    double zeta = 0.0;    // anchor weight
    double k = 0.0;       // repetitions
    double a_size = 2.0;  // par_rep alphabet sizes
    double b_size = 2.0;
    double z_size = 2.0;  // dpt alphabet size
    double C = 1.0;       // stand-in for the unspecified asymptotic constant
};

// par_rep: (1-(1-omega)^5)^(C zeta^2 k / log2(|A||B|));
// dpt:     1-(1-eps)^(C zeta^6 k / log2 |Z|).
double theorem_bound(TheoremKind which, const TheoremParams& p);

} // namespace anchorlab
