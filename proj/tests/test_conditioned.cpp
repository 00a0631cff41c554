#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "anchorlab/conditioned.hpp"
#include "anchorlab/linalg.hpp"
#include "anchorlab/rng.hpp"

#include <cmath>

using namespace anchorlab;

namespace {

// deterministic strategy as a dimension-one entangled strategy
EntangledStrategy det_strategy(const Game& g, const std::vector<std::size_t>& fa,
                               const std::vector<std::size_t>& fb) {
    EntangledStrategy s;
    s.d = 1;
    s.state = PureState::make(HilbertSpace({{"qa", 1}, {"qb", 1}}), Vec::Ones(1));
    HilbertSpace la({{"qa", 1}});
    HilbertSpace lb({{"qb", 1}});
    for (std::size_t x = 0; x < g.x_alphabet.size(); ++x) {
        std::vector<Mat> el(g.a_alphabet.size(), Mat::Zero(1, 1));
        el[fa[x]](0, 0) = 1.0;
        s.alice.push_back(POVM::make(la, el));
    }
    for (std::size_t y = 0; y < g.y_alphabet.size(); ++y) {
        std::vector<Mat> el(g.b_alphabet.size(), Mat::Zero(1, 1));
        el[fb[y]](0, 0) = 1.0;
        s.bob.push_back(POVM::make(lb, el));
    }
    return s;
}

// parity game on a correlated input table, then anchored on the y side
Game corr_anchored(double zeta) {
    Game base = build_game({"0", "1"}, {"0", "1"}, {"0", "1"}, {"0", "1"},
                           {0.4, 0.1, 0.1, 0.4},
                           [](std::size_t x, std::size_t y, std::size_t a,
                              std::size_t b) { return ((a + b) % 2) == (x & y); });
    AnchorSpec spec;
    spec.side = "y";
    spec.zeta = zeta;
    return anchor_game(base, spec);
}

Game chsh_anchored(double zeta) {
    AnchorSpec spec;
    spec.side = "y";
    spec.zeta = zeta;
    return anchor_game(chsh_game(), spec);
}

double singular_value_sum(const Mat& m) {
    Eigen::JacobiSVD<Mat> svd(m);
    return svd.singularValues().sum();
}

// projective qubit strategy rotated per input
EntangledStrategy rotated_strategy(const Game& g, const std::vector<double>& ax,
                                   const std::vector<double>& by) {
    EntangledStrategy s;
    s.d = 2;
    Vec bell = Vec::Zero(4);
    bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
    s.state = PureState::make(HilbertSpace({{"qa", 2}, {"qb", 2}}), bell);
    auto proj = [](double t) {
        Vec v(2);
        v << std::cos(t), std::sin(t);
        return Mat(v * v.adjoint());
    };
    HilbertSpace la({{"qa", 2}});
    HilbertSpace lb({{"qb", 2}});
    for (double t : ax)
        s.alice.push_back(POVM::make(la, {proj(t), Mat::Identity(2, 2) - proj(t)}));
    for (double t : by)
        s.bob.push_back(POVM::make(lb, {proj(t), Mat::Identity(2, 2) - proj(t)}));
    return s;
}

// conjugate every local object by fixed local unitaries
EntangledStrategy conjugated(const EntangledStrategy& s, const Mat& va,
                             const Mat& vb) {
    EntangledStrategy out = s;
    out.state = PureState::make(s.state.space, kron(va, vb) * s.state.vector);
    out.alice.clear();
    out.bob.clear();
    for (const auto& p : s.alice) {
        std::vector<Mat> el;
        for (const auto& e : p.elements) el.push_back(hermitize(va * e * va.adjoint()));
        out.alice.push_back(POVM::make(p.space, el));
    }
    for (const auto& p : s.bob) {
        std::vector<Mat> el;
        for (const auto& e : p.elements) el.push_back(hermitize(vb * e * vb.adjoint()));
        out.bob.push_back(POVM::make(p.space, el));
    }
    return out;
}

} // namespace

TEST_CASE("success mass decomposes over coin and hint blocks") {
    Game g = chsh_anchored(0.2);
    Game rep2 = repeat_game(g, 2);
    // answers ignore the inputs entirely: lose only when a drawn pair is (1,1)
    EntangledStrategy strat =
        det_strategy(rep2, std::vector<std::size_t>(rep2.x_alphabet.size(), 0),
                     std::vector<std::size_t>(rep2.y_alphabet.size(), 0));
    ConditionedAnalysis an = conditioned_state(g, strat, {1}, 2);
    CHECK(an.k == 2);
    REQUIRE(an.coords.size() == 1);
    CHECK(an.coords[0] == 1);
    CHECK(an.success_probability == doctest::Approx(0.8).epsilon(1e-9));

    double acc = 0.0;
    for (const auto& b : an.blocks) {
        CHECK(b.prob >= 0.0);
        CHECK(b.gamma >= 0.0);
        CHECK(b.gamma <= 1.0 + 1e-12);
        if (b.gamma > 1e-12) CHECK(b.state.has_value());
        acc += b.prob * b.gamma;
    }
    CHECK(acc == doctest::Approx(an.success_probability).epsilon(1e-9));
}

TEST_CASE("an all-accepting game conditions to certain success") {
    Game base = build_game({"0", "1"}, {"0", "1"}, {"0"}, {"0"},
                           {0.25, 0.25, 0.25, 0.25},
                           [](std::size_t, std::size_t, std::size_t, std::size_t) {
                               return true;
                           });
    AnchorSpec spec;
    spec.side = "y";
    spec.zeta = 0.25;
    Game g = anchor_game(base, spec);
    EntangledStrategy strat = det_strategy(g, {0, 0}, {0, 0, 0});
    ConditionedAnalysis an = conditioned_state(g, strat, {1}, 1);
    CHECK(an.success_probability == doctest::Approx(1.0).epsilon(1e-12));
    for (const auto& b : an.blocks)
        if (b.prob > 1e-12) CHECK(b.gamma == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("the conditioned success equals the strategy value") {
    Game g = corr_anchored(0.3);
    EntangledStrategy strat = det_strategy(g, {0, 0}, {0, 0, 0});
    ConditionedAnalysis an = conditioned_state(g, strat, {1}, 1);
    // lose only on the (1,1) cell: 0.7 * 0.4 of the mass
    CHECK(an.success_probability == doctest::Approx(0.72).epsilon(1e-9));
    CHECK(an.success_probability ==
          doctest::Approx(strategy_value(g, strat)).epsilon(1e-9));
}

TEST_CASE("the per-coordinate table reproduces the anchored input law") {
    Game g = corr_anchored(0.3);
    EntangledStrategy strat = det_strategy(g, {0, 1}, {0, 0, 0});
    ConditionedAnalysis an = conditioned_state(g, strat, {}, 1);
    FiniteDistribution xy = marginal(an.coordinate_joint, {"X_i", "Y_i"});
    REQUIRE(xy.size() == g.q.size());
    for (std::size_t i = 0; i < xy.size(); ++i)
        CHECK(std::abs(xy.weight(i) - g.q.weight(i)) <= 1e-12);
}

TEST_CASE("moving one side between inputs has a fixed classical cost") {
    // with a trivial shared system the move from the anchor to input y is a
    // pure-state overlap problem whose value is the Bhattacharyya coefficient
    // of the x conditionals: BC = sum_x sqrt(q(x|y) q(x|anchor))
    Game g = corr_anchored(0.3);
    EntangledStrategy strat = det_strategy(g, {0, 0}, {0, 0, 0});
    ConditionedAnalysis an = conditioned_state(g, strat, {}, 1);
    CHECK(an.success_probability == doctest::Approx(1.0).epsilon(1e-12));

    RepairReport rep = repair_unitaries(an, 1);
    REQUIRE(rep.r_keys.size() == 1);
    CHECK(rep.coordinate == 1);

    // q(x|y0) = (0.8, 0.2) against the anchor's (0.5, 0.5):
    // BC^2 = (sqrt(0.4) + sqrt(0.1))^2 = 0.9 exactly
    const double bc = std::sqrt(0.4) + std::sqrt(0.1);
    const double solve_dist = 2.0 * std::sqrt(1.0 - bc * bc);
    const double l1_gap = 0.6;  // |0.8-0.5| + |0.2-0.5|

    int y_solves = 0, x_solves = 0;
    for (const auto& s : rep.solves) {
        CHECK((s.unitary.adjoint() * s.unitary -
               Mat::Identity(s.unitary.rows(), s.unitary.cols()))
                  .cwiseAbs()
                  .maxCoeff() <= 1e-9);
        // the returned unitary realizes the overlap through the cross operator,
        // and the trace norm of that operator certifies it is the best one
        CHECK(std::abs((s.unitary * s.cross_gram).trace()) ==
              doctest::Approx(s.overlap).epsilon(1e-8));
        CHECK(singular_value_sum(s.cross_gram) ==
              doctest::Approx(s.overlap).epsilon(1e-8));
        if (s.side == "y") {
            ++y_solves;
            CHECK(s.distance == doctest::Approx(solve_dist).epsilon(1e-9));
            CHECK(s.overlap == doctest::Approx(bc).epsilon(1e-9));
            CHECK(s.weight == doctest::Approx(0.35).epsilon(1e-9));
            // the single-solve cost exceeds the classical statistical gap
            CHECK(s.distance > l1_gap + 0.03);
        } else {
            ++x_solves;
            CHECK(s.distance <= 1e-6);
        }
    }
    CHECK(y_solves == 2);
    CHECK(x_solves == 2);

    // coordinate-wise the repaired states match their targets
    CHECK(rep.expected_distance <= 1e-6);
    CHECK(rep.expected_x_distance <= 1e-6);
    CHECK(rep.expected_y_distance <= 1e-6);
    double wsum = 0.0;
    for (const auto& t : rep.terms) wsum += t.weight;
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("input-ignoring strategies need no repair") {
    Game g = chsh_anchored(0.2);
    Game rep2 = repeat_game(g, 2);
    EntangledStrategy strat =
        det_strategy(rep2, std::vector<std::size_t>(rep2.x_alphabet.size(), 0),
                     std::vector<std::size_t>(rep2.y_alphabet.size(), 0));
    ConditionedAnalysis an = conditioned_state(g, strat, {1}, 2);
    RepairReport rep = repair_unitaries(an, 2);
    REQUIRE(!rep.r_keys.empty());
    // conditioning keys record the first coordinate's classical data
    for (const auto& key : rep.r_keys) {
        CHECK(key.find("x1=") != std::string::npos);
        CHECK(key.find("y1=") != std::string::npos);
        CHECK(key.find("a1=") != std::string::npos);
        CHECK(key.find("b1=") != std::string::npos);
    }
    for (const auto& s : rep.solves) CHECK(s.r_index < rep.r_keys.size());
    CHECK(rep.expected_distance <= 1e-6);
    CHECK(rep.expected_y_distance <= 1e-6);
    for (const auto& s : rep.solves) CHECK(s.distance <= 1e-6);
}

TEST_CASE("free coordinates stay independent across sides") {
    Game g = chsh_anchored(0.2);
    Game rep2 = repeat_game(g, 2);
    EntangledStrategy strat =
        det_strategy(rep2, std::vector<std::size_t>(rep2.x_alphabet.size(), 0),
                     std::vector<std::size_t>(rep2.y_alphabet.size(), 0));
    ConditionedAnalysis an = conditioned_state(g, strat, {1}, 2);
    REQUIRE(an.x_side_mi.size() == 2);
    REQUIRE(an.y_side_mi.size() == 2);
    CHECK(an.x_side_mi[1] <= 1e-9);
    CHECK(an.y_side_mi[1] <= 1e-9);
}

TEST_CASE("local basis changes leave every reported number unchanged") {
    Game g = chsh_anchored(0.2);
    EntangledStrategy s1 = rotated_strategy(
        g, {0.0, 3.14159 / 4.0}, {3.14159 / 8.0, -3.14159 / 8.0, 0.313});
    Rng rng(41);
    EntangledStrategy s2 = conjugated(s1, random_unitary(2, rng), random_unitary(2, rng));

    ConditionedAnalysis a1 = conditioned_state(g, s1, {1}, 1);
    ConditionedAnalysis a2 = conditioned_state(g, s2, {1}, 1);
    CHECK(std::abs(a1.success_probability - a2.success_probability) <= 1e-9);
    REQUIRE(a1.blocks.size() == a2.blocks.size());
    for (std::size_t i = 0; i < a1.blocks.size(); ++i) {
        CHECK(std::abs(a1.blocks[i].prob - a2.blocks[i].prob) <= 1e-9);
        CHECK(std::abs(a1.blocks[i].gamma - a2.blocks[i].gamma) <= 1e-9);
    }
    REQUIRE(a1.x_side_mi.size() == a2.x_side_mi.size());
    for (std::size_t i = 0; i < a1.x_side_mi.size(); ++i) {
        CHECK(std::abs(a1.x_side_mi[i] - a2.x_side_mi[i]) <= 1e-9);
        CHECK(std::abs(a1.y_side_mi[i] - a2.y_side_mi[i]) <= 1e-9);
    }

    // distances touch sqrt(1 - overlap^2) near overlap = 1, so basis noise
    // of order 1e-16 in the overlap can surface as ~1e-8 in the distance
    ConditionedAnalysis e1 = conditioned_state(g, s1, {}, 1);
    ConditionedAnalysis e2 = conditioned_state(g, s2, {}, 1);
    RepairReport r1 = repair_unitaries(e1, 1);
    RepairReport r2 = repair_unitaries(e2, 1);
    CHECK(std::abs(r1.expected_distance - r2.expected_distance) <= 1e-6);
    CHECK(std::abs(r1.expected_x_distance - r2.expected_x_distance) <= 1e-6);
    CHECK(std::abs(r1.expected_y_distance - r2.expected_y_distance) <= 1e-6);
    REQUIRE(r1.solves.size() == r2.solves.size());
    for (std::size_t i = 0; i < r1.solves.size(); ++i) {
        CHECK(r1.solves[i].side == r2.solves[i].side);
        CHECK(r1.solves[i].label == r2.solves[i].label);
        CHECK(std::abs(r1.solves[i].distance - r2.solves[i].distance) <= 1e-6);
        CHECK(std::abs(r1.solves[i].overlap - r2.solves[i].overlap) <= 1e-9);
        CHECK(std::abs(r1.solves[i].weight - r2.solves[i].weight) <= 1e-9);
    }
}

TEST_CASE("a global phase on the state changes nothing") {
    Game g = chsh_anchored(0.2);
    EntangledStrategy s1 = rotated_strategy(
        g, {0.0, 3.14159 / 4.0}, {3.14159 / 8.0, -3.14159 / 8.0, 0.313});
    EntangledStrategy s2 = s1;
    s2.state = PureState::make(s1.state.space,
                               Vec(std::polar(1.0, 0.77) * s1.state.vector));

    RepairReport r1 = repair_unitaries(conditioned_state(g, s1, {}, 1), 1);
    RepairReport r2 = repair_unitaries(conditioned_state(g, s2, {}, 1), 1);
    CHECK(std::abs(r1.expected_distance - r2.expected_distance) <= 1e-9);
    CHECK(std::abs(r1.expected_x_distance - r2.expected_x_distance) <= 1e-9);
    CHECK(std::abs(r1.expected_y_distance - r2.expected_y_distance) <= 1e-9);
    REQUIRE(r1.solves.size() == r2.solves.size());
    for (std::size_t i = 0; i < r1.solves.size(); ++i)
        CHECK(std::abs(r1.solves[i].distance - r2.solves[i].distance) <= 1e-9);
}

TEST_CASE("renaming answers moves indices but not distances") {
    Game g1 = corr_anchored(0.3);
    Game base2 = build_game({"0", "1"}, {"0", "1"}, {"0", "1"}, {"0", "1"},
                            {0.4, 0.1, 0.1, 0.4},
                            [](std::size_t x, std::size_t y, std::size_t a,
                               std::size_t b) {
                                return (((1 - a) + b) % 2) == (x & y);
                            });
    AnchorSpec spec;
    spec.side = "y";
    spec.zeta = 0.3;
    Game g2 = anchor_game(base2, spec);

    EntangledStrategy s1 = det_strategy(g1, {0, 1}, {0, 1, 0});
    EntangledStrategy s2 = det_strategy(g2, {1, 0}, {0, 1, 0});
    CHECK(std::abs(strategy_value(g1, s1) - strategy_value(g2, s2)) <= 1e-12);

    RepairReport r1 = repair_unitaries(conditioned_state(g1, s1, {}, 1), 1);
    RepairReport r2 = repair_unitaries(conditioned_state(g2, s2, {}, 1), 1);
    CHECK(std::abs(r1.expected_distance - r2.expected_distance) <= 1e-9);
    CHECK(std::abs(r1.expected_y_distance - r2.expected_y_distance) <= 1e-9);
    REQUIRE(r1.solves.size() == r2.solves.size());
    for (std::size_t i = 0; i < r1.solves.size(); ++i)
        CHECK(std::abs(r1.solves[i].distance - r2.solves[i].distance) <= 1e-9);
}

TEST_CASE("oversized or malformed requests are rejected") {
    Game g = chsh_anchored(0.2);
    Game rep4 = repeat_game(g, 4);
    EntangledStrategy s4 =
        det_strategy(rep4, std::vector<std::size_t>(rep4.x_alphabet.size(), 0),
                     std::vector<std::size_t>(rep4.y_alphabet.size(), 0));
    CHECK_THROWS_WITH_AS(conditioned_state(g, s4, {1}, 4),
                         doctest::Contains("SIZE_GUARD"), Error);

    // local dimension above two
    EntangledStrategy s3;
    s3.d = 3;
    Vec v = Vec::Zero(9);
    v(0) = 1.0;
    s3.state = PureState::make(HilbertSpace({{"qa", 3}, {"qb", 3}}), v);
    HilbertSpace l3({{"qa", 3}});
    HilbertSpace r3({{"qb", 3}});
    for (std::size_t x = 0; x < 2; ++x)
        s3.alice.push_back(POVM::make(l3, {Mat::Identity(3, 3), Mat::Zero(3, 3)}));
    for (std::size_t y = 0; y < 3; ++y)
        s3.bob.push_back(POVM::make(r3, {Mat::Identity(3, 3), Mat::Zero(3, 3)}));
    CHECK_THROWS_WITH_AS(conditioned_state(g, s3, {1}, 1),
                         doctest::Contains("SIZE_GUARD"), Error);

    // the conditioned set must name real coordinates, once each
    EntangledStrategy s1 = det_strategy(g, {0, 0}, {0, 0, 0});
    CHECK_THROWS_WITH_AS(conditioned_state(g, s1, {2}, 1),
                         doctest::Contains("PARAM_RANGE"), Error);
    CHECK_THROWS_WITH_AS(conditioned_state(g, s1, {0}, 1),
                         doctest::Contains("PARAM_RANGE"), Error);
    Game rep2 = repeat_game(g, 2);
    EntangledStrategy s2 =
        det_strategy(rep2, std::vector<std::size_t>(rep2.x_alphabet.size(), 0),
                     std::vector<std::size_t>(rep2.y_alphabet.size(), 0));
    CHECK_THROWS_WITH_AS(conditioned_state(g, s2, {1, 1}, 2),
                         doctest::Contains("PARAM_RANGE"), Error);

    // a single-copy strategy cannot serve the two-copy analysis
    CHECK_THROWS_WITH_AS(conditioned_state(g, s1, {1}, 2),
                         doctest::Contains("SHAPE_MISMATCH"), Error);
}

TEST_CASE("winless strategies cannot be conditioned on winning") {
    Game never = build_game({"0", "1"}, {"0", "1"}, {"0"}, {"0"},
                            {0.25, 0.25, 0.25, 0.25},
                            [](std::size_t, std::size_t, std::size_t, std::size_t) {
                                return false;
                            });
    EntangledStrategy s = det_strategy(never, {0, 0}, {0, 0});
    CHECK_THROWS_WITH_AS(conditioned_state(never, s, {1}, 1),
                         doctest::Contains("SUCCESS_TOO_RARE"), Error);
}

TEST_CASE("repair demands an anchored game and a free coordinate") {
    Game plain = chsh_game();
    EntangledStrategy sp = det_strategy(plain, {0, 0}, {0, 0});
    ConditionedAnalysis ap = conditioned_state(plain, sp, {}, 1);
    CHECK_THROWS_WITH_AS(repair_unitaries(ap, 1), doctest::Contains("NO_ANCHOR"),
                         Error);

    Game g = chsh_anchored(0.2);
    Game rep2 = repeat_game(g, 2);
    EntangledStrategy s2 =
        det_strategy(rep2, std::vector<std::size_t>(rep2.x_alphabet.size(), 0),
                     std::vector<std::size_t>(rep2.y_alphabet.size(), 0));
    ConditionedAnalysis an = conditioned_state(g, s2, {1}, 2);
    CHECK_THROWS_WITH_AS(repair_unitaries(an, 1), doctest::Contains("PARAM_RANGE"),
                         Error);
    CHECK_THROWS_WITH_AS(repair_unitaries(an, 3), doctest::Contains("PARAM_RANGE"),
                         Error);
}
