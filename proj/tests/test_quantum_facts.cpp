#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "anchorlab/classical_facts.hpp"
#include "anchorlab/compression.hpp"
#include "anchorlab/linalg.hpp"
#include "anchorlab/quantum_facts.hpp"
#include "anchorlab/quantum_info.hpp"
#include "anchorlab/rng.hpp"

#include <cmath>

using namespace anchorlab;

namespace {

HilbertSpace qubit() { return HilbertSpace({{"q", 2}}); }

DensityOperator diag2(double a, double b) {
    Mat m = Mat::Zero(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return DensityOperator::make(qubit(), m);
}

DensityOperator rand_full(Rng& rng, Eigen::Index d, const HilbertSpace& sp) {
    Mat m = 0.85 * random_density(d, rng) +
            0.15 * Mat::Identity(d, d) / static_cast<double>(d);
    return DensityOperator::make(sp, hermitize(m));
}

// pure CQ-form state sqrt(p0)|00>|s0> + sqrt(p1)|11>|s1> with qubit payloads
PureState cq_pure_pair(double p0, double angle) {
    HilbertSpace sp({{"X", 2}, {"Xc", 2}, {"B", 2}});
    Vec v = Vec::Zero(8);
    v(0) = std::sqrt(p0);                          // x=0, copy=0, payload |0>
    v(6) = std::sqrt(1.0 - p0) * std::cos(angle);  // x=1, copy=1
    v(7) = std::sqrt(1.0 - p0) * std::sin(angle);
    return PureState::make(sp, v);
}

} // namespace

TEST_CASE("trace distance dominates twice the fidelity deficit") {
    Rng rng(3);
    QuantumFactInstance in;
    in.fact = "FVDG";
    in.states = {DensityOperator::make(qubit(), random_density(2, rng)),
                 DensityOperator::make(qubit(), random_density(2, rng))};
    CHECK(verify_quantum_fact(in) >= -1e-8);

    auto back = QuantumFactInstance::from_json(in.to_json());
    CHECK(verify_quantum_fact(back) == verify_quantum_fact(in));
}

TEST_CASE("the printed pure-state distance identity misses a factor") {
    Rng rng(5);
    HilbertSpace sp = qubit();
    QuantumFactInstance in;
    in.fact = "FVDG_PURE_LITERAL";
    in.pures = {PureState::make(sp, random_unit_vector(2, rng)),
                PureState::make(sp, random_unit_vector(2, rng))};
    // signed discrepancy: sqrt(1-overlap^2) undershoots the full trace norm
    CHECK(verify_quantum_fact(in) < 0.0);
    CHECK(quantum_fact_is_report_only("FVDG_PURE_LITERAL"));
}

TEST_CASE("channels contract trace distance and grow fidelity") {
    Rng rng(9);
    QuantumFactInstance in;
    in.fact = "CHAN_MONO";
    in.states = {DensityOperator::make(qubit(), random_density(2, rng)),
                 DensityOperator::make(qubit(), random_density(2, rng))};
    // unitary channel: both quantities are exactly preserved
    in.operators = {random_unitary(2, rng)};
    CHECK(verify_quantum_fact(in) == doctest::Approx(0.0).epsilon(1e-10));

    // a genuine two-element Kraus family
    Mat iso = random_unitary(4, rng).leftCols(2);
    in.operators = {iso.topRows(2), iso.bottomRows(2)};
    CHECK(verify_quantum_fact(in) >= -1e-8);

    in.operators = {0.9 * Mat::Identity(2, 2)};
    CHECK_THROWS_WITH_AS(verify_quantum_fact(in),
                         doctest::Contains("KRAUS_INCOMPLETE"), Error);
}

TEST_CASE("the standard root bound holds where the printed one fails") {
    QuantumFactInstance in;
    in.fact = "PINSKER_STD";
    in.states = {diag2(0.5, 0.5), diag2(0.25, 0.75)};
    CHECK(verify_quantum_fact(in) >= -1e-8);

    in.fact = "PINSKER_PAPER";
    const double disc = verify_quantum_fact(in);
    CHECK(disc == doctest::Approx(-0.0445).epsilon(2e-2));
    CHECK(quantum_fact_is_report_only("PINSKER_PAPER"));
}

TEST_CASE("mixture components cannot exceed the mixing weight penalty") {
    Rng rng(13);
    QuantumFactInstance in;
    in.fact = "EVENT_PROB";
    auto rho = DensityOperator::make(qubit(), random_density(2, rng));
    in.states = {rho, rho};  // sigma collapses to rho
    in.eps = 0.25;
    CHECK(verify_quantum_fact(in) == doctest::Approx(2.0).epsilon(1e-9));

    in.states = {rho, DensityOperator::make(qubit(), random_density(2, rng))};
    CHECK(verify_quantum_fact(in) >= -1e-8);
}

TEST_CASE("max relative entropy satisfies a triangle chain") {
    Rng rng(17);
    HilbertSpace sp = qubit();
    QuantumFactInstance in;
    in.fact = "SINF_TRIANGLE";
    in.states = {rand_full(rng, 2, sp), rand_full(rng, 2, sp), rand_full(rng, 2, sp)};
    CHECK(verify_quantum_fact(in) >= -1e-8);
}

TEST_CASE("max relative entropy is unitarily invariant") {
    Rng rng(3);
    QuantumFactInstance in;
    in.fact = "SINF_UNITARY";
    in.states = {DensityOperator::make(qubit(), random_density(2, rng)),
                 rand_full(rng, 2, qubit())};
    in.operators = {random_unitary(2, rng)};
    CHECK(quantum_fact_is_equality("SINF_UNITARY"));
    CHECK(verify_quantum_fact(in) <= 1e-9);  // |LHS - RHS|

    Mat not_unitary = Mat::Identity(2, 2);
    not_unitary(0, 0) = 0.5;
    in.operators = {not_unitary};
    CHECK_THROWS_WITH_AS(verify_quantum_fact(in),
                         doctest::Contains("HYPOTHESIS_VIOLATED"), Error);
}

TEST_CASE("max information respects the dimension bound") {
    Rng rng(19);
    HilbertSpace sp({{"Y", 2}, {"Z", 2}});
    QuantumFactInstance in;
    in.fact = "DIM_UB";
    in.states = {DensityOperator::make(sp, random_density(4, rng))};
    CHECK(verify_quantum_fact(in) >= -1e-8);
}

TEST_CASE("relative entropy decomposes over classical labels") {
    Rng rng(23);
    auto p = FiniteDistribution::from_table({{"L", {"0", "1"}}}, {0.3, 0.7});
    auto q = FiniteDistribution::from_table({{"L", {"0", "1"}}}, {0.45, 0.55});
    QuantumFactInstance in;
    in.fact = "COND_DEC";
    in.cqs = {CQState::make(p, {DensityOperator::make(qubit(), random_density(2, rng)),
                                DensityOperator::make(qubit(), random_density(2, rng))}),
              CQState::make(q, {rand_full(rng, 2, qubit()), rand_full(rng, 2, qubit())})};
    CHECK(quantum_fact_is_equality("COND_DEC"));
    CHECK(verify_quantum_fact(in) <= 1e-8);
}

TEST_CASE("nearby laws keep max information under the tail threshold") {
    Rng rng(29);
    auto axes = std::vector<Axis>{{"X", {"0", "1"}}, {"Y", {"0", "1"}}};
    auto table = FiniteDistribution::from_table(axes, dirichlet_flat(rng, 4));
    HilbertSpace qs({{"Z", 2}});
    std::vector<DensityOperator> conds;
    for (int i = 0; i < 4; ++i)
        conds.push_back(DensityOperator::make(qs, random_density(2, rng)));
    CQState sigma = CQState::make(table, conds);

    QuantumFactInstance in;
    in.fact = "IMAX_CLOSE";
    in.cqs = {sigma};
    in.c = conditional_mutual_information(sigma, {"Y"}, {"Z"}, {"X"}) + 0.5;
    in.eps = 0.35;
    in.delta = 0.1;
    // tiny perturbation of the classical law
    std::vector<double> w = table.weights();
    w[0] += 0.01;
    w[3] -= 0.01;
    in.dists = {FiniteDistribution::from_table(axes, w)};
    CHECK(verify_quantum_fact(in) >= -1e-8);

    // a distant law violates the closeness hypothesis
    std::vector<double> far = {0.97, 0.01, 0.01, 0.01};
    in.dists = {FiniteDistribution::from_table(axes, far)};
    CHECK_THROWS_WITH_AS(verify_quantum_fact(in),
                         doctest::Contains("HYPOTHESIS_VIOLATED"), Error);
}

TEST_CASE("classical registers each pay their own information toll") {
    Rng rng(31);
    auto axes = std::vector<Axis>{{"U", {"0", "1"}}, {"V", {"0", "1"}}};
    HilbertSpace qs({{"q", 2}});

    // sigma: exact product law, identical conditionals everywhere
    auto m1 = std::vector<double>{0.4, 0.6};
    auto m2 = std::vector<double>{0.3, 0.7};
    std::vector<double> w;
    for (double a : m1)
        for (double b : m2) w.push_back(a * b);
    DensityOperator fixed = rand_full(rng, 2, qs);
    CQState sigma = CQState::make(FiniteDistribution::from_table(axes, w),
                                  {fixed, fixed, fixed, fixed});

    std::vector<DensityOperator> rc;
    for (int i = 0; i < 4; ++i) rc.push_back(rand_full(rng, 2, qs));
    CQState rho = CQState::make(FiniteDistribution::from_table(
                                    axes, dirichlet_flat(rng, 4)),
                                rc);
    QuantumFactInstance in;
    in.fact = "RAZ";
    in.cqs = {rho, sigma};
    CHECK(verify_quantum_fact(in) >= -1e-8);

    // rho == sigma: both sides vanish
    QuantumFactInstance same;
    same.fact = "RAZ";
    same.cqs = {sigma, sigma};
    CHECK(verify_quantum_fact(same) == doctest::Approx(0.0).epsilon(1e-9));

    // correlated reference law violates the product hypothesis
    CQState corr = CQState::make(
        FiniteDistribution::from_table(axes, {0.4, 0.1, 0.1, 0.4}),
        {fixed, fixed, fixed, fixed});
    QuantumFactInstance bad;
    bad.fact = "RAZ";
    bad.cqs = {rho, corr};
    CHECK_THROWS_WITH_AS(verify_quantum_fact(bad),
                         doctest::Contains("HYPOTHESIS_VIOLATED"), Error);
}

TEST_CASE("smoothing can always reach the substate budget") {
    Rng rng(37);
    QuantumFactInstance in;
    in.fact = "SUBSTATE";
    in.states = {DensityOperator::make(qubit(), random_density(2, rng)),
                 rand_full(rng, 2, qubit())};
    in.eps = 0.3;
    CHECK(verify_quantum_fact(in) >= -1e-8);
}

TEST_CASE("label extraction verifies success and closeness") {
    // two labels, qubit payloads with overlap 0.9
    const double angle = std::acos(0.9);
    PureState st = cq_pure_pair(0.5, angle);

    HilbertSpace sp2({{"L", 2}, {"B", 2}});
    Mat s0 = Mat::Zero(2, 2), s1(2, 2);
    s0(0, 0) = 1.0;
    Vec v1(2);
    v1 << std::cos(angle), std::sin(angle);
    s1 = v1 * v1.adjoint();
    Mat rho_xb = Mat::Zero(4, 4);
    rho_xb.block(0, 0, 2, 2) = 0.5 * s0;
    rho_xb.block(2, 2, 2, 2) = 0.5 * s1;
    Mat theta = 0.5 * s0 + 0.5 * s1;
    CompressionWitness witness{DensityOperator::make(sp2, hermitize(rho_xb)),
                               DensityOperator::make(HilbertSpace({{"B", 2}}),
                                                     hermitize(theta))};
    const double delta = 0.2;
    CompressionResult res = compression_measurement(st, witness, delta);
    REQUIRE(res.operators.size() == 2);

    Mat diag_p = 0.5 * Mat::Identity(2, 2);
    const double k = relative_min_entropy(
        witness.rho_prime,
        DensityOperator::make(sp2, hermitize(kron(diag_p, theta))));
    CHECK(res.alpha >= std::pow(2.0, -k / delta) / 4.0 - 1e-9);
    CHECK(res.closeness <= 2.0 * delta + 1e-9);

    QuantumFactInstance in;
    in.fact = "JRS_VERIFY";
    in.pures = {st};
    in.operators = res.operators;
    in.alpha = std::pow(2.0, -k / delta) / 4.0;
    in.delta = 2.0 * delta;
    CHECK(verify_quantum_fact(in) >= -1e-8);

    // identical payloads: the extraction is exact
    PureState easy = cq_pure_pair(0.4, 0.0);
    Mat rho2 = Mat::Zero(4, 4);
    rho2.block(0, 0, 2, 2) = 0.4 * s0;
    rho2.block(2, 2, 2, 2) = 0.6 * s0;
    CompressionWitness w2{DensityOperator::make(sp2, hermitize(rho2)),
                          DensityOperator::make(HilbertSpace({{"B", 2}}), s0)};
    CompressionResult res2 = compression_measurement(easy, w2, delta);
    CHECK(res2.closeness <= 1e-6);

    // off-diagonal label mass is not the stated form
    HilbertSpace sp({{"X", 2}, {"Xc", 2}, {"B", 2}});
    Vec bad = Vec::Zero(8);
    bad(0) = std::sqrt(0.5);
    bad(2) = std::sqrt(0.5);  // copy register disagrees with the label
    CHECK_THROWS_WITH_AS(
        compression_measurement(PureState::make(sp, bad), witness, delta),
        doctest::Contains("FORM_VIOLATION"), Error);
}

TEST_CASE("fact inventory covers both suits and flags special ids") {
    CHECK(kQuantumFactIds.size() == 14);
    CHECK(kClassicalFactIds.size() == 7);
    CHECK(quantum_fact_is_report_only("PINSKER_PAPER"));
    CHECK(quantum_fact_is_report_only("FVDG_PURE_LITERAL"));
    CHECK(!quantum_fact_is_report_only("FVDG"));
    CHECK(quantum_fact_is_equality("SINF_UNITARY"));
    CHECK(quantum_fact_is_equality("COND_DEC"));
    CHECK(!quantum_fact_is_equality("RAZ"));

    QuantumFactInstance in;
    in.fact = "NO_SUCH_FACT";
    CHECK_THROWS_WITH_AS(verify_quantum_fact(in), doctest::Contains("UNKNOWN_FACT"),
                         Error);
}
