#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "anchorlab/distribution.hpp"
#include "anchorlab/rng.hpp"

#include <cmath>

using namespace anchorlab;

namespace {

FiniteDistribution coin(double p0, const std::string& axis = "c") {
    return FiniteDistribution::from_table({{axis, {"0", "1"}}}, {p0, 1.0 - p0});
}

bool has_code(const Error& e, const std::string& code) {
    return std::string(e.what()).rfind(code, 0) == 0;
}

} // namespace

TEST_CASE("construction validates and renormalizes") {
    auto p = FiniteDistribution::from_table({{"u", {"a", "b", "c"}}}, {0.2, 0.3, 0.5});
    CHECK(p.size() == 3);
    CHECK(p.weight(std::size_t{2}) == doctest::Approx(0.5).epsilon(1e-12));

    double total = 0.0;
    for (double w : p.weights()) total += w;
    CHECK(std::abs(total - 1.0) <= 1e-12);

    CHECK_THROWS_WITH_AS(FiniteDistribution::from_table({{"u", {"a", "b"}}}, {0.7, -0.1}),
                         doctest::Contains("NEGATIVE_WEIGHT"), Error);
    CHECK_THROWS_WITH_AS(FiniteDistribution::from_table({{"u", {"a", "b"}}}, {0.7, 0.2}),
                         doctest::Contains("NOT_NORMALIZED"), Error);
    CHECK_THROWS_WITH_AS(
        FiniteDistribution::from_table({{"u", {"a"}}, {"u", {"b"}}}, {0.5, 0.5}),
        doctest::Contains("DUPLICATE_AXIS"), Error);
    CHECK_THROWS_WITH_AS(FiniteDistribution::from_table({{"u", {"a", "b"}}}, {1.0}),
                         doctest::Contains("BAD_SHAPE"), Error);
}

TEST_CASE("index arithmetic round-trips") {
    auto p = FiniteDistribution::from_table(
        {{"u", {"0", "1"}}, {"v", {"0", "1", "2"}}},
        {0.1, 0.2, 0.1, 0.15, 0.25, 0.2});
    for (std::size_t f = 0; f < p.size(); ++f)
        CHECK(p.flat_index(p.tuple_of(f)) == f);
    CHECK(p.prob({"1", "2"}) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(p.axis_index("v") == 1);
    CHECK_THROWS_AS((void)p.axis_index("w"), Error);
}

TEST_CASE("l1 distance is a metric on matching axes") {
    auto p = coin(0.9);
    auto q = coin(0.8);
    CHECK(l1_distance(p, q) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(l1_distance(p, p) == doctest::Approx(0.0));
    CHECK(l1_distance(q, p) == doctest::Approx(l1_distance(p, q)));
    CHECK_THROWS_WITH_AS(l1_distance(p, coin(0.8, "d")),
                         doctest::Contains("AXIS_MISMATCH"), Error);
}

TEST_CASE("kernel composition produces the expected joint") {
    auto p = coin(0.5, "u");
    Axis target{"z", {"0", "1"}};
    auto k = Kernel::from_rows(
        {{"u", {"0", "1"}}}, {target},
        {FiniteDistribution::from_table({target}, {0.9, 0.1}),
         FiniteDistribution::from_table({target}, {0.2, 0.8})});
    auto joint = compose(p, k);
    REQUIRE(joint.size() == 4);
    CHECK(joint.prob({"0", "0"}) == doctest::Approx(0.45).epsilon(1e-12));
    CHECK(joint.prob({"0", "1"}) == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(joint.prob({"1", "0"}) == doctest::Approx(0.10).epsilon(1e-12));
    CHECK(joint.prob({"1", "1"}) == doctest::Approx(0.40).epsilon(1e-12));

    // composing the marginal with the extracted conditional recovers the joint
    auto back = compose(marginal(joint, {"u"}), conditional(joint, {"u"}, {"z"}));
    CHECK(l1_distance(joint, back) <= 1e-12);
}

TEST_CASE("marginal and conditioning behave on a worked table") {
    auto p = FiniteDistribution::from_table(
        {{"x", {"0", "1"}}, {"y", {"0", "1"}}}, {0.4, 0.1, 0.1, 0.4});
    auto mx = marginal(p, {"x"});
    CHECK(mx.prob({"0"}) == doctest::Approx(0.5).epsilon(1e-12));

    auto c = condition(p, "x", "0");
    CHECK(c.axes().size() == 1);
    CHECK(c.prob({"0"}) == doctest::Approx(0.8).epsilon(1e-12));

    auto zero = FiniteDistribution::from_table(
        {{"x", {"0", "1"}}, {"y", {"0", "1"}}}, {0.5, 0.5, 0.0, 0.0});
    CHECK_THROWS_WITH_AS(condition(zero, "x", "1"),
                         doctest::Contains("ZERO_PROBABILITY_CONDITION"), Error);
}

TEST_CASE("events restrict by their own axes") {
    auto p = FiniteDistribution::from_table(
        {{"x", {"0", "1"}}, {"y", {"0", "1"}}}, {0.4, 0.1, 0.1, 0.4});
    Event diag = Event::from_tuples({{"x", {"0", "1"}}, {"y", {"0", "1"}}},
                                    {{0, 0}, {1, 1}});
    CHECK(probability(p, diag) == doctest::Approx(0.8).epsilon(1e-12));

    Event first = Event::from_tuples({{"x", {"0", "1"}}}, {{0}});
    CHECK(probability(p, first) == doctest::Approx(0.5).epsilon(1e-12));

    auto conditioned = condition(p, diag);
    CHECK(conditioned.prob({"0", "0"}) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(conditioned.prob({"0", "1"}) == doctest::Approx(0.0));
}

TEST_CASE("json round trip is exact") {
    Rng rng(41);
    std::vector<double> w = dirichlet_flat(rng, 6);
    auto p = FiniteDistribution::from_table(
        {{"x", {"0", "1"}}, {"y", {"a", "b", "c"}}}, w);
    auto q = FiniteDistribution::from_json(p.to_json());
    CHECK(axes_equal(p.axes(), q.axes()));
    for (std::size_t f = 0; f < p.size(); ++f)
        CHECK(p.weights()[f] == q.weights()[f]);
    CHECK(p.to_json().dump() == q.to_json().dump());

    Event e = Event::from_tuples({{"x", {"0", "1"}}}, {{1}});
    CHECK(probability(q, event_from_json(event_to_json(e))) ==
          doctest::Approx(probability(p, e)));
}

TEST_CASE("kernel rows must match the declared shape") {
    Axis t{"z", {"0", "1"}};
    CHECK_THROWS_WITH_AS(
        Kernel::from_rows({{"u", {"0", "1"}}}, {t},
                          {FiniteDistribution::from_table({t}, {0.5, 0.5})}),
        doctest::Contains("BAD_SHAPE"), Error);
    CHECK_THROWS_WITH_AS(
        Kernel::from_rows({{"u", {"0", "1"}}}, {t},
                          {FiniteDistribution::from_table({t}, {0.5, 0.5}),
                           FiniteDistribution::from_table({{"w", {"0", "1"}}},
                                                          {0.5, 0.5})}),
        doctest::Contains("AXIS_MISMATCH"), Error);
}

TEST_CASE("composition rejects colliding target axes") {
    auto p = coin(0.5, "u");
    Axis t{"u", {"0", "1"}};
    auto k = Kernel::from_rows({{"u", {"0", "1"}}}, {t},
                               {FiniteDistribution::from_table({t}, {1.0, 0.0}),
                                FiniteDistribution::from_table({t}, {0.0, 1.0})});
    bool threw = false;
    try {
        compose(p, k);
    } catch (const Error& e) {
        threw = has_code(e, "AXIS_MISMATCH");
    }
    CHECK(threw);
}
