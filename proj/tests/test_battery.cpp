#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "anchorlab/battery.hpp"

#include <cmath>
#include <set>

using namespace anchorlab;

TEST_CASE("suite names select disjoint fact inventories") {
    auto classical = battery_fact_ids("classical");
    auto quantum = battery_fact_ids("quantum");
    auto breaker = battery_fact_ids("breaker");
    auto all = battery_fact_ids("all");
    CHECK(classical.size() == 7);
    CHECK(quantum.size() == 14);
    CHECK(breaker.size() == 5);
    CHECK(all.size() == classical.size() + quantum.size() + breaker.size());
    std::set<std::string> seen(all.begin(), all.end());
    CHECK(seen.size() == all.size());
    CHECK_THROWS_WITH_AS(battery_fact_ids("bogus"), doctest::Contains("CONFIG_RANGE"),
                         Error);
}

TEST_CASE("bad configurations are rejected before any work") {
    BatteryConfig c;
    c.suite = "nope";
    CHECK_THROWS_WITH_AS(run_battery(c), doctest::Contains("CONFIG_RANGE"), Error);
    c = BatteryConfig{};
    c.max_alphabet = 1;
    CHECK_THROWS_WITH_AS(run_battery(c), doctest::Contains("CONFIG_RANGE"), Error);
    c = BatteryConfig{};
    c.max_dim = 9;
    CHECK_THROWS_WITH_AS(run_battery(c), doctest::Contains("CONFIG_RANGE"), Error);
    c = BatteryConfig{};
    c.quantum_tolerance = std::nan("");
    CHECK_THROWS_WITH_AS(run_battery(c), doctest::Contains("CONFIG_RANGE"), Error);
}

TEST_CASE("zero trials yields an empty passing report") {
    BatteryConfig c;
    c.trials = 0;
    c.suite = "classical";
    BatteryReport r = run_battery(c);
    CHECK(r.pass);
    CHECK(r.facts.size() == 7);
    for (const auto& f : r.facts) {
        CHECK(f.trials == 0);
        CHECK(f.violations == 0);
        CHECK(f.dumps.empty());
    }
}

TEST_CASE("identical configs give byte-identical reports") {
    BatteryConfig c;
    c.trials = 8;
    c.seed = 123;
    BatteryReport a = run_battery(c);
    BatteryReport b = run_battery(c);
    CHECK(a.to_json().dump() == b.to_json().dump());

    c.seed = 124;
    BatteryReport d = run_battery(c);
    CHECK(a.to_json().dump() != d.to_json().dump());
}

TEST_CASE("the classical suite holds up under a seeded sweep") {
    BatteryConfig c;
    c.suite = "classical";
    c.trials = 50;
    BatteryReport r = run_battery(c);
    CHECK(r.pass);
    for (const auto& f : r.facts) {
        CHECK(f.trials == 50);
        CHECK(f.violations == 0);
        CHECK(f.min_margin >= -c.classical_tolerance);
    }
}

TEST_CASE("the quantum suite holds up and reports known discrepancies") {
    BatteryConfig c;
    c.suite = "quantum";
    c.trials = 20;
    BatteryReport r = run_battery(c);
    CHECK(r.pass);
    bool saw_pinsker = false, saw_pure = false;
    for (const auto& f : r.facts) {
        CHECK(f.trials == 20);
        if (f.report_only) {
            // report-only facts never count as violations
            CHECK(f.violations == 0);
            if (f.fact == "PINSKER_PAPER") {
                saw_pinsker = true;
                CHECK(f.discrepancies > 0);
            }
            if (f.fact == "FVDG_PURE_LITERAL") {
                saw_pure = true;
                CHECK(f.discrepancies > 0);
            }
        } else {
            CHECK(f.violations == 0);
        }
    }
    CHECK(saw_pinsker);
    CHECK(saw_pure);
}

TEST_CASE("the dependency-breaking suite holds up") {
    BatteryConfig c;
    c.suite = "breaker";
    c.trials = 40;
    BatteryReport r = run_battery(c);
    CHECK(r.pass);
    for (const auto& f : r.facts) CHECK(f.violations == 0);
}

TEST_CASE("single trial margins match the full run") {
    BatteryConfig c;
    c.trials = 6;
    c.suite = "classical";
    BatteryReport r = run_battery(c);
    for (const auto& f : r.facts) {
        double mn = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < c.trials; ++t)
            mn = std::min(mn, battery_trial_margin(f.fact, c, t));
        CHECK(mn == f.min_margin);
    }
}

TEST_CASE("forced violations produce replayable dumps") {
    // an absurd tolerance turns every margin into a violation
    BatteryConfig c;
    c.suite = "classical";
    c.trials = 5;
    c.classical_tolerance = -10.0;
    BatteryReport r = run_battery(c);
    CHECK(!r.pass);
    std::size_t dumped = 0;
    for (const auto& f : r.facts) {
        CHECK(f.violations == 5);
        CHECK(f.dumps.size() == std::min<std::size_t>(5, c.max_dumps));
        for (const auto& d : f.dumps) {
            ++dumped;
            REQUIRE(d.contains("instance"));
            REQUIRE(d.contains("margin"));
            // the stored instance reproduces the stored margin
            CHECK(std::abs(replay_dump(d) - d["margin"].get<double>()) <= 1e-12);
        }
    }
    CHECK(dumped == 7 * c.max_dumps);
}

TEST_CASE("report serialization has the documented shape") {
    BatteryConfig c;
    c.suite = "breaker";
    c.trials = 3;
    c.seed = 9;
    BatteryReport r = run_battery(c);
    auto j = r.to_json();
    CHECK(j["seed"] == 9);
    REQUIRE(j.contains("facts"));
    for (const auto& id : battery_fact_ids("breaker")) {
        REQUIRE(j["facts"].contains(id));
        const auto& jf = j["facts"][id];
        CHECK(jf["trials"] == 3);
        CHECK(jf.contains("min_margin"));
        CHECK(jf.contains("violations"));
    }
}
