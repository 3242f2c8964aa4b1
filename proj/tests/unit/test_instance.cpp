#include "fixtures.hpp"

#include "ucr/error.hpp"
#include "ucr/instance.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace ucr;

namespace {

const char* kMinimal = R"({
  "buses": ["b1"], "ref_bus": "b1",
  "generators": [{"id": "g1", "bus": "b1", "c": 2, "c_nl": 5, "c_su": 20, "p_min": 10, "p_max": 50,
                  "ut": 1, "dt": 1, "r_hr": 50, "r_su": 50, "r_sd": 50, "u0": 0, "p0": 0, "init_duration": 1}],
  "lines": [], "horizon": 2, "demand": {"b1": [30, 20]}
})";

std::string replace(std::string s, const std::string& from, const std::string& to) {
    s.replace(s.find(from), from.size(), to);
    return s;
}

}  // namespace

TEST_CASE("parse_instance reads the smallest well-formed document") {
    const auto inst = parse_instance(kMinimal);
    CHECK(inst.generators.size() == 1);
    CHECK(inst.horizon == 2);
    CHECK(inst.total_demand(1) == 30.0);
}

TEST_CASE("parse_instance names a dangling bus reference") {
    const auto text = replace(kMinimal, R"("bus": "b1")", R"("bus": "b9")");
    try {
        parse_instance(text);
        FAIL("expected a semantic error");
    } catch (const SemanticError& e) {
        CHECK(std::string(e.what()).find("b9") != std::string::npos);
    }
}

TEST_CASE("parse_instance error classes") {
    CHECK_THROWS_AS(parse_instance("{\"buses\": ["), ParseError);
    CHECK_THROWS_AS(parse_instance(replace(kMinimal, R"("lines": [])", R"("lines": [], "extra": 1)")), SchemaError);
    CHECK_THROWS_AS(parse_instance(replace(kMinimal, R"("horizon": 2)", R"("horizon": "2")")), SchemaError);
    CHECK_THROWS_AS(parse_instance(replace(kMinimal, "[30, 20]", "[30]")), Error);
    CHECK_THROWS_AS(load_instance("/nonexistent/instance.json"), ParseError);
}

TEST_CASE("serialize/parse round trip is a fixed point") {
    for (const auto* name : {"tiny.json", "bench16.json"}) {
        const auto inst = load_instance(fixtures::data_path(name));
        const auto again = parse_instance(serialize_instance(inst));
        CHECK(again == inst);
        CHECK(serialize_instance(again) == serialize_instance(inst));
    }
}

TEST_CASE("validate_instance") {
    using fixtures::unit;
    SUBCASE("ample capacity") {
        const auto inst = fixtures::single_bus({unit("g1", 10, 50, 2), unit("g2", 5, 40, 3)}, {30, 60});
        CHECK(validate_instance(inst).empty());
    }
    SUBCASE("p_min above p_max names the unit") {
        auto inst = fixtures::single_bus({unit("g1", 10, 50, 2), unit("g2", 5, 40, 3)}, {30, 60});
        inst.generators[1].p_min = 45;
        const auto v = validate_instance(inst);
        REQUIRE(v.size() >= 1);
        bool named = false;
        for (const auto& x : v) named = named || x.field.find("generators[1]") != std::string::npos;
        CHECK(named);
    }
    SUBCASE("peak demand above total capacity") {
        const auto inst = fixtures::single_bus({unit("g1", 10, 50, 2), unit("g2", 5, 30, 3)}, {40, 100});
        const auto v = validate_instance(inst);
        REQUIRE(v.size() == 1);
        CHECK(v[0].field == "capacity");
    }
    SUBCASE("disconnected network") {
        auto inst = fixtures::single_bus({unit("g1", 10, 50, 2)}, {10});
        inst.buses.push_back("b2");
        inst.demand.push_back({0.0});
        CHECK_FALSE(validate_instance(inst).empty());
    }
}

TEST_CASE("perturb_demand") {
    const auto inst = load_instance(fixtures::data_path("tiny.json"));
    SUBCASE("zero noise is the identity") { CHECK(perturb_demand(inst, 0.0, 3).demand == inst.demand); }
    SUBCASE("deterministic and non-mutating") {
        const auto copy = inst;
        const auto a = perturb_demand(inst, 0.1, 7);
        const auto b = perturb_demand(inst, 0.1, 7);
        CHECK(a.demand == b.demand);
        CHECK(inst == copy);
        CHECK(a.demand != inst.demand);
    }
    SUBCASE("never negative, even under heavy noise") {
        for (std::uint64_t s = 0; s < 50; ++s)
            for (const auto& row : perturb_demand(inst, 3.0, s).demand)
                for (double d : row) CHECK(d >= 0.0);
    }
    SUBCASE("relative noise has mean one") {
        double sum = 0.0;
        int n = 0;
        for (std::uint64_t s = 0; s < 10000 / 12 + 1; ++s) {
            const auto p = perturb_demand(inst, 0.1, s);
            for (std::size_t b = 0; b < inst.demand.size(); ++b)
                for (std::size_t t = 0; t < inst.demand[b].size(); ++t) {
                    sum += p.demand[b][t] / inst.demand[b][t];
                    ++n;
                }
        }
        CHECK(n >= 10000);
        CHECK(std::fabs(sum / n - 1.0) < 0.01);
    }
    CHECK_THROWS(perturb_demand(inst, -0.1, 1));
}

TEST_CASE("load_distance is a metric") {
    const std::vector<double> a{3, 0}, b{0, 4};
    CHECK(load_distance(a, b) == doctest::Approx(5.0));
    CHECK(load_distance(a, a) == 0.0);
    CHECK_THROWS_AS(load_distance(a, std::vector<double>{1, 2, 3}), DimensionError);

    std::mt19937_64 rng(11);
    std::normal_distribution<double> nd(100.0, 30.0);
    auto sample = [&] {
        std::vector<double> v(24);
        for (auto& x : v) x = nd(rng);
        return v;
    };
    for (int i = 0; i < 200; ++i) {
        const auto x = sample(), y = sample(), z = sample();
        CHECK(load_distance(x, y) >= 0.0);
        CHECK(load_distance(x, y) == load_distance(y, x));
        CHECK(load_distance(x, z) <= load_distance(x, y) + load_distance(y, z) + 1e-9);
        CHECK(load_distance(x, y) > 0.0);
    }
}

TEST_CASE("history round trip and shape checks") {
    const auto inst = load_instance(fixtures::data_path("bench16.json"));
    const auto bank = load_history(fixtures::data_path("bench16_history.json"));
    CHECK(bank.size() == 20);
    const auto again = parse_history(serialize_history(bank));
    REQUIRE(again.size() == bank.size());
    CHECK(again.days[0].schedule.u == bank.days[0].schedule.u);
    CHECK(again.days[0].demand == bank.days[0].demand);
    CHECK(bank.days[0].schedule.u.size() == inst.generators.size());
    CHECK_THROWS_AS(parse_history("{}"), SchemaError);
    CHECK_THROWS_AS(parse_history("[{\"demand\": [1, 2], \"schedule\": {\"u\": [[1]], \"p\": [[1]]}}]"), DimensionError);
}
