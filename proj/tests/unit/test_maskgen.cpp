#include "fixtures.hpp"
#include "llm_corpus.hpp"
#include "stubs.hpp"

#include "ucr/error.hpp"
#include "ucr/formulation.hpp"
#include "ucr/maskgen.hpp"
#include "ucr/solver.hpp"

#include <doctest.h>

#include <chrono>
#include <cmath>
#include <map>

using namespace ucr;

namespace {

const UcInstance& tiny() {
    static const auto inst = load_instance(fixtures::data_path("tiny.json"));
    return inst;
}

HistoryDay day(const UcInstance& inst, std::vector<std::vector<int>> u, double load_scale = 1.0) {
    HistoryDay d;
    d.demand = inst.total_demand_profile();
    for (auto& x : d.demand) x *= load_scale;
    d.schedule.p.resize(u.size());
    for (std::size_t g = 0; g < u.size(); ++g)
        for (int x : u[g]) d.schedule.p[g].push_back(x * inst.generators[g].p_min);
    d.schedule.u = std::move(u);
    return d;
}

std::vector<std::vector<int>> all(int g1, int g2, int g3) {
    return {std::vector<int>(6, g1), std::vector<int>(6, g2), std::vector<int>(6, g3)};
}

}  // namespace

TEST_CASE("stability_mask consensus and priority") {
    const auto& inst = tiny();
    SUBCASE("unit on in every similar day is frozen on every hour") {
        HistoryBank h;
        for (int i = 0; i < 3; ++i) h.days.push_back(day(inst, all(1, 0, 0)));
        const auto m = stability_mask(inst, h, 3, 1);
        for (int t = 1; t <= 6; ++t) {
            REQUIRE(m.find(t, "g1") != nullptr);
            CHECK(m.find(t, "g1")->u == 1);
        }
    }
    SUBCASE("disagreement removes the cell") {
        HistoryBank h;
        h.days.push_back(day(inst, all(1, 0, 0)));
        auto u = all(1, 0, 0);
        u[0][4] = 0;
        h.days.push_back(day(inst, u));
        const auto m = stability_mask(inst, h, 2, 3);
        CHECK(m.find(5, "g1") == nullptr);
        CHECK(m.find(4, "g1") != nullptr);
    }
    SUBCASE("larger p_max wins the per-hour cap") {
        HistoryBank h;
        h.days.push_back(day(inst, all(1, 1, 0)));
        h.days.push_back(day(inst, all(1, 1, 1)));
        const auto m = stability_mask(inst, h, 2, 1);
        for (int t = 1; t <= 6; ++t) {
            CHECK(m.count_at(t) == 1);
            CHECK(m.find(t, "g1") != nullptr);
        }
    }
    SUBCASE("only the H most similar days vote") {
        HistoryBank h;
        h.days.push_back(day(inst, all(1, 1, 1), 3.0));  // far regime
        h.days.push_back(day(inst, all(1, 0, 0), 1.01));
        const auto m = stability_mask(inst, h, 1, 3);
        CHECK(m.find(1, "g2")->u == 0);
        CHECK(nearest_days(inst, h, 1) == std::vector<std::size_t>{1});
    }
    CHECK_THROWS(stability_mask(inst, HistoryBank{}, 3, 1));
    HistoryBank bad;
    bad.days.push_back(day(inst, {{1, 1}, {0, 0}, {0, 0}}));
    CHECK_THROWS_AS(stability_mask(inst, bad, 1, 1), DimensionError);
}

TEST_CASE("knn_mask") {
    const auto& inst = tiny();
    HistoryBank h;
    h.days.push_back(day(inst, all(1, 0, 1), 1.0));
    h.days.push_back(day(inst, all(0, 1, 1), 1.5));
    h.days.push_back(day(inst, all(1, 1, 0), 0.7));

    SUBCASE("one neighbour copies the nearest day under the cap") {
        const auto m = knn_mask(inst, h, 1, 2);
        for (int t = 1; t <= 6; ++t) {
            CHECK(m.count_at(t) == 2);
            CHECK(m.find(t, "g1")->u == 1);
            CHECK(m.find(t, "g2")->u == 0);
        }
        CHECK(m == stability_mask(inst, h, 1, 2));
        CHECK(m == knn_mask(inst, h, 1, 2));
    }
    SUBCASE("a dissenting day in every cell leaves nothing") {
        CHECK(knn_mask(inst, h, 3, 3).empty());
    }
    CHECK_THROWS(knn_mask(inst, h, 4, 1));
}

TEST_CASE("kmeans_mask and kmeans") {
    const auto& inst = tiny();
    HistoryBank h;
    for (int i = 0; i < 4; ++i) h.days.push_back(day(inst, all(1, 0, 0), 1.0 + 0.01 * i));  // low regime
    for (int i = 0; i < 4; ++i) h.days.push_back(day(inst, all(1, 1, 1), 2.0 + 0.01 * i));  // high regime

    SUBCASE("one cluster is unanimity over the history") {
        const auto m = kmeans_mask(inst, h, 1, 3, 9);
        for (int t = 1; t <= 6; ++t) {
            CHECK(m.count_at(t) == 1);
            CHECK(m.find(t, "g1")->u == 1);
        }
    }
    SUBCASE("target joins its own regime") {
        const auto m = kmeans_mask(inst, h, 2, 3, 9);
        for (int t = 1; t <= 6; ++t) {
            CHECK(m.count_at(t) == 3);
            CHECK(m.find(t, "g2")->u == 0);
        }
        CHECK(m == kmeans_mask(inst, h, 2, 3, 9));
    }
    SUBCASE("lloyd iterations separate two blobs") {
        std::vector<std::vector<double>> pts;
        for (int i = 0; i < 5; ++i) pts.push_back({0.0 + i * 0.1, 0.0});
        for (int i = 0; i < 5; ++i) pts.push_back({50.0 + i * 0.1, 50.0});
        const auto r = kmeans(pts, 2, 4);
        CHECK(r.labels[0] != r.labels[9]);
        for (int i = 1; i < 5; ++i) CHECK(r.labels[static_cast<std::size_t>(i)] == r.labels[0]);
        CHECK(r.iterations <= 100);
    }
    CHECK_THROWS(kmeans_mask(inst, h, 9, 1, 1));
}

TEST_CASE("random_mask") {
    const auto& inst = tiny();
    CHECK(random_mask(inst, 0.0, 1).empty());

    std::vector<Generator> gens;
    for (int g = 0; g < 10; ++g) gens.push_back(fixtures::unit("g" + std::to_string(g), 0, 10, 1));
    const auto big = fixtures::single_bus(gens, std::vector<double>(24, 20.0));
    const auto m = random_mask(big, 0.1, 5);
    CHECK(m.size() == 24);
    CHECK(m.k_cap() == 1);
    CHECK(m == random_mask(big, 0.1, 5));
    CHECK_FALSE(m == random_mask(big, 0.1, 6));
    CHECK_THROWS(random_mask(inst, 1.5, 1));
}

TEST_CASE("random_mask selects cells uniformly") {
    std::vector<Generator> gens;
    for (int g = 0; g < 5; ++g) gens.push_back(fixtures::unit("g" + std::to_string(g), 0, 10, 1));
    const auto inst = fixtures::single_bus(gens, {10, 10, 10, 10});
    std::map<std::pair<int, std::string>, int> freq;
    const int draws = 10000;
    const double ratio = 0.25;
    for (int s = 0; s < draws; ++s) {
        const auto m = random_mask(inst, ratio, static_cast<std::uint64_t>(s));
        for (const auto& e : m.entries()) ++freq[{e.t, e.g}];
    }
    REQUIRE(freq.size() == 20);
    const double p = std::floor(ratio * 20) / 20.0;
    const double mean = draws * p, sd = std::sqrt(draws * p * (1 - p));
    for (const auto& [cell, n] : freq) CHECK(std::fabs(n - mean) <= 3 * sd);
}

TEST_CASE("fix_at_optimum_mask copies the optimum") {
    const auto& inst = tiny();
    const auto prob = build_uc_milp(inst);
    const auto res = solve_milp(prob);
    const auto sched = to_schedule(extract_assignment(prob, *res.solution));
    const auto m = fix_at_optimum_mask(inst, sched, 0.34, 3);
    CHECK(m.size() == 6);
    for (const auto& e : m.entries()) {
        const auto g = static_cast<std::size_t>(e.g[1] - '1');
        CHECK(e.u == sched.u[g][static_cast<std::size_t>(e.t - 1)]);
    }
}

TEST_CASE("build_llm_prompt") {
    const auto& inst = tiny();
    HistoryBank h;
    h.days.push_back(day(inst, all(1, 0, 0)));
    const auto without = build_llm_prompt(inst, HistoryBank{}, 3, 2).text();
    const auto with = build_llm_prompt(inst, h, 3, 2).text();
    CHECK(without.find("Reference days") == std::string::npos);
    CHECK(with.find("Reference days") != std::string::npos);
    CHECK(build_llm_prompt(inst, h, 3, 3).guidelines.find("at most 3") != std::string::npos);
    for (const char* banned : {"f_max", "susceptance", "ramp", "r_hr", "r_su", "\"b\""}) {
        CAPTURE(banned);
        CHECK(with.find(banned) == std::string::npos);
    }
    for (const char* section : {"## Task", "## Input Data", "## Output Format"}) CHECK(with.find(section) != std::string::npos);
}

TEST_CASE("parse_llm_response") {
    const auto& inst = tiny();
    const auto m = parse_llm_response(R"([[1,"g1",1]])", inst, 2);
    CHECK(m.size() == 1);
    CHECK(m.find(1, "g1")->u == 1);
    CHECK(parse_llm_response("[]", inst, 2).empty());
    for (const auto& c : corpus::adversarial_replies()) {
        CAPTURE(c.name);
        switch (c.expect) {
            case corpus::Expect::parse: CHECK_THROWS_AS(parse_llm_response(c.text, inst, 2), ParseError); break;
            case corpus::Expect::schema: CHECK_THROWS_AS(parse_llm_response(c.text, inst, 2), SchemaError); break;
            case corpus::Expect::semantic: CHECK_THROWS_AS(parse_llm_response(c.text, inst, 2), SemanticError); break;
        }
    }
}

TEST_CASE("llm_generate over a scripted transport") {
    const auto& inst = tiny();
    HistoryBank h;
    h.days.push_back(day(inst, all(1, 0, 0)));
    LlmEndpointConfig cfg;
    cfg.model = "stub";

    SUBCASE("valid reply") {
        stubs::ScriptedTransport t({std::string(R"([[1,"g1",1]])")});
        const auto out = llm_generate(inst, h, cfg, t, 3, 2);
        CHECK(out.provenance == "llm");
        CHECK(out.mask.size() == 1);
        CHECK(t.calls() == 1);
        REQUIRE(t.seen[0].size() == 1);
        CHECK(t.seen[0][0].role == "user");
    }
    SUBCASE("prose twice falls back to the stability mask") {
        stubs::ScriptedTransport t({std::string("Sure!"), std::string("Of course.")});
        const auto out = llm_generate(inst, h, cfg, t, 3, 2);
        CHECK(out.provenance == "fallback");
        CHECK(out.mask == stability_mask(inst, h, 3, 2));
        CHECK(t.calls() == 2);
        CHECK(out.errors.size() == 2);
        // The re-ask carries the parser's complaint.
        REQUIRE(t.seen[1].size() == 3);
        CHECK(t.seen[1][2].content.find("rejected") != std::string::npos);
    }
    SUBCASE("transport failure without history gives the empty mask") {
        stubs::ScriptedTransport t({stubs::Fail{"down"}});
        const auto out = llm_generate(inst, HistoryBank{}, cfg, t, 3, 2);
        CHECK(out.provenance == "fallback");
        CHECK(out.mask.empty());
    }
    SUBCASE("deterministic for a deterministic stub") {
        stubs::ScriptedTransport a({std::string("x"), std::string(R"([[2,"g2",0]])")});
        stubs::ScriptedTransport b({std::string("x"), std::string(R"([[2,"g2",0]])")});
        CHECK(llm_generate(inst, h, cfg, a, 3, 2).mask == llm_generate(inst, h, cfg, b, 3, 2).mask);
        CHECK(a.seen[1][0].content == b.seen[1][0].content);
    }
}

TEST_CASE("HTTP transport against a loopback server") {
    const auto& inst = tiny();
    SUBCASE("request shape and bearer token") {
        stubs::LocalChatServer server({{200, stubs::LocalChatServer::reply(R"([[3,"g2",1]])")}});
        LlmEndpointConfig cfg;
        cfg.url = server.url();
        cfg.model = "m1";
        cfg.token = "secret";
        cfg.timeout_s = 5;
        HttpChatTransport http;
        const auto out = llm_generate(inst, HistoryBank{}, cfg, http, 3, 2);
        CHECK(out.provenance == "llm");
        REQUIRE(server.requests.size() == 1);
        const auto body = nlohmann::json::parse(server.requests[0]);
        CHECK(body["model"] == "m1");
        CHECK(body["temperature"] == 0);
        CHECK(body["messages"].size() == 1);
        CHECK(server.auth[0] == "Bearer secret");
    }
    SUBCASE("unreachable endpoint fails inside the timeout") {
        LlmEndpointConfig cfg;
        cfg.url = "http://10.255.255.1:9/v1/chat/completions";
        cfg.model = "m";
        cfg.timeout_s = 0.5;
        HttpChatTransport http;
        const auto t0 = std::chrono::steady_clock::now();
        const auto out = llm_generate(inst, HistoryBank{}, cfg, http, 3, 2);
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        CHECK(out.provenance == "fallback");
        CHECK(s < cfg.timeout_s + 1.0);
    }
    CHECK(chat_response_content(stubs::LocalChatServer::reply("abc")) == "abc");
    CHECK_THROWS_AS(chat_response_content("{}"), TransportError);
}

TEST_CASE("generator registry") {
    const auto& names = generator_names();
    for (const char* n : {"none", "random", "stability", "knn", "kmeans", "fix-at-optimum", "llm"})
        CHECK(std::find(names.begin(), names.end(), n) != names.end());
    MethodConfig cfg;
    CHECK_THROWS(make_generator("nope", cfg));
    auto gen = make_generator("random", cfg);
    CHECK(gen->name() == "random");
    CHECK(gen->revise(FreezeMask({{1, "g1", 1}, {2, "g1", 0}}, 1), Feedback{"", {{1, "g1"}}}).size() == 1);
    CHECK(make_generator("stability", cfg)->needs_history());
}
