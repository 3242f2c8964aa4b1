#include "fixtures.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
};

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("ucr_cli_test_" + std::to_string(::getpid())) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

Run run_ucr(const std::string& args) {
    const auto log = scratch("log") / "out.txt";
    const std::string cmd = std::string("\"") + UCR_CLI_PATH + "\" " + args + " > \"" + log.string() + "\" 2>&1";
    const int raw = std::system(cmd.c_str());
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(log)};
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

const std::string tiny = "\"" + ucr::fixtures::data_path("tiny.json") + "\"";

}  // namespace

TEST_CASE("cli solve") {
    const auto dir = scratch("solve");
    const auto r = run_ucr("solve " + tiny + " --out " + q(dir));
    CHECK(r.code == 0);
    const auto stats = nlohmann::json::parse(slurp(dir / "stats.json"));
    CHECK(stats["objective"].is_number());
    CHECK(stats["nodes"].get<long>() >= 1);
    const auto sol = nlohmann::json::parse(slurp(dir / "solution.json"));
    CHECK(sol["u"]["g1"].size() == 6);
    CHECK(sol["objective"] == stats["objective"]);
    CHECK(sol["status"] == "optimal");

    CHECK(run_ucr("validate " + tiny + " --solution " + q(dir / "solution.json")).code == 0);
}

TEST_CASE("cli error codes") {
    const auto dir = scratch("errors");
    std::ofstream(dir / "broken.json") << "{\"buses\": [";
    const auto broken = run_ucr("solve " + q(dir / "broken.json") + " --out " + q(dir));
    CHECK(broken.code == 2);
    CHECK(broken.out.find("byte") != std::string::npos);

    auto text = slurp(ucr::fixtures::data_path("tiny.json"));
    text.replace(text.find("\"bus\": \"b2\""), 11, "\"bus\": \"b9\"");
    std::ofstream(dir / "dangling.json") << text;
    const auto dangling = run_ucr("validate " + q(dir / "dangling.json"));
    CHECK(dangling.code == 3);
    CHECK(dangling.out.find("b9") != std::string::npos);

    CHECK(run_ucr("solve " + tiny + " --bogus-flag").code == 2);
    CHECK(run_ucr("frobnicate " + tiny).code == 2);

    const auto llm = run_ucr("restrict " + tiny + " --method llm --out " + q(dir));
    CHECK(llm.code == 3);
    CHECK(llm.out.find("--llm-config") != std::string::npos);
    CHECK(run_ucr("restrict " + tiny + " --method stability --out " + q(dir)).code == 3);

    const auto limit = run_ucr("solve \"" + ucr::fixtures::data_path("bench16.json") + "\" --time-limit 0.001 --out " + q(dir));
    CHECK(limit.code == 5);
    CHECK(limit.out.find("limit reached") != std::string::npos);
}

TEST_CASE("cli help documents every flag") {
    const auto top = run_ucr("--help");
    CHECK(top.code == 0);
    for (const char* sub : {"solve", "restrict", "compare", "sweep", "longhorizon", "validate", "history"})
        CHECK(top.out.find(sub) != std::string::npos);
    const auto sweep = run_ucr("sweep --help");
    for (const char* flag : {"--sigmas", "--trials", "--jobs", "--methods", "--seed", "--gap", "--time-limit",
                             "--node-limit", "--history", "--no-timing", "--out"})
        CHECK(sweep.out.find(flag) != std::string::npos);
}

TEST_CASE("cli experiment subcommands") {
    const auto dir = scratch("experiments");
    const auto hist = dir / "hist.json";
    REQUIRE(run_ucr("history " + tiny + " --days 5 --sigma 0.1 --seed 1 --output " + q(hist)).code == 0);

    SUBCASE("compare writes one row per method plus the baseline") {
        const auto out = dir / "cmp";
        CHECK(run_ucr("compare " + tiny + " --methods random,stability --history " + q(hist) + " --out " + q(out)).code == 0);
        std::istringstream csv(slurp(out / "runs.csv"));
        std::string line;
        int rows = 0;
        while (std::getline(csv, line)) ++rows;
        CHECK(rows == 4);
        CHECK(nlohmann::json::parse(slurp(out / "summary.json"))["methods"].size() == 3);
    }
    SUBCASE("sweep groups by sigma") {
        const auto out = dir / "sweep";
        CHECK(run_ucr("sweep " + tiny + " --methods random --sigmas 0.1,0.2 --trials 2 --out " + q(out)).code == 0);
        const auto summary = nlohmann::json::parse(slurp(out / "summary.json"));
        REQUIRE(summary["groups"].size() == 2);
        CHECK(summary["groups"][1]["sigma"] == 0.2);
    }
    SUBCASE("restrict writes the mask it imposed") {
        const auto out = dir / "restrict";
        CHECK(run_ucr("restrict " + tiny + " --method stability --screen --validate --history " + q(hist) + " --out " +
                  q(out))
                  .code == 0);
        CHECK(nlohmann::json::parse(slurp(out / "mask.json")).is_array());
        CHECK(nlohmann::json::parse(slurp(out / "stats.json"))["provenance"] == "stability");
    }
    SUBCASE("longhorizon with carry") {
        const auto out = dir / "lh";
        CHECK(run_ucr("longhorizon " + tiny + " --method stability --days 3 --carry --history " + q(hist) + " --out " +
                  q(out))
                  .code == 0);
        CHECK(slurp(out / "runs.csv").find("day2") != std::string::npos);
    }
}
