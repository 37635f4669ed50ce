#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "psi/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct CliResult {
    int code;
    std::string out;
};

// run the command layer in-process, capturing stdout
CliResult run(std::vector<std::string> args) {
    args.insert(args.begin(), "psicorr");
    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args)
        argv.push_back(a.c_str());

    std::ostringstream captured;
    auto* old = std::cout.rdbuf(captured.rdbuf());
    const int code = psi::run_cli(static_cast<int>(argv.size()), argv.data());
    std::cout.rdbuf(old);
    return {code, captured.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / fs::path("psicorr_cli_test")) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("compute prints exact values") {
    const auto r = run({"compute", "--g", "1", "--d", "1"});
    CHECK(r.code == psi::kExitOk);
    CHECK(r.out.find("correlator: 1/24") != std::string::npos);
    CHECK(r.out.find("epsilon:    0") != std::string::npos);
    CHECK(r.out.find("approx") != std::string::npos);

    const auto two = run({"compute", "--g", "2", "--d", "1,4"});
    CHECK(two.code == psi::kExitOk);
    CHECK(two.out.find("epsilon:    -2/11") != std::string::npos);
}

TEST_CASE("compute rejects off-shell partitions, quoting the required sum") {
    const auto r = run({"compute", "--g", "2", "--d", "1,1"});
    CHECK(r.code == psi::kExitUsage);

    std::ostringstream captured;
    auto* old = std::cerr.rdbuf(captured.rdbuf());
    run({"compute", "--g", "2", "--d", "1,1"});
    std::cerr.rdbuf(old);
    CHECK(captured.str().find("3g-3+n = 5") != std::string::npos);
}

TEST_CASE("compute handles genus 0, where no floor bracket exists") {
    const auto r = run({"compute", "--g", "0", "--d", "0,0,0"});
    CHECK(r.code == psi::kExitOk);
    CHECK(r.out.find("correlator: 1") != std::string::npos);
    CHECK(r.out.find("floor") == std::string::npos);
}

TEST_CASE("compute json uses num/den objects") {
    const auto r = run({"compute", "--g", "2", "--d", "1,4", "--format", "json"});
    REQUIRE(r.code == psi::kExitOk);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["command"] == "compute");
    CHECK(j["partition"] == "4,1");
    CHECK(j["correlator"]["num"] == "1");
    CHECK(j["correlator"]["den"] == "384");
    CHECK(j["epsilon"]["num"] == "-2");
    CHECK(j["epsilon"]["den"] == "11");
    CHECK(j.contains("epsilon_approx"));
}

TEST_CASE("usage errors take exit code 1") {
    CHECK(run({"compute", "--g", "1"}).code == psi::kExitUsage);           // missing --d
    CHECK(run({"compute", "--d", "1"}).code == psi::kExitUsage);           // missing --g
    CHECK(run({"compute", "--g", "1", "--d", "x"}).code == psi::kExitUsage);
    CHECK(run({"nonsense"}).code == psi::kExitUsage);
    CHECK(run({"verify-bounds", "--g", "2", "--n", "3", "--L", "2"}).code ==
          psi::kExitUsage);  // L >= g
    CHECK(run({"table", "--g", "2", "--n", "2", "--L", "5"}).code == psi::kExitUsage);
}

TEST_CASE("verify-bounds succeeds with zero violations") {
    const auto r = run({"verify-bounds", "--g", "2", "--n", "3", "--L", "1"});
    CHECK(r.code == psi::kExitOk);
    CHECK(r.out.find("violations:           0") != std::string::npos);
}

TEST_CASE("verify-bounds json summary carries the lambda bound") {
    const auto r =
        run({"verify-bounds", "--g", "4", "--n", "4", "--L", "2", "--format", "json"});
    REQUIRE(r.code == psi::kExitOk);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["g"] == 4);
    CHECK(j["L"] == 2);
    CHECK(j["violations"].empty());
    CHECK(j["complete"] == true);
    // min epsilon respects the bound: parse and compare exactly
    const auto min_eps = psi::ExactRational::parse(j["min_epsilon"].get<std::string>());
    const auto lambda = psi::ExactRational::parse(j["lambda"].get<std::string>());
    CHECK(min_eps >= lambda - psi::ExactRational(1));
}

TEST_CASE("verify-bounds exit code 3 when the budget runs out") {
    const auto r =
        run({"verify-bounds", "--g", "5", "--n", "4", "--L", "1", "--budget", "4"});
    CHECK(r.code == psi::kExitBudget);
}

TEST_CASE("compute exit code 3 when the budget runs out") {
    const auto r = run({"compute", "--g", "6", "--d", "16", "--budget", "3"});
    CHECK(r.code == psi::kExitBudget);
}

TEST_CASE("a poisoned cache value surfaces as a bound violation, exit code 2") {
    TempDir tmp;
    const fs::path cache = tmp.path / "poisoned.psicache";
    {
        std::ofstream out(cache, std::ios::binary);
        // wrong by construction: the true value is 1/24, so epsilon drops
        // far below lambda(1,0) - 1 and the sweep must flag it
        out << "psicache v1\n1;1,1;1/24000000\n";
    }
    const auto r = run({"verify-bounds", "--g", "1", "--n", "2", "--L", "0", "--cache",
                        cache.string()});
    CHECK(r.code == psi::kExitViolation);
}

TEST_CASE("verify-two-point runs the sandwich checks") {
    const auto r = run({"verify-two-point", "--g", "12"});
    CHECK(r.code == psi::kExitOk);
    const auto j = run({"verify-two-point", "--g", "3", "--format", "json"});
    REQUIRE(j.code == psi::kExitOk);
    const auto parsed = nlohmann::json::parse(j.out);
    CHECK(parsed["min_epsilon"] == "-2/17");
    CHECK(parsed["max_epsilon"] == "0");
}

TEST_CASE("verify commands export per-partition rows as csv") {
    const auto r = run({"verify-two-point", "--g", "2", "--format", "csv"});
    REQUIRE(r.code == psi::kExitOk);
    CHECK(r.out ==
          "g,n,partition,correlator,floor,epsilon,lambda,satisfied\n"
          "2,2,\"5,0\",1/1152,1/1152,0,,\n"
          "2,2,\"4,1\",1/384,11/3456,-2/11,,\n"
          "2,2,\"3,2\",29/5760,11/1920,-4/33,,\n");

    const auto b = run({"verify-bounds", "--g", "2", "--n", "2", "--L", "1", "--format", "csv"});
    REQUIRE(b.code == psi::kExitOk);
    CHECK(b.out.find("g,n,partition,correlator,floor,epsilon,lambda,satisfied\n") == 0);
    CHECK(b.out.find("\"4\",1/1152,1/1152,0,36/65,true") != std::string::npos);
    CHECK(b.out.find("\"4,1\",1/384,11/3456,-2/11,36/65,true") != std::string::npos);
}

TEST_CASE("table emits canonical rows for the full family") {
    const auto r = run({"table", "--g", "1", "--n", "2", "--format", "csv"});
    REQUIRE(r.code == psi::kExitOk);
    CHECK(r.out ==
          "g,n,partition,correlator,floor,epsilon,lambda,satisfied\n"
          "1,2,\"1,1\",1/24,5/72,-2/5,,\n"
          "1,2,\"2,0\",1/24,1/24,0,,\n");
}

TEST_CASE("table with L reports the lambda column") {
    const auto r = run({"table", "--g", "2", "--n", "3", "--L", "1", "--format", "csv"});
    REQUIRE(r.code == psi::kExitOk);
    CHECK(r.out.find("36/65,true") != std::string::npos);
    CHECK(r.out.find("false") == std::string::npos);
}

TEST_CASE("lambda-table lists exact values") {
    const auto r = run({"lambda-table", "--g", "3"});
    REQUIRE(r.code == psi::kExitOk);
    CHECK(r.out.find("1,0,3/5,0.6\n") != std::string::npos);
    CHECK(r.out.find("2,1,36/65,") != std::string::npos);
    CHECK(r.out.find("3,2,648/1235,") != std::string::npos);
}

TEST_CASE("reruns are byte-identical and caches round-trip") {
    TempDir tmp;
    const fs::path out1 = tmp.path / "a.csv";
    const fs::path out2 = tmp.path / "b.csv";
    const fs::path cache = tmp.path / "c.psicache";

    auto args = [&](const fs::path& out) {
        return std::vector<std::string>{"table", "--g",    "2",          "--n",
                                        "4",     "--L",    "1",          "--format",
                                        "csv",   "--out",  out.string(), "--cache",
                                        cache.string()};
    };
    REQUIRE(run(args(out1)).code == psi::kExitOk);
    REQUIRE(fs::exists(cache));
    const std::string first_cache = slurp(cache);

    // second run starts from the saved cache and must reproduce both files
    REQUIRE(run(args(out2)).code == psi::kExitOk);
    CHECK(slurp(out1) == slurp(out2));
    CHECK(slurp(cache) == first_cache);
    CHECK_FALSE(slurp(out1).empty());
}

TEST_CASE("cache-info reports record counts") {
    TempDir tmp;
    const fs::path cache = tmp.path / "info.psicache";
    REQUIRE(run({"compute", "--g", "2", "--d", "4", "--cache", cache.string()}).code ==
            psi::kExitOk);
    const auto r = run({"cache-info", "--cache", cache.string(), "--format", "json"});
    REQUIRE(r.code == psi::kExitOk);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["records"].get<long long>() >= 1);
    CHECK(j["genus_max"].get<long long>() == 2);

    CHECK(run({"cache-info", "--cache", (tmp.path / "missing").string()}).code ==
          psi::kExitUsage);
}

TEST_CASE("corrupt cache files are reported with their line number") {
    TempDir tmp;
    const fs::path cache = tmp.path / "bad.psicache";
    {
        std::ofstream out(cache, std::ios::binary);
        out << "psicache v1\n1;1;1/24\nbroken\n";
    }
    std::ostringstream captured;
    auto* old = std::cerr.rdbuf(captured.rdbuf());
    const auto r = run({"compute", "--g", "1", "--d", "1", "--cache", cache.string()});
    std::cerr.rdbuf(old);
    CHECK(r.code == psi::kExitUsage);
    CHECK(captured.str().find("line 3") != std::string::npos);
}

TEST_CASE("unwritable output path is a usage error") {
    const auto r = run({"table", "--g", "1", "--n", "1", "--out", "/nonexistent/dir/x.csv"});
    CHECK(r.code == psi::kExitUsage);
}
