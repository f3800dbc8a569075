#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "test_util.hpp"

namespace {

struct RunResult {
    int status = -1;
    std::string out;
};

// Runs the CLI with stderr dropped; stdout and the exit status come back.
RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(INTERCORE_CLI_PATH) + " " + args + " 2>/dev/null";
    RunResult r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::array<char, 4096> buf;
    while (std::size_t n = fread(buf.data(), 1, buf.size(), p)) r.out.append(buf.data(), n);
    const int rc = pclose(p);
    r.status = WEXITSTATUS(rc);
    return r;
}

std::string fx(const std::string& rel) { return testutil::fixture_path(rel); }

}  // namespace

TEST_CASE("validate") {
    CHECK(run_cli("validate " + fx("example1/rts.json")).status == 0);
    const std::string bad = "/tmp/intercore_cli_bad.json";
    std::string text = testutil::fixture("example1/rts.json");
    text.replace(text.find("\"bcet\": 5"), 9, "\"bcet\": 9");
    {
        FILE* f = fopen(bad.c_str(), "w");
        fwrite(text.data(), 1, text.size(), f);
        fclose(f);
    }
    CHECK(run_cli("validate " + bad).status == 1);
}

TEST_CASE("schedulability prints WCRTs") {
    auto r = run_cli("schedulability " + fx("example1/rts.json"));
    CHECK(r.status == 0);
    CHECK(r.out.find("tau3: wcrt=18") != std::string::npos);
    CHECK(r.out.find("tau4: wcrt=40") != std::string::npos);
    auto only_c2 = run_cli("schedulability --core c2 " + fx("example1/rts.json"));
    CHECK(only_c2.out.find("c1:") == std::string::npos);
}

TEST_CASE("bound prints the paper values") {
    auto exact = run_cli("bound " + fx("example1/rts.json") + " " + fx("example1/events.json") +
                         " " + fx("example1/req_simple_max.json"));
    CHECK(exact.status == 0);
    CHECK(exact.out.rfind("{\"bound\":18,\"unit\":\"tu\"", 0) == 0);

    auto coarse = run_cli("bound --coarse " + fx("example1/rts.json") + " " +
                          fx("example1/events.json") + " " + fx("example1/req_simple_max.json"));
    CHECK(coarse.out.rfind("{\"bound\":23,", 0) == 0);
}

TEST_CASE("abstract writes golden-stable artifacts") {
    system("rm -rf /tmp/intercore_cli_abs && mkdir -p /tmp/intercore_cli_abs");
    auto r = run_cli("abstract " + fx("example1/rts.json") + " " + fx("example1/events.json") +
                     " -o /tmp/intercore_cli_abs");
    REQUIRE(r.status == 0);
    CHECK(testutil::slurp("/tmp/intercore_cli_abs/A_c1.ta.json") ==
          testutil::fixture("golden/example1_A_c1.ta.json"));
    CHECK(testutil::slurp("/tmp/intercore_cli_abs/A_c2.ta.json") ==
          testutil::fixture("golden/example1_A_c2.ta.json"));
    CHECK(testutil::slurp("/tmp/intercore_cli_abs/intervals.json") ==
          testutil::fixture("golden/example1_intervals.json"));

    SUBCASE("end-to-end determinism") {
        system("rm -rf /tmp/intercore_cli_abs2 && mkdir -p /tmp/intercore_cli_abs2");
        REQUIRE(run_cli("abstract " + fx("example1/rts.json") + " " + fx("example1/events.json") +
                        " -o /tmp/intercore_cli_abs2")
                    .status == 0);
        for (const char* f : {"A_c1.ta.json", "A_c2.ta.json", "N_c1.ta.json", "N_c2.ta.json",
                              "intervals.json"}) {
            CHECK(testutil::slurp(std::string("/tmp/intercore_cli_abs/") + f) ==
                  testutil::slurp(std::string("/tmp/intercore_cli_abs2/") + f));
        }
    }

    SUBCASE("--xta consumes pre-built networks and matches") {
        system("rm -rf /tmp/intercore_cli_xta && mkdir -p /tmp/intercore_cli_xta");
        REQUIRE(run_cli("abstract " + fx("example1/rts.json") + " " + fx("example1/events.json") +
                        " --xta /tmp/intercore_cli_abs -o /tmp/intercore_cli_xta")
                    .status == 0);
        CHECK(testutil::slurp("/tmp/intercore_cli_xta/A_c2.ta.json") ==
              testutil::slurp("/tmp/intercore_cli_abs/A_c2.ta.json"));
        CHECK(testutil::slurp("/tmp/intercore_cli_xta/intervals.json") ==
              testutil::slurp("/tmp/intercore_cli_abs/intervals.json"));
    }
}

TEST_CASE("figure goldens for examples 2 and 3") {
    system("rm -rf /tmp/intercore_cli_fig && mkdir -p /tmp/intercore_cli_fig/e2 /tmp/intercore_cli_fig/e3");
    REQUIRE(run_cli("abstract " + fx("example2/rts.json") + " " + fx("example2/events.json") +
                    " -o /tmp/intercore_cli_fig/e2")
                .status == 0);
    CHECK(testutil::slurp("/tmp/intercore_cli_fig/e2/A_c2.ta.json") ==
          testutil::fixture("golden/example2_A_c2.ta.json"));
    REQUIRE(run_cli("abstract " + fx("example3/rts.json") + " " + fx("example3/events.json") +
                    " -o /tmp/intercore_cli_fig/e3")
                .status == 0);
    CHECK(testutil::slurp("/tmp/intercore_cli_fig/e3/A_c1.ta.json") ==
          testutil::fixture("golden/example3_A_c1.ta.json"));
}

TEST_CASE("an eventless job aborts abstraction unless forced") {
    system("rm -rf /tmp/intercore_cli_force && mkdir -p /tmp/intercore_cli_force");
    auto plain = run_cli("abstract " + fx("example3_variant/rts.json") + " " +
                         fx("example3_variant/events.json") + " -o /tmp/intercore_cli_force");
    CHECK(plain.status == 1);
    auto forced = run_cli("abstract --force " + fx("example3_variant/rts.json") + " " +
                          fx("example3_variant/events.json") + " -o /tmp/intercore_cli_force");
    CHECK(forced.status == 0);
    const std::string manifest = testutil::slurp("/tmp/intercore_cli_force/manifest.json");
    CHECK(manifest.find("exactness is the user's responsibility") != std::string::npos);
}

TEST_CASE("oracle subcommand cross-checks the bound") {
    auto r = run_cli("oracle " + fx("example1/rts.json") + " " + fx("example1/events.json") + " " +
                     fx("example1/req_simple_max.json") + " --horizon 480 --csv /tmp/intercore_cli.csv");
    CHECK(r.status == 0);
    CHECK(r.out.find("Iv1={[2,4]}") != std::string::npos);
    CHECK(r.out.find("Iv2={[22,26],[32,38]}") != std::string::npos);
    CHECK(r.out.find("oracle bound: 18 tu") != std::string::npos);
    const std::string csv = testutil::slurp("/tmp/intercore_cli.csv");
    CHECK(csv.rfind("event,time", 0) == 0);
    CHECK(csv.find("e1,32") != std::string::npos);
}

TEST_CASE("a tiny state budget is a resource error with exit code 2") {
    auto r = run_cli("--state-budget 10 bound " + fx("example1/rts.json") + " " +
                     fx("example1/events.json") + " " + fx("example1/req_simple_max.json"));
    CHECK(r.status == 2);
}
