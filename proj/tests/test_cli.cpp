#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace {

std::string cli_path() {
    const char* env = std::getenv("LQS_CLI");
    REQUIRE_MESSAGE(env != nullptr, "LQS_CLI must point at the built binary");
    return env;
}

struct RunResult {
    int code = -1;
    std::string output;
};

RunResult run(const std::string& args) {
    const std::string cmd = cli_path() + " " + args + " 2>&1";
    std::array<char, 512> buf{};
    std::string output;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    while (fgets(buf.data(), buf.size(), pipe)) output += buf.data();
    const int status = pclose(pipe);
    RunResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.output = output;
    return r;
}

std::string write_toy_csv() {
    const std::string path = "/tmp/lqs_cli_toy.csv";
    std::ofstream out(path);
    out << "x1,y\n";
    out << "0,0.1\n1,1.0\n2,2.2\n3,2.9\n4,4.1\n5,50.0\n";
    return path;
}

} // namespace

TEST_CASE("cli: missing required flag exits with the usage code") {
    const std::string csv = write_toy_csv();
    RunResult r = run("fit --data " + csv + " --y y --x x1 --formulation bm");
    CHECK(r.code == 2);
}

TEST_CASE("cli: strong-duality request is refused with an explanation") {
    const std::string csv = write_toy_csv();
    RunResult r = run("fit --data " + csv +
                      " --y y --x x1 --q 3 --formulation strongdual");
    CHECK(r.code == 1);
    CHECK(r.output.find("bilinear") != std::string::npos);
}

TEST_CASE("cli: fit writes a decodable report" * doctest::timeout(300)) {
    const std::string csv = write_toy_csv();
    const std::string report = "/tmp/lqs_cli_fit.json";
    RunResult r = run("fit --data " + csv +
                      " --y y --x x1 --intercept --q 4 --formulation slbigm"
                      " --time-limit 60 --out " + report);
    CHECK(r.code == 0);
    std::ifstream in(report);
    REQUIRE(in.good());
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    CHECK(text.find("\"status\": \"optimal\"") != std::string::npos);
    CHECK(text.find("\"order_statistic_ok\": true") != std::string::npos);

    RunResult v = run("verify --data " + csv +
                      " --y y --x x1 --intercept --report " + report);
    CHECK(v.code == 0);
    CHECK(v.output.find("certificate PASS") != std::string::npos);
}

TEST_CASE("cli: generate is deterministic and scale round-trips" *
          doctest::timeout(600)) {
    const std::string inst = "/tmp/lqs_cli_inst.jsonl";
    RunResult g1 = run("generate --n 24 --p 2 --pi 0.25 --type B --seed 9 --out " +
                       inst);
    CHECK(g1.code == 0);
    std::ifstream in(inst);
    std::string first((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
    RunResult g2 = run("generate --n 24 --p 2 --pi 0.25 --type B --seed 9");
    CHECK(g2.output == first);

    const std::string report = "/tmp/lqs_cli_scale.json";
    RunResult s = run("scale --data " + inst +
                      " --k 24 --q 13 --time-limit 60 --out " + report);
    CHECK(s.code == 0);
    std::ifstream rin(report);
    std::string rtext((std::istreambuf_iterator<char>(rin)),
                      std::istreambuf_iterator<char>());
    // k = n: every cluster is a singleton and the radius collapses
    CHECK(rtext.find("\"D\": 0.0") != std::string::npos);
}

TEST_CASE("cli: bench reruns reproduce everything but timings" *
          doctest::timeout(900)) {
    const std::string out1 = "/tmp/lqs_bench_1.csv";
    const std::string out2 = "/tmp/lqs_bench_2.csv";
    const std::string args =
        "bench --n 14 --p 2 --q 8 --pi 0.3 --types A --seeds 2 "
        "--formulations slbigm,bilevel --time-limit 60 --workers 1 --out ";
    RunResult r1 = run(args + out1);
    RunResult r2 = run(args + out2);
    REQUIRE(r1.code == 0);
    REQUIRE(r2.code == 0);

    auto strip_timing = [](const std::string& path) {
        std::ifstream in(path);
        std::string line, kept;
        std::getline(in, line); // header
        while (std::getline(in, line)) {
            // timing lives in the last three columns: time,time_ub,error
            std::size_t cut = line.size();
            for (int c = 0; c < 3 && cut != std::string::npos; ++c)
                cut = line.rfind(',', cut - 1);
            kept += line.substr(0, cut) + "\n";
        }
        return kept;
    };
    CHECK(strip_timing(out1) == strip_timing(out2));
    std::filesystem::remove(out1);
    std::filesystem::remove(out2);
}
