#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "reluforge/cli.hpp"
#include "reluforge/splines.hpp"

using namespace reluforge;

namespace {
bool file_exists(const std::string& p) { return std::ifstream(p).good(); }
} // namespace

TEST_CASE("build writes a network file") {
    std::string out = "cli_sq.json";
    CHECK(run_cli({"build", "squarer", "--m", "3", "-o", out}) == 0);
    CHECK(file_exists(out));

    CHECK(run_cli({"eval", "--net", out, "--x", "0.5"}) == 0);
    CHECK(run_cli({"error", "--net", out, "--target", "square", "--grid", "2000"}) == 0);
    std::remove(out.c_str());
}

TEST_CASE("usage errors exit with 2") {
    CHECK(run_cli({"no-such-subcommand"}) == 2);
    CHECK(run_cli({}) == 2);
    CHECK(run_cli({"build", "nonsense", "-o", "x.json"}) == 2);
}

TEST_CASE("io errors exit with 3") {
    CHECK(run_cli({"eval", "--net", "missing_file.json", "--x", "0.5"}) == 3);
}

TEST_CASE("report emits the documented CSV header") {
    std::string out = "cli_report.csv";
    CHECK(run_cli({"report", "--family", "squarer", "-o", out}) == 0);
    std::ifstream f(out);
    std::string header;
    std::getline(f, header);
    CHECK(header == "experiment,param,error,L,N,P,rate");
    std::string first;
    std::getline(f, first);
    CHECK(first.substr(0, 8) == "squarer,");
    f.close();
    std::remove(out.c_str());
}

TEST_CASE("embed-spline consumes a stored spline") {
    FreeKnotSpline S = make_spline({0.3, 0.5, 0.8}, {0.0, 1.0, -0.5, 0.25, 0.0});
    std::string sp = "cli_spline.json", out = "cli_spline_net.json";
    save_spline(S, sp);
    CHECK(run_cli({"embed-spline", "--knots", sp, "--width", "8", "-o", out}) == 0);
    CHECK(file_exists(out));
    std::remove(sp.c_str());
    std::remove(out.c_str());
}

TEST_CASE("takagi subcommand reports its gap") {
    CHECK(run_cli({"takagi", "--base", "2.0", "--depth", "4"}) == 0);
}

TEST_CASE("training subcommand runs end to end") {
    std::string data = "cli_train.csv", out = "cli_train_net.json";
    {
        std::ofstream f(data);
        for (int i = 0; i <= 40; ++i) {
            double x = i / 40.0;
            f << x << "," << 2.0 * x - 0.5 << "\n";
        }
    }
    CHECK(run_cli({"train", "--data", data, "--input-dim", "1", "--hidden", "4", "--epochs",
                   "20", "-o", out}) == 0);
    CHECK(file_exists(out));
    std::remove(data.c_str());
    std::remove(out.c_str());
}
