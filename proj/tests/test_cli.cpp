#include <doctest.h>

#include <json.hpp>

#include "heatlab/errors.hpp"
#include "heatlab/experiment.hpp"

using namespace heatlab;
using nlohmann::json;

TEST_CASE("index command on the interval") {
    const std::string out = cli::run_experiment_json(
        R"json({"command": "index", "model": "interval", "bc": "relative", "modes": 200})json");
    const json j = json::parse(out);
    CHECK(j.at("index").get<int>() == -1);

    const std::string outA = cli::run_experiment_json(
        R"json({"command": "index", "model": "interval", "bc": "absolute", "modes": 200})json");
    CHECK(json::parse(outA).at("index").get<int>() == 1);
}

TEST_CASE("betti command on the twisted torus") {
    const std::string out = cli::run_experiment_json(
        R"json({"command": "betti", "model": "torus", "theta": "0.7", "modes": 8})json");
    const json j = json::parse(out);
    CHECK(j.at("kernel_dims").get<std::vector<int>>() == std::vector<int>({0, 0, 0}));
}

TEST_CASE("invariance scan command") {
    const std::string out =
        cli::run_experiment_json(R"json({"command": "invariance", "m": 3, "n": 2})json");
    const json j = json::parse(out);
    CHECK(j.at("survivor_count").get<int>() == 0);
}

TEST_CASE("fit command cross-checks the closed-form a2 integral") {
    const std::string out = cli::run_experiment_json(
        R"json({"command": "fit", "model": "circle", "theta": "0.7*sin(x)", "modes": 360,
            "degree": 0, "order": 5, "t_min": 0.001, "t_max": 0.1})json");
    const json j = json::parse(out);
    const auto coeffs = j.at("coefficients").get<std::vector<double>>();
    // integral of (4 pi)^{-1/2} (theta' - theta^2) over the circle
    const double expect = -std::sqrt(M_PI) * 0.49 / 2.0;
    CHECK(coeffs[2] == doctest::Approx(expect).epsilon(1e-3));
}

TEST_CASE("gaussbonnet command") {
    const std::string out =
        cli::run_experiment_json(R"json({"command": "gaussbonnet", "model": "sphere2"})json");
    const json j = json::parse(out);
    CHECK(j.at("euler_form_integral").get<double>() == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("dolbeault command") {
    const std::string out = cli::run_experiment_json(
        R"json({"command": "dolbeault", "model": "dolbeault_torus", "theta": "0.3+0.2i", "modes": 8})json");
    const json j = json::parse(out);
    CHECK(j.at("index").get<int>() == 0);
    CHECK(std::abs(j.at("a2_integral").get<double>()) < 1e-10);
}

TEST_CASE("heattrace CSV output") {
    const std::string out = cli::run_experiment_json(
        R"json({"command": "heattrace", "model": "circle", "modes": 24, "format": "csv",
            "t_values": [0.5, 1.0]})json");
    CHECK(out.rfind("t,trace_p0,trace_p1,supertrace", 0) == 0);
}

TEST_CASE("outputs are deterministic byte for byte") {
    const std::string cfg =
        R"json({"command": "spectrum", "model": "torus", "theta": "0.4*sin(x)", "modes": 6})json";
    CHECK(cli::run_experiment_json(cfg) == cli::run_experiment_json(cfg));
}

TEST_CASE("schema violations are config errors (exit code 2)json") {
    CHECK_THROWS_AS(cli::run_experiment_json(R"json({"comand": "index"})json"), ConfigError);
    CHECK_THROWS_AS(
        cli::run_experiment_json(R"json({"command": "betti", "model": "klein_bottle"})json"),
        ConfigError);
    CHECK_THROWS_AS(cli::run_experiment_json("{nope"), ConfigError);
    CHECK(cli::exit_code_for(ConfigError("x")) == 2);
    CHECK(cli::exit_code_for(NumericalContractError("x")) == 3);
}

TEST_CASE("numerical contract violations surface as such (exit code 3)json") {
    // t far below the reliability window
    CHECK_THROWS_AS(cli::run_experiment_json(
                        R"json({"command": "heattrace", "model": "circle", "modes": 12,
                            "t_values": [1e-6]})json"),
                    NumericalContractError);
}

TEST_CASE("empty config runs the flagship command selection") {
    // default command is the acceptance battery; just check the dispatcher wiring
    // by asking for an explicit cheap command with every default left in place
    const std::string out = cli::run_experiment_json(R"json({"command": "spectrum"})json");
    const json j = json::parse(out);
    CHECK(j.contains("degrees"));
}
