#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "heatlab/acceptance.hpp"
#include "heatlab/errors.hpp"
#include "heatlab/experiment.hpp"

using nlohmann::json;

namespace {

struct CommonOpts {
    std::string model = "circle";
    std::string theta, thetaY;
    std::string bc = "relative";
    int modes = 32;
    double length = M_PI;
    double radius = 1.0;
    double circumference = 2 * M_PI;
    double tMin = 0, tMax = 0;
    int order = -1;
    int degree = -1;
    int points = 24;
    std::string format = "json";
    std::string output;
    std::string exportOps;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--model", o.model, "circle|torus|interval|sphere2|sphere4|dolbeault_torus");
    cmd->add_option("--theta", o.theta, "twist expression for the dx component");
    cmd->add_option("--theta-y", o.thetaY, "twist expression for the dy component");
    cmd->add_option("--bc", o.bc, "interval boundary conditions: relative|absolute");
    cmd->add_option("--modes", o.modes, "spectral truncation per axis");
    cmd->add_option("--length", o.length, "interval length");
    cmd->add_option("--radius", o.radius, "sphere radius");
    cmd->add_option("--circumference", o.circumference, "circle circumference");
    cmd->add_option("--t-min", o.tMin, "trace/fit window start");
    cmd->add_option("--t-max", o.tMax, "trace/fit window end");
    cmd->add_option("--order", o.order, "fit order K (default dim + 4)");
    cmd->add_option("--degree", o.degree, "graded degree (-1 = supertrace)");
    cmd->add_option("--points", o.points, "t-grid size");
    cmd->add_option("--format", o.format, "json|csv");
    cmd->add_option("--output", o.output, "write the result to a file instead of stdout");
    cmd->add_option("--export-operators", o.exportOps, "write the operator matrix bundle");
}

json config_from(const CommonOpts& o, const std::string& command) {
    json cfg;
    cfg["command"] = command;
    cfg["model"] = o.model;
    if (!o.theta.empty()) cfg["theta"] = o.theta;
    if (!o.thetaY.empty()) cfg["theta_y"] = o.thetaY;
    if (o.model == "interval") {
        cfg["bc"] = o.bc;
        cfg["length"] = o.length;
    }
    if (o.model == "sphere2" || o.model == "sphere4") cfg["radius"] = o.radius;
    if (o.model == "circle") cfg["circumference"] = o.circumference;
    cfg["modes"] = o.modes;
    if (o.tMin > 0) cfg["t_min"] = o.tMin;
    if (o.tMax > 0) cfg["t_max"] = o.tMax;
    if (o.order >= 0) cfg["order"] = o.order;
    if (o.degree >= 0) cfg["degree"] = o.degree;
    cfg["points"] = o.points;
    cfg["format"] = o.format;
    if (!o.exportOps.empty()) cfg["export_operators"] = o.exportOps;
    return cfg;
}

int emit(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text << "\n";
    } else {
        std::ofstream out(path);
        if (!out) {
            std::cerr << "cannot open output file " << path << "\n";
            return 2;
        }
        out << text;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"heatlab: twisted de Rham / Dolbeault heat-trace laboratory"};
    app.require_subcommand(0, 1);

    CommonOpts common;
    std::string configPath;
    int scanM = 2, scanN = 2;
    bool scanBoundary = false, scanNoTheta = false, scanEnumerate = false;

    CLI::App* cCoeffs = app.add_subcommand("coeffs", "closed-form heat coefficient densities");
    CLI::App* cSpectrum = app.add_subcommand("spectrum", "assembled operator spectra");
    CLI::App* cHeat = app.add_subcommand("heattrace", "heat trace curves");
    CLI::App* cFit = app.add_subcommand("fit", "asymptotic coefficient fits");
    CLI::App* cIndex = app.add_subcommand("index", "supertrace index");
    CLI::App* cBetti = app.add_subcommand("betti", "twisted kernel dimensions");
    CLI::App* cGB = app.add_subcommand("gaussbonnet", "Euler-form quadrature");
    CLI::App* cBd = app.add_subcommand("boundary", "boundary coefficient checks");
    CLI::App* cDol = app.add_subcommand("dolbeault", "twisted Dolbeault verification");
    CLI::App* cInv = app.add_subcommand("invariance", "jet-monomial kernel scans");
    CLI::App* cAccept = app.add_subcommand("accept", "run the full acceptance battery");
    CLI::App* cRun = app.add_subcommand("run", "run an experiment from a JSON config");

    for (CLI::App* c : {cCoeffs, cSpectrum, cHeat, cFit, cIndex, cBetti, cGB, cBd, cDol})
        add_common(c, common);
    std::string scanMode = "scan";
    cInv->add_option("mode", scanMode, "scan (default) or enumerate")
        ->check(CLI::IsMember({"scan", "enumerate"}));
    cInv->add_option("--m", scanM, "dimension context");
    cInv->add_option("--n", scanN, "total order");
    cInv->add_flag("--boundary", scanBoundary, "boundary variable pool");
    cInv->add_flag("--no-theta", scanNoTheta, "metric variables only");
    cInv->add_flag("--enumerate", scanEnumerate, "list the enumeration instead of scanning");
    cInv->add_option("--output", common.output, "write the result to a file");
    cAccept->add_option("--output", common.output, "write the report to a file");
    cRun->add_option("--config", configPath, "JSON config path (defaults to stdin)");
    cRun->add_option("--output", common.output, "write the result to a file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2; // usage problems are schema violations
    }

    try {
        if (cAccept->parsed() || app.get_subcommands().empty()) {
            std::ostringstream os;
            const auto results = heatlab::accept::run_all(&std::cerr);
            const int failures = heatlab::accept::report(results, os);
            const int rc = emit(os.str(), common.output);
            return rc != 0 ? rc : (failures == 0 ? 0 : 1);
        }
        if (cRun->parsed()) {
            std::string text;
            if (configPath.empty()) {
                std::ostringstream buf;
                buf << std::cin.rdbuf();
                text = buf.str();
            } else {
                std::ifstream in(configPath);
                if (!in) throw heatlab::ConfigError("cannot open config " + configPath);
                std::ostringstream buf;
                buf << in.rdbuf();
                text = buf.str();
            }
            return emit(heatlab::cli::run_experiment_json(text), common.output);
        }
        if (cInv->parsed()) {
            json cfg;
            cfg["command"] = "invariance";
            cfg["m"] = scanM;
            cfg["n"] = scanN;
            cfg["boundary"] = scanBoundary;
            cfg["with_theta"] = !scanNoTheta;
            cfg["enumerate"] = scanEnumerate || scanMode == "enumerate";
            return emit(heatlab::cli::run_experiment_json(cfg.dump()), common.output);
        }
        std::string command;
        for (const auto& [cmd, name] :
             std::initializer_list<std::pair<CLI::App*, const char*>>{{cCoeffs, "coeffs"},
                                                                      {cSpectrum, "spectrum"},
                                                                      {cHeat, "heattrace"},
                                                                      {cFit, "fit"},
                                                                      {cIndex, "index"},
                                                                      {cBetti, "betti"},
                                                                      {cGB, "gaussbonnet"},
                                                                      {cBd, "boundary"},
                                                                      {cDol, "dolbeault"}})
            if (cmd->parsed()) command = name;
        if (command.empty()) {
            std::cerr << app.help();
            return 2;
        }
        return emit(heatlab::cli::run_experiment_json(config_from(common, command).dump()),
                    common.output);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return heatlab::cli::exit_code_for(e);
    }
}
