#include "heatlab/experiment.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

#include "heatlab/acceptance.hpp"
#include "heatlab/complexes.hpp"
#include "heatlab/errors.hpp"
#include "heatlab/invariance.hpp"
#include "heatlab/laplace_ops.hpp"
#include "heatlab/models.hpp"
#include "heatlab/spectral.hpp"

namespace heatlab::cli {

using nlohmann::json;
using namespace heatlab;

namespace {

const std::set<std::string> kKnownKeys = {
    "command", "model",  "circumference", "circumferences", "length",     "radius",
    "bc",      "theta",  "theta_y",       "modes",          "t_min",      "t_max",
    "t_values", "points", "order",        "degree",         "m",          "n",
    "boundary", "with_theta", "format",   "max_eigenvalues", "export_operators", "point",
    "enumerate"};

struct Setup {
    models::ModelManifold model;
    models::TwistForm twist;
    std::string modelName;
    int N = 32;
};

Setup build_setup(const json& cfg) {
    Setup s;
    s.modelName = cfg.value("model", "circle");
    if (s.modelName == "circle") {
        s.model = models::circle(cfg.value("circumference", 2 * M_PI));
    } else if (s.modelName == "torus") {
        std::vector<double> circ{2 * M_PI, 2 * M_PI};
        if (cfg.contains("circumferences")) circ = cfg.at("circumferences").get<std::vector<double>>();
        if (circ.size() != 2) throw ConfigError("torus needs two circumferences");
        s.model = models::flat_torus(circ);
    } else if (s.modelName == "interval") {
        s.model = models::interval(cfg.value("length", M_PI));
    } else if (s.modelName == "sphere2") {
        s.model = models::round_sphere(2, cfg.value("radius", 1.0));
    } else if (s.modelName == "sphere4") {
        s.model = models::round_sphere(4, cfg.value("radius", 1.0));
    } else if (s.modelName == "dolbeault_torus") {
        s.model = models::complex_torus();
    } else {
        throw ConfigError("unknown model '" + s.modelName + "'");
    }
    if (s.model.dim <= 2 && s.model.kind != models::ModelKind::Interval)
        s.twist = models::twist_from_expressions(s.model, cfg.value("theta", ""),
                                                 cfg.value("theta_y", ""));
    s.N = cfg.value("modes", 32);
    return s;
}

complexes::GradedOperatorSet assemble(const Setup& s, const json& cfg) {
    switch (s.model.kind) {
    case models::ModelKind::Circle:
        return complexes::assemble_circle(s.model, s.twist, s.N);
    case models::ModelKind::FlatTorus:
        return complexes::assemble_torus(s.model, s.twist, s.N);
    case models::ModelKind::Interval: {
        const std::string bc = cfg.value("bc", "relative");
        if (bc != "relative" && bc != "absolute") throw ConfigError("bc must be relative|absolute");
        if (!cfg.value("theta", std::string()).empty())
            throw UnsupportedError("twisted interval spectra are out of scope");
        return complexes::assemble_interval(s.model,
                                            bc == "relative" ? complexes::BoundaryFlavor::Relative
                                                             : complexes::BoundaryFlavor::Absolute,
                                            s.N);
    }
    case models::ModelKind::ComplexTorus: {
        std::array<double, 2> omega{2 * M_PI, 2 * M_PI};
        TrigPoly th = parse_trig(cfg.value("theta", ""), 2, omega);
        return complexes::assemble_dolbeault_torus(th, s.N);
    }
    default:
        throw ConfigError("model '" + s.modelName + "' has no spectral assembly");
    }
}

std::pair<double, double> fit_window(const json& cfg, const spectral::SpectrumSet& spec) {
    double t0 = cfg.value("t_min", 0.0);
    double t1 = cfg.value("t_max", 0.0);
    if (t0 <= 0) t0 = std::max(1.05 * spectral::t_min_reliable(spec), 1e-4);
    if (t1 <= 0) t1 = std::max(8.0 * t0, 0.5);
    return {t0, t1};
}

json gaussbonnet_doc(const Setup& s) {
    const tensor::Chart chart = models::chart_of(s.model);
    const double integral = models::integrate(s.model, [&](const std::vector<double>& x) {
        return laplace::euler_form(tensor::curvature(chart.metric_jet(x), 0));
    });
    json out;
    out["model"] = s.modelName;
    out["euler_form_integral"] = integral;
    return out;
}

json coeffs_doc(const Setup& s, const json& cfg) {
    if (s.model.kind != models::ModelKind::Circle)
        throw ConfigError("coeffs: implemented for circle models");
    std::vector<double> pt = cfg.value("point", std::vector<double>{0.0});
    const TrigPoly& theta = s.twist.comp[0];
    const tensor::Chart flat = tensor::euclidean_chart(1);
    const tensor::MetricJet jet = flat.metric_jet(pt);
    const tensor::CurvaturePack pack = tensor::curvature(jet);

    auto coeffsFor = [&](int sign) {
        laplace::LaplaceCoefficients op;
        op.m = 1;
        op.fiberDim = 1;
        op.ginv = DenseR::identity(1);
        op.A.assign(1, laplace::EndoJet(1, 1, 3));
        const TrigPoly t1 = theta.derivative(0);
        const TrigPoly th2 = theta * theta;
        Jet<cplx> b(1, 2);
        b.v = double(sign) * t1.eval(pt[0]) - th2.eval(pt[0]);
        b.g1(0) = double(sign) * t1.derivative(0).eval(pt[0]).real() -
                  th2.derivative(0).eval(pt[0]).real();
        b.g2(0, 0) = double(sign) * t1.derivative(0).derivative(0).eval(pt[0]).real() -
                     th2.derivative(0).derivative(0).eval(pt[0]).real();
        op.B = laplace::EndoJet::scalar(1, 1, b);
        return laplace::canonicalize(op, jet);
    };
    const laplace::CanonicalData c0 = coeffsFor(+1), c1 = coeffsFor(-1);
    json out;
    out["point"] = pt;
    out["degree0"] = {{"a0", laplace::a0_density(c0)},
                      {"a2", laplace::a2_density(c0, pack)},
                      {"a4", laplace::a4_density(c0, pack)}};
    out["degree1"] = {{"a0", laplace::a0_density(c1)},
                      {"a2", laplace::a2_density(c1, pack)},
                      {"a4", laplace::a4_density(c1, pack)}};
    out["supertrace_a2"] = laplace::a2_density(c0, pack) - laplace::a2_density(c1, pack);
    out["supertrace_a4"] = laplace::a4_density(c0, pack) - laplace::a4_density(c1, pack);
    return out;
}

json dolbeault_doc(const json& cfg) {
    std::array<double, 2> omega{2 * M_PI, 2 * M_PI};
    const TrigPoly th = parse_trig(cfg.value("theta", ""), 2, omega);
    const int N = cfg.value("modes", 10);
    const spectral::SpectrumSet spec =
        spectral::eigensolve(complexes::assemble_dolbeault_torus(th, N));
    const std::vector<int> b = spectral::betti(spec);
    const tensor::Chart flat = models::chart_of(models::complex_torus());
    const tensor::CurvaturePack pack = tensor::curvature(flat.metric_jet({0.0, 0.0}));
    const TrigPoly dx = th.derivative(0), dy = th.derivative(1);
    const double integral =
        models::integrate(models::complex_torus(), [&](const std::vector<double>& x) {
            return laplace::dolbeault_a2_flat(pack, dx.eval(x[0], x[1]), dy.eval(x[0], x[1]));
        });
    json out;
    out["kernel_dims"] = b;
    out["index"] = b[0] - b[1];
    out["a2_integral"] = integral;
    return out;
}

const std::set<std::string> kKnownModels = {"circle",  "torus",   "interval",
                                            "sphere2", "sphere4", "dolbeault_torus"};

std::string run_impl(const json& cfg) {
    for (auto it = cfg.begin(); it != cfg.end(); ++it)
        if (!kKnownKeys.count(it.key())) throw ConfigError("unknown config key '" + it.key() + "'");
    if (cfg.contains("model") && !kKnownModels.count(cfg.at("model").get<std::string>()))
        throw ConfigError("unknown model '" + cfg.at("model").get<std::string>() + "'");
    const std::string command = cfg.value("command", "accept");

    if (command == "accept") {
        std::ostringstream os;
        const auto results = accept::run_all(nullptr);
        accept::report(results, os);
        return os.str();
    }
    if (command == "invariance") {
        const int m = cfg.value("m", 2), n = cfg.value("n", 2);
        const bool withTheta = cfg.value("with_theta", true);
        const bool boundary = cfg.value("boundary", false);
        if (cfg.value("enumerate", false)) {
            json out;
            out["m"] = m;
            out["n"] = n;
            out["with_theta"] = withTheta;
            out["boundary"] = boundary;
            json rows = json::array();
            for (const auto& mono : invariance::enumerate_monomials(m, n, withTheta, boundary)) {
                json r;
                r["monomial"] = mono.display();
                r["order"] = mono.order();
                std::vector<int> degs;
                for (int mu = 0; mu < m; ++mu) degs.push_back(mono.deg(mu));
                r["deg"] = degs;
                rows.push_back(std::move(r));
            }
            out["monomials"] = std::move(rows);
            return out.dump(2);
        }
        return invariance::scan_to_json(invariance::kernel_scan(m, n, withTheta, boundary));
    }
    if (command == "gaussbonnet") return gaussbonnet_doc(build_setup(cfg)).dump(2);
    if (command == "coeffs") return coeffs_doc(build_setup(cfg), cfg).dump(2);
    if (command == "dolbeault") return dolbeault_doc(cfg).dump(2);

    if (command == "boundary") {
        // fitted interval coefficients against the closed-form boundary term
        const Setup s = build_setup(cfg);
        if (s.model.kind != models::ModelKind::Interval)
            throw ConfigError("boundary: interval models only");
        const auto ops = assemble(s, cfg);
        const auto spec = spectral::eigensolve(ops);
        const auto fit = spectral::fit_degree_trace(spec, 0, cfg.value("order", 3),
                                                    cfg.value("t_min", 0.03),
                                                    cfg.value("t_max", 0.35));
        json out;
        out["fit_coefficients"] = fit.coeffs;
        out["fit_residual"] = fit.residual;
        const double trPsi = cfg.value("bc", "relative") == "relative" ? -1.0 : 1.0;
        out["boundary_order0_total"] = 2.0 * 0.25 * trPsi;
        return out.dump(2);
    }

    const Setup s = build_setup(cfg);
    const auto ops = assemble(s, cfg);
    if (cfg.contains("export_operators"))
        complexes::export_bundle(ops, cfg.at("export_operators").get<std::string>());
    const auto spec = spectral::eigensolve(ops);

    if (command == "spectrum") return spectral::spectrum_to_json(spec, cfg.value("max_eigenvalues", 64));
    if (command == "index" || command == "betti") {
        const std::vector<int> b = spectral::betti(spec);
        json out;
        out["kernel_dims"] = b;
        out["index"] = spectral::index(spec);
        return command == "index" ? json({{"index", spectral::index(spec)}}).dump(2)
                                  : out.dump(2);
    }
    if (command == "heattrace") {
        std::vector<double> ts;
        if (cfg.contains("t_values")) {
            ts = cfg.at("t_values").get<std::vector<double>>();
        } else {
            const auto [t0, t1] = fit_window(cfg, spec);
            const int pts = cfg.value("points", 24);
            const double r = std::pow(t1 / t0, 1.0 / (pts - 1));
            for (int i = 0; i < pts; ++i) ts.push_back(t0 * std::pow(r, i));
        }
        if (cfg.value("format", "json") == "csv") return spectral::trace_curve_csv(spec, ts);
        json out;
        out["t"] = ts;
        json rows = json::array();
        for (double tt : ts) {
            json row;
            row["t"] = tt;
            row["traces"] = spectral::heat_traces(spec, tt);
            row["supertrace"] = spectral::supertrace(spec, tt);
            rows.push_back(std::move(row));
        }
        out["curve"] = std::move(rows);
        return out.dump(2);
    }
    if (command == "fit") {
        const auto [t0, t1] = fit_window(cfg, spec);
        const int K = cfg.value("order", spec.dim + 4);
        const int degree = cfg.value("degree", -1);
        const spectral::HeatFit fit =
            degree < 0 ? spectral::fit_supertrace(spec, K, t0, t1, cfg.value("points", 24))
                       : spectral::fit_degree_trace(spec, degree, K, t0, t1,
                                                    cfg.value("points", 24));
        return spectral::heatfit_to_json(fit);
    }
    throw ConfigError("unknown command '" + command + "'");
}

} // namespace

std::string run_experiment_json(const std::string& configText) {
    json cfg;
    if (configText.empty()) {
        cfg = json::object();
    } else {
        try {
            cfg = json::parse(configText);
        } catch (const json::parse_error& e) {
            throw ConfigError(std::string("config is not valid JSON: ") + e.what());
        }
    }
    if (!cfg.is_object()) throw ConfigError("config must be a JSON object");
    return run_impl(cfg);
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return 2;
    if (dynamic_cast<const UnsupportedError*>(&e)) return 2;
    if (dynamic_cast<const MissingJetError*>(&e)) return 2;
    if (dynamic_cast<const NumericalContractError*>(&e)) return 3;
    return 1;
}

} // namespace heatlab::cli
