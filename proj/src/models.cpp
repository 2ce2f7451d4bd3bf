#include "heatlab/models.hpp"
#include "heatlab/errors.hpp"
#include "heatlab/parallel.hpp"

#include <cmath>

#include <json.hpp>

namespace heatlab::models {

using nlohmann::json;

TwistForm TwistForm::none(int dim, std::array<double, 2> omega) {
    TwistForm t;
    t.dim = dim;
    t.omega = omega;
    t.comp.assign(dim, TrigPoly::zero(std::min(dim, 2), omega));
    return t;
}

bool TwistForm::verify_closed(double tol) const {
    if (dim <= 1) return true;
    // d Theta = (d_x theta_y - d_y theta_x) dx ^ dy, checked on coefficients.
    TrigPoly d = comp[1].derivative(0) - comp[0].derivative(1);
    double scale = 0;
    for (const auto& c : comp)
        for (const auto& [q, v] : c.coef) scale = std::max(scale, std::abs(v));
    return d.is_zero(tol * std::max(1.0, scale));
}

bool TwistForm::is_real(double tol) const {
    for (const auto& c : comp)
        if (!c.is_real(tol)) return false;
    return true;
}

std::vector<cplx> TwistForm::cohomology_class() const {
    std::vector<cplx> out;
    for (const auto& c : comp) out.push_back(c.constant_part());
    return out;
}

int TwistForm::bandwidth() const {
    int b = 0;
    for (const auto& c : comp) b = std::max(b, c.bandwidth());
    return b;
}

TwistForm TwistForm::negated() const {
    TwistForm t = *this;
    for (auto& c : t.comp) c = c.scaled(-1.0);
    return t;
}

bool TwistForm::is_zero(double tol) const {
    for (const auto& c : comp)
        if (!c.is_zero(tol)) return false;
    return true;
}

TwistForm twist_plus_exact(const TwistForm& t, const TrigPoly& h) {
    TwistForm out = t;
    for (int a = 0; a < std::min(t.dim, 2); ++a) out.comp[a] += h.derivative(a);
    return out;
}

bool ModelManifold::has_boundary() const {
    if (kind == ModelKind::Interval) return true;
    for (const auto& f : factors)
        if (f.has_boundary()) return true;
    return false;
}

int ModelManifold::boundary_points() const { return kind == ModelKind::Interval ? 2 : 0; }

ModelManifold point_model() {
    ModelManifold m;
    m.kind = ModelKind::Point;
    m.dim = 0;
    return m;
}

ModelManifold circle(double circumference) {
    ModelManifold m;
    m.kind = ModelKind::Circle;
    m.dim = 1;
    m.circumferences = {circumference};
    m.quadNodes = {256};
    return m;
}

ModelManifold flat_torus(std::vector<double> circumferences) {
    ModelManifold m;
    m.kind = ModelKind::FlatTorus;
    m.dim = static_cast<int>(circumferences.size());
    m.circumferences = std::move(circumferences);
    m.quadNodes.assign(m.dim, 256);
    return m;
}

ModelManifold interval(double length) {
    ModelManifold m;
    m.kind = ModelKind::Interval;
    m.dim = 1;
    m.length = length;
    m.quadNodes = {64};
    return m;
}

ModelManifold round_sphere(int sphereDim, double radius) {
    if (sphereDim != 2 && sphereDim != 4)
        throw ConfigError("round_sphere: only S^2 and S^4 are catalogued");
    ModelManifold m;
    m.kind = ModelKind::RoundSphere;
    m.dim = sphereDim;
    m.sphereDim = sphereDim;
    m.radius = radius;
    m.quadNodes = sphereDim == 2 ? std::vector<int>{128, 256} : std::vector<int>{16, 16, 16, 32};
    return m;
}

ModelManifold complex_torus() {
    ModelManifold m;
    m.kind = ModelKind::ComplexTorus;
    m.dim = 2;
    m.circumferences = {1.0, 1.0};
    m.quadNodes = {256, 256};
    return m;
}

ModelManifold product(const ModelManifold& a, const ModelManifold& b) {
    if (a.has_boundary() || b.has_boundary())
        throw UnsupportedError("product: boundary factors are unsupported");
    if (a.kind == ModelKind::Circle && b.kind == ModelKind::Circle)
        return flat_torus({a.circumferences[0], b.circumferences[0]});
    ModelManifold m;
    m.kind = ModelKind::Product;
    m.dim = a.dim + b.dim;
    m.factors = {a, b};
    return m;
}

TwistForm product_twist(const TwistForm& a, const TwistForm& b) {
    if (a.dim + b.dim > 2)
        throw UnsupportedError("product_twist: more than two coordinates unsupported");
    TwistForm t;
    t.dim = a.dim + b.dim;
    t.omega = {a.dim >= 1 ? a.omega[0] : 1.0, b.dim >= 1 ? b.omega[0] : 1.0};
    t.closedFlag = a.closedFlag && b.closedFlag;
    for (int i = 0; i < a.dim; ++i) t.comp.push_back(a.comp[i].lifted(0, t.omega));
    for (int i = 0; i < b.dim; ++i) t.comp.push_back(b.comp[i].lifted(1, t.omega));
    return t;
}

ModelManifold restrict_by_circle(const ModelManifold& a) {
    const ModelManifold s1 = circle();
    if (a.kind == ModelKind::Point) return s1;
    if (a.kind == ModelKind::Circle) return flat_torus({a.circumferences[0], 2 * M_PI});
    // boundary on the first factor is preserved; the added circle is closed
    ModelManifold m;
    m.kind = ModelKind::Product;
    m.dim = a.dim + 1;
    m.factors = {a, s1};
    return m;
}

TwistForm restrict_by_circle_twist(const TwistForm& t) {
    return product_twist(t, TwistForm::none(1, {1.0, 1.0}));
}

namespace {

struct Rule1D {
    std::vector<double> x, w;
};

Rule1D trapezoid_periodic(double circumference, int n) {
    Rule1D r;
    r.x.resize(n);
    r.w.assign(n, circumference / n);
    for (int i = 0; i < n; ++i) r.x[i] = circumference * i / n;
    return r;
}

// Gauss-Legendre on [a, b] by Newton iteration on Legendre polynomials.
Rule1D gauss_legendre(double a, double b, int n) {
    Rule1D r;
    r.x.resize(n);
    r.w.resize(n);
    const double xm = 0.5 * (b + a), xl = 0.5 * (b - a);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1, p2 = 0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) < 1e-15) break;
        }
        r.x[i] = xm - xl * z;
        r.x[n - 1 - i] = xm + xl * z;
        r.w[i] = 2.0 * xl / ((1.0 - z * z) * pp * pp);
        r.w[n - 1 - i] = r.w[i];
    }
    return r;
}

void tensorize(const std::vector<Rule1D>& rules, QuadratureNodes& out) {
    std::vector<size_t> idx(rules.size(), 0);
    size_t total = 1;
    for (const auto& r : rules) total *= r.x.size();
    out.points.reserve(total);
    out.weights.reserve(total);
    for (size_t q = 0; q < total; ++q) {
        size_t rem = q;
        std::vector<double> p(rules.size());
        double w = 1;
        for (size_t a = 0; a < rules.size(); ++a) {
            const size_t na = rules[a].x.size();
            const size_t ia = rem % na;
            rem /= na;
            p[a] = rules[a].x[ia];
            w *= rules[a].w[ia];
        }
        out.points.push_back(std::move(p));
        out.weights.push_back(w);
    }
}

} // namespace

QuadratureNodes quadrature_nodes(const ModelManifold& model) {
    QuadratureNodes out;
    switch (model.kind) {
    case ModelKind::Point:
        out.points.push_back({});
        out.weights.push_back(1.0);
        return out;
    case ModelKind::Circle:
        {
            std::vector<Rule1D> rules{trapezoid_periodic(model.circumferences[0], model.quadNodes[0])};
            tensorize(rules, out);
            return out;
        }
    case ModelKind::FlatTorus:
    case ModelKind::ComplexTorus:
        {
            std::vector<Rule1D> rules;
            for (int a = 0; a < model.dim; ++a)
                rules.push_back(trapezoid_periodic(model.circumferences[a], model.quadNodes[a]));
            tensorize(rules, out);
            return out;
        }
    case ModelKind::Interval:
        {
            std::vector<Rule1D> rules{gauss_legendre(0.0, model.length, model.quadNodes[0])};
            tensorize(rules, out);
            return out;
        }
    case ModelKind::RoundSphere:
        {
            const int d = model.sphereDim;
            std::vector<Rule1D> rules;
            for (int a = 0; a < d - 1; ++a)
                rules.push_back(gauss_legendre(0.0, M_PI, model.quadNodes[a]));
            rules.push_back(trapezoid_periodic(2 * M_PI, model.quadNodes[d - 1]));
            tensorize(rules, out);
            // fold in the Riemannian measure r^d prod_j sin^{d-1-j}(phi_j)
            for (size_t q = 0; q < out.points.size(); ++q) {
                double meas = std::pow(model.radius, d);
                for (int a = 0; a < d - 1; ++a)
                    meas *= std::pow(std::sin(out.points[q][a]), d - 1 - a);
                out.weights[q] *= meas;
            }
            return out;
        }
    case ModelKind::Product:
        {
            QuadratureNodes a = quadrature_nodes(model.factors[0]);
            QuadratureNodes b = quadrature_nodes(model.factors[1]);
            out.points.reserve(a.points.size() * b.points.size());
            out.weights.reserve(a.points.size() * b.points.size());
            for (size_t i = 0; i < a.points.size(); ++i)
                for (size_t j = 0; j < b.points.size(); ++j) {
                    std::vector<double> p = a.points[i];
                    p.insert(p.end(), b.points[j].begin(), b.points[j].end());
                    out.points.push_back(std::move(p));
                    out.weights.push_back(a.weights[i] * b.weights[j]);
                }
            return out;
        }
    }
    throw ConfigError("quadrature_nodes: unknown model kind");
}

namespace {

template <bool Parallel>
double integrate_impl(const ModelManifold& model,
                      const std::function<double(const std::vector<double>&)>& density) {
    const QuadratureNodes nodes = quadrature_nodes(model);
    const long n = static_cast<long>(nodes.points.size());
    double sum = 0;
    bool bad = false;
#ifdef _OPENMP
    if constexpr (Parallel) {
#pragma omp parallel for schedule(static) reduction(+ : sum) reduction(|| : bad) \
    num_threads(thread_count())
        for (long q = 0; q < n; ++q) {
            const double v = density(nodes.points[q]);
            bad = bad || !std::isfinite(v);
            sum += nodes.weights[q] * v;
        }
        if (bad) throw NumericalContractError("integrate: density is not finite at a node");
        return sum;
    }
#endif
    for (long q = 0; q < n; ++q) {
        const double v = density(nodes.points[q]);
        if (!std::isfinite(v))
            throw NumericalContractError("integrate: density is not finite at a node");
        sum += nodes.weights[q] * v;
    }
    return sum;
}

} // namespace

double integrate(const ModelManifold& model,
                 const std::function<double(const std::vector<double>&)>& density) {
    return integrate_impl<true>(model, density);
}

double integrate_serial(const ModelManifold& model,
                        const std::function<double(const std::vector<double>&)>& density) {
    return integrate_impl<false>(model, density);
}

tensor::Chart chart_of(const ModelManifold& model) {
    switch (model.kind) {
    case ModelKind::Point:
        return tensor::euclidean_chart(0);
    case ModelKind::Circle:
        return tensor::flat_torus_chart({model.circumferences[0]});
    case ModelKind::FlatTorus:
    case ModelKind::ComplexTorus:
        return tensor::flat_torus_chart(model.circumferences);
    case ModelKind::Interval:
        return tensor::euclidean_chart(1);
    case ModelKind::RoundSphere:
        return tensor::round_sphere_chart(model.sphereDim, model.radius);
    case ModelKind::Product:
        {
            tensor::Chart a = chart_of(model.factors[0]);
            tensor::Chart b = chart_of(model.factors[1]);
            tensor::Chart c;
            c.dim = model.dim;
            c.metric_jet = [a, b](const std::vector<double>& x) {
                std::vector<double> xa(x.begin(), x.begin() + a.dim);
                std::vector<double> xb(x.begin() + a.dim, x.end());
                return tensor::block_sum(a.metric_jet(xa), b.metric_jet(xb));
            };
            return c;
        }
    }
    throw ConfigError("chart_of: unknown model kind");
}

std::string to_chart_json(const ModelManifold& model) {
    json j;
    j["dim"] = model.dim;
    switch (model.kind) {
    case ModelKind::Point:
        j["metric"] = "euclidean";
        break;
    case ModelKind::Circle:
    case ModelKind::FlatTorus:
    case ModelKind::ComplexTorus:
        j["metric"] = "flat_torus";
        j["circumferences"] = model.circumferences;
        break;
    case ModelKind::Interval:
        j["metric"] = "euclidean";
        j["length"] = model.length;
        j["boundary"] = "interval";
        break;
    case ModelKind::RoundSphere:
        j["metric"] = model.sphereDim == 2 ? "round_sphere_2" : "round_sphere_4";
        j["radius"] = model.radius;
        break;
    case ModelKind::Product:
        j["metric"] = "product";
        j["factors"] = json::array({json::parse(to_chart_json(model.factors[0])),
                                    json::parse(to_chart_json(model.factors[1]))});
        break;
    }
    return j.dump();
}

ModelManifold model_from_chart_json(const std::string& jsonText) {
    json j = json::parse(jsonText);
    const int dim = j.at("dim").get<int>();
    const std::string metric = j.at("metric").is_string() ? j.at("metric").get<std::string>() : "";
    if (metric == "euclidean" && j.value("boundary", "") == "interval")
        return interval(j.value("length", M_PI));
    if (metric == "euclidean" && dim == 0) return point_model();
    if (metric == "flat_torus") {
        std::vector<double> circ(dim, 2 * M_PI);
        if (j.contains("circumferences")) circ = j.at("circumferences").get<std::vector<double>>();
        if (dim == 1) return circle(circ[0]);
        return flat_torus(circ);
    }
    if (metric == "round_sphere_2") return round_sphere(2, j.value("radius", 1.0));
    if (metric == "round_sphere_4") return round_sphere(4, j.value("radius", 1.0));
    if (metric == "product") {
        const auto& f = j.at("factors");
        return product(model_from_chart_json(f.at(0).dump()), model_from_chart_json(f.at(1).dump()));
    }
    throw ConfigError("model_from_chart_json: unrecognized descriptor");
}

TwistForm twist_from_expressions(const ModelManifold& model, const std::string& xExpr,
                                 const std::string& yExpr) {
    if (model.dim > 2) throw UnsupportedError("twists live on circles and tori");
    std::array<double, 2> omega{1.0, 1.0};
    for (int a = 0; a < std::min<int>(2, static_cast<int>(model.circumferences.size())); ++a)
        omega[a] = 2 * M_PI / model.circumferences[a];
    TwistForm t = TwistForm::none(model.dim, omega);
    if (!xExpr.empty()) t.comp[0] = parse_trig(xExpr, model.dim, omega);
    if (model.dim >= 2 && !yExpr.empty()) t.comp[1] = parse_trig(yExpr, model.dim, omega);
    t.closedFlag = t.verify_closed();
    return t;
}

} // namespace heatlab::models
