#pragma once
#include <array>
#include <functional>
#include <string>
#include <vector>

#include "heatlab/tensor_core.hpp"
#include "heatlab/trig.hpp"

namespace heatlab::models {

enum class ModelKind { Point, Circle, FlatTorus, Interval, Product, RoundSphere, ComplexTorus };

// Closed 1-form twist on a circle or torus: one trigonometric polynomial per
// coordinate. The constant parts carry the cohomology class.
struct TwistForm {
    int dim = 0;
    std::array<double, 2> omega{1.0, 1.0};
    std::vector<TrigPoly> comp;
    bool closedFlag = true;

    static TwistForm none(int dim, std::array<double, 2> omega = {1.0, 1.0});

    bool verify_closed(double tol = 1e-12) const;
    bool is_real(double tol = 1e-13) const;
    std::vector<cplx> cohomology_class() const;
    int bandwidth() const;
    TwistForm negated() const;
    bool is_zero(double tol = 0.0) const;
};

// Adds the exact form dh to a twist (h a trig polynomial on the same chart).
TwistForm twist_plus_exact(const TwistForm& t, const TrigPoly& h);

struct ModelManifold {
    ModelKind kind = ModelKind::Circle;
    int dim = 1;
    std::vector<double> circumferences; // circle / flat torus / complex torus
    double length = 0;                  // interval
    double radius = 1.0;                // round sphere
    int sphereDim = 2;
    std::vector<ModelManifold> factors; // product
    std::vector<int> quadNodes;         // per-axis node counts

    bool has_boundary() const;
    int boundary_points() const; // interval: 2, else 0
};

ModelManifold point_model();
ModelManifold circle(double circumference = 2 * M_PI);
ModelManifold flat_torus(std::vector<double> circumferences);
ModelManifold interval(double length = M_PI);
ModelManifold round_sphere(int sphereDim, double radius = 1.0);
ModelManifold complex_torus(); // unit-square periods

ModelManifold product(const ModelManifold& a, const ModelManifold& b);
TwistForm product_twist(const TwistForm& a, const TwistForm& b);

// The geometric restriction construction: the model crossed with a flat circle
// carrying no twist.
ModelManifold restrict_by_circle(const ModelManifold& a);
TwistForm restrict_by_circle_twist(const TwistForm& t);

// Tensor quadrature rule of the model, materialized as nodes and weights that
// already include the Riemannian measure.
struct QuadratureNodes {
    std::vector<std::vector<double>> points;
    std::vector<double> weights;
};
QuadratureNodes quadrature_nodes(const ModelManifold& model);

// Integrates a pointwise density against the Riemannian measure. The parallel
// version dispatches evaluator calls across nodes; the serial version is the
// reference used for testing.
double integrate(const ModelManifold& model,
                 const std::function<double(const std::vector<double>&)>& density);
double integrate_serial(const ModelManifold& model,
                        const std::function<double(const std::vector<double>&)>& density);

// Chart access for curvature-density integrands.
tensor::Chart chart_of(const ModelManifold& model);

// Round-trip through the declarative chart JSON format.
std::string to_chart_json(const ModelManifold& model);
ModelManifold model_from_chart_json(const std::string& jsonText);

// Builds a twist from per-coordinate expressions in the twist grammar, using
// the model's periods. A bare string is the dx component.
TwistForm twist_from_expressions(const ModelManifold& model, const std::string& xExpr,
                                 const std::string& yExpr = "");

} // namespace heatlab::models
