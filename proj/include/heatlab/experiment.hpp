#pragma once
#include <string>

namespace heatlab::cli {

// Runs one named experiment from a JSON configuration document and returns the
// machine-readable result (JSON text, or CSV when the command produces a
// curve). Deterministic: identical config and build give identical bytes.
//
// Config schema (unknown keys are rejected):
//   command: coeffs | spectrum | heattrace | fit | index | betti | gaussbonnet
//            | boundary | dolbeault | invariance | accept   (default: accept)
//   model:   circle | torus | interval | sphere2 | sphere4 | dolbeault_torus
//   circumference / circumferences / length / radius / bc: model parameters
//   theta, theta_y: twist expressions;  modes: truncation N
//   t_min, t_max, t_values, points: trace / fit windows
//   order: fit order K;  degree: graded piece (-1 = supertrace)
//   m, n, boundary, with_theta, enumerate: invariance scans
//   point: evaluation point for coeffs
//   format: json | csv;  max_eigenvalues: spectrum output cap
//   export_operators: matrix-bundle path
std::string run_experiment_json(const std::string& configText);

// Exit-code policy: 0 success, 2 schema violation, 3 numerical contract
// violation, 1 internal error.
int exit_code_for(const std::exception& e);

} // namespace heatlab::cli
