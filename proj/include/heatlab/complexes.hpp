#pragma once
#include <string>
#include <vector>

#include "heatlab/matrix.hpp"
#include "heatlab/models.hpp"

namespace heatlab::complexes {

// One graded piece: the Hermitian Galerkin truncation of a twisted Laplacian,
// plus the metadata needed to recognise real structure and truncation edges.
struct DegreeBlock {
    int degree = 0;
    std::string label;
    int size = 0;
    SparseC laplacian;
    std::vector<int> conjPartner; // index of the conjugate mode, or -1
    std::vector<int> modeNorm;    // max |frequency| of each basis mode
    bool realBasis = false;       // sine/cosine bases are real already
};

struct ChainMap {
    int fromBlock = 0, toBlock = 0;
    SparseC d;
};

struct GradedOperatorSet {
    int dim = 0;
    int truncation = 0;
    int twistBandwidth = 0;
    std::vector<DegreeBlock> blocks;
    std::vector<ChainMap> chains;

    int max_degree() const;
};

// Fourier-basis truncation of the twisted de Rham complex on a circle.
// Modes are integer frequencies -N..N. Refuses twists wider than N.
GradedOperatorSet assemble_circle(const models::ModelManifold& model,
                                  const models::TwistForm& theta, int N);

// Twisted de Rham complex on the flat 2-torus; 1-form components ordered
// (dx, dy). Rejects non-closed twists.
GradedOperatorSet assemble_torus(const models::ModelManifold& model,
                                 const models::TwistForm& theta, int N);

enum class BoundaryFlavor { Relative, Absolute };

// Untwisted de Rham complex on [0, L] in the exact sine/cosine resolutions.
GradedOperatorSet assemble_interval(const models::ModelManifold& model, BoundaryFlavor bc, int N);

// Twisted Dolbeault complex on the unit-square complex torus; theta is the
// complex coefficient of dzbar as a trigonometric polynomial.
GradedOperatorSet assemble_dolbeault_torus(const TrigPoly& theta, int N);

// Tensor-product complex: per-bidegree Laplacian blocks and chain maps.
GradedOperatorSet product_complex(const GradedOperatorSet& a, const GradedOperatorSet& b,
                                  int sizeCap = 6000);

// Adjoint (codifferential) block of a chain map; the construction-level
// identity delta = d^H.
SparseC delta_of(const ChainMap& chain);

// Max |(d d)| entry over source modes at least `margin` inside the truncation
// edge, where the compression commutes with the operators.
double chain_residual(const GradedOperatorSet& ops);

// Dense column-major matrix bundle with a JSON header line.
void export_bundle(const GradedOperatorSet& ops, const std::string& path);
GradedOperatorSet import_bundle(const std::string& path);

} // namespace heatlab::complexes
