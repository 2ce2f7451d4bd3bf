#pragma once
#include <functional>
#include <string>
#include <vector>

#include "heatlab/complexes.hpp"

namespace heatlab::spectral {

struct DegreeSpectrum {
    int degree = 0;
    std::string label;
    std::vector<double> eigs; // ascending
    double lambdaMax = 0;     // reliability cutoff (0.6-quantile)
    int totalModes = 0;
};

struct SpectrumSet {
    int dim = 0;
    int truncation = 0;
    std::vector<DegreeSpectrum> degrees; // sorted by degree, merged across blocks

    double shared_cutoff() const; // min lambdaMax over degrees
    int discarded_above(double cutoff) const;
};

// Dense spectra of every graded block. Blocks whose matrices commute with the
// mode conjugation are reduced to real symmetric form first; genuinely complex
// blocks go through the Hermitian embedding.
SpectrumSet eigensolve(const complexes::GradedOperatorSet& ops);

// Smallest t for which the discarded-mode contribution stays below 1e-12.
double t_min_reliable(const SpectrumSet& spec);

// Sum of exp(-t lambda) over reliable eigenvalues, per degree; refuses t below
// the reliability window.
std::vector<double> heat_traces(const SpectrumSet& spec, double t);
double heat_trace(const SpectrumSet& spec, int degree, double t);
double supertrace(const SpectrumSet& spec, double t);

struct HeatFit {
    int dim = 0;
    std::vector<double> powers; // (n - m)/2 for n = 0..K
    std::vector<double> coeffs;
    double residual = 0;
    std::vector<double> tGrid;
    double truncationBound = 0;
};

// Weighted least squares of fn(t) against sum_n c_n t^{(n-m)/2} over a
// geometric t-grid; refuses ill-conditioned designs (condition > 1e10 after
// column scaling).
HeatFit fit_asymptotics(const std::function<double(double)>& fn, int m, int K, double t0,
                        double t1, int points = 24);
HeatFit fit_supertrace(const SpectrumSet& spec, int K, double t0, double t1, int points = 24);
HeatFit fit_degree_trace(const SpectrumSet& spec, int degree, int K, double t0, double t1,
                         int points = 24);

// Kernel dimensions per degree: eigenvalues below tau_ker = 1e-8 max(1, cutoff);
// requires a factor-100 spectral gap above the threshold, else throws.
std::vector<int> betti(const SpectrumSet& spec);
int index(const SpectrumSet& spec);

std::string spectrum_to_json(const SpectrumSet& spec, int maxEigs = -1);
std::string heatfit_to_json(const HeatFit& fit);
// CSV of t, per-degree traces, supertrace.
std::string trace_curve_csv(const SpectrumSet& spec, const std::vector<double>& ts);

} // namespace heatlab::spectral
