#pragma once
// Homodyne measurement simulation and iterative maximum-likelihood state
// reconstruction with detection-efficiency compensation.
//
// Quadrature convention: x_theta = (a e^{-i theta} + a^+ e^{i theta})/sqrt(2),
// vacuum variance 1/2, so p(x|theta) = sum_{n,m} rho_nm e^{i(m-n)theta}
// psi_n(x) psi_m(x) with psi_n the harmonic-oscillator eigenfunctions.
//
// Sampling and reconstruction are fully deterministic given the seed: the
// uniform stream is a fixed-algorithm mt19937_64 per phase (stream index =
// phase index) and inverse-CDF lookup runs on a fixed grid.

#include "qamp/fock.hpp"

#include <cstdint>
#include <vector>

namespace qamp {

struct QuadratureSample {
    double theta = 0.0;
    double x = 0.0;
};

struct QuadratureDataset {
    std::vector<QuadratureSample> samples;
    double eta = 1.0;       // detection efficiency the samples were drawn at
    std::uint64_t seed = 0;

    // (theta, x) and (theta + pi, -x) label the same measurement; fold all
    // phases into [0, pi). Rejects non-finite samples.
    void fold();
};

double quadrature_pdf(const DensityOperator& rho, double theta, double x);
// pdf evaluated on a whole grid of x values (shares the Hermite evaluations)
std::vector<double> quadrature_pdf_grid(const DensityOperator& rho, double theta,
                                        const std::vector<double>& xs);

// generalized Bernoulli (beam-splitter-to-vacuum) photon-loss channel
DensityOperator apply_loss(const DensityOperator& rho, double eta);

// draws n_per_phase values per phase from the eta-degraded state by
// inverse-CDF sampling; reproducible from the seed
QuadratureDataset sample_quadratures(const DensityOperator& rho, double eta,
                                     const std::vector<double>& phases,
                                     int n_per_phase, std::uint64_t seed);

struct ReconstructionResult {
    DensityOperator rho;
    std::vector<double> log_likelihood; // per iteration
    int iterations = 0;
    bool converged = false;
};

struct MaxLikOptions {
    int max_iterations = 2000;
    double tolerance = 1e-6;   // stop when |d lambda_max(R)| falls below this
    double bin_width = 0.05;   // sample binning in vacuum units
    bool compensate_eta = false;
};

// expectation-maximization fixed point rho <- N[R(rho) rho R(rho)] with
// R = sum_j f_j Pi_j / p_j over binned sample projectors; with compensation
// the projectors are pushed through the loss-channel adjoint so the estimate
// refers to the state before detection losses.
ReconstructionResult maxlik_reconstruct(const QuadratureDataset& data, int cutoff,
                                        const MaxLikOptions& opts = {});

struct MetricsRecord {
    double fidelity = 0.0;
    double purity = 0.0;
    double gain = 0.0;
    bool gain_defined = false; // false when alpha = 0
    double v_x = 0.5, v_p = 0.5;
    std::vector<double> displaced_probabilities;
};

// the full figure-of-merit set for a reconstructed state against a reference
MetricsRecord report_metrics(const DensityOperator& rho, const FockVector& reference,
                             cx alpha);

} // namespace qamp
