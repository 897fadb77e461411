#pragma once
// Ideal conditional amplifiers built from photon addition and subtraction.
//
// The add-then-subtract pipeline of order m applies a^m a^+m, a Fock-diagonal
// operator equal to prod_{j=1..m}(n+j); the interferometrically multiplexed
// equivalent applies n^2 + n + 1. Both amplify a coherent state's amplitude
// probabilistically without adding thermal noise. Every figure of merit here
// exists twice: a closed-form polynomial in mu = |alpha|^2 and a brute-force
// numeric path through the truncated Fock space; tests pin them together.

#include "qamp/fock.hpp"

#include <vector>

namespace qamp {

enum class AmplifierVariant { AddThenSubtract, Multiplexed };

struct AmplifierSpec {
    int order = 1;  // m >= 1; closed forms exist for m = 1, 2
    AmplifierVariant variant = AmplifierVariant::AddThenSubtract;
    cx alpha = 0.0;
};

struct AmplifiedState {
    FockVector state;      // normalized output
    double normalization;  // squared norm before normalizing (M_m)
};

// a^m a^+m |alpha> (or (n^2+n+1)|alpha>) normalized, with the pre-normalization
// squared norm exposed.
AmplifiedState amplified_state(const AmplifierSpec& spec, int cutoff);

struct GainResult {
    double value = 1.0;
    bool zero_amplitude_limit = false; // the amplitude ratio is 0/0 at alpha=0
};

GainResult gain_closed_form(const AmplifierSpec& spec);
GainResult gain_numeric(const AmplifierSpec& spec, int cutoff);

struct QuadratureVariances {
    double v_x = 0.5, v_p = 0.5; // vacuum convention: 1/2
};

QuadratureVariances variances_closed_form(const AmplifierSpec& spec);
// second moments of x, p at phase theta = arg(alpha) (0 at alpha = 0)
QuadratureVariances variances_numeric(const AmplifierSpec& spec, int cutoff);

// minimum output variance of a deterministic phase-insensitive amplifier of
// gain g: g^2 - 1/2
double deterministic_bound(double gain);

// photon distribution of the amplified state displaced back by -alpha
std::vector<double> displaced_photon_distribution(const AmplifierSpec& spec, int cutoff);

// overlap with the coherent state of amplitude g*alpha
double coherent_fidelity(const AmplifierSpec& spec, int cutoff);

// squared norms M_m(alpha) of the unnormalized amplified states
double normalization_closed_form(const AmplifierSpec& spec);

// Brute-force contraction of the two-mode multiplexed scheme: couple to a
// vacuum ancilla on a balanced beam splitter, apply (2 n_A + 1)(2 n_B + 1),
// project the ancilla back on vacuum. Verifies the result equals
// diag(n^2 + n + 1) within 1e-9 before returning it.
ModeOperator multiplexed_operator(int cutoff);

// a a^+ + a^+ a assembled from ladder matrices; verified equal to 2n+1 below
// the cutoff (the top diagonal entry is clipped by truncation).
ModeOperator ladder_anticommutator(int cutoff);

// fidelity between the order-2 add-then-subtract output and the multiplexed
// output for the same input amplitude
double mutual_fidelity_closed_form(double alpha_abs);
double mutual_fidelity_numeric(cx alpha, int cutoff);

struct AmplifierReport {
    double gain = 1.0;
    bool gain_zero_limit = false;
    double v_x = 0.5, v_p = 0.5, v_det = 0.5;
    double coherent_fid = 1.0;
    double normalization = 1.0;
    std::vector<double> displaced_probabilities;
};

// full figure-of-merit record; cutoff < 0 selects the default policy
AmplifierReport amplifier_report(const AmplifierSpec& spec, int cutoff = -1);

struct Extremum {
    double alpha_abs;
    double value;
};

// golden-section extrema over |alpha| in [0, 4] (grid-bracketed, tol 1e-6)
Extremum max_displaced_p2();              // order-2 two-photon weight
Extremum min_coherent_fidelity(int m);    // worst-case coherent fidelity

} // namespace qamp
