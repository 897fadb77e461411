#pragma once
// Truncated Fock-basis states and the elementary optical transformations:
// coherent states, ladder operators, displacements, beam splitters and
// two-mode squeezers, composition and reduction of two-mode systems, and
// fidelity/purity measures.
//
// Conventions used throughout:
//   - photon-number amplitudes c_n, n = 0..cutoff
//   - quadratures x = (a e^{-i th} + a^+ e^{i th})/sqrt(2), vacuum variance 1/2
//   - beam splitter: real coupling, transmitted amplitude t = sqrt(T) on the
//     same mode, reflected amplitude r = sqrt(1-T) on the other, no extra
//     phase: |alpha, 0> -> |t alpha, r alpha>
//   - two-mode index (ia, ib) flattens to ia*(nb+1) + ib

#include "qamp/linalg.hpp"

#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

namespace qamp {

struct dimension_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct cutoff_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct zero_probability_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Mode { A, B };

// ---- states ----------------------------------------------------------------

struct FockVector {
    cvec amp;              // amplitudes over n = 0..cutoff
    double leakage = 0.0;  // norm lost to truncation so far

    FockVector() = default;
    explicit FockVector(int cutoff) : amp(std::size_t(cutoff) + 1) {}

    int cutoff() const { return int(amp.size()) - 1; }
    double norm_sq() const { return qamp::norm2(amp); }
    void normalize();                      // throws on zero norm
    double mean_photon() const;            // of the normalized distribution
    std::vector<double> probabilities() const;
};

struct DensityOperator {
    CMat mat;

    DensityOperator() = default;
    explicit DensityOperator(int cutoff)
        : mat(std::size_t(cutoff) + 1, std::size_t(cutoff) + 1) {}
    explicit DensityOperator(CMat m) : mat(std::move(m)) {}
    static DensityOperator pure(const FockVector& psi);

    int cutoff() const { return int(mat.rows) - 1; }
    double trace() const { return qamp::trace(mat).real(); }
    void normalize();                      // trace to 1, throws on zero trace
    double hermiticity_error() const;      // max |rho - rho^+| elementwise
    double mean_photon() const;
    cx mean_annihilation() const;          // Tr[rho a]
    cx mean_annihilation_sq() const;       // Tr[rho a a]
    double min_eigenvalue() const;
};

struct TwoModeState {
    CMat amp; // amp(ia, ib)

    TwoModeState() = default;
    TwoModeState(int na, int nb)
        : amp(std::size_t(na) + 1, std::size_t(nb) + 1) {}

    int cutoff_a() const { return int(amp.rows) - 1; }
    int cutoff_b() const { return int(amp.cols) - 1; }
    double norm_sq() const { return qamp::norm2(amp.a); }
    void normalize();
};

struct TwoModeDensity {
    CMat mat; // indices flattened A-major
    int na = 0, nb = 0;

    int dim() const { return (na + 1) * (nb + 1); }
    double trace() const { return qamp::trace(mat).real(); }
    void normalize();
};

// ---- operators --------------------------------------------------------------

struct ModeOperator {
    CMat mat;

    ModeOperator() = default;
    explicit ModeOperator(CMat m) : mat(std::move(m)) {}
    int cutoff() const { return int(mat.rows) - 1; }
};

struct TwoModeOperator {
    CMat mat;
    int na = 0, nb = 0;
};

// ---- construction ------------------------------------------------------------

// c_n = e^{-|alpha|^2/2} alpha^n / sqrt(n!); leakage = clipped Poisson tail.
FockVector coherent_state(cx alpha, int cutoff);
FockVector fock_state(int n, int cutoff);

// a[n-1, n] = sqrt(n); a_dagger is the conjugate transpose.
std::pair<ModeOperator, ModeOperator> ladder_operators(int cutoff);
ModeOperator number_operator(int cutoff);

// exp(alpha a^+ - alpha^* a) built on an internally padded space (pad = 8)
// and truncated back, so the returned block is unitary on its support.
// Requires |alpha|^2 + 6|alpha| + 6 <= cutoff.
ModeOperator displacement_operator(cx alpha, int cutoff);

// Same operator from the column recurrence
//   D_{m,0} = e^{-|a|^2/2} a^m / sqrt(m!),
//   D_{m,n+1} = (sqrt(m) D_{m-1,n} - conj(a) D_{m,n}) / sqrt(n+1);
// no padding, exact elementwise. Used for dense grids of displacements.
ModeOperator displacement_columns(cx alpha, int cutoff);

// quadrature pair (x, p) at phase theta
std::pair<ModeOperator, ModeOperator> quadrature_operators(double theta, int cutoff);

// photon-number conserving unitary, assembled per total-n block
TwoModeOperator beam_splitter(double transmittance, int na, int nb);

// exp[r(a^+ b^+ - a b)], assembled per (n_a - n_b) block; requires
// tanh(r)^min(na,nb) < 1e-8 so the clipped pair ladder is negligible.
TwoModeOperator two_mode_squeezer(double r, int na, int nb);

// ---- composition / reduction --------------------------------------------------

TwoModeState tensor(const FockVector& a, const FockVector& b);
TwoModeDensity tensor(const DensityOperator& a, const DensityOperator& b);

FockVector apply(const ModeOperator& op, const FockVector& psi);
DensityOperator conjugate_apply(const ModeOperator& op, const DensityOperator& rho); // op rho op^+
TwoModeState apply(const TwoModeOperator& u, const TwoModeState& psi);
TwoModeDensity conjugate_apply(const TwoModeOperator& u, const TwoModeDensity& rho);

DensityOperator partial_trace(const TwoModeState& psi, Mode traced);
DensityOperator partial_trace(const TwoModeDensity& rho, Mode traced);

struct Projection {
    FockVector branch;   // unnormalized post-measurement state
    double probability;  // its squared norm
};
Projection project_mode(const TwoModeState& psi, Mode measured, const FockVector& ket);

struct Conditional {
    DensityOperator state; // normalized
    double probability;
};
// diagonal POVM element (weights over photon number) applied to one mode
Conditional condition_on_diag_povm(const TwoModeDensity& rho, Mode measured,
                                   const std::vector<double>& weights);
Conditional condition_on_diag_povm(const TwoModeState& psi, Mode measured,
                                   const std::vector<double>& weights);

// ---- measures -----------------------------------------------------------------

double fidelity(const DensityOperator& rho, const FockVector& psi); // <psi|rho|psi>
double fidelity(const FockVector& a, const FockVector& b);          // |<a|b>|^2
double uhlmann_fidelity(const DensityOperator& rho, const DensityOperator& sigma);
double purity(const DensityOperator& rho);

struct QuadMoments {
    double mean_x = 0.0, mean_p = 0.0;
    double v_x = 0.5, v_p = 0.5;
    double cov = 0.0;
};

// first and second moments of (x, p) at phase theta
QuadMoments quadrature_moments(const DensityOperator& rho, double theta);

// displaces by alpha via the padded unitary; truncation loss goes to leakage
FockVector displace_state(const FockVector& psi, cx alpha);

FockVector embed(const FockVector& psi, int cutoff);   // grow or shrink
DensityOperator embed(const DensityOperator& rho, int cutoff);

// default truncation policy: ceil(|alpha|^2 + 6|alpha| + 10) + 2m
int default_cutoff(cx alpha, int m);

} // namespace qamp
