#pragma once
// Data-parallel inner loops used by every linear-algebra routine in the
// simulator. Each kernel exists twice: a scalar reference implementation and
// an AVX2 implementation. The backend is selected once at startup from CPU
// capabilities and can be pinned with set_backend() or the QAMP_KERNELS
// environment variable ("scalar", "avx2", "auto").
//
// Complex data is interleaved std::complex<double> storage (re, im, re, im).
// The two backends are equivalence-tested against each other; they agree to
// a few ulp (FMA contraction changes rounding, not results).

#include <complex>
#include <cstddef>
#include <string_view>

namespace qamp::kernels {

using cx = std::complex<double>;

struct Backend {
    const char* name;

    // y[i] += a * x[i]
    void (*zaxpy)(std::size_t n, cx a, const cx* x, cx* y);
    // y[i] += a * conj(x[i])
    void (*zaxpy_conj)(std::size_t n, cx a, const cx* x, cx* y);
    // y[i] += a * x[i] with real a
    void (*daxpy)(std::size_t n, double a, const cx* x, cx* y);
    // x[i] *= a
    void (*zscale)(std::size_t n, cx a, cx* x);
    // sum_i conj(x[i]) * y[i]
    cx (*zdotc)(std::size_t n, const cx* x, const cx* y);
    // sum_i x[i] * y[i]
    cx (*zdotu)(std::size_t n, const cx* x, const cx* y);
    // sum_i |x[i]|^2
    double (*znorm2)(std::size_t n, const cx* x);
    // Harmonic-oscillator eigenfunctions psi_n(x), vacuum variance 1/2:
    //   psi_0(x) = pi^{-1/4} exp(-x^2/2),  psi_1 = sqrt(2) x psi_0,
    //   psi_{n+1} = sqrt(2/(n+1)) x psi_n - sqrt(n/(n+1)) psi_{n-1}.
    // Fills out[n*np + j] for n = 0..nmax, j = 0..np-1 (n-major).
    void (*hermite_grid)(std::size_t np, const double* x, int nmax, double* out);
};

// Currently selected backend (set on first use).
const Backend& backend();

const Backend& scalar_backend();
// nullptr when the CPU or build lacks AVX2+FMA.
const Backend* avx2_backend();

// "scalar" | "avx2" | "auto"; returns false if the request cannot be honored.
bool set_backend(std::string_view name);

} // namespace qamp::kernels
