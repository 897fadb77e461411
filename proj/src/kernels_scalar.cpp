// Scalar reference kernels. These are the ground truth the SIMD variants are
// tested against; keep them simple enough to audit by eye.

#include "qamp/kernels.hpp"

#include <cmath>

namespace qamp::kernels {

namespace {

void zaxpy_scalar(std::size_t n, cx a, const cx* x, cx* y)
{
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void zaxpy_conj_scalar(std::size_t n, cx a, const cx* x, cx* y)
{
    for (std::size_t i = 0; i < n; ++i) y[i] += a * std::conj(x[i]);
}

void daxpy_scalar(std::size_t n, double a, const cx* x, cx* y)
{
    const double* xs = reinterpret_cast<const double*>(x);
    double* ys = reinterpret_cast<double*>(y);
    for (std::size_t i = 0; i < 2 * n; ++i) ys[i] += a * xs[i];
}

void zscale_scalar(std::size_t n, cx a, cx* x)
{
    for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

cx zdotc_scalar(std::size_t n, const cx* x, const cx* y)
{
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        re += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
        im += x[i].real() * y[i].imag() - x[i].imag() * y[i].real();
    }
    return {re, im};
}

cx zdotu_scalar(std::size_t n, const cx* x, const cx* y)
{
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        re += x[i].real() * y[i].real() - x[i].imag() * y[i].imag();
        im += x[i].real() * y[i].imag() + x[i].imag() * y[i].real();
    }
    return {re, im};
}

double znorm2_scalar(std::size_t n, const cx* x)
{
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        s += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
    return s;
}

void hermite_grid_scalar(std::size_t np, const double* x, int nmax, double* out)
{
    constexpr double pi_quarter = 0.7511255444649425; // pi^{-1/4}
    for (std::size_t j = 0; j < np; ++j) {
        double prev = 0.0;
        double cur = pi_quarter * std::exp(-0.5 * x[j] * x[j]);
        out[j] = cur;
        for (int n = 0; n < nmax; ++n) {
            double next = std::sqrt(2.0 / (n + 1)) * x[j] * cur
                        - std::sqrt(double(n) / (n + 1)) * prev;
            prev = cur;
            cur = next;
            out[std::size_t(n + 1) * np + j] = cur;
        }
    }
}

} // namespace

const Backend& scalar_backend()
{
    static const Backend b{
        "scalar",
        zaxpy_scalar,
        zaxpy_conj_scalar,
        daxpy_scalar,
        zscale_scalar,
        zdotc_scalar,
        zdotu_scalar,
        znorm2_scalar,
        hermite_grid_scalar,
    };
    return b;
}

} // namespace qamp::kernels
