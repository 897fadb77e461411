#pragma once
// Small dense complex linear algebra on top of the kernel layer. Matrices are
// row-major; sizes in this project stay a few hundred at most, so the simple
// triple-loop formulations (with vectorized inner loops) are plenty.

#include "qamp/kernels.hpp"

#include <complex>
#include <cstddef>
#include <vector>

namespace qamp {

using cx = std::complex<double>;
using cvec = std::vector<cx>;

struct CMat {
    std::size_t rows = 0, cols = 0;
    cvec a;

    CMat() = default;
    CMat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c) {}

    cx& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    const cx& operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

    cx* row(std::size_t i) { return a.data() + i * cols; }
    const cx* row(std::size_t i) const { return a.data() + i * cols; }

    static CMat identity(std::size_t n);
    static CMat diagonal(const std::vector<double>& d);
};

// ---- vector helpers -------------------------------------------------------

double norm2(const cvec& v);                       // sum |v_i|^2
cx dotc(const cvec& x, const cvec& y);             // <x|y>
void scale(cvec& v, cx a);

// ---- matrix algebra -------------------------------------------------------

CMat matmul(const CMat& A, const CMat& B);
cvec matvec(const CMat& A, const cvec& x);
cvec matvec_adjoint(const CMat& A, const cvec& x); // A^dagger x
CMat adjoint(const CMat& A);
CMat add(const CMat& A, const CMat& B);
CMat sub(const CMat& A, const CMat& B);
void axpy(CMat& Y, cx a, const CMat& X);           // Y += a X
cx trace(const CMat& A);
double max_abs(const CMat& A);
double max_abs_diff(const CMat& A, const CMat& B);
// Tr[A^dagger B]; for Hermitian A this equals Tr[A B]
cx trace_adjoint_product(const CMat& A, const CMat& B);

// expectation <x|A|x>
cx quadratic_form(const CMat& A, const cvec& x);

// ---- decompositions -------------------------------------------------------

// exp(A) by scaling-and-squaring with a Taylor series; intended for the
// anti-Hermitian generators used throughout (result unitary to ~1e-13).
CMat expm(const CMat& A);

struct EighResult {
    std::vector<double> values; // ascending
    CMat vectors;               // columns are eigenvectors
};

// Cyclic Jacobi for Hermitian matrices.
EighResult eigh(const CMat& A);

// Largest eigenvalue of a Hermitian PSD matrix by deterministic power
// iteration (fixed start vector).
double power_max_eigenvalue(const CMat& A, int max_iter = 200, double tol = 1e-13);

} // namespace qamp
