#include "qamp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qamp {

using kernels::backend;

CMat CMat::identity(std::size_t n)
{
    CMat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

CMat CMat::diagonal(const std::vector<double>& d)
{
    CMat m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

double norm2(const cvec& v) { return backend().znorm2(v.size(), v.data()); }

cx dotc(const cvec& x, const cvec& y)
{
    if (x.size() != y.size()) throw std::invalid_argument("dotc: size mismatch");
    return backend().zdotc(x.size(), x.data(), y.data());
}

void scale(cvec& v, cx a) { backend().zscale(v.size(), a, v.data()); }

CMat matmul(const CMat& A, const CMat& B)
{
    if (A.cols != B.rows) throw std::invalid_argument("matmul: shape mismatch");
    CMat C(A.rows, B.cols);
    for (std::size_t i = 0; i < A.rows; ++i) {
        cx* ci = C.row(i);
        const cx* ai = A.row(i);
        for (std::size_t k = 0; k < A.cols; ++k) {
            if (ai[k] == cx(0.0)) continue;
            backend().zaxpy(B.cols, ai[k], B.row(k), ci);
        }
    }
    return C;
}

cvec matvec(const CMat& A, const cvec& x)
{
    if (A.cols != x.size()) throw std::invalid_argument("matvec: shape mismatch");
    cvec y(A.rows);
    for (std::size_t i = 0; i < A.rows; ++i)
        y[i] = backend().zdotu(A.cols, A.row(i), x.data());
    return y;
}

cvec matvec_adjoint(const CMat& A, const cvec& x)
{
    if (A.rows != x.size()) throw std::invalid_argument("matvec_adjoint: shape mismatch");
    cvec y(A.cols);
    // y_j = sum_i conj(A_ij) x_i  ==  sum_i x_i * conj(row_i)_j
    for (std::size_t i = 0; i < A.rows; ++i)
        backend().zaxpy_conj(A.cols, x[i], A.row(i), y.data());
    return y;
}

CMat adjoint(const CMat& A)
{
    CMat B(A.cols, A.rows);
    for (std::size_t i = 0; i < A.rows; ++i)
        for (std::size_t j = 0; j < A.cols; ++j) B(j, i) = std::conj(A(i, j));
    return B;
}

CMat add(const CMat& A, const CMat& B)
{
    if (A.rows != B.rows || A.cols != B.cols)
        throw std::invalid_argument("add: shape mismatch");
    CMat C = A;
    backend().zaxpy(C.a.size(), 1.0, B.a.data(), C.a.data());
    return C;
}

CMat sub(const CMat& A, const CMat& B)
{
    if (A.rows != B.rows || A.cols != B.cols)
        throw std::invalid_argument("sub: shape mismatch");
    CMat C = A;
    backend().zaxpy(C.a.size(), -1.0, B.a.data(), C.a.data());
    return C;
}

void axpy(CMat& Y, cx a, const CMat& X)
{
    if (Y.rows != X.rows || Y.cols != X.cols)
        throw std::invalid_argument("axpy: shape mismatch");
    backend().zaxpy(Y.a.size(), a, X.a.data(), Y.a.data());
}

cx trace(const CMat& A)
{
    cx t = 0.0;
    for (std::size_t i = 0; i < std::min(A.rows, A.cols); ++i) t += A(i, i);
    return t;
}

double max_abs(const CMat& A)
{
    double m = 0.0;
    for (const cx& v : A.a) m = std::max(m, std::abs(v));
    return m;
}

double max_abs_diff(const CMat& A, const CMat& B)
{
    if (A.rows != B.rows || A.cols != B.cols)
        throw std::invalid_argument("max_abs_diff: shape mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < A.a.size(); ++i)
        m = std::max(m, std::abs(A.a[i] - B.a[i]));
    return m;
}

cx trace_adjoint_product(const CMat& A, const CMat& B)
{
    if (A.rows != B.rows || A.cols != B.cols)
        throw std::invalid_argument("trace_adjoint_product: shape mismatch");
    return backend().zdotc(A.a.size(), A.a.data(), B.a.data());
}

cx quadratic_form(const CMat& A, const cvec& x)
{
    cvec ax = matvec(A, x);
    return dotc(x, ax);
}

CMat expm(const CMat& A)
{
    if (A.rows != A.cols) throw std::invalid_argument("expm: square matrix required");
    const std::size_t n = A.rows;

    // 1-norm drives the scaling step count
    double norm1 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += std::abs(A(i, j));
        norm1 = std::max(norm1, s);
    }
    int squarings = 0;
    double scale_factor = 1.0;
    if (norm1 > 0.5) {
        squarings = int(std::ceil(std::log2(norm1 / 0.5)));
        scale_factor = std::ldexp(1.0, -squarings);
    }

    CMat X = A;
    backend().zscale(X.a.size(), scale_factor, X.a.data());

    CMat result = CMat::identity(n);
    CMat term = CMat::identity(n);
    for (int k = 1; k <= 64; ++k) {
        term = matmul(term, X);
        backend().zscale(term.a.size(), 1.0 / k, term.a.data());
        axpy(result, 1.0, term);
        if (max_abs(term) < 1e-18 * std::max(1.0, max_abs(result))) break;
    }
    for (int s = 0; s < squarings; ++s) result = matmul(result, result);
    return result;
}

EighResult eigh(const CMat& A)
{
    if (A.rows != A.cols) throw std::invalid_argument("eigh: square matrix required");
    const std::size_t n = A.rows;
    CMat M = A;
    CMat V = CMat::identity(n);

    auto off_norm = [&]() {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) s += std::norm(M(i, j));
        return std::sqrt(s);
    };

    const double scale_ref = std::max(max_abs(M), 1e-300);
    for (int sweep = 0; sweep < 100; ++sweep) {
        if (off_norm() < 1e-14 * scale_ref * double(n)) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double r = std::abs(M(p, q));
                if (r < 1e-300) continue;
                const cx phase = M(p, q) / r;
                const double app = M(p, p).real();
                const double aqq = M(q, q).real();
                // rotation angle zeroing the (p,q) element
                const double tau = (aqq - app) / (2.0 * r);
                const double t = (tau >= 0.0 ? 1.0 : -1.0)
                               / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const cx sp = s * phase;

                // columns of M and V: [p q] <- [p q] * [[c, sp],[-conj(sp), c]]
                for (std::size_t i = 0; i < n; ++i) {
                    const cx mip = M(i, p), miq = M(i, q);
                    M(i, p) = c * mip - std::conj(sp) * miq;
                    M(i, q) = sp * mip + c * miq;
                }
                // rows (adjoint rotation from the left)
                for (std::size_t j = 0; j < n; ++j) {
                    const cx mpj = M(p, j), mqj = M(q, j);
                    M(p, j) = c * mpj - sp * mqj;
                    M(q, j) = std::conj(sp) * mpj + c * mqj;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const cx vip = V(i, p), viq = V(i, q);
                    V(i, p) = c * vip - std::conj(sp) * viq;
                    V(i, q) = sp * vip + c * viq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) diag[i] = M(i, i).real();
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return diag[i] < diag[j]; });

    EighResult out;
    out.values.resize(n);
    out.vectors = CMat(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = diag[order[k]];
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = V(i, order[k]);
    }
    return out;
}

double power_max_eigenvalue(const CMat& A, int max_iter, double tol)
{
    if (A.rows != A.cols) throw std::invalid_argument("power iteration: square required");
    const std::size_t n = A.rows;
    cvec v(n, cx(1.0 / std::sqrt(double(n)), 0.0));
    double lambda = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        cvec w = matvec(A, v);
        double nw = std::sqrt(norm2(w));
        if (nw == 0.0) return 0.0;
        scale(w, 1.0 / nw);
        double next = dotc(w, matvec(A, w)).real();
        v = std::move(w);
        if (std::abs(next - lambda) < tol * std::max(1.0, std::abs(next))) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    return lambda;
}

} // namespace qamp
