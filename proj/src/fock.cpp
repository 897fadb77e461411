#include "qamp/fock.hpp"

#include <algorithm>
#include <cmath>

namespace qamp {

namespace {

bool finite(cx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

std::size_t flat(int ia, int ib, int nb) { return std::size_t(ia) * (nb + 1) + ib; }

} // namespace

// ---- FockVector ----------------------------------------------------------

void FockVector::normalize()
{
    double n2 = norm_sq();
    if (n2 <= 0.0) throw std::runtime_error("normalize: zero-norm state");
    kernels::backend().zscale(amp.size(), 1.0 / std::sqrt(n2), amp.data());
}

double FockVector::mean_photon() const
{
    double num = 0.0, den = 0.0;
    for (std::size_t n = 0; n < amp.size(); ++n) {
        double p = std::norm(amp[n]);
        num += double(n) * p;
        den += p;
    }
    if (den <= 0.0) throw std::runtime_error("mean_photon: zero-norm state");
    return num / den;
}

std::vector<double> FockVector::probabilities() const
{
    std::vector<double> p(amp.size());
    for (std::size_t n = 0; n < amp.size(); ++n) p[n] = std::norm(amp[n]);
    return p;
}

// ---- DensityOperator -----------------------------------------------------

DensityOperator DensityOperator::pure(const FockVector& psi)
{
    const std::size_t d = psi.amp.size();
    DensityOperator rho(int(d) - 1);
    for (std::size_t i = 0; i < d; ++i)
        kernels::backend().zaxpy_conj(d, psi.amp[i], psi.amp.data(), rho.mat.row(i));
    return rho;
}

void DensityOperator::normalize()
{
    double t = trace();
    if (t <= 0.0) throw std::runtime_error("normalize: zero-trace density operator");
    kernels::backend().zscale(mat.a.size(), 1.0 / t, mat.a.data());
}

double DensityOperator::hermiticity_error() const
{
    double m = 0.0;
    for (std::size_t i = 0; i < mat.rows; ++i)
        for (std::size_t j = i; j < mat.cols; ++j)
            m = std::max(m, std::abs(mat(i, j) - std::conj(mat(j, i))));
    return m;
}

double DensityOperator::mean_photon() const
{
    double s = 0.0;
    for (std::size_t n = 0; n < mat.rows; ++n) s += double(n) * mat(n, n).real();
    return s;
}

cx DensityOperator::mean_annihilation() const
{
    // Tr[rho a] = sum_n sqrt(n+1) rho_{n+1,n}
    cx s = 0.0;
    for (std::size_t n = 0; n + 1 < mat.rows; ++n)
        s += std::sqrt(double(n + 1)) * mat(n + 1, n);
    return s;
}

cx DensityOperator::mean_annihilation_sq() const
{
    // Tr[rho a a] = sum_n sqrt((n+1)(n+2)) rho_{n+2,n}
    cx s = 0.0;
    for (std::size_t n = 0; n + 2 < mat.rows; ++n)
        s += std::sqrt(double((n + 1) * (n + 2))) * mat(n + 2, n);
    return s;
}

double DensityOperator::min_eigenvalue() const
{
    return eigh(mat).values.front();
}

void TwoModeState::normalize()
{
    double n2 = norm_sq();
    if (n2 <= 0.0) throw std::runtime_error("normalize: zero-norm state");
    kernels::backend().zscale(amp.a.size(), 1.0 / std::sqrt(n2), amp.a.data());
}

void TwoModeDensity::normalize()
{
    double t = trace();
    if (t <= 0.0) throw std::runtime_error("normalize: zero-trace density operator");
    kernels::backend().zscale(mat.a.size(), 1.0 / t, mat.a.data());
}

// ---- construction ----------------------------------------------------------

FockVector coherent_state(cx alpha, int cutoff)
{
    if (cutoff < 0) throw cutoff_error("coherent_state: cutoff must be >= 0");
    if (!finite(alpha)) throw std::invalid_argument("coherent_state: non-finite alpha");

    FockVector psi(cutoff);
    const double mu = std::norm(alpha);
    // c_n = e^{-mu/2} alpha^n / sqrt(n!) built multiplicatively
    cx c = std::exp(-0.5 * mu);
    psi.amp[0] = c;
    for (int n = 1; n <= cutoff; ++n) {
        c *= alpha / std::sqrt(double(n));
        psi.amp[n] = c;
    }
    psi.leakage = std::max(0.0, 1.0 - psi.norm_sq());
    return psi;
}

FockVector fock_state(int n, int cutoff)
{
    if (n < 0 || n > cutoff) throw cutoff_error("fock_state: level outside cutoff");
    FockVector psi(cutoff);
    psi.amp[n] = 1.0;
    return psi;
}

std::pair<ModeOperator, ModeOperator> ladder_operators(int cutoff)
{
    if (cutoff < 1) throw cutoff_error("ladder_operators: cutoff must be >= 1");
    const std::size_t d = std::size_t(cutoff) + 1;
    CMat a(d, d), ad(d, d);
    for (int n = 1; n <= cutoff; ++n) {
        a(n - 1, n) = std::sqrt(double(n));
        ad(n, n - 1) = std::sqrt(double(n));
    }
    return {ModeOperator(std::move(a)), ModeOperator(std::move(ad))};
}

ModeOperator number_operator(int cutoff)
{
    const std::size_t d = std::size_t(cutoff) + 1;
    CMat n(d, d);
    for (std::size_t i = 0; i < d; ++i) n(i, i) = double(i);
    return ModeOperator(std::move(n));
}

ModeOperator displacement_operator(cx alpha, int cutoff)
{
    const double aa = std::abs(alpha);
    if (aa * aa + 6.0 * aa + 6.0 > double(cutoff))
        throw cutoff_error("displacement_operator: cutoff too small for |alpha|");

    constexpr int pad = 8;
    const int big = cutoff + pad;
    const std::size_t d = std::size_t(big) + 1;
    CMat gen(d, d); // alpha a^+ - alpha^* a
    for (int n = 1; n <= big; ++n) {
        gen(n, n - 1) = alpha * std::sqrt(double(n));
        gen(n - 1, n) = -std::conj(alpha) * std::sqrt(double(n));
    }
    CMat full = expm(gen);
    CMat out(static_cast<std::size_t>(cutoff) + 1, static_cast<std::size_t>(cutoff) + 1);
    for (int i = 0; i <= cutoff; ++i)
        for (int j = 0; j <= cutoff; ++j) out(i, j) = full(i, j);
    return ModeOperator(std::move(out));
}

ModeOperator displacement_columns(cx alpha, int cutoff)
{
    const std::size_t d = std::size_t(cutoff) + 1;
    CMat D(d, d);
    const double mu = std::norm(alpha);
    cx c = std::exp(-0.5 * mu);
    D(0, 0) = c;
    for (int m = 1; m <= cutoff; ++m)
        D(m, 0) = D(m - 1, 0) * alpha / std::sqrt(double(m));
    const cx ac = std::conj(alpha);
    for (int n = 0; n < cutoff; ++n) {
        const double rn = 1.0 / std::sqrt(double(n + 1));
        D(0, n + 1) = -ac * D(0, n) * rn;
        for (int m = 1; m <= cutoff; ++m)
            D(m, n + 1) = (std::sqrt(double(m)) * D(m - 1, n) - ac * D(m, n)) * rn;
    }
    return ModeOperator(std::move(D));
}

std::pair<ModeOperator, ModeOperator> quadrature_operators(double theta, int cutoff)
{
    const std::size_t d = std::size_t(cutoff) + 1;
    const cx em = std::exp(cx(0.0, -theta)) / std::sqrt(2.0);
    const cx ep = std::exp(cx(0.0, theta)) / std::sqrt(2.0);
    CMat x(d, d), p(d, d);
    for (int n = 1; n <= cutoff; ++n) {
        const double s = std::sqrt(double(n));
        x(n - 1, n) = em * s;           // a term
        x(n, n - 1) = ep * s;           // a^+ term
        p(n - 1, n) = cx(0, -1) * em * s;
        p(n, n - 1) = cx(0, 1) * ep * s;
    }
    return {ModeOperator(std::move(x)), ModeOperator(std::move(p))};
}

TwoModeOperator beam_splitter(double transmittance, int na, int nb)
{
    if (!(transmittance > 0.0) || transmittance > 1.0)
        throw std::invalid_argument("beam_splitter: transmittance outside (0,1]");

    const double t = std::sqrt(transmittance);
    const double r = std::sqrt(std::max(0.0, 1.0 - transmittance));
    const double theta = std::atan2(r, t);

    TwoModeOperator u;
    u.na = na;
    u.nb = nb;
    const std::size_t dim = std::size_t(na + 1) * (nb + 1);
    u.mat = CMat(dim, dim);

    // generator a b^+ - a^+ b conserves total photon number; exponentiate each
    // total-n block so the assembled operator is unitary and block-diagonal
    // with structural zeros elsewhere
    for (int n = 0; n <= na + nb; ++n) {
        const int kmin = std::max(0, n - nb);
        const int kmax = std::min(n, na);
        const int bs = kmax - kmin + 1;
        if (bs <= 0) continue;
        CMat gen(static_cast<std::size_t>(bs), static_cast<std::size_t>(bs));
        for (int k = kmin; k <= kmax; ++k) {
            // a b^+ : |k, n-k> -> sqrt(k (n-k+1)) |k-1, n-k+1>
            if (k - 1 >= kmin)
                gen(k - 1 - kmin, k - kmin) += std::sqrt(double(k) * (n - k + 1));
            // -a^+ b : |k, n-k> -> -sqrt((k+1)(n-k)) |k+1, n-k-1>
            if (k + 1 <= kmax)
                gen(k + 1 - kmin, k - kmin) -= std::sqrt(double(k + 1) * (n - k));
        }
        kernels::backend().zscale(gen.a.size(), theta, gen.a.data());
        CMat blk = expm(gen);
        for (int k = kmin; k <= kmax; ++k)
            for (int k2 = kmin; k2 <= kmax; ++k2)
                u.mat(flat(k, n - k, nb), flat(k2, n - k2, nb)) =
                    blk(k - kmin, k2 - kmin);
    }
    return u;
}

TwoModeOperator two_mode_squeezer(double r, int na, int nb)
{
    if (r < 0.0) throw std::invalid_argument("two_mode_squeezer: r must be >= 0");
    const double lambda = std::tanh(r);
    if (r > 0.0 && std::pow(lambda, std::min(na, nb)) >= 1e-8)
        throw cutoff_error("two_mode_squeezer: cutoffs too small for this r");

    TwoModeOperator u;
    u.na = na;
    u.nb = nb;
    const std::size_t dim = std::size_t(na + 1) * (nb + 1);
    u.mat = CMat(dim, dim);

    // generator a^+ b^+ - a b conserves n_a - n_b; exponentiate per block
    for (int d = -nb; d <= na; ++d) {
        const int jmax = std::min(na - std::max(d, 0), nb + std::min(d, 0));
        if (jmax < 0) continue;
        const int bs = jmax + 1; // states |j + max(d,0), j - min(d,0)>, j = 0..jmax
        const int ia0 = std::max(d, 0);
        const int ib0 = -std::min(d, 0);
        CMat gen(static_cast<std::size_t>(bs), static_cast<std::size_t>(bs));
        for (int j = 0; j <= jmax; ++j) {
            const int ia = ia0 + j, ib = ib0 + j;
            if (j + 1 <= jmax)
                gen(j + 1, j) += std::sqrt(double(ia + 1) * (ib + 1)); // a^+ b^+
            if (j - 1 >= 0)
                gen(j - 1, j) -= std::sqrt(double(ia) * ib); // -a b
        }
        kernels::backend().zscale(gen.a.size(), r, gen.a.data());
        CMat blk = expm(gen);
        for (int j = 0; j <= jmax; ++j)
            for (int j2 = 0; j2 <= jmax; ++j2)
                u.mat(flat(ia0 + j, ib0 + j, nb), flat(ia0 + j2, ib0 + j2, nb)) =
                    blk(std::size_t(j), std::size_t(j2));
    }
    return u;
}

// ---- composition / reduction ------------------------------------------------

TwoModeState tensor(const FockVector& a, const FockVector& b)
{
    TwoModeState s(a.cutoff(), b.cutoff());
    for (std::size_t i = 0; i < a.amp.size(); ++i)
        for (std::size_t j = 0; j < b.amp.size(); ++j)
            s.amp(i, j) = a.amp[i] * b.amp[j];
    return s;
}

TwoModeDensity tensor(const DensityOperator& a, const DensityOperator& b)
{
    TwoModeDensity rho;
    rho.na = a.cutoff();
    rho.nb = b.cutoff();
    const int da = rho.na + 1, db = rho.nb + 1;
    rho.mat = CMat(std::size_t(da) * db, std::size_t(da) * db);
    for (int i = 0; i < da; ++i)
        for (int i2 = 0; i2 < da; ++i2)
            for (int j = 0; j < db; ++j)
                for (int j2 = 0; j2 < db; ++j2)
                    rho.mat(flat(i, j, rho.nb), flat(i2, j2, rho.nb)) =
                        a.mat(i, i2) * b.mat(j, j2);
    return rho;
}

FockVector apply(const ModeOperator& op, const FockVector& psi)
{
    if (op.mat.cols != psi.amp.size())
        throw dimension_error("apply: operator/state cutoff mismatch");
    FockVector out;
    out.amp = matvec(op.mat, psi.amp);
    out.leakage = psi.leakage;
    return out;
}

DensityOperator conjugate_apply(const ModeOperator& op, const DensityOperator& rho)
{
    if (op.mat.cols != rho.mat.rows)
        throw dimension_error("conjugate_apply: cutoff mismatch");
    CMat tmp = matmul(op.mat, rho.mat);
    return DensityOperator(matmul(tmp, adjoint(op.mat)));
}

TwoModeState apply(const TwoModeOperator& u, const TwoModeState& psi)
{
    if (psi.cutoff_a() != u.na || psi.cutoff_b() != u.nb)
        throw dimension_error("apply: two-mode cutoff mismatch");
    TwoModeState out(u.na, u.nb);
    out.amp.a = matvec(u.mat, psi.amp.a);
    // matvec sees the flattened amplitudes; reshape is implicit
    out.amp.rows = psi.amp.rows;
    out.amp.cols = psi.amp.cols;
    return out;
}

TwoModeDensity conjugate_apply(const TwoModeOperator& u, const TwoModeDensity& rho)
{
    if (rho.na != u.na || rho.nb != u.nb)
        throw dimension_error("conjugate_apply: two-mode cutoff mismatch");
    TwoModeDensity out;
    out.na = rho.na;
    out.nb = rho.nb;
    out.mat = matmul(matmul(u.mat, rho.mat), adjoint(u.mat));
    return out;
}

DensityOperator partial_trace(const TwoModeState& psi, Mode traced)
{
    const int da = psi.cutoff_a() + 1, db = psi.cutoff_b() + 1;
    if (traced == Mode::B) {
        DensityOperator rho(psi.cutoff_a());
        for (int i = 0; i < da; ++i)
            for (int i2 = 0; i2 < da; ++i2)
                rho.mat(i, i2) = kernels::backend().zdotc(std::size_t(db),
                                                          psi.amp.row(i2), psi.amp.row(i));
        return rho;
    }
    DensityOperator rho(psi.cutoff_b());
    for (int j = 0; j < db; ++j)
        for (int j2 = 0; j2 < db; ++j2) {
            cx s = 0.0;
            for (int i = 0; i < da; ++i) s += psi.amp(i, j) * std::conj(psi.amp(i, j2));
            rho.mat(j, j2) = s;
        }
    return rho;
}

DensityOperator partial_trace(const TwoModeDensity& rho, Mode traced)
{
    const int da = rho.na + 1, db = rho.nb + 1;
    if (traced == Mode::B) {
        DensityOperator out(rho.na);
        for (int i = 0; i < da; ++i)
            for (int i2 = 0; i2 < da; ++i2) {
                cx s = 0.0;
                for (int j = 0; j < db; ++j)
                    s += rho.mat(flat(i, j, rho.nb), flat(i2, j, rho.nb));
                out.mat(i, i2) = s;
            }
        return out;
    }
    DensityOperator out(rho.nb);
    for (int j = 0; j < db; ++j)
        for (int j2 = 0; j2 < db; ++j2) {
            cx s = 0.0;
            for (int i = 0; i < da; ++i)
                s += rho.mat(flat(i, j, rho.nb), flat(i, j2, rho.nb));
            out.mat(j, j2) = s;
        }
    return out;
}

Projection project_mode(const TwoModeState& psi, Mode measured, const FockVector& ket)
{
    const int da = psi.cutoff_a() + 1, db = psi.cutoff_b() + 1;
    Projection pr;
    if (measured == Mode::B) {
        if (int(ket.amp.size()) != db)
            throw dimension_error("project_mode: projector cutoff mismatch");
        pr.branch = FockVector(psi.cutoff_a());
        for (int i = 0; i < da; ++i)
            pr.branch.amp[i] = kernels::backend().zdotc(std::size_t(db),
                                                        ket.amp.data(), psi.amp.row(i));
    } else {
        if (int(ket.amp.size()) != da)
            throw dimension_error("project_mode: projector cutoff mismatch");
        pr.branch = FockVector(psi.cutoff_b());
        for (int j = 0; j < db; ++j) {
            cx s = 0.0;
            for (int i = 0; i < da; ++i) s += std::conj(ket.amp[i]) * psi.amp(i, j);
            pr.branch.amp[j] = s;
        }
    }
    pr.probability = pr.branch.norm_sq();
    return pr;
}

Conditional condition_on_diag_povm(const TwoModeDensity& rho, Mode measured,
                                   const std::vector<double>& weights)
{
    const int da = rho.na + 1, db = rho.nb + 1;
    Conditional c;
    if (measured == Mode::B) {
        if (int(weights.size()) != db)
            throw dimension_error("condition_on_diag_povm: weight count mismatch");
        c.state = DensityOperator(rho.na);
        for (int i = 0; i < da; ++i)
            for (int i2 = 0; i2 < da; ++i2) {
                cx s = 0.0;
                for (int j = 0; j < db; ++j)
                    s += weights[j] * rho.mat(flat(i, j, rho.nb), flat(i2, j, rho.nb));
                c.state.mat(i, i2) = s;
            }
    } else {
        if (int(weights.size()) != da)
            throw dimension_error("condition_on_diag_povm: weight count mismatch");
        c.state = DensityOperator(rho.nb);
        for (int j = 0; j < db; ++j)
            for (int j2 = 0; j2 < db; ++j2) {
                cx s = 0.0;
                for (int i = 0; i < da; ++i)
                    s += weights[i] * rho.mat(flat(i, j, rho.nb), flat(i, j2, rho.nb));
                c.state.mat(j, j2) = s;
            }
    }
    c.probability = c.state.trace();
    if (c.probability <= 0.0)
        throw zero_probability_error("condition_on_diag_povm: zero-probability outcome");
    c.state.normalize();
    return c;
}

Conditional condition_on_diag_povm(const TwoModeState& psi, Mode measured,
                                   const std::vector<double>& weights)
{
    const int da = psi.cutoff_a() + 1, db = psi.cutoff_b() + 1;
    Conditional c;
    if (measured == Mode::B) {
        if (int(weights.size()) != db)
            throw dimension_error("condition_on_diag_povm: weight count mismatch");
        c.state = DensityOperator(psi.cutoff_a());
        // mixture of the per-outcome pure branches psi(:, j)
        cvec col(static_cast<std::size_t>(da));
        for (int j = 0; j < db; ++j) {
            if (weights[j] == 0.0) continue;
            for (int i = 0; i < da; ++i) col[i] = psi.amp(i, j);
            for (int i = 0; i < da; ++i)
                kernels::backend().zaxpy_conj(std::size_t(da), weights[j] * col[i],
                                              col.data(), c.state.mat.row(i));
        }
    } else {
        if (int(weights.size()) != da)
            throw dimension_error("condition_on_diag_povm: weight count mismatch");
        c.state = DensityOperator(psi.cutoff_b());
        for (int i = 0; i < da; ++i) {
            if (weights[i] == 0.0) continue;
            const cx* row = psi.amp.row(i);
            for (int j = 0; j < db; ++j)
                kernels::backend().zaxpy_conj(std::size_t(db), weights[i] * row[j],
                                              row, c.state.mat.row(j));
        }
    }
    c.probability = c.state.trace();
    if (c.probability <= 0.0)
        throw zero_probability_error("condition_on_diag_povm: zero-probability outcome");
    c.state.normalize();
    return c;
}

// ---- measures ----------------------------------------------------------------

double fidelity(const DensityOperator& rho, const FockVector& psi)
{
    if (rho.mat.rows != psi.amp.size())
        throw dimension_error("fidelity: cutoff mismatch");
    return quadratic_form(rho.mat, psi.amp).real();
}

double fidelity(const FockVector& a, const FockVector& b)
{
    if (a.amp.size() != b.amp.size()) throw dimension_error("fidelity: cutoff mismatch");
    return std::norm(dotc(a.amp, b.amp));
}

double uhlmann_fidelity(const DensityOperator& rho, const DensityOperator& sigma)
{
    if (rho.mat.rows != sigma.mat.rows)
        throw dimension_error("uhlmann_fidelity: cutoff mismatch");
    EighResult er = eigh(rho.mat);
    const std::size_t n = rho.mat.rows;
    // sqrt(rho) from the spectral decomposition, clamping tiny negatives
    CMat sq(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const double lk = std::sqrt(std::max(0.0, er.values[k]));
        if (lk == 0.0) continue;
        for (std::size_t i = 0; i < n; ++i) {
            const cx vik = er.vectors(i, k);
            for (std::size_t j = 0; j < n; ++j)
                sq(i, j) += lk * vik * std::conj(er.vectors(j, k));
        }
    }
    CMat inner = matmul(matmul(sq, sigma.mat), sq);
    EighResult ei = eigh(inner);
    double s = 0.0;
    for (double v : ei.values) s += std::sqrt(std::max(0.0, v));
    return s * s;
}

double purity(const DensityOperator& rho)
{
    // Tr[rho^2] = sum |rho_ij|^2 for Hermitian rho
    return kernels::backend().znorm2(rho.mat.a.size(), rho.mat.a.data());
}

QuadMoments quadrature_moments(const DensityOperator& rho, double theta)
{
    // <x> = sqrt(2) Re a1,  Vx = 1/2 + <n> + Re a2 - <x>^2,
    // <p> = sqrt(2) Im a1,  Vp = 1/2 + <n> - Re a2 - <p>^2,
    // cov = Im a2 - <x><p>, with a1 = <a> e^{-i th}, a2 = <a^2> e^{-2 i th}
    const cx a1 = rho.mean_annihilation() * std::exp(cx(0, -theta));
    const cx a2 = rho.mean_annihilation_sq() * std::exp(cx(0, -2.0 * theta));
    const double nbar = rho.mean_photon();

    QuadMoments m;
    m.mean_x = std::sqrt(2.0) * a1.real();
    m.mean_p = std::sqrt(2.0) * a1.imag();
    m.v_x = 0.5 + nbar + a2.real() - m.mean_x * m.mean_x;
    m.v_p = 0.5 + nbar - a2.real() - m.mean_p * m.mean_p;
    m.cov = a2.imag() - m.mean_x * m.mean_p;
    return m;
}

FockVector displace_state(const FockVector& psi, cx alpha)
{
    ModeOperator d = displacement_operator(alpha, psi.cutoff());
    const double before = psi.norm_sq();
    FockVector out = apply(d, psi);
    out.leakage = psi.leakage + std::max(0.0, before - out.norm_sq());
    return out;
}

FockVector embed(const FockVector& psi, int cutoff)
{
    FockVector out(cutoff);
    const std::size_t keep = std::min(psi.amp.size(), out.amp.size());
    std::copy_n(psi.amp.begin(), keep, out.amp.begin());
    out.leakage = psi.leakage;
    if (keep < psi.amp.size()) {
        double clipped = 0.0;
        for (std::size_t n = keep; n < psi.amp.size(); ++n) clipped += std::norm(psi.amp[n]);
        out.leakage += clipped;
    }
    return out;
}

DensityOperator embed(const DensityOperator& rho, int cutoff)
{
    DensityOperator out(cutoff);
    const std::size_t keep = std::min(rho.mat.rows, out.mat.rows);
    for (std::size_t i = 0; i < keep; ++i)
        for (std::size_t j = 0; j < keep; ++j) out.mat(i, j) = rho.mat(i, j);
    return out;
}

int default_cutoff(cx alpha, int m)
{
    const double aa = std::abs(alpha);
    return int(std::ceil(aa * aa + 6.0 * aa + 10.0)) + 2 * m;
}

} // namespace qamp
