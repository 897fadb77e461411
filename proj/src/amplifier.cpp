#include "qamp/amplifier.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace qamp {

namespace {

// ascending-coefficient Horner evaluation in mu = |alpha|^2
double horner(std::initializer_list<double> coeffs, double mu)
{
    double acc = 0.0;
    const double* c = coeffs.begin();
    for (std::size_t k = coeffs.size(); k-- > 0;) acc = acc * mu + c[k];
    return acc;
}

double m1_norm(double mu) { return horner({1, 3, 1}, mu); }
double m2_norm(double mu) { return horner({4, 32, 38, 12, 1}, mu); }
double m2p_norm(double mu) { return horner({1, 8, 16, 8, 1}, mu); }

void require_closed_form(const AmplifierSpec& spec)
{
    if (spec.variant == AmplifierVariant::AddThenSubtract && spec.order > 2)
        throw std::invalid_argument("closed forms exist for orders 1 and 2 only");
    if (spec.order < 1) throw std::invalid_argument("amplifier order must be >= 1");
}

// diagonal of the amplifying operator on the number basis
std::vector<double> operator_diagonal(const AmplifierSpec& spec, int cutoff)
{
    std::vector<double> d(static_cast<std::size_t>(cutoff) + 1);
    for (int n = 0; n <= cutoff; ++n) {
        if (spec.variant == AmplifierVariant::Multiplexed) {
            d[n] = double(n) * n + n + 1;
        } else {
            double v = 1.0;
            for (int j = 1; j <= spec.order; ++j) v *= double(n + j);
            d[n] = v;
        }
    }
    return d;
}

FockVector normalized_coherent(cx alpha, int cutoff)
{
    FockVector psi = coherent_state(alpha, cutoff);
    psi.normalize();
    return psi;
}

// golden-section minimization after bracketing on a coarse grid
Extremum golden_minimize(const std::function<double(double)>& f, double lo, double hi)
{
    const int grid = 81;
    double best_x = lo, best_v = f(lo);
    for (int i = 1; i < grid; ++i) {
        const double x = lo + (hi - lo) * i / (grid - 1);
        const double v = f(x);
        if (v < best_v) { best_v = v; best_x = x; }
    }
    const double step = (hi - lo) / (grid - 1);
    double a = std::max(lo, best_x - step), b = std::min(hi, best_x + step);
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > 1e-6) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    const double x = (a + b) / 2;
    return {x, f(x)};
}

} // namespace

AmplifiedState amplified_state(const AmplifierSpec& spec, int cutoff)
{
    if (spec.order < 1) throw std::invalid_argument("amplifier order must be >= 1");
    FockVector input = normalized_coherent(spec.alpha, cutoff);

    FockVector raw;
    if (spec.variant == AmplifierVariant::Multiplexed) {
        // diagonal n^2+n+1; the brute-force contraction behind this identity
        // lives in multiplexed_operator()
        raw = input;
        for (int n = 0; n <= cutoff; ++n)
            raw.amp[n] *= double(n) * n + n + 1;
    } else {
        auto [a, ad] = ladder_operators(cutoff);
        FockVector cur = input;
        for (int j = 0; j < spec.order; ++j) cur = apply(ad, cur);
        for (int j = 0; j < spec.order; ++j) cur = apply(a, cur);
        raw = std::move(cur);
    }

    AmplifiedState out;
    out.normalization = raw.norm_sq();
    raw.normalize();
    out.state = std::move(raw);
    return out;
}

GainResult gain_closed_form(const AmplifierSpec& spec)
{
    require_closed_form(spec);
    const double mu = std::norm(spec.alpha);
    GainResult g;
    if (spec.variant == AmplifierVariant::Multiplexed) {
        g.value = 1.0 + 2.0 * horner({1, 5, 5, 1}, mu) / m2p_norm(mu);
    } else if (spec.order == 1) {
        g.value = 1.0 + (1.0 + mu) / m1_norm(mu);
    } else {
        g.value = 1.0 + 2.0 * horner({2, 6, 1}, mu) * (mu + 2.0) / m2_norm(mu);
    }
    g.zero_amplitude_limit = (mu == 0.0);
    return g;
}

GainResult gain_numeric(const AmplifierSpec& spec, int cutoff)
{
    GainResult g;
    if (spec.alpha == cx(0.0)) {
        // amplitude ratio is 0/0 at the origin; report the analytic limit
        const auto diag = operator_diagonal(spec, 1);
        g.value = diag[1] / diag[0];
        g.zero_amplitude_limit = true;
        return g;
    }
    AmplifiedState amp = amplified_state(spec, cutoff);
    const cvec& c = amp.state.amp;
    cx num = 0.0;
    for (int n = 0; n + 1 <= cutoff; ++n)
        num += std::conj(c[n]) * std::sqrt(double(n + 1)) * c[n + 1];
    const cx ratio = num / spec.alpha;
    g.value = ratio.real();
    return g;
}

QuadratureVariances variances_closed_form(const AmplifierSpec& spec)
{
    require_closed_form(spec);
    const double mu = std::norm(spec.alpha);
    QuadratureVariances v;
    if (spec.variant == AmplifierVariant::Multiplexed) {
        const double den = m2p_norm(mu);
        v.v_x = 0.5 - 2.0 * mu * horner({1, 8, 25, 32, 25, 8, 1}, mu) / (den * den);
        v.v_p = 0.5 + 2.0 * mu * horner({1, 4, 1}, mu) / den;
    } else if (spec.order == 1) {
        const double den = m1_norm(mu);
        v.v_x = 0.5 - mu * horner({1, 1, 1}, mu) / (den * den);
        v.v_p = 0.5 + mu / den;
    } else {
        const double den = m2_norm(mu);
        v.v_x = 0.5 - 2.0 * mu * horner({24, 72, 200, 180, 76, 14, 1}, mu) / (den * den);
        v.v_p = 0.5 + 2.0 * mu * horner({6, 6, 1}, mu) / den;
    }
    return v;
}

QuadratureVariances variances_numeric(const AmplifierSpec& spec, int cutoff)
{
    AmplifiedState amp = amplified_state(spec, cutoff);
    const double theta = (spec.alpha == cx(0.0)) ? 0.0 : std::arg(spec.alpha);
    auto [x, p] = quadrature_operators(theta, cutoff);

    auto variance = [&](const ModeOperator& op) {
        const cvec ov = matvec(op.mat, amp.state.amp);
        const double mean = dotc(amp.state.amp, ov).real();
        const double second = norm2(ov); // <psi|op^2|psi> for Hermitian op
        return second - mean * mean;
    };
    return {variance(x), variance(p)};
}

double deterministic_bound(double gain)
{
    if (gain < 1.0) throw std::invalid_argument("deterministic_bound: gain must be >= 1");
    return gain * gain - 0.5;
}

std::vector<double> displaced_photon_distribution(const AmplifierSpec& spec, int cutoff)
{
    AmplifiedState amp = amplified_state(spec, cutoff);
    FockVector displaced = displace_state(amp.state, -spec.alpha);
    return displaced.probabilities();
}

double coherent_fidelity(const AmplifierSpec& spec, int cutoff)
{
    const double g = (spec.variant == AmplifierVariant::Multiplexed || spec.order <= 2)
                         ? gain_closed_form(spec).value
                         : gain_numeric(spec, cutoff).value;
    AmplifiedState amp = amplified_state(spec, cutoff);
    FockVector target = normalized_coherent(g * spec.alpha, cutoff);
    return fidelity(target, amp.state);
}

double normalization_closed_form(const AmplifierSpec& spec)
{
    require_closed_form(spec);
    const double mu = std::norm(spec.alpha);
    if (spec.variant == AmplifierVariant::Multiplexed) return m2p_norm(mu);
    return spec.order == 1 ? m1_norm(mu) : m2_norm(mu);
}

ModeOperator multiplexed_operator(int cutoff)
{
    if (cutoff < 0) throw cutoff_error("multiplexed_operator: cutoff must be >= 0");
    const int n2 = cutoff + 2; // two-mode cutoffs >= single-mode cutoff + 2
    TwoModeOperator u = beam_splitter(0.5, n2, n2);

    const std::size_t dim = std::size_t(n2 + 1) * (n2 + 1);
    CMat mid(dim, dim);
    for (int ia = 0; ia <= n2; ++ia)
        for (int ib = 0; ib <= n2; ++ib) {
            const std::size_t idx = std::size_t(ia) * (n2 + 1) + ib;
            mid(idx, idx) = double(2 * ia + 1) * (2 * ib + 1);
        }
    CMat contracted = matmul(adjoint(u.mat), matmul(mid, u.mat));

    CMat out(static_cast<std::size_t>(cutoff) + 1, static_cast<std::size_t>(cutoff) + 1);
    double worst = 0.0;
    for (int m = 0; m <= cutoff; ++m)
        for (int n = 0; n <= cutoff; ++n) {
            const cx v = contracted(std::size_t(m) * (n2 + 1), std::size_t(n) * (n2 + 1));
            out(m, n) = v;
            const double expected = (m == n) ? double(n) * n + n + 1 : 0.0;
            worst = std::max(worst, std::abs(v - expected));
        }
    if (worst > 1e-9)
        throw std::logic_error("multiplexed_operator: contraction deviates from n^2+n+1");
    return ModeOperator(std::move(out));
}

ModeOperator ladder_anticommutator(int cutoff)
{
    auto [a, ad] = ladder_operators(cutoff);
    CMat op = add(matmul(a.mat, ad.mat), matmul(ad.mat, a.mat));
    for (int n = 0; n < cutoff; ++n) {
        if (std::abs(op(n, n) - cx(2.0 * n + 1.0)) > 1e-12)
            throw std::logic_error("ladder_anticommutator: diagonal deviates from 2n+1");
    }
    return ModeOperator(std::move(op));
}

double mutual_fidelity_closed_form(double alpha_abs)
{
    const double mu = alpha_abs * alpha_abs;
    const double num = horner({2, 16, 25, 10, 1}, mu);
    return num * num / (m2p_norm(mu) * m2_norm(mu));
}

double mutual_fidelity_numeric(cx alpha, int cutoff)
{
    AmplifierSpec seq{2, AmplifierVariant::AddThenSubtract, alpha};
    AmplifierSpec mux{2, AmplifierVariant::Multiplexed, alpha};
    FockVector a = amplified_state(seq, cutoff).state;
    FockVector b = amplified_state(mux, cutoff).state;
    return fidelity(a, b);
}

AmplifierReport amplifier_report(const AmplifierSpec& spec, int cutoff)
{
    if (cutoff < 0) cutoff = default_cutoff(spec.alpha, std::max(spec.order, 2));
    AmplifierReport rep;
    const bool closed = spec.variant == AmplifierVariant::Multiplexed || spec.order <= 2;
    GainResult g = closed ? gain_closed_form(spec) : gain_numeric(spec, cutoff);
    rep.gain = g.value;
    rep.gain_zero_limit = g.zero_amplitude_limit;
    QuadratureVariances v = closed ? variances_closed_form(spec)
                                   : variances_numeric(spec, cutoff);
    rep.v_x = v.v_x;
    rep.v_p = v.v_p;
    rep.v_det = deterministic_bound(std::max(1.0, rep.gain));
    rep.coherent_fid = coherent_fidelity(spec, cutoff);
    rep.normalization = closed ? normalization_closed_form(spec)
                               : amplified_state(spec, cutoff).normalization;
    rep.displaced_probabilities = displaced_photon_distribution(spec, cutoff);
    return rep;
}

Extremum max_displaced_p2()
{
    auto neg_p2 = [](double a) {
        const double mu = a * a;
        return -2.0 * mu * mu / m2_norm(mu); // two-photon weight of the displaced frame
    };
    Extremum e = golden_minimize(neg_p2, 0.0, 4.0);
    e.value = -e.value;
    return e;
}

Extremum min_coherent_fidelity(int m)
{
    if (m < 1 || m > 2)
        throw std::invalid_argument("min_coherent_fidelity: closed forms need m in {1,2}");
    auto f = [m](double a) {
        const double mu = a * a;
        AmplifierSpec spec{m, AmplifierVariant::AddThenSubtract, cx(a, 0.0)};
        const double g = gain_closed_form(spec).value;
        const double s = g * mu; // <g a| ... |a> inner amplitude product
        double overlap_poly;
        double norm;
        if (m == 1) {
            overlap_poly = 1.0 + s;
            norm = m1_norm(mu);
        } else {
            overlap_poly = s * s + 4.0 * s + 2.0;
            norm = m2_norm(mu);
        }
        const double gauss = std::exp(-(g - 1.0) * (g - 1.0) * mu);
        return gauss * overlap_poly * overlap_poly / norm;
    };
    return golden_minimize(f, 0.0, 4.0);
}

} // namespace qamp
