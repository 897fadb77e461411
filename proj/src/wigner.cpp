#include "qamp/wigner.hpp"

#include "qamp/threading.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qamp {

namespace {

// top Fock level carrying more than `tail` of the state's mass
int support_level(const std::vector<double>& probs, double tail)
{
    double acc = 0.0;
    int top = 0;
    for (std::size_t n = 0; n < probs.size(); ++n) {
        acc += probs[n];
        if (probs[n] > tail) top = int(n);
    }
    (void)acc;
    return top;
}

// cutoff needed so a state at level n_top displaced by beta_max keeps its
// tail below ~1e-8
int required_cutoff(int n_top, double beta_max)
{
    return n_top + int(std::ceil(beta_max * beta_max + 6.0 * beta_max + 6.0));
}

double parity_sum_pure(const cvec& psi, cx beta)
{
    // v = D(beta)^+ psi via the displacement column recurrence, then the
    // alternating-sign mass of v
    const int dim = int(psi.size()) - 1;
    ModeOperator d = displacement_columns(beta, dim);
    cvec v = matvec_adjoint(d.mat, psi);
    double s = 0.0;
    for (std::size_t n = 0; n < v.size(); ++n) {
        const double w = std::norm(v[n]);
        s += (n % 2 == 0) ? w : -w;
    }
    return s;
}

double parity_sum_mixed(const CMat& rho, cx beta)
{
    const int dim = int(rho.rows) - 1;
    ModeOperator d = displacement_columns(beta, dim);
    // columns c_n = D|n> are rows of D^T; evaluate <c_n| rho |c_n>
    CMat dt(rho.rows, rho.cols);
    for (std::size_t i = 0; i < rho.rows; ++i)
        for (std::size_t j = 0; j < rho.cols; ++j) dt(j, i) = d.mat(i, j);
    double s = 0.0;
    cvec tmp(rho.rows);
    for (std::size_t n = 0; n < rho.rows; ++n) {
        const cx* col = dt.row(n);
        for (std::size_t i = 0; i < rho.rows; ++i)
            tmp[i] = kernels::backend().zdotu(rho.cols, rho.row(i), col);
        const double w = kernels::backend().zdotc(rho.rows, col, tmp.data()).real();
        s += (n % 2 == 0) ? w : -w;
    }
    return s;
}

double max_beta(const std::vector<double>& xs, const std::vector<double>& ps)
{
    double mx = 0.0, mp = 0.0;
    for (double x : xs) mx = std::max(mx, std::abs(x));
    for (double p : ps) mp = std::max(mp, std::abs(p));
    return std::sqrt(mx * mx + mp * mp) / std::sqrt(2.0);
}

void check_axes(const std::vector<double>& xs, const std::vector<double>& ps)
{
    auto ok = [](const std::vector<double>& v) {
        if (v.empty()) return false;
        for (double t : v)
            if (!std::isfinite(t)) return false;
        for (std::size_t i = 1; i < v.size(); ++i)
            if (v[i] <= v[i - 1]) return false;
        return true;
    };
    if (!ok(xs) || !ok(ps))
        throw std::invalid_argument("wigner: axes must be finite and increasing");
}

template <typename Eval>
WignerGrid evaluate_grid(const std::vector<double>& xs, const std::vector<double>& ps,
                         int threads, Eval&& point)
{
    WignerGrid g;
    g.x_axis = xs;
    g.p_axis = ps;
    g.values.resize(xs.size() * ps.size());
    parallel_for(xs.size(), threads, [&](std::size_t ix) {
        for (std::size_t ip = 0; ip < ps.size(); ++ip)
            g.values[ix * ps.size() + ip] = point(xs[ix], ps[ip]);
    });
    return g;
}

int settle_cutoff(int n_top, double beta_edge, int max_internal_cutoff)
{
    const int need = required_cutoff(n_top, beta_edge);
    if (max_internal_cutoff >= 0 && need > max_internal_cutoff)
        throw cutoff_error("wigner: displaced support leaks past the cutoff cap");
    return need;
}

} // namespace

double WignerGrid::integral() const
{
    // trapezoid weights on each axis
    auto weights = [](const std::vector<double>& ax) {
        std::vector<double> w(ax.size(), 0.0);
        for (std::size_t i = 0; i + 1 < ax.size(); ++i) {
            const double h = ax[i + 1] - ax[i];
            w[i] += 0.5 * h;
            w[i + 1] += 0.5 * h;
        }
        return w;
    };
    const std::vector<double> wx = weights(x_axis), wp = weights(p_axis);
    double s = 0.0;
    for (std::size_t ix = 0; ix < x_axis.size(); ++ix)
        for (std::size_t ip = 0; ip < p_axis.size(); ++ip)
            s += wx[ix] * wp[ip] * at(ix, ip);
    return s;
}

double WignerGrid::min_value() const
{
    return *std::min_element(values.begin(), values.end());
}

double WignerGrid::max_abs() const
{
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

WignerGrid wigner(const FockVector& psi, const std::vector<double>& xs,
                  const std::vector<double>& ps, int max_internal_cutoff, int threads)
{
    check_axes(xs, ps);
    const int n_top = support_level(psi.probabilities(), 1e-12);
    const int dim = settle_cutoff(n_top, max_beta(xs, ps), max_internal_cutoff);
    FockVector big = embed(psi, dim);
    big.normalize();
    return evaluate_grid(xs, ps, threads, [&](double x, double p) {
        return parity_sum_pure(big.amp, cx(x, p) / std::sqrt(2.0)) / std::numbers::pi;
    });
}

WignerGrid wigner(const DensityOperator& rho, const std::vector<double>& xs,
                  const std::vector<double>& ps, int max_internal_cutoff, int threads)
{
    check_axes(xs, ps);
    std::vector<double> probs(rho.mat.rows);
    for (std::size_t n = 0; n < rho.mat.rows; ++n) probs[n] = rho.mat(n, n).real();
    const int n_top = support_level(probs, 1e-12);
    const int dim = settle_cutoff(n_top, max_beta(xs, ps), max_internal_cutoff);
    DensityOperator big = embed(rho, dim);
    return evaluate_grid(xs, ps, threads, [&](double x, double p) {
        return parity_sum_mixed(big.mat, cx(x, p) / std::sqrt(2.0)) / std::numbers::pi;
    });
}

double wigner_value(const DensityOperator& rho, double x, double p)
{
    std::vector<double> probs(rho.mat.rows);
    for (std::size_t n = 0; n < rho.mat.rows; ++n) probs[n] = rho.mat(n, n).real();
    const int n_top = support_level(probs, 1e-12);
    const double beta_abs = std::sqrt(x * x + p * p) / std::sqrt(2.0);
    DensityOperator big = embed(rho, required_cutoff(n_top, beta_abs));
    return parity_sum_mixed(big.mat, cx(x, p) / std::sqrt(2.0)) / std::numbers::pi;
}

SqueezingEllipse squeezing_ellipse(const DensityOperator& rho, double theta)
{
    const QuadMoments m = quadrature_moments(rho, theta);
    const double vx = m.v_x, vp = m.v_p, cov = m.cov;

    SqueezingEllipse e;
    const double half_diff = 0.5 * (vx - vp);
    const double radius = std::hypot(half_diff, cov);
    const double mid = 0.5 * (vx + vp);
    e.major = mid + radius;
    e.minor = mid - radius;
    if (radius < 1e-12) {
        e.orientation_defined = false;
        e.angle = 0.0;
    } else {
        // major-axis direction from the symmetric 2x2 eigenproblem, then the
        // minor axis a quarter turn away, folded into (-pi/2, pi/2]
        const double major_angle = 0.5 * std::atan2(2.0 * cov, vx - vp);
        e.angle = major_angle - std::numbers::pi / 2.0;
        while (e.angle > std::numbers::pi / 2.0) e.angle -= std::numbers::pi;
        while (e.angle <= -std::numbers::pi / 2.0) e.angle += std::numbers::pi;
    }
    return e;
}

std::vector<double> linear_axis(double lo, double hi, std::size_t points)
{
    std::vector<double> ax(points);
    if (points == 1) {
        ax[0] = lo;
        return ax;
    }
    for (std::size_t i = 0; i < points; ++i)
        ax[i] = lo + (hi - lo) * double(i) / double(points - 1);
    return ax;
}

} // namespace qamp
