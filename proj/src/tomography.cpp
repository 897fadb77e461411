#include "qamp/tomography.hpp"

#include "qamp/threading.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

namespace qamp {

namespace {

std::uint64_t splitmix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// uniform in [0,1) from the top 53 bits; identical on every platform
double uniform01(std::mt19937_64& eng)
{
    return double(eng() >> 11) * 0x1.0p-53;
}

// c_{n,k} = sqrt(C(n,k) eta^{n-k} (1-eta)^k): amplitude for losing k of n
std::vector<std::vector<double>> loss_amplitudes(int dim, double eta)
{
    std::vector<std::vector<double>> c(static_cast<std::size_t>(dim));
    for (int n = 0; n < dim; ++n) {
        c[std::size_t(n)].resize(std::size_t(n) + 1);
        double binom = 1.0;
        for (int k = 0; k <= n; ++k) {
            if (k > 0) binom = binom * (n - k + 1) / k;
            c[std::size_t(n)][std::size_t(k)] =
                std::sqrt(binom * std::pow(eta, n - k) * std::pow(1.0 - eta, k));
        }
    }
    return c;
}

cvec phase_vector(double theta, const double* psi_col, std::size_t np, std::size_t j,
                  int dim)
{
    cvec v(static_cast<std::size_t>(dim));
    for (int n = 0; n < dim; ++n)
        v[std::size_t(n)] = std::exp(cx(0.0, n * theta)) * psi_col[std::size_t(n) * np + j];
    return v;
}

} // namespace

void QuadratureDataset::fold()
{
    constexpr double pi = 3.14159265358979323846;
    for (QuadratureSample& s : samples) {
        if (!std::isfinite(s.theta) || !std::isfinite(s.x))
            throw std::invalid_argument("QuadratureDataset: non-finite sample");
        double k = std::floor(s.theta / pi);
        s.theta -= k * pi;
        if (s.theta >= pi) { // guard the k*pi rounding edge
            s.theta -= pi;
            k += 1.0;
        }
        if (std::fmod(std::abs(k), 2.0) == 1.0) s.x = -s.x;
    }
}

double quadrature_pdf(const DensityOperator& rho, double theta, double x)
{
    const int dim = int(rho.mat.rows);
    std::vector<double> h(static_cast<std::size_t>(dim));
    kernels::backend().hermite_grid(1, &x, dim - 1, h.data());
    cvec v(static_cast<std::size_t>(dim));
    for (int n = 0; n < dim; ++n)
        v[std::size_t(n)] = std::exp(cx(0.0, n * theta)) * h[std::size_t(n)];
    return quadratic_form(rho.mat, v).real();
}

std::vector<double> quadrature_pdf_grid(const DensityOperator& rho, double theta,
                                        const std::vector<double>& xs)
{
    const int dim = int(rho.mat.rows);
    const std::size_t np = xs.size();
    std::vector<double> h(static_cast<std::size_t>(dim) * np);
    kernels::backend().hermite_grid(np, xs.data(), dim - 1, h.data());

    std::vector<double> pdf(np);
    for (std::size_t j = 0; j < np; ++j) {
        cvec v = phase_vector(theta, h.data(), np, j, dim);
        pdf[j] = quadratic_form(rho.mat, v).real();
    }
    return pdf;
}

DensityOperator apply_loss(const DensityOperator& rho, double eta)
{
    if (!(eta > 0.0) || eta > 1.0)
        throw std::invalid_argument("apply_loss: eta outside (0,1]");
    if (eta == 1.0) return rho;

    const int dim = int(rho.mat.rows);
    const auto c = loss_amplitudes(dim, eta);
    DensityOperator out(dim - 1);
    for (int m = 0; m < dim; ++m)
        for (int n = 0; n < dim; ++n) {
            cx s = 0.0;
            for (int k = 0; m + k < dim && n + k < dim; ++k)
                s += c[std::size_t(m + k)][std::size_t(k)]
                   * c[std::size_t(n + k)][std::size_t(k)] * rho.mat(m + k, n + k);
            out.mat(m, n) = s;
        }
    return out;
}

QuadratureDataset sample_quadratures(const DensityOperator& rho, double eta,
                                     const std::vector<double>& phases,
                                     int n_per_phase, std::uint64_t seed)
{
    if (phases.empty())
        throw std::invalid_argument("sample_quadratures: need at least one phase");
    if (n_per_phase < 1)
        throw std::invalid_argument("sample_quadratures: need at least one sample");

    DensityOperator lossy = apply_loss(rho, eta);
    const double span = std::sqrt(2.0 * std::max(0.0, lossy.mean_photon())) + 6.0;
    constexpr std::size_t np = 8193; // CDF interpolation error ~ (span/np)^2
    std::vector<double> xs(np);
    for (std::size_t j = 0; j < np; ++j)
        xs[j] = -span + 2.0 * span * double(j) / double(np - 1);
    const double dx = xs[1] - xs[0];

    QuadratureDataset out;
    out.eta = eta;
    out.seed = seed;
    out.samples.resize(phases.size() * std::size_t(n_per_phase));

    parallel_for(phases.size(), 0, [&](std::size_t pi) {
        const double theta = phases[pi];
        std::vector<double> pdf = quadrature_pdf_grid(lossy, theta, xs);
        std::vector<double> cdf(np, 0.0);
        for (std::size_t j = 1; j < np; ++j)
            cdf[j] = cdf[j - 1] + 0.5 * dx * (std::max(0.0, pdf[j - 1]) + std::max(0.0, pdf[j]));
        const double total = cdf.back();
        for (double& v : cdf) v /= total;

        std::mt19937_64 eng(splitmix64(seed ^ (0x5851f42d4c957f2dull * (pi + 1))));
        for (int s = 0; s < n_per_phase; ++s) {
            const double u = uniform01(eng);
            const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
            std::size_t hi = std::min(std::size_t(it - cdf.begin()), np - 1);
            if (hi == 0) hi = 1;
            const double c0 = cdf[hi - 1], c1 = cdf[hi];
            const double frac = (c1 > c0) ? (u - c0) / (c1 - c0) : 0.5;
            out.samples[pi * std::size_t(n_per_phase) + std::size_t(s)] =
                {theta, xs[hi - 1] + frac * dx};
        }
    });
    out.fold();
    return out;
}

ReconstructionResult maxlik_reconstruct(const QuadratureDataset& data, int cutoff,
                                        const MaxLikOptions& opts)
{
    if (data.samples.empty())
        throw std::invalid_argument("maxlik_reconstruct: empty dataset");
    const int dim = cutoff + 1;
    const std::size_t dim2 = std::size_t(dim) * dim;

    // ---- bin the samples per (phase, bin index) -----------------------------
    std::vector<double> thetas; // unique phases in order of appearance
    std::map<std::pair<std::size_t, long long>, std::size_t> counts;
    for (const QuadratureSample& s : data.samples) {
        std::size_t pi = thetas.size();
        for (std::size_t i = 0; i < thetas.size(); ++i)
            if (thetas[i] == s.theta) { pi = i; break; }
        if (pi == thetas.size()) thetas.push_back(s.theta);
        const long long bin = (long long)std::floor(s.x / opts.bin_width);
        counts[{pi, bin}] += 1;
    }
    const double total = double(data.samples.size());

    // ---- projector per bin ---------------------------------------------------
    struct Bin {
        CMat proj;
        double frequency;
    };
    std::vector<Bin> bins;
    bins.reserve(counts.size());
    const auto c = opts.compensate_eta ? loss_amplitudes(dim, data.eta)
                                       : std::vector<std::vector<double>>{};
    for (const auto& [key, cnt] : counts) {
        const double theta = thetas[key.first];
        const double xc = (double(key.second) + 0.5) * opts.bin_width;
        std::vector<double> h(static_cast<std::size_t>(dim));
        kernels::backend().hermite_grid(1, &xc, dim - 1, h.data());
        cvec v(static_cast<std::size_t>(dim));
        for (int n = 0; n < dim; ++n)
            v[std::size_t(n)] = std::exp(cx(0.0, n * theta)) * h[std::size_t(n)];

        Bin b;
        b.frequency = double(cnt) / total;
        b.proj = CMat(std::size_t(dim), std::size_t(dim));
        if (!opts.compensate_eta) {
            for (int i = 0; i < dim; ++i)
                kernels::backend().zaxpy_conj(std::size_t(dim), v[std::size_t(i)],
                                              v.data(), b.proj.row(i));
        } else {
            // loss-channel adjoint of the projector: sum_k |A_k^+ v><A_k^+ v|
            cvec w(static_cast<std::size_t>(dim));
            for (int k = 0; k < dim; ++k) {
                std::fill(w.begin(), w.end(), cx(0.0));
                for (int n = k; n < dim; ++n)
                    w[std::size_t(n)] = c[std::size_t(n)][std::size_t(k)]
                                      * v[std::size_t(n - k)];
                for (int i = 0; i < dim; ++i)
                    kernels::backend().zaxpy_conj(std::size_t(dim), w[std::size_t(i)],
                                                  w.data(), b.proj.row(i));
            }
        }
        bins.push_back(std::move(b));
    }

    // ---- RrhoR iteration ------------------------------------------------------
    ReconstructionResult res;
    CMat rho = CMat::identity(std::size_t(dim));
    kernels::backend().zscale(rho.a.size(), 1.0 / dim, rho.a.data());

    CMat r(static_cast<std::size_t>(dim), static_cast<std::size_t>(dim));
    double prev_lambda = 0.0;
    for (int it = 0; it < opts.max_iterations; ++it) {
        std::fill(r.a.begin(), r.a.end(), cx(0.0));
        double ll = 0.0;
        for (const Bin& b : bins) {
            double p = kernels::backend().zdotc(dim2, b.proj.a.data(), rho.a.data()).real();
            p = std::max(p, 1e-280);
            ll += b.frequency * std::log(p);
            kernels::backend().daxpy(dim2, b.frequency / p, b.proj.a.data(), r.a.data());
        }
        res.log_likelihood.push_back(ll);

        CMat next = matmul(r, matmul(rho, r));
        // enforce hermiticity against roundoff drift
        for (int i = 0; i < dim; ++i)
            for (int j = i; j < dim; ++j) {
                const cx m = 0.5 * (next(i, j) + std::conj(next(j, i)));
                next(std::size_t(i), std::size_t(j)) = m;
                next(std::size_t(j), std::size_t(i)) = std::conj(m);
            }
        const double tr = qamp::trace(next).real();
        kernels::backend().zscale(next.a.size(), 1.0 / tr, next.a.data());
        rho = std::move(next);
        res.iterations = it + 1;

        const double lambda = power_max_eigenvalue(r);
        if (it > 0 && std::abs(lambda - prev_lambda) < opts.tolerance) {
            res.converged = true;
            prev_lambda = lambda;
            break;
        }
        prev_lambda = lambda;
    }

    res.rho = DensityOperator(std::move(rho));
    return res;
}

MetricsRecord report_metrics(const DensityOperator& rho, const FockVector& reference,
                             cx alpha)
{
    const int cut = std::max(rho.cutoff(), reference.cutoff());
    DensityOperator r = embed(rho, cut);
    FockVector ref = embed(reference, cut);

    MetricsRecord m;
    m.fidelity = fidelity(r, ref);
    m.purity = purity(r);
    if (alpha != cx(0.0)) {
        m.gain = (r.mean_annihilation() / alpha).real();
        m.gain_defined = true;
    }
    const double theta = (alpha == cx(0.0)) ? 0.0 : std::arg(alpha);
    QuadMoments qm = quadrature_moments(r, theta);
    m.v_x = qm.v_x;
    m.v_p = qm.v_p;

    ModeOperator d = displacement_operator(-alpha, cut);
    DensityOperator displaced = conjugate_apply(d, r);
    m.displaced_probabilities.resize(std::size_t(cut) + 1);
    for (int n = 0; n <= cut; ++n)
        m.displaced_probabilities[std::size_t(n)] = displaced.mat(n, n).real();
    return m;
}

} // namespace qamp
