#pragma once
// Independent reference computations for the test suites. Everything here is
// deliberately brute force (long-double series, explicit enumeration,
// closed-form special functions) and shares no code with the library paths
// it checks.

#include "qamp/linalg.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

using qamp::cx;

// e^{-mu} mu^n / n! with long-double accumulation
inline long double poisson_weight(long double mu, int n)
{
    long double w = std::exp(-mu);
    for (int k = 1; k <= n; ++k) w *= mu / k;
    return w;
}

// sum_{n=0..nmax} P_n(mu) f(n)
inline long double poisson_sum(long double mu, int nmax,
                               const std::function<long double(int)>& f)
{
    long double s = 0.0L;
    long double w = std::exp(-mu);
    for (int n = 0; n <= nmax; ++n) {
        s += w * f(n);
        w *= mu / (n + 1);
    }
    return s;
}

inline long double poisson_tail_above(long double mu, int cutoff)
{
    long double below = poisson_sum(mu, cutoff, [](int) { return 1.0L; });
    return 1.0L - below;
}

inline double binom(int n, int k)
{
    if (k < 0 || k > n) return 0.0;
    double v = 1.0;
    for (int i = 0; i < k; ++i) v = v * (n - i) / (i + 1);
    return v;
}

// generalized Laguerre L_n^{(k)}(x) by the three-term recurrence
inline double laguerre(int n, int k, double x)
{
    double l0 = 1.0;
    if (n == 0) return l0;
    double l1 = 1.0 + k - x;
    for (int i = 1; i < n; ++i) {
        double l2 = ((2 * i + 1 + k - x) * l1 - (i + k) * l0) / (i + 1);
        l0 = l1;
        l1 = l2;
    }
    return l1;
}

// closed-form matrix element <m| exp(alpha a^+ - alpha^* a) |n>
inline cx displacement_element(cx alpha, int m, int n)
{
    const double mu = std::norm(alpha);
    auto ratio_fact = [](int small, int large) {
        // sqrt(small! / large!)
        long double v = 1.0L;
        for (int i = small + 1; i <= large; ++i) v /= i;
        return std::sqrt(double(v));
    };
    if (m >= n) {
        cx pow = 1.0;
        for (int i = 0; i < m - n; ++i) pow *= alpha;
        return ratio_fact(n, m) * pow * std::exp(-0.5 * mu)
             * laguerre(n, m - n, mu);
    }
    cx pow = 1.0;
    for (int i = 0; i < n - m; ++i) pow *= -std::conj(alpha);
    return ratio_fact(m, n) * pow * std::exp(-0.5 * mu) * laguerre(m, n - m, mu);
}

// P(exactly k of D binary detectors fire | n photons) by full enumeration of
// photon->detector assignments and dark-count patterns
inline double click_probability(int detectors, int k, int n, double dark,
                                const std::vector<double>& ratios_in = {})
{
    std::vector<double> ratios = ratios_in;
    if (ratios.empty()) ratios.assign(std::size_t(detectors), 1.0 / detectors);
    double total = 0.0;
    const int assignments = int(std::pow(detectors, n));
    for (int a = 0; a < assignments; ++a) {
        double p_assign = 1.0;
        std::vector<int> hit(std::size_t(detectors), 0);
        int code = a;
        for (int ph = 0; ph < n; ++ph) {
            const int det = code % detectors;
            code /= detectors;
            p_assign *= ratios[std::size_t(det)];
            hit[std::size_t(det)] = 1;
        }
        // dark-count pattern on the detectors that saw no photon
        for (int mask = 0; mask < (1 << detectors); ++mask) {
            double p_dark = 1.0;
            int clicks = 0;
            bool valid = true;
            for (int dtr = 0; dtr < detectors; ++dtr) {
                const bool dark_fires = mask & (1 << dtr);
                if (hit[std::size_t(dtr)]) {
                    if (dark_fires) { valid = false; break; } // already clicked
                    ++clicks;
                    continue;
                }
                p_dark *= dark_fires ? dark : (1.0 - dark);
                if (dark_fires) ++clicks;
            }
            if (!valid) continue;
            if (clicks == k) total += p_assign * p_dark;
        }
    }
    return total;
}

// random normalized pure state with fixed seed
inline qamp::cvec random_state(std::uint64_t seed, int cutoff)
{
    std::mt19937_64 eng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    qamp::cvec v(std::size_t(cutoff) + 1);
    double n2 = 0.0;
    for (auto& z : v) {
        z = cx(g(eng), g(eng));
        n2 += std::norm(z);
    }
    for (auto& z : v) z /= std::sqrt(n2);
    return v;
}

inline qamp::CMat random_hermitian(std::uint64_t seed, int dim)
{
    std::mt19937_64 eng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    qamp::CMat h(static_cast<std::size_t>(dim), static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) {
        h(i, i) = g(eng);
        for (int j = i + 1; j < dim; ++j) {
            const cx v(g(eng), g(eng));
            h(std::size_t(i), std::size_t(j)) = v;
            h(std::size_t(j), std::size_t(i)) = std::conj(v);
        }
    }
    return h;
}

// Kolmogorov-Smirnov distance between sorted samples and a model CDF
inline double ks_distance(std::vector<double> samples,
                          const std::function<double(double)>& cdf)
{
    std::sort(samples.begin(), samples.end());
    const double n = double(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max(d, std::abs(f - double(i) / n));
        d = std::max(d, std::abs(f - double(i + 1) / n));
    }
    return d;
}

} // namespace oracle
