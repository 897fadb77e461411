#include "qamp/tomography.hpp"

#include "qamp/amplifier.hpp"
#include "qamp/herald.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace qamp;

namespace {

DensityOperator coherent_density(cx alpha, int cutoff)
{
    FockVector psi = coherent_state(alpha, cutoff);
    psi.normalize();
    return DensityOperator::pure(psi);
}

double sample_mean(const QuadratureDataset& d)
{
    double s = 0.0;
    for (const auto& q : d.samples) s += q.x;
    return s / double(d.samples.size());
}

double sample_variance(const QuadratureDataset& d)
{
    const double m = sample_mean(d);
    double s = 0.0;
    for (const auto& q : d.samples) s += (q.x - m) * (q.x - m);
    return s / double(d.samples.size() - 1);
}

} // namespace

TEST_CASE("quadrature pdf: vacuum, coherent, single photon")
{
    DensityOperator vac = coherent_density(0.0, 10);
    for (double th : {0.0, 0.7, 2.1}) {
        for (double x : {-1.5, 0.0, 0.4, 2.0}) {
            const double want = std::exp(-x * x) / std::sqrt(M_PI);
            CHECK(quadrature_pdf(vac, th, x) == doctest::Approx(want).epsilon(1e-12));
        }
    }

    DensityOperator coh = coherent_density(1.0, 25);
    for (double x : {-0.5, 0.9, 1.4142, 3.0}) {
        const double want = std::exp(-(x - std::sqrt(2.0)) * (x - std::sqrt(2.0)))
                          / std::sqrt(M_PI);
        CHECK(quadrature_pdf(coh, 0.0, x) == doctest::Approx(want).epsilon(1e-9));
    }

    DensityOperator one = DensityOperator::pure(fock_state(1, 10));
    CHECK(quadrature_pdf(one, 0.3, 0.0) == doctest::Approx(0.0));
    for (double x : {0.3, -1.1, 2.2}) {
        const double want = 2.0 * x * x * std::exp(-x * x) / std::sqrt(M_PI);
        CHECK(quadrature_pdf(one, 1.2, x) == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("quadrature pdf integrates to one and stays nonnegative")
{
    AmplifierSpec spec{2, AmplifierVariant::AddThenSubtract, cx(0.9, 0.4)};
    DensityOperator rho = DensityOperator::pure(amplified_state(spec, 24).state);
    std::vector<double> xs;
    const std::size_t np = 4001;
    const double span = 9.0;
    for (std::size_t j = 0; j < np; ++j)
        xs.push_back(-span + 2 * span * double(j) / double(np - 1));
    for (double th : {0.0, 0.9}) {
        std::vector<double> pdf = quadrature_pdf_grid(rho, th, xs);
        double integral = 0.0;
        for (std::size_t j = 0; j + 1 < np; ++j)
            integral += 0.5 * (pdf[j] + pdf[j + 1]) * (xs[j + 1] - xs[j]);
        CHECK(integral == doctest::Approx(1.0).epsilon(1e-8));
        for (double v : pdf) CHECK(v > -1e-12);
    }
}

TEST_CASE("loss channel: identity, coherent scaling, binomial mixing")
{
    DensityOperator coh = coherent_density(cx(0.4, 0.7), 18);
    DensityOperator same = apply_loss(coh, 1.0);
    CHECK(max_abs_diff(same.mat, coh.mat) < 1e-15);

    const double eta = 0.57;
    DensityOperator lossy = apply_loss(coh, eta);
    FockVector want = coherent_state(std::sqrt(eta) * cx(0.4, 0.7), 18);
    want.normalize();
    CHECK(fidelity(lossy, want) == doctest::Approx(1.0).epsilon(1e-10));

    DensityOperator one = DensityOperator::pure(fock_state(1, 6));
    DensityOperator mixed = apply_loss(one, eta);
    CHECK(mixed.mat(0, 0).real() == doctest::Approx(1 - eta).epsilon(1e-12));
    CHECK(mixed.mat(1, 1).real() == doctest::Approx(eta).epsilon(1e-12));

    CHECK_THROWS_AS(apply_loss(one, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(apply_loss(one, 1.2), std::invalid_argument);
}

TEST_CASE("loss channel agrees with beam-splitter-and-trace")
{
    FockVector psi;
    psi.amp = oracle::random_state(31, 12);
    DensityOperator rho = DensityOperator::pure(psi);
    const double eta = 0.73;

    DensityOperator kraus = apply_loss(rho, eta);

    TwoModeOperator bs = beam_splitter(eta, 12, 12);
    TwoModeDensity joint = tensor(rho, coherent_density(0.0, 12));
    DensityOperator traced = partial_trace(conjugate_apply(bs, joint), Mode::B);
    CHECK(max_abs_diff(kraus.mat, traced.mat) < 1e-10);
}

TEST_CASE("loss channel preserves positivity and trace on mixed states")
{
    ExperimentConfig cfg;
    cfg.alpha = 0.9;
    cfg.add_order = cfg.sub_order = 1;
    cfg.squeezing = 0.1;
    cfg.transmittance = 0.9;
    cfg.add_detector.kind = DetectorModel::Kind::MultiplexedBinary;
    cfg.sub_detector.kind = DetectorModel::Kind::MultiplexedBinary;
    DensityOperator mixed = run_pipeline(cfg).state;

    DensityOperator lossy = apply_loss(mixed, 0.57);
    CHECK(lossy.trace() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(lossy.hermiticity_error() < 1e-12);
    CHECK(lossy.min_eigenvalue() > -1e-10);
    CHECK(purity(lossy) < purity(mixed) + 1e-12);
}

TEST_CASE("loss channel composes multiplicatively")
{
    FockVector psi;
    psi.amp = oracle::random_state(32, 10);
    DensityOperator rho = DensityOperator::pure(psi);
    DensityOperator a = apply_loss(apply_loss(rho, 0.8), 0.65);
    DensityOperator b = apply_loss(rho, 0.8 * 0.65);
    CHECK(max_abs_diff(a.mat, b.mat) < 1e-10);
}

TEST_CASE("sampling: Gaussian statistics and reproducibility")
{
    DensityOperator vac = coherent_density(0.0, 8);
    QuadratureDataset d = sample_quadratures(vac, 1.0, {0.0, 1.0}, 50000, 99);
    CHECK(sample_variance(d) == doctest::Approx(0.5).epsilon(0.02));
    CHECK(std::abs(sample_mean(d)) < 0.01);

    DensityOperator coh = coherent_density(1.0, 20);
    QuadratureDataset dc = sample_quadratures(coh, 1.0, {0.0}, 100000, 7);
    CHECK(sample_mean(dc) == doctest::Approx(std::sqrt(2.0)).epsilon(0.01));

    QuadratureDataset again = sample_quadratures(coh, 1.0, {0.0}, 100000, 7);
    REQUIRE(again.samples.size() == dc.samples.size());
    for (std::size_t i = 0; i < dc.samples.size(); i += 997)
        CHECK(again.samples[i].x == dc.samples[i].x);

    QuadratureDataset other = sample_quadratures(coh, 1.0, {0.0}, 100000, 8);
    CHECK(other.samples[0].x != dc.samples[0].x);

    CHECK_THROWS_AS(sample_quadratures(coh, 1.0, {}, 10, 0), std::invalid_argument);
}

TEST_CASE("sampled amplitude-quadrature variance shows the predicted squeezing")
{
    AmplifierSpec spec{1, AmplifierVariant::AddThenSubtract, cx(0.8, 0.0)};
    DensityOperator rho = DensityOperator::pure(amplified_state(spec, 24).state);
    const int n = 100000;
    QuadratureDataset d = sample_quadratures(rho, 1.0, {0.0}, n, 2024);
    const double vx = variances_closed_form(spec).v_x;
    const double se = vx * std::sqrt(2.0 / n);
    CHECK(std::abs(sample_variance(d) - vx) < 3.0 * se);
    CHECK(sample_variance(d) < 0.5);
}

TEST_CASE("empirical CDF matches the model CDF (Kolmogorov-Smirnov)")
{
    DensityOperator vac = coherent_density(0.0, 8);
    const int n = 10000;
    QuadratureDataset d = sample_quadratures(vac, 1.0, {0.4}, n, 5);
    std::vector<double> xs;
    for (const auto& s : d.samples) xs.push_back(s.x);
    const double dist = oracle::ks_distance(
        xs, [](double x) { return 0.5 * (1.0 + std::erf(x)); });
    CHECK(dist < 1.63 / std::sqrt(double(n)));

    DensityOperator coh = coherent_density(cx(0.5, 0.5), 16);
    QuadratureDataset dc = sample_quadratures(coh, 1.0, {0.0}, n, 6);
    xs.clear();
    for (const auto& s : dc.samples) xs.push_back(s.x);
    const double mean = std::sqrt(2.0) * 0.5;
    const double dist2 = oracle::ks_distance(
        xs, [mean](double x) { return 0.5 * (1.0 + std::erf(x - mean)); });
    CHECK(dist2 < 1.63 / std::sqrt(double(n)));
}

TEST_CASE("datasets fold phases into [0, pi) with the matching sign flip")
{
    QuadratureDataset d;
    d.samples = {{0.2, 1.0},          // already canonical
                 {M_PI + 0.2, 1.5},   // one fold: x flips
                 {-0.5, 2.0},         // negative phase: x flips
                 {2 * M_PI + 0.1, 0.7}}; // two folds: x unchanged
    d.fold();
    for (const auto& s : d.samples) {
        CHECK(s.theta >= 0.0);
        CHECK(s.theta < M_PI);
    }
    CHECK(d.samples[0].x == 1.0);
    CHECK(d.samples[1].theta == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(d.samples[1].x == -1.5);
    CHECK(d.samples[2].theta == doctest::Approx(M_PI - 0.5).epsilon(1e-12));
    CHECK(d.samples[2].x == -2.0);
    CHECK(d.samples[3].x == 0.7);

    QuadratureDataset bad;
    bad.samples = {{std::numeric_limits<double>::quiet_NaN(), 0.0}};
    CHECK_THROWS_AS(bad.fold(), std::invalid_argument);

    // folding commutes with the physics: a folded measurement has the same
    // distribution, so reconstruction from folded data matches the state
    DensityOperator coh = coherent_density(0.7, 10);
    CHECK(quadrature_pdf(coh, M_PI + 0.2, 1.5)
          == doctest::Approx(quadrature_pdf(coh, 0.2, -1.5)).epsilon(1e-12));
}

TEST_CASE("maxlik round trip on a coherent state")
{
    FockVector target = coherent_state(0.8, 12);
    target.normalize();
    DensityOperator rho = DensityOperator::pure(target);

    std::vector<double> phases;
    for (int k = 0; k < 12; ++k) phases.push_back(M_PI * k / 12.0);
    QuadratureDataset d = sample_quadratures(rho, 1.0, phases, 10000, 42);

    ReconstructionResult rec = maxlik_reconstruct(d, 12);
    CHECK(fidelity(rec.rho, target) > 0.995);
    CHECK(rec.rho.trace() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(rec.rho.min_eigenvalue() > -1e-10);

    // likelihood never decreases along the iteration
    for (std::size_t i = 1; i < rec.log_likelihood.size(); ++i)
        CHECK(rec.log_likelihood[i] >= rec.log_likelihood[i - 1] - 1e-9);

    CHECK_THROWS_AS(maxlik_reconstruct(QuadratureDataset{}, 8), std::invalid_argument);
}

TEST_CASE("maxlik identifies vacuum")
{
    DensityOperator vac = coherent_density(0.0, 8);
    std::vector<double> phases;
    for (int k = 0; k < 12; ++k) phases.push_back(M_PI * k / 12.0);
    QuadratureDataset d = sample_quadratures(vac, 1.0, phases, 4000, 3);
    ReconstructionResult rec = maxlik_reconstruct(d, 8);
    CHECK(rec.rho.mat(0, 0).real() > 0.99);
}

TEST_CASE("loss compensation recovers the pre-loss state")
{
    AmplifierSpec spec{2, AmplifierVariant::AddThenSubtract, cx(1.0, 0.0)};
    FockVector ideal = amplified_state(spec, 16).state;
    DensityOperator rho = DensityOperator::pure(ideal);

    std::vector<double> phases;
    for (int k = 0; k < 12; ++k) phases.push_back(M_PI * k / 12.0);
    QuadratureDataset d = sample_quadratures(rho, 0.57, phases, 5000, 11);

    MaxLikOptions comp;
    comp.compensate_eta = true;
    ReconstructionResult with = maxlik_reconstruct(d, 16, comp);
    ReconstructionResult without = maxlik_reconstruct(d, 16);

    const double f_with = fidelity(with.rho, ideal);
    const double f_without = fidelity(without.rho, ideal);
    CHECK(f_with > 0.97);
    CHECK(f_with > f_without);
    CHECK(purity(with.rho) > purity(without.rho));
}

TEST_CASE("reconstruction is seed-deterministic end to end")
{
    DensityOperator coh = coherent_density(0.6, 10);
    QuadratureDataset d1 = sample_quadratures(coh, 1.0, {0.0, 0.8}, 2000, 123);
    QuadratureDataset d2 = sample_quadratures(coh, 1.0, {0.0, 0.8}, 2000, 123);
    ReconstructionResult r1 = maxlik_reconstruct(d1, 10);
    ReconstructionResult r2 = maxlik_reconstruct(d2, 10);
    REQUIRE(r1.log_likelihood.size() == r2.log_likelihood.size());
    for (std::size_t i = 0; i < r1.log_likelihood.size(); ++i)
        CHECK(r1.log_likelihood[i] == r2.log_likelihood[i]);
    CHECK(max_abs_diff(r1.rho.mat, r2.rho.mat) == 0.0);
}

TEST_CASE("metric report against a reference state")
{
    AmplifierSpec spec{2, AmplifierVariant::AddThenSubtract, cx(1.0, 0.0)};
    FockVector ideal = amplified_state(spec, 22).state;
    DensityOperator rho = DensityOperator::pure(ideal);

    MetricsRecord m = report_metrics(rho, ideal, 1.0);
    CHECK(m.fidelity == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(m.purity == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(m.gain_defined);
    CHECK(m.gain == doctest::Approx(1.0 + 54.0 / 87.0).epsilon(1e-9));
    CHECK(m.v_x == doctest::Approx(variances_closed_form(spec).v_x).epsilon(1e-9));
    CHECK(m.v_p == doctest::Approx(variances_closed_form(spec).v_p).epsilon(1e-9));
    CHECK(m.displaced_probabilities[2] == doctest::Approx(2.0 / 87.0).epsilon(1e-7));

    FockVector vac = fock_state(0, 12);
    MetricsRecord mv = report_metrics(DensityOperator::pure(vac), vac, 0.0);
    CHECK(mv.fidelity == doctest::Approx(1.0));
    CHECK_FALSE(mv.gain_defined);
    CHECK(mv.v_x == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(mv.v_p == doctest::Approx(0.5).epsilon(1e-10));

    // a lossy pipeline state is strictly mixed
    ExperimentConfig cfg;
    cfg.alpha = 0.9;
    cfg.add_order = cfg.sub_order = 1;
    cfg.squeezing = 0.05;
    cfg.transmittance = 0.9;
    cfg.add_detector.kind = DetectorModel::Kind::MultiplexedBinary;
    cfg.sub_detector.kind = DetectorModel::Kind::MultiplexedBinary;
    HeraldOutcome out = run_pipeline(cfg);
    MetricsRecord mp = report_metrics(out.state, embed(ideal, out.state.cutoff()),
                                      std::sqrt(0.9) * 0.9);
    CHECK(mp.purity < 1.0);
}
