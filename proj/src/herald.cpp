#include "qamp/herald.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qamp {

namespace {

constexpr double multipair_threshold = 1e-3;

double binom(int n, int k)
{
    if (k < 0 || k > n) return 0.0;
    double v = 1.0;
    for (int i = 0; i < k; ++i) v = v * (n - i) / (i + 1);
    return v;
}

// P(exactly k of D binary detectors fire | n photons), by inclusion-exclusion
// over detector subsets: P(clicks subset of A) = p(A)^n (1-d)^{D-|A|}.
std::vector<double> click_weights(int n_detectors, int k, double dark, int dim,
                                  const std::vector<double>& split)
{
    std::vector<double> ratios = split;
    if (ratios.empty())
        ratios.assign(std::size_t(n_detectors), 1.0 / n_detectors);
    if (int(ratios.size()) != n_detectors)
        throw std::invalid_argument("click_povm: one splitting ratio per detector");
    double total = 0.0;
    for (double p : ratios) {
        if (p < 0.0) throw std::invalid_argument("click_povm: negative splitting ratio");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("click_povm: splitting ratios must sum to 1");

    std::vector<double> w(static_cast<std::size_t>(dim) + 1, 0.0);
    const int nsub = 1 << n_detectors;
    for (int mask = 0; mask < nsub; ++mask) {
        const int sz = __builtin_popcount(unsigned(mask));
        if (sz > k) continue;
        double pa = 0.0;
        for (int i = 0; i < n_detectors; ++i)
            if (mask & (1 << i)) pa += ratios[std::size_t(i)];
        const double supersets = binom(n_detectors - sz, k - sz);
        const double sign = ((k - sz) % 2 == 0) ? 1.0 : -1.0;
        const double darkfree = std::pow(1.0 - dark, n_detectors - sz);
        double pn = 1.0; // pa^n, n = 0 first
        for (int n = 0; n <= dim; ++n) {
            w[std::size_t(n)] += supersets * sign * pn * darkfree;
            pn *= pa;
        }
    }
    for (double& v : w) v = std::clamp(v, 0.0, 1.0); // clip roundoff residue
    return w;
}

// Kraus slice K_j of a two-mode unitary with mode B prepared in vacuum:
// K_j(i, l) = U((i,j),(l,0)); the conditional map for a diagonal POVM w is
// rho -> sum_j w_j K_j rho K_j^+.
DensityOperator conditional_state(const TwoModeOperator& u, const DensityOperator& rho,
                                  const std::vector<double>& weights, double& probability,
                                  std::vector<double>* herald_occupation)
{
    const int da = u.na + 1, db = u.nb + 1;
    if (int(rho.mat.rows) != da)
        throw dimension_error("conditional_state: signal cutoff mismatch");
    if (int(weights.size()) != db)
        throw dimension_error("conditional_state: POVM weight count mismatch");

    DensityOperator out(u.na);
    if (herald_occupation) herald_occupation->assign(std::size_t(db), 0.0);

    CMat k(static_cast<std::size_t>(da), static_cast<std::size_t>(da));
    for (int j = 0; j < db; ++j) {
        const bool want_occupation = herald_occupation != nullptr;
        if (weights[std::size_t(j)] == 0.0 && !want_occupation) continue;
        for (int i = 0; i < da; ++i)
            for (int l = 0; l < da; ++l)
                k(std::size_t(i), std::size_t(l)) =
                    u.mat(std::size_t(i) * db + j, std::size_t(l) * db);
        CMat branch = matmul(matmul(k, rho.mat), adjoint(k));
        const double branch_prob = qamp::trace(branch).real();
        if (want_occupation) (*herald_occupation)[std::size_t(j)] = branch_prob;
        if (weights[std::size_t(j)] != 0.0)
            axpy(out.mat, weights[std::size_t(j)], branch);
    }

    probability = out.trace();
    if (probability <= 0.0)
        throw zero_probability_error("heralding pattern has zero probability");
    out.normalize();
    return out;
}

// weighted mass above photon number m among the heralded branches
bool multipair_flag(const std::vector<double>& weights,
                    const std::vector<double>& occupation, int m)
{
    double accepted = 0.0, contaminated = 0.0;
    for (std::size_t n = 0; n < occupation.size(); ++n) {
        const double v = weights[n] * occupation[n];
        accepted += v;
        if (int(n) > m) contaminated += v;
    }
    return accepted > 0.0 && contaminated / accepted > multipair_threshold;
}

std::string pattern_label(const DetectorModel& det, int m)
{
    if (det.kind == DetectorModel::Kind::IdealPNR)
        return "pnr n=" + std::to_string(m);
    std::string label = std::to_string(m) +
        (det.accept_at_least ? "-or-more-of-" : "-of-") +
        std::to_string(det.detectors) + " clicks";
    return label;
}

int auto_idler_cutoff(int m, double r)
{
    int need = m + 4;
    const double lambda = std::tanh(r);
    if (lambda > 0.0) {
        // two_mode_squeezer requires tanh(r)^cutoff < 1e-8
        const int safe = int(std::ceil(std::log(1e-8) / std::log(lambda))) + 1;
        need = std::max(need, safe);
    }
    return need;
}

} // namespace

ModeOperator click_povm(int n_detectors, int k_clicks, double dark_rate, int cutoff,
                        const std::vector<double>& split)
{
    if (n_detectors < 1) throw std::invalid_argument("click_povm: need >= 1 detector");
    if (k_clicks < 0 || k_clicks > n_detectors)
        throw std::invalid_argument("click_povm: k outside 0..n_detectors");
    if (dark_rate < 0.0 || dark_rate >= 1.0)
        throw std::invalid_argument("click_povm: dark rate outside [0,1)");
    std::vector<double> w = click_weights(n_detectors, k_clicks, dark_rate, cutoff, split);
    return ModeOperator(CMat::diagonal(w));
}

std::vector<double> herald_weights(const DetectorModel& det, int m, int dim)
{
    std::vector<double> w(static_cast<std::size_t>(dim), 0.0);
    if (det.kind == DetectorModel::Kind::IdealPNR) {
        if (m < dim) w[std::size_t(m)] = 1.0;
        return w;
    }
    if (m > det.detectors)
        throw std::invalid_argument(
            "herald_weights: m clicks need at least m binary detectors");
    const int kmax = det.accept_at_least ? det.detectors : m;
    for (int k = m; k <= kmax; ++k) {
        std::vector<double> wk =
            click_weights(det.detectors, k, det.dark_rate, dim - 1, det.split);
        for (std::size_t n = 0; n < w.size(); ++n) w[n] += wk[n];
    }
    return w;
}

HeraldOutcome add_photons(const DensityOperator& state, int m, double r,
                          const DetectorModel& det, int idler_cutoff)
{
    if (m < 0) throw std::invalid_argument("add_photons: m must be >= 0");
    if (r < 0.0) throw std::invalid_argument("add_photons: r must be >= 0");
    const int ni = idler_cutoff >= 0 ? idler_cutoff : auto_idler_cutoff(m, r);
    const int ns = state.cutoff() + ni; // exact: k pairs raise the signal by k

    TwoModeOperator u = two_mode_squeezer(r, ns, ni);
    DensityOperator grown = embed(state, ns);
    std::vector<double> weights = herald_weights(det, m, ni + 1);
    std::vector<double> occupation;

    HeraldOutcome out;
    out.state = conditional_state(u, grown, weights, out.probability, &occupation);
    out.stages.push_back({"addition", pattern_label(det, m), out.probability,
                          multipair_flag(weights, occupation, m)});
    return out;
}

HeraldOutcome subtract_photons(const DensityOperator& state, int m, double T,
                               const DetectorModel& det, int ancilla_cutoff)
{
    if (m < 0) throw std::invalid_argument("subtract_photons: m must be >= 0");
    if (!(T > 0.0) || T > 1.0)
        throw std::invalid_argument("subtract_photons: T outside (0,1]");
    if (T == 1.0 && m >= 1)
        throw zero_probability_error("subtract_photons: nothing reaches the tap at T=1");

    const int ns = state.cutoff();
    const int nb = ancilla_cutoff >= 0 ? ancilla_cutoff : ns;

    HeraldOutcome out;
    if (m == 0 && T == 1.0) { // nothing to do; keep the state as is
        out.state = state;
        out.probability = 1.0;
        out.stages.push_back({"subtraction", "unconditioned", 1.0, false});
        return out;
    }

    TwoModeOperator u = beam_splitter(T, ns, nb);
    std::vector<double> weights;
    if (m == 0 && det.kind == DetectorModel::Kind::IdealPNR) {
        // unheralded tap: trace the ancilla without conditioning
        weights.assign(std::size_t(nb) + 1, 1.0);
    } else {
        weights = herald_weights(det, m, nb + 1);
    }
    std::vector<double> occupation;
    out.state = conditional_state(u, state, weights, out.probability, &occupation);
    const std::string pattern =
        (m == 0 && det.kind == DetectorModel::Kind::IdealPNR)
            ? "unconditioned" : pattern_label(det, m);
    out.stages.push_back({"subtraction", pattern, out.probability,
                          multipair_flag(weights, occupation, m)});
    return out;
}

HeraldOutcome run_pipeline(const ExperimentConfig& cfg)
{
    const int m = std::max(cfg.add_order, cfg.sub_order);
    const int ns = cfg.signal_cutoff >= 0 ? cfg.signal_cutoff
                                          : default_cutoff(cfg.alpha, std::max(m, 1));
    FockVector seed = coherent_state(cfg.alpha, ns);
    seed.normalize();
    DensityOperator rho = DensityOperator::pure(seed);

    HeraldOutcome added = add_photons(rho, cfg.add_order, cfg.squeezing,
                                      cfg.add_detector, cfg.idler_cutoff);
    HeraldOutcome subtracted = subtract_photons(added.state, cfg.sub_order,
                                                cfg.transmittance, cfg.sub_detector,
                                                cfg.ancilla_cutoff);

    HeraldOutcome out;
    out.state = std::move(subtracted.state);
    out.probability = added.probability * subtracted.probability;
    out.stages = added.stages;
    out.stages.insert(out.stages.end(), subtracted.stages.begin(),
                      subtracted.stages.end());
    return out;
}

std::vector<ScanPoint> success_probability_scan(const std::vector<double>& rs,
                                                const std::vector<double>& ts,
                                                const std::vector<int>& ms,
                                                const std::vector<cx>& alphas,
                                                const DetectorModel& det)
{
    std::vector<ScanPoint> table;
    for (double r : rs)
        for (double t : ts)
            for (int m : ms)
                for (cx alpha : alphas) {
                    ExperimentConfig cfg;
                    cfg.alpha = alpha;
                    cfg.add_order = cfg.sub_order = m;
                    cfg.squeezing = r;
                    cfg.transmittance = t;
                    cfg.add_detector = cfg.sub_detector = det;
                    ScanPoint pt{r, t, m, alpha, 0.0};
                    pt.probability = run_pipeline(cfg).probability;
                    table.push_back(pt);
                }
    return table;
}

} // namespace qamp
