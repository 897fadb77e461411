// qamp: truncated Fock-space simulator for conditional noiseless amplification
// of coherent states. Subcommands emit machine-readable tables (CSV or JSON)
// plus a key=value manifest with checksums; identical invocations reproduce
// identical bytes.

#include "qamp/amplifier.hpp"
#include "qamp/herald.hpp"
#include "qamp/io.hpp"
#include "qamp/tomography.hpp"
#include "qamp/wigner.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>

using namespace qamp;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_bad_args = 2;
constexpr int exit_numeric = 3;
constexpr int exit_config = 4;

struct GlobalOptions {
    std::string out_dir = ".";
    std::string format = "csv";
    int threads = 0;
    std::string kernels = "auto";
};

struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

cx parse_complex(const std::string& text)
{
    const auto comma = text.find(',');
    char* end = nullptr;
    if (comma == std::string::npos) {
        const double re = std::strtod(text.c_str(), &end);
        if (end == text.c_str() || *end != '\0')
            throw CLI::ValidationError("alpha", "expected 're' or 're,im'");
        return {re, 0.0};
    }
    const std::string rs = text.substr(0, comma), is = text.substr(comma + 1);
    const double re = std::strtod(rs.c_str(), &end);
    if (end == rs.c_str() || *end != '\0')
        throw CLI::ValidationError("alpha", "bad real part '" + rs + "'");
    const double im = std::strtod(is.c_str(), &end);
    if (end == is.c_str() || *end != '\0')
        throw CLI::ValidationError("alpha", "bad imaginary part '" + is + "'");
    return {re, im};
}

// writes the table (and later the manifest) into out_dir
class OutputWriter {
public:
    OutputWriter(const GlobalOptions& g, std::string command, std::string run_stem,
                 std::uint64_t seed = 0)
        : global_(g), run_stem_(std::move(run_stem))
    {
        manifest_.command = std::move(command);
        manifest_.kernel_backend = kernels::backend().name;
        manifest_.seed = seed;
    }

    void param(const std::string& key, const std::string& value)
    {
        manifest_.parameters[key] = value;
    }
    void param(const std::string& key, double value)
    {
        manifest_.parameters[key] = format_double(value);
    }

    std::string manifest_name() const { return run_stem_ + ".manifest"; }
    const std::string& stem() const { return run_stem_; }

    void table(const std::string& stem, CsvTable t)
    {
        t.comments.insert(t.comments.begin(), "qamp " + std::string(tool_version));
        t.comments.push_back("manifest: " + manifest_name());
        const bool json = global_.format == "json";
        const std::string name = stem + (json ? ".json" : ".csv");
        const std::string body = json ? t.to_json() : t.to_csv();
        write(name, body);
    }

    void write(const std::string& name, const std::string& bytes)
    {
        const auto path = std::filesystem::path(global_.out_dir) / name;
        write_file(path.string(), bytes);
        manifest_.outputs.emplace_back(name, checksum_hex(bytes));
        std::cout << "wrote " << path.string() << "\n";
    }

    void finish()
    {
        const auto path = std::filesystem::path(global_.out_dir) / manifest_name();
        write_file(path.string(), manifest_.to_text());
        std::cout << "wrote " << path.string() << "\n";
    }

private:
    const GlobalOptions& global_;
    std::string run_stem_;
    RunManifest manifest_;
};

AmplifierSpec make_spec(int m, const std::string& variant, cx alpha)
{
    AmplifierSpec spec;
    spec.alpha = alpha;
    if (variant == "multiplexed") {
        spec.variant = AmplifierVariant::Multiplexed;
        spec.order = 2;
    } else {
        spec.order = m;
    }
    return spec;
}

std::string spec_label(int m, const std::string& variant)
{
    return variant == "multiplexed" ? "multiplexed" : "m" + std::to_string(m);
}

// ---- gain-curve -------------------------------------------------------------

int cmd_gain_curve(const GlobalOptions& g, int m, const std::string& variant,
                   const std::string& range, const std::string& out)
{
    OutputWriter w(g, "gain-curve", out);
    w.param("selector", spec_label(m, variant));
    w.param("alpha", range);

    CsvTable t;
    t.comments.push_back("figure: amplification gain g vs input amplitude, " +
                         spec_label(m, variant));
    t.columns = {"alpha", "gain_closed_form", "gain_numeric", "abs_diff"};
    for (double a : parse_range(range)) {
        AmplifierSpec spec = make_spec(m, variant, a);
        const double closed = gain_closed_form(spec).value;
        const double numeric = gain_numeric(spec, default_cutoff(a, 2)).value;
        const double diff = std::abs(closed - numeric);
        if (diff >= 1e-9)
            throw numeric_error("closed-form/numeric gain mismatch at alpha=" +
                                format_double(a));
        t.add_row({a, closed, numeric, diff});
    }
    w.table(out, t);
    w.finish();
    return exit_ok;
}

// ---- variance-curve -----------------------------------------------------------

int cmd_variance_curve(const GlobalOptions& g, int m, const std::string& variant,
                       const std::string& range, const std::string& out)
{
    OutputWriter w(g, "variance-curve", out);
    w.param("selector", spec_label(m, variant));
    w.param("alpha", range);

    CsvTable t;
    t.comments.push_back("figure: quadrature variances Vx, Vp vs input amplitude, " +
                         spec_label(m, variant) + " (vacuum = 1/2)");
    t.columns = {"alpha", "Vx", "Vp", "Vdet"};
    for (double a : parse_range(range)) {
        AmplifierSpec spec = make_spec(m, variant, a);
        const QuadratureVariances v = variances_closed_form(spec);
        const double vdet = deterministic_bound(gain_closed_form(spec).value);
        if (!(v.v_p < vdet))
            throw numeric_error("Vp does not beat the deterministic bound at alpha=" +
                                format_double(a));
        t.add_row({a, v.v_x, v.v_p, vdet});
    }
    w.table(out, t);
    w.finish();
    return exit_ok;
}

// ---- photon-dist ---------------------------------------------------------------

int cmd_photon_dist(const GlobalOptions& g, int m, const std::string& variant,
                    const std::string& range, const std::string& out)
{
    OutputWriter w(g, "photon-dist", out);
    w.param("selector", spec_label(m, variant));
    w.param("alpha", range);

    CsvTable t;
    t.comments.push_back(
        "figure: photon distribution of the inversely displaced amplified state, " +
        spec_label(m, variant));
    t.columns = {"alpha", "p0", "p1", "p2", "residual"};
    double max_p2 = 0.0;
    for (double a : parse_range(range)) {
        AmplifierSpec spec = make_spec(m, variant, a);
        std::vector<double> p =
            displaced_photon_distribution(spec, default_cutoff(a, 2));
        const double p0 = p.size() > 0 ? p[0] : 0.0;
        const double p1 = p.size() > 1 ? p[1] : 0.0;
        const double p2 = p.size() > 2 ? p[2] : 0.0;
        double residual = 0.0;
        for (std::size_t n = 3; n < p.size(); ++n) residual += p[n];
        if (residual >= 1e-8)
            throw numeric_error("displaced support leaks past n=2 at alpha=" +
                                format_double(a));
        max_p2 = std::max(max_p2, p2);
        t.add_row({a, p0, p1, p2, residual});
    }
    t.footers.push_back("max_p2 = " + format_double(max_p2));
    w.table(out, t);
    w.finish();
    return exit_ok;
}

// ---- fidelity-comparison --------------------------------------------------------

int cmd_fidelity_comparison(const GlobalOptions& g, const std::string& range,
                            const std::string& out)
{
    OutputWriter w(g, "fidelity-comparison", out);
    w.param("alpha", range);

    CsvTable t;
    t.comments.push_back("figure: mutual fidelity of the two amplifier variants and "
                         "coherent-state fidelities");
    t.columns = {"alpha", "F_mutual", "F_coh_m1", "F_coh_m2"};
    double min_mutual = 1.0, min_c1 = 1.0, min_c2 = 1.0;
    for (double a : parse_range(range)) {
        const double fm = mutual_fidelity_closed_form(a);
        const int cutoff = default_cutoff(2.0 * a + 1.0, 2);
        const double f1 =
            coherent_fidelity({1, AmplifierVariant::AddThenSubtract, a}, cutoff);
        const double f2 =
            coherent_fidelity({2, AmplifierVariant::AddThenSubtract, a}, cutoff);
        min_mutual = std::min(min_mutual, fm);
        min_c1 = std::min(min_c1, f1);
        min_c2 = std::min(min_c2, f2);
        t.add_row({a, fm, f1, f2});
    }
    t.footers.push_back("min_F_mutual = " + format_double(min_mutual));
    t.footers.push_back("min_F_coh_m1 = " + format_double(min_c1));
    t.footers.push_back("min_F_coh_m2 = " + format_double(min_c2));
    w.table(out, t);
    w.finish();
    return exit_ok;
}

// ---- wigner ------------------------------------------------------------------

int cmd_wigner(const GlobalOptions& g, const std::string& state, int m,
               const std::string& alpha_text, double span, int points,
               const std::string& layout, int max_cutoff, const std::string& out)
{
    const cx alpha = parse_complex(alpha_text);
    OutputWriter w(g, "wigner", out);
    w.param("state", state);
    w.param("m", double(m));
    w.param("alpha", alpha_text);
    w.param("span", span);
    w.param("points", double(points));
    w.param("layout", layout);

    FockVector psi;
    if (state == "vacuum") {
        psi = fock_state(0, 4);
    } else if (state == "coherent") {
        psi = coherent_state(alpha, default_cutoff(alpha, 0));
        psi.normalize();
    } else if (state == "amplified") {
        psi = amplified_state({m, AmplifierVariant::AddThenSubtract, alpha},
                              default_cutoff(alpha, m)).state;
    } else if (state == "multiplexed") {
        psi = amplified_state({2, AmplifierVariant::Multiplexed, alpha},
                              default_cutoff(alpha, 2)).state;
    } else {
        throw CLI::ValidationError("--state",
                                   "one of vacuum|coherent|amplified|multiplexed");
    }

    std::vector<double> axis = linear_axis(-span, span, std::size_t(points));
    WignerGrid grid = wigner(psi, axis, axis, max_cutoff, g.threads);

    CsvTable t;
    t.comments.push_back("figure: Wigner function of the " + state +
                         " state (vacuum-variance-1/2 axes)");
    if (layout == "long") {
        t.columns = {"x", "p", "W"};
        for (std::size_t ix = 0; ix < axis.size(); ++ix)
            for (std::size_t ip = 0; ip < axis.size(); ++ip)
                t.add_row({axis[ix], axis[ip], grid.at(ix, ip)});
    } else {
        t.columns = {"x_p"};
        for (double p : axis) t.columns.push_back(format_double(p));
        for (std::size_t ix = 0; ix < axis.size(); ++ix) {
            std::vector<double> row{axis[ix]};
            for (std::size_t ip = 0; ip < axis.size(); ++ip)
                row.push_back(grid.at(ix, ip));
            t.add_row(row);
        }
    }
    t.footers.push_back("integral = " + format_double(grid.integral()));

    SqueezingEllipse e = squeezing_ellipse(DensityOperator::pure(psi),
                                           alpha == cx(0.0) ? 0.0 : std::arg(alpha));
    t.footers.push_back("ellipse_minor = " + format_double(e.minor));
    t.footers.push_back("ellipse_major = " + format_double(e.major));
    if (e.orientation_defined)
        t.footers.push_back("ellipse_angle = " + format_double(e.angle));

    w.table(out, t);
    w.finish();
    return exit_ok;
}

// ---- simulate -----------------------------------------------------------------

template <typename Map>
std::string take(Map& kv, const std::string& key, const std::string& fallback)
{
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    std::string v = it->second;
    kv.erase(it);
    return v;
}

DetectorModel parse_detector(const std::string& text, double dark, bool at_least)
{
    DetectorModel d;
    if (text == "pnr") {
        d.kind = DetectorModel::Kind::IdealPNR;
    } else if (text == "multiplexed") {
        d.kind = DetectorModel::Kind::MultiplexedBinary;
    } else {
        throw ConfigError(0, "detector must be 'pnr' or 'multiplexed', got '" + text + "'");
    }
    d.dark_rate = dark;
    d.accept_at_least = at_least;
    return d;
}

int cmd_simulate(const GlobalOptions& g, const std::string& config_path,
                 const std::string& out)
{
    auto kv = parse_config(read_file(config_path));

    const cx alpha = parse_complex(take(kv, "pipeline.alpha", "0.8"));
    const int m = std::stoi(take(kv, "pipeline.m", "2"));
    ExperimentConfig cfg;
    cfg.alpha = alpha;
    cfg.add_order = std::stoi(take(kv, "pipeline.m_add", std::to_string(m)));
    cfg.sub_order = std::stoi(take(kv, "pipeline.m_sub", std::to_string(m)));
    cfg.squeezing = std::stod(take(kv, "pipeline.r", "0.05"));
    cfg.transmittance = std::stod(take(kv, "pipeline.transmittance", "0.9"));
    const double dark = std::stod(take(kv, "pipeline.dark_rate", "0"));
    const bool at_least = take(kv, "pipeline.accept_at_least", "false") == "true";
    const std::string det = take(kv, "pipeline.detector", "pnr");
    cfg.add_detector = parse_detector(take(kv, "pipeline.add_detector", det), dark, at_least);
    cfg.sub_detector = parse_detector(take(kv, "pipeline.sub_detector", det), dark, at_least);
    if (auto it = kv.find("pipeline.signal_cutoff"); it != kv.end()) {
        cfg.signal_cutoff = std::stoi(it->second);
        kv.erase(it);
    }

    const bool tomography = kv.count("tomography.eta") || kv.count("tomography.phases")
                         || kv.count("tomography.samples_per_phase");
    const double eta = std::stod(take(kv, "tomography.eta", "0.57"));
    const int n_phases = std::stoi(take(kv, "tomography.phases", "12"));
    const int n_per_phase = std::stoi(take(kv, "tomography.samples_per_phase", "10000"));
    const std::uint64_t seed = std::stoull(take(kv, "tomography.seed", "1"));
    const bool compensate = take(kv, "tomography.compensate", "true") == "true";
    const int rec_cutoff = std::stoi(take(kv, "tomography.cutoff", "20"));

    if (!kv.empty())
        throw ConfigError(0, "unknown config key '" + kv.begin()->first + "'");

    OutputWriter w(g, "simulate", out, seed);
    w.param("config", config_path);
    w.param("alpha", format_double(alpha.real()) + "," + format_double(alpha.imag()));
    w.param("m_add", double(cfg.add_order));
    w.param("m_sub", double(cfg.sub_order));
    w.param("r", cfg.squeezing);
    w.param("transmittance", cfg.transmittance);

    // heralded pipeline
    HeraldOutcome outcome = run_pipeline(cfg);
    const cx eff_alpha = std::sqrt(cfg.transmittance) * alpha;
    AmplifierSpec ideal_spec{cfg.add_order, AmplifierVariant::AddThenSubtract, eff_alpha};
    FockVector ideal = embed(amplified_state(ideal_spec,
                                             default_cutoff(eff_alpha, m) + 6).state,
                             outcome.state.cutoff());
    AmplifierReport theory = amplifier_report(ideal_spec);

    CsvTable stage_table;
    stage_table.comments.push_back("heralded pipeline stage record");
    stage_table.columns = {"stage", "pattern", "probability", "multipair_warning"};
    for (const StageRecord& s : outcome.stages)
        stage_table.rows.push_back({s.stage, s.pattern, format_double(s.probability),
                                    s.multipair_warning ? "1" : "0"});
    stage_table.footers.push_back("total_probability = " +
                                  format_double(outcome.probability));
    stage_table.footers.push_back(std::string("tap_regime = ") +
                                  (reference_tap_regime(cfg.transmittance)
                                       ? "reference" : "outside-reference"));
    w.table(out + "_stages", stage_table);

    MetricsRecord herald_metrics = report_metrics(outcome.state, ideal, eff_alpha);

    bool converged = true;
    std::optional<MetricsRecord> reconstructed;
    if (tomography) {
        std::vector<double> phases;
        for (int k = 0; k < n_phases; ++k)
            phases.push_back(M_PI * double(k) / double(n_phases));
        QuadratureDataset data =
            sample_quadratures(outcome.state, eta, phases, n_per_phase, seed);
        w.write(out + "_samples.csv", dataset_to_csv(data));
        w.write(out + "_samples.meta", dataset_metadata(data) + "manifest = " +
                                           w.manifest_name() + "\n");

        MaxLikOptions opts;
        opts.compensate_eta = compensate;
        ReconstructionResult rec = maxlik_reconstruct(data, rec_cutoff, opts);
        converged = rec.converged;
        reconstructed = report_metrics(rec.rho, embed(ideal, rec_cutoff), eff_alpha);
    }

    CsvTable metrics;
    metrics.comments.push_back("pipeline metrics vs ideal amplified-state theory at "
                               "the attenuated amplitude t*alpha");
    metrics.columns = {"metric", "pipeline", "reconstructed", "ideal_theory"};
    auto row = [&](const std::string& name, double sim, double rec, double th) {
        metrics.rows.push_back({name, format_double(sim), format_double(rec),
                                format_double(th)});
    };
    const MetricsRecord& hm = herald_metrics;
    const MetricsRecord rm = reconstructed.value_or(MetricsRecord{});
    row("fidelity", hm.fidelity, rm.fidelity, 1.0);
    row("purity", hm.purity, rm.purity, 1.0);
    row("gain", hm.gain, rm.gain, theory.gain);
    row("Vx", hm.v_x, rm.v_x, theory.v_x);
    row("Vp", hm.v_p, rm.v_p, theory.v_p);
    for (int n = 0; n <= 2; ++n) {
        const auto& hp = hm.displaced_probabilities;
        const auto& rp = rm.displaced_probabilities;
        const auto& tp = theory.displaced_probabilities;
        row("p" + std::to_string(n),
            n < int(hp.size()) ? hp[std::size_t(n)] : 0.0,
            n < int(rp.size()) ? rp[std::size_t(n)] : 0.0,
            n < int(tp.size()) ? tp[std::size_t(n)] : 0.0);
    }
    row("success_probability", outcome.probability, 0.0, 0.0);
    w.table(out + "_metrics", metrics);
    w.finish();

    if (!converged) {
        std::cerr << "maxlik reconstruction did not converge\n";
        return exit_numeric;
    }
    return exit_ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"truncated Fock-space simulator for conditional noiseless "
                 "amplification of coherent states"};
    app.require_subcommand(1);

    GlobalOptions g;
    if (const char* env = std::getenv("QAMP_OUT_DIR")) g.out_dir = env;
    app.add_option("--out-dir", g.out_dir, "output directory");
    app.add_option("--format", g.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--threads", g.threads, "worker threads (0 = auto)");
    app.add_option("--kernels", g.kernels, "kernel backend: auto, scalar, avx2")
        ->check(CLI::IsMember({"auto", "scalar", "avx2"}));

    int m = 2;
    std::string variant = "sequence";
    std::string range = "0:2:0.1";
    std::string out;

    auto* gain = app.add_subcommand("gain-curve", "amplification gain vs amplitude");
    gain->add_option("--m", m, "amplifier order (1 or 2)")->check(CLI::Range(1, 2));
    gain->add_option("--variant", variant, "sequence or multiplexed")
        ->check(CLI::IsMember({"sequence", "multiplexed"}));
    gain->add_option("--alpha", range, "amplitude range min:max:step");
    gain->add_option("--out", out, "output stem (default gain_curve)");

    auto* var = app.add_subcommand("variance-curve", "quadrature variances vs amplitude");
    var->add_option("--m", m)->check(CLI::Range(1, 2));
    var->add_option("--variant", variant)
        ->check(CLI::IsMember({"sequence", "multiplexed"}));
    var->add_option("--alpha", range);
    var->add_option("--out", out);

    auto* dist = app.add_subcommand("photon-dist",
                                    "displaced-frame photon distribution vs amplitude");
    dist->add_option("--m", m)->check(CLI::Range(1, 2));
    dist->add_option("--variant", variant)
        ->check(CLI::IsMember({"sequence", "multiplexed"}));
    dist->add_option("--alpha", range);
    dist->add_option("--out", out);

    auto* fid = app.add_subcommand("fidelity-comparison",
                                   "mutual and coherent-state fidelities vs amplitude");
    fid->add_option("--alpha", range);
    fid->add_option("--out", out);

    std::string state = "amplified";
    std::string alpha_text = "0.77";
    double span = 5.0;
    int points = 101;
    std::string layout = "matrix";
    int max_cutoff = -1;
    auto* wig = app.add_subcommand("wigner", "Wigner function on a phase-space grid");
    wig->add_option("--state", state, "vacuum, coherent, amplified, multiplexed");
    wig->add_option("--m", m)->check(CLI::Range(1, 4));
    wig->add_option("--alpha", alpha_text, "input amplitude re[,im]");
    wig->add_option("--span", span, "half-width of the square grid");
    wig->add_option("--points", points, "points per axis")->check(CLI::Range(2, 2001));
    wig->add_option("--layout", layout, "matrix or long")
        ->check(CLI::IsMember({"matrix", "long"}));
    wig->add_option("--max-cutoff", max_cutoff, "cap on the internal Fock cutoff");
    wig->add_option("--out", out);

    std::string config_path;
    auto* sim = app.add_subcommand("simulate",
                                   "heralded pipeline with optional tomography round trip");
    sim->add_option("--config", config_path, "key=value config file")->required();
    sim->add_option("--out", out, "output stem (default simulate)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return exit_bad_args;
    }

    if (!kernels::set_backend(g.kernels)) {
        std::cerr << "kernel backend '" << g.kernels << "' not available\n";
        return exit_bad_args;
    }

    try {
        std::filesystem::create_directories(g.out_dir);
        if (gain->parsed())
            return cmd_gain_curve(g, m, variant, range,
                                  out.empty() ? "gain_curve" : out);
        if (var->parsed())
            return cmd_variance_curve(g, m, variant, range,
                                      out.empty() ? "variance_curve" : out);
        if (dist->parsed())
            return cmd_photon_dist(g, m, variant, range,
                                   out.empty() ? "photon_dist" : out);
        if (fid->parsed())
            return cmd_fidelity_comparison(g, range,
                                           out.empty() ? "fidelity_comparison" : out);
        if (wig->parsed())
            return cmd_wigner(g, state, m, alpha_text, span, points, layout,
                              max_cutoff, out.empty() ? "wigner" : out);
        if (sim->parsed())
            return cmd_simulate(g, config_path, out.empty() ? "simulate" : out);
    } catch (const CLI::Error& e) {
        std::cerr << e.what() << "\n";
        return exit_bad_args;
    } catch (const ConfigError& e) {
        std::cerr << "config error";
        if (e.line > 0) std::cerr << " (line " << e.line << ")";
        std::cerr << ": " << e.what() << "\n";
        return exit_config;
    } catch (const zero_probability_error& e) {
        std::cerr << "zero-probability configuration: " << e.what() << "\n";
        return exit_numeric;
    } catch (const numeric_error& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return exit_numeric;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return exit_bad_args;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_numeric;
    }
    return exit_bad_args;
}
