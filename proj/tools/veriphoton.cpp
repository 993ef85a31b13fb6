#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "veriphoton/experiment.hpp"
#include "veriphoton/parallel.hpp"
#include "veriphoton/phasernd.hpp"
#include "veriphoton/photonics.hpp"
#include "veriphoton/protocol2.hpp"
#include "veriphoton/selftest.hpp"

namespace vp = veriphoton;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSelftestFailed = 1;
constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed,
            std::optional<std::uint64_t> trials, const std::string& out_dir, const std::string& format) {
    vp::ExperimentConfig config = vp::load_experiment(config_path);
    if (seed) config.run.seed = *seed;
    if (trials) config.run.trials = *trials;
    if (!out_dir.empty()) config.out_dir = out_dir;
    const vp::ExperimentOutput out = vp::run_experiment(config, vp::default_threads());
    if (config.out_dir) vp::write_outputs(out, *config.out_dir);
    std::cout << (format == "jsonl" ? out.results_jsonl : out.summary_csv);
    return kExitOk;
}

int cmd_bounds(int n, double f, std::optional<int> m, std::optional<double> alpha) {
    const auto rec = vp::recommended_params(n, f);
    const int m_used = m.value_or(rec.m);
    const double alpha_used = alpha.value_or(rec.alpha);
    vp::validate_pulse_params(m_used, alpha_used);
    std::cout << "N,f,m_recommended,alpha_recommended,m,alpha,gap_lower_bound,vacuum_threshold,"
                 "honest_reject_bound,survivor_lower_bound\n"
              << n << ',' << vp::format_number(f) << ',' << rec.m << ',' << vp::format_number(rec.alpha) << ','
              << m_used << ',' << vp::format_number(alpha_used) << ','
              << vp::format_number(vp::gap_lower_bound(n, f)) << ','
              << vp::format_number(vp::vacuum_threshold(m_used, alpha_used)) << ','
              << vp::format_number(vp::honest_reject_bound(m_used, alpha_used, n)) << ','
              << vp::format_number(vp::survivor_lower_bound(m_used, alpha_used)) << '\n';
    return kExitOk;
}

int cmd_phaserand(int m, int n, double f) {
    const auto row = vp::phaserand_row(m, n, f);
    std::cout << "m,N,f,R,F_series,F_min,shift_bound\n"
              << row.m << ',' << row.n_qubits << ',' << vp::format_number(row.f) << ',' << row.R << ','
              << vp::format_number(row.f_series) << ',' << vp::format_number(row.f_min) << ','
              << vp::format_number(row.shift_bound) << '\n';
    return kExitOk;
}

int cmd_selftest(const std::string& mutate) {
    vp::SelftestOptions options;
    if (mutate == "phi-sign") {
        options.phi = vp::phi_sign_flipped;
    } else if (!mutate.empty()) {
        throw vp::ValidationError("unknown mutation '" + mutate + "'");
    }
    for (const auto& r : vp::run_selftest(options)) {
        if (r.passed) {
            std::cout << "[PASS] " << r.name << '\n';
        } else {
            std::cout << "[FAIL] " << r.name << ": " << r.detail << '\n';
            std::cerr << "selftest failed: " << r.name << '\n';
            return kExitSelftestFailed;
        }
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulator for verification with phase-randomized coherent light"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> trials;
    std::string out_dir;
    std::string format = "csv";
    auto* run = app.add_subcommand("run", "Run an experiment file");
    run->add_option("--config", config_path, "Experiment JSON")->required();
    run->add_option("--seed", seed, "Override the master seed");
    run->add_option("--trials", trials, "Override the trial count");
    run->add_option("--out", out_dir, "Output directory");
    run->add_option("--format", format, "Summary printed to stdout")->check(CLI::IsMember({"csv", "jsonl"}));

    int n = 2;
    double f = 10.0;
    std::optional<int> m;
    std::optional<double> alpha;
    auto* bounds = app.add_subcommand("bounds", "Print recommended parameters and bounds");
    bounds->add_option("--n", n, "Number of qubits N")->required();
    bounds->add_option("--f", f, "Gap polynomial value f")->required();
    bounds->add_option("--m", m, "Pulses per repetition");
    bounds->add_option("--alpha", alpha, "Coherent amplitude");

    int pr_m = 75;
    int pr_n = 2;
    double pr_f = 10.0;
    auto* phaserand = app.add_subcommand("phaserand", "Discrete phase randomization table");
    phaserand->add_option("--m", pr_m, "Pulses per repetition")->required();
    phaserand->add_option("--n", pr_n, "Number of qubits N")->required();
    phaserand->add_option("--f", pr_f, "Gap polynomial value f")->required();

    std::string mutate;
    auto* selftest = app.add_subcommand("selftest", "Run oracle-equivalence suites");
    selftest->add_option("--mutate", mutate, "Inject a known defect (phi-sign)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (*run) return cmd_run(config_path, seed, trials, out_dir, format);
        if (*bounds) return cmd_bounds(n, f, m, alpha);
        if (*phaserand) return cmd_phaserand(pr_m, pr_n, pr_f);
        if (*selftest) return cmd_selftest(mutate);
    } catch (const vp::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const vp::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const vp::QuantumError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return kExitOk;
}
