#include "mzbell/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "mzbell/coherence.hpp"
#include "mzbell/errors.hpp"
#include "mzbell/homodyne.hpp"
#include "mzbell/report.hpp"
#include "mzbell/state_spec.hpp"

namespace mzbell {

namespace {

struct RunConfig {
    std::string state;
    std::optional<int> cutoff;
    std::optional<double> tail_eps;
    std::string beta = "auto";
    int grid = 24;
    int phases = 64;
    std::string out_path;
    std::string format = "report";
    std::string param;
    double from = 0.0;
    double to = 0.0;
    double step = 0.0;
    double g1 = 0.0;
    double g2 = 0.0;
};

QuantumState load_state(const RunConfig& cfg, StateSpec* spec_out = nullptr) {
    StateSpec spec = load_state_spec(cfg.state);
    if (spec_out) *spec_out = spec;
    return build_state(spec, BuildOptions{cfg.tail_eps, cfg.cutoff});
}

void cmd_analyze(const RunConfig& cfg, std::ostream& out) {
    StateSpec spec;
    const QuantumState state = load_state(cfg, &spec);
    const CoherenceMoments m = compute_moments(state);
    const Verdict v = local_realism_verdict(m);
    const FringeCoefficients f = fringe_coefficients(m);
    const ChshResult chsh = maximize_chsh(f, ChshSearchOptions{cfg.grid, 1e-6});

    Report report;
    report.add("state", format_state_spec(spec));
    report.add("dimension", std::to_string(state.dimension()));
    report.add("purity", state.purity());
    add_moments(report, m);
    const Complex g = g1(m);
    report.add("g1_re", g.real());
    report.add("g1_im", g.imag());
    add_verdict(report, v);
    report.add("phi1", f.phi1);
    report.add("phi2", f.phi2);
    add_chsh(report, chsh);
    report.write(out);
    if (cfg.format == "csv") {
        out << '\n' << kVerdictCsvHeader << '\n'
            << verdict_csv_row(format_state_spec(spec), v, chsh.b_value, state.purity()) << '\n';
    }
}

void cmd_fringe(const RunConfig& cfg, std::ostream& out) {
    const QuantumState state = load_state(cfg);
    const std::vector<double> phases = phase_grid(cfg.phases);
    const auto records = fringe_scan(state, phases);
    write_fringe_csv(out, records);
    const VisibilityFit fit = visibility(records);
    out << "# visibility = " << format_number(fit.visibility) << '\n';
    out << "# visibility_analytic = " << format_number(visibility_analytic(compute_moments(state))) << '\n';
}

void cmd_bell_scan(const RunConfig& cfg, std::ostream& out) {
    const QuantumState state = load_state(cfg);
    const CoherenceMoments m = compute_moments(state);
    OptimalAmplitudes betas{};
    if (cfg.beta == "auto") {
        betas = resolve_amplitudes(optimal_lo_amplitudes(m));
    } else {
        double b = 0.0;
        std::istringstream in(cfg.beta);
        if (!(in >> b) || !(in >> std::ws).eof()) throw InvalidInput("--beta must be a number or 'auto'");
        betas = OptimalAmplitudes{b, b};
    }

    const std::vector<double> angles = phase_grid(cfg.grid);
    out << kBellScanCsvHeader << '\n';
    double max_diff = 0.0;
    double max_abs_e = 0.0;
    for (double t1 : angles)
        for (double t2 : angles) {
            const auto lo1 = LocalOscillator::make(betas.beta1, t1);
            const auto lo2 = LocalOscillator::make(betas.beta2, t2);
            const double ea = modulation_depth_analytic(m, lo1, lo2);
            const double en = modulation_depth_numeric(state, lo1, lo2, DepthRoute::InputOperator,
                                                       NumericOptions{cfg.tail_eps.value_or(kPreciseTailEps), kLeakageTolerance});
            max_diff = std::max(max_diff, std::abs(ea - en));
            max_abs_e = std::max(max_abs_e, std::abs(ea));
            out << format_number(t1) << ',' << format_number(t2) << ',' << format_number(ea) << ','
                << format_number(en) << '\n';
        }
    const FringeCoefficients f = fringe_coefficients_at(m, betas.beta1, betas.beta2);
    const ChshResult chsh = maximize_chsh(f, ChshSearchOptions{cfg.grid, 1e-6});
    out << "# beta1 = " << format_number(betas.beta1) << '\n';
    out << "# beta2 = " << format_number(betas.beta2) << '\n';
    out << "# max_abs_E = " << format_number(max_abs_e) << '\n';
    out << "# max_abs_diff = " << format_number(max_diff) << '\n';
    out << "# b_max = " << format_number(chsh.b_value) << '\n';
    out << "# theta1 = " << format_number(chsh.angles.theta1) << '\n';
    out << "# theta1p = " << format_number(chsh.angles.theta1p) << '\n';
    out << "# theta2 = " << format_number(chsh.angles.theta2) << '\n';
    out << "# theta2p = " << format_number(chsh.angles.theta2p) << '\n';
}

void cmd_sweep(const RunConfig& cfg, std::ostream& out) {
    const StateSpec base = load_state_spec(cfg.state);
    if (cfg.param.empty()) throw InvalidInput("sweep needs --param");
    if (!(cfg.step > 0.0)) throw InvalidInput("sweep --step must be positive");
    if (!(cfg.to >= cfg.from)) throw InvalidInput("sweep needs --to >= --from");
    const double span = (cfg.to - cfg.from) / cfg.step;
    if (span > 1e5) throw InvalidInput("sweep has too many points");
    const int count = static_cast<int>(std::floor(span + 1e-9)) + 1;

    out << kVerdictCsvHeader << '\n';
    for (int k = 0; k < count; ++k) {
        const double value = cfg.from + k * cfg.step;
        StateSpec spec = base;
        if (cfg.param == "n") spec.params["n"] = static_cast<int>(std::lround(value));
        else spec.params[cfg.param] = value;
        const QuantumState state = build_state(spec, BuildOptions{cfg.tail_eps, cfg.cutoff});
        std::optional<Verdict> verdict;
        std::optional<double> b_max;
        try {
            const CoherenceMoments m = compute_moments(state);
            verdict = local_realism_verdict(m);
            b_max = maximize_chsh(fringe_coefficients(m), ChshSearchOptions{cfg.grid, 1e-6}).b_value;
        } catch (const DegenerateState&) {
            verdict.reset();
        }
        out << verdict_csv_row(format_state_spec(spec), verdict, b_max, state.purity()) << '\n';
    }
}

void cmd_criterion(const RunConfig& cfg, std::ostream& out) {
    const Verdict v = criterion_from_measurements(cfg.g1, cfg.g2);
    Report report;
    add_verdict(report, v);
    report.write(out);
    if (cfg.format == "csv") {
        out << '\n' << kVerdictCsvHeader << '\n' << verdict_csv_row("measured", v, std::nullopt, std::nan("")) << '\n';
    }
}

void cmd_thresholds(std::ostream& out) {
    const Thresholds t = violation_thresholds();
    Report report;
    report.add("g1_min", t.g1_min);
    report.add("g2_max", t.g2_max);
    report.write(out);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"mzbell: coherence, homodyne Bell test and local-realism criterion for two-channel states"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto add_state = [&](CLI::App* sub) {
        sub->add_option("--state", cfg.state, "state spec (inline text or JSON file)")->required();
        sub->add_option("--cutoff", cfg.cutoff, "per-mode Fock cutoff override (may only enlarge)");
        sub->add_option("--tail-eps", cfg.tail_eps, "neglected probability for coherent/thermal truncation")
            ->check(CLI::Range(1e-300, 0.5));
    };
    auto add_output = [&](CLI::App* sub) {
        sub->add_option("--out", cfg.out_path, "write output to this file instead of stdout");
        sub->add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"csv", "report"}));
    };

    auto* analyze = app.add_subcommand("analyze", "moments, g1, g2, C1, C2, CHSH maximum and verdict");
    add_state(analyze);
    add_output(analyze);
    analyze->add_option("--grid", cfg.grid, "CHSH grid points per angle")->check(CLI::Range(2, 256));

    auto* fringe = app.add_subcommand("fringe", "Mach-Zehnder fringe scan (CSV)");
    add_state(fringe);
    add_output(fringe);
    fringe->add_option("--phases", cfg.phases, "phase points over [0, 2 pi)")->check(CLI::Range(3, 100000));

    auto* bell = app.add_subcommand("bell-scan", "modulation depth over a local-oscillator phase grid (CSV)");
    add_state(bell);
    add_output(bell);
    bell->add_option("--beta", cfg.beta, "local-oscillator amplitude, or 'auto' for the optimal choice");
    bell->add_option("--grid", cfg.grid, "angle grid points per axis")->check(CLI::Range(3, 1024));

    auto* sweep = app.add_subcommand("sweep", "verdict for each value of one family parameter (CSV)");
    add_state(sweep);
    add_output(sweep);
    sweep->add_option("--param", cfg.param, "family parameter to sweep")->required();
    sweep->add_option("--from", cfg.from, "first value")->required();
    sweep->add_option("--to", cfg.to, "last value (inclusive)")->required();
    sweep->add_option("--step", cfg.step, "increment")->required();
    sweep->add_option("--grid", cfg.grid, "CHSH grid points per angle")->check(CLI::Range(2, 256));

    auto* criterion = app.add_subcommand("criterion", "verdict from a measured visibility and coincidence rate");
    criterion->add_option("g1", cfg.g1, "visibility |g1| in [0, 1]")->required();
    criterion->add_option("g2", cfg.g2, "coincidence rate g2 >= 0")->required();
    add_output(criterion);

    auto* thresholds = app.add_subcommand("thresholds", "minimal g1 and maximal g2 for a violation");
    add_output(thresholds);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    }

    std::ostringstream buffer;
    try {
        if (analyze->parsed()) cmd_analyze(cfg, buffer);
        else if (fringe->parsed()) cmd_fringe(cfg, buffer);
        else if (bell->parsed()) cmd_bell_scan(cfg, buffer);
        else if (sweep->parsed()) cmd_sweep(cfg, buffer);
        else if (criterion->parsed()) cmd_criterion(cfg, buffer);
        else if (thresholds->parsed()) cmd_thresholds(buffer);
    } catch (const InvalidInput& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const DimensionLimit& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const DegenerateState& e) {
        err << "error: DegenerateState: " << e.what() << '\n';
        return kExitDegenerate;
    } catch (const DegenerateDenominator& e) {
        err << "error: DegenerateDenominator: " << e.what() << '\n';
        return kExitDegenerate;
    } catch (const TruncationLeakage& e) {
        err << "error: TruncationLeakage: " << e.what() << '\n';
        return kExitLeakage;
    }

    if (cfg.out_path.empty()) {
        out << buffer.str();
    } else {
        std::ofstream file(cfg.out_path, std::ios::binary);
        if (!file) {
            err << "error: cannot write " << cfg.out_path << '\n';
            return kExitInput;
        }
        file << buffer.str();
    }
    return kExitOk;
}

}  // namespace mzbell
