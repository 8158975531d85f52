#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mzbell/catalog.hpp"
#include "mzbell/cli.hpp"
#include "mzbell/coherence.hpp"
#include "mzbell/errors.hpp"
#include "mzbell/report.hpp"
#include "mzbell/state_spec.hpp"

using namespace mzbell;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::map<std::string, std::string> parse_report(const std::string& text) {
    std::map<std::string, std::string> values;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] == '#') line = line.substr(2);
        const auto eq = line.find(" = ");
        if (eq != std::string::npos) values[line.substr(0, eq)] = line.substr(eq + 3);
    }
    return values;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (char c : line) {
        if (c == '"') quoted = !quoted;
        else if (c == ',' && !quoted) {
            fields.push_back(field);
            field.clear();
        } else field += c;
    }
    fields.push_back(field);
    return fields;
}

std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("mzbell_test_" + name);
}

}  // namespace

TEST_CASE("number formatting") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(1.0 / 3.0) == "0.333333333333333");
    CHECK(format_number(-0.0) == "0");
    CHECK(format_number(std::nan("")) == "nan");
    CHECK(format_number(1e-20) == "1e-20");
    CHECK(csv_field("plain") == "plain");
    CHECK(csv_field("a,b") == "\"a,b\"");
    CHECK(csv_field("say \"x\"") == "\"say \"\"x\"\"\"");
}

TEST_CASE("inline state specs") {
    auto s = parse_state_spec("split_coherent alpha_re=0.5 alpha_im=-0.25");
    CHECK(s.family == "split_coherent");
    CHECK(s.params["alpha_re"].get<double>() == 0.5);
    CHECK(s.params["alpha_im"].get<double>() == -0.25);
    CHECK(format_state_spec(s) == "split_coherent alpha_re=0.5 alpha_im=-0.25");
    CHECK(parse_state_spec(format_state_spec(s)).params == s.params);

    auto explicit_state = build_state(parse_state_spec("pure_explicit cutoffs=1,1 amplitudes=[0,0.7071,0.7071i,0]"));
    const auto m = compute_moments(explicit_state);
    CHECK(std::abs(std::abs(g1(m)) - 1.0) < 1e-12);

    auto ensemble = build_state(
        parse_state_spec("mixed_ensemble [0.5: split_single_photon; 0.5: split_coherent alpha_re=0.2 alpha_im=0]"));
    CHECK_FALSE(ensemble.is_pure());
    CHECK(std::abs(ensemble.trace() - 1.0) < 1e-12);

    auto with_cutoff = build_state(parse_state_spec("split_single_photon cutoff=3"));
    CHECK(with_cutoff.system().cutoffs() == std::vector<int>{3, 3});

    CHECK_THROWS_AS(parse_state_spec("nonsense"), InvalidInput);
    CHECK_THROWS_AS(parse_state_spec("split_number"), InvalidInput);
    CHECK_THROWS_AS(parse_state_spec("split_number n=two"), InvalidInput);
    CHECK_THROWS_AS(parse_state_spec("split_thermal nbar=1 extra=2"), InvalidInput);
    CHECK_THROWS_AS(build_state(parse_state_spec("incoherent_anticorrelated p=2")), InvalidInput);
}

TEST_CASE("json state specs and snapshots round-trip") {
    auto spec = parse_state_spec("noisy_split_photon w=0.9 alpha_re=0.2 alpha_im=0.1");
    auto again = state_spec_from_json(state_spec_to_json(spec));
    CHECK(again.family == spec.family);
    CHECK(again.params == spec.params);

    const auto original = build_state(spec);
    const auto snap = snapshot_state(original);
    CHECK(snap.family == "density_explicit");
    const auto rebuilt = build_state(state_spec_from_json(state_spec_to_json(snap)));
    CHECK((rebuilt.to_density() - original.to_density()).cwiseAbs().maxCoeff() == 0.0);

    const auto pure_snap = snapshot_state(split_single_photon());
    CHECK(pure_snap.family == "pure_explicit");
    CHECK((build_state(pure_snap).amplitudes() - split_single_photon().amplitudes()).norm() == 0.0);

    const auto path = temp_path("spec.json");
    std::ofstream(path) << R"({"family": "split_coherent", "params": {"alpha_re": 0.5, "alpha_im": 0}, "cutoff": 12})";
    auto loaded = load_state_spec(path.string());
    CHECK(loaded.family == "split_coherent");
    CHECK(loaded.cutoff == 12);
    CHECK(build_state(loaded).system().cutoff(0) == 12);
    std::filesystem::remove(path);

    CHECK_THROWS_AS(state_spec_from_json(nlohmann::json{{"params", nlohmann::json::object()}}), InvalidInput);
}

TEST_CASE("analyze reports") {
    auto split = run({"analyze", "--state", "split_single_photon"});
    CHECK(split.code == 0);
    auto r = parse_report(split.out);
    CHECK(r["g1"] == "1");
    CHECK(r["g2"] == "0");
    CHECK(r["c1"] == "1");
    CHECK(r["violates_bell"] == "true");
    CHECK(r["violates_classical"] == "true");
    CHECK(std::abs(std::stod(r["b_max"]) - 2 * std::sqrt(2.0)) < 1e-5);
    for (const char* key : {"m12_re", "m12_im", "anom_re", "anom_im", "n1", "n2", "n1n2", "c2", "tg_margin",
                            "bell_margin", "theta1", "theta1p", "theta2", "theta2p"})
        CHECK(r.count(key) == 1);

    auto incoherent = parse_report(run({"analyze", "--state", "incoherent_anticorrelated p=0.5"}).out);
    CHECK(incoherent["c1"] == "0");
    CHECK(incoherent["violates_bell"] == "false");
    CHECK(incoherent["violates_classical"] == "false");

    auto thermal = parse_report(run({"analyze", "--state", "split_thermal nbar=1"}).out);
    CHECK(std::abs(std::stod(thermal["g2"]) - 2.0) < 1e-8);
    CHECK(thermal["violates_bell"] == "false");
    CHECK(thermal["violates_classical"] == "false");

    auto csv = run({"analyze", "--state", "split_single_photon", "--format", "csv"});
    const auto lines = lines_of(csv.out);
    REQUIRE(lines.size() >= 2);
    CHECK(lines[lines.size() - 2] == kVerdictCsvHeader);
    CHECK(lines.back().rfind("split_single_photon,1,0,1,", 0) == 0);
}

TEST_CASE("exit codes") {
    CHECK(run({"analyze", "--state", "bogus"}).code == 2);
    CHECK(run({"analyze"}).code == 2);
    CHECK(run({}).code == 2);
    CHECK(run({"analyze", "--state", "split_number n=1", "--cutoff", "0"}).code == 2);
    CHECK(run({"criterion", "1.2", "0"}).code == 2);
    CHECK(run({"criterion", "abc", "0"}).code == 2);
    CHECK(run({"fringe", "--state", "split_single_photon", "--phases", "2"}).code == 2);

    auto degenerate = run({"analyze", "--state", "incoherent_anticorrelated p=1"});
    CHECK(degenerate.code == 3);
    CHECK(degenerate.err.find("DegenerateState") != std::string::npos);
    auto dark = run({"bell-scan", "--state", "split_single_photon", "--beta", "0", "--grid", "4"});
    CHECK(dark.code == 3);
    CHECK(dark.err.find("DegenerateDenominator") != std::string::npos);
    CHECK(run({"analyze", "--help"}).code == 0);
}

TEST_CASE("criterion and thresholds commands") {
    auto measured = parse_report(run({"criterion", "0.98", "0.18"}).out);
    CHECK(measured["c1"] == "0.688074649588183");
    CHECK(measured["violates_bell"] == "false");
    CHECK(measured["violates_classical"] == "true");
    CHECK(measured["c2"] == "nan");

    CHECK(parse_report(run({"criterion", "1", "0"}).out)["violates_bell"] == "true");
    auto edge = parse_report(run({"criterion", "0.7071067811865476", "0"}).out);
    CHECK(edge["violates_bell"] == "false");
    CHECK(edge["bell_margin"] == "0");

    auto t = parse_report(run({"thresholds"}).out);
    CHECK(t["g1_min"] == "0.707106781186548");
    CHECK(t["g2_max"] == "0.17157287525381");
}

TEST_CASE("fringe command") {
    auto split = run({"fringe", "--state", "split_single_photon"});
    CHECK(split.code == 0);
    const auto lines = lines_of(split.out);
    CHECK(lines.front() == "phase,intensity_c,intensity_d,coincidence");
    int rows = 0;
    for (const auto& l : lines)
        if (l[0] != '#' && l != lines.front()) ++rows;
    CHECK(rows == 64);
    CHECK(std::abs(std::stod(parse_report(split.out)["visibility"]) - 1.0) < 1e-9);

    auto flat = run({"fringe", "--state", "incoherent_anticorrelated p=0.5"});
    CHECK(std::abs(std::stod(parse_report(flat.out)["visibility"])) < 1e-12);
}

TEST_CASE("bell-scan command") {
    auto split = run({"bell-scan", "--state", "split_single_photon", "--grid", "8"});
    CHECK(split.code == 0);
    CHECK(lines_of(split.out).front() == "theta1,theta2,E_analytic,E_numeric");
    auto r = parse_report(split.out);
    CHECK(std::abs(std::stod(r["max_abs_E"]) - 1.0 / (1.0 + 1e-4)) < 1e-9);
    CHECK(std::stod(r["max_abs_diff"]) <= 1e-8);
    CHECK(std::stod(r["b_max"]) < 2 * std::sqrt(2.0));
    CHECK(std::stod(r["b_max"]) > 2 * std::sqrt(2.0) * (1 - 2e-4));

    auto coh = run({"bell-scan", "--state", "split_coherent alpha_re=0.5 alpha_im=0", "--grid", "6"});
    CHECK(coh.code == 0);
    auto rc = parse_report(coh.out);
    CHECK(std::abs(std::stod(rc["b_max"]) - 2.0) < 1e-3);
    CHECK(std::stod(rc["max_abs_diff"]) <= 1e-8);
}

TEST_CASE("sweep command") {
    auto noisy = run({"sweep", "--state", "noisy_split_photon w=0.8 alpha_re=0.2 alpha_im=0", "--param", "w",
                      "--from", "0.8", "--to", "1.0", "--step", "0.01"});
    CHECK(noisy.code == 0);
    const auto lines = lines_of(noisy.out);
    REQUIRE(lines.size() == 22);
    CHECK(lines.front() == kVerdictCsvHeader);
    double previous_g2 = 2.0;
    bool mixed_violation = false;
    for (std::size_t k = 1; k < lines.size(); ++k) {
        const auto f = split_csv(lines[k]);
        REQUIRE(f.size() == 10);
        const double g2 = std::stod(f[2]);
        CHECK(g2 < previous_g2);
        previous_g2 = g2;
        if (f[7] == "true" && std::stod(f[9]) < 1.0 - 1e-6) mixed_violation = true;
    }
    CHECK(mixed_violation);
    CHECK(lines.back().rfind("noisy_split_photon w=1 ", 0) == 0);

    // a stronger background reaches g1 = 0.98, g2 = 0.18 territory and crosses the bound
    auto wide = run({"sweep", "--state", "noisy_split_photon w=0 alpha_re=0.6 alpha_im=0", "--param", "w", "--from",
                     "0", "--to", "1", "--step", "0.01"});
    bool near_measured = false;
    bool violating = false;
    for (const auto& line : lines_of(wide.out)) {
        if (line == kVerdictCsvHeader) continue;
        const auto f = split_csv(line);
        const double g1 = std::stod(f[1]);
        const double g2 = std::stod(f[2]);
        if (g1 >= 0.98 && std::abs(g2 - 0.18) < 0.01 && f[7] == "false" && f[8] == "true") near_measured = true;
        if (g2 < 0.17 && f[7] == "true") violating = true;
    }
    CHECK(near_measured);
    CHECK(violating);

    auto incoherent = run({"sweep", "--state", "incoherent_anticorrelated p=0.5", "--param", "p", "--from", "0", "--to",
                           "1", "--step", "0.25"});
    CHECK(incoherent.code == 0);
    for (const auto& line : lines_of(incoherent.out)) {
        if (line == kVerdictCsvHeader) continue;
        const auto f = split_csv(line);
        CHECK((f[3] == "0" || f[3] == "nan"));
    }

    CHECK(run({"sweep", "--state", "split_thermal nbar=1", "--param", "nbar", "--from", "1", "--to", "0", "--step",
               "0.1"})
              .code == 2);
    CHECK(run({"sweep", "--state", "split_thermal nbar=1", "--param", "bogus", "--from", "0", "--to", "1", "--step",
               "0.5"})
              .code == 2);
}

TEST_CASE("output is deterministic and --out writes the same bytes") {
    const std::vector<std::string> args{"analyze", "--state", "noisy_split_photon w=0.95 alpha_re=0.3 alpha_im=0.1"};
    const auto first = run(args);
    const auto second = run(args);
    CHECK(first.out == second.out);

    const auto path = temp_path("out.txt");
    auto with_out = args;
    with_out.push_back("--out");
    with_out.push_back(path.string());
    CHECK(run(with_out).out.empty());
    std::ifstream in(path);
    std::stringstream content;
    content << in.rdbuf();
    CHECK(content.str() == first.out);
    std::filesystem::remove(path);

    const std::vector<std::string> scan{"bell-scan", "--state", "split_coherent alpha_re=0.3 alpha_im=0.2", "--grid",
                                        "5"};
    CHECK(run(scan).out == run(scan).out);
}
