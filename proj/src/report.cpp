#include "mzbell/report.hpp"

#include <cmath>
#include <cstdio>

namespace mzbell {

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    char buf[64];
    // keep "-0" out of reports
    std::snprintf(buf, sizeof buf, "%.15g", x == 0.0 ? 0.0 : x);
    return buf;
}

std::string format_bool(bool b) { return b ? "true" : "false"; }

std::string csv_field(const std::string& text) {
    if (text.find_first_of(",\"\n") == std::string::npos) return text;
    std::string quoted = "\"";
    for (char c : text) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    return quoted + "\"";
}

void Report::write(std::ostream& out) const {
    for (const auto& [key, value] : lines_) out << key << " = " << value << '\n';
}

void add_moments(Report& report, const CoherenceMoments& m) {
    report.add("m12_re", m.m12.real());
    report.add("m12_im", m.m12.imag());
    report.add("anom_re", m.anom.real());
    report.add("anom_im", m.anom.imag());
    report.add("n1", m.n1);
    report.add("n2", m.n2);
    report.add("n1n2", m.n1n2);
}

void add_verdict(Report& report, const Verdict& v) {
    const double nan = std::nan("");
    report.add("g1", v.g1_mag);
    report.add("g2", v.g2);
    report.add("c1", v.c1);
    report.add("c2", v.c2.value_or(nan));
    report.add("thw_sum", v.thw_sum.value_or(nan));
    report.add("tg_margin", v.tg_margin);
    report.add("bell_margin", v.bell_margin);
    report.add("violates_bell", v.violates_bell);
    report.add("violates_classical", v.violates_classical);
}

void add_chsh(Report& report, const ChshResult& r) {
    report.add("b_max", r.b_value);
    report.add("theta1", r.angles.theta1);
    report.add("theta1p", r.angles.theta1p);
    report.add("theta2", r.angles.theta2);
    report.add("theta2p", r.angles.theta2p);
}

void write_fringe_csv(std::ostream& out, std::span<const FringeRecord> records) {
    out << kFringeCsvHeader << '\n';
    for (const auto& r : records)
        out << format_number(r.phase) << ',' << format_number(r.intensity_c) << ',' << format_number(r.intensity_d)
            << ',' << format_number(r.coincidence) << '\n';
}

std::string verdict_csv_row(const std::string& state_id, const std::optional<Verdict>& verdict,
                            std::optional<double> b_max, double purity) {
    const double nan = std::nan("");
    std::string row = csv_field(state_id);
    auto field = [&](const std::string& s) { row += "," + s; };
    if (verdict) {
        field(format_number(verdict->g1_mag));
        field(format_number(verdict->g2));
        field(format_number(verdict->c1));
        field(format_number(verdict->c2.value_or(nan)));
        field(format_number(verdict->thw_sum.value_or(nan)));
        field(format_number(b_max.value_or(nan)));
        field(format_bool(verdict->violates_bell));
        field(format_bool(verdict->violates_classical));
    } else {
        for (int k = 0; k < 6; ++k) field("nan");
        field("false");
        field("false");
    }
    field(format_number(purity));
    return row;
}

}  // namespace mzbell
