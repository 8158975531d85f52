#pragma once

// Plain-text output: stable `key = value` reports and CSV rows, numbers
// always printed with 15 significant digits.

#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mzbell/coherence.hpp"
#include "mzbell/homodyne.hpp"

namespace mzbell {

std::string format_number(double x);
std::string format_bool(bool b);
std::string csv_field(const std::string& text);

class Report {
public:
    void add(std::string key, std::string value) { lines_.emplace_back(std::move(key), std::move(value)); }
    void add(std::string key, double value) { add(std::move(key), format_number(value)); }
    void add(std::string key, bool value) { add(std::move(key), format_bool(value)); }
    void add(std::string key, const char* value) { add(std::move(key), std::string(value)); }

    void write(std::ostream& out) const;
    const std::vector<std::pair<std::string, std::string>>& lines() const { return lines_; }

private:
    std::vector<std::pair<std::string, std::string>> lines_;
};

void add_moments(Report& report, const CoherenceMoments& m);
void add_verdict(Report& report, const Verdict& v);
void add_chsh(Report& report, const ChshResult& r);

inline constexpr const char* kFringeCsvHeader = "phase,intensity_c,intensity_d,coincidence";
inline constexpr const char* kBellScanCsvHeader = "theta1,theta2,E_analytic,E_numeric";
inline constexpr const char* kVerdictCsvHeader =
    "state_id,g1,g2,c1,c2,thw_sum,b_max,violates_bell,violates_classical,purity";

void write_fringe_csv(std::ostream& out, std::span<const FringeRecord> records);

// One sweep / analyze row. Absent values (no c2 from bare measurements,
// degenerate states) are written as `nan`.
std::string verdict_csv_row(const std::string& state_id, const std::optional<Verdict>& verdict,
                            std::optional<double> b_max, double purity);

}  // namespace mzbell
