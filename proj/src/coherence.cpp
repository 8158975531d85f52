#include "mzbell/coherence.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mzbell/errors.hpp"

namespace mzbell {

CoherenceMoments compute_moments(const QuantumState& state, int mode1, int mode2) {
    if (state.mode_count() < 2) throw InvalidInput("coherence moments need at least two modes");
    if (mode1 == mode2) throw InvalidInput("coherence moments need two distinct modes");
    CoherenceMoments m;
    m.m12 = expect_normal_ordered(state, {LadderPower{mode1, 1, 0}, LadderPower{mode2, 0, 1}});
    m.anom = expect_normal_ordered(state, {LadderPower{mode1, 0, 1}, LadderPower{mode2, 0, 1}});
    m.n1 = expect_normal_ordered(state, {LadderPower{mode1, 1, 1}}).real();
    m.n2 = expect_normal_ordered(state, {LadderPower{mode2, 1, 1}}).real();
    // distinct modes commute, so <n1 n2> is already normally ordered
    m.n1n2 = expect_normal_ordered(state, {LadderPower{mode1, 1, 1}, LadderPower{mode2, 1, 1}}).real();
    return m;
}

namespace {

double checked_intensity_product(const CoherenceMoments& m) {
    const double product = m.n1 * m.n2;
    if (!(product > kDegeneracyFloor) || m.n1 <= 0.0 || m.n2 <= 0.0)
        throw DegenerateState("coherence undefined: a channel has zero mean photon number");
    return product;
}

}  // namespace

Complex g1(const CoherenceMoments& m) { return m.m12 / std::sqrt(checked_intensity_product(m)); }

double g2(const CoherenceMoments& m) { return m.n1n2 / checked_intensity_product(m); }

double titulaer_glauber_margin(const CoherenceMoments& m) { return g2(m) - std::norm(g1(m)); }

std::vector<double> phase_grid(int count) {
    if (count < 1) throw InvalidInput("phase grid needs at least one point");
    std::vector<double> phases(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) phases[static_cast<std::size_t>(k)] = 2.0 * std::numbers::pi * k / count;
    return phases;
}

std::vector<FringeRecord> fringe_scan(const QuantumState& state, std::span<const double> phases) {
    if (state.mode_count() != 2) throw InvalidInput("fringe scan expects a two-mode state");
    const int total = state.system().cutoff(0) + state.system().cutoff(1);
    const QuantumState padded = embed(state, {total, total});

    std::vector<FringeRecord> records;
    records.reserve(phases.size());
    for (double phi : phases) {
        const QuantumState shifted = apply_phase(padded, 0, phi);
        const Transformed out = apply_beamsplitter(shifted, 0, 1);
        FringeRecord r;
        r.phase = phi;
        r.intensity_c = mean_photons(out.state, 0);
        r.intensity_d = mean_photons(out.state, 1);
        r.coincidence = expect_normal_ordered(out.state, {LadderPower{0, 1, 1}, LadderPower{1, 1, 1}}).real();
        records.push_back(r);
    }
    return records;
}

VisibilityFit visibility(std::span<const FringeRecord> records) {
    const auto n = static_cast<Eigen::Index>(records.size());
    if (n < 3) throw InvalidInput("visibility fit needs at least three fringe records");
    auto [lo, hi] = std::minmax_element(records.begin(), records.end(),
                                        [](const auto& a, const auto& b) { return a.phase < b.phase; });
    const double span = hi->phase - lo->phase;
    if (span < 2.0 * std::numbers::pi * static_cast<double>(n - 1) / static_cast<double>(n) - 1e-9)
        throw InvalidInput("fringe records do not cover a full period");

    Eigen::MatrixXd design(n, 3);
    Eigen::VectorXd intensity(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto& r = records[static_cast<std::size_t>(k)];
        design(k, 0) = 1.0;
        design(k, 1) = std::cos(r.phase);
        design(k, 2) = std::sin(r.phase);
        intensity(k) = r.intensity_c;
    }
    const Eigen::Vector3d coeff = design.colPivHouseholderQr().solve(intensity);
    VisibilityFit fit;
    fit.offset = coeff(0);
    fit.amplitude = std::hypot(coeff(1), coeff(2));
    fit.phase = std::atan2(-coeff(2), coeff(1));
    if (!(fit.offset > kDegeneracyFloor)) throw InvalidInput("fringe fit failed: no mean intensity");
    fit.visibility = fit.amplitude / fit.offset;
    return fit;
}

double visibility_analytic(const CoherenceMoments& m) {
    const double total = m.n1 + m.n2;
    if (!(total > kDegeneracyFloor)) throw DegenerateState("visibility undefined: no light in either channel");
    return 2.0 * std::abs(m.m12) / total;
}

}  // namespace mzbell
