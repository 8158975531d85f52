#include "mzbell/homodyne.hpp"

#include <cmath>
#include <numbers>

#include "mzbell/errors.hpp"

namespace mzbell {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Eigen-branches of a mixed input with |weight| below this are dropped.
constexpr double kBranchWeightFloor = 1e-15;

double wrap_angle(double theta) {
    double t = std::fmod(theta, kTwoPi);
    if (t < 0.0) t += kTwoPi;
    if (t >= kTwoPi) t = 0.0;
    return t;
}

// Mode layout of the four-mode system: a1, a2, b1, b2.
constexpr int kA1 = 0;
constexpr int kA2 = 1;
constexpr int kB1 = 2;
constexpr int kB2 = 3;

double number_product(const QuantumState& s, int i, int j) {
    return expect_normal_ordered(s, {LadderPower{i, 1, 1}, LadderPower{j, 1, 1}}).real();
}

DepthTerms correlations_unitary(const QuantumState& full, const NumericOptions& options) {
    const auto& cut = full.system().cutoffs();
    const int k1 = cut[kA1] + cut[kB1];
    const int k2 = cut[kA2] + cut[kB2];
    const QuantumState padded = embed(full, {k1, k2, k1, k2});
    BeamsplitterOptions bs{BeamsplitterDirection::Forward, options.leakage_tolerance};
    const QuantumState once = apply_beamsplitter(padded, kA1, kB1, bs).state;
    const QuantumState out = apply_beamsplitter(once, kA2, kB2, bs).state;
    // after the beamsplitters modes a_k / b_k hold the outputs c_k / d_k
    const double cc = number_product(out, kA1, kA2);
    const double cd = number_product(out, kA1, kB2);
    const double dc = number_product(out, kB1, kA2);
    const double dd = number_product(out, kB1, kB2);
    return DepthTerms{cc - cd - dc + dd, cc + cd + dc + dd};
}

DepthTerms correlations_input(const QuantumState& full) {
    auto term = [&](int a1c, int a1a, int b1c, int b1a, int a2c, int a2a, int b2c, int b2a) {
        return expect_normal_ordered(full, {LadderPower{kA1, a1c, a1a}, LadderPower{kB1, b1c, b1a},
                                            LadderPower{kA2, a2c, a2a}, LadderPower{kB2, b2c, b2a}});
    };
    // D1 D2 = -(a1^dag b1 - a1 b1^dag)(a2^dag b2 - a2 b2^dag)
    const Complex pp = term(1, 0, 0, 1, 1, 0, 0, 1);
    const Complex pm = term(1, 0, 0, 1, 0, 1, 1, 0);
    const Complex mp = term(0, 1, 1, 0, 1, 0, 0, 1);
    const Complex mm = term(0, 1, 1, 0, 0, 1, 1, 0);
    const Complex dd = -(pp - pm - mp + mm);
    // S1 S2 = (n_a1 + n_b1)(n_a2 + n_b2)
    const double ss = number_product(full, kA1, kA2) + number_product(full, kA1, kB2) +
                      number_product(full, kB1, kA2) + number_product(full, kB1, kB2);
    return DepthTerms{dd.real(), ss};
}

}  // namespace

LocalOscillator LocalOscillator::make(double beta, double theta) {
    if (!std::isfinite(beta) || beta < 0.0) throw InvalidInput("local oscillator amplitude must be finite and >= 0");
    if (!std::isfinite(theta)) throw InvalidInput("local oscillator phase must be finite");
    return LocalOscillator{beta, wrap_angle(theta)};
}

DepthTerms homodyne_correlations(const QuantumState& state_a, const LocalOscillator& lo1,
                                 const LocalOscillator& lo2, DepthRoute route, NumericOptions options) {
    if (state_a.mode_count() != 2) throw InvalidInput("homodyne experiment expects a two-mode input");
    const QuantumState b1 = coherent_state(lo1.amplitude(), options.tail_eps);
    const QuantumState b2 = coherent_state(lo2.amplitude(), options.tail_eps);
    const QuantumState oscillators = tensor(b1, b2);

    // A mixed input is split into eigen-branches; both correlations are linear in rho.
    DepthTerms total{0.0, 0.0};
    for (const auto& [weight, psi] : pure_branches(state_a)) {
        if (std::abs(weight) < kBranchWeightFloor) continue;
        const QuantumState full = tensor(QuantumState(state_a.system(), psi), oscillators);
        const DepthTerms t = route == DepthRoute::Unitary ? correlations_unitary(full, options)
                                                          : correlations_input(full);
        total.dd += weight * t.dd;
        total.ss += weight * t.ss;
    }
    return total;
}

double modulation_depth_numeric(const QuantumState& state_a, const LocalOscillator& lo1,
                                const LocalOscillator& lo2, DepthRoute route, NumericOptions options) {
    const DepthTerms t = homodyne_correlations(state_a, lo1, lo2, route, options);
    if (!(t.ss >= kDegeneracyFloor)) throw DegenerateDenominator("<S1 S2> vanishes; modulation depth undefined");
    return t.dd / t.ss;
}

double modulation_depth_analytic(const CoherenceMoments& m, const LocalOscillator& lo1, const LocalOscillator& lo2) {
    const double b1 = lo1.beta;
    const double b2 = lo2.beta;
    const double den = m.n1n2 + m.n1 * b2 * b2 + m.n2 * b1 * b1 + b1 * b1 * b2 * b2;
    if (!(den > kDegeneracyFloor)) throw DegenerateDenominator("modulation depth denominator vanishes");
    const Complex diff = std::polar(1.0, lo1.theta - lo2.theta);
    const Complex sum = std::polar(1.0, lo1.theta + lo2.theta);
    const Complex bracket = m.m12 * diff + std::conj(m.m12) * std::conj(diff) - std::conj(m.anom) * sum -
                            m.anom * std::conj(sum);
    return b1 * b2 * bracket.real() / den;
}

OptimalChoice optimal_lo_amplitudes(const CoherenceMoments& m) {
    if (!(m.n1 > 0.0) || !(m.n2 > 0.0) || !(m.n1 * m.n2 > kDegeneracyFloor))
        throw DegenerateState("optimal oscillator amplitudes need light in both channels");
    const double ratio = std::sqrt(m.n1 / m.n2);
    if (!(m.n1n2 > kDegeneracyFloor)) return DegenerateLimit{ratio};
    const double product = std::sqrt(m.n1n2);
    // beta1 = sqrt(product * ratio), beta2 = sqrt(product / ratio)
    return OptimalAmplitudes{std::sqrt(product * ratio), std::sqrt(product / ratio)};
}

OptimalAmplitudes resolve_amplitudes(const OptimalChoice& choice, double scale) {
    if (const auto* exact = std::get_if<OptimalAmplitudes>(&choice)) return *exact;
    const double ratio = std::get<DegenerateLimit>(choice).ratio;
    return OptimalAmplitudes{scale * std::sqrt(ratio), scale / std::sqrt(ratio)};
}

FringeCoefficients fringe_coefficients(const CoherenceMoments& m) {
    const double g1_mag = std::abs(g1(m));
    const double root_g2 = std::sqrt(std::max(0.0, g2(m)));
    FringeCoefficients f;
    f.c1 = g1_mag / (1.0 + root_g2);
    f.c2 = std::abs(m.anom) / (std::sqrt(m.n1 * m.n2) * (1.0 + root_g2));
    f.phi1 = wrap_angle(std::arg(m.m12));
    f.phi2 = wrap_angle(std::numbers::pi - std::arg(m.anom));
    return f;
}

FringeCoefficients fringe_coefficients_at(const CoherenceMoments& m, double beta1, double beta2) {
    const double den = m.n1n2 + m.n1 * beta2 * beta2 + m.n2 * beta1 * beta1 + beta1 * beta1 * beta2 * beta2;
    if (!(den > kDegeneracyFloor)) throw DegenerateDenominator("modulation depth denominator vanishes");
    const double scale = 2.0 * beta1 * beta2 / den;
    FringeCoefficients f;
    f.c1 = scale * std::abs(m.m12);
    f.c2 = scale * std::abs(m.anom);
    f.phi1 = wrap_angle(std::arg(m.m12));
    f.phi2 = wrap_angle(std::numbers::pi - std::arg(m.anom));
    return f;
}

FringeCoefficients fringe_coefficients_from_scan(const std::function<double(double, double)>& depth, int points) {
    if (points < 3) throw InvalidInput("fringe extraction needs at least 3 angles per axis");
    Complex diff{};
    Complex sum{};
    for (int i = 0; i < points; ++i) {
        const double t1 = kTwoPi * i / points;
        for (int j = 0; j < points; ++j) {
            const double t2 = kTwoPi * j / points;
            const double e = depth(t1, t2);
            diff += e * std::polar(1.0, -(t1 - t2));
            sum += e * std::polar(1.0, -(t1 + t2));
        }
    }
    const double norm = 1.0 / (static_cast<double>(points) * points);
    diff *= norm;
    sum *= norm;
    FringeCoefficients f;
    f.c1 = 2.0 * std::abs(diff);
    f.phi1 = wrap_angle(std::arg(diff));
    f.c2 = 2.0 * std::abs(sum);
    f.phi2 = wrap_angle(std::arg(sum));
    return f;
}

double modulation_depth(const FringeCoefficients& coeffs, double theta1, double theta2) {
    return coeffs.c1 * std::cos(theta1 - theta2 + coeffs.phi1) + coeffs.c2 * std::cos(theta1 + theta2 + coeffs.phi2);
}

double chsh_value(const FringeCoefficients& coeffs, const ChshAngles& a) {
    return modulation_depth(coeffs, a.theta1, a.theta2) + modulation_depth(coeffs, a.theta1, a.theta2p) +
           modulation_depth(coeffs, a.theta1p, a.theta2) - modulation_depth(coeffs, a.theta1p, a.theta2p);
}

ChshResult maximize_chsh(const FringeCoefficients& coeffs, ChshSearchOptions options) {
    const int n = options.grid;
    if (n < 2) throw InvalidInput("CHSH grid needs at least 2 points per angle");
    if (!(options.resolution > 0.0)) throw InvalidInput("CHSH resolution must be positive");

    std::vector<double> grid(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) grid[static_cast<std::size_t>(k)] = kTwoPi * k / n;
    std::vector<double> table(static_cast<std::size_t>(n) * n);
    auto at = [&](int i, int j) -> double& { return table[static_cast<std::size_t>(i) * n + j]; };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) at(i, j) = modulation_depth(coeffs, grid[i], grid[j]);

    // indices (i, ip, j, jp) -> (theta1, theta1', theta2, theta2')
    double best = -1.0;
    std::array<int, 4> arg{0, 0, 0, 0};
    for (int i = 0; i < n; ++i)
        for (int ip = 0; ip < n; ++ip)
            for (int j = 0; j < n; ++j)
                for (int jp = 0; jp < n; ++jp) {
                    const double b = std::abs(at(i, j) + at(i, jp) + at(ip, j) - at(ip, jp));
                    if (b > best) {
                        best = b;
                        arg = {i, ip, j, jp};
                    }
                }

    std::array<double, 4> x{grid[arg[0]], grid[arg[1]], grid[arg[2]], grid[arg[3]]};
    auto evaluate = [&](const std::array<double, 4>& v) {
        return chsh_value(coeffs, ChshAngles{v[0], v[1], v[2], v[3]});
    };
    const double sign = evaluate(x) < 0.0 ? -1.0 : 1.0;
    double value = sign * evaluate(x);
    for (double step = kTwoPi / n; step >= options.resolution; step *= 0.5) {
        bool improved = true;
        while (improved) {
            improved = false;
            for (std::size_t c = 0; c < 4; ++c) {
                for (double dir : {1.0, -1.0}) {
                    auto trial = x;
                    trial[c] += dir * step;
                    const double v = sign * evaluate(trial);
                    if (v > value) {
                        value = v;
                        x = trial;
                        improved = true;
                        break;
                    }
                }
            }
        }
    }
    // E flips sign under theta1 -> theta1 + pi, so the same |B| is reached with B > 0
    if (sign < 0.0) {
        x[0] += std::numbers::pi;
        x[1] += std::numbers::pi;
    }
    ChshResult result;
    result.angles = ChshAngles{wrap_angle(x[0]), wrap_angle(x[1]), wrap_angle(x[2]), wrap_angle(x[3])};
    result.b_value = chsh_value(coeffs, result.angles);
    return result;
}

namespace {

void fill_margins(Verdict& v) {
    v.bell_margin = kInvSqrt2 - v.c1;
    v.tg_margin = v.g2 - v.g1_mag * v.g1_mag;
    v.violates_bell = v.c1 > kInvSqrt2;
    v.violates_classical = v.tg_margin < -kClassicalMarginFloor;
}

}  // namespace

Verdict local_realism_verdict(const CoherenceMoments& m) {
    Verdict v;
    v.g1_mag = std::abs(g1(m));
    v.g2 = g2(m);
    const FringeCoefficients f = fringe_coefficients(m);
    v.c1 = f.c1;
    v.c2 = f.c2;
    v.thw_sum = f.c1 * f.c1 + f.c2 * f.c2;
    fill_margins(v);
    return v;
}

Verdict criterion_from_measurements(double g1_mag, double g2_value) {
    if (!(g1_mag >= 0.0 && g1_mag <= 1.0)) throw InvalidInput("visibility |g1| must lie in [0, 1]");
    if (!(g2_value >= 0.0) || !std::isfinite(g2_value)) throw InvalidInput("coincidence rate g2 must be >= 0");
    Verdict v;
    v.g1_mag = g1_mag;
    v.g2 = g2_value;
    v.c1 = g1_mag / (1.0 + std::sqrt(g2_value));
    fill_margins(v);
    return v;
}

Thresholds violation_thresholds() {
    const double root2_minus_1 = std::sqrt(2.0) - 1.0;
    return Thresholds{kInvSqrt2, root2_minus_1 * root2_minus_1};
}

}  // namespace mzbell
