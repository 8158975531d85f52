#pragma once

// Homodyne Bell experiment: each channel a_k is mixed with a coherent local
// oscillator b_k on a 50:50 beamsplitter, and the correlation of the
// photon-number differences D_k against the sums S_k defines the modulation
// depth E(theta1, theta2) = <D1 D2> / <S1 S2>.

#include <array>
#include <functional>
#include <optional>
#include <variant>

#include "mzbell/coherence.hpp"
#include "mzbell/fock.hpp"

namespace mzbell {

// sqrt(1/2) correctly rounded; 1.0 / std::sqrt(2.0) is one ulp low.
inline constexpr double kInvSqrt2 = 0.70710678118654757;
inline constexpr double kDegenerateLimitBeta = 1e-2;
// Titulaer-Glauber margins above -kClassicalMarginFloor are treated as zero.
inline constexpr double kClassicalMarginFloor = 1e-10;

struct LocalOscillator {
    double beta = 0.0;   // real amplitude
    double theta = 0.0;  // phase in [0, 2 pi)

    // Validates beta (finite, >= 0) and wraps theta.
    static LocalOscillator make(double beta, double theta);
    Complex amplitude() const { return std::polar(beta, theta); }
};

enum class DepthRoute {
    Unitary,        // beamsplitters applied, photon counts read at c_k, d_k
    InputOperator,  // D_k = i (a^dag b - a b^dag) evaluated on the inputs
};

struct NumericOptions {
    double tail_eps = kPreciseTailEps;
    double leakage_tolerance = kLeakageTolerance;
};

struct DepthTerms {
    double dd;  // <D1 D2>
    double ss;  // <S1 S2>
};

// Both correlations from the full four-mode simulation of a two-mode input.
DepthTerms homodyne_correlations(const QuantumState& state_a, const LocalOscillator& lo1,
                                 const LocalOscillator& lo2, DepthRoute route, NumericOptions options = {});

// Throws DegenerateDenominator when <S1 S2> < 1e-15.
double modulation_depth_numeric(const QuantumState& state_a, const LocalOscillator& lo1,
                                const LocalOscillator& lo2, DepthRoute route, NumericOptions options = {});

// Closed form in terms of the channel moments.
double modulation_depth_analytic(const CoherenceMoments& m, const LocalOscillator& lo1, const LocalOscillator& lo2);

struct OptimalAmplitudes {
    double beta1;
    double beta2;
};

// <n1 n2> = 0: the optimum is only approached as the common scale goes to
// zero with beta1 / beta2 held at `ratio`.
struct DegenerateLimit {
    double ratio;
};

using OptimalChoice = std::variant<OptimalAmplitudes, DegenerateLimit>;

// beta1 beta2 = sqrt(<n1 n2>), beta1 / beta2 = sqrt(n1 / n2).
OptimalChoice optimal_lo_amplitudes(const CoherenceMoments& m);

// Resolves a DegenerateLimit at beta1 beta2 = scale^2 with the ratio kept.
OptimalAmplitudes resolve_amplitudes(const OptimalChoice& choice, double scale = kDegenerateLimitBeta);

// E(theta1, theta2) = c1 cos(theta1 - theta2 + phi1) + c2 cos(theta1 + theta2 + phi2)
struct FringeCoefficients {
    double c1 = 0.0;
    double phi1 = 0.0;
    double c2 = 0.0;
    double phi2 = 0.0;
};

// Coefficients at the optimal oscillator amplitudes:
//   c1 = |g1| / (1 + sqrt g2)
//   c2 = |<a1 a2>| / (sqrt(n1 n2) (1 + sqrt g2))
//   phi1 = arg <a1^dag a2>, phi2 = pi - arg <a1 a2>
// The pi in phi2 absorbs the minus sign of the sum-angle terms.
FringeCoefficients fringe_coefficients(const CoherenceMoments& m);

// Same decomposition at arbitrary amplitudes.
FringeCoefficients fringe_coefficients_at(const CoherenceMoments& m, double beta1, double beta2);

// Fourier extraction of both fringes from an n x n angle scan of `depth`.
FringeCoefficients fringe_coefficients_from_scan(const std::function<double(double, double)>& depth, int points);

double modulation_depth(const FringeCoefficients& coeffs, double theta1, double theta2);

struct ChshAngles {
    double theta1;
    double theta1p;
    double theta2;
    double theta2p;
};

// B = E(t1, t2) + E(t1, t2') + E(t1', t2) - E(t1', t2')
double chsh_value(const FringeCoefficients& coeffs, const ChshAngles& angles);

struct ChshResult {
    double b_value;  // max |B|; the returned angles give B = +b_value
    ChshAngles angles;
};

struct ChshSearchOptions {
    int grid = 24;
    double resolution = 1e-6;
};

// Coarse grid over all four angles (first maximum in lexicographic order
// wins), then compass-search refinement down to `resolution`.
ChshResult maximize_chsh(const FringeCoefficients& coeffs, ChshSearchOptions options = {});

struct Verdict {
    double g1_mag = 0.0;
    double g2 = 0.0;
    double c1 = 0.0;
    std::optional<double> c2;
    std::optional<double> thw_sum;  // c1^2 + c2^2
    double bell_margin = 0.0;       // 1/sqrt2 - c1
    double tg_margin = 0.0;         // g2 - |g1|^2
    bool violates_bell = false;
    bool violates_classical = false;
};

Verdict local_realism_verdict(const CoherenceMoments& m);

// Verdict from a measured visibility |g1| in [0, 1] and coincidence rate g2 >= 0.
Verdict criterion_from_measurements(double g1_mag, double g2);

struct Thresholds {
    double g1_min;  // 1/sqrt2
    double g2_max;  // (sqrt2 - 1)^2
};

Thresholds violation_thresholds();

}  // namespace mzbell
