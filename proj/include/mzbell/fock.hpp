#pragma once

// Truncated Fock-space states of a few bosonic modes.
//
// Basis ordering: occupation tuples (n_0, ..., n_{M-1}) in lexicographic
// order with mode 0 varying slowest, n_k = 0..cutoff_k inclusive. Every
// module and file format in mzbell uses this ordering.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace mzbell {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

inline constexpr std::size_t kPureDimensionLimit = std::size_t{1} << 22;
inline constexpr std::size_t kDensityDimensionLimit = 4096;
inline constexpr double kNormTolerance = 1e-9;
inline constexpr double kLeakageTolerance = 1e-9;
inline constexpr double kDefaultTailEps = 1e-12;
// Truncation for coherent sources and local oscillators. Moments such as
// <n1 n2> ~ |alpha|^4 or <b> ~ beta need relative accuracy that a 1e-12
// probability tail does not give when |alpha| is small.
inline constexpr double kPreciseTailEps = 1e-16;
inline constexpr int kMaxSingleModeCutoff = 200;

class ModeSystem {
public:
    // Throws InvalidInput on an empty or negative cutoff list and
    // DimensionLimit when the product of (cutoff + 1) exceeds `limit`.
    explicit ModeSystem(std::vector<int> cutoffs, std::size_t limit = kPureDimensionLimit);

    static ModeSystem uniform(int modes, int cutoff);

    int mode_count() const { return static_cast<int>(cutoffs_.size()); }
    int cutoff(int mode) const { return cutoffs_.at(static_cast<std::size_t>(mode)); }
    const std::vector<int>& cutoffs() const { return cutoffs_; }
    std::size_t dimension() const { return dimension_; }
    std::size_t stride(int mode) const { return strides_[static_cast<std::size_t>(mode)]; }

    int occupation(std::size_t index, int mode) const {
        auto m = static_cast<std::size_t>(mode);
        return static_cast<int>((index / strides_[m]) % static_cast<std::size_t>(cutoffs_[m] + 1));
    }
    std::vector<int> occupations(std::size_t index) const;
    std::size_t index_of(std::span<const int> occupations) const;

    bool operator==(const ModeSystem& other) const { return cutoffs_ == other.cutoffs_; }

private:
    std::vector<int> cutoffs_;
    std::vector<std::size_t> strides_;
    std::size_t dimension_ = 1;
};

// Immutable pure or mixed state on a ModeSystem.
//
// The constructors store data as given. Use make_pure / make_density /
// make_mixed for checked construction; transforms return unnormalized
// results on purpose so truncation loss stays visible.
class QuantumState {
public:
    QuantumState(ModeSystem system, Vector amplitudes, double renormalization = 0.0);
    QuantumState(ModeSystem system, Matrix density);

    const ModeSystem& system() const { return system_; }
    int mode_count() const { return system_.mode_count(); }
    std::size_t dimension() const { return system_.dimension(); }

    bool is_pure() const { return std::holds_alternative<Vector>(data_); }
    const Vector& amplitudes() const;
    const Matrix& density() const;
    Matrix to_density() const;

    double trace() const;
    double purity() const;

    // |norm - 1| that make_pure divided out.
    double renormalization() const { return renormalization_; }
    bool renormalized() const { return renormalization_ > kNormTolerance; }

private:
    ModeSystem system_;
    std::variant<Vector, Matrix> data_;
    double renormalization_ = 0.0;
};

struct WeightedState {
    double weight;
    QuantumState state;
};

QuantumState make_pure(const ModeSystem& system, const Vector& amplitudes);
QuantumState make_density(const ModeSystem& system, const Matrix& density);
QuantumState make_mixed(std::span<const WeightedState> ensemble);

QuantumState vacuum(const ModeSystem& system);
QuantumState number_state(int n, int cutoff);
QuantumState coherent_state(Complex alpha, double tail_eps = kDefaultTailEps,
                            int max_cutoff = kMaxSingleModeCutoff);
QuantumState thermal_state(double nbar, double tail_eps = kDefaultTailEps,
                           int max_cutoff = kMaxSingleModeCutoff);

// Smallest N with sum_{n>N} p_n < tail_eps for the Poisson / Bose-Einstein
// photon-number distributions. Throws DimensionLimit above max_cutoff.
int coherent_cutoff(double mean_photons, double tail_eps, int max_cutoff = kMaxSingleModeCutoff);
int thermal_cutoff(double nbar, double tail_eps, int max_cutoff = kMaxSingleModeCutoff);

// Throws InvalidInput unless the state satisfies the QuantumState invariants:
// unit norm (pure) or Hermitian, unit-trace, positive semidefinite (density).
void validate_state(const QuantumState& state);

// Adjoins modes; a density operator on either side promotes the result.
QuantumState tensor(const QuantumState& left, const QuantumState& right,
                    std::size_t density_limit = kDensityDimensionLimit);

// Re-expresses the state on a system with cutoffs >= the current ones.
QuantumState embed(const QuantumState& state, const std::vector<int>& cutoffs);

// One factor (a_k^dagger)^creation (a_k)^annihilation; modes must be distinct.
struct LadderPower {
    int mode;
    int creation;
    int annihilation;
};

Complex expect_normal_ordered(const QuantumState& state, std::span<const LadderPower> factors);
Complex expect_normal_ordered(const QuantumState& state, std::initializer_list<LadderPower> factors);

double mean_photons(const QuantumState& state, int mode);

enum class BeamsplitterDirection { Forward, Inverse };

struct BeamsplitterOptions {
    BeamsplitterDirection direction = BeamsplitterDirection::Forward;
    double leakage_tolerance = kLeakageTolerance;
};

struct Transformed {
    QuantumState state;
    double leakage;  // probability pushed above the cutoffs
};

// 50:50 beamsplitter. Output mode_i carries c = (a + i b)/sqrt2 and mode_j
// carries d = (i a + b)/sqrt2, with a = mode_i and b = mode_j on input.
// Throws TruncationLeakage when the lost probability exceeds the tolerance.
Transformed apply_beamsplitter(const QuantumState& state, int mode_i, int mode_j,
                               BeamsplitterOptions options = {});

// Multiplies the amplitude of occupation n on `mode` by exp(i n phi).
QuantumState apply_phase(const QuantumState& state, int mode, double phi);

// Eigen-decomposition rho = sum_k w_k |v_k><v_k| (a pure state yields one branch).
std::vector<std::pair<double, Vector>> pure_branches(const QuantumState& state);

}  // namespace mzbell
