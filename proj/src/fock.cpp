#include "mzbell/fock.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include <Eigen/Eigenvalues>

#include "mzbell/errors.hpp"

namespace mzbell {

namespace {

constexpr double kHermitianTolerance = 1e-12;
constexpr double kNegativeEigenTolerance = 1e-10;

bool finite(const Complex& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// sqrt(n (n-1) ... (n-k+1)), the factor picked up by a^k on |n>.
double falling_root(int n, int k) {
    double f = 1.0;
    for (int i = 0; i < k; ++i) f *= static_cast<double>(n - i);
    return std::sqrt(f);
}

// Columns are the images of |na, N-na> under the beamsplitter, expressed on
// |k, N-k>. Built by applying the transformed creation operators to vacuum,
// which keeps every intermediate vector well scaled.
Matrix beamsplitter_block(int total, Complex unit) {
    Matrix block = Matrix::Zero(total + 1, total + 1);
    const double inv_sqrt2 = std::sqrt(0.5);
    for (int na = 0; na <= total; ++na) {
        int nb = total - na;
        // poly[k] = amplitude on |k, m - k> after m creations
        std::vector<Complex> poly{Complex{1.0, 0.0}};
        auto create = [&](Complex on_c, Complex on_d, int step) {
            int m = static_cast<int>(poly.size()) - 1;
            std::vector<Complex> next(poly.size() + 1, Complex{});
            for (int k = 0; k <= m; ++k) {
                int l = m - k;
                next[k + 1] += on_c * std::sqrt(static_cast<double>(k + 1)) * poly[k];
                next[k] += on_d * std::sqrt(static_cast<double>(l + 1)) * poly[k];
            }
            double scale = inv_sqrt2 / std::sqrt(static_cast<double>(step));
            for (auto& z : next) z *= scale;
            poly = std::move(next);
        };
        // a^dag -> (c^dag + u d^dag)/sqrt2, b^dag -> (u c^dag + d^dag)/sqrt2
        for (int s = 1; s <= na; ++s) create(Complex{1.0, 0.0}, unit, s);
        for (int s = 1; s <= nb; ++s) create(unit, Complex{1.0, 0.0}, s);
        for (int k = 0; k <= total; ++k) block(k, na) = poly[static_cast<std::size_t>(k)];
    }
    return block;
}

// Applies the beamsplitter map to each column of `in`.
Matrix beamsplitter_columns(const ModeSystem& sys, const Matrix& in, int mode_i, int mode_j, Complex unit,
                            std::vector<Matrix>& blocks) {
    const std::size_t si = sys.stride(mode_i);
    const std::size_t sj = sys.stride(mode_j);
    const int ki = sys.cutoff(mode_i);
    const int kj = sys.cutoff(mode_j);
    Matrix out = Matrix::Zero(in.rows(), in.cols());
    for (Eigen::Index row = 0; row < in.rows(); ++row) {
        const auto idx = static_cast<std::size_t>(row);
        const int ni = sys.occupation(idx, mode_i);
        const int nj = sys.occupation(idx, mode_j);
        const int total = ni + nj;
        const std::size_t base = idx - static_cast<std::size_t>(ni) * si - static_cast<std::size_t>(nj) * sj;
        if (in.row(row).isZero(0.0)) continue;
        Matrix& block = blocks[static_cast<std::size_t>(total)];
        if (block.size() == 0) block = beamsplitter_block(total, unit);
        for (int k = std::max(0, total - kj); k <= std::min(total, ki); ++k) {
            const Complex coeff = block(k, ni);
            if (coeff == Complex{}) continue;
            const auto target = static_cast<Eigen::Index>(
                base + static_cast<std::size_t>(k) * si + static_cast<std::size_t>(total - k) * sj);
            out.row(target) += coeff * in.row(row);
        }
    }
    return out;
}

void check_mode(const ModeSystem& sys, int mode) {
    if (mode < 0 || mode >= sys.mode_count())
        throw InvalidInput("mode index " + std::to_string(mode) + " out of range");
}

}  // namespace

ModeSystem::ModeSystem(std::vector<int> cutoffs, std::size_t limit) : cutoffs_(std::move(cutoffs)) {
    if (cutoffs_.empty()) throw InvalidInput("mode system needs at least one mode");
    strides_.assign(cutoffs_.size(), 1);
    for (std::size_t m = cutoffs_.size(); m-- > 0;) {
        if (cutoffs_[m] < 0) throw InvalidInput("negative Fock cutoff");
        strides_[m] = dimension_;
        const auto levels = static_cast<std::size_t>(cutoffs_[m]) + 1;
        if (dimension_ > limit / levels)
            throw DimensionLimit("total dimension exceeds limit " + std::to_string(limit));
        dimension_ *= levels;
    }
}

ModeSystem ModeSystem::uniform(int modes, int cutoff) {
    if (modes < 1) throw InvalidInput("mode system needs at least one mode");
    return ModeSystem(std::vector<int>(static_cast<std::size_t>(modes), cutoff));
}

std::vector<int> ModeSystem::occupations(std::size_t index) const {
    std::vector<int> occ(cutoffs_.size());
    for (int m = 0; m < mode_count(); ++m) occ[static_cast<std::size_t>(m)] = occupation(index, m);
    return occ;
}

std::size_t ModeSystem::index_of(std::span<const int> occupations) const {
    if (occupations.size() != cutoffs_.size()) throw InvalidInput("occupation tuple has wrong length");
    std::size_t index = 0;
    for (std::size_t m = 0; m < cutoffs_.size(); ++m) {
        if (occupations[m] < 0 || occupations[m] > cutoffs_[m])
            throw InvalidInput("occupation exceeds cutoff");
        index += static_cast<std::size_t>(occupations[m]) * strides_[m];
    }
    return index;
}

QuantumState::QuantumState(ModeSystem system, Vector amplitudes, double renormalization)
    : system_(std::move(system)), data_(std::move(amplitudes)), renormalization_(renormalization) {
    if (static_cast<std::size_t>(std::get<Vector>(data_).size()) != system_.dimension())
        throw InvalidInput("amplitude count does not match system dimension");
}

QuantumState::QuantumState(ModeSystem system, Matrix density)
    : system_(std::move(system)), data_(std::move(density)) {
    const auto& rho = std::get<Matrix>(data_);
    if (static_cast<std::size_t>(rho.rows()) != system_.dimension() || rho.rows() != rho.cols())
        throw InvalidInput("density operator shape does not match system dimension");
}

const Vector& QuantumState::amplitudes() const {
    if (!is_pure()) throw InvalidInput("state is a density operator, not a pure vector");
    return std::get<Vector>(data_);
}

const Matrix& QuantumState::density() const {
    if (is_pure()) throw InvalidInput("state is a pure vector, not a density operator");
    return std::get<Matrix>(data_);
}

Matrix QuantumState::to_density() const {
    if (is_pure()) {
        const auto& psi = std::get<Vector>(data_);
        return psi * psi.adjoint();
    }
    return std::get<Matrix>(data_);
}

double QuantumState::trace() const {
    if (is_pure()) return std::get<Vector>(data_).squaredNorm();
    return std::get<Matrix>(data_).trace().real();
}

double QuantumState::purity() const {
    if (is_pure()) {
        double n = std::get<Vector>(data_).squaredNorm();
        return n * n;
    }
    const auto& rho = std::get<Matrix>(data_);
    // Tr(rho^2) = sum_ij rho_ij rho_ji = sum_ij |rho_ij|^2 for Hermitian rho
    return (rho.array() * rho.transpose().array()).sum().real();
}

QuantumState make_pure(const ModeSystem& system, const Vector& amplitudes) {
    if (static_cast<std::size_t>(amplitudes.size()) != system.dimension())
        throw InvalidInput("amplitude count " + std::to_string(amplitudes.size()) +
                           " does not match dimension " + std::to_string(system.dimension()));
    for (const auto& z : amplitudes)
        if (!finite(z)) throw InvalidInput("non-finite amplitude");
    const double norm = amplitudes.norm();
    if (!(norm > 0.0)) throw InvalidInput("zero amplitude vector");
    return QuantumState(system, amplitudes / norm, std::abs(norm - 1.0));
}

QuantumState make_density(const ModeSystem& system, const Matrix& density) {
    QuantumState state(system, density);
    validate_state(state);
    return state;
}

QuantumState make_mixed(std::span<const WeightedState> ensemble) {
    if (ensemble.empty()) throw InvalidInput("empty ensemble");
    const ModeSystem& sys = ensemble.front().state.system();
    double total = 0.0;
    for (const auto& item : ensemble) {
        if (!(item.weight >= 0.0)) throw InvalidInput("negative ensemble weight");
        if (!(item.state.system() == sys)) throw InvalidInput("ensemble members live on different mode systems");
        total += item.weight;
    }
    if (std::abs(total - 1.0) > kNormTolerance) throw InvalidInput("ensemble weights do not sum to 1");
    if (sys.dimension() > kDensityDimensionLimit)
        throw DimensionLimit("density operator dimension exceeds limit");
    Matrix rho = Matrix::Zero(static_cast<Eigen::Index>(sys.dimension()),
                              static_cast<Eigen::Index>(sys.dimension()));
    for (const auto& item : ensemble) {
        if (item.state.is_pure()) {
            const auto& psi = item.state.amplitudes();
            rho.noalias() += item.weight * (psi * psi.adjoint());
        } else {
            rho += item.weight * item.state.density();
        }
    }
    return QuantumState(sys, std::move(rho));
}

QuantumState vacuum(const ModeSystem& system) {
    Vector psi = Vector::Zero(static_cast<Eigen::Index>(system.dimension()));
    psi(0) = 1.0;
    return QuantumState(system, std::move(psi));
}

QuantumState number_state(int n, int cutoff) {
    if (n < 0 || n > cutoff) throw InvalidInput("number state |n> requires 0 <= n <= cutoff");
    ModeSystem sys({cutoff});
    Vector psi = Vector::Zero(cutoff + 1);
    psi(n) = 1.0;
    return QuantumState(sys, std::move(psi));
}

int coherent_cutoff(double mean_photons, double tail_eps, int max_cutoff) {
    if (!(tail_eps > 0.0 && tail_eps < 1.0)) throw InvalidInput("tail_eps must lie in (0, 1)");
    if (!(mean_photons >= 0.0) || !std::isfinite(mean_photons)) throw InvalidInput("invalid mean photon number");
    if (mean_photons == 0.0) return 0;
    // Poisson probabilities in log space, then suffix sums of the tail.
    const double log_m = std::log(mean_photons);
    std::vector<double> p;
    for (int n = 0;; ++n) {
        double lp = -mean_photons + n * log_m - std::lgamma(n + 1.0);
        p.push_back(std::exp(lp));
        if (n > mean_photons && lp < std::log(tail_eps) - 40.0) break;
        if (n > max_cutoff + 400)
            throw DimensionLimit("coherent amplitude needs cutoff above limit " + std::to_string(max_cutoff));
    }
    double tail = 0.0;
    int cutoff = static_cast<int>(p.size()) - 1;
    for (int n = static_cast<int>(p.size()) - 1; n >= 0; --n) {
        // tail currently holds sum_{k > n} p_k
        if (tail < tail_eps) cutoff = n;
        else break;
        tail += p[static_cast<std::size_t>(n)];
    }
    if (cutoff > max_cutoff)
        throw DimensionLimit("coherent amplitude needs cutoff " + std::to_string(cutoff) + " > limit " +
                             std::to_string(max_cutoff));
    return cutoff;
}

int thermal_cutoff(double nbar, double tail_eps, int max_cutoff) {
    if (!(tail_eps > 0.0 && tail_eps < 1.0)) throw InvalidInput("tail_eps must lie in (0, 1)");
    if (!(nbar >= 0.0) || !std::isfinite(nbar)) throw InvalidInput("invalid mean photon number");
    if (nbar == 0.0) return 0;
    // sum_{n > N} p_n = (nbar / (1 + nbar))^(N + 1)
    const double ratio = nbar / (1.0 + nbar);
    const double needed = std::log(tail_eps) / std::log(ratio) - 1.0;
    int cutoff = std::max(0, static_cast<int>(std::ceil(needed - 1e-12)));
    while (cutoff > 0 && std::pow(ratio, cutoff) < tail_eps) --cutoff;
    while (std::pow(ratio, cutoff + 1) >= tail_eps) ++cutoff;
    if (cutoff > max_cutoff)
        throw DimensionLimit("thermal state needs cutoff " + std::to_string(cutoff) + " > limit " +
                             std::to_string(max_cutoff));
    return cutoff;
}

QuantumState coherent_state(Complex alpha, double tail_eps, int max_cutoff) {
    if (!finite(alpha)) throw InvalidInput("non-finite coherent amplitude");
    const int cutoff = coherent_cutoff(std::norm(alpha), tail_eps, max_cutoff);
    Vector psi(cutoff + 1);
    psi(0) = std::exp(-0.5 * std::norm(alpha));
    for (int n = 1; n <= cutoff; ++n) psi(n) = psi(n - 1) * alpha / std::sqrt(static_cast<double>(n));
    return make_pure(ModeSystem({cutoff}), psi);
}

QuantumState thermal_state(double nbar, double tail_eps, int max_cutoff) {
    const int cutoff = thermal_cutoff(nbar, tail_eps, max_cutoff);
    Matrix rho = Matrix::Zero(cutoff + 1, cutoff + 1);
    double total = 0.0;
    for (int n = 0; n <= cutoff; ++n) {
        double p = std::pow(nbar, n) / std::pow(1.0 + nbar, n + 1);
        rho(n, n) = p;
        total += p;
    }
    rho /= total;
    return QuantumState(ModeSystem({cutoff}), std::move(rho));
}

void validate_state(const QuantumState& state) {
    if (state.is_pure()) {
        const auto& psi = state.amplitudes();
        for (const auto& z : psi)
            if (!finite(z)) throw InvalidInput("non-finite amplitude");
        if (std::abs(psi.squaredNorm() - 1.0) > kNormTolerance) throw InvalidInput("pure state is not normalized");
        return;
    }
    const auto& rho = state.density();
    for (Eigen::Index i = 0; i < rho.rows(); ++i)
        for (Eigen::Index j = 0; j < rho.cols(); ++j) {
            if (!finite(rho(i, j))) throw InvalidInput("non-finite density entry");
            if (std::abs(rho(i, j) - std::conj(rho(j, i))) > kHermitianTolerance)
                throw InvalidInput("density operator is not Hermitian");
        }
    if (std::abs(rho.trace() - 1.0) > kNormTolerance) throw InvalidInput("density operator trace is not 1");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(rho, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -kNegativeEigenTolerance)
        throw InvalidInput("density operator has a negative eigenvalue");
}

QuantumState tensor(const QuantumState& left, const QuantumState& right, std::size_t density_limit) {
    std::vector<int> cutoffs = left.system().cutoffs();
    cutoffs.insert(cutoffs.end(), right.system().cutoffs().begin(), right.system().cutoffs().end());
    const bool pure = left.is_pure() && right.is_pure();
    ModeSystem sys(std::move(cutoffs), pure ? kPureDimensionLimit : density_limit);
    const auto rd = static_cast<Eigen::Index>(right.dimension());
    if (pure) {
        const auto& l = left.amplitudes();
        const auto& r = right.amplitudes();
        Vector psi(static_cast<Eigen::Index>(sys.dimension()));
        for (Eigen::Index i = 0; i < l.size(); ++i) psi.segment(i * rd, rd) = l(i) * r;
        return QuantumState(sys, std::move(psi));
    }
    const Matrix l = left.to_density();
    const Matrix r = right.to_density();
    Matrix rho(static_cast<Eigen::Index>(sys.dimension()), static_cast<Eigen::Index>(sys.dimension()));
    for (Eigen::Index i = 0; i < l.rows(); ++i)
        for (Eigen::Index j = 0; j < l.cols(); ++j) rho.block(i * rd, j * rd, rd, rd) = l(i, j) * r;
    return QuantumState(sys, std::move(rho));
}

QuantumState embed(const QuantumState& state, const std::vector<int>& cutoffs) {
    const ModeSystem& from = state.system();
    if (cutoffs.size() != from.cutoffs().size()) throw InvalidInput("embedding changes the number of modes");
    for (std::size_t m = 0; m < cutoffs.size(); ++m)
        if (cutoffs[m] < from.cutoffs()[m]) throw InvalidInput("embedding cannot lower a cutoff");
    ModeSystem to(cutoffs, state.is_pure() ? kPureDimensionLimit : kDensityDimensionLimit);
    std::vector<Eigen::Index> map(from.dimension());
    for (std::size_t i = 0; i < from.dimension(); ++i)
        map[i] = static_cast<Eigen::Index>(to.index_of(from.occupations(i)));
    const auto n = static_cast<Eigen::Index>(to.dimension());
    if (state.is_pure()) {
        Vector psi = Vector::Zero(n);
        const auto& src = state.amplitudes();
        for (std::size_t i = 0; i < map.size(); ++i) psi(map[i]) = src(static_cast<Eigen::Index>(i));
        return QuantumState(to, std::move(psi), state.renormalization());
    }
    Matrix rho = Matrix::Zero(n, n);
    const auto& src = state.density();
    for (std::size_t i = 0; i < map.size(); ++i)
        for (std::size_t j = 0; j < map.size(); ++j)
            rho(map[i], map[j]) = src(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    return QuantumState(to, std::move(rho));
}

Complex expect_normal_ordered(const QuantumState& state, std::span<const LadderPower> factors) {
    const ModeSystem& sys = state.system();
    std::vector<bool> seen(static_cast<std::size_t>(sys.mode_count()), false);
    for (const auto& f : factors) {
        check_mode(sys, f.mode);
        if (f.creation < 0 || f.annihilation < 0) throw InvalidInput("negative ladder power");
        if (seen[static_cast<std::size_t>(f.mode)]) throw InvalidInput("ladder factors must act on distinct modes");
        seen[static_cast<std::size_t>(f.mode)] = true;
    }

    // O|i> = coeff |target>, or nothing when an annihilator empties a mode
    // or a creator leaves the truncated space.
    auto act = [&](std::size_t index, std::size_t& target, double& coeff) {
        target = index;
        coeff = 1.0;
        for (const auto& f : factors) {
            const int n = sys.occupation(index, f.mode);
            if (n < f.annihilation) return false;
            const int lowered = n - f.annihilation;
            const int raised = lowered + f.creation;
            if (raised > sys.cutoff(f.mode)) return false;
            coeff *= falling_root(n, f.annihilation) * falling_root(raised, f.creation);
            target = target - static_cast<std::size_t>(n) * sys.stride(f.mode) +
                     static_cast<std::size_t>(raised) * sys.stride(f.mode);
        }
        return true;
    };

    Complex sum{};
    std::size_t target = 0;
    double coeff = 0.0;
    if (state.is_pure()) {
        const auto& psi = state.amplitudes();
        for (std::size_t i = 0; i < sys.dimension(); ++i) {
            const Complex amp = psi(static_cast<Eigen::Index>(i));
            if (amp == Complex{} || !act(i, target, coeff)) continue;
            sum += std::conj(psi(static_cast<Eigen::Index>(target))) * coeff * amp;
        }
    } else {
        // Tr(rho O) = sum_i coeff_i rho(i, target_i)
        const auto& rho = state.density();
        for (std::size_t i = 0; i < sys.dimension(); ++i) {
            if (!act(i, target, coeff)) continue;
            sum += coeff * rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(target));
        }
    }
    return sum;
}

Complex expect_normal_ordered(const QuantumState& state, std::initializer_list<LadderPower> factors) {
    return expect_normal_ordered(state, std::span<const LadderPower>(factors.begin(), factors.size()));
}

double mean_photons(const QuantumState& state, int mode) {
    return expect_normal_ordered(state, {LadderPower{mode, 1, 1}}).real();
}

Transformed apply_beamsplitter(const QuantumState& state, int mode_i, int mode_j, BeamsplitterOptions options) {
    const ModeSystem& sys = state.system();
    check_mode(sys, mode_i);
    check_mode(sys, mode_j);
    if (mode_i == mode_j) throw InvalidInput("beamsplitter needs two distinct modes");

    const Complex unit = options.direction == BeamsplitterDirection::Forward ? Complex{0.0, 1.0} : Complex{0.0, -1.0};
    const int max_total = sys.cutoff(mode_i) + sys.cutoff(mode_j);
    std::vector<Matrix> blocks(static_cast<std::size_t>(max_total) + 1);  // built on first use

    const double before = state.trace();
    std::optional<QuantumState> result;
    if (state.is_pure()) {
        Matrix out = beamsplitter_columns(sys, state.amplitudes(), mode_i, mode_j, unit, blocks);
        result.emplace(sys, Vector(out.col(0)), state.renormalization());
    } else {
        Matrix half = beamsplitter_columns(sys, state.density(), mode_i, mode_j, unit, blocks);
        Matrix full = beamsplitter_columns(sys, half.adjoint(), mode_i, mode_j, unit, blocks);
        result.emplace(sys, Matrix(full.adjoint()));
    }
    const double leakage = std::max(0.0, before - result->trace());
    if (leakage > options.leakage_tolerance)
        throw TruncationLeakage("beamsplitter pushed probability " + std::to_string(leakage) +
                                    " above the Fock cutoff",
                                leakage);
    return Transformed{std::move(*result), leakage};
}

QuantumState apply_phase(const QuantumState& state, int mode, double phi) {
    const ModeSystem& sys = state.system();
    check_mode(sys, mode);
    const int levels = sys.cutoff(mode) + 1;
    std::vector<Complex> factor(static_cast<std::size_t>(levels));
    for (int n = 0; n < levels; ++n) factor[static_cast<std::size_t>(n)] = std::polar(1.0, n * phi);
    auto phase_of = [&](std::size_t index) { return factor[static_cast<std::size_t>(sys.occupation(index, mode))]; };

    if (state.is_pure()) {
        Vector psi = state.amplitudes();
        for (std::size_t i = 0; i < sys.dimension(); ++i) psi(static_cast<Eigen::Index>(i)) *= phase_of(i);
        return QuantumState(sys, std::move(psi), state.renormalization());
    }
    Matrix rho = state.density();
    for (std::size_t i = 0; i < sys.dimension(); ++i)
        for (std::size_t j = 0; j < sys.dimension(); ++j)
            rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) *= phase_of(i) * std::conj(phase_of(j));
    return QuantumState(sys, std::move(rho));
}

std::vector<std::pair<double, Vector>> pure_branches(const QuantumState& state) {
    if (state.is_pure()) return {{1.0, state.amplitudes()}};
    const Matrix& rho = state.density();
    const auto n = rho.rows();
    bool diagonal = true;
    for (Eigen::Index i = 0; i < n && diagonal; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (i != j && rho(i, j) != Complex{}) {
                diagonal = false;
                break;
            }
    if (diagonal) {
        std::vector<std::pair<double, Vector>> branches;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double w = rho(i, i).real();
            if (w == 0.0) continue;
            Vector e = Vector::Zero(n);
            e(i) = 1.0;
            branches.emplace_back(w, std::move(e));
        }
        return branches;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(rho);
    std::vector<std::pair<double, Vector>> branches;
    for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k) {
        const double w = solver.eigenvalues()(k);
        if (w == 0.0) continue;
        branches.emplace_back(w, solver.eigenvectors().col(k));
    }
    return branches;
}

}  // namespace mzbell
