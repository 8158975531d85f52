#include "mzbell/catalog.hpp"

#include <algorithm>
#include <cmath>

#include "mzbell/errors.hpp"

namespace mzbell {

QuantumState split_single_photon() {
    const ModeSystem sys = ModeSystem::uniform(2, 1);
    Vector psi = Vector::Zero(static_cast<Eigen::Index>(sys.dimension()));
    const double r = std::sqrt(0.5);
    const int one_zero[] = {1, 0};
    const int zero_one[] = {0, 1};
    psi(static_cast<Eigen::Index>(sys.index_of(one_zero))) = Complex{r, 0.0};
    psi(static_cast<Eigen::Index>(sys.index_of(zero_one))) = Complex{0.0, r};
    return QuantumState(sys, std::move(psi));
}

QuantumState split_input(const QuantumState& input) {
    if (input.mode_count() != 1) throw InvalidInput("split_input expects a single-mode state");
    const int cutoff = input.system().cutoff(0);
    const QuantumState empty = vacuum(ModeSystem({cutoff}));
    if (input.is_pure()) return apply_beamsplitter(tensor(input, empty), 0, 1).state;

    // Split each eigen-branch as a pure state; a branch only occupies the
    // photon-number blocks it started in, so the outer products stay sparse.
    const ModeSystem sys({cutoff, cutoff}, kDensityDimensionLimit);
    const auto dim = static_cast<Eigen::Index>(sys.dimension());
    Matrix rho = Matrix::Zero(dim, dim);
    for (const auto& [weight, branch] : pure_branches(input)) {
        const QuantumState single(input.system(), branch);
        const Vector psi = apply_beamsplitter(tensor(single, empty), 0, 1).state.amplitudes();
        std::vector<Eigen::Index> support;
        for (Eigen::Index i = 0; i < dim; ++i)
            if (psi(i) != Complex{}) support.push_back(i);
        for (auto i : support)
            for (auto j : support) rho(i, j) += weight * psi(i) * std::conj(psi(j));
    }
    return QuantumState(sys, std::move(rho));
}

QuantumState split_number(int n) {
    if (n < 0) throw InvalidInput("photon number must be >= 0");
    return split_input(number_state(n, n));
}

QuantumState split_coherent(Complex alpha, double tail_eps) { return split_input(coherent_state(alpha, tail_eps)); }

QuantumState split_thermal(double nbar, double tail_eps) { return split_input(thermal_state(nbar, tail_eps)); }

QuantumState incoherent_anticorrelated(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("p must lie in [0, 1]");
    const ModeSystem sys = ModeSystem::uniform(2, 1);
    Matrix rho = Matrix::Zero(static_cast<Eigen::Index>(sys.dimension()), static_cast<Eigen::Index>(sys.dimension()));
    const int one_zero[] = {1, 0};
    const int zero_one[] = {0, 1};
    const auto i10 = static_cast<Eigen::Index>(sys.index_of(one_zero));
    const auto i01 = static_cast<Eigen::Index>(sys.index_of(zero_one));
    rho(i10, i10) = p;
    rho(i01, i01) = 1.0 - p;
    return QuantumState(sys, std::move(rho));
}

QuantumState mix_states(std::span<const WeightedState> ensemble) {
    if (ensemble.empty()) throw InvalidInput("empty ensemble");
    std::vector<int> cutoffs = ensemble.front().state.system().cutoffs();
    for (const auto& item : ensemble) {
        const auto& c = item.state.system().cutoffs();
        if (c.size() != cutoffs.size()) throw InvalidInput("ensemble members have different mode counts");
        for (std::size_t m = 0; m < c.size(); ++m) cutoffs[m] = std::max(cutoffs[m], c[m]);
    }
    std::vector<WeightedState> aligned;
    aligned.reserve(ensemble.size());
    for (const auto& item : ensemble) aligned.push_back({item.weight, embed(item.state, cutoffs)});
    return make_mixed(aligned);
}

QuantumState noisy_split_photon(double w, Complex alpha, double tail_eps) {
    if (!(w >= 0.0 && w <= 1.0)) throw InvalidInput("w must lie in [0, 1]");
    const WeightedState parts[] = {{w, split_single_photon()}, {1.0 - w, split_coherent(alpha, tail_eps)}};
    return mix_states(parts);
}

}  // namespace mzbell
