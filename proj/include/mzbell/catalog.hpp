#pragma once

// Named two-channel input states (the a-channels after BS0) and the
// parametrized families used for sweeps.

#include "mzbell/fock.hpp"

namespace mzbell {


// (|10> + i|01>) / sqrt2 on a cutoff-1 two-mode system.
QuantumState split_single_photon();

// Single-mode input mixed with vacuum on the 50:50 beamsplitter. Both output
// modes get the input cutoff, which holds every photon the input can carry.
QuantumState split_input(const QuantumState& input);

QuantumState split_number(int n);
QuantumState split_coherent(Complex alpha, double tail_eps = kPreciseTailEps);
QuantumState split_thermal(double nbar, double tail_eps = kDefaultTailEps);

// p |10><10| + (1 - p) |01><01|
QuantumState incoherent_anticorrelated(double p);

// w (split photon) + (1 - w) (split coherent alpha), on a common cutoff.
QuantumState noisy_split_photon(double w, Complex alpha, double tail_eps = kPreciseTailEps);

// Weighted mixture of states that may live on different cutoffs; each member
// is embedded at the per-mode maximum cutoff first.
QuantumState mix_states(std::span<const WeightedState> ensemble);

}  // namespace mzbell
