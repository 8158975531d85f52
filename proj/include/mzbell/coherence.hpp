#pragma once

// First/second-order coherence between two channels and the Mach-Zehnder
// interferometer that measures them.

#include <span>
#include <vector>

#include "mzbell/fock.hpp"

namespace mzbell {

inline constexpr double kDegeneracyFloor = 1e-15;

// The five channel moments every analytic formula is built from.
struct CoherenceMoments {
    Complex m12;   // <a1^dag a2>
    Complex anom;  // <a1 a2>
    double n1;     // <a1^dag a1>
    double n2;     // <a2^dag a2>
    double n1n2;   // <a1^dag a2^dag a2 a1>
};

CoherenceMoments compute_moments(const QuantumState& state, int mode1 = 0, int mode2 = 1);

// Throw DegenerateState when n1 * n2 is below the degeneracy floor.
Complex g1(const CoherenceMoments& m);
double g2(const CoherenceMoments& m);

// g2 - |g1|^2; negative means no classical stochastic field reproduces the moments.
double titulaer_glauber_margin(const CoherenceMoments& m);

struct FringeRecord {
    double phase;
    double intensity_c;
    double intensity_d;
    double coincidence;  // <c^dag d^dag d c>
};

// For each phase: shift channel a1, recombine on the 50:50 beamsplitter and
// record both output intensities plus the normally ordered coincidence.
// The two channels are first embedded at cutoff K1 + K2 so recombination
// is exact.
std::vector<FringeRecord> fringe_scan(const QuantumState& state, std::span<const double> phases);

// `count` evenly spaced phases over [0, 2 pi).
std::vector<double> phase_grid(int count);

struct VisibilityFit {
    double visibility;  // (Imax - Imin) / (Imax + Imin) of the fitted cosine
    double offset;      // A in A + B cos(phi + phi0)
    double amplitude;   // B
    double phase;       // phi0
};

// Least-squares fit of intensity_c to A + B cos(phi + phi0). Needs at least
// three records covering a full period; throws InvalidInput otherwise, or
// when the fitted offset is not positive.
VisibilityFit visibility(std::span<const FringeRecord> records);

// 2 |m12| / (n1 + n2): the visibility for unbalanced channels, equal to
// |g1| when n1 == n2.
double visibility_analytic(const CoherenceMoments& m);

}  // namespace mzbell
