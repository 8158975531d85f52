#pragma once

#include <stdexcept>
#include <string>

namespace mzbell {

// Malformed input: dimension mismatch, bad weights, out-of-range parameters.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A basis would exceed the configured dimension limit.
class DimensionLimit : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A coherence quantity needs a channel with non-zero mean photon number.
class DegenerateState : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// <S1 S2> (or the analytic denominator) vanishes, so the modulation depth is undefined.
class DegenerateDenominator : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A transform pushed probability above the retained Fock cutoff.
class TruncationLeakage : public std::runtime_error {
public:
    TruncationLeakage(const std::string& what, double leakage)
        : std::runtime_error(what), leakage_(leakage) {}
    double leakage() const noexcept { return leakage_; }

private:
    double leakage_;
};

}  // namespace mzbell
