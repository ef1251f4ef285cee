#pragma once

#include <stdexcept>
#include <string>

namespace ctc {

// Base class for all library errors.
struct error : std::runtime_error {
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

// Tensor-factor bookkeeping violations: mismatched sides, bad factor index.
struct dimension_error : error {
    explicit dimension_error(const std::string& what) : error(what) {}
};

// A matrix failed density-operator validation (Hermiticity, trace, PSD)
// or a Bloch vector lies outside the unit ball.
struct validation_error : error {
    explicit validation_error(const std::string& what) : error(what) {}
};

// Postselection outcome has (numerically) zero probability.
struct postselection_error : error {
    explicit postselection_error(const std::string& what) : error(what) {}
};

// Probe state cannot carry information (epsilon = 0) or is out of range.
struct probe_error : error {
    explicit probe_error(const std::string& what) : error(what) {}
};

// A guarantee of the theory failed to hold numerically.
struct internal_error : error {
    explicit internal_error(const std::string& what) : error(what) {}
};

}  // namespace ctc
