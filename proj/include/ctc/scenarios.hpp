#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ctc/complex_matrix.hpp"
#include "ctc/density.hpp"
#include "ctc/gates.hpp"
#include "ctc/prescriptions.hpp"

namespace ctc {

constexpr double kEvenPowerTolerance = 1e-9;

/// Closed-form reference states for a scenario, as functions of the CR
/// input. `tau_d` takes the family parameter g where one exists (it is
/// ignored for scenarios with a unique CV solution).
struct ScenarioOracle {
    std::function<ComplexMatrix(const DensityOperator&, double g)> cr_output_d;
    std::function<ComplexMatrix(const DensityOperator&, double g)> cv_state_d;
    std::function<std::optional<ComplexMatrix>(const DensityOperator&)> cr_output_p;  // nullopt: no solution
    std::function<ComplexMatrix(const DensityOperator&)> cv_state_p;
    bool parametrized = false;        // tau_d depends on g in [0, 1]
    bool restricted_input = false;    // closed forms only valid at preset_rho
};

/// A named interaction: the unitary (CR factors first, CV last), the
/// factor layout, any parameters, and optional closed-form oracle states.
struct Scenario {
    std::string name;
    ComplexMatrix unitary;
    std::vector<int> cr_dims;
    int cv_dim = 2;
    double p = 0;                     // power of the swap interaction
    bool trivial_even_power = false;  // swap power at an even integer: U = 1
    std::optional<DensityOperator> preset_rho;
    std::optional<ScenarioOracle> oracle;
};

/// CV qubit applies a NOT to the CR qubit, then swaps onto it:
/// U = SWAP · CNOT(control = CV, target = CR).
inline Scenario grandfather() {
    Scenario s;
    s.name = "grandfather";
    s.cr_dims = {2};
    const std::vector<int> dims{2, 2};
    s.unitary = swap_on(dims, 0, 1) * cnot_on(dims, 1, 0);

    ScenarioOracle o;
    o.cv_state_d = [](const DensityOperator& rho, double) {
        return (rho.matrix() + sigma(1) * rho.matrix() * sigma(1)) * 0.5;
    };
    o.cr_output_d = [](const DensityOperator& rho, double) {
        const double x = (sigma(1) * rho.matrix()).trace().real();
        ComplexMatrix m = ComplexMatrix::identity(2);
        m(0, 1) = x * x;
        m(1, 0) = x * x;
        return m * 0.5;
    };
    o.cr_output_p = [](const DensityOperator& rho) -> std::optional<ComplexMatrix> {
        if (rho.matrix()(0, 0).real() < kPostselectionThreshold) return std::nullopt;
        ComplexMatrix plus({2});
        plus(0, 0) = 0.5;
        plus(0, 1) = 0.5;
        plus(1, 0) = 0.5;
        plus(1, 1) = 0.5;
        return plus;
    };
    o.cv_state_p = [](const DensityOperator& rho) {
        return (rho.matrix() + sigma(1) * rho.matrix() * sigma(1)) * 0.5;
    };
    s.oracle = o;
    return s;
}

/// Book (factor 1), mathematician (factor 2) and the time-travelling
/// proof (factor 3): U = SWAP(2,3) · CNOT(1 -> 2) · CNOT(3 -> 1), with
/// the preset input |00><00| (nobody holds the proof initially). The CV
/// solutions form the one-parameter family g|0><0| + (1-g)|1><1|.
inline Scenario unproven_theorem() {
    Scenario s;
    s.name = "unproven-theorem";
    s.cr_dims = {2, 2};
    const std::vector<int> dims{2, 2, 2};
    s.unitary = swap_on(dims, 1, 2) * cnot_on(dims, 0, 1) * cnot_on(dims, 2, 0);
    s.preset_rho = DensityOperator(ket_density(basis_ket({2, 2}, 0), {2, 2}));

    ScenarioOracle o;
    o.parametrized = true;
    o.restricted_input = true;
    o.cv_state_d = [](const DensityOperator&, double g) {
        ComplexMatrix m({2});
        m(0, 0) = g;
        m(1, 1) = 1.0 - g;
        return m;
    };
    o.cr_output_d = [](const DensityOperator&, double g) {
        ComplexMatrix m({2, 2});
        m(0, 0) = g;        // |00><00|
        m(3, 3) = 1.0 - g;  // |11><11|
        return m;
    };
    o.cr_output_p = [](const DensityOperator&) -> std::optional<ComplexMatrix> {
        return ket_density(bell_ket(), {2, 2});
    };
    o.cv_state_p = [](const DensityOperator&) { return ComplexMatrix::identity(2) * 0.5; };
    s.oracle = o;
    return s;
}

/// Probabilistic scattering between the CR and CV modes:
/// S^p = (1 + e^{-i pi p})/2 · 1 + (1 - e^{-i pi p})/2 · SWAP. Computed
/// from the two-term form directly, which is exact for every real p.
inline Scenario power_swap(double p) {
    if (!std::isfinite(p)) throw validation_error("power_swap: p must be finite");
    Scenario s;
    s.name = "power-swap";
    s.cr_dims = {2};
    s.p = p;
    const double nearest_even = 2.0 * std::round(p / 2.0);
    s.trivial_even_power = std::abs(p - nearest_even) < kEvenPowerTolerance;

    const Complex phase = std::exp(Complex(0, -M_PI * p));
    const Complex c_id = (Complex(1, 0) + phase) * 0.5;
    const Complex c_swap = (Complex(1, 0) - phase) * 0.5;
    s.unitary = c_id * ComplexMatrix::identity({2, 2}) + c_swap * swap_gate();

    ScenarioOracle o;
    o.cr_output_d = [](const DensityOperator& rho, double) { return rho.matrix(); };
    o.cv_state_d = [](const DensityOperator& rho, double) { return rho.matrix(); };
    o.cr_output_p = [](const DensityOperator& rho) -> std::optional<ComplexMatrix> {
        return rho.matrix();
    };
    o.cv_state_p = [p](const DensityOperator& rho) {
        const double c2 = std::cos(M_PI * p / 2.0) * std::cos(M_PI * p / 2.0);
        return c2 * 0.5 * ComplexMatrix::identity(2) + (1.0 - c2) * rho.matrix();
    };
    s.oracle = o;
    return s;
}

inline Scenario scenario_by_name(const std::string& name, double p = 0.5) {
    if (name == "grandfather") return grandfather();
    if (name == "unproven-theorem") return unproven_theorem();
    if (name == "power-swap") return power_swap(p);
    throw validation_error("unknown scenario '" + name + "'");
}

/// (n+1)-th iterate of the CV map for the swap interaction in closed
/// form: cos^{2(n+1)}(pi p / 2) (tau0 - rho) + rho.
inline ComplexMatrix swap_ecp_closed_form(const DensityOperator& rho, const DensityOperator& tau0,
                                          double p, int n) {
    const double c2 = std::cos(M_PI * p / 2.0) * std::cos(M_PI * p / 2.0);
    const double factor = std::pow(c2, n + 1);
    return factor * (tau0.matrix() - rho.matrix()) + rho.matrix();
}

/// Residual of the finite geometric series identity
/// sum_{k=0}^{n} cos^{2k}(pi p/2) = (1 - cos^{2(n+1)}(pi p/2)) / sin^2(pi p/2).
inline double geometric_series_check(double p, int n) {
    const double c2 = std::cos(M_PI * p / 2.0) * std::cos(M_PI * p / 2.0);
    const double s2 = std::sin(M_PI * p / 2.0) * std::sin(M_PI * p / 2.0);
    if (s2 < 1e-12)
        throw validation_error("geometric_series_check: degenerate denominator at even-integer p");
    double lhs = 0;
    for (int k = 0; k <= n; ++k) lhs += std::pow(c2, k);
    const double rhs = (1.0 - std::pow(c2, n + 1)) / s2;
    return std::abs(lhs - rhs);
}

}  // namespace ctc
