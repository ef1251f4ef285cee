#pragma once

#include <cmath>
#include <vector>

#include "ctc/complex_matrix.hpp"

namespace ctc {

inline ComplexMatrix hadamard() {
    ComplexMatrix h({2});
    const double s = 1.0 / std::sqrt(2.0);
    h(0, 0) = s;
    h(0, 1) = s;
    h(1, 0) = s;
    h(1, 1) = -s;
    return h;
}

/// Phase-shift gate diag(1, i).
inline ComplexMatrix phase_gate() {
    ComplexMatrix r({2});
    r(0, 0) = 1;
    r(1, 1) = Complex(0, 1);
    return r;
}

/// Two-qubit SWAP.
inline ComplexMatrix swap_gate() {
    ComplexMatrix s({2, 2});
    s(0, 0) = 1;
    s(1, 2) = 1;
    s(2, 1) = 1;
    s(3, 3) = 1;
    return s;
}

/// SWAP of factors a and b embedded in a multi-qubit register.
inline ComplexMatrix swap_on(const std::vector<int>& full_dims, int a, int b) {
    if (a > b) std::swap(a, b);
    return embed(swap_gate(), full_dims, {a, b});
}

/// CNOT with `control` and `target` naming qubit factors of the register.
inline ComplexMatrix cnot_on(const std::vector<int>& full_dims, int control, int target) {
    ComplexMatrix g({2, 2});
    if (control < target) {
        // control is the first factor of the embedded pair
        g(0, 0) = 1;
        g(1, 1) = 1;
        g(2, 3) = 1;
        g(3, 2) = 1;
        return embed(g, full_dims, {control, target});
    }
    // control is the second factor of the embedded pair
    g(0, 0) = 1;
    g(1, 3) = 1;
    g(2, 2) = 1;
    g(3, 1) = 1;
    return embed(g, full_dims, {target, control});
}

/// Computational-basis ket |index> of a register with the given factor dims.
inline std::vector<Complex> basis_ket(const std::vector<int>& dims, int index) {
    std::vector<Complex> k(static_cast<size_t>(ComplexMatrix::product(dims)), Complex(0, 0));
    k[static_cast<size_t>(index)] = 1;
    return k;
}

/// The Bell pair (|00> + |11>)/sqrt(2) as a ket on two qubits.
inline std::vector<Complex> bell_ket() {
    const double s = 1.0 / std::sqrt(2.0);
    return {Complex(s, 0), Complex(0, 0), Complex(0, 0), Complex(s, 0)};
}

/// Rank-1 density |ket><ket| with the given factor dims.
inline ComplexMatrix ket_density(const std::vector<Complex>& ket, const std::vector<int>& dims) {
    if (static_cast<int>(ket.size()) != ComplexMatrix::product(dims))
        throw dimension_error("ket_density: ket length does not match dims");
    ComplexMatrix m(dims);
    for (size_t r = 0; r < ket.size(); ++r)
        for (size_t c = 0; c < ket.size(); ++c)
            m(static_cast<int>(r), static_cast<int>(c)) = ket[r] * std::conj(ket[c]);
    return m;
}

}  // namespace ctc
