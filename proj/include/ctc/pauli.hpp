#pragma once

#include <array>
#include <cmath>

#include "ctc/complex_matrix.hpp"

namespace ctc {

/// sigma(0) = identity, sigma(1..3) = x, y, z.
inline const ComplexMatrix& sigma(int k) {
    static const std::array<ComplexMatrix, 4> table = [] {
        std::array<ComplexMatrix, 4> t{ComplexMatrix::identity(2), ComplexMatrix::zero(2),
                                       ComplexMatrix::zero(2), ComplexMatrix::zero(2)};
        t[1](0, 1) = 1;
        t[1](1, 0) = 1;
        t[2](0, 1) = Complex(0, -1);
        t[2](1, 0) = Complex(0, 1);
        t[3](0, 0) = 1;
        t[3](1, 1) = -1;
        return t;
    }();
    if (k < 0 || k > 3) throw dimension_error("sigma: index must be 0..3");
    return table[static_cast<size_t>(k)];
}

inline int levi_civita(int i, int j, int k) {
    if (i == j || j == k || i == k) return 0;
    if ((i == 1 && j == 2 && k == 3) || (i == 2 && j == 3 && k == 1) || (i == 3 && j == 1 && k == 2))
        return 1;
    return -1;
}

/// Expansion of a two-qubit operator in the sigma_mu x sigma_nu basis,
/// U = sum_{mu,nu} coeff[mu][nu] sigma_mu (x) sigma_nu, with
/// coeff[mu][nu] = tr[(sigma_mu (x) sigma_nu) U] / 4. The column
/// operators aop[nu] = sum_mu coeff[mu][nu] sigma_mu satisfy
/// U = sum_nu aop[nu] (x) sigma_nu.
struct PauliDecomposition {
    std::array<std::array<Complex, 4>, 4> coeff{};
    std::array<ComplexMatrix, 4> aop{ComplexMatrix::zero(2), ComplexMatrix::zero(2),
                                     ComplexMatrix::zero(2), ComplexMatrix::zero(2)};

    ComplexMatrix reassemble() const {
        ComplexMatrix u({2, 2});
        for (int mu = 0; mu < 4; ++mu)
            for (int nu = 0; nu < 4; ++nu)
                u += coeff[mu][nu] * kron(sigma(mu), sigma(nu));
        return u;
    }

    /// sum |coeff|^2; equals tr[U†U]/4, i.e. exactly 1 for a unitary.
    double coefficient_norm_squared() const {
        double s = 0;
        for (const auto& row : coeff)
            for (const Complex& z : row) s += std::norm(z);
        return s;
    }
};

inline PauliDecomposition pauli_expand(const ComplexMatrix& u) {
    if (u.side() != 4) throw dimension_error("pauli_expand: expected a 4x4 operator");
    PauliDecomposition d;
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu) {
            const ComplexMatrix basis = kron(sigma(mu), sigma(nu));
            // Pauli matrices are Hermitian, so the adjoint in the
            // projection is the matrix itself.
            Complex c(0, 0);
            for (int r = 0; r < 4; ++r)
                for (int k = 0; k < 4; ++k) c += basis(r, k) * u(k, r);
            d.coeff[mu][nu] = c * 0.25;
        }
    for (int nu = 0; nu < 4; ++nu) {
        ComplexMatrix a({2});
        a = ComplexMatrix::zero(2);
        for (int mu = 0; mu < 4; ++mu) a += d.coeff[mu][nu] * sigma(mu);
        d.aop[nu] = a;
    }
    return d;
}

}  // namespace ctc
