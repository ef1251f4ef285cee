#pragma once

#include <array>
#include <cmath>

#include "ctc/complex_matrix.hpp"
#include "ctc/eig.hpp"
#include "ctc/pauli.hpp"

namespace ctc {

constexpr double kDefaultTolerance = 1e-9;

/// Three real expectation values (tr[sigma_k rho], k = 1..3) that fully
/// parametrize a qubit state.
struct BlochVector {
    std::array<double, 3> r{0, 0, 0};

    double norm() const { return std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]); }
    double& operator[](int k) { return r[static_cast<size_t>(k)]; }
    double operator[](int k) const { return r[static_cast<size_t>(k)]; }
};

/// A ComplexMatrix validated as a quantum state: Hermitian, unit trace
/// and (unless explicitly waived, e.g. for shot-noise reconstructions)
/// positive semidefinite. Values are immutable after construction.
class DensityOperator {
  public:
    DensityOperator() : m_(ComplexMatrix::identity(1)) {}

    explicit DensityOperator(const ComplexMatrix& m, double tol = kDefaultTolerance,
                             bool require_psd = true)
        : m_(m) {
        if (!m.is_finite()) throw validation_error("density: non-finite entries");
        const double herm = (m - m.dagger()).frobenius_norm();
        if (herm > tol) throw validation_error("density: not Hermitian (residual " + std::to_string(herm) + ")");
        const Complex t = m.trace();
        if (std::abs(t - Complex(1, 0)) > tol)
            throw validation_error("density: trace != 1 (got " + std::to_string(t.real()) + ")");
        if (require_psd) {
            const double lmin = min_eigenvalue(m);
            if (lmin < -tol)
                throw validation_error("density: negative eigenvalue " + std::to_string(lmin));
        }
    }

    const ComplexMatrix& matrix() const { return m_; }
    int side() const { return m_.side(); }
    const std::vector<int>& dims() const { return m_.dims(); }

    static DensityOperator maximally_mixed(const std::vector<int>& dims) {
        ComplexMatrix m = ComplexMatrix::identity(dims);
        m *= Complex(1.0 / m.side(), 0);
        return DensityOperator(m);
    }

  private:
    ComplexMatrix m_;
};

inline BlochVector bloch_from_state(const DensityOperator& rho, double tol = kDefaultTolerance) {
    if (rho.side() != 2) throw dimension_error("bloch_from_state: not a qubit state");
    BlochVector b;
    for (int k = 1; k <= 3; ++k) {
        const Complex t = (sigma(k) * rho.matrix()).trace();
        if (std::abs(t.imag()) > tol)
            throw validation_error("bloch_from_state: complex expectation value");
        b[k - 1] = t.real();
    }
    return b;
}

/// (I + sum_k r_k sigma_k) / 2, Hermitian with unit trace by construction.
inline ComplexMatrix bloch_matrix(const BlochVector& r) {
    ComplexMatrix m = ComplexMatrix::identity(2);
    for (int k = 1; k <= 3; ++k) m += r[k - 1] * sigma(k);
    m *= 0.5;
    return m;
}

inline DensityOperator state_from_bloch(const BlochVector& r, double tol = kDefaultTolerance) {
    if (r.norm() > 1.0 + tol)
        throw validation_error("state_from_bloch: Bloch vector outside the unit ball (|r| = " +
                               std::to_string(r.norm()) + ")");
    return DensityOperator(bloch_matrix(r), std::max(tol, 1e-12));
}

/// -sum lambda ln(lambda) over the eigenvalues, in nats; 0 ln 0 = 0.
inline double von_neumann_entropy(const DensityOperator& rho) {
    double s = 0;
    for (double lambda : hermitian_eig(rho.matrix()).values) {
        if (lambda <= 0) continue;  // clipped: validation already bounded negatives
        s -= lambda * std::log(lambda);
    }
    return s;
}

}  // namespace ctc
