#pragma once

#include <cmath>
#include <cstdint>

#include "ctc/complex_matrix.hpp"
#include "ctc/density.hpp"

namespace ctc {

/// Counter-based seed derivation, so per-case and per-axis streams can be
/// split off a suite seed without correlation.
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t counter) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (counter + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic uniform/Gaussian generator built on splitmix64 so that
/// streams are reproducible independent of the standard library.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller.
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u = 0;
        while (u <= 0) u = next_double();
        const double v = next_double();
        const double r = std::sqrt(-2.0 * std::log(u));
        spare_ = r * std::sin(2.0 * M_PI * v);
        have_spare_ = true;
        return r * std::cos(2.0 * M_PI * v);
    }

    Complex next_complex_gaussian() {
        const double re = next_gaussian();
        const double im = next_gaussian();
        return Complex(re, im);
    }

  private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0;
};

/// Haar-distributed unitary: QR of a complex Ginibre matrix, with the R
/// diagonal made real positive so the decomposition (and hence the
/// distribution of Q) is unique. Two Gram-Schmidt passes keep
/// ||U†U - I||_F at machine precision.
inline ComplexMatrix random_unitary(int dim, std::uint64_t seed) {
    if (dim < 1) throw dimension_error("random_unitary: dim must be >= 1");
    Rng rng(seed);
    ComplexMatrix a({dim});
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) a(r, c) = rng.next_complex_gaussian();

    ComplexMatrix q({dim});
    for (int j = 0; j < dim; ++j) {
        std::vector<Complex> col(dim);
        for (int r = 0; r < dim; ++r) col[static_cast<size_t>(r)] = a(r, j);
        for (int pass = 0; pass < 2; ++pass) {
            for (int k = 0; k < j; ++k) {
                Complex proj(0, 0);
                for (int r = 0; r < dim; ++r) proj += std::conj(q(r, k)) * col[static_cast<size_t>(r)];
                for (int r = 0; r < dim; ++r) col[static_cast<size_t>(r)] -= proj * q(r, k);
            }
        }
        double nrm = 0;
        for (const Complex& z : col) nrm += std::norm(z);
        nrm = std::sqrt(nrm);
        for (int r = 0; r < dim; ++r) q(r, j) = col[static_cast<size_t>(r)] / nrm;
    }
    return q;
}

inline ComplexMatrix random_unitary(const std::vector<int>& dims, std::uint64_t seed) {
    return random_unitary(ComplexMatrix::product(dims), seed).with_dims(dims);
}

/// Full-rank random density operator G G† / tr(G G†) with G Ginibre.
inline DensityOperator random_density(const std::vector<int>& dims, std::uint64_t seed) {
    const int n = ComplexMatrix::product(dims);
    Rng rng(split_seed(seed, 0x6d5f));
    ComplexMatrix g(dims);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) g(r, c) = rng.next_complex_gaussian();
    ComplexMatrix rho = g * g.dagger();
    rho *= Complex(1.0 / rho.trace().real(), 0);
    return DensityOperator(rho);
}

/// Uniform point in the closed Bloch ball.
inline BlochVector random_bloch(std::uint64_t seed) {
    Rng rng(split_seed(seed, 0xb10c));
    BlochVector b;
    do {
        for (int k = 0; k < 3; ++k) b[k] = 2.0 * rng.next_double() - 1.0;
    } while (b.norm() > 1.0);
    return b;
}

}  // namespace ctc
