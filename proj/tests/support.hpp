#pragma once

#include <catch2/catch_amalgamated.hpp>

#include "ctc/complex_matrix.hpp"
#include "ctc/density.hpp"
#include "ctc/gates.hpp"
#include "ctc/random.hpp"

namespace test_support {

using ctc::Complex;
using ctc::ComplexMatrix;
using ctc::DensityOperator;

inline double dist(const ComplexMatrix& a, const ComplexMatrix& b) {
    return (a - b).frobenius_norm();
}

inline void require_close(const ComplexMatrix& a, const ComplexMatrix& b, double tol,
                          const std::string& what = "") {
    INFO(what << " distance = " << dist(a, b));
    REQUIRE(dist(a, b) <= tol);
}

inline DensityOperator ket_state(const std::vector<int>& dims, int index) {
    return DensityOperator(ctc::ket_density(ctc::basis_ket(dims, index), dims));
}

inline DensityOperator plus_state() {
    const double s = 1.0 / std::sqrt(2.0);
    return DensityOperator(ctc::ket_density({Complex(s, 0), Complex(s, 0)}, {2}));
}

/// Independent element-summation oracle for the partial trace, written
/// directly from the index definition rather than through the library's
/// stride bookkeeping.
inline ComplexMatrix partial_trace_oracle(const ComplexMatrix& m, const std::vector<int>& keep) {
    const auto& dims = m.dims();
    const int nf = static_cast<int>(dims.size());
    std::vector<int> kept_dims;
    for (int k : keep) kept_dims.push_back(dims[static_cast<size_t>(k)]);
    ComplexMatrix out(kept_dims.empty() ? std::vector<int>{1} : kept_dims);

    std::vector<int> idx_r(nf, 0), idx_c(nf, 0);
    const auto advance = [&](std::vector<int>& idx) {
        for (int f = nf - 1; f >= 0; --f) {
            if (++idx[f] < dims[static_cast<size_t>(f)]) return true;
            idx[f] = 0;
        }
        return false;
    };
    const auto flat = [&](const std::vector<int>& idx) {
        int v = 0;
        for (int f = 0; f < nf; ++f) v = v * dims[static_cast<size_t>(f)] + idx[f];
        return v;
    };
    const auto flat_kept = [&](const std::vector<int>& idx) {
        int v = 0;
        for (int k : keep) v = v * dims[static_cast<size_t>(k)] + idx[static_cast<size_t>(k)];
        return v;
    };

    std::fill(idx_r.begin(), idx_r.end(), 0);
    do {
        std::fill(idx_c.begin(), idx_c.end(), 0);
        do {
            bool diag = true;
            for (int f = 0; f < nf; ++f) {
                bool is_kept = false;
                for (int k : keep) is_kept = is_kept || (k == f);
                if (!is_kept && idx_r[f] != idx_c[f]) diag = false;
            }
            if (diag) out(flat_kept(idx_r), flat_kept(idx_c)) += m(flat(idx_r), flat(idx_c));
        } while (advance(idx_c));
    } while (advance(idx_r));
    return out;
}

inline ComplexMatrix random_matrix(const std::vector<int>& dims, std::uint64_t seed) {
    ctc::Rng rng(seed);
    ComplexMatrix m(dims);
    for (int r = 0; r < m.side(); ++r)
        for (int c = 0; c < m.side(); ++c) m(r, c) = rng.next_complex_gaussian();
    return m;
}

inline ComplexMatrix random_hermitian(const std::vector<int>& dims, std::uint64_t seed) {
    const ComplexMatrix g = random_matrix(dims, seed);
    return (g + g.dagger()) * 0.5;
}

}  // namespace test_support
