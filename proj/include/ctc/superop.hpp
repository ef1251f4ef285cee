#pragma once

#include <functional>
#include <vector>

#include "ctc/complex_matrix.hpp"
#include "ctc/eig.hpp"

namespace ctc {

/// Row-major vectorization: vec(X)[i*d + j] = X(i, j).
inline std::vector<Complex> vec(const ComplexMatrix& x) { return x.raw(); }

inline ComplexMatrix unvec(const std::vector<Complex>& v, const std::vector<int>& dims) {
    ComplexMatrix m(dims);
    const int d = m.side();
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) m(r, c) = v[static_cast<size_t>(r) * d + c];
    return m;
}

/// Matrix of a linear map on d x d operators, acting on row-major
/// vectorized input: M vec(X) = vec(map(X)). Built column by column from
/// the map's action on matrix units.
inline ComplexMatrix vectorize_linear_map(const std::function<ComplexMatrix(const ComplexMatrix&)>& map,
                                          const std::vector<int>& operand_dims) {
    const int d = ComplexMatrix::product(operand_dims);
    ComplexMatrix m({d * d});
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            ComplexMatrix unit(operand_dims);
            unit(i, j) = 1;
            const ComplexMatrix image = map(unit);
            const int col = i * d + j;
            for (int r = 0; r < d; ++r)
                for (int c = 0; c < d; ++c) m(r * d + c, col) = image(r, c);
        }
    return m;
}

/// Apply a vectorized map to an operator.
inline ComplexMatrix apply_vectorized(const ComplexMatrix& m, const ComplexMatrix& x) {
    const int d = x.side();
    if (m.side() != d * d) throw dimension_error("apply_vectorized: size mismatch");
    std::vector<Complex> in = vec(x), out(static_cast<size_t>(d) * d, Complex(0, 0));
    for (int r = 0; r < d * d; ++r) {
        Complex acc(0, 0);
        for (int c = 0; c < d * d; ++c) acc += m(r, c) * in[static_cast<size_t>(c)];
        out[static_cast<size_t>(r)] = acc;
    }
    return unvec(out, x.dims());
}

namespace detail {

/// tr_CR[U (rho ⊗ x) U†]; by convention the CV subsystem is the last
/// tensor factor of U. `x` may be any operator on the CV factor (the map
/// is used in its linear extension, not only on densities).
inline ComplexMatrix cv_map_apply(const ComplexMatrix& u, const ComplexMatrix& rho,
                                  const ComplexMatrix& x) {
    const int cv = u.dims().back();
    if (x.side() != cv) throw dimension_error("cv map: operand does not match the CV factor");
    if (rho.side() * cv != u.side()) throw dimension_error("cv map: rho does not match the CR factors");
    std::vector<int> dims = rho.dims();
    dims.push_back(cv);
    const ComplexMatrix joint = kron(rho, x).with_dims(dims);
    const ComplexMatrix evolved = u.with_dims(dims) * joint * u.dagger().with_dims(dims);
    return partial_trace(evolved, {static_cast<int>(dims.size()) - 1});
}

}  // namespace detail

/// Matrix M of side (d_CV)^2 with M vec(x) = vec(tr_CR[U (rho ⊗ x) U†])
/// for every operator x on the CV factor.
inline ComplexMatrix vectorize_cv_superoperator(const ComplexMatrix& u, const ComplexMatrix& rho) {
    const int cv = u.dims().back();
    return vectorize_linear_map(
        [&](const ComplexMatrix& x) { return detail::cv_map_apply(u, rho, x); }, {cv});
}

struct FixedSpace {
    int complex_dim = 0;  // dim over C of ker(M - I)
    // Frobenius-orthonormal Hermitian basis; real dim equals complex_dim.
    std::vector<ComplexMatrix> hermitian;
};

/// Hermitian basis of the kernel of (M - I), where M is the vectorized
/// map. The kernel of a Hermiticity-preserving map is closed under the
/// adjoint, so its Hermitian elements span it over the reals.
/// `singular_threshold` decides which singular values of (M - I) count
/// as zero.
inline FixedSpace hermitian_fixed_space(const ComplexMatrix& m, const std::vector<int>& operand_dims,
                                        double singular_threshold = 1e-10) {
    const int d = ComplexMatrix::product(operand_dims);
    ComplexMatrix k = m - ComplexMatrix::identity(d * d);
    const SvdResult svd = one_sided_jacobi_svd(k);

    std::vector<ComplexMatrix> kernel;
    for (int j = 0; j < d * d; ++j) {
        if (svd.singular_values[static_cast<size_t>(j)] > singular_threshold) continue;
        std::vector<Complex> col(static_cast<size_t>(d) * d);
        for (int r = 0; r < d * d; ++r) col[static_cast<size_t>(r)] = svd.v(r, j);
        kernel.push_back(unvec(col, operand_dims));
    }

    // Real Gram-Schmidt over Hermitian candidates (V + V†)/2 and i(V - V†)/2.
    FixedSpace out;
    out.complex_dim = static_cast<int>(kernel.size());
    auto add_candidate = [&](ComplexMatrix cand, double threshold) {
        for (int pass = 0; pass < 2; ++pass) {  // re-orthogonalize once
            for (const ComplexMatrix& b : out.hermitian) {
                Complex ip(0, 0);
                for (int r = 0; r < d; ++r)
                    for (int c = 0; c < d; ++c) ip += std::conj(b(r, c)) * cand(r, c);
                // both are Hermitian, so the inner product is real
                cand -= ip.real() * b;
            }
        }
        const double nrm = cand.frobenius_norm();
        if (nrm < threshold) return;  // linearly dependent on earlier candidates
        cand *= Complex(1.0 / nrm, 0);
        out.hermitian.push_back(cand);
    };
    // Two rounds: a strict pass, then a looser one in case of cancellation,
    // so the Hermitian basis always reaches the kernel dimension.
    for (double threshold : {1e-6, 1e-9}) {
        for (const ComplexMatrix& v : kernel) {
            if (static_cast<int>(out.hermitian.size()) == out.complex_dim) break;
            add_candidate((v + v.dagger()) * 0.5, threshold);
            add_candidate((v - v.dagger()) * Complex(0, 0.5), threshold);
        }
    }
    if (static_cast<int>(out.hermitian.size()) != out.complex_dim)
        throw internal_error("hermitian_fixed_space: Hermitian basis smaller than kernel");
    return out;
}

}  // namespace ctc
