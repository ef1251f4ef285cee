#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "ctc/complex_matrix.hpp"

// Dense Hermitian eigendecomposition and singular value decomposition for
// the tiny matrices this library works with (side <= 32). Both are cyclic
// Jacobi schemes; the one-sided SVD resolves singular values near zero to
// machine precision, which the nullspace threshold of 1e-10 relies on.

namespace ctc {

struct EigResult {
    std::vector<double> values;   // ascending
    ComplexMatrix vectors;        // columns are eigenvectors
};

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations. The Hermitian part (A + A†)/2 of the input is used.
inline EigResult hermitian_eig(const ComplexMatrix& a_in) {
    const int n = a_in.side();
    ComplexMatrix a = (a_in + a_in.dagger()) * 0.5;
    ComplexMatrix v = ComplexMatrix::identity(a_in.dims());

    const int max_sweeps = 60;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += std::norm(a(p, q));
        if (off < 1e-32 * (1.0 + a.frobenius_norm())) break;

        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const Complex apq = a(p, q);
                if (std::abs(apq) < 1e-300) continue;
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                // Unitary 2x2 rotation [c, s; -conj(s), c] zeroing a(p,q).
                const double absapq = std::abs(apq);
                const Complex phase = apq / absapq;
                const double theta = 0.5 * std::atan2(2.0 * absapq, app - aqq);
                const double c = std::cos(theta);
                const Complex s = std::sin(theta) * phase;

                for (int k = 0; k < n; ++k) {
                    const Complex akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp + std::conj(s) * akq;
                    a(k, q) = -s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const Complex apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk + s * aqk;
                    a(q, k) = -std::conj(s) * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const Complex vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp + std::conj(s) * vkq;
                    v(k, q) = -s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return a(i, i).real() < a(j, j).real(); });

    EigResult res;
    res.values.resize(n);
    res.vectors = ComplexMatrix(a_in.dims());
    for (int i = 0; i < n; ++i) {
        res.values[i] = a(order[i], order[i]).real();
        for (int k = 0; k < n; ++k) res.vectors(k, i) = v(k, order[i]);
    }
    return res;
}

inline double min_eigenvalue(const ComplexMatrix& hermitian) {
    return hermitian_eig(hermitian).values.front();
}

struct SvdResult {
    std::vector<double> singular_values;  // descending
    ComplexMatrix v;                      // right singular vectors (columns)
};

/// One-sided Jacobi SVD (right singular vectors only). Columns of the
/// working copy are rotated until mutually orthogonal; their norms are the
/// singular values. Small singular values come out accurate in absolute
/// terms, unlike the eigenvalues of A†A.
inline SvdResult one_sided_jacobi_svd(const ComplexMatrix& a_in) {
    const int n = a_in.side();
    ComplexMatrix a = a_in;
    ComplexMatrix v = ComplexMatrix::identity(a_in.dims());

    const int max_sweeps = 60;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool rotated = false;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                double hpp = 0, hqq = 0;
                Complex hpq(0, 0);
                for (int k = 0; k < n; ++k) {
                    hpp += std::norm(a(k, p));
                    hqq += std::norm(a(k, q));
                    hpq += std::conj(a(k, p)) * a(k, q);
                }
                const double abshpq = std::abs(hpq);
                if (abshpq <= 4e-16 * std::sqrt(hpp * hqq) || abshpq < 1e-300) continue;
                rotated = true;

                const Complex phase = hpq / abshpq;
                const double theta = 0.5 * std::atan2(2.0 * abshpq, hpp - hqq);
                const double c = std::cos(theta);
                const Complex s = std::sin(theta) * phase;

                for (int k = 0; k < n; ++k) {
                    const Complex akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp + std::conj(s) * akq;
                    a(k, q) = -s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const Complex vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp + std::conj(s) * vkq;
                    v(k, q) = -s * vkp + c * vkq;
                }
            }
        }
        if (!rotated) break;
    }

    std::vector<double> sv(n);
    for (int j = 0; j < n; ++j) {
        double s = 0;
        for (int k = 0; k < n; ++k) s += std::norm(a(k, j));
        sv[j] = std::sqrt(s);
    }

    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int i, int j) { return sv[i] > sv[j]; });

    SvdResult res;
    res.singular_values.resize(n);
    res.v = ComplexMatrix(a_in.dims());
    for (int j = 0; j < n; ++j) {
        res.singular_values[j] = sv[order[j]];
        for (int k = 0; k < n; ++k) res.v(k, j) = v(k, order[j]);
    }
    return res;
}

}  // namespace ctc
