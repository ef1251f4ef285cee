#pragma once

#include <cmath>
#include <functional>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "ctc/complex_matrix.hpp"
#include "ctc/density.hpp"
#include "ctc/eig.hpp"
#include "ctc/superop.hpp"

namespace ctc {

constexpr double kSingularThreshold = 1e-10;
constexpr double kPostselectionThreshold = 1e-12;
constexpr double kEcpDefaultTol = 1e-12;
constexpr int kEcpDefaultMaxIter = 100000;

/// CV map of the self-consistent prescription: tr_CR[U (rho ⊗ x) U†].
/// Linear in x; accepts arbitrary Hermitian operands, not only densities.
inline ComplexMatrix d_map(const ComplexMatrix& u, const DensityOperator& rho,
                           const ComplexMatrix& x) {
    return detail::cv_map_apply(u, rho.matrix(), x);
}

inline ComplexMatrix d_map(const ComplexMatrix& u, const DensityOperator& rho,
                           const DensityOperator& x) {
    return d_map(u, rho, x.matrix());
}

/// CR output for a given CV state: tr_CV[U (rho ⊗ tau) U†]. The CV state
/// is expected to be self-consistent; a residual above 1e-6 is reported
/// on stderr but the output is still produced.
inline DensityOperator dctc_cr_output(const ComplexMatrix& u, const DensityOperator& rho,
                                      const DensityOperator& tau) {
    const double residual = (d_map(u, rho, tau) - tau.matrix()).frobenius_norm();
    if (residual > 1e-6)
        std::cerr << "[ctc] warning: CV state is not a fixed point (residual " << residual << ")\n";
    std::vector<int> dims = rho.dims();
    dims.push_back(u.dims().back());
    const ComplexMatrix joint = kron(rho.matrix(), tau.matrix()).with_dims(dims);
    const ComplexMatrix evolved = u.with_dims(dims) * joint * u.dagger().with_dims(dims);
    std::vector<int> keep(rho.dims().size());
    for (size_t i = 0; i < keep.size(); ++i) keep[i] = static_cast<int>(i);
    return DensityOperator(partial_trace(evolved, keep));
}

/// Affine family of solutions of tau = tr_CR[U (rho ⊗ tau) U†]: a
/// canonical density plus traceless Hermitian directions along which the
/// map stays fixed. `param_box` bounds, per direction, the coefficient
/// range keeping `particular + c * direction` PSD. For two or more
/// directions the box is an outer approximation of the (convex) PSD
/// cross-section, so membership still needs a PSD check.
struct FixedPointFamily {
    DensityOperator particular;
    std::vector<ComplexMatrix> null_directions;
    std::vector<std::pair<double, double>> param_box;
    bool box_is_outer_approximation = false;
    std::string selection_rule;  // how `particular` was singled out

    bool unique() const { return null_directions.empty(); }

    ComplexMatrix member_matrix(const std::vector<double>& coeffs) const {
        if (coeffs.size() != null_directions.size())
            throw dimension_error("family member: coefficient count mismatch");
        ComplexMatrix m = particular.matrix();
        for (size_t i = 0; i < coeffs.size(); ++i) m += coeffs[i] * null_directions[i];
        return m;
    }

    bool is_member(const std::vector<double>& coeffs, double tol = kDefaultTolerance) const {
        return min_eigenvalue(member_matrix(coeffs)) >= -tol;
    }
};

namespace detail {

/// Coefficients (in an orthonormal Hermitian basis) of the minimum-norm
/// trace-1 element of its span.
inline std::vector<double> trace_one_min_norm(const std::vector<ComplexMatrix>& basis) {
    std::vector<double> t(basis.size());
    double tt = 0;
    for (size_t i = 0; i < basis.size(); ++i) {
        t[i] = basis[i].trace().real();
        tt += t[i] * t[i];
    }
    if (tt < 1e-16)
        throw internal_error("fixed-point solve: no trace-1 element in the fixed space "
                             "(a density solution is guaranteed to exist)");
    for (double& c : t) c /= tt;
    return t;
}

/// Largest c >= 0 with base + c * dir PSD, by doubling then bisection.
inline double psd_boundary(const ComplexMatrix& base, const ComplexMatrix& dir) {
    const auto psd = [&](double c) { return min_eigenvalue(base + c * dir) >= -1e-12; };
    if (!psd(0.0)) return 0.0;
    double hi = 1.0;
    int guard = 0;
    while (psd(hi)) {
        hi *= 2;
        if (++guard > 90) throw internal_error("psd_boundary: direction never leaves the PSD cone");
    }
    double lo = (hi > 1.0) ? hi * 0.5 : 0.0;  // last strength known to stay PSD
    for (int it = 0; it < 120 && (hi - lo) > 1e-13 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (psd(mid) ? lo : hi) = mid;
    }
    return lo;
}

/// Minimize ||r0 + B c|| over c by normal equations with partial pivoting.
inline std::vector<double> project_origin(const std::vector<double>& r0,
                                          const std::vector<std::vector<double>>& cols) {
    const size_t m = cols.size();
    std::vector<std::vector<double>> g(m, std::vector<double>(m, 0.0));
    std::vector<double> rhs(m, 0.0);
    for (size_t i = 0; i < m; ++i) {
        for (size_t j = 0; j < m; ++j)
            for (size_t k = 0; k < r0.size(); ++k) g[i][j] += cols[i][k] * cols[j][k];
        for (size_t k = 0; k < r0.size(); ++k) rhs[i] -= cols[i][k] * r0[k];
    }
    std::vector<double> c(m, 0.0);
    for (size_t col = 0; col < m; ++col) {
        size_t piv = col;
        for (size_t r = col + 1; r < m; ++r)
            if (std::abs(g[r][col]) > std::abs(g[piv][col])) piv = r;
        std::swap(g[col], g[piv]);
        std::swap(rhs[col], rhs[piv]);
        if (std::abs(g[col][col]) < 1e-14) continue;  // degenerate direction, leave c = 0
        for (size_t r = col + 1; r < m; ++r) {
            const double f = g[r][col] / g[col][col];
            for (size_t k = col; k < m; ++k) g[r][k] -= f * g[col][k];
            rhs[r] -= f * rhs[col];
        }
    }
    for (size_t col = m; col-- > 0;) {
        if (std::abs(g[col][col]) < 1e-14) continue;
        double acc = rhs[col];
        for (size_t k = col + 1; k < m; ++k) acc -= g[col][k] * c[k];
        c[col] = acc / g[col][col];
    }
    return c;
}

inline std::vector<double> bloch_coords(const ComplexMatrix& hermitian) {
    std::vector<double> v(3);
    for (int k = 1; k <= 3; ++k)
        v[static_cast<size_t>(k - 1)] = (sigma(k) * hermitian).trace().real();
    return v;
}

}  // namespace detail

/// Solve tau = map(tau) for an arbitrary trace-preserving,
/// Hermiticity-preserving linear map on operators with the given factor
/// dims. For a qubit operand the canonical member maximizes entropy
/// (minimum Bloch norm over the affine solution set); otherwise the map
/// itself is iterated from the maximally mixed seed when the minimum-norm
/// element is not PSD.
inline FixedPointFamily solve_fixed_point_family(
    const std::function<ComplexMatrix(const ComplexMatrix&)>& map, const std::vector<int>& cv_dims,
    double singular_threshold = kSingularThreshold) {
    const int d = ComplexMatrix::product(cv_dims);
    const ComplexMatrix m = vectorize_linear_map(map, cv_dims);
    const FixedSpace space = hermitian_fixed_space(m, cv_dims, singular_threshold);

    const std::vector<double> c0 = detail::trace_one_min_norm(space.hermitian);
    ComplexMatrix trace_one = ComplexMatrix::zero(cv_dims);
    for (size_t i = 0; i < space.hermitian.size(); ++i) trace_one += c0[i] * space.hermitian[i];

    // Traceless directions: kernel coefficients orthogonal to the trace
    // functional, re-orthonormalized in Frobenius norm.
    std::vector<ComplexMatrix> dirs;
    {
        std::vector<double> t(space.hermitian.size());
        double tt = 0;
        for (size_t i = 0; i < space.hermitian.size(); ++i) {
            t[i] = space.hermitian[i].trace().real();
            tt += t[i] * t[i];
        }
        for (size_t i = 0; i < space.hermitian.size(); ++i) {
            ComplexMatrix cand = space.hermitian[i];
            for (size_t j = 0; j < space.hermitian.size(); ++j)
                cand -= (t[i] * t[j] / tt) * space.hermitian[j];
            for (const ComplexMatrix& dd : dirs) {
                Complex ip(0, 0);
                for (int r = 0; r < d; ++r)
                    for (int c = 0; c < d; ++c) ip += std::conj(dd(r, c)) * cand(r, c);
                cand -= ip.real() * dd;
            }
            if (cand.frobenius_norm() < 1e-7) continue;
            cand *= Complex(1.0 / cand.frobenius_norm(), 0);
            dirs.push_back(cand);
        }
    }

    FixedPointFamily fam;
    fam.null_directions = dirs;
    fam.box_is_outer_approximation = dirs.size() >= 2;

    ComplexMatrix particular = trace_one;
    if (d == 2) {
        // Entropy of a qubit strictly decreases in the Bloch norm, so the
        // max-entropy member is the projection of the origin onto the
        // affine solution set in Bloch coordinates.
        if (!dirs.empty()) {
            std::vector<std::vector<double>> cols;
            for (const ComplexMatrix& dd : dirs) cols.push_back(detail::bloch_coords(dd));
            const std::vector<double> c = detail::project_origin(detail::bloch_coords(trace_one), cols);
            for (size_t i = 0; i < dirs.size(); ++i) particular += c[i] * dirs[i];
        }
        fam.selection_rule = "max-entropy (Bloch projection)";
    } else {
        if (min_eigenvalue(particular) >= -kDefaultTolerance) {
            fam.selection_rule = "minimum-norm trace-1 element";
        } else {
            // Iterate the map from the maximally mixed seed; applied
            // heuristically since the entropy rule is only resolved in
            // closed form for qubits.
            ComplexMatrix tau = ComplexMatrix::identity(cv_dims) * (1.0 / d);
            for (int it = 0; it < kEcpDefaultMaxIter; ++it) {
                ComplexMatrix next = map(tau);
                const double r = (next - tau).frobenius_norm();
                tau = next;
                if (r <= kEcpDefaultTol) break;
            }
            particular = tau;
            fam.selection_rule = "ECP limit from maximally mixed seed (heuristic)";
        }
    }
    fam.particular = DensityOperator(particular, 1e-7);

    for (const ComplexMatrix& dd : dirs) {
        const double hi = detail::psd_boundary(fam.particular.matrix(), dd);
        const double lo = -detail::psd_boundary(fam.particular.matrix(), ComplexMatrix::zero(cv_dims) - dd);
        fam.param_box.emplace_back(lo, hi);
    }
    return fam;
}

/// Self-consistent CV solutions of tau = tr_CR[U (rho ⊗ tau) U†] via the
/// SVD nullspace of the vectorized map.
inline FixedPointFamily dctc_fixed_points(const ComplexMatrix& u, const DensityOperator& rho,
                                          double singular_threshold = kSingularThreshold) {
    const int cv = u.dims().back();
    return solve_fixed_point_family(
        [&](const ComplexMatrix& x) { return d_map(u, rho, x); }, {cv}, singular_threshold);
}

/// Entropy-maximizing member of a family. For qubit families this is the
/// Bloch-space projection of the origin onto the affine set, clipped to
/// the parameter box; families of larger dimension return the canonical
/// member selected at solve time.
inline DensityOperator max_entropy_member(const FixedPointFamily& fam) {
    if (fam.particular.side() != 2 || fam.null_directions.empty()) return fam.particular;
    std::vector<std::vector<double>> cols;
    for (const ComplexMatrix& dd : fam.null_directions) cols.push_back(detail::bloch_coords(dd));
    std::vector<double> c =
        detail::project_origin(detail::bloch_coords(fam.particular.matrix()), cols);
    for (size_t i = 0; i < c.size(); ++i) {
        c[i] = std::min(c[i], fam.param_box[i].second);
        c[i] = std::max(c[i], fam.param_box[i].first);
    }
    return DensityOperator(fam.member_matrix(c), 1e-7);
}

/// Iterated-interaction unrolling of the self-consistency condition:
/// repeated application of the CV map to a seed state, recording every
/// iterate and the Frobenius residuals between consecutive ones.
struct EcpTrace {
    std::vector<DensityOperator> iterates;  // tau(0), tau(1), ...
    std::vector<double> residuals;          // ||tau(n+1) - tau(n)||_F
    bool converged = false;
    DensityOperator seed_state;

    const DensityOperator& final_state() const { return iterates.back(); }
};

inline EcpTrace ecp_iterate(const ComplexMatrix& u, const DensityOperator& rho,
                            const DensityOperator& seed_state, double tol = kEcpDefaultTol,
                            int max_iter = kEcpDefaultMaxIter) {
    if (tol <= 0) throw validation_error("ecp_iterate: tol must be positive");
    EcpTrace trace;
    trace.seed_state = seed_state;
    trace.iterates.push_back(seed_state);
    ComplexMatrix tau = seed_state.matrix();
    for (int n = 0; n < max_iter; ++n) {
        const ComplexMatrix next = d_map(u, rho, tau);
        const double r = (next - tau).frobenius_norm();
        trace.iterates.emplace_back(next, 1e-7);
        trace.residuals.push_back(r);
        tau = next;
        if (r <= tol) {
            trace.converged = true;
            break;
        }
    }
    return trace;
}

/// tr_CV[U]: the (generally nonunitary) operator the postselected
/// teleportation loop applies to the CR input.
inline ComplexMatrix pctc_operator(const ComplexMatrix& u) {
    if (u.factor_count() < 2) throw dimension_error("pctc_operator: need CR and CV factors");
    std::vector<int> keep(u.dims().size() - 1);
    for (size_t i = 0; i < keep.size(); ++i) keep[i] = static_cast<int>(i);
    return partial_trace(u, keep);
}

/// Normalised nonunitary CR evolution A rho A† / tr[A rho A†] with
/// A = tr_CV[U]. Throws postselection_error when the outcome probability
/// vanishes, i.e. the prescription has no solution for this input.
inline DensityOperator pctc_cr_map(const ComplexMatrix& u, const DensityOperator& rho) {
    const ComplexMatrix a = pctc_operator(u);
    if (a.side() != rho.side()) throw dimension_error("pctc_cr_map: rho does not match the CR factors");
    ComplexMatrix out = a * rho.matrix() * a.dagger();
    const double norm = out.trace().real();
    if (norm < kPostselectionThreshold)
        throw postselection_error("pctc_cr_map: postselection impossible (survival " +
                                  std::to_string(norm) + ")");
    out *= Complex(1.0 / norm, 0);
    return DensityOperator(out.with_dims(rho.dims()));
}

/// CV state assigned to the postselected loop: the CV map applied to the
/// maximally mixed state, tr_CR[U (rho ⊗ 1/d) U†]. Exists for every
/// (U, rho) pairing; no postselection is involved.
inline DensityOperator pctc_cv_state(const ComplexMatrix& u, const DensityOperator& rho) {
    const int cv = u.dims().back();
    const ComplexMatrix mixed = ComplexMatrix::identity(cv) * (1.0 / cv);
    return DensityOperator(d_map(u, rho, mixed));
}

/// Residual of the first-iterate idempotency condition
/// sum_k tr[sigma_k tau_P] tr_CR[U (rho ⊗ sigma_k) U†] = 0.
/// Vanishing of this operator is equivalent to tau_P being a fixed point
/// of the CV map (the defect d(tau_P) - tau_P equals half the residual).
struct IdempotencyResidual {
    ComplexMatrix condition;  // the summed operator
    double norm = 0;          // its Frobenius norm
};

inline IdempotencyResidual idempotency_residual(const ComplexMatrix& u, const DensityOperator& rho) {
    if (u.dims().back() != 2) throw dimension_error("idempotency_residual: CV factor must be a qubit");
    const DensityOperator tau_p = pctc_cv_state(u, rho);
    const BlochVector r = bloch_from_state(tau_p);
    ComplexMatrix sum = ComplexMatrix::zero(2);
    for (int k = 1; k <= 3; ++k) sum += r[k - 1] * d_map(u, rho, sigma(k));
    IdempotencyResidual out{sum, sum.frobenius_norm()};
    return out;
}

}  // namespace ctc
