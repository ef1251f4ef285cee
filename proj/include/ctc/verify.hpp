#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "ctc/complex_matrix.hpp"
#include "ctc/density.hpp"
#include "ctc/pauli.hpp"
#include "ctc/prescriptions.hpp"
#include "ctc/random.hpp"
#include "ctc/tomography.hpp"

// Numeric verification of the two appendix derivations: the
// expectation-value simplification chain (with its key projector
// identity) and the equivalence of the tomographic and naive CV-state
// expectations through the Pauli expansion of the interaction.

namespace ctc {

struct VerificationReport {
    std::string check;
    double max_residual = 0;
    int cases_run = 0;
    bool pass = false;
    std::uint64_t seed = 0;
    double tolerance = 0;

    void finish(double tol) {
        tolerance = tol;
        pass = max_residual <= tol;
    }
};

/// Exhaustive check of the sigma-algebra identities the appendix algebra
/// rests on: tr[sigma_t sigma_k] = 2 delta_{tk} and
/// tr[sigma_n sigma_m sigma_k] = 2i epsilon_{nmk}. Throws on failure.
inline void pauli_algebra_selfcheck() {
    for (int t = 0; t < 4; ++t)
        for (int k = 0; k < 4; ++k) {
            const Complex tr2 = (sigma(t) * sigma(k)).trace();
            const Complex want(t == k ? 2.0 : 0.0, 0.0);
            if (std::abs(tr2 - want) > 1e-14)
                throw internal_error("pauli_algebra_selfcheck: pair trace failed");
        }
    for (int n = 1; n <= 3; ++n)
        for (int m = 1; m <= 3; ++m)
            for (int k = 1; k <= 3; ++k) {
                const Complex tr3 = (sigma(n) * sigma(m) * sigma(k)).trace();
                const Complex expect(0, 2.0 * levi_civita(n, m, k));
                if (std::abs(tr3 - expect) > 1e-14)
                    throw internal_error("pauli_algebra_selfcheck: triple trace failed");
            }
}

/// sum_n (-1)^n |n_k><n_k| ⊗ |n_k><n_k| = (1 ⊗ sigma_k + sigma_k ⊗ 1)/2.
inline VerificationReport key_identity_check(int k) {
    ComplexMatrix lhs({2, 2});
    for (int n = 0; n < 2; ++n) {
        const ComplexMatrix proj = axis_projector(k, n);
        lhs += (n == 0 ? 1.0 : -1.0) * kron(proj, proj);
    }
    const ComplexMatrix rhs =
        (kron(ComplexMatrix::identity(2), sigma(k)) + kron(sigma(k), ComplexMatrix::identity(2))) * 0.5;

    VerificationReport rep;
    rep.check = "key-identity";
    rep.cases_run = 1;
    rep.max_residual = (lhs - rhs).frobenius_norm();
    rep.finish(1e-14);
    return rep;
}

inline VerificationReport key_identity_suite() {
    VerificationReport rep;
    rep.check = "key-identity";
    rep.cases_run = 3;
    for (int k = 1; k <= 3; ++k)
        rep.max_residual = std::max(rep.max_residual, key_identity_check(k).max_residual);
    rep.finish(1e-14);
    return rep;
}

/// Evaluate every stage of the expectation-value simplification for one
/// (U, rho, k) and report the largest pairwise discrepancy. Stages:
///   (a) alternating sum of tr{ tr_2[U(1⊗P_n)] rho tr_2[(1⊗P_n)U†] },
///   (b) the three-factor amalgamation sum tr[U^{1,2}(rho⊗P_n⊗P_n)U†^{1,3}],
///   (c) the cyclic-shift form tr[(1⊗P_n⊗P_n) U^{1,2} rho^1 U†^{1,3}],
///   (d) the key-identity form (1/2) tr[(1⊗1⊗sigma_k + 1⊗sigma_k⊗1) …],
///   (e) the final form tr[sigma_k tau_tilde].
inline VerificationReport simplification_chain_check(const ComplexMatrix& u,
                                                     const DensityOperator& rho, int k) {
    if (u.dims().back() != 2) throw dimension_error("simplification_chain_check: CV factor must be a qubit");

    std::vector<int> cr_keep(u.dims().size() - 1);
    for (size_t i = 0; i < cr_keep.size(); ++i) cr_keep[i] = static_cast<int>(i);
    const int cv = static_cast<int>(u.dims().size()) - 1;

    std::vector<int> full = rho.dims();
    full.push_back(2);
    full.push_back(2);
    const int nf = static_cast<int>(full.size());
    std::vector<int> cr_and_2 = cr_keep, cr_and_3 = cr_keep;
    cr_and_2.push_back(nf - 2);
    cr_and_3.push_back(nf - 1);
    const ComplexMatrix u12 = embed(u, full, cr_and_2);
    const ComplexMatrix u13 = embed(u, full, cr_and_3);
    const ComplexMatrix rho1 = embed(rho.matrix(), full, cr_keep);
    const ComplexMatrix core = u12 * rho1 * u13.dagger();

    double stage_a = 0, stage_b = 0, stage_c = 0;
    for (int n = 0; n < 2; ++n) {
        const double sign = n == 0 ? 1.0 : -1.0;
        const ComplexMatrix proj = axis_projector(k, n);

        const ComplexMatrix bn = partial_trace(u * embed(proj, u.dims(), {cv}), cr_keep);
        stage_a += sign * (bn * rho.matrix() * bn.dagger()).trace().real();

        const ComplexMatrix joint = kron(kron(rho.matrix(), proj), proj).with_dims(full);
        stage_b += sign * (u12 * joint * u13.dagger()).trace().real();

        const ComplexMatrix pp = embed(kron(proj, proj).with_dims({2, 2}), full, {nf - 2, nf - 1});
        stage_c += sign * (pp * core).trace().real();
    }

    const ComplexMatrix sig2 = embed(sigma(k), full, {nf - 2});
    const ComplexMatrix sig3 = embed(sigma(k), full, {nf - 1});
    const double stage_d = 0.5 * ((sig2 + sig3) * core).trace().real();

    const double stage_e = (sigma(k) * kappa_state(u, rho).tau_tilde).trace().real();

    const double stages[] = {stage_a, stage_b, stage_c, stage_d, stage_e};
    VerificationReport rep;
    rep.check = "simplification-chain";
    rep.cases_run = 1;
    for (double x : stages)
        for (double y : stages) rep.max_residual = std::max(rep.max_residual, std::abs(x - y));
    rep.finish(1e-11);
    return rep;
}

inline VerificationReport simplification_chain_suite(int cases, std::uint64_t seed) {
    VerificationReport rep;
    rep.check = "simplification-chain";
    rep.seed = seed;
    rep.cases_run = cases;
    for (int i = 0; i < cases; ++i) {
        const ComplexMatrix u = random_unitary({2, 2}, split_seed(seed, 2 * static_cast<std::uint64_t>(i)));
        const DensityOperator rho = random_density({2}, split_seed(seed, 2 * static_cast<std::uint64_t>(i) + 1));
        const int k = 1 + static_cast<int>(i % 3);
        rep.max_residual =
            std::max(rep.max_residual, simplification_chain_check(u, rho, k).max_residual);
    }
    rep.finish(1e-11);
    return rep;
}

/// Residuals of the two unitarity constraints of the Pauli expansion,
/// sum_mu A_mu† A_mu = 1 and, for each k,
/// A_k†A_0 + A_0†A_k + i sum_{mu,nu} eps_{mu nu k} A_mu†A_nu = 0,
/// together with its rearranged form
/// i sum eps_{mu nu k} A_nu†A_mu - (A_k†A_0 + A_0†A_k) = 0 and the
/// coefficient normalization sum |U_{mu nu}|^2 - 1. Nonunitary input
/// yields a failed report rather than an exception.
inline VerificationReport unitarity_constraint_check(const ComplexMatrix& u) {
    if (u.side() != 4) throw dimension_error("unitarity_constraint_check: expected a 4x4 operator");
    const PauliDecomposition d = pauli_expand(u);

    VerificationReport rep;
    rep.check = "unitarity-constraints";
    rep.cases_run = 1;

    ComplexMatrix sum_aa = ComplexMatrix::zero(2);
    for (int mu = 0; mu < 4; ++mu) sum_aa += d.aop[mu].dagger() * d.aop[mu];
    rep.max_residual = (sum_aa - ComplexMatrix::identity(2)).frobenius_norm();

    for (int k = 1; k <= 3; ++k) {
        ComplexMatrix lc = ComplexMatrix::zero(2);
        ComplexMatrix lc_swapped = ComplexMatrix::zero(2);
        for (int mu = 1; mu <= 3; ++mu)
            for (int nu = 1; nu <= 3; ++nu) {
                const int eps = levi_civita(mu, nu, k);
                if (eps == 0) continue;
                lc += Complex(0, eps) * (d.aop[mu].dagger() * d.aop[nu]);
                lc_swapped += Complex(0, eps) * (d.aop[nu].dagger() * d.aop[mu]);
            }
        const ComplexMatrix cross = d.aop[k].dagger() * d.aop[0] + d.aop[0].dagger() * d.aop[k];
        rep.max_residual = std::max(rep.max_residual, (cross + lc).frobenius_norm());
        rep.max_residual = std::max(rep.max_residual, (lc_swapped - cross).frobenius_norm());
    }

    rep.max_residual = std::max(rep.max_residual, std::abs(d.coefficient_norm_squared() - 1.0));
    rep.finish(1e-10);
    return rep;
}

inline VerificationReport unitarity_constraint_suite(int cases, std::uint64_t seed) {
    VerificationReport rep;
    rep.check = "unitarity-constraints";
    rep.seed = seed;
    rep.cases_run = cases + 2;
    rep.max_residual = unitarity_constraint_check(ComplexMatrix::identity({2, 2})).max_residual;
    rep.max_residual =
        std::max(rep.max_residual, unitarity_constraint_check(swap_gate()).max_residual);
    for (int i = 0; i < cases; ++i) {
        const ComplexMatrix u = random_unitary({2, 2}, split_seed(seed, static_cast<std::uint64_t>(i)));
        rep.max_residual = std::max(rep.max_residual, unitarity_constraint_check(u).max_residual);
    }
    rep.finish(1e-10);
    return rep;
}

/// Three-way agreement, for each axis, of (a) tr[sigma_k tau_tilde] from
/// the postselected-circuit contraction, (b) tr[sigma_k tau_P] of the
/// naive CV state, and (c) the common closed form
/// 2 tr[(A_k†A_0 + A_0†A_k) rho] from the Pauli expansion.
inline VerificationReport expectation_equivalence_check(const ComplexMatrix& u,
                                                        const DensityOperator& rho) {
    if (u.side() != 4) throw dimension_error("expectation_equivalence_check: expected a 4x4 operator");
    const KappaState ks = kappa_state(u, rho);
    const DensityOperator tau_p = pctc_cv_state(u, rho);
    const PauliDecomposition d = pauli_expand(u);

    VerificationReport rep;
    rep.check = "expectation-equivalence";
    rep.cases_run = 1;
    for (int k = 1; k <= 3; ++k) {
        const double a = (sigma(k) * ks.tau_tilde).trace().real();
        const double b = (sigma(k) * tau_p.matrix()).trace().real();
        const double c =
            2.0 * ((d.aop[k].dagger() * d.aop[0] + d.aop[0].dagger() * d.aop[k]) * rho.matrix())
                      .trace()
                      .real();
        rep.max_residual = std::max({rep.max_residual, std::abs(a - b), std::abs(a - c), std::abs(b - c)});
    }
    rep.finish(1e-10);
    return rep;
}

inline VerificationReport expectation_equivalence_suite(int cases, std::uint64_t seed) {
    VerificationReport rep;
    rep.check = "expectation-equivalence";
    rep.seed = seed;
    rep.cases_run = cases;
    for (int i = 0; i < cases; ++i) {
        const ComplexMatrix u = random_unitary({2, 2}, split_seed(seed, 3 * static_cast<std::uint64_t>(i)));
        const DensityOperator rho = random_density({2}, split_seed(seed, 3 * static_cast<std::uint64_t>(i) + 1));
        rep.max_residual =
            std::max(rep.max_residual, expectation_equivalence_check(u, rho).max_residual);
    }
    rep.finish(1e-10);
    return rep;
}

struct VerifySuiteConfig {
    int simplification_cases = 200;
    int unitarity_cases = 500;
    int equivalence_cases = 1000;
    std::uint64_t seed = 1;
};

inline std::vector<VerificationReport> run_appendix_suite(const VerifySuiteConfig& cfg) {
    pauli_algebra_selfcheck();
    std::vector<VerificationReport> reports;
    VerificationReport key = key_identity_suite();
    key.seed = cfg.seed;
    reports.push_back(key);
    reports.push_back(simplification_chain_suite(cfg.simplification_cases, split_seed(cfg.seed, 101)));
    reports.push_back(unitarity_constraint_suite(cfg.unitarity_cases, split_seed(cfg.seed, 202)));
    reports.push_back(expectation_equivalence_suite(cfg.equivalence_cases, split_seed(cfg.seed, 303)));
    return reports;
}

}  // namespace ctc
