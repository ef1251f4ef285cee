#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ctc/complex_matrix.hpp"
#include "ctc/density.hpp"
#include "ctc/gates.hpp"
#include "ctc/prescriptions.hpp"
#include "ctc/random.hpp"

namespace ctc {

/// Strength of the probe coupling. At epsilon = 0 the probe is an
/// eigenstate of the coupling and carries no information; at epsilon = 1
/// the measurement is projective.
struct ProbeSpec {
    double epsilon = 1e-4;

    explicit ProbeSpec(double eps) : epsilon(eps) {
        if (!(eps >= 0.0 && eps <= 1.0))
            throw probe_error("probe strength must lie in [0, 1], got " + std::to_string(eps));
    }
};

/// sqrt((1+eps)/2)|0> + sqrt((1-eps)/2)|1>.
inline std::vector<Complex> probe_ket(const ProbeSpec& probe) {
    return {Complex(std::sqrt((1.0 + probe.epsilon) / 2.0), 0),
            Complex(std::sqrt((1.0 - probe.epsilon) / 2.0), 0)};
}

inline DensityOperator probe_state(const ProbeSpec& probe) {
    return DensityOperator(ket_density(probe_ket(probe), {2}));
}

/// V_k maps the x/y/z eigenbasis onto the computational basis:
/// V_1 = H, V_2 = H R†, V_3 = 1, so that V_k† |0>, V_k† |1> are the +1/-1
/// eigenstates of sigma_k.
inline ComplexMatrix basis_transform(int k) {
    switch (k) {
        case 1: return hadamard();
        case 2: return hadamard() * phase_gate().dagger();
        case 3: return ComplexMatrix::identity(2);
        default: throw dimension_error("basis_transform: axis index must be 1, 2 or 3");
    }
}

/// System-probe coupling |0_k><0_k| ⊗ 1 + |1_k><1_k| ⊗ sigma_x,
/// i.e. a controlled-NOT conjugated into the k basis on the control.
inline ComplexMatrix coupling_unitary(int k) {
    const ComplexMatrix vdag = basis_transform(k).dagger();
    ComplexMatrix t({2, 2});
    t = ComplexMatrix::zero({2, 2});
    for (int n = 0; n < 2; ++n) {
        ComplexMatrix basis_state({2});
        basis_state = ComplexMatrix::zero(2);
        basis_state(n, n) = 1;
        const ComplexMatrix projector = vdag * basis_state * vdag.dagger();
        t += kron(projector, n == 0 ? ComplexMatrix::identity(2) : sigma(1));
    }
    return t;
}

/// Eigenprojector |n_k><n_k| of sigma_k (n = 0 for +1, n = 1 for -1).
inline ComplexMatrix axis_projector(int k, int n) {
    const ComplexMatrix vdag = basis_transform(k).dagger();
    ComplexMatrix basis_state = ComplexMatrix::zero(2);
    basis_state(n, n) = 1;
    return vdag * basis_state * vdag.dagger();
}

enum class TomographyMode { exact_limit, finite_epsilon, sampled };

inline std::string to_string(TomographyMode m) {
    switch (m) {
        case TomographyMode::exact_limit: return "exact-limit";
        case TomographyMode::finite_epsilon: return "finite-epsilon";
        case TomographyMode::sampled: return "sampled";
    }
    return "?";
}

/// Finite-statistics layer: when present, probe expectations are
/// estimated from z-basis shots instead of computed exactly. Per-axis
/// streams are split off `seed`, so serial and parallel runs agree.
struct SamplingPlan {
    long long shots = 0;
    std::uint64_t seed = 0;
};

/// Outcome of a tomography run: the three expectation values, the state
/// they reconstruct, and how they were obtained. `trace_correction`
/// carries the trace of the unnormalised reconstruction operator used to
/// restore unit trace (1 when no correction is involved).
struct TomographyResult {
    BlochVector r;
    DensityOperator reconstructed;
    double epsilon = 0;
    TomographyMode mode = TomographyMode::finite_epsilon;
    std::optional<long long> shots;
    double trace_correction = 1.0;
    std::optional<ComplexMatrix> chosen_family_member;
    bool family_nonunique = false;
    // False only when the postselection norm vanishes and the circuit
    // route to r_k is undefined; the reconstruction itself still exists.
    bool circuit_extraction_defined = true;
};

/// Empirical estimate of tr[sigma_z omega] from z-basis shots.
inline double sample_probe(const DensityOperator& omega, long long shots, std::uint64_t seed) {
    if (omega.side() != 2) throw dimension_error("sample_probe: probe must be a qubit");
    if (shots < 1) throw validation_error("sample_probe: shots must be >= 1");
    const double p0 = std::clamp(omega.matrix()(0, 0).real(), 0.0, 1.0);
    Rng rng(seed);
    long long n0 = 0;
    for (long long s = 0; s < shots; ++s)
        if (rng.next_double() < p0) ++n0;
    return static_cast<double>(2 * n0 - shots) / static_cast<double>(shots);
}

namespace detail {

inline double probe_z_expectation(const ComplexMatrix& omega, const std::optional<SamplingPlan>& plan,
                                  int axis) {
    if (plan) {
        return sample_probe(DensityOperator(omega, 1e-7), plan->shots,
                            split_seed(plan->seed, static_cast<std::uint64_t>(axis)));
    }
    return (sigma(3) * omega).trace().real();
}

/// tr[(1 ⊗ sigma_z) W (x ⊗ chi(eps)) W†] with the probe as the last
/// factor, evaluated in extended precision. The value is first order in
/// eps while every intermediate is O(1), so double rounding (~1e-16)
/// would survive the later division by eps; the long-double route keeps
/// the rescaled expectation accurate to ~1e-15 even at eps = 1e-4.
inline double probe_z_expectation_xprec(const ComplexMatrix& w, const ComplexMatrix& x, double eps) {
    using XComplex = std::complex<long double>;
    const int m = x.side();
    const int n = 2 * m;
    if (w.side() != n) throw dimension_error("probe expectation: operator sizes do not match");

    const long double e = eps;
    const long double chi00 = (1.0L + e) / 2.0L;
    const long double chi11 = (1.0L - e) / 2.0L;
    const long double chi01 = std::sqrt(1.0L + e) * std::sqrt(1.0L - e) / 2.0L;
    const long double chi[2][2] = {{chi00, chi01}, {chi01, chi11}};

    std::vector<XComplex> input(static_cast<size_t>(n) * n);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            const Complex xab = x(a, b);
            const XComplex xl(xab.real(), xab.imag());
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    input[static_cast<size_t>(a * 2 + i) * n + (b * 2 + j)] = xl * chi[i][j];
        }

    std::vector<XComplex> wl(static_cast<size_t>(n) * n), wx(static_cast<size_t>(n) * n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            const Complex v = w(r, c);
            wl[static_cast<size_t>(r) * n + c] = XComplex(v.real(), v.imag());
        }
    for (int r = 0; r < n; ++r)
        for (int k = 0; k < n; ++k) {
            const XComplex wrk = wl[static_cast<size_t>(r) * n + k];
            if (wrk == XComplex(0, 0)) continue;
            for (int c = 0; c < n; ++c)
                wx[static_cast<size_t>(r) * n + c] += wrk * input[static_cast<size_t>(k) * n + c];
        }

    // only the diagonal of W (x ⊗ chi) W† enters the z expectation
    long double val = 0;
    for (int r = 0; r < n; ++r) {
        XComplex diag(0, 0);
        for (int k = 0; k < n; ++k)
            diag += wx[static_cast<size_t>(r) * n + k] * std::conj(wl[static_cast<size_t>(r) * n + k]);
        val += (r % 2 == 0 ? 1.0L : -1.0L) * diag.real();
    }
    return static_cast<double>(val);
}

}  // namespace detail

/// Probe-based readout of a directly accessible qubit state: couple the
/// probe along each axis, measure it in the z basis, rescale by the
/// strength. For this circuit r_k = tr[sigma_k tau] holds exactly at
/// every strength (the cross terms carry no sigma_z component), while the
/// system state picks up O(eps^2) back-action on its off-diagonals.
/// Returns the result and the evolved system state with the largest
/// back-action over the three axes.
inline std::pair<TomographyResult, DensityOperator> weak_measure_standalone(
    const DensityOperator& tau, const ProbeSpec& probe,
    const std::optional<SamplingPlan>& sampling = std::nullopt) {
    if (tau.side() != 2) throw dimension_error("weak_measure_standalone: tau must be a qubit");
    if (probe.epsilon <= 0.0)
        throw probe_error("weak_measure_standalone: probe strength 0 carries no information");

    const ComplexMatrix chi = ket_density(probe_ket(probe), {2});
    TomographyResult result;
    result.epsilon = probe.epsilon;
    result.mode = sampling ? TomographyMode::sampled : TomographyMode::finite_epsilon;
    if (sampling) result.shots = sampling->shots;

    DensityOperator worst_evolved = tau;
    double worst = -1;
    for (int k = 1; k <= 3; ++k) {
        const ComplexMatrix joint = kron(tau.matrix(), chi);
        const ComplexMatrix t = coupling_unitary(k);
        const ComplexMatrix evolved = t * joint * t.dagger();
        const ComplexMatrix system = partial_trace(evolved, {0});
        if (sampling) {
            const ComplexMatrix omega = partial_trace(evolved, {1});
            result.r[k - 1] = detail::probe_z_expectation(omega, sampling, k) / probe.epsilon;
        } else {
            result.r[k - 1] =
                detail::probe_z_expectation_xprec(t, tau.matrix(), probe.epsilon) / probe.epsilon;
        }
        const double dev = (system - tau.matrix()).frobenius_norm();
        if (dev > worst) {
            worst = dev;
            worst_evolved = DensityOperator(system);
        }
    }
    result.reconstructed = DensityOperator(bloch_matrix(result.r), kDefaultTolerance,
                                           /*require_psd=*/!sampling);
    return {result, worst_evolved};
}

namespace detail {

struct ProbedCircuit {
    std::vector<int> full_dims;  // CR factors, CV qubit, probe qubit
    int cv_index = 0;
    int probe_index = 0;
    ComplexMatrix w;  // total unitary: coupling first, then the interaction
};

inline ProbedCircuit build_probed_circuit(const ComplexMatrix& u, const DensityOperator& rho,
                                          int k) {
    if (u.dims().back() != 2) throw dimension_error("tomography: CV factor must be a qubit");
    if (rho.side() * 2 != u.side()) throw dimension_error("tomography: rho does not match CR factors");
    ProbedCircuit c;
    c.full_dims = rho.dims();
    c.full_dims.push_back(2);
    c.full_dims.push_back(2);
    c.cv_index = static_cast<int>(c.full_dims.size()) - 2;
    c.probe_index = c.cv_index + 1;
    std::vector<int> interaction_factors(c.full_dims.size() - 1);
    for (size_t i = 0; i < interaction_factors.size(); ++i) interaction_factors[i] = static_cast<int>(i);
    const ComplexMatrix u_emb = embed(u, c.full_dims, interaction_factors);
    const ComplexMatrix t_emb = embed(coupling_unitary(k), c.full_dims, {c.cv_index, c.probe_index});
    c.w = u_emb * t_emb;
    return c;
}

}  // namespace detail

/// Self-consistent CV solutions with the probe present: solves
/// tau = tr_{CR,probe}[W (rho ⊗ tau ⊗ chi) W†] by the same vectorized
/// nullspace technique as the probe-free case.
inline FixedPointFamily dctc_probed_family(const ComplexMatrix& u, const DensityOperator& rho,
                                           const ProbeSpec& probe, int k) {
    const detail::ProbedCircuit c = detail::build_probed_circuit(u, rho, k);
    const ComplexMatrix chi = ket_density(probe_ket(probe), {2});
    auto map = [&](const ComplexMatrix& x) {
        const ComplexMatrix joint = kron(kron(rho.matrix(), x), chi).with_dims(c.full_dims);
        const ComplexMatrix evolved = c.w * joint * c.w.dagger();
        return partial_trace(evolved, {c.cv_index});
    };
    return solve_fixed_point_family(map, {2});
}

inline DensityOperator dctc_probed_fixed_point(const ComplexMatrix& u, const DensityOperator& rho,
                                               const ProbeSpec& probe, int k) {
    return max_entropy_member(dctc_probed_family(u, rho, probe, k));
}

/// Reconstruct the self-consistent CV state by probing it inside the
/// circuit: for each axis the probed fixed point is inserted, the probe
/// is traced out and measured. The extracted r_k equal the probed fixed
/// point's expectations exactly; they deviate from the probe-free CV
/// state at O(eps^2). Nonunique families are resolved by the max-entropy
/// rule and the inserted member is recorded.
inline TomographyResult dctc_tomography(const ComplexMatrix& u, const DensityOperator& rho,
                                        const ProbeSpec& probe,
                                        const std::optional<SamplingPlan>& sampling = std::nullopt) {
    if (probe.epsilon <= 0.0) throw probe_error("dctc_tomography: probe strength must be positive");

    TomographyResult result;
    result.epsilon = probe.epsilon;
    result.mode = sampling ? TomographyMode::sampled : TomographyMode::finite_epsilon;
    if (sampling) result.shots = sampling->shots;

    const ComplexMatrix chi = ket_density(probe_ket(probe), {2});
    for (int k = 1; k <= 3; ++k) {
        const detail::ProbedCircuit c = detail::build_probed_circuit(u, rho, k);
        const FixedPointFamily fam = dctc_probed_family(u, rho, probe, k);
        const DensityOperator member = max_entropy_member(fam);
        if (!fam.unique()) {
            result.family_nonunique = true;
            result.chosen_family_member = member.matrix();
        }
        if (sampling) {
            const ComplexMatrix joint =
                kron(kron(rho.matrix(), member.matrix()), chi).with_dims(c.full_dims);
            const ComplexMatrix evolved = c.w * joint * c.w.dagger();
            const ComplexMatrix omega = partial_trace(evolved, {c.probe_index});
            result.r[k - 1] = detail::probe_z_expectation(omega, sampling, k) / probe.epsilon;
        } else {
            result.r[k - 1] = detail::probe_z_expectation_xprec(
                                  c.w, kron(rho.matrix(), member.matrix()), probe.epsilon) /
                              probe.epsilon;
        }
    }
    result.reconstructed = DensityOperator(bloch_matrix(result.r), kDefaultTolerance,
                                           /*require_psd=*/!sampling);
    return result;
}

/// kappa = tr_{CR,2}[U^{CR,2} rho^{CR} U†^{CR,3}] on a three-part space
/// (CR, CV copy 2, CV copy 3), together with its Hermitian part
/// tau_tilde = (kappa + kappa†)/2. The sigma_k expectations of tau_tilde
/// are exactly the unnormalised probe expectations of the postselected
/// circuit.
struct KappaState {
    ComplexMatrix kappa;
    ComplexMatrix tau_tilde;
};

inline KappaState kappa_state(const ComplexMatrix& u, const DensityOperator& rho) {
    if (u.dims().back() != 2) throw dimension_error("kappa_state: CV factor must be a qubit");
    if (rho.side() * 2 != u.side()) throw dimension_error("kappa_state: rho does not match CR factors");

    std::vector<int> full = rho.dims();
    full.push_back(2);
    full.push_back(2);
    const int nf = static_cast<int>(full.size());
    const int copy2 = nf - 2, copy3 = nf - 1;

    std::vector<int> cr(rho.dims().size());
    for (size_t i = 0; i < cr.size(); ++i) cr[i] = static_cast<int>(i);

    std::vector<int> cr_and_2 = cr, cr_and_3 = cr;
    cr_and_2.push_back(copy2);
    cr_and_3.push_back(copy3);

    const ComplexMatrix u12 = embed(u, full, cr_and_2);
    const ComplexMatrix u13 = embed(u, full, cr_and_3);
    const ComplexMatrix rho1 = embed(rho.matrix(), full, cr);

    const ComplexMatrix x = u12 * rho1 * u13.dagger();
    KappaState out{partial_trace(x, {copy3}), ComplexMatrix::zero(2)};
    out.tau_tilde = (out.kappa + out.kappa.dagger()) * 0.5;
    return out;
}

/// Closed-form (zero-strength limit) reconstruction of the postselected
/// loop's CV state. The raw probe expectations are the alternating sums
/// sum_n (-1)^n tr[B_n rho B_n†] with B_n = tr_CV[U (1 ⊗ |n_k><n_k|)];
/// they are divided by the postselection norm N = tr[A rho A†],
/// A = tr_CV[U], which is what a z-basis probe measurement on the
/// renormalised postselected state converges to. The reported state is
/// the unit-trace completion (1 - tr[tau_tilde])/2 + tau_tilde, which
/// equals tr_CR[U (rho ⊗ 1/2) U†]. When N vanishes the circuit route is
/// undefined and the result is flagged, but the reconstruction (which
/// always exists) is still returned.
inline TomographyResult pctc_tomography_exact(const ComplexMatrix& u, const DensityOperator& rho) {
    if (u.dims().back() != 2) throw dimension_error("pctc_tomography_exact: CV factor must be a qubit");

    std::vector<int> cr_keep(u.dims().size() - 1);
    for (size_t i = 0; i < cr_keep.size(); ++i) cr_keep[i] = static_cast<int>(i);
    const int cv_index = static_cast<int>(u.dims().size()) - 1;

    BlochVector raw;
    for (int k = 1; k <= 3; ++k) {
        double acc = 0;
        for (int n = 0; n < 2; ++n) {
            const ComplexMatrix proj = embed(axis_projector(k, n), u.dims(), {cv_index});
            const ComplexMatrix bn = partial_trace(u * proj, cr_keep);
            const Complex term = (bn * rho.matrix() * bn.dagger()).trace();
            acc += (n == 0 ? 1.0 : -1.0) * term.real();
        }
        raw[k - 1] = acc;
    }

    const ComplexMatrix a = pctc_operator(u);
    const double survival = (a * rho.matrix() * a.dagger()).trace().real();

    const KappaState ks = kappa_state(u, rho);
    const double tc = ks.tau_tilde.trace().real();
    ComplexMatrix recon = ks.tau_tilde + (0.5 * (1.0 - tc)) * ComplexMatrix::identity(2);

    TomographyResult result;
    result.mode = TomographyMode::exact_limit;
    result.epsilon = 0.0;
    result.trace_correction = tc;
    result.reconstructed = DensityOperator(recon, 1e-7);
    if (survival >= kPostselectionThreshold) {
        for (int k = 0; k < 3; ++k) result.r[k] = raw[k] / survival;
    } else {
        result.circuit_extraction_defined = false;
        result.r = bloch_from_state(result.reconstructed);
    }
    return result;
}

/// Full simulation of the postselected tomography circuit at finite
/// strength: evolve rho ⊗ Bell ⊗ probe, postselect the loop pair on the
/// Bell state, renormalise, and read the probe. The per-axis survival
/// probabilities differ from N/4 at O(eps^2); their mean times 4 is used
/// as the trace correction when reconstructing.
inline TomographyResult pctc_tomography_sim(const ComplexMatrix& u, const DensityOperator& rho,
                                            const ProbeSpec& probe,
                                            const std::optional<SamplingPlan>& sampling = std::nullopt) {
    if (u.dims().back() != 2) throw dimension_error("pctc_tomography_sim: CV factor must be a qubit");
    if (probe.epsilon <= 0.0) throw probe_error("pctc_tomography_sim: probe strength must be positive");
    if (rho.side() * 2 != u.side()) throw dimension_error("pctc_tomography_sim: rho does not match CR factors");

    std::vector<int> full = rho.dims();
    full.push_back(2);  // CV mode entering the interaction
    full.push_back(2);  // partner mode of the entangled pair
    full.push_back(2);  // probe
    const int nf = static_cast<int>(full.size());
    const int cva = nf - 3, cvb = nf - 2, probe_idx = nf - 1;

    std::vector<int> interaction_factors;
    for (int i = 0; i < cva; ++i) interaction_factors.push_back(i);
    interaction_factors.push_back(cva);

    const ComplexMatrix bell = ket_density(bell_ket(), {2, 2});
    const ComplexMatrix chi = ket_density(probe_ket(probe), {2});
    const ComplexMatrix input = kron(kron(rho.matrix(), bell), chi).with_dims(full);

    TomographyResult result;
    result.epsilon = probe.epsilon;
    result.mode = sampling ? TomographyMode::sampled : TomographyMode::finite_epsilon;
    if (sampling) result.shots = sampling->shots;

    double survival_sum = 0;
    for (int k = 1; k <= 3; ++k) {
        const ComplexMatrix u_emb = embed(u, full, interaction_factors);
        const ComplexMatrix t_emb = embed(coupling_unitary(k), full, {cva, probe_idx});
        const ComplexMatrix w = u_emb * t_emb;
        const ComplexMatrix evolved = w * input * w.dagger();
        const ComplexMatrix post = project_out(evolved, {cva, cvb}, bell_ket());
        const double survival = post.trace().real();
        if (survival < kPostselectionThreshold)
            throw postselection_error("pctc_tomography_sim: postselection impossible on axis " +
                                      std::to_string(k));
        survival_sum += survival;
        const ComplexMatrix post_norm = post * (1.0 / survival);
        const int probe_in_post = static_cast<int>(post_norm.dims().size()) - 1;
        const ComplexMatrix omega = partial_trace(post_norm, {probe_in_post});
        result.r[k - 1] = detail::probe_z_expectation(omega, sampling, k) / probe.epsilon;
    }

    result.trace_correction = 4.0 * survival_sum / 3.0;
    BlochVector corrected;
    for (int k = 0; k < 3; ++k) corrected[k] = result.r[k] * result.trace_correction;
    result.reconstructed = DensityOperator(bloch_matrix(corrected), kDefaultTolerance,
                                           /*require_psd=*/false);
    return result;
}

}  // namespace ctc
