#include "support.hpp"

#include "ctc/prescriptions.hpp"
#include "ctc/scenarios.hpp"

using namespace ctc;
using test_support::dist;
using test_support::ket_state;
using test_support::require_close;

namespace {
double unitarity_defect(const ComplexMatrix& u) {
    return (u.dagger() * u - ComplexMatrix::identity(u.dims())).frobenius_norm();
}
}  // namespace

TEST_CASE("grandfather scenario") {
    const Scenario g = grandfather();
    CHECK(g.unitary.side() == 4);
    CHECK(unitarity_defect(g.unitary) <= 1e-12);

    SECTION("closed forms match the solvers for generic inputs") {
        for (std::uint64_t s = 0; s < 25; ++s) {
            const DensityOperator rho = random_density({2}, 400 + s);
            const FixedPointFamily fam = dctc_fixed_points(g.unitary, rho);
            REQUIRE(fam.unique());
            require_close(fam.particular.matrix(), g.oracle->cv_state_d(rho, 0), 1e-10, "tau_d");
            require_close(dctc_cr_output(g.unitary, rho, fam.particular).matrix(),
                          g.oracle->cr_output_d(rho, 0), 1e-10, "rho_d");
            require_close(pctc_cv_state(g.unitary, rho).matrix(), g.oracle->cv_state_p(rho), 1e-10,
                          "tau_p");
            require_close(pctc_cr_map(g.unitary, rho).matrix(), *g.oracle->cr_output_p(rho), 1e-10,
                          "rho_p");
        }
    }

    SECTION("the loop state is self-consistent for every input") {
        for (std::uint64_t s = 0; s < 100; ++s) {
            const DensityOperator rho = random_density({2}, 800 + s);
            CHECK(idempotency_residual(g.unitary, rho).norm <= 1e-10);
        }
    }

    SECTION("the closed form flags the zero-overlap input") {
        CHECK_FALSE(g.oracle->cr_output_p(ket_state({2}, 1)).has_value());
    }
}

TEST_CASE("unproven theorem scenario") {
    const Scenario ut = unproven_theorem();
    CHECK(ut.unitary.side() == 8);
    CHECK(unitarity_defect(ut.unitary) <= 1e-12);
    REQUIRE(ut.preset_rho.has_value());

    const FixedPointFamily fam = dctc_fixed_points(ut.unitary, *ut.preset_rho);
    REQUIRE(fam.null_directions.size() == 1);

    SECTION("family endpoints and parametrized closed forms") {
        // map each box endpoint to its family parameter and compare
        for (double g : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            const ComplexMatrix want_cv = ut.oracle->cv_state_d(*ut.preset_rho, g);
            // c solves particular + c*dir = want; with dir ∝ sigma_z the
            // coefficient follows from the (0,0) entry
            const double c = (want_cv(0, 0).real() - fam.particular.matrix()(0, 0).real()) /
                             fam.null_directions[0](0, 0).real();
            CHECK(c >= fam.param_box[0].first - 1e-9);
            CHECK(c <= fam.param_box[0].second + 1e-9);
            const ComplexMatrix member = fam.member_matrix({c});
            require_close(member, want_cv, 1e-10, "family member at g");
            require_close(dctc_cr_output(ut.unitary, *ut.preset_rho, DensityOperator(member, 1e-7)).matrix(),
                          ut.oracle->cr_output_d(*ut.preset_rho, g), 1e-10, "cr output at g");
        }
    }

    SECTION("postselected states") {
        require_close(pctc_cr_map(ut.unitary, *ut.preset_rho).matrix(),
                      *ut.oracle->cr_output_p(*ut.preset_rho), 1e-10, "entangled pair output");
        require_close(pctc_cv_state(ut.unitary, *ut.preset_rho).matrix(),
                      ComplexMatrix::identity(2) * 0.5, 1e-10, "mixed loop state");
    }

    SECTION("the canonical member is the maximally mixed state") {
        require_close(max_entropy_member(fam).matrix(), ComplexMatrix::identity(2) * 0.5, 1e-10);
    }
}

TEST_CASE("power-of-swap scenario") {
    require_close(power_swap(0.0).unitary, ComplexMatrix::identity({2, 2}), 1e-15, "p = 0");
    require_close(power_swap(1.0).unitary, swap_gate().with_dims({2, 2}), 1e-12, "p = 1");

    SECTION("half power acts with the expected amplitudes on |01>") {
        const ComplexMatrix u = power_swap(0.5).unitary;
        CHECK(unitarity_defect(u) <= 1e-12);
        const Complex a01 = u(1, 1);  // amplitude staying on |01>
        const Complex a10 = u(2, 1);  // amplitude moved to |10>
        const Complex want01 = (Complex(1, 0) + std::exp(Complex(0, -M_PI / 2))) * 0.5;
        const Complex want10 = (Complex(1, 0) - std::exp(Complex(0, -M_PI / 2))) * 0.5;
        CHECK(std::abs(a01 - want01) < 1e-14);
        CHECK(std::abs(a10 - want10) < 1e-14);
    }

    SECTION("unitary for assorted powers") {
        for (double p : {-1.3, 0.2, 0.9, 1.5, 2.7, 14.25})
            CHECK(unitarity_defect(power_swap(p).unitary) <= 1e-12);
    }

    SECTION("even integers are flagged as trivial") {
        CHECK(power_swap(0.0).trivial_even_power);
        CHECK(power_swap(2.0).trivial_even_power);
        CHECK(power_swap(-4.0).trivial_even_power);
        CHECK(power_swap(2.0 + 5e-10).trivial_even_power);
        CHECK_FALSE(power_swap(0.1).trivial_even_power);
        CHECK_FALSE(power_swap(1.0).trivial_even_power);
        require_close(power_swap(2.0).unitary, ComplexMatrix::identity({2, 2}), 1e-12);
    }

    SECTION("oracle states across the prescriptions") {
        for (double p : {0.3, 0.5, 1.1, 1.8}) {
            const Scenario sw = power_swap(p);
            for (std::uint64_t s = 0; s < 5; ++s) {
                const DensityOperator rho = random_density({2}, 900 + s);
                const FixedPointFamily fam = dctc_fixed_points(sw.unitary, rho);
                CHECK(fam.unique());
                require_close(fam.particular.matrix(), rho.matrix(), 1e-9, "tau_d = rho");
                require_close(dctc_cr_output(sw.unitary, rho, fam.particular).matrix(), rho.matrix(),
                              1e-10, "rho_d = rho");
                require_close(pctc_cr_map(sw.unitary, rho).matrix(), rho.matrix(), 1e-10,
                              "rho_p = rho");
                require_close(pctc_cv_state(sw.unitary, rho).matrix(), sw.oracle->cv_state_p(rho),
                              1e-10, "tau_p");
            }
        }
    }

    SECTION("loop state self-consistency fails away from the mixed input") {
        const Scenario sw = power_swap(0.5);
        const double s2c2 = std::pow(std::sin(M_PI * 0.25) * std::cos(M_PI * 0.25), 2.0);
        for (std::uint64_t s = 0; s < 20; ++s) {
            const DensityOperator rho = random_density({2}, 1900 + s);
            const double off = dist(rho.matrix(), ComplexMatrix::identity(2) * 0.5);
            const double res = idempotency_residual(sw.unitary, rho).norm;
            // residual = 2 sin^2 cos^2 ||rho - 1/2|| exactly for this family
            CHECK(res == Catch::Approx(2.0 * s2c2 * off).margin(1e-10));
            if (off > 1e-6) CHECK(res > 0.0);
        }
        CHECK(idempotency_residual(sw.unitary, DensityOperator::maximally_mixed({2})).norm <= 1e-12);
    }
}

namespace {
/// Random state commuting with rho: a mixture of rho's eigenprojectors.
/// The closed form for the iterated swap map drops the commutator term,
/// which stays zero exactly for such seeds (the recursion preserves
/// commutation); the canonical case is the maximally mixed seed.
DensityOperator commuting_seed(const DensityOperator& rho, double weight) {
    const EigResult e = hermitian_eig(rho.matrix());
    ComplexMatrix seed({2});
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            seed(i, j) = weight * e.vectors(i, 0) * std::conj(e.vectors(j, 0)) +
                         (1.0 - weight) * e.vectors(i, 1) * std::conj(e.vectors(j, 1));
    return DensityOperator(seed);
}
}  // namespace

TEST_CASE("swap iteration closed form") {
    const DensityOperator rho = random_density({2}, 2100);
    const DensityOperator tau0 = commuting_seed(rho, 0.3);

    SECTION("first iterate") {
        const double p = 0.8;
        const double c2 = std::pow(std::cos(M_PI * p / 2), 2.0);
        require_close(swap_ecp_closed_form(rho, tau0, p, 0),
                      c2 * tau0.matrix() + (1 - c2) * rho.matrix(), 1e-14);
    }

    SECTION("long iterates approach the input state geometrically") {
        require_close(swap_ecp_closed_form(rho, tau0, 0.5, 200), rho.matrix(), 1e-14);
    }

    SECTION("matches the iterated map at every step") {
        for (double p : {0.35, 0.5, 1.6}) {
            for (double weight : {0.0, 0.3, 0.5, 0.9}) {
                const DensityOperator seed = commuting_seed(rho, weight);
                const EcpTrace t = ecp_iterate(power_swap(p).unitary, rho, seed, 1e-300, 30);
                for (int n = 0; n + 1 < static_cast<int>(t.iterates.size()); ++n)
                    CHECK(dist(t.iterates[static_cast<size_t>(n + 1)].matrix(),
                               swap_ecp_closed_form(rho, seed, p, n)) <= 1e-12);
            }
            // mixed seed as the canonical instance
            const DensityOperator mixed = DensityOperator::maximally_mixed({2});
            const EcpTrace t = ecp_iterate(power_swap(p).unitary, rho, mixed, 1e-300, 30);
            for (int n = 0; n + 1 < static_cast<int>(t.iterates.size()); ++n)
                CHECK(dist(t.iterates[static_cast<size_t>(n + 1)].matrix(),
                           swap_ecp_closed_form(rho, mixed, p, n)) <= 1e-12);
        }
    }

    SECTION("a seed that fails to commute leaves the closed-form orbit") {
        const DensityOperator skew = random_density({2}, 2101);
        const EcpTrace t = ecp_iterate(power_swap(0.5).unitary, rho, skew, 1e-300, 10);
        double worst = 0;
        for (int n = 0; n + 1 < static_cast<int>(t.iterates.size()); ++n)
            worst = std::max(worst, dist(t.iterates[static_cast<size_t>(n + 1)].matrix(),
                                         swap_ecp_closed_form(rho, skew, 0.5, n)));
        CHECK(worst > 1e-3);  // the commutator term is genuinely present
    }

    SECTION("log-residual slope equals the contraction rate") {
        for (double p : {0.5, 1.3}) {
            const EcpTrace t = ecp_iterate(power_swap(p).unitary, rho,
                                           DensityOperator::maximally_mixed({2}), 1e-300, 25);
            // fit log r_n = a + b n over the usable residuals
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            int n = 0;
            for (size_t i = 0; i < t.residuals.size(); ++i) {
                if (t.residuals[i] < 1e-13) break;
                const double x = static_cast<double>(i), y = std::log(t.residuals[i]);
                sx += x;
                sy += y;
                sxx += x * x;
                sxy += x * y;
                ++n;
            }
            REQUIRE(n >= 5);
            const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
            const double want = std::log(std::pow(std::cos(M_PI * p / 2), 2.0));
            CHECK(std::abs(slope - want) <= 0.02 * std::abs(want));
        }
    }
}

TEST_CASE("geometric series identity") {
    CHECK(geometric_series_check(1.0, 7) <= 1e-14);   // cosine vanishes, both sides are 1
    CHECK(geometric_series_check(0.5, 10) <= 1e-13);
    CHECK(geometric_series_check(1.5, 3) <= 1e-13);
    CHECK_THROWS_AS(geometric_series_check(2.0, 4), validation_error);
}

TEST_CASE("scenario lookup") {
    CHECK(scenario_by_name("grandfather").name == "grandfather");
    CHECK(scenario_by_name("power-swap", 0.25).p == 0.25);
    CHECK_THROWS_AS(scenario_by_name("nonesuch"), validation_error);
}
