#include "support.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ctc/cli.hpp"

using namespace ctc;
using cli::Command;
using cli::RunConfig;
using test_support::dist;
using test_support::require_close;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

}  // namespace

TEST_CASE("state literals") {
    require_close(parse_state_literal("|0><0|").matrix(),
                  ket_density(basis_ket({2}, 0), {2}), 1e-15);
    require_close(parse_state_literal("|+><+|").matrix(), test_support::plus_state().matrix(), 1e-15);
    CHECK(parse_state_literal("|00><00|").side() == 4);
    CHECK(parse_state_literal("|0-><0-|").side() == 4);
    require_close(parse_state_literal("bell").matrix(), ket_density(bell_ket(), {2, 2}), 1e-15);
    require_close(parse_state_literal("mixed").matrix(), ComplexMatrix::identity(2) * 0.5, 0.0);
    CHECK(parse_state_literal("mixed2").side() == 4);

    CHECK_THROWS_AS(parse_state_literal("|0><1|"), validation_error);
    CHECK_THROWS_AS(parse_state_literal("|02><02|"), validation_error);
    CHECK_THROWS_AS(parse_state_literal("nonsense"), validation_error);
    CHECK_THROWS_AS(parse_state_literal(""), validation_error);
    CHECK_THROWS_AS(parse_state_literal("|><|"), validation_error);
    CHECK_THROWS_AS(parse_state_literal("|0>"), validation_error);
    CHECK_THROWS_AS(parse_state_literal("mixed99"), validation_error);
    CHECK_THROWS_AS(parse_state_literal("mixedx"), validation_error);
}

TEST_CASE("matrix serialization round trip") {
    const ComplexMatrix m = test_support::random_matrix({2, 3}, 99);
    const ComplexMatrix back = matrix_from_json(to_json(m));
    CHECK(back.dims() == m.dims());
    CHECK(dist(back, m) == 0.0);

    // double round trip through text is lossless as well
    const json parsed = json::parse(to_json(m).dump());
    CHECK(dist(matrix_from_json(parsed), m) == 0.0);

    CHECK_THROWS_AS(matrix_from_json(json{{"dims", {2}}}), validation_error);

    SECTION("hostile inputs are rejected before allocation") {
        CHECK_THROWS_AS(matrix_from_json(json{{"dims", {100000, 100000}}, {"entries", json::array()}}),
                        validation_error);
        CHECK_THROWS_AS(matrix_from_json(json{{"dims", {0}}, {"entries", json::array()}}),
                        validation_error);
        CHECK_THROWS_AS(matrix_from_json(json{{"dims", {-2}}, {"entries", json::array()}}),
                        validation_error);
        CHECK_THROWS_AS(matrix_from_json(json{{"dims", {2}}, {"entries", {1.0, 2.0}}}),
                        validation_error);
    }
}

TEST_CASE("argument parsing") {
    SECTION("happy path") {
        const RunConfig cfg = cli::parse_args(
            {"tomograph", "--scenario", "grandfather", "--rho", "|0><0|", "--mode", "exact"});
        CHECK(cfg.command == Command::tomograph);
        CHECK(cfg.scenario_name == "grandfather");
        CHECK(cfg.rho_literal == "|0><0|");
        CHECK(cfg.mode == "exact");
    }

    SECTION("strength bound is a usage error") {
        CHECK_THROWS_AS(cli::parse_args({"tomograph", "--scenario", "grandfather", "--rho",
                                         "|0><0|", "--epsilon", "1.5"}),
                        cli::usage_error);
    }

    SECTION("power flag flows through") {
        const std::string rho_path = temp_path("ctcq_rho.json");
        write_file(rho_path, to_json(DensityOperator::maximally_mixed({2})).dump());
        const RunConfig cfg = cli::parse_args(
            {"fixed-point", "--scenario", "power-swap", "--p", "0.5", "--rho-file", rho_path});
        CHECK(cfg.command == Command::fixed_point);
        CHECK(cfg.p == 0.5);
        REQUIRE(cfg.rho_file.has_value());
    }

    SECTION("conflicting sources") {
        CHECK_THROWS_AS(cli::parse_args({"fixed-point", "--scenario", "grandfather",
                                         "--unitary-file", "u.json", "--rho", "|0><0|"}),
                        cli::usage_error);
        CHECK_THROWS_AS(cli::parse_args({"fixed-point", "--scenario", "grandfather", "--rho",
                                         "|0><0|", "--rho-file", "r.json"}),
                        cli::usage_error);
    }

    SECTION("unknown command") {
        CHECK_THROWS_AS(cli::parse_args({"frobnicate"}), cli::usage_error);
    }

    SECTION("seed falls back to the environment") {
        setenv("CTCQ_SEED", "977", 1);
        const RunConfig cfg = cli::parse_args({"verify-appendix", "--cases", "5"});
        CHECK(cfg.seed == 977);
        const RunConfig overridden =
            cli::parse_args({"verify-appendix", "--cases", "5", "--seed", "3"});
        CHECK(overridden.seed == 3);
        unsetenv("CTCQ_SEED");
    }
}

TEST_CASE("run dispatch") {
    SECTION("loop state with warning on the failing branch") {
        RunConfig cfg;
        cfg.command = Command::pctc_state;
        cfg.scenario_name = "grandfather";
        cfg.rho_literal = "|1><1|";
        const cli::RunResult res = cli::run(cfg);
        CHECK(res.exit_code == 0);
        const json j = json::parse(res.output);
        CHECK(j.at("rho_p").is_null());
        CHECK(j.contains("warning"));
        require_close(matrix_from_json(j.at("tau_p")), ComplexMatrix::identity(2) * 0.5, 1e-12);
    }

    SECTION("domain errors render as structured output with exit 1") {
        RunConfig cfg;
        cfg.command = Command::fixed_point;
        cfg.scenario_name = "grandfather";
        cfg.rho_literal = "|00><00|";  // wrong dimension for a single-qubit CR
        const cli::RunResult res = cli::run(cfg);
        CHECK(res.exit_code == 1);
        const json j = json::parse(res.output);
        CHECK(j.at("error") == "domain");
    }

    SECTION("verify-appendix emits one report per line") {
        RunConfig cfg;
        cfg.command = Command::verify_appendix;
        cfg.cases = 10;
        cfg.seed = 7;
        const cli::RunResult res = cli::run(cfg);
        CHECK(res.exit_code == 0);
        int lines = 0;
        std::istringstream in(res.output);
        std::string line;
        while (std::getline(in, line)) {
            const json j = json::parse(line);
            CHECK(j.at("pass").get<bool>());
            ++lines;
        }
        CHECK(lines == 4);
    }

    SECTION("csv output for convergence traces and bloch vectors") {
        RunConfig cfg;
        cfg.command = Command::ecp;
        cfg.scenario_name = "power-swap";
        cfg.p = 0.5;
        cfg.rho_literal = "|0><0|";
        cfg.format = cli::Format::csv_out;
        const cli::RunResult res = cli::run(cfg);
        CHECK(res.exit_code == 0);
        CHECK(res.output.rfind("n,residual\n", 0) == 0);

        RunConfig tomo;
        tomo.command = Command::tomograph;
        tomo.scenario_name = "grandfather";
        tomo.rho_literal = "|0><0|";
        tomo.mode = "exact";
        tomo.format = cli::Format::csv_out;
        const cli::RunResult res2 = cli::run(tomo);
        CHECK(res2.output.rfind("r1,r2,r3\n", 0) == 0);
    }
}

TEST_CASE("determinism and round trips through the run layer") {
    SECTION("identical configurations produce identical bytes") {
        RunConfig cfg;
        cfg.command = Command::tomograph;
        cfg.scenario_name = "power-swap";
        cfg.p = 0.5;
        cfg.rho_literal = "|0><0|";
        cfg.prescription = "pctc";
        cfg.mode = "sampled";
        cfg.epsilon = 0.3;
        cfg.shots = 20000;
        cfg.seed = 42;
        CHECK(cli::run(cfg).output == cli::run(cfg).output);

        cfg.seed = 43;
        const std::string other = cli::run(cfg).output;
        cfg.seed = 42;
        CHECK(cli::run(cfg).output != other);
    }

    SECTION("emitted matrices feed back into other commands") {
        RunConfig cfg;
        cfg.command = Command::pctc_state;
        cfg.scenario_name = "grandfather";
        cfg.rho_literal = "|0><0|";
        const json j = json::parse(cli::run(cfg).output);

        const std::string path = temp_path("ctcq_roundtrip.json");
        write_file(path, j.at("tau_p").dump());

        RunConfig next;
        next.command = Command::fixed_point;
        next.scenario_name = "grandfather";
        next.rho_file = path;
        const cli::RunResult res = cli::run(next);
        CHECK(res.exit_code == 0);
        const json fam = json::parse(res.output);
        require_close(matrix_from_json(fam.at("max_entropy_member")),
                      ComplexMatrix::identity(2) * 0.5, 1e-10);
    }

    SECTION("scenario output re-parses as an interaction") {
        RunConfig cfg;
        cfg.command = Command::scenario;
        cfg.scenario_name = "power-swap";
        cfg.p = 0.5;
        const json j = json::parse(cli::run(cfg).output);
        const std::string path = temp_path("ctcq_unitary.json");
        write_file(path, j.at("unitary").dump());

        RunConfig next;
        next.command = Command::fixed_point;
        next.unitary_file = path;
        next.rho_literal = "|+><+|";
        const cli::RunResult res = cli::run(next);
        CHECK(res.exit_code == 0);
        const json fam = json::parse(res.output);
        require_close(matrix_from_json(fam.at("max_entropy_member")),
                      test_support::plus_state().matrix(), 1e-9);
    }
}

TEST_CASE("scenario command payload") {
    RunConfig cfg;
    cfg.command = Command::scenario;
    cfg.scenario_name = "unproven-theorem";
    cfg.g = 0.25;
    const json j = json::parse(cli::run(cfg).output);
    CHECK(j.at("cr_dims") == json::array({2, 2}));
    CHECK(j.at("cv_dim") == 2);
    CHECK(j.contains("preset_rho"));
    REQUIRE(j.contains("oracle"));
    const ComplexMatrix tau_d = matrix_from_json(j.at("oracle").at("tau_d"));
    CHECK(std::abs(tau_d(0, 0).real() - 0.25) < 1e-14);
    CHECK(std::abs(tau_d(1, 1).real() - 0.75) < 1e-14);

    SECTION("reference states are withheld for inputs they are not stated for") {
        cfg.rho_literal = "|11><11|";
        const json j2 = json::parse(cli::run(cfg).output);
        CHECK(j2.at("oracle").is_null());
        CHECK(j2.contains("oracle_note"));
    }

    SECTION("standalone tomography needs no interaction") {
        RunConfig solo;
        solo.command = Command::tomograph;
        solo.prescription = "standalone";
        solo.rho_literal = "|+><+|";
        solo.epsilon = 0.4;
        solo.mode = "finite-epsilon";
        const cli::RunResult res = cli::run(solo);
        CHECK(res.exit_code == 0);
        const json out = json::parse(res.output);
        CHECK(std::abs(out.at("r")[0].get<double>() - 1.0) < 1e-12);
    }
}
