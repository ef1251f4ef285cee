#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ctc/serialize.hpp"

namespace ctc::cli {

enum class Command { fixed_point, ecp, pctc_state, tomograph, scenario, verify_appendix };
enum class Format { json_out, csv_out };

struct RunConfig {
    Command command = Command::scenario;

    // interaction source: a preset name or a matrix file (exactly one)
    std::optional<std::string> scenario_name;
    std::optional<std::string> unitary_file;

    // CR input source (scenario presets may supply a default)
    std::optional<std::string> rho_literal;
    std::optional<std::string> rho_file;

    // ecp
    std::optional<std::string> seed_state_literal;
    std::optional<std::string> seed_state_file;
    double ecp_tol = kEcpDefaultTol;
    int max_iter = kEcpDefaultMaxIter;

    // tomography
    std::string prescription = "pctc";  // pctc | dctc | standalone
    std::string mode;                   // exact | finite-epsilon | sampled (inferred when empty)
    double epsilon = 1e-4;
    std::optional<long long> shots;

    std::uint64_t seed = 0;
    double p = 0.5;
    std::optional<double> g;
    double tol = kDefaultTolerance;
    int cases = 0;  // verify-appendix: 0 keeps the per-check defaults

    Format format = Format::json_out;
};

struct RunResult {
    int exit_code = 0;
    std::string output;
};

struct usage_error : error {
    explicit usage_error(const std::string& what) : error(what) {}
};

namespace detail {

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open file '" + path + "'");
    json j;
    in >> j;
    return j;
}

inline DensityOperator load_state(const std::optional<std::string>& literal,
                                  const std::optional<std::string>& file, double tol) {
    if (literal) return parse_state_literal(*literal);
    ComplexMatrix m = matrix_from_json(read_json_file(*file));
    return DensityOperator(m, tol);
}

struct Problem {
    ComplexMatrix unitary;
    DensityOperator rho;
    std::optional<Scenario> scenario;
};

inline Problem resolve_problem(const RunConfig& cfg) {
    Problem pr;
    if (cfg.scenario_name) {
        pr.scenario = scenario_by_name(*cfg.scenario_name, cfg.p);
        pr.unitary = pr.scenario->unitary;
    } else if (cfg.unitary_file) {
        pr.unitary = matrix_from_json(read_json_file(*cfg.unitary_file));
        if (pr.unitary.factor_count() < 2)
            throw validation_error("unitary file must list at least two tensor factors (CR..., CV)");
        const double udev =
            (pr.unitary.dagger() * pr.unitary - ComplexMatrix::identity(pr.unitary.dims()))
                .frobenius_norm();
        if (udev > 1e-9)
            throw validation_error("interaction is not unitary (||U†U - 1|| = " + std::to_string(udev) + ")");
    } else {
        throw usage_error("no interaction given: use --scenario or --unitary-file");
    }

    if (cfg.rho_literal || cfg.rho_file) {
        pr.rho = load_state(cfg.rho_literal, cfg.rho_file, cfg.tol);
    } else if (pr.scenario && pr.scenario->preset_rho) {
        pr.rho = *pr.scenario->preset_rho;
    } else {
        throw usage_error("no CR input given: use --rho or --rho-file");
    }
    if (pr.rho.side() * pr.unitary.dims().back() != pr.unitary.side())
        throw dimension_error("CR input dimension does not match the interaction's CR factors");
    return pr;
}

inline std::string dump_line(const json& j) { return j.dump() + "\n"; }

}  // namespace detail

/// Execute a validated configuration. Data goes to the returned string
/// (the caller prints it to stdout); exit code 0 on success, 1 on domain
/// errors. Identical configurations produce byte-identical output.
inline RunResult run(const RunConfig& cfg) {
    try {
        switch (cfg.command) {
            case Command::fixed_point: {
                const detail::Problem pr = detail::resolve_problem(cfg);
                const FixedPointFamily fam = dctc_fixed_points(pr.unitary, pr.rho);
                json j{{"family", to_json(fam)},
                       {"max_entropy_member", to_json(max_entropy_member(fam))}};
                return {0, detail::dump_line(j)};
            }
            case Command::ecp: {
                const detail::Problem pr = detail::resolve_problem(cfg);
                DensityOperator seed_state =
                    (cfg.seed_state_literal || cfg.seed_state_file)
                        ? detail::load_state(cfg.seed_state_literal, cfg.seed_state_file, cfg.tol)
                        : DensityOperator::maximally_mixed({pr.unitary.dims().back()});
                const EcpTrace trace =
                    ecp_iterate(pr.unitary, pr.rho, seed_state, cfg.ecp_tol, cfg.max_iter);
                if (cfg.format == Format::csv_out) {
                    std::ostringstream os;
                    os << "n,residual\n";
                    for (size_t n = 0; n < trace.residuals.size(); ++n)
                        os << n << "," << json(trace.residuals[n]).dump() << "\n";
                    return {0, os.str()};
                }
                return {0, detail::dump_line(to_json(trace))};
            }
            case Command::pctc_state: {
                const detail::Problem pr = detail::resolve_problem(cfg);
                json j{{"tau_p", to_json(pctc_cv_state(pr.unitary, pr.rho))}};
                try {
                    j["rho_p"] = to_json(pctc_cr_map(pr.unitary, pr.rho));
                } catch (const postselection_error& e) {
                    j["rho_p"] = nullptr;
                    j["warning"] = std::string("the prescription fails to provide a CR solution "
                                               "for this input: ") + e.what();
                }
                return {0, detail::dump_line(j)};
            }
            case Command::tomograph: {
                std::string mode = cfg.mode;
                if (mode.empty())
                    mode = cfg.shots ? "sampled" : (cfg.prescription == "pctc" ? "exact" : "finite-epsilon");
                if (mode == "sampled" && !cfg.shots)
                    throw usage_error("sampled tomography needs --shots");
                std::optional<SamplingPlan> plan;
                if (mode == "sampled") plan = SamplingPlan{*cfg.shots, cfg.seed};

                TomographyResult result;
                if (cfg.prescription == "standalone") {
                    // no loop involved: --rho is the unknown state itself
                    if (mode == "exact") throw usage_error("standalone tomography has no exact mode");
                    if (!cfg.rho_literal && !cfg.rho_file)
                        throw usage_error("standalone tomography needs --rho or --rho-file");
                    const DensityOperator tau =
                        detail::load_state(cfg.rho_literal, cfg.rho_file, cfg.tol);
                    if (tau.side() != 2) throw dimension_error("standalone tomography needs a qubit state");
                    result = weak_measure_standalone(tau, ProbeSpec(cfg.epsilon), plan).first;
                    if (cfg.format == Format::csv_out) {
                        std::ostringstream os;
                        os << "r1,r2,r3\n"
                           << json(result.r[0]).dump() << "," << json(result.r[1]).dump() << ","
                           << json(result.r[2]).dump() << "\n";
                        return {0, os.str()};
                    }
                    return {0, detail::dump_line(to_json(result))};
                }

                const detail::Problem pr = detail::resolve_problem(cfg);
                if (cfg.prescription == "dctc") {
                    if (mode == "exact") throw usage_error("d-ctc tomography has no exact mode");
                    result = dctc_tomography(pr.unitary, pr.rho, ProbeSpec(cfg.epsilon), plan);
                } else if (cfg.prescription == "pctc") {
                    if (mode == "exact")
                        result = pctc_tomography_exact(pr.unitary, pr.rho);
                    else
                        result = pctc_tomography_sim(pr.unitary, pr.rho, ProbeSpec(cfg.epsilon), plan);
                } else {
                    throw usage_error("unknown prescription '" + cfg.prescription + "'");
                }
                if (cfg.format == Format::csv_out) {
                    std::ostringstream os;
                    os << "r1,r2,r3\n"
                       << json(result.r[0]).dump() << "," << json(result.r[1]).dump() << ","
                       << json(result.r[2]).dump() << "\n";
                    return {0, os.str()};
                }
                return {0, detail::dump_line(to_json(result))};
            }
            case Command::scenario: {
                if (!cfg.scenario_name) throw usage_error("scenario command needs --scenario");
                const Scenario s = scenario_by_name(*cfg.scenario_name, cfg.p);
                std::optional<DensityOperator> rho;
                if (cfg.rho_literal || cfg.rho_file)
                    rho = detail::load_state(cfg.rho_literal, cfg.rho_file, cfg.tol);
                return {0, detail::dump_line(to_json(s, cfg.g, rho))};
            }
            case Command::verify_appendix: {
                VerifySuiteConfig vcfg;
                vcfg.seed = cfg.seed;
                if (cfg.cases > 0) {
                    vcfg.simplification_cases = cfg.cases;
                    vcfg.unitarity_cases = cfg.cases;
                    vcfg.equivalence_cases = cfg.cases;
                }
                std::ostringstream os;
                bool all_pass = true;
                for (const VerificationReport& rep : run_appendix_suite(vcfg)) {
                    os << to_json(rep).dump() << "\n";
                    all_pass = all_pass && rep.pass;
                }
                return {all_pass ? 0 : 1, os.str()};
            }
        }
        throw usage_error("unknown command");
    } catch (const usage_error&) {
        throw;  // handled by the argument layer, exit code 2
    } catch (const error& e) {
        json j{{"error", "domain"}, {"detail", e.what()}};
        return {1, detail::dump_line(j)};
    } catch (const nlohmann::json::exception& e) {
        json j{{"error", "input"}, {"detail", e.what()}};
        return {1, detail::dump_line(j)};
    }
}

/// Build the CLI11 application over a RunConfig. Kept separate from
/// main() so tests can drive parsing directly.
inline void attach_options(CLI::App& app, RunConfig& cfg) {
    app.description("simulator for quantum circuits with a time-travelling subsystem: "
                    "self-consistent and postselected prescriptions, plus probe-based "
                    "state reconstruction of the trapped state");
    app.require_subcommand(1);
    app.footer("state literals: |s><s| with s over {0,1,+,-} (one char per qubit), "
               "'bell' for the pair (|00>+|11>)/sqrt(2), 'mixed' / 'mixedN' for maximally "
               "mixed states. Matrices in files/output: {\"dims\": [...], \"entries\": "
               "[[re,im], ...]} row-major.");

    const auto add_common = [&cfg](CLI::App* sub, bool with_rho = true) {
        sub->add_option("--scenario", cfg.scenario_name,
                        "interaction preset: grandfather, unproven-theorem, power-swap");
        sub->add_option("--unitary-file", cfg.unitary_file,
                        "JSON matrix file with the interaction (CR factors first, CV last)");
        sub->add_option("--p", cfg.p, "power of the swap interaction (power-swap preset)");
        sub->add_option("--seed", cfg.seed, "seed for any randomized part")
            ->envname("CTCQ_SEED");
        sub->add_option("--tol", cfg.tol, "state validation tolerance");
        if (with_rho) {
            sub->add_option("--rho", cfg.rho_literal, "CR input as a state literal");
            sub->add_option("--rho-file", cfg.rho_file, "CR input as a JSON matrix file");
        }
        return sub;
    };
    const auto add_format = [&cfg](CLI::App* sub) {
        sub->add_option_function<std::string>(
               "--format",
               [&cfg](const std::string& f) {
                   if (f == "json") cfg.format = Format::json_out;
                   else if (f == "csv") cfg.format = Format::csv_out;
                   else throw CLI::ValidationError("--format must be json or csv");
               },
               "output format (csv only for Bloch vectors and convergence traces)")
            ->default_str("json");
    };

    CLI::App* fixed = add_common(app.add_subcommand(
        "fixed-point", "solve the self-consistency condition; emit the solution family"));
    (void)fixed;

    CLI::App* ecp = add_common(app.add_subcommand(
        "ecp", "iterate the CV map from a seed state and trace convergence"));
    ecp->add_option("--seed-state", cfg.seed_state_literal, "seed state literal (default: maximally mixed)");
    ecp->add_option("--seed-state-file", cfg.seed_state_file, "seed state JSON matrix file");
    ecp->add_option("--ecp-tol", cfg.ecp_tol, "convergence threshold on consecutive iterates");
    ecp->add_option("--max-iter", cfg.max_iter, "iteration cap");
    add_format(ecp);

    add_common(app.add_subcommand(
        "pctc-state", "emit the postselected loop's CV state (and CR output when it exists)"));

    CLI::App* tomo = add_common(app.add_subcommand(
        "tomograph", "reconstruct the trapped CV state through the probe circuits"));
    tomo->add_option("--prescription", cfg.prescription, "pctc | dctc | standalone")
        ->check(CLI::IsMember({"pctc", "dctc", "standalone"}));
    tomo->add_option("--mode", cfg.mode, "exact | finite-epsilon | sampled (default inferred)")
        ->check(CLI::IsMember({"exact", "finite-epsilon", "sampled"}));
    tomo->add_option("--epsilon", cfg.epsilon, "probe strength in [0, 1]")
        ->check(CLI::Range(0.0, 1.0));
    tomo->add_option("--shots", cfg.shots, "probe measurement shots (sampled mode)");
    add_format(tomo);

    CLI::App* scen = add_common(app.add_subcommand(
        "scenario", "emit a preset interaction and its closed-form reference states"));
    scen->add_option("--g", cfg.g, "family parameter for parametrized reference states");

    CLI::App* verify = app.add_subcommand(
        "verify-appendix", "run the identity checks; one report per line, nonzero exit on failure");
    verify->add_option("--cases", cfg.cases, "randomized case count per check (default: per-check)");
    verify->add_option("--seed", cfg.seed, "suite seed")->envname("CTCQ_SEED");

    app.callback([&app, &cfg] {
        if (app.got_subcommand("fixed-point")) cfg.command = Command::fixed_point;
        else if (app.got_subcommand("ecp")) cfg.command = Command::ecp;
        else if (app.got_subcommand("pctc-state")) cfg.command = Command::pctc_state;
        else if (app.got_subcommand("tomograph")) cfg.command = Command::tomograph;
        else if (app.got_subcommand("scenario")) cfg.command = Command::scenario;
        else if (app.got_subcommand("verify-appendix")) cfg.command = Command::verify_appendix;
    });
}

/// Cross-option constraints CLI11 cannot express per-option.
inline void validate_config(const RunConfig& cfg) {
    if (cfg.scenario_name && cfg.unitary_file)
        throw usage_error("--scenario and --unitary-file are mutually exclusive");
    if (cfg.rho_literal && cfg.rho_file)
        throw usage_error("--rho and --rho-file are mutually exclusive");
    if (cfg.seed_state_literal && cfg.seed_state_file)
        throw usage_error("--seed-state and --seed-state-file are mutually exclusive");
}

/// Parse an argv vector into a RunConfig; throws usage_error on bad
/// input. The binary's main() maps usage errors to exit code 2.
inline RunConfig parse_args(const std::vector<std::string>& args) {
    RunConfig cfg;
    CLI::App app{"ctcq"};
    attach_options(app, cfg);
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        throw usage_error(e.what());
    }
    validate_config(cfg);
    return cfg;
}

}  // namespace ctc::cli
