#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "ctc/cli.hpp"

int main(int argc, char** argv) {
    ctc::cli::RunConfig cfg;
    CLI::App app{"ctcq"};
    ctc::cli::attach_options(app, cfg);
    try {
        app.parse(argc, argv);
        ctc::cli::validate_config(cfg);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const ctc::cli::usage_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    }

    try {
        const ctc::cli::RunResult result = ctc::cli::run(cfg);
        std::fputs(result.output.c_str(), stdout);
        return result.exit_code;
    } catch (const ctc::cli::usage_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    }
}
