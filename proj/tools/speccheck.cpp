// speccheck: run Hoare-triple suites against the engine.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "jasper/speccheck.hpp"

int main(int argc, char** argv) {
    CLI::App cli{"Check pre/postcondition triples against the Jasper engine"};
    cli.require_subcommand(1);

    std::string suite;
    auto* run = cli.add_subcommand("run", "Run every *.triple in a suite directory");
    run->add_option("--suite", suite, "Suite directory")->required();

    CLI11_PARSE(cli, argc, argv);

    try {
        auto summary = jasper::speccheck::run_suite(suite, std::cout);
        return summary.failed == 0 && summary.passed > 0 ? EXIT_SUCCESS : EXIT_FAILURE;
    } catch (const std::exception& e) {
        std::cerr << "speccheck: " << e.what() << '\n';
        return EXIT_FAILURE;
    }
}
