// Command-line front end: solve, sample, rho, discretize.

#include "mincop/checkerboard.hpp"
#include "mincop/cli.hpp"
#include "mincop/constraints.hpp"
#include "mincop/error.hpp"
#include "mincop/io.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <map>

int main(int argc, char** argv) {
    using namespace mincop;

    CLI::App app{"Minimum information checkerboard copulas"};
    app.require_subcommand(1);

    std::string config_path;
    auto* solve_cmd = app.add_subcommand("solve", "Solve the problem described by a JSON configuration");
    solve_cmd->add_option("config", config_path, "configuration file")->required();

    std::string array_path;
    std::size_t count = 1000;
    std::uint64_t seed = 1;
    SampleMode mode = SampleMode::CellCenters;
    std::string out_path;
    const std::map<std::string, SampleMode> modes{{"cell_centers", SampleMode::CellCenters},
                                                  {"continuous", SampleMode::Continuous}};
    auto* sample_cmd = app.add_subcommand("sample", "Draw a random sample from a probability array");
    sample_cmd->add_option("array", array_path, "array file")->required();
    sample_cmd->add_option("--count", count, "number of points")->check(CLI::PositiveNumber);
    sample_cmd->add_option("--seed", seed, "generator seed");
    sample_cmd->add_option("--mode", mode, "cell_centers or continuous")
        ->transform(CLI::CheckedTransformer(modes, CLI::ignore_case));
    sample_cmd->add_option("--out", out_path, "CSV output (stdout when omitted)");

    auto* rho_cmd = app.add_subcommand("rho", "Print Spearman's rho of a bivariate array");
    rho_cmd->add_option("array", array_path, "array file")->required();

    std::string family_name;
    double param = 0.0;
    std::size_t n = 0;
    auto* disc_cmd = app.add_subcommand("discretize", "Write the checkerboard skeleton of a bivariate copula");
    disc_cmd->add_option("--family", family_name, "gaussian, clayton, gumbel, independence or comonotone")
        ->required();
    disc_cmd->add_option("--param", param, "family parameter");
    disc_cmd->add_option("--n", n, "cells per axis")->required()->check(CLI::Range(std::size_t{2}, std::size_t{1} << 20));
    disc_cmd->add_option("--out", out_path, "array file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*solve_cmd) return cli::run(config_path, std::cout, std::cerr);
        if (*sample_cmd) {
            const ProbArray p = io::read_prob_array(array_path);
            const auto points = sample(p, count, seed, mode);
            if (out_path.empty()) {
                io::write_samples(std::cout, points, p.shape().dims());
            } else {
                io::write_samples(out_path, points, p.shape().dims());
            }
        } else if (*rho_cmd) {
            std::printf("%.12f\n", spearman_of_array(io::read_prob_array(array_path)));
        } else if (*disc_cmd) {
            const GridShape shape(2, n);
            io::write_array(out_path, skeleton_from_copula(make_family(family_name, param, 2), shape));
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::kExitError;
    }
    return 0;
}
