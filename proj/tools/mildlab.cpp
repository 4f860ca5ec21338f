// mildlab: batch front end. Exit codes: 0 pass, 1 error or failed verdict,
// 2 inconclusive.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "mildlab/config.hpp"
#include "mildlab/errors.hpp"
#include "mildlab/parallel.hpp"
#include "mildlab/run.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read config " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pathwise solver and verification harness for the stochastic heat equation with monotone drift"};
    app.require_subcommand(1);

    std::size_t workers = mildlab::default_workers();
    std::string output_root;
    bool quiet = false;
    app.add_option("--workers", workers, "Worker threads (results do not depend on it)")->check(CLI::PositiveNumber);
    app.add_option("--output-root", output_root,
                   std::string("Root for relative output directories (overrides $") + mildlab::kOutputRootVariable + ")");
    app.add_flag("--quiet", quiet, "Suppress progress lines");

    std::string config_path;
    std::string study_name;
    auto* noise = app.add_subcommand("sample-noise", "Sample noise paths for the configured seeds");
    auto* solve = app.add_subcommand("solve", "Run the lambda-continuation for each seed");
    auto* study = app.add_subcommand("study", "Run one configured study, or \"all\"");
    auto* check = app.add_subcommand("check-invariants", "Run the invariant suite");
    study->add_option("name", study_name, "Study name")->required();
    for (auto* sub : {noise, solve, study, check}) {
        sub->add_option("config", config_path, "Config file (JSON)")->required()->check(CLI::ExistingFile);
        sub->fallthrough();
    }

    CLI11_PARSE(app, argc, argv);

    try {
        const mildlab::RunConfig config = mildlab::parse_config(read_file(config_path));
        mildlab::RunOptions options;
        options.workers = workers;
        if (!output_root.empty()) options.output_root = output_root;
        if (!quiet) options.log = &std::cerr;
        const std::string sub = app.get_subcommands().front()->get_name();
        return mildlab::run(config, sub, study_name, options);
    } catch (const mildlab::ValidationError& e) {
        std::cerr << e.what() << '\n';
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
    }
    return mildlab::exit_error;
}
