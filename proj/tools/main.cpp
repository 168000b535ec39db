// Command-line front end. Links against the C API only, so it double-checks
// that the shared library surface is complete.
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mvcca.h"

namespace {

struct CommonArgs {
    std::string config;
    std::string seed;
    std::string out;
    std::string format = "text";
};

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required) {
    auto* config_opt =
        cmd->add_option("--config", args.config, "Path to a key=value config file");
    if (config_required) config_opt->required();
    cmd->add_option("--seed", args.seed, "Override the root seed (unsigned integer)");
    cmd->add_option("--out", args.out, "Override the output directory");
    cmd->add_option("--format", args.format, "Output format")
        ->check(CLI::IsMember({"text", "csv", "json-lines"}));
}

int finish(mvcca_status status, char* output) {
    if (status == MVCCA_OK) {
        if (output) std::fputs(output, stdout);
        mvcca_free(output);
        return 0;
    }
    std::fprintf(stderr, "error (%s): %s\n", mvcca_status_name(status),
                 mvcca_last_error());
    mvcca_free(output);
    return mvcca_exit_code(status);
}

const char* opt(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-view feature fusion and classification toolkit"};
    app.require_subcommand(1);

    CommonArgs synth_args;
    auto* synth = app.add_subcommand(
        "synth", "Generate a synthetic dataset and write it to disk");
    add_common(synth, synth_args, /*config_required=*/true);

    CommonArgs pipe_args;
    auto* pipeline = app.add_subcommand(
        "pipeline", "Run fusion + classifier training and report test metrics");
    add_common(pipeline, pipe_args, /*config_required=*/true);

    CommonArgs sweep_args;
    auto* sweep = app.add_subcommand(
        "noise-sweep", "Evaluate a trained pipeline under pixel corruption levels");
    add_common(sweep, sweep_args, /*config_required=*/true);

    CommonArgs net_args;
    std::string preset;
    std::vector<std::string> stacks;
    auto* netspec = app.add_subcommand(
        "netspec", "Compare convolutional stack parameter counts and receptive fields");
    netspec->add_option("--preset", preset, "Named stack comparison (e.g. 3x3-vs-7x7)");
    netspec->add_option("--stack", stacks,
                        "Stack description k=<odd>,d=<n>,K=<channels>[,stride=<s>]");
    netspec->add_option("--format", net_args.format, "Output format")
        ->check(CLI::IsMember({"text", "csv", "json-lines"}));

    std::string inspect_path;
    auto* inspect = app.add_subcommand(
        "inspect", "Print a human-readable summary of a saved artifact");
    inspect->add_option("path", inspect_path, "Artifact file to inspect")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        // CLI11 returns 0 for --help; anything else is a usage error.
        return rc == 0 ? 0 : 2;
    }

    // The driver call must complete before `output` is read, so each status
    // is captured in a separate statement (argument evaluation order would
    // otherwise be free to read `output` before the call fills it).
    char* output = nullptr;
    if (synth->parsed()) {
        const mvcca_status st =
            mvcca_cmd_synth(synth_args.config.c_str(), opt(synth_args.seed),
                            opt(synth_args.out), synth_args.format.c_str(), &output);
        return finish(st, output);
    }
    if (pipeline->parsed()) {
        const mvcca_status st =
            mvcca_cmd_pipeline(pipe_args.config.c_str(), opt(pipe_args.seed),
                               opt(pipe_args.out), pipe_args.format.c_str(), &output);
        return finish(st, output);
    }
    if (sweep->parsed()) {
        const mvcca_status st =
            mvcca_cmd_noise_sweep(sweep_args.config.c_str(), opt(sweep_args.seed),
                                  opt(sweep_args.out), sweep_args.format.c_str(),
                                  &output);
        return finish(st, output);
    }
    if (netspec->parsed()) {
        std::vector<const char*> stack_ptrs;
        stack_ptrs.reserve(stacks.size());
        for (const std::string& s : stacks) stack_ptrs.push_back(s.c_str());
        const mvcca_status st =
            mvcca_cmd_netspec(opt(preset),
                              stack_ptrs.empty() ? nullptr : stack_ptrs.data(),
                              stack_ptrs.size(), net_args.format.c_str(), &output);
        return finish(st, output);
    }
    if (inspect->parsed()) {
        const mvcca_status st = mvcca_cmd_inspect(inspect_path.c_str(), &output);
        return finish(st, output);
    }

    std::fputs("no subcommand given\n", stderr);
    return 2;
}
