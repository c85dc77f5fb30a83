#include <CLI11.hpp>

#include "app/commands.hpp"

int main(int argc, char** argv) {
    using fracrit::app::CommandOptions;
    CLI::App app{"fracrit: critical fractional Schroedinger problems on periodic grids"};
    app.require_subcommand(1);

    CommandOptions opt;
    std::string config;
    std::string out;
    std::uint64_t seed = 0;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", config, "JSON run configuration (canonical 1-D instance if omitted)")
            ->check(CLI::ExistingFile);
        sub->add_option("--out", out, "output directory, or a .json path for the main report");
        sub->add_option("--seed", seed, "random seed (overrides the config)");
        sub->add_option("--threads", opt.threads, "worker threads")->check(CLI::PositiveNumber);
        sub->add_flag("--quiet", opt.quiet, "no summary on stdout");
    };
    common(app.add_subcommand("calibrate", "calibrate the bubble amplitude and report S_num"));
    common(app.add_subcommand("constants", "print C0, alpha, r1, S_num and the smallness check"));
    common(app.add_subcommand("verify", "run the invariant suites"));
    auto* dec = app.add_subcommand("decompose", "extract bubbles from a field snapshot");
    common(dec);
    dec->add_option("--in", opt.in, "input field snapshot")->required()->check(CLI::ExistingFile);
    common(app.add_subcommand("solve", "compute the two positive solutions"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : fracrit::app::exit_config;
    }

    CLI::App* sub = app.get_subcommands().front();
    if (!config.empty()) opt.config = config;
    if (!out.empty()) opt.out = out;
    if (sub->count("--seed") > 0) opt.seed = seed;
    return fracrit::app::run_command(sub->get_name(), opt);
}
