#include "wellpose/cli.hpp"

#include <cstdlib>
#include <ostream>

#include <CLI11.hpp>

#include "wellpose/config.hpp"
#include "wellpose/error.hpp"
#include "wellpose/experiment.hpp"

namespace wellpose {

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Energy-growth and well-posedness checks for hyperbolic equations with non-regular coefficients",
                 "wellpose"};
    app.require_subcommand(1);
    std::string config_path, out_dir, format;
    std::size_t workers = 0;
    app.add_option("--out", out_dir, "Output directory (default: output.dir of the config)");
    app.add_option("--workers", workers, "Worker threads (default: workers of the config)")->check(CLI::PositiveNumber);
    app.add_option("--format", format, "Table format")->check(CLI::IsMember({"csv", "jsonl"}));

    const std::vector<std::pair<std::string, std::string>> verbs{
        {"validate", "Check the config and the coefficient field"},
        {"certify", "Write the regularity certificate"},
        {"mollify-verify", "Check the mollifier approximation bounds on the (eps, t) grid"},
        {"sweep", "Solve the modes over the xi grid"},
        {"classify", "Sweep, fit the growth law, check data decay and classify"},
        {"all", "Run every stage"}};
    for (const auto& [name, help] : verbs) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("config", config_path, "Experiment config (JSON)")->required();
        // flags are accepted before or after the verb
        sub->fallthrough();
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return kExitValidation;
    }
    const std::string verb = app.get_subcommands().front()->get_name();

    try {
        ExperimentConfig config = load_config(config_path);
        RunOptions opt;
        opt.out_dir = config.output.dir;
        if (const char* env = std::getenv("WELLPOSE_OUT_DIR"); env && *env) opt.out_dir = env;
        if (!out_dir.empty()) opt.out_dir = out_dir;
        opt.format = format.empty() ? config.output.format : parse_format(format);
        opt.workers = workers ? workers : config.workers;
        opt.log = &err;
        const RunSummary sum = run_experiment(config, parse_stage(verb), opt);
        for (const auto& f : sum.files) out << f << "\n";
        if (sum.sweep_errors) err << "error: " << sum.sweep_errors << " sweep point(s) failed; see errors.json\n";
        if (!sum.approximation_pass) err << "error: mollifier approximation bounds failed on part of the grid\n";
        if (sum.refused) err << "error: classification refused: growth fit inconsistent with the model\n";
        return sum.numerical_failure() ? kExitNumerical : kExitOk;
    } catch (const ValidationError& e) {
        err << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const Error& e) {
        err << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}

}  // namespace wellpose
