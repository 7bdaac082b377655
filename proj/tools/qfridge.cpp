// qfridge: command-line front end.
//
// Precedence: built-in defaults < --config file < command-line flags.
// Exit codes: 0 success, 2 configuration, 3 physical constraint, 4 non-convergence.

#include <chrono>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qfridge/cli/commands.hpp"

namespace {

enum ExitCode { kOk = 0, kConfig = 2, kPhysics = 3, kConvergence = 4 };

int fail(int code, const std::string& kind, const std::string& message) {
    std::cerr << "qfridge: " << kind << ": " << message << "\n";
    return code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Noise-driven quantum absorption refrigerator: steady states, sweeps, scaling and a Fock-space oracle"};
    app.require_subcommand(1, 1);

    std::string config_path;
    std::optional<std::string> model;
    std::optional<std::string> out_dir;
    std::optional<int> jobs;
    std::optional<std::string> format;
    app.add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
    app.add_option("--model", model, "Noise model")->check(CLI::IsMember({"gaussian", "poisson"}));
    app.add_option("--out", out_dir, "Output directory");
    app.add_option("--jobs", jobs, "Worker threads for sweeps and scans")->check(CLI::PositiveNumber);
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "structured"}));

    const char* names[][2] = {{"steady", "One steady state: currents, entropy production, COP"},
                              {"sweep", "Sweep one model parameter over a grid"},
                              {"fig2", "Impulse scan of the Poisson refrigerator at the reference operating point"},
                              {"scaling", "Cooling-power exponent J_c ~ T_c^alpha per bath dimension"},
                              {"oracle", "Compare the moment model with a truncated Fock-space solve"}};
    for (const auto& n : names) {
        CLI::App* sub = app.add_subcommand(n[0], n[1]);
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        qfridge::cli::RunConfig cfg =
            config_path.empty() ? qfridge::cli::RunConfig{} : qfridge::cli::load_config(config_path);
        if (model)
            cfg.model = *model;
        if (out_dir)
            cfg.out_dir = *out_dir;
        if (jobs)
            cfg.jobs = *jobs;
        if (format)
            cfg.format = *format == "csv" ? qfridge::cli::OutputFormat::csv : qfridge::cli::OutputFormat::structured;

        const auto start = std::chrono::steady_clock::now();
        const qfridge::cli::RunOutput out = qfridge::cli::run_command(command, cfg);
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        qfridge::cli::write_outputs(cfg, out, seconds);

        for (const auto& line : out.lines)
            std::cout << line << "\n";
        std::cout << "law audit: " << out.audited - out.audit_failures << "/" << out.audited << " points pass\n";
        for (const auto& m : out.audit_messages)
            std::cerr << "qfridge: law audit: " << m << "\n";
        std::cout << "outputs written to " << cfg.out_dir << "\n";
        if (out.exit_code != 0)
            return fail(out.exit_code, "convergence", out.failure);
        return kOk;
    } catch (const qfridge::fock::DimensionCapError& e) {
        return fail(kConfig, "config", e.what());
    } catch (const qfridge::ConfigError& e) {
        return fail(kConfig, "config", e.what());
    } catch (const qfridge::PhysicsError& e) {
        return fail(kPhysics, "physics", e.what());
    } catch (const qfridge::ConvergenceError& e) {
        return fail(kConvergence, "convergence", e.what());
    } catch (const std::invalid_argument& e) {
        return fail(kConfig, "config", e.what());
    } catch (const std::exception& e) {
        return fail(1, "error", e.what());
    }
}
