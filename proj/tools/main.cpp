#include "fceq/cli.hpp"
#include "fceq/version.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

struct Overrides {
    std::optional<int> samples;
    std::optional<double> residual_tol;
    std::optional<std::uint64_t> seed;
    std::optional<double> eps_fraction;
    std::optional<std::string> out;
    std::optional<int> threads;
};

void add_flags(CLI::App* cmd, std::string& config_path, Overrides& ovr) {
    cmd->add_option("config", config_path, "JSON config file")->required();
    cmd->add_option("--samples", ovr.samples, "quasi-random sphere samples (>= 2*dim)");
    cmd->add_option("--tol", ovr.residual_tol, "residual tolerance for accepting a solution");
    cmd->add_option("--seed", ovr.seed, "sampling seed");
    cmd->add_option("--eps-fraction", ovr.eps_fraction, "initial epsilon as a fraction of ||v||_inf");
    cmd->add_option("--out", ovr.out, "write the report to this path instead of stdout");
    cmd->add_option("--threads", ovr.threads, "worker threads (0 = all cores)");
}

int run_command(fceq::JobConfig::Command command, const std::string& config_path,
                const Overrides& ovr) {
    std::ifstream in(config_path);
    if (!in) {
        std::cerr << "error: cannot open config file '" << config_path << "'\n";
        return fceq::kExitConfigInvalid;
    }
    std::ostringstream text;
    text << in.rdbuf();

    fceq::JobConfig cfg = fceq::parse_job_config(text.str(), command);
    if (ovr.samples) cfg.solver.n_sphere_samples = *ovr.samples;
    if (ovr.residual_tol) cfg.solver.tol.residual_tol = *ovr.residual_tol;
    if (ovr.seed) cfg.solver.seed = *ovr.seed;
    if (ovr.eps_fraction) cfg.solver.eps_fraction = *ovr.eps_fraction;
    if (ovr.out) cfg.output_path = *ovr.out;
    if (ovr.threads) {
        cfg.solver.threads = *ovr.threads;
        if (cfg.quad) cfg.quad->threads = *ovr.threads;
    } else if (const char* env = std::getenv("FINSLER_CEQ_THREADS")) {
        cfg.solver.threads = std::atoi(env);
        if (cfg.quad) cfg.quad->threads = cfg.solver.threads;
    }
    if (cfg.solver.n_sphere_samples < 2 * cfg.metric.dim)
        throw fceq::Error(fceq::ErrorCode::CONFIG_INVALID,
                          "solver.samples: needs at least 2*dim samples");

    const fceq::Report report = fceq::run(cfg);
    if (cfg.output_path) {
        std::ofstream out(*cfg.output_path);
        if (!out) {
            std::cerr << "error: cannot write '" << *cfg.output_path << "'\n";
            return fceq::kExitError;
        }
        out << report.to_text();
    } else {
        std::cout << report.to_text();
    }
    return report.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pointwise solver for semi-symmetric compatible linear connections "
                 "on Finsler manifolds"};
    app.set_version_flag("--version", FCEQ_VERSION);
    app.require_subcommand(1);

    struct Sub {
        fceq::JobConfig::Command command;
        std::string config_path;
        Overrides ovr;
    };
    Sub subs[] = {
        {fceq::JobConfig::Command::solve, {}, {}},
        {fceq::JobConfig::Command::analyze, {}, {}},
        {fceq::JobConfig::Command::check, {}, {}},
        {fceq::JobConfig::Command::synth, {}, {}},
    };
    const char* descriptions[] = {
        "solve the compatibility system at a point",
        "contact census of sampled directions, plus the averaged-metric diagnostic",
        "sweep the intrinsic solvability conditions only",
        "build a germ with a known torsion 1-form, solve it, and report the recovery error",
    };
    CLI::App* handles[4];
    for (int k = 0; k < 4; ++k) {
        handles[k] = app.add_subcommand(fceq::to_string(subs[k].command), descriptions[k]);
        add_flags(handles[k], subs[k].config_path, subs[k].ovr);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        for (int k = 0; k < 4; ++k)
            if (handles[k]->parsed())
                return run_command(subs[k].command, subs[k].config_path, subs[k].ovr);
        std::cerr << "error: no subcommand\n";
        return fceq::kExitError;
    } catch (const fceq::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code() == fceq::ErrorCode::CONFIG_INVALID ? fceq::kExitConfigInvalid
                                                           : fceq::kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return fceq::kExitError;
    }
}
