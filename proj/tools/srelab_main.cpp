#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "srelab/runner.hpp"
#include "srelab/version.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    std::string format;
    int workers = 0;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "JSON configuration file")->required();
    cmd->add_option("--out", flags.out_dir, "output directory (overrides io.out_dir)");
    cmd->add_option("--workers", flags.workers, "worker thread count");
    cmd->add_option("--seed", flags.seed, "base RNG seed")->each([&](const std::string&) {
        flags.seed_set = true;
    });
    cmd->add_option("--format", flags.format, "output format: csv or json");
}

int dispatch(const std::string& mode, const CommonFlags& flags) {
    std::ifstream f(flags.config_path);
    if (!f) {
        std::cerr << "error: config file not found: " << flags.config_path << "\n";
        return srelab::kExitValidation;
    }
    std::stringstream ss;
    ss << f.rdbuf();

    nlohmann::json root;
    try {
        root = nlohmann::json::parse(ss.str());
    } catch (const nlohmann::json::parse_error& e) {
        std::cerr << "error: config is not valid JSON: " << e.what() << "\n";
        return srelab::kExitValidation;
    }
    if (root.is_object() && !root.contains("mode")) root["mode"] = mode;
    if (root.is_object() && root.at("mode") != mode) {
        std::cerr << "error: config mode '" << root.at("mode").get<std::string>()
                  << "' does not match subcommand '" << mode << "'\n";
        return srelab::kExitValidation;
    }

    srelab::RunConfig cfg;
    try {
        cfg = srelab::parse_config_text(root.dump());
    } catch (const srelab::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return srelab::kExitValidation;
    }

    // precedence: CLI flags > environment > config file
    srelab::apply_env_overrides(cfg);
    if (!flags.out_dir.empty()) cfg.io.out_dir = flags.out_dir;
    if (!flags.format.empty()) cfg.io.format = flags.format;
    if (flags.workers > 0) cfg.workers = flags.workers;
    if (flags.seed_set) cfg.model.seed = flags.seed;
    if (cfg.io.format != "csv" && cfg.io.format != "json") {
        std::cerr << "error: format must be csv or json\n";
        return srelab::kExitValidation;
    }

    try {
        return srelab::run(cfg);
    } catch (const srelab::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return srelab::kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return srelab::kExitNonConvergence;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"srelab: stabilizer-entropy dynamics of SYK thermofield-double states"};
    app.set_version_flag("--version", srelab::kVersion);
    app.require_subcommand(1);

    const char* modes[] = {"ed", "saddle", "sff", "phase-diagram", "verify", "fit"};
    const char* help[] = {
        "disorder-averaged exact-diagonalization curves",
        "contour saddle sweeps (both branches)",
        "slope spectral form factor and predicted stabilizer entropy",
        "transition times across a beta list and boundary fit",
        "exact-identity battery (exit 3 on failure)",
        "nonlinear least-squares fit of a points file",
    };
    CommonFlags flags[6];
    CLI::App* cmds[6];
    for (int i = 0; i < 6; ++i) {
        cmds[i] = app.add_subcommand(modes[i], help[i]);
        add_common(cmds[i], flags[i]);
    }

    CLI11_PARSE(app, argc, argv);
    for (int i = 0; i < 6; ++i)
        if (cmds[i]->parsed()) return dispatch(modes[i], flags[i]);
    return srelab::kExitValidation;
}
