#include "srelab/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace srelab {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::string& prefix,
                  const std::set<std::string>& allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key()))
            throw ValidationError("unknown config key: " + prefix + it.key());
    }
}

template <typename T>
T get_or(const json& obj, const std::string& key, T def) {
    if (!obj.contains(key)) return def;
    return obj.at(key).get<T>();
}

template <typename T>
T get_required(const json& obj, const std::string& path, const std::string& key) {
    if (!obj.contains(key)) throw ValidationError("missing required config key: " + path + key);
    return obj.at(key).get<T>();
}

std::vector<double> t_grid_from(const json& sweep) {
    if (sweep.contains("t_list")) return sweep.at("t_list").get<std::vector<double>>();
    if (sweep.contains("t_start") || sweep.contains("t_stop") || sweep.contains("t_step")) {
        const double start = get_or(sweep, "t_start", 0.0);
        const double stop = get_required<double>(sweep, "sweep.", "t_stop");
        const double step = get_required<double>(sweep, "sweep.", "t_step");
        if (!(step > 0.0)) throw ValidationError("sweep.t_step must be > 0");
        std::vector<double> out;
        for (double t = start; t <= stop + 1e-12; t += step) out.push_back(t);
        return out;
    }
    return {};
}

}  // namespace

RunConfig parse_config_text(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ValidationError("config root must be a JSON object");

    require_keys(root, "",
                 {"mode", "model", "contour", "sweep", "solver", "ed", "fit", "io", "workers"});

    RunConfig cfg;
    cfg.original_json = root.dump(2);
    cfg.mode = get_required<std::string>(root, "", "mode");
    static const std::set<std::string> modes = {"ed",           "saddle", "sff",
                                                "phase-diagram", "verify", "fit"};
    if (!modes.count(cfg.mode)) throw ValidationError("unknown mode: " + cfg.mode);

    if (root.contains("model")) {
        const json& m = root.at("model");
        require_keys(m, "model.", {"n_majorana", "q", "j_coupling", "seed"});
        cfg.model.q = get_required<int>(m, "model.", "q");
        cfg.model.j_coupling = get_required<double>(m, "model.", "j_coupling");
        cfg.model.n_majorana = get_or(m, "n_majorana", 8);
        cfg.model.seed = get_or<std::uint64_t>(m, "seed", 0);
        if (cfg.mode == "ed" || cfg.mode == "verify")
            cfg.model.n_majorana = get_required<int>(m, "model.", "n_majorana");
    } else if (cfg.mode != "fit") {
        throw ValidationError("missing required config key: model");
    }

    if (root.contains("contour")) {
        const json& c = root.at("contour");
        require_keys(c, "contour.", {"n_im", "n_re"});
        cfg.contour.n_im = get_or(c, "n_im", 200);
        cfg.contour.n_re = get_or(c, "n_re", 200);
    }

    if (root.contains("sweep")) {
        const json& s = root.at("sweep");
        require_keys(s, "sweep.",
                     {"beta_list", "t_list", "t_start", "t_stop", "t_step", "t_max"});
        cfg.sweep.beta_list = get_or(s, "beta_list", std::vector<double>{});
        cfg.sweep.t_list = t_grid_from(s);
        cfg.sweep.t_max = get_or(s, "t_max", 50.0);
    }

    const bool needs_sweep =
        cfg.mode == "ed" || cfg.mode == "saddle" || cfg.mode == "sff";
    if (needs_sweep) {
        if (cfg.sweep.beta_list.empty())
            throw ValidationError("missing required config key: sweep.beta_list");
        if (cfg.sweep.t_list.empty())
            throw ValidationError("missing required config key: sweep.t_list (or t_stop/t_step)");
    }
    if (cfg.mode == "phase-diagram" && cfg.sweep.beta_list.empty())
        throw ValidationError("missing required config key: sweep.beta_list");

    if (root.contains("solver")) {
        const json& s = root.at("solver");
        require_keys(s, "solver.",
                     {"tol", "damping", "max_iter", "n_freq", "thermal_tol", "continuation_dt"});
        cfg.solver.tol = get_or(s, "tol", cfg.solver.tol);
        cfg.solver.damping = get_or(s, "damping", cfg.solver.damping);
        cfg.solver.max_iter = get_or(s, "max_iter", cfg.solver.max_iter);
        cfg.solver.n_freq = get_or(s, "n_freq", cfg.solver.n_freq);
        cfg.solver.thermal_tol = get_or(s, "thermal_tol", cfg.solver.thermal_tol);
        cfg.solver.continuation_dt = get_or(s, "continuation_dt", cfg.solver.continuation_dt);
    }

    if (root.contains("ed")) {
        const json& e = root.at("ed");
        require_keys(e, "ed.", {"realizations"});
        cfg.ed.realizations = get_or(e, "realizations", cfg.ed.realizations);
        if (cfg.ed.realizations < 1) throw ValidationError("ed.realizations must be >= 1");
    }

    if (cfg.mode == "fit") {
        if (!root.contains("fit")) throw ValidationError("missing required config key: fit");
        const json& f = root.at("fit");
        require_keys(f, "fit.", {"model", "points_file"});
        cfg.fit.model = get_required<std::string>(f, "fit.", "model");
        cfg.fit.points_file = get_required<std::string>(f, "fit.", "points_file");
        static const std::set<std::string> fit_models = {"saturation", "lorentzian", "boundary"};
        if (!fit_models.count(cfg.fit.model))
            throw ValidationError("unknown fit.model: " + cfg.fit.model);
    }

    if (root.contains("io")) {
        const json& i = root.at("io");
        require_keys(i, "io.", {"out_dir", "format"});
        cfg.io.out_dir = get_or<std::string>(i, "out_dir", cfg.io.out_dir);
        cfg.io.format = get_or<std::string>(i, "format", cfg.io.format);
        if (cfg.io.format != "csv" && cfg.io.format != "json")
            throw ValidationError("io.format must be csv or json");
    }

    cfg.workers = get_or(root, "workers", 1);
    if (cfg.workers < 1) throw ValidationError("workers must be >= 1");

    if (cfg.mode != "fit") {
        try {
            cfg.model.validate();
        } catch (const std::invalid_argument& e) {
            throw ValidationError(e.what());
        }
    }
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ValidationError("config file not found: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str());
}

void apply_env_overrides(RunConfig& cfg) {
    if (const char* v = std::getenv("SRELAB_OUT")) cfg.io.out_dir = v;
    if (const char* v = std::getenv("SRELAB_FORMAT")) cfg.io.format = v;
    if (const char* v = std::getenv("SRELAB_WORKERS")) cfg.workers = std::max(1, std::atoi(v));
    if (const char* v = std::getenv("SRELAB_SEED")) cfg.model.seed = std::strtoull(v, nullptr, 10);
}

}  // namespace srelab
