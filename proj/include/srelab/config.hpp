#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "srelab/contour.hpp"
#include "srelab/couplings.hpp"

namespace srelab {

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SweepConfig {
    std::vector<double> beta_list;
    std::vector<double> t_list;
    double t_max = 50.0;  // phase-diagram window
};

struct SolverConfig {
    double tol = 1e-10;            // saddle G-update tolerance
    double damping = 0.5;
    int max_iter = 4000;
    int n_freq = 1 << 14;          // Matsubara window
    double thermal_tol = 1e-12;
    double continuation_dt = 0.5;  // adiabatic t step
};

struct EdConfig {
    int realizations = 10;
};

struct FitConfig {
    std::string model;        // saturation | lorentzian | boundary
    std::string points_file;  // CSV with columns x,y[,stderr]
};

struct IoConfig {
    std::string out_dir = "out";
    std::string format = "csv";  // csv | json
};

// Parsed and validated run configuration. Unknown keys anywhere in the config
// file are rejected; error messages name the offending dotted path.
struct RunConfig {
    std::string mode;  // ed | saddle | sff | phase-diagram | verify | fit
    ModelParams model;
    contour::ContourSpec contour;
    SweepConfig sweep;
    SolverConfig solver;
    EdConfig ed;
    FitConfig fit;
    IoConfig io;
    int workers = 1;

    std::string original_json;  // echoed into run metadata
};

RunConfig parse_config_text(const std::string& json_text);
RunConfig parse_config_file(const std::string& path);

// SRELAB_OUT, SRELAB_WORKERS, SRELAB_SEED, SRELAB_FORMAT
void apply_env_overrides(RunConfig& cfg);

}  // namespace srelab
