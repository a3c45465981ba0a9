#pragma once

#include <string>
#include <vector>

#include "srelab/fitkit.hpp"
#include "srelab/saddle.hpp"
#include "srelab/thermal.hpp"

namespace srelab::dynamics {

struct PredictionParams {
    double c0_const = 1.0;     // O(1) constant of the approximate coefficient sum
    double schwarzian_c = 0.0; // Schwarzian coefficient per mode (fit parameter)
};

struct DynamicsOptions {
    int q = 4;
    double j = 1.0;
    contour::ContourSpec contour;     // beta/t filled per point
    saddle::SaddleOptions saddle;
    thermal::ThermalOptions thermal;
    double continuation_dt = 0.5;     // max t step when chaining saddle solves
};

// flags bits for SRECurvePoint
enum : unsigned {
    kSymConverged = 1u << 0,
    kSsbConverged = 1u << 1,
    kSymIsSymmetric = 1u << 2,  // symmetric branch classified symmetric
    kSsbIsSsb = 1u << 3,        // polarized branch classified ssb
    kBranchJump = 1u << 4,      // continuity check tripped on either branch
};

struct SRECurvePoint {
    double t = 0.0;
    double m2_symmetric = 0.0;
    double m2_ssb = 0.0;
    double m2_dominant = 0.0;
    double order_param = 0.0;  // dominant branch
    double lnz_sym = 0.0;
    double lnz_ssb = 0.0;
    unsigned flags = 0;
};

struct SRECurve {
    double beta = 0.0;
    double ln_z_beta_per_mode = 0.0;  // f(beta) from the thermal solver
    std::vector<SRECurvePoint> points;
};

// Eq.-(7)-style prediction: M2^(p)/N = 2 ln 2 - 4 (ln SFF_{b/2}(t)/N - f(beta)).
double predicted_m2(double beta, double t, int q, double j,
                    const thermal::ThermalOptions& topts = {});
std::vector<double> predicted_m2_sweep(double beta, const std::vector<double>& ts, int q, double j,
                                       const thermal::ThermalOptions& topts = {});

// Both saddle branches along a t grid with adiabatic continuation; the
// dominant value is the branch of larger ln Z_SRE (a view, both kept).
SRECurve m2_curve(double beta, const std::vector<double>& t_grid, const DynamicsOptions& opts);

struct TransitionResult {
    enum class Status { crossing_found, none_in_window, undetermined } status =
        Status::none_in_window;
    double t_star = 0.0;
    double resolution = 0.0;
    // branch actions at the window edges, for reporting when no crossing is found
    double lnz_sym_at_tmax = 0.0;
    double lnz_ssb_at_tmax = 0.0;
};

// Bisection on sign(lnZ_sym - lnZ_ssb); resolution 0.05/J.
TransitionResult find_transition(double beta, double t_min, double t_max,
                                 const DynamicsOptions& opts);

struct PhaseDiagramPoint {
    double beta_j = 0.0;
    double t_star_j = 0.0;
    std::string status;  // crossing-found | none-below-tmax | undetermined
};

struct PhaseDiagram {
    std::vector<PhaseDiagramPoint> points;
    bool fit_done = false;
    fitkit::FitResult boundary_fit;
};

PhaseDiagram phase_diagram(const std::vector<double>& beta_list, double t_max,
                           const DynamicsOptions& opts);

// M2(0) + (32 pi^2 C / beta J) 4t^2/(beta^2+4t^2) [+ 6 ln((beta^2+4t^2)/beta^2)];
// the logarithm is the non-extensive tail and can be excluded.
double schwarzian_m2p(double beta, double t, double m2_0, double c, double j = 1.0,
                      bool include_log = true);

}  // namespace srelab::dynamics
