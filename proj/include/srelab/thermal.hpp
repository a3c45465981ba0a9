#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace srelab::thermal {

using cplx = std::complex<double>;

struct ThermalOptions {
    int n_freq = 1 << 14;      // total Matsubara frequencies (power of two)
    double tol = 1e-12;        // max-norm of delta-G updates
    double damping = 0.5;      // initial mixing weight
    int max_iter = 200000;
    double min_freq_over_j = 50.0;  // window check: |w_max| >= this * J
    double continuation_dt = 0.25;  // adiabatic step for t sweeps
};

struct ThermalSolution {
    cplx beta_complex;
    int q = 4;
    double j_coupling = 1.0;
    // frequency representation over the symmetric window n = -n_max..n_max-1,
    // stored in FFT order (non-negative n first); w_n = 2 pi (n + 1/2) / beta
    Eigen::VectorXcd green;
    Eigen::VectorXcd self_energy;
    Eigen::VectorXcd green_delta;  // G - G_free, the iteration variable
    cplx ln_z_per_mode;            // f = ln Z / N, regularized against the free theory
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Damped fixed-point iteration of G(iw) = 1/(-iw - Sigma(iw)),
// Sigma(tau) = J^2 G(tau)^{q-1}, at complex inverse temperature.
// seed, if given, supplies the initial green_delta (adiabatic continuation).
ThermalSolution thermal_solve(cplx beta_complex, int q, double j, const ThermalOptions& opts = {},
                              const Eigen::VectorXcd* seed = nullptr);

struct SffPoint {
    double t = 0.0;
    cplx f;                  // f(beta/2 + i t)
    double ln_sff_per_mode;  // 2 Re f
    bool converged = false;
};

struct SffSweep {
    double beta = 0.0;
    std::vector<SffPoint> points;
    bool branch_lost = false;
    int branch_lost_index = -1;
};

// ln SFF_{beta/2}(t) per mode along a t grid, continued adiabatically in t
// (intermediate solves inserted so steps never exceed continuation_dt).
SffSweep sff_slope_sweep(double beta, const std::vector<double>& t_values, int q, double j,
                         const ThermalOptions& opts = {});

double sff_slope(double beta, double t, int q, double j, const ThermalOptions& opts = {});

}  // namespace srelab::thermal
