#pragma once

#include <array>
#include <complex>
#include <optional>

#include <Eigen/Dense>

#include "srelab/contour.hpp"

namespace srelab::saddle {

using cplx = std::complex<double>;

enum class SeedStrategy { symmetric, polarized };
enum class SaddleClass { symmetric, ssb, unconverged_class };

struct SaddleOptions {
    double tol = 1e-10;          // max-norm of G (kernel) updates
    double damping = 0.5;        // initial mixing weight, halved on oscillation
    double damping_floor = 0.05;
    int max_iter = 4000;
    double phase_warn_rad = 0.1;  // sector weight phase mismatch warning
};

// Converged contour solution. sector_logdets are stored relative to the free
// theory, L_sigma = logdet(I - G0_sigma Sigma-hat); the sigma-independent
// free-determinant offset cancels in weights and in the regularized action.
struct SaddleSolution {
    contour::ContourGrid grid;
    int q = 4;
    double j_coupling = 1.0;
    Eigen::MatrixXcd green;        // kernel values G(theta_a, theta_b), antisymmetric
    Eigen::MatrixXcd self_energy;  // kernel values Sigma(theta_a, theta_b)
    std::array<cplx, 2> sector_logdets{};  // [0] -> sigma=+1, [1] -> sigma=-1
    std::array<double, 2> weights{};       // w_sigma ~ exp(2 Re L_sigma), normalized
    double order_parameter = 0.0;          // sum_sigma sigma w_sigma
    double action_per_mode = 0.0;          // ln Z_SRE / N
    SaddleClass saddle_class = SaddleClass::symmetric;
    bool converged = false;
    int iterations = 0;
    double residual = 0.0;
    double sector_phase_mismatch = 0.0;  // |arg(e^{2(L+ - L-)})|
    double off_block_max = 0.0;          // max |G| outside the block mask
    bool phase_warning = false;
};

// Damped fixed-point iteration of the two-sector saddle equations
//   Sigma = J^2 f f G^{q-1},   g_s = (d - Sigma)^{-1},   G = sum_s w_s g_s,
// solved in the Dyson integral form g_s = (I - G0_s Sigma)^{-1} G0_s.
// strategy symmetric: Sigma projected on the block mask (kept exactly on the
// Z2-symmetric branch); polarized: forced sigma=+1 pre-solve (conventional
// Keldysh contour), then released to the weighted two-sector iteration.
// sigma_seed, when given, overrides the initial self-energy (adiabatic
// continuation between neighboring t points of equal grid size).
SaddleSolution sre_solve(double beta, double t, int q, double j,
                         const contour::ContourSpec& cspec, SeedStrategy strategy,
                         const SaddleOptions& opts = {},
                         const Eigen::MatrixXcd* sigma_seed = nullptr);

// Regularized on-shell action ln Z_SRE / N, recomputed from the stored fields:
// 3 ln 2 + ln(sum_sigma e^{2 L_sigma}) - ln 2 - 2 <Sigma,G> + (2 J^2/q) <ff,G^q>.
double evaluate_action(const SaddleSolution& sol);

// M2 / N = ln 2 - ln Z_SRE / N + 4 f(beta)
double sre_value(const SaddleSolution& sol, double ln_z_beta_per_mode);

// (w+ - w-) / (w+ + w-) with w_sigma = exp(2 Re L_sigma)
double order_parameter(cplx logdet_plus, cplx logdet_minus);

}  // namespace srelab::saddle
