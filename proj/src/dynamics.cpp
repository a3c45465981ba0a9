#include "srelab/dynamics.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace srelab::dynamics {

namespace {

using cplx = std::complex<double>;
constexpr double kLn2 = 0.69314718055994530942;
constexpr double kPi = 3.14159265358979323846;

// One saddle branch, continued adiabatically in t. The state is the last
// converged self-energy kernel (all solves share one grid size, so kernels
// carry over between neighboring t points).
struct Branch {
    saddle::SeedStrategy strategy;
    Eigen::MatrixXcd sigma;
    bool have_seed = false;
    double t = 0.0;
    bool jumped = false;
    double prev_action = 0.0;
    bool have_prev = false;
    saddle::SaddleSolution last;
};

saddle::SaddleSolution advance(Branch& br, double beta, double t_target,
                               const DynamicsOptions& opts) {
    const double dt = opts.continuation_dt;
    double t = br.have_seed ? br.t : 0.0;
    if (t_target < t) {
        // restart below the current position; drop the seed
        br.have_seed = false;
        t = 0.0;
    }
    do {
        t = br.have_seed ? std::min(t + dt, t_target) : std::min(dt, t_target);
        br.last = saddle::sre_solve(beta, t, opts.q, opts.j, opts.contour, br.strategy,
                                    opts.saddle, br.have_seed ? &br.sigma : nullptr);
        if (br.last.converged) {
            br.sigma = br.last.self_energy;
            br.have_seed = true;
        }
    } while (t < t_target);
    br.t = t_target;
    if (br.have_prev &&
        std::abs(br.last.action_per_mode - br.prev_action) > 0.2 + 0.1 * std::abs(br.prev_action))
        br.jumped = true;
    br.prev_action = br.last.action_per_mode;
    br.have_prev = true;
    return br.last;
}

}  // namespace

double predicted_m2(double beta, double t, int q, double j,
                    const thermal::ThermalOptions& topts) {
    if (beta == 0.0 && t == 0.0) return 0.0;
    if (beta == 0.0) throw std::invalid_argument("predicted_m2 requires beta > 0 when t > 0");
    const double sff = thermal::sff_slope(beta, t, q, j, topts);
    const double f_beta =
        thermal::thermal_solve(cplx(beta, 0), q, j, topts).ln_z_per_mode.real();
    return 2.0 * kLn2 - 4.0 * (sff - f_beta);
}

std::vector<double> predicted_m2_sweep(double beta, const std::vector<double>& ts, int q, double j,
                                       const thermal::ThermalOptions& topts) {
    if (!(beta > 0.0)) throw std::invalid_argument("predicted_m2_sweep requires beta > 0");
    const double f_beta =
        thermal::thermal_solve(cplx(beta, 0), q, j, topts).ln_z_per_mode.real();
    thermal::SffSweep sweep = thermal::sff_slope_sweep(beta, ts, q, j, topts);
    std::vector<double> out;
    out.reserve(ts.size());
    for (const auto& pt : sweep.points)
        out.push_back(2.0 * kLn2 - 4.0 * (pt.ln_sff_per_mode - f_beta));
    return out;
}

SRECurve m2_curve(double beta, const std::vector<double>& t_grid, const DynamicsOptions& opts) {
    SRECurve curve;
    curve.beta = beta;
    if (opts.j > 0.0 && beta > 0.0)
        curve.ln_z_beta_per_mode =
            thermal::thermal_solve(cplx(beta, 0), opts.q, opts.j, opts.thermal)
                .ln_z_per_mode.real();
    else
        curve.ln_z_beta_per_mode = 0.5 * kLn2;

    Branch sym{saddle::SeedStrategy::symmetric};
    Branch ssb{saddle::SeedStrategy::polarized};

    for (double t : t_grid) {
        const saddle::SaddleSolution s_sym = advance(sym, beta, t, opts);
        const saddle::SaddleSolution s_ssb = advance(ssb, beta, t, opts);

        SRECurvePoint pt;
        pt.t = t;
        pt.lnz_sym = s_sym.action_per_mode;
        pt.lnz_ssb = s_ssb.action_per_mode;
        pt.m2_symmetric = saddle::sre_value(s_sym, curve.ln_z_beta_per_mode);
        pt.m2_ssb = saddle::sre_value(s_ssb, curve.ln_z_beta_per_mode);
        const bool ssb_dominant = pt.lnz_ssb > pt.lnz_sym;
        pt.m2_dominant = ssb_dominant ? pt.m2_ssb : pt.m2_symmetric;
        pt.order_param = ssb_dominant ? s_ssb.order_parameter : s_sym.order_parameter;
        if (s_sym.converged) pt.flags |= kSymConverged;
        if (s_ssb.converged) pt.flags |= kSsbConverged;
        if (s_sym.saddle_class == saddle::SaddleClass::symmetric) pt.flags |= kSymIsSymmetric;
        if (s_ssb.saddle_class == saddle::SaddleClass::ssb) pt.flags |= kSsbIsSsb;
        if (sym.jumped || ssb.jumped) pt.flags |= kBranchJump;
        curve.points.push_back(pt);
    }
    return curve;
}

TransitionResult find_transition(double beta, double t_min, double t_max,
                                 const DynamicsOptions& opts) {
    if (!(t_max > t_min)) throw std::invalid_argument("find_transition: empty window");
    const double resolution = 0.05 / opts.j;

    Branch sym{saddle::SeedStrategy::symmetric};
    Branch ssb{saddle::SeedStrategy::polarized};

    TransitionResult out;
    const int n_coarse = 16;
    const double step = (t_max - t_min) / n_coarse;
    double t_lo = 0.0, d_lo = 0.0;
    bool have_lo = false, bracketed = false;
    double t_hi = 0.0;
    int valid_count = 0;

    Eigen::MatrixXcd sigma_sym_lo, sigma_ssb_lo;
    for (int i = 0; i <= n_coarse; ++i) {
        const double t = t_min + i * step;
        const saddle::SaddleSolution a = advance(sym, beta, t, opts);
        const saddle::SaddleSolution b = advance(ssb, beta, t, opts);
        out.lnz_sym_at_tmax = a.action_per_mode;
        out.lnz_ssb_at_tmax = b.action_per_mode;
        const bool valid = a.converged && b.converged &&
                           a.saddle_class == saddle::SaddleClass::symmetric &&
                           b.saddle_class == saddle::SaddleClass::ssb;
        if (!valid) continue;
        ++valid_count;
        const double d = a.action_per_mode - b.action_per_mode;
        if (have_lo && d_lo > 0.0 && d <= 0.0) {
            t_hi = t;
            bracketed = true;
            break;
        }
        t_lo = t;
        d_lo = d;
        have_lo = true;
        sigma_sym_lo = sym.sigma;
        sigma_ssb_lo = ssb.sigma;
    }
    if (valid_count == 0) {
        out.status = TransitionResult::Status::undetermined;
        return out;
    }
    if (!bracketed || !(d_lo > 0.0)) {
        out.status = TransitionResult::Status::none_in_window;
        return out;
    }

    // bisection with warm starts from the lower bracket edge
    while (t_hi - t_lo > resolution) {
        const double t_mid = 0.5 * (t_lo + t_hi);
        Branch sym_b{saddle::SeedStrategy::symmetric, sigma_sym_lo, true, t_lo};
        Branch ssb_b{saddle::SeedStrategy::polarized, sigma_ssb_lo, true, t_lo};
        const saddle::SaddleSolution a = advance(sym_b, beta, t_mid, opts);
        const saddle::SaddleSolution b = advance(ssb_b, beta, t_mid, opts);
        const double d = a.action_per_mode - b.action_per_mode;
        if (d > 0.0) {
            t_lo = t_mid;
            sigma_sym_lo = sym_b.sigma;
            sigma_ssb_lo = ssb_b.sigma;
        } else {
            t_hi = t_mid;
        }
    }
    out.status = TransitionResult::Status::crossing_found;
    out.t_star = 0.5 * (t_lo + t_hi);
    out.resolution = resolution;
    return out;
}

PhaseDiagram phase_diagram(const std::vector<double>& beta_list, double t_max,
                           const DynamicsOptions& opts) {
    PhaseDiagram pd;
    for (double beta : beta_list) {
        TransitionResult tr = find_transition(beta, 0.25 / opts.j, t_max, opts);
        PhaseDiagramPoint pt;
        pt.beta_j = beta * opts.j;
        switch (tr.status) {
            case TransitionResult::Status::crossing_found:
                pt.t_star_j = tr.t_star * opts.j;
                pt.status = "crossing-found";
                break;
            case TransitionResult::Status::none_in_window:
                pt.status = "none-below-tmax";
                break;
            case TransitionResult::Status::undetermined:
                pt.status = "undetermined";
                break;
        }
        pd.points.push_back(pt);
    }
    fitkit::Points xy;
    for (const auto& p : pd.points)
        if (p.status == "crossing-found") xy.push_back({p.t_star_j, p.beta_j});
    if (xy.size() >= 3) {
        pd.boundary_fit = fitkit::fit_boundary(xy, 1.0);
        pd.fit_done = true;
    }
    return pd;
}

double schwarzian_m2p(double beta, double t, double m2_0, double c, double j, bool include_log) {
    if (!(beta > 0.0)) throw std::invalid_argument("schwarzian_m2p requires beta > 0");
    const double denom = beta * beta + 4.0 * t * t;
    double v = m2_0 + (32.0 * kPi * kPi * c / (beta * j)) * (4.0 * t * t / denom);
    if (include_log) v += 6.0 * std::log(denom / (beta * beta));
    return v;
}

}  // namespace srelab::dynamics
