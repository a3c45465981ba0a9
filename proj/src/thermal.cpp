#include "srelab/thermal.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <stdexcept>

namespace srelab::thermal {

namespace {

std::mutex fftw_planner_mutex;  // FFTW planning is not thread-safe; execution is

// Paired FFT workspace for one solve. Maps between Matsubara coefficients
// X_n (FFT index order) and samples X(s_j), s_j = j/M, via
//   X(s_j) = (1/beta) e^{-i pi j / M} sum_n X_n e^{-2 pi i n j / M}
//   X_n    = (beta/M) sum_j X(s_j) e^{+i pi j / M} e^{+2 pi i n j / M}
class MatsubaraTransform {
  public:
    explicit MatsubaraTransform(int m) : m_(m), buf_(m) {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex);
        auto* p = reinterpret_cast<fftw_complex*>(buf_.data());
        fwd_ = fftw_plan_dft_1d(m_, p, p, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_1d(m_, p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~MatsubaraTransform() {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex);
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
    }
    MatsubaraTransform(const MatsubaraTransform&) = delete;
    MatsubaraTransform& operator=(const MatsubaraTransform&) = delete;

    void to_time(const Eigen::VectorXcd& freq, Eigen::VectorXcd& time, cplx beta) {
        for (int j = 0; j < m_; ++j) buf_[j] = freq[j];
        fftw_execute(fwd_);
        const double pi = 3.14159265358979323846;
        for (int j = 0; j < m_; ++j)
            time[j] = buf_[j] * std::exp(cplx(0, -pi * j / m_)) / beta;
    }

    void to_freq(const Eigen::VectorXcd& time, Eigen::VectorXcd& freq, cplx beta) {
        const double pi = 3.14159265358979323846;
        for (int j = 0; j < m_; ++j) buf_[j] = time[j] * std::exp(cplx(0, pi * j / m_));
        fftw_execute(bwd_);
        const cplx scale = beta / static_cast<double>(m_);
        for (int j = 0; j < m_; ++j) freq[j] = buf_[j] * scale;
    }

  private:
    int m_;
    std::vector<cplx> buf_;
    fftw_plan fwd_;
    fftw_plan bwd_;
};

// w_n for FFT index k (n = k for k < M/2, n = k - M otherwise)
inline cplx omega(int k, int m, cplx beta) {
    const int n = k < m / 2 ? k : k - m;
    const double pi = 3.14159265358979323846;
    return 2.0 * pi * (n + 0.5) / beta;
}

// trigamma, asymptotic branch (arguments here are >= few thousand)
double trigamma_large(double x) {
    const double ix = 1.0 / x;
    return ix + 0.5 * ix * ix +
           ix * ix * ix * (1.0 / 6.0 - ix * ix * (1.0 / 30.0 - ix * ix / 42.0));
}

cplx integer_pow(cplx z, int p) {
    cplx r(1, 0);
    for (int i = 0; i < p; ++i) r *= z;
    return r;
}

}  // namespace

ThermalSolution thermal_solve(cplx beta_complex, int q, double j, const ThermalOptions& opts,
                              const Eigen::VectorXcd* seed) {
    if (!(beta_complex.real() > 0.0))
        throw std::invalid_argument("thermal_solve requires Re(beta) > 0");
    if (q < 2 || q % 2 != 0) throw std::invalid_argument("thermal_solve requires even q >= 2");
    const int m = opts.n_freq;
    if (m < 4 || (m & (m - 1)) != 0)
        throw std::invalid_argument("thermal_solve: n_freq must be a power of two >= 4");

    const double w_max = std::abs(omega(m / 2 - 1, m, beta_complex));
    if (j > 0.0 && w_max < opts.min_freq_over_j * j)
        throw std::runtime_error("thermal_solve: frequency-window underflow (raise n_freq)");

    ThermalSolution sol;
    sol.beta_complex = beta_complex;
    sol.q = q;
    sol.j_coupling = j;

    Eigen::VectorXcd dg = Eigen::VectorXcd::Zero(m);
    if (seed && seed->size() == m) dg = *seed;

    Eigen::VectorXcd dg_time(m), sigma_time(m), dsig_freq(m), sigma(m), dg_new(m);
    MatsubaraTransform fft(m);

    const double sgn_const = j * j * std::pow(0.5, q - 1);  // Sigma(0+) for G = 1/2 sgn
    double alpha = opts.damping;
    double res = 0.0, res_prev = -1.0;
    int rising = 0;
    bool converged = false;
    int it = 0;

    for (it = 1; it <= opts.max_iter; ++it) {
        fft.to_time(dg, dg_time, beta_complex);
        // Sigma(s) = J^2 (1/2 + dG)^{q-1}; split off the sgn-like constant part
        for (int k = 0; k < m; ++k)
            sigma_time[k] = j * j * integer_pow(0.5 + dg_time[k], q - 1) - sgn_const;
        fft.to_freq(sigma_time, dsig_freq, beta_complex);
        for (int k = 0; k < m; ++k) {
            const cplx iw = cplx(0, 1) * omega(k, m, beta_complex);
            sigma[k] = dsig_freq[k] - 2.0 * sgn_const / iw;
            dg_new[k] = 1.0 / (-iw - sigma[k]) + 1.0 / iw;
        }

        res = 0.0;
        for (int k = 0; k < m; ++k) res = std::max(res, std::abs(dg_new[k] - dg[k]));
        if (res < opts.tol) {
            dg = dg_new;
            converged = true;
            break;
        }
        if (res_prev >= 0.0 && res > res_prev) {
            if (++rising >= 3) {
                alpha = std::max(alpha * 0.5, 0.02);
                rising = 0;
            }
        } else {
            rising = 0;
        }
        res_prev = res;
        dg = (1.0 - alpha) * dg + alpha * dg_new;
    }

    sol.green_delta = dg;
    sol.green.resize(m);
    sol.self_energy.resize(m);
    fft.to_time(dg, dg_time, beta_complex);
    for (int k = 0; k < m; ++k)
        sigma_time[k] = j * j * integer_pow(0.5 + dg_time[k], q - 1) - sgn_const;
    fft.to_freq(sigma_time, dsig_freq, beta_complex);
    for (int k = 0; k < m; ++k) {
        const cplx iw = cplx(0, 1) * omega(k, m, beta_complex);
        sol.self_energy[k] = dsig_freq[k] - 2.0 * sgn_const / iw;
        sol.green[k] = 1.0 / (-iw - sol.self_energy[k]);
    }
    sol.residual = res;
    sol.iterations = it;
    sol.converged = converged;

    // f = (1/2) ln 2 + sum_n [ (1/2) ln((-iw - Sigma)/(-iw)) - ((q-1)/2q) Sigma_n G_{-n-1} ]
    // plus a trigamma tail for the truncated 1/w^2 decay. Partner index of n
    // in FFT order is M-1-n.
    cplx acc(0, 0);
    const double int_coef = (q - 1.0) / (2.0 * q);
    for (int k = 0; k < m; ++k) {
        const cplx iw = cplx(0, 1) * omega(k, m, beta_complex);
        const cplx lg = std::log((-iw - sol.self_energy[k]) / (-iw));
        acc += 0.5 * lg - int_coef * sol.self_energy[k] * sol.green[m - 1 - k];
    }
    // tail coefficient a = iw * Sigma measured near the cutoff, paired +-
    cplx a_sum(0, 0);
    int count = 0;
    for (int k = (9 * (m / 2)) / 10; k < m / 2; ++k) {
        const cplx iw = cplx(0, 1) * omega(k, m, beta_complex);
        const cplx iwp = cplx(0, 1) * omega(m - 1 - k, m, beta_complex);
        a_sum += iw * sol.self_energy[k] + iwp * sol.self_energy[m - 1 - k];
        ++count;
    }
    if (count > 0) {
        const cplx a_bar = a_sum / static_cast<double>(count);
        const double pi = 3.14159265358979323846;
        const cplx pref = beta_complex / (2.0 * pi);
        acc += -(a_bar / (2.0 * q)) * pref * pref * trigamma_large(m / 2 + 0.5);
    }
    sol.ln_z_per_mode = 0.5 * std::log(2.0) + acc;
    return sol;
}

SffSweep sff_slope_sweep(double beta, const std::vector<double>& t_values, int q, double j,
                         const ThermalOptions& opts) {
    if (!(beta > 0.0)) throw std::invalid_argument("sff_slope_sweep requires beta > 0");
    SffSweep sweep;
    sweep.beta = beta;

    const cplx half_beta(beta / 2, 0);
    ThermalSolution sol = thermal_solve(half_beta, q, j, opts);
    Eigen::VectorXcd seed = sol.green_delta;

    double t_cur = 0.0;
    cplx f_prev = sol.ln_z_per_mode;
    for (std::size_t i = 0; i < t_values.size(); ++i) {
        const double t_target = t_values[i];
        if (t_target < t_cur)
            throw std::invalid_argument("sff_slope_sweep: t grid must be nondecreasing");
        while (t_cur < t_target) {
            t_cur = std::min(t_cur + opts.continuation_dt, t_target);
            sol = thermal_solve(half_beta + cplx(0, t_cur), q, j, opts, &seed);
            seed = sol.green_delta;
        }
        SffPoint pt;
        pt.t = t_target;
        pt.f = sol.ln_z_per_mode;
        pt.ln_sff_per_mode = 2.0 * sol.ln_z_per_mode.real();
        pt.converged = sol.converged;
        // branch loss shows up as a jump in f between adjacent continuation steps
        if (!sweep.branch_lost &&
            (std::abs(pt.f - f_prev) > 0.5 + 0.5 * std::abs(f_prev) || !pt.converged)) {
            sweep.branch_lost = true;
            sweep.branch_lost_index = static_cast<int>(i);
        }
        f_prev = pt.f;
        sweep.points.push_back(pt);
    }
    return sweep;
}

double sff_slope(double beta, double t, int q, double j, const ThermalOptions& opts) {
    if (t == 0.0 && beta == 0.0) return std::log(2.0);  // free-point normalization
    SffSweep s = sff_slope_sweep(beta, {t}, q, j, opts);
    return s.points.back().ln_sff_per_mode;
}

}  // namespace srelab::thermal
