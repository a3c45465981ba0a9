#include "srelab/saddle.hpp"

#include <cmath>
#include <stdexcept>

namespace srelab::saddle {

namespace {

constexpr double kLn2 = 0.69314718055994530942;
constexpr double kPi = 3.14159265358979323846;

cplx logdet_from_lu(const Eigen::PartialPivLU<Eigen::MatrixXcd>& lu) {
    cplx acc(0, 0);
    const auto& u = lu.matrixLU();
    for (Eigen::Index k = 0; k < u.rows(); ++k) acc += std::log(u(k, k));
    if (lu.permutationP().determinant() < 0) acc += cplx(0, kPi);
    return acc;
}

double wrap_angle(double a) {
    while (a > kPi) a -= 2 * kPi;
    while (a < -kPi) a += 2 * kPi;
    return a;
}

struct Workspace {
    contour::ContourGrid grid;
    int m = 0;
    Eigen::MatrixXcd g0hat[2];   // sigma = +1, -1
    Eigen::VectorXd chi_minus;   // gauge map between the two free sectors
    Eigen::VectorXd sw;          // sqrt(w)
    Eigen::VectorXd inv_sw;      // 1/sqrt(w), 0 at degenerate points
    Eigen::VectorXcd f;          // branch factors
    Eigen::MatrixXd wprod;       // w_a w_b
    Eigen::MatrixXcd ffw;        // f_a f_b w_a w_b (for the interaction trace)

    explicit Workspace(const contour::ContourGrid& g) : grid(g), m(g.size()) {
        g0hat[0] = contour::free_propagator_hat(g, +1).cast<cplx>();
        g0hat[1] = contour::free_propagator_hat(g, -1).cast<cplx>();
        chi_minus.resize(m);
        sw.resize(m);
        inv_sw.resize(m);
        f.resize(m);
        for (int a = 0; a < m; ++a) {
            chi_minus[a] = grid.on_u(a) ? 1.0 : -1.0;
            const double w = grid.points[a].weight;
            sw[a] = std::sqrt(w);
            inv_sw[a] = w > 0.0 ? 1.0 / sw[a] : 0.0;
            f[a] = grid.points[a].f;
        }
        wprod.resize(m, m);
        ffw.resize(m, m);
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) {
                wprod(a, b) = grid.points[a].weight * grid.points[b].weight;
                ffw(a, b) = f[a] * f[b] * wprod(a, b);
            }
    }

    Eigen::MatrixXcd hat(const Eigen::MatrixXcd& kernel) const {
        return sw.cast<cplx>().asDiagonal() * kernel * sw.cast<cplx>().asDiagonal();
    }
    Eigen::MatrixXcd unhat(const Eigen::MatrixXcd& hatted) const {
        return inv_sw.cast<cplx>().asDiagonal() * hatted * inv_sw.cast<cplx>().asDiagonal();
    }

    // J^2 f f G^{q-1}, elementwise on kernel values
    Eigen::MatrixXcd self_energy_of(const Eigen::MatrixXcd& g_kernel, int q, double j) const {
        Eigen::MatrixXcd powm = g_kernel;
        for (int p = 1; p < q - 1; ++p) powm = powm.cwiseProduct(g_kernel);
        Eigen::MatrixXcd s(m, m);
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) s(a, b) = j * j * f[a] * f[b] * powm(a, b);
        return s;
    }
};

struct SectorSolve {
    Eigen::MatrixXcd ghat;
    cplx logdet;
    bool ok = true;
};

SectorSolve solve_sector(const Workspace& ws, const Eigen::MatrixXcd& sigma_hat, int sector) {
    SectorSolve out;
    const int m = ws.m;
    Eigen::MatrixXcd k(m, m);
    k.noalias() = -(ws.g0hat[sector] * sigma_hat);
    k.diagonal().array() += 1.0;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(k);
    out.logdet = logdet_from_lu(lu);
    out.ghat = lu.solve(ws.g0hat[sector]);
    out.ok = std::isfinite(out.logdet.real()) && out.ghat.allFinite();
    return out;
}

void sector_weights(cplx l_plus, cplx l_minus, double& w_plus, double& w_minus) {
    const double a = 2.0 * l_plus.real();
    const double b = 2.0 * l_minus.real();
    const double mx = std::max(a, b);
    const double ea = std::exp(a - mx), eb = std::exp(b - mx);
    w_plus = ea / (ea + eb);
    w_minus = eb / (ea + eb);
}

double action_from_parts(int q, double j, cplx l_plus, cplx l_minus,
                         const Eigen::MatrixXcd& sigma_kernel, const Eigen::MatrixXcd& g_kernel,
                         const Workspace& ws) {
    const double a = 2.0 * l_plus.real();
    const double b = 2.0 * l_minus.real();
    const double mx = std::max(a, b);
    const double lse = mx + std::log(std::exp(a - mx) + std::exp(b - mx));

    cplx sg(0, 0), gq(0, 0);
    const int m = ws.m;
    Eigen::MatrixXcd powq = g_kernel;
    for (int p = 1; p < q; ++p) powq = powq.cwiseProduct(g_kernel);
    for (int aidx = 0; aidx < m; ++aidx)
        for (int bidx = 0; bidx < m; ++bidx) {
            sg += ws.wprod(aidx, bidx) * sigma_kernel(aidx, bidx) * g_kernel(aidx, bidx);
            gq += ws.ffw(aidx, bidx) * powq(aidx, bidx);
        }
    return 3.0 * kLn2 + (lse - kLn2) - 2.0 * sg.real() + (2.0 * j * j / q) * gq.real();
}

SaddleClass classify(double order_param) {
    const double a = std::abs(order_param);
    if (a < 0.01) return SaddleClass::symmetric;
    if (a > 0.5) return SaddleClass::ssb;
    return SaddleClass::unconverged_class;
}

}  // namespace

double order_parameter(cplx logdet_plus, cplx logdet_minus) {
    return std::tanh(logdet_plus.real() - logdet_minus.real());
}

SaddleSolution sre_solve(double beta, double t, int q, double j,
                         const contour::ContourSpec& cspec, SeedStrategy strategy,
                         const SaddleOptions& opts, const Eigen::MatrixXcd* sigma_seed) {
    if (q < 2 || q % 2 != 0) throw std::invalid_argument("sre_solve requires even q >= 2");

    contour::ContourSpec spec = cspec;
    spec.beta = beta;
    spec.t = t;
    if (t == 0.0) spec.n_re = 0;
    spec.validate();

    if (beta == 0.0 && t == 0.0) {
        // degenerate contour: the state is the stabilizer EPR point, nothing to solve
        SaddleSolution sol;
        sol.grid = contour::build_contour(spec);
        sol.q = q;
        sol.j_coupling = j;
        const int m = sol.grid.size();
        sol.green = contour::free_propagator_kernel(sol.grid, +1)
                        .cwiseProduct(sol.grid.block_mask)
                        .cast<cplx>();
        sol.self_energy = Eigen::MatrixXcd::Zero(m, m);
        sol.sector_logdets = {cplx(0, 0), cplx(0, 0)};
        sol.weights = {0.5, 0.5};
        sol.order_parameter = 0.0;
        sol.action_per_mode = 3.0 * kLn2;
        sol.saddle_class = SaddleClass::symmetric;
        sol.converged = true;
        return sol;
    }

    Workspace ws(contour::build_contour(spec));
    const int m = ws.m;
    const bool symmetric = strategy == SeedStrategy::symmetric;

    Eigen::MatrixXcd sigma = Eigen::MatrixXcd::Zero(m, m);
    if (sigma_seed) {
        if (sigma_seed->rows() != m || sigma_seed->cols() != m)
            throw std::invalid_argument("sre_solve: sigma seed has wrong dimensions");
        sigma = *sigma_seed;
    }
    if (symmetric) sigma = sigma.cwiseProduct(ws.grid.block_mask.cast<cplx>());

    Eigen::MatrixXcd g_kernel = Eigen::MatrixXcd::Zero(m, m);
    cplx l_plus(0, 0), l_minus(0, 0);
    double w_plus = 0.5, w_minus = 0.5;

    double alpha = opts.damping;
    double res = 0.0, res_prev = -1.0;
    int rising = 0;
    bool converged = false;
    int it = 0;
    bool forced_plus = strategy == SeedStrategy::polarized && sigma_seed == nullptr;
    bool released = !forced_plus;

    for (it = 1; it <= opts.max_iter; ++it) {
        const Eigen::MatrixXcd sigma_hat = ws.hat(sigma);

        SectorSolve plus = solve_sector(ws, sigma_hat, 0);
        if (!plus.ok) break;
        l_plus = plus.logdet;

        Eigen::MatrixXcd ghat_new;
        if (symmetric) {
            // block Sigma makes the sectors gauge copies: L- = L+ and the
            // off-block parts of g+ and g- cancel in the weighted sum
            l_minus = l_plus;
            w_plus = w_minus = 0.5;
            ghat_new = plus.ghat.cwiseProduct(ws.grid.block_mask.cast<cplx>());
        } else if (forced_plus) {
            l_minus = l_plus;
            w_plus = 1.0;
            w_minus = 0.0;
            ghat_new = plus.ghat;
        } else {
            SectorSolve minus = solve_sector(ws, sigma_hat, 1);
            if (!minus.ok) break;
            l_minus = minus.logdet;
            sector_weights(l_plus, l_minus, w_plus, w_minus);
            ghat_new = w_plus * plus.ghat + w_minus * minus.ghat;
        }

        Eigen::MatrixXcd g_new = ws.unhat(ghat_new);
        g_new = 0.5 * (g_new - g_new.transpose().eval());  // exact antisymmetry

        res = (g_new - g_kernel).cwiseAbs().maxCoeff();
        g_kernel = g_new;
        if (res < opts.tol && it > 1) {
            if (forced_plus) {
                // conventional Keldysh pre-solve finished; release both sectors
                forced_plus = false;
                released = true;
                res_prev = -1.0;
                continue;
            }
            converged = true;
            break;
        }
        if (res_prev >= 0.0 && res > res_prev) {
            if (++rising >= 2) {
                alpha = std::max(alpha * 0.5, opts.damping_floor);
                rising = 0;
            }
        } else {
            rising = 0;
        }
        res_prev = res;

        Eigen::MatrixXcd sigma_new = ws.self_energy_of(g_kernel, q, j);
        if (symmetric) sigma_new = sigma_new.cwiseProduct(ws.grid.block_mask.cast<cplx>());
        sigma = (1.0 - alpha) * sigma + alpha * sigma_new;
    }

    SaddleSolution sol;
    sol.grid = ws.grid;
    sol.q = q;
    sol.j_coupling = j;
    sol.green = g_kernel;
    sol.self_energy = sigma;
    sol.sector_logdets = {l_plus, l_minus};
    sol.weights = {w_plus, w_minus};
    sol.order_parameter = w_plus - w_minus;
    sol.converged = converged && released;
    sol.iterations = it;
    sol.residual = res;
    sol.sector_phase_mismatch = std::abs(wrap_angle(2.0 * (l_plus.imag() - l_minus.imag())));
    sol.phase_warning = sol.sector_phase_mismatch > opts.phase_warn_rad &&
                        std::abs(l_plus.real() - l_minus.real()) < 20.0;
    sol.saddle_class = classify(sol.order_parameter);

    double offb = 0.0;
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            if (ws.grid.block_mask(a, b) == 0.0)
                offb = std::max(offb, std::abs(g_kernel(a, b)));
    sol.off_block_max = offb;

    sol.action_per_mode = action_from_parts(q, j, l_plus, l_minus, sigma, g_kernel, ws);
    return sol;
}

double evaluate_action(const SaddleSolution& sol) {
    Workspace ws(sol.grid);
    return action_from_parts(sol.q, sol.j_coupling, sol.sector_logdets[0], sol.sector_logdets[1],
                             sol.self_energy, sol.green, ws);
}

double sre_value(const SaddleSolution& sol, double ln_z_beta_per_mode) {
    return kLn2 - sol.action_per_mode + 4.0 * ln_z_beta_per_mode;
}

}  // namespace srelab::saddle
