#include "srelab/contour.hpp"

#include <cmath>
#include <stdexcept>

namespace srelab::contour {

void ContourSpec::validate() const {
    if (!(beta >= 0.0)) throw std::invalid_argument("contour.beta must be >= 0");
    if (!(t >= 0.0)) throw std::invalid_argument("contour.t must be >= 0");
    if (n_im < 2) throw std::invalid_argument("contour.n_im must be >= 2");
    if (t > 0.0 && n_re < 2)
        throw std::invalid_argument("contour.n_re must be >= 2 when t > 0");
    if (t == 0.0 && n_re != 0 && n_re < 2)
        throw std::invalid_argument("contour.n_re must be 0 or >= 2 when t = 0");
}

double ContourGrid::arc_length() const {
    double l = 0.0;
    for (const auto& p : points) l += p.weight;
    return l;
}

ContourGrid build_contour(const ContourSpec& spec) {
    spec.validate();
    const cplx i1(0, 1);
    const double half_beta = spec.beta / 2;
    const double h_im = half_beta / spec.n_im;
    const double h_re = spec.n_re > 0 ? spec.t / spec.n_re : 0.0;

    ContourGrid grid;
    grid.spec = spec;
    grid.points.reserve(spec.total_points());

    for (int k = 0; k < spec.n_im; ++k)
        grid.points.push_back({cplx((k + 0.5) * h_im, 0), Branch::imaginary_u, h_im, cplx(1, 0)});
    for (int k = 0; k < spec.n_re; ++k)
        grid.points.push_back(
            {half_beta + i1 * ((k + 0.5) * h_re), Branch::forward, h_re, cplx(0, -1)});
    for (int k = 0; k < spec.n_re; ++k)
        grid.points.push_back(
            {half_beta + i1 * (spec.t - (k + 0.5) * h_re), Branch::backward, h_re, cplx(0, 1)});
    for (int k = 0; k < spec.n_im; ++k)
        grid.points.push_back(
            {half_beta + (k + 0.5) * h_im, Branch::imaginary_l, h_im, cplx(1, 0)});

    const int m = grid.size();
    grid.junction_indices = {spec.n_im + spec.n_re - 1, m - 1};

    grid.block_mask = Eigen::MatrixXd::Zero(m, m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            if (grid.on_u(a) == grid.on_u(b)) grid.block_mask(a, b) = 1.0;
    return grid;
}

DerivativeOperator derivative_operator(const ContourGrid& grid, int sigma) {
    if (sigma != 1 && sigma != -1) throw std::invalid_argument("sigma must be +1 or -1");
    const int m = grid.size();
    DerivativeOperator d;
    d.sigma = sigma;
    d.matrix = Eigen::MatrixXcd::Zero(m, m);
    for (int a = 0; a < m; ++a) {
        const int b = (a + 1) % m;
        double phase = 1.0;
        if (a == grid.junction_indices[0]) phase = sigma;
        if (a == grid.junction_indices[1]) phase = -sigma;  // junction and fermionic wrap
        double dw = grid.points[a].weight + grid.points[b].weight;
        if (dw <= 0.0) dw = 1.0;  // degenerate beta = 0 imaginary points
        const cplx hop = phase / dw;
        d.matrix(a, b) += hop;
        d.matrix(b, a) -= hop;
    }
    return d;
}

namespace {

// chi gauge: +1 on u, sigma on l; maps the sigma-twisted loop to the plain
// antiperiodic one.
Eigen::VectorXd chi_vector(const ContourGrid& grid, int sigma) {
    Eigen::VectorXd chi(grid.size());
    for (int a = 0; a < grid.size(); ++a) chi[a] = grid.on_u(a) ? 1.0 : sigma;
    return chi;
}

}  // namespace

Eigen::MatrixXd free_propagator_kernel(const ContourGrid& grid, int sigma) {
    if (sigma != 1 && sigma != -1) throw std::invalid_argument("sigma must be +1 or -1");
    const int m = grid.size();
    const Eigen::VectorXd chi = chi_vector(grid, sigma);
    Eigen::MatrixXd g(m, m);
    for (int a = 0; a < m; ++a) {
        g(a, a) = 0.0;
        for (int b = 0; b < a; ++b) {
            const double v = 0.5 * chi[a] * chi[b];
            g(a, b) = v;
            g(b, a) = -v;
        }
    }
    return g;
}

Eigen::MatrixXd free_propagator_hat(const ContourGrid& grid, int sigma) {
    Eigen::MatrixXd g = free_propagator_kernel(grid, sigma);
    const int m = grid.size();
    Eigen::VectorXd sw(m);
    for (int a = 0; a < m; ++a) sw[a] = std::sqrt(grid.points[a].weight);
    return sw.asDiagonal() * g * sw.asDiagonal();
}

}  // namespace srelab::contour
