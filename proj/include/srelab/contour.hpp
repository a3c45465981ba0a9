#pragma once

#include <array>
#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace srelab::contour {

using cplx = std::complex<double>;

enum class Branch { imaginary_u, forward, backward, imaginary_l };

struct ContourSpec {
    double beta = 1.0;  // units 1/J
    double t = 0.0;     // units 1/J
    int n_im = 200;     // points per imaginary segment (two segments, beta/2 each)
    int n_re = 200;     // points per real segment (two segments, t each)

    void validate() const;
    int total_points() const { return 2 * n_im + 2 * n_re; }
};

struct ContourPoint {
    cplx theta;     // complex position; evolution operator is e^{-theta H}
    Branch branch;
    double weight;  // arc-length step (midpoint rule)
    cplx f;         // branch factor: 1 imaginary, -i forward, +i backward
};

// Discretized closed loop: imaginary-u (beta/2) -> forward (t) -> backward (t)
// -> imaginary-l (beta/2) -> wrap. Points sit at sub-interval midpoints so
// tags, branch factors and the propagator's jump loci are single-valued.
struct ContourGrid {
    ContourSpec spec;
    std::vector<ContourPoint> points;
    // Indices a such that the directed link a -> (a+1 mod M) crosses a u-l
    // junction: {last forward point (real-time tip), last point (wrap)}.
    std::array<int, 2> junction_indices{};
    // P(a,b) = 1 iff a and b are both on the u class {imaginary-u, forward}
    // or both on the l class {backward, imaginary-l}.
    Eigen::MatrixXd block_mask;

    int size() const { return static_cast<int>(points.size()); }
    bool on_u(int a) const {
        const Branch b = points[a].branch;
        return b == Branch::imaginary_u || b == Branch::forward;
    }
    double arc_length() const;
};

ContourGrid build_contour(const ContourSpec& spec);

// Antisymmetrized nearest-neighbor first-derivative stencil on the loop.
// Hopping across the two u-l junction links carries sigma; the wrap link
// carries an extra fermionic -1. Entries are +-1/(w_a + w_b).
struct DerivativeOperator {
    int sigma = +1;
    Eigen::MatrixXcd matrix;
};

DerivativeOperator derivative_operator(const ContourGrid& grid, int sigma);

// Exact free contour propagator for junction sector sigma, as a weighted
// ("hatted") matrix: G0[a][b] = sqrt(w_a w_b) * chi_a chi_b * (1/2) sgn(a-b),
// chi = 1 on u and sigma on l, zero diagonal (jump midpoint). Operator
// products against other hatted kernels are then plain matrix products.
Eigen::MatrixXd free_propagator_hat(const ContourGrid& grid, int sigma);

// Unweighted kernel values g0(theta_a, theta_b) for tests and seeding.
Eigen::MatrixXd free_propagator_kernel(const ContourGrid& grid, int sigma);

}  // namespace srelab::contour
