#include <doctest.h>

#include <complex>

#include "srelab/contour.hpp"

using namespace srelab;
using std::complex;

namespace {

// Independent determinant for small matrices: subset-DP over columns,
// O(2^M M), no elimination shared with the library path.
complex<double> dp_determinant(const Eigen::MatrixXcd& a) {
    const int n = static_cast<int>(a.rows());
    std::vector<complex<double>> f(std::size_t(1) << n, complex<double>(0, 0));
    f[0] = 1.0;
    for (std::uint32_t s = 1; s < (1u << n); ++s) {
        const int row = __builtin_popcount(s) - 1;
        complex<double> acc(0, 0);
        int pos = 0;
        for (int j = 0; j < n; ++j) {
            if (!(s >> j & 1)) continue;
            const double sgn = pos % 2 == 0 ? 1.0 : -1.0;
            acc += sgn * a(row, j) * f[s ^ (1u << j)];
            ++pos;
        }
        f[s] = acc;
    }
    return f[(1u << n) - 1];
}

}  // namespace

TEST_CASE("pure thermal circle") {
    contour::ContourSpec spec{2.0, 0.0, 4, 0};
    const contour::ContourGrid g = contour::build_contour(spec);
    CHECK(g.size() == 8);
    for (const auto& p : g.points) CHECK(p.branch != contour::Branch::forward);
    CHECK(g.arc_length() == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("spec validation") {
    CHECK_THROWS_AS(contour::build_contour({-1.0, 0.0, 4, 0}), std::invalid_argument);
    CHECK_THROWS_AS(contour::build_contour({1.0, -0.5, 4, 4}), std::invalid_argument);
    CHECK_THROWS_AS(contour::build_contour({0.0, 1.0, 1, 4}), std::invalid_argument);
    CHECK_THROWS_AS(contour::build_contour({1.0, 1.0, 4, 0}), std::invalid_argument);
    // beta = 0 with n_im = 2 degenerates to the real-time fold
    const contour::ContourGrid g = contour::build_contour({0.0, 1.0, 2, 8});
    CHECK(g.arc_length() == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("block mask counts branch-class pairs") {
    const contour::ContourGrid g = contour::build_contour({1.0, 1.0, 50, 50});
    CHECK(g.size() == 200);
    CHECK(g.block_mask.sum() == doctest::Approx(2.0 * 100 * 100));
    CHECK((g.block_mask - g.block_mask.transpose()).cwiseAbs().maxCoeff() == 0.0);
    for (int a = 0; a < g.size(); ++a) CHECK(g.block_mask(a, a) == 1.0);
}

TEST_CASE("arc-length completeness and branch factors") {
    const contour::ContourGrid g = contour::build_contour({1.3, 0.7, 37, 23});
    CHECK(std::abs(g.arc_length() - (1.3 + 2 * 0.7)) < 1e-12);
    for (const auto& p : g.points) {
        switch (p.branch) {
            case contour::Branch::forward:
                CHECK(p.f == complex<double>(0, -1));
                break;
            case contour::Branch::backward:
                CHECK(p.f == complex<double>(0, 1));
                break;
            default:
                CHECK(p.f == complex<double>(1, 0));
        }
    }
    // junction links: real-time tip and the wrap point
    CHECK(g.junction_indices[0] == 37 + 23 - 1);
    CHECK(g.junction_indices[1] == g.size() - 1);
}

TEST_CASE("derivative operator: antisymmetry and sigma locality") {
    const contour::ContourGrid g = contour::build_contour({1.0, 1.0, 6, 6});
    const auto dp = contour::derivative_operator(g, +1);
    const auto dm = contour::derivative_operator(g, -1);
    CHECK((dp.matrix + dp.matrix.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((dm.matrix + dm.matrix.transpose()).cwiseAbs().maxCoeff() < 1e-12);

    const Eigen::MatrixXcd diff = dp.matrix - dm.matrix;
    const int m = g.size();
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            const bool junction_link =
                (a == g.junction_indices[0] && b == (a + 1) % m) ||
                (b == g.junction_indices[0] && a == (b + 1) % m) ||
                (a == g.junction_indices[1] && b == (a + 1) % m) ||
                (b == g.junction_indices[1] && a == (b + 1) % m);
            if (!junction_link) CHECK(std::abs(diff(a, b)) == 0.0);
        }
    CHECK(diff.cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("derivative operator: invertible, determinant vs subset-DP") {
    for (int sigma : {+1, -1}) {
        const contour::ContourGrid g = contour::build_contour({1.0, 1.0, 3, 5});
        REQUIRE(g.size() == 16);
        const auto d = contour::derivative_operator(g, sigma);
        const complex<double> det_lu =
            Eigen::PartialPivLU<Eigen::MatrixXcd>(d.matrix).determinant();
        const complex<double> det_dp = dp_determinant(d.matrix);
        CHECK(std::abs(det_lu) > 1e-12);
        CHECK(std::abs(det_lu - det_dp) < 1e-9 * std::max(1.0, std::abs(det_dp)));
    }
    // thermal circle, both sigmas
    const contour::ContourGrid circ = contour::build_contour({2.0, 0.0, 6, 0});
    for (int sigma : {+1, -1}) {
        const auto d = contour::derivative_operator(circ, sigma);
        CHECK(std::abs(Eigen::PartialPivLU<Eigen::MatrixXcd>(d.matrix).determinant()) > 1e-12);
    }
}

TEST_CASE("free propagator kernel: sgn structure and junction gauge") {
    const contour::ContourGrid g = contour::build_contour({1.0, 0.5, 8, 4});
    const Eigen::MatrixXd gp = contour::free_propagator_kernel(g, +1);
    const Eigen::MatrixXd gm = contour::free_propagator_kernel(g, -1);
    const int m = g.size();
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            const double expect = a == b ? 0.0 : (a > b ? 0.5 : -0.5);
            CHECK(gp(a, b) == expect);
            const double chi = (g.on_u(a) ? 1.0 : -1.0) * (g.on_u(b) ? 1.0 : -1.0);
            CHECK(gm(a, b) == chi * expect);
        }
    // antiperiodic across the wrap: moving the first argument once around the
    // loop flips the sign, i.e. g(0+, b) = -g(0+ + L, b) = -"last" ordering
    CHECK(gp(0, m - 1) == -0.5);
    CHECK(gp(m - 1, 0) == 0.5);
}

// The antisymmetric nearest-neighbor stencil is bipartite on the even loop,
// so its inverse vanishes identically on even index separations and carries
// the physical propagator, doubled, on odd separations. The free-limit check
// is therefore parity-resolved: odd entries halved against (1/2) sgn, even
// entries zero, with linear refinement on nonuniform grids.
TEST_CASE("stencil inverse: parity-resolved free limit with linear refinement") {
    auto max_error = [](int n_im, int n_re) {
        const contour::ContourGrid g = contour::build_contour({1.0, 1.0, n_im, n_re});
        const auto d = contour::derivative_operator(g, +1);
        const Eigen::MatrixXcd inv = d.matrix.inverse();
        const Eigen::MatrixXd ref = contour::free_propagator_kernel(g, +1);
        const int m = g.size();
        double err = 0.0;
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) {
                const double sw = std::sqrt(g.points[a].weight * g.points[b].weight);
                const complex<double> kernel = inv(a, b) / sw;
                if ((a - b) % 2 == 0)
                    err = std::max(err, std::abs(kernel));
                else
                    err = std::max(err, std::abs(kernel / 2.0 - ref(a, b)));
            }
        return err;
    };
    const double e1 = max_error(8, 8);
    const double e2 = max_error(16, 16);
    const double e4 = max_error(32, 32);
    CHECK(e2 < 0.75 * e1);
    CHECK(e4 < 0.75 * e2);
}

TEST_CASE("hatted free propagator matches kernel with quadrature folding") {
    const contour::ContourGrid g = contour::build_contour({0.8, 0.3, 5, 3});
    const Eigen::MatrixXd hat = contour::free_propagator_hat(g, -1);
    const Eigen::MatrixXd ker = contour::free_propagator_kernel(g, -1);
    for (int a = 0; a < g.size(); ++a)
        for (int b = 0; b < g.size(); ++b) {
            const double sw = std::sqrt(g.points[a].weight * g.points[b].weight);
            CHECK(hat(a, b) == doctest::Approx(ker(a, b) * sw).epsilon(1e-14));
        }
    CHECK((hat + hat.transpose()).cwiseAbs().maxCoeff() < 1e-15);
}
