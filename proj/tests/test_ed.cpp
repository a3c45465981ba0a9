#include <doctest.h>

#include <cmath>
#include <complex>

#include "srelab/ed.hpp"
#include "srelab/rng.hpp"

using namespace srelab;
using std::complex;

namespace {

constexpr double kLn2 = 0.69314718055994530942;

CouplingTensor single_coupling(double jprime) {
    CouplingTensor c;
    c.n = 4;
    c.q = 4;
    c.tuples = {{0, 1, 2, 3}};
    c.values = {jprime};
    return c;
}

// Closed form for the single-string model: H = (J'/4) P, U = cos - i sin P on
// EPR. A diagonal stabilizer anticommutes with P iff |v| is odd (support sizes
// 2|v| and 4, overlap |v|); each such stabilizer splits its weight into
// cos^2(2 theta) on itself and sin^2(2 theta) on a partner string.
double single_string_m2(double jprime, double t) {
    const double theta = jprime * t / 4.0;
    const double c2 = std::cos(2 * theta), s2 = std::sin(2 * theta);
    int commuting = 0, anticommuting = 0;
    for (std::uint32_t v = 0; v < 16; ++v)
        (__builtin_popcount(v) % 2 ? anticommuting : commuting)++;
    const double c4 = commuting + anticommuting * (std::pow(c2, 4) + std::pow(s2, 4));
    return -std::log(c4 / 16.0);
}

}  // namespace

TEST_CASE("majorana algebra: anticommutators and string properties") {
    const int n_qubits = 3;
    const std::int64_t d = 1 << n_qubits;
    for (int a = 0; a < 2 * n_qubits; ++a) {
        const Eigen::MatrixXcd ga = pauli_matrix(majorana_gamma(a), n_qubits);
        CHECK((ga - ga.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
        for (int b = a; b < 2 * n_qubits; ++b) {
            const Eigen::MatrixXcd gb = pauli_matrix(majorana_gamma(b), n_qubits);
            const Eigen::MatrixXcd anti = ga * gb + gb * ga;
            const Eigen::MatrixXcd expect =
                (a == b ? 2.0 : 0.0) * Eigen::MatrixXcd::Identity(d, d);
            CHECK((anti - expect).cwiseAbs().maxCoeff() < 1e-13);
        }
    }
}

TEST_CASE("majorana strings are hermitian and square to one") {
    const int n = 4;  // doubled register: 4 qubits
    GaussianSampler pick(99);
    for (int k = 0; k < 10; ++k) {
        ed::MajoranaString s{static_cast<std::uint32_t>(pick.uniform01() * 16),
                             static_cast<std::uint32_t>(pick.uniform01() * 16)};
        const Eigen::MatrixXcd m = pauli_matrix(ed::string_pauli(s, n), n);
        CHECK((m - m.adjoint()).cwiseAbs().maxCoeff() < 1e-13);
        CHECK((m * m - Eigen::MatrixXcd::Identity(16, 16)).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("hamiltonian: hermitian, traceless, single-coupling spectrum") {
    const double jp = 0.8;
    const CouplingTensor c = single_coupling(jp);

    const Eigen::MatrixXcd h = ed::build_hamiltonian(c, ed::Side::left);
    CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(std::abs(h.trace()) < 1e-13);

    // left factor: eigenvalues +-J'/4, each twice
    const ed::LeftSystem left(c);
    REQUIRE(left.eigenvalues().size() == 4);
    CHECK(left.eigenvalues()[0] == doctest::Approx(-jp / 4).epsilon(1e-12));
    CHECK(left.eigenvalues()[1] == doctest::Approx(-jp / 4).epsilon(1e-12));
    CHECK(left.eigenvalues()[2] == doctest::Approx(+jp / 4).epsilon(1e-12));
    CHECK(left.eigenvalues()[3] == doctest::Approx(+jp / 4).epsilon(1e-12));

    // anticommutators on the doubled register, mixed psi/xi
    for (int a : {0, 3, 4, 7}) {
        const Eigen::MatrixXcd ga = pauli_matrix(majorana_gamma(a), 4);
        for (int b : {1, 4, 6}) {
            const Eigen::MatrixXcd gb = pauli_matrix(majorana_gamma(b), 4);
            const Eigen::MatrixXcd anti = ga * gb + gb * ga;
            const double expect = a == b ? 2.0 : 0.0;
            CHECK((anti - expect * Eigen::MatrixXcd::Identity(16, 16)).cwiseAbs().maxCoeff() <
                  1e-13);
        }
    }
}

TEST_CASE("EPR state: defining conditions, stabilizer coefficients, zero magic") {
    ModelParams mp{6, 4, 1.0, 11};
    const CouplingTensor c = sample_couplings(mp);
    const ed::DoubledSystem sys(c);
    const int n = 6;
    const Eigen::VectorXcd& epr = sys.epr();

    for (int j = 0; j < n; ++j) {
        const Eigen::MatrixXcd gj = pauli_matrix(majorana_gamma(j), n);
        const Eigen::MatrixXcd gxj = pauli_matrix(majorana_gamma(n + j), n);
        const Eigen::VectorXcd v = (gj * epr + complex<double>(0, 1) * (gxj * epr)) / sqrt(2.0);
        CHECK(v.norm() < 1e-12);
    }

    // c_{v,v} * (-i)^n = 1 for every diagonal string; off-diagonal vanish
    const std::vector<double> diag = ed::diagonal_coefficients(epr, n);
    for (std::uint32_t v = 0; v < diag.size(); ++v) {
        const int ne = ed::MajoranaString{v, v}.phase_exponent();
        const double sign = (ne / 2) % 2 == 0 ? 1.0 : -1.0;  // i^n for even n
        CHECK(diag[v] * sign == doctest::Approx(1.0).epsilon(1e-10));
    }
    const ed::MajoranaSpectrum spec = ed::majorana_spectrum(epr, n);
    CHECK(spec.sum_c2 == doctest::Approx(std::pow(2.0, n)).epsilon(1e-9));
    CHECK(std::abs(ed::stabilizer_renyi(spec)) < 1e-10);
}

TEST_CASE("TFD: beta=0 is EPR, unit norm, thermal energy, Z byproduct") {
    ModelParams mp{6, 4, 1.0, 21};
    const CouplingTensor c = sample_couplings(mp);
    const ed::DoubledSystem sys(c);
    const ed::LeftSystem left(c);

    const Eigen::VectorXcd t0 = sys.tfd(0.0);
    CHECK((t0 - sys.epr()).norm() < 1e-12);

    double z = 0.0;
    const double beta = 1.7;
    const Eigen::VectorXcd tfd = sys.tfd(beta, &z);
    CHECK(std::abs(tfd.norm() - 1.0) < 1e-12);
    CHECK(z == doctest::Approx(std::real(left.partition({beta, 0}))).epsilon(1e-10));
    CHECK(sys.energy(tfd) == doctest::Approx(left.thermal_energy(beta)).epsilon(1e-10));
}

TEST_CASE("evolution: identity at t=0, group property, free invariance") {
    ModelParams mp{6, 4, 1.0, 31};
    const CouplingTensor c = sample_couplings(mp);
    const ed::DoubledSystem sys(c);
    const Eigen::VectorXcd tfd = sys.tfd(0.8);

    CHECK((sys.evolve(0.0, tfd) - tfd).norm() < 1e-12);
    const Eigen::VectorXcd a = sys.evolve(0.7, sys.evolve(0.6, tfd));
    const Eigen::VectorXcd b = sys.evolve(1.3, tfd);
    CHECK((a - b).norm() < 1e-10);
    CHECK(std::abs(sys.evolve(2.1, tfd).norm() - 1.0) < 1e-12);

    ModelParams free{6, 4, 0.0, 31};
    const ed::DoubledSystem fsys(sample_couplings(free));
    const Eigen::VectorXcd st = fsys.tfd(1.0);
    CHECK((fsys.evolve(3.0, st) - st).norm() < 1e-12);
}

TEST_CASE("majorana spectrum: normalization for a random state") {
    const int n = 2;
    GaussianSampler g(5);
    Eigen::VectorXcd psi(4);
    for (int k = 0; k < 4; ++k) psi[k] = complex<double>(g.gaussian(), g.gaussian());
    psi.normalize();
    const ed::MajoranaSpectrum spec = ed::majorana_spectrum(psi, n);
    CHECK(spec.sum_c2 == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("single-coupling model: M2(t) matches the rotation closed form") {
    const double jp = 1.0;
    const CouplingTensor c = single_coupling(jp);
    const ed::DoubledSystem sys(c);
    const Eigen::VectorXcd epr = sys.tfd(0.0);
    for (double t : {0.0, 0.3, 0.77, 1.9, 3.4, 6.28}) {
        const Eigen::VectorXcd st = sys.evolve(t, epr);
        const double m2 = ed::stabilizer_renyi(ed::majorana_spectrum(st, 4));
        CHECK(m2 == doctest::Approx(single_string_m2(jp, t)).epsilon(1e-9));
    }
}

TEST_CASE("free model has zero magic at all times") {
    ModelParams mp{4, 4, 0.0, 3};
    const ed::DoubledSystem sys(sample_couplings(mp));
    for (double beta : {0.0, 1.0, 4.0})
        for (double t : {0.0, 1.5, 10.0}) {
            const Eigen::VectorXcd st = sys.evolve(t, sys.tfd(beta));
            CHECK(std::abs(ed::stabilizer_renyi(ed::majorana_spectrum(st, 4))) < 1e-10);
        }
}

TEST_CASE("wightman representation equals the state expansion") {
    ModelParams mp{6, 4, 1.0, 41};
    const CouplingTensor c = sample_couplings(mp);
    const ed::DoubledSystem sys(c);
    const ed::LeftSystem left(c);
    const double beta = 1.2, t = 0.9;
    const Eigen::VectorXcd st = sys.evolve(t, sys.tfd(beta));
    const ed::MajoranaSpectrum spec = ed::majorana_spectrum(st, 6);

    // beta = t = 0 sanity on a diagonal and an off-diagonal pair
    const complex<double> w00 = left.wightman(0, 0, 5, 5);
    const int ne = ed::MajoranaString{5, 5}.phase_exponent();
    const double expect = (ne / 2) % 2 == 0 ? 1.0 : -1.0;
    CHECK(w00.real() == doctest::Approx(expect).epsilon(1e-12));
    CHECK(std::abs(left.wightman(0, 0, 5, 9)) < 1e-12);

    GaussianSampler pick(7);
    for (int k = 0; k < 40; ++k) {
        const auto vl = static_cast<std::uint32_t>(pick.uniform01() * 64);
        const auto vr = static_cast<std::uint32_t>(pick.uniform01() * 64);
        const complex<double> w = left.wightman(beta, t, vl, vr);
        const double cv = spec.coefficients[(static_cast<std::size_t>(vl) << 6) | vr];
        CHECK(std::abs(w.real() - cv) < 1e-10);
        CHECK(std::abs(w.imag()) < 1e-10);
    }
}

TEST_CASE("averaged diagonal coefficients reproduce the spectral ratio") {
    for (std::uint64_t seed : {1ULL, 2ULL}) {
        ModelParams mp{6, 4, 1.0, seed};
        const CouplingTensor c = sample_couplings(mp);
        const ed::DoubledSystem sys(c);
        const ed::LeftSystem left(c);
        for (double beta : {0.0, 1.0})
            for (double t : {0.0, 0.5, 2.0}) {
                const Eigen::VectorXcd st = sys.evolve(t, sys.tfd(beta));
                const std::vector<double> diag = ed::diagonal_coefficients(st, 6);
                double mean = 0.0;
                for (std::uint32_t v = 0; v < diag.size(); ++v) {
                    const int ne = ed::MajoranaString{v, v}.phase_exponent();
                    mean += ((ne / 2) % 2 == 0 ? 1.0 : -1.0) * diag[v];
                }
                mean /= static_cast<double>(diag.size());
                const double rhs = std::norm(left.partition({beta / 2, t})) /
                                   (std::real(left.partition({beta, 0})) * std::pow(2.0, 3));
                CHECK(std::abs(mean - rhs) < 1e-10);
            }
    }
}

TEST_CASE("exact SFF: t=0 value, two-level formula, plateau") {
    const double jp = 1.3, beta = 0.6;
    const ed::LeftSystem two_level(single_coupling(jp));
    CHECK(two_level.sff(beta, 0.0) ==
          doctest::Approx(std::pow(std::real(two_level.partition({beta, 0})), 2))
              .epsilon(1e-12));
    for (double t : {0.4, 2.2}) {
        const complex<double> x(beta, t);
        const complex<double> z =
            2.0 * std::exp(-x * jp / 4.0) + 2.0 * std::exp(x * jp / 4.0);
        CHECK(two_level.sff(beta, t) == doctest::Approx(std::norm(z)).epsilon(1e-10));
    }

    // nondegenerate spectrum: long-window average approaches Z(2 beta)
    ModelParams mp{8, 4, 1.0, 17};
    const ed::LeftSystem left(sample_couplings(mp));
    REQUIRE(!left.ground_state_degenerate());
    const double analytic = left.sff_time_average(beta);
    CHECK(analytic == doctest::Approx(std::real(left.partition({2 * beta, 0}))).epsilon(1e-9));
    double window = 0.0;
    const int samples = 4000;
    GaussianSampler g(1);
    for (int k = 0; k < samples; ++k) window += left.sff(beta, 3000.0 + 7000.0 * g.uniform01());
    window /= samples;
    CHECK(std::abs(window - analytic) / analytic < 0.25);
}

TEST_CASE("second Renyi entropy limits") {
    ModelParams mp{8, 4, 1.0, 17};
    const ed::LeftSystem left(sample_couplings(mp));
    CHECK(left.renyi2(0.0) == doctest::Approx(4 * kLn2).epsilon(1e-12));
    REQUIRE(!left.ground_state_degenerate());
    CHECK(left.renyi2(4000.0) < 1e-6);
}

TEST_CASE("M2(0) approaches 2 N ln2 - 4 S2(beta/2) as N grows") {
    const double beta = 1.0;
    auto mean_gap = [&](int n) {
        double acc = 0.0;
        const int reps = 5;
        for (int r = 0; r < reps; ++r) {
            ModelParams mp{n, 4, 1.0, substream_seed(100, static_cast<std::uint64_t>(r))};
            const CouplingTensor c = sample_couplings(mp);
            const ed::DoubledSystem sys(c);
            const ed::LeftSystem left(c);
            const double m2 =
                ed::stabilizer_renyi(ed::majorana_spectrum(sys.tfd(beta), n));
            const double pred = 2 * n * kLn2 - 4 * left.renyi2(beta / 2);
            acc += std::abs(m2 - pred) / n;
        }
        return acc / reps;
    };
    const double gap4 = mean_gap(4);
    const double gap8 = mean_gap(8);
    CHECK(gap8 < gap4);
}

TEST_CASE("memory guard rejects oversized registers") {
    Eigen::VectorXcd dummy(1 << 11);
    CHECK_THROWS_AS(ed::majorana_spectrum(dummy, 11), std::invalid_argument);
}
