#include "srelab/ed.hpp"

#include <cmath>
#include <stdexcept>

namespace srelab::ed {

namespace {

// i^{k(k-1)/2} exponent mod 4 for a Hermitian product of k distinct Majoranas
int hermitian_phase_exp(int k) { return (k * (k - 1) / 2) & 3; }

}  // namespace

PauliOp side_string_pauli(std::uint32_t v, int gamma_offset) {
    PauliOp p = PauliOp::identity();
    std::uint32_t m = v;
    // ascending index order
    while (m) {
        const int j = __builtin_ctz(m);
        p = p * majorana_gamma(gamma_offset + j);
        m &= m - 1;
    }
    return p;
}

PauliOp string_pauli(const MajoranaString& s, int n_modes) {
    PauliOp p = side_string_pauli(s.v_left, 0) * side_string_pauli(s.v_right, n_modes);
    p.phase = (p.phase + hermitian_phase_exp(s.weight())) & 3;
    return p;
}

Eigen::MatrixXcd build_hamiltonian_on(const CouplingTensor& c, int n_qubits, int gamma_offset) {
    const std::int64_t dim = 1LL << n_qubits;
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
    const int q = c.q;
    const int iphase = (q * (q - 1) / 2) & 3;
    const double norm = std::pow(0.5, q / 2.0);  // psi = gamma / sqrt2
    for (std::size_t k = 0; k < c.size(); ++k) {
        PauliOp p = PauliOp::identity();
        for (int idx : c.tuples[k]) p = p * majorana_gamma(gamma_offset + idx);
        p.phase = (p.phase + iphase) & 3;
        add_pauli(h, p, cplx(c.values[k] * norm, 0.0));
    }
    return h;
}

Eigen::MatrixXcd build_hamiltonian(const CouplingTensor& c, Side side) {
    return build_hamiltonian_on(c, c.n, side == Side::left ? 0 : c.n);
}

LeftSystem::LeftSystem(const CouplingTensor& c) : n_(c.n) {
    if (n_ % 2 != 0) throw std::invalid_argument("LeftSystem requires even N");
    Eigen::MatrixXcd h = build_hamiltonian_on(c, n_ / 2, 0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
    evals_ = solver.eigenvalues();
    evecs_ = solver.eigenvectors();
}

cplx LeftSystem::partition(cplx x) const {
    cplx z(0, 0);
    for (Eigen::Index k = 0; k < evals_.size(); ++k) z += std::exp(-x * evals_[k]);
    return z;
}

double LeftSystem::free_energy_log(double beta) const {
    return std::log(std::real(partition(cplx(beta, 0))));
}

double LeftSystem::sff(double beta, double t) const {
    return std::norm(partition(cplx(beta, t)));
}

double LeftSystem::renyi2(double beta) const {
    const double z1 = std::real(partition(cplx(beta, 0)));
    const double z2 = std::real(partition(cplx(2 * beta, 0)));
    return -std::log(z2 / (z1 * z1));
}

double LeftSystem::thermal_energy(double beta) const {
    double z = 0.0, e = 0.0;
    for (Eigen::Index k = 0; k < evals_.size(); ++k) {
        const double w = std::exp(-beta * evals_[k]);
        z += w;
        e += evals_[k] * w;
    }
    return e / z;
}

double LeftSystem::sff_time_average(double beta, double degeneracy_tol) const {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < evals_.size(); ++j)
        for (Eigen::Index k = 0; k < evals_.size(); ++k)
            if (std::abs(evals_[j] - evals_[k]) < degeneracy_tol)
                acc += std::exp(-beta * (evals_[j] + evals_[k]));
    return acc;
}

bool LeftSystem::ground_state_degenerate(double tol) const {
    return evals_.size() >= 2 && std::abs(evals_[1] - evals_[0]) < tol;
}

cplx LeftSystem::wightman(double beta, double t, std::uint32_t v_left,
                          std::uint32_t v_right) const {
    const int nq = n_ / 2;
    auto string_matrix = [&](std::uint32_t v) {
        PauliOp p = side_string_pauli(v, 0);
        p.phase = (p.phase + hermitian_phase_exp(__builtin_popcount(v))) & 3;
        return pauli_matrix(p, nq);
    };
    const Eigen::MatrixXcd a = evecs_.adjoint() * string_matrix(v_left) * evecs_;
    const Eigen::MatrixXcd b = evecs_.adjoint() * string_matrix(v_right) * evecs_;

    const cplx xa(beta / 2, -t);  // e^{-(beta/2 - it)H}
    const cplx xb(beta / 2, +t);
    const Eigen::Index d = evals_.size();
    Eigen::VectorXcd wa(d), wb(d);
    for (Eigen::Index k = 0; k < d; ++k) {
        wa[k] = std::exp(-xa * evals_[k]);
        wb[k] = std::exp(-xb * evals_[k]);
    }
    cplx tr(0, 0);
    for (Eigen::Index m = 0; m < d; ++m)
        for (Eigen::Index n = 0; n < d; ++n) tr += wa[m] * a(m, n) * wb[n] * b(n, m);

    const int n_exp = (__builtin_popcount(v_left) + 1) * __builtin_popcount(v_right);
    return phase_value(n_exp & 3) * tr / partition(cplx(beta, 0));
}

DoubledSystem::DoubledSystem(const CouplingTensor& c) : n_(c.n) {
    if (n_ > 10) throw std::invalid_argument("DoubledSystem limited to N <= 10");
    const std::int64_t d = dim();

    Eigen::MatrixXcd h = build_hamiltonian_on(c, n_, 0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> hsolver(h);
    evals_ = hsolver.eigenvalues();
    evecs_ = hsolver.eigenvectors();

    // EPR is the zero-eigenvalue ground state of sum_j (psi_j + i xi_j)^dag (psi_j + i xi_j)/2
    //   = sum_j (1 + i gamma_j gamma_{N+j})/2.
    Eigen::MatrixXcd num = Eigen::MatrixXcd::Zero(d, d);
    for (int j = 0; j < n_; ++j) {
        PauliOp p = majorana_gamma(j) * majorana_gamma(n_ + j);
        p.phase = (p.phase + 1) & 3;  // i * gamma gamma
        add_pauli(num, p, cplx(0.5, 0.0));
    }
    num += 0.5 * n_ * Eigen::MatrixXcd::Identity(d, d);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> nsolver(num);
    if (nsolver.eigenvalues()[0] > 1e-9)
        throw std::runtime_error("EPR construction: no zero mode of the number operator");
    if (nsolver.eigenvalues()[1] < 0.5)
        throw std::runtime_error("EPR construction: degenerate ground space");
    epr_ = nsolver.eigenvectors().col(0);
}

Eigen::VectorXcd DoubledSystem::tfd(double beta, double* z_out) const {
    Eigen::VectorXcd w = evecs_.adjoint() * epr_;
    for (Eigen::Index k = 0; k < evals_.size(); ++k) w[k] *= std::exp(-0.5 * beta * evals_[k]);
    Eigen::VectorXcd s = evecs_ * w;
    const double norm2 = s.squaredNorm();
    if (z_out) *z_out = norm2 * std::pow(2.0, n_ / 2.0);
    return s / std::sqrt(norm2);
}

Eigen::VectorXcd DoubledSystem::evolve(double t, const Eigen::VectorXcd& state) const {
    Eigen::VectorXcd w = evecs_.adjoint() * state;
    for (Eigen::Index k = 0; k < evals_.size(); ++k)
        w[k] *= std::exp(cplx(0, -t * evals_[k]));
    return evecs_ * w;
}

double DoubledSystem::energy(const Eigen::VectorXcd& state) const {
    Eigen::VectorXcd w = evecs_.adjoint() * state;
    double e = 0.0;
    for (Eigen::Index k = 0; k < evals_.size(); ++k) e += evals_[k] * std::norm(w[k]);
    return e;
}

namespace {

struct KahanSum {
    double sum = 0.0, comp = 0.0;
    void add(double v) {
        const double y = v - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

}  // namespace

MajoranaSpectrum majorana_spectrum(const Eigen::VectorXcd& state, int n_modes) {
    if (n_modes > 10) throw std::invalid_argument("majorana_spectrum limited to N <= 10");
    const std::uint32_t side = 1u << n_modes;
    const bool keep_full = n_modes <= 8;

    // prefix products over set bits, ascending order
    std::vector<PauliOp> left(side), right(side);
    left[0] = right[0] = PauliOp::identity();
    for (std::uint32_t m = 1; m < side; ++m) {
        const int b = __builtin_ctz(m);
        left[m] = majorana_gamma(b) * left[m ^ (1u << b)];
        right[m] = majorana_gamma(n_modes + b) * right[m ^ (1u << b)];
    }

    MajoranaSpectrum spec;
    spec.n_modes = n_modes;
    if (keep_full) spec.coefficients.resize(static_cast<std::size_t>(side) * side);

    KahanSum c2, c4;
    for (std::uint32_t vl = 0; vl < side; ++vl) {
        const int wl = __builtin_popcount(vl);
        for (std::uint32_t vr = 0; vr < side; ++vr) {
            PauliOp p = left[vl] * right[vr];
            const int vt = wl + __builtin_popcount(vr);
            p.phase = (p.phase + hermitian_phase_exp(vt)) & 3;
            const cplx c = pauli_expectation(p, state);
            spec.max_abs_imag = std::max(spec.max_abs_imag, std::abs(c.imag()));
            const double cr = c.real();
            c2.add(cr * cr);
            c4.add(cr * cr * cr * cr);
            if (keep_full)
                spec.coefficients[(static_cast<std::size_t>(vl) << n_modes) | vr] = cr;
        }
    }
    spec.sum_c2 = c2.sum;
    spec.sum_c4 = c4.sum;
    return spec;
}

std::vector<double> diagonal_coefficients(const Eigen::VectorXcd& state, int n_modes) {
    const std::uint32_t side = 1u << n_modes;
    std::vector<double> out(side);
    for (std::uint32_t v = 0; v < side; ++v) {
        MajoranaString s{v, v};
        const cplx c = pauli_expectation(string_pauli(s, n_modes), state);
        out[v] = c.real();
    }
    return out;
}

double stabilizer_renyi(const MajoranaSpectrum& spectrum) {
    return -std::log(spectrum.sum_c4 / std::pow(2.0, spectrum.n_modes));
}

MeanStderr mean_stderr(const std::vector<double>& values) {
    MeanStderr r;
    if (values.empty()) return r;
    KahanSum s;
    for (double v : values) s.add(v);
    r.mean = s.sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        KahanSum var;
        for (double v : values) var.add((v - r.mean) * (v - r.mean));
        r.stderr_of_mean = std::sqrt(var.sum / (static_cast<double>(values.size()) - 1.0) /
                                     static_cast<double>(values.size()));
    }
    return r;
}

}  // namespace srelab::ed
