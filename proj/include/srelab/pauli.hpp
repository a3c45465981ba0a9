#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace srelab {

using cplx = std::complex<double>;

// Pauli operator in X^x Z^z normal form with an i^phase prefactor.
// Masks are bit vectors over qubits; phase is mod 4.
struct PauliOp {
    std::uint64_t x = 0;
    std::uint64_t z = 0;
    int phase = 0;  // operator = i^phase * X^x Z^z

    static PauliOp identity() { return PauliOp{}; }
};

inline int parity64(std::uint64_t v) { return __builtin_parityll(v); }

// Z^z1 X^x2 = (-1)^{|z1 & x2|} X^x2 Z^z1
inline PauliOp operator*(const PauliOp& a, const PauliOp& b) {
    PauliOp r;
    r.x = a.x ^ b.x;
    r.z = a.z ^ b.z;
    r.phase = (a.phase + b.phase + 2 * parity64(a.z & b.x)) & 3;
    return r;
}

inline cplx phase_value(int phase) {
    static const cplx table[4] = {cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)};
    return table[phase & 3];
}

// Jordan-Wigner Majorana string gamma_m on a register of n_qubits qubits,
// m in [0, 2*n_qubits). Normalization: gamma^2 = 1, {gamma_a, gamma_b} = 2 delta.
//   gamma_{2k}   = Z_0 ... Z_{k-1} X_k
//   gamma_{2k+1} = Z_0 ... Z_{k-1} Y_k = i X_k Z_{0..k}
inline PauliOp majorana_gamma(int m) {
    const int k = m >> 1;
    PauliOp p;
    p.x = 1ULL << k;
    if (m & 1) {
        p.z = (2ULL << k) - 1;
        p.phase = 1;
    } else {
        p.z = (1ULL << k) - 1;
        p.phase = 0;
    }
    return p;
}

// <state| P |state> for a dense state vector of dimension 2^n.
inline cplx pauli_expectation(const PauliOp& p, const Eigen::VectorXcd& state) {
    const std::int64_t dim = state.size();
    cplx acc(0, 0);
    for (std::int64_t b = 0; b < dim; ++b) {
        const double sgn = parity64(p.z & static_cast<std::uint64_t>(b)) ? -1.0 : 1.0;
        acc += std::conj(state[static_cast<std::int64_t>(b ^ static_cast<std::int64_t>(p.x))]) *
               (sgn * state[b]);
    }
    return phase_value(p.phase) * acc;
}

// Dense matrix of P on 2^n qubits (small registers only; used by tests and
// Hamiltonian assembly).
Eigen::MatrixXcd pauli_matrix(const PauliOp& p, int n_qubits);

// Adds coeff * P into a dense matrix in place.
void add_pauli(Eigen::MatrixXcd& h, const PauliOp& p, cplx coeff);

}  // namespace srelab
