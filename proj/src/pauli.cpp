#include "srelab/pauli.hpp"

namespace srelab {

Eigen::MatrixXcd pauli_matrix(const PauliOp& p, int n_qubits) {
    const std::int64_t dim = 1LL << n_qubits;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    const cplx ph = phase_value(p.phase);
    for (std::int64_t b = 0; b < dim; ++b) {
        const double sgn = parity64(p.z & static_cast<std::uint64_t>(b)) ? -1.0 : 1.0;
        m(b ^ static_cast<std::int64_t>(p.x), b) += ph * sgn;
    }
    return m;
}

void add_pauli(Eigen::MatrixXcd& h, const PauliOp& p, cplx coeff) {
    const std::int64_t dim = h.rows();
    const cplx c = coeff * phase_value(p.phase);
    for (std::int64_t b = 0; b < dim; ++b) {
        const double sgn = parity64(p.z & static_cast<std::uint64_t>(b)) ? -1.0 : 1.0;
        h(b ^ static_cast<std::int64_t>(p.x), b) += c * sgn;
    }
}

}  // namespace srelab
