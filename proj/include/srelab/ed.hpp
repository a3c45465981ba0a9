#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "srelab/couplings.hpp"
#include "srelab/pauli.hpp"

namespace srelab::ed {

enum class Side { left, right };

// Label of a Majorana string on the doubled system: bit j of v_left selects
// psi_{j+1}, bit j of v_right selects xi_{j+1}.
struct MajoranaString {
    std::uint32_t v_left = 0;
    std::uint32_t v_right = 0;

    int weight() const { return __builtin_popcount(v_left) + __builtin_popcount(v_right); }
    // n = (|v_L| + 1) |v_R|; always even for v_L = v_R
    int phase_exponent() const {
        return (__builtin_popcount(v_left) + 1) * __builtin_popcount(v_right);
    }
};

// Hermitian Pauli realization of the string, blocked mode ordering
// (psi_j = gamma_{j-1}/sqrt2, xi_j = gamma_{N+j-1}/sqrt2 on N qubits).
PauliOp string_pauli(const MajoranaString& s, int n_modes);

// Same construction restricted to one side on a register hosting n_modes
// Majoranas (used for the left system and for Hamiltonian assembly).
PauliOp side_string_pauli(std::uint32_t v, int gamma_offset);

// Dense SYK Hamiltonian on a register of n_qubits qubits; the interaction
// acts on Majoranas gamma_offset .. gamma_offset + N - 1.
Eigen::MatrixXcd build_hamiltonian_on(const CouplingTensor& c, int n_qubits, int gamma_offset);

// Hamiltonian on the doubled Hilbert space (dimension 2^N), acting on the
// chosen side's modes.
Eigen::MatrixXcd build_hamiltonian(const CouplingTensor& c, Side side);

// N-Majorana system on N/2 qubits. Source of spectral quantities: Z, SFF,
// Renyi-2, thermal energy, and the Wightman traces.
class LeftSystem {
  public:
    explicit LeftSystem(const CouplingTensor& c);

    int n_modes() const { return n_; }
    const Eigen::VectorXd& eigenvalues() const { return evals_; }

    cplx partition(cplx x) const;                 // tr e^{-xH}
    cplx log_partition(cplx x) const;             // ln tr e^{-xH}, overflow-shifted
    double free_energy_log(double beta) const;    // ln Z(beta)
    double sff(double beta, double t) const;      // |Z(beta+it)|^2
    double renyi2(double beta) const;             // -ln tr rho^2
    double thermal_energy(double beta) const;     // tr(H e^{-bH})/Z
    // long-time average of the SFF, exact double sum with degeneracy grouping
    double sff_time_average(double beta, double degeneracy_tol = 1e-10) const;
    bool ground_state_degenerate(double tol = 1e-10) const;

    // i^n tr(e^{-(b/2-it)H} Psi_{vL,0} e^{-(b/2+it)H} Psi_{vR,0}) / Z(b)
    cplx wightman(double beta, double t, std::uint32_t v_left, std::uint32_t v_right) const;

  private:
    int n_;
    Eigen::VectorXd evals_;
    Eigen::MatrixXcd evecs_;
};

// Doubled system (2N Majoranas on N qubits): EPR and TFD states, unitary
// evolution, Majorana spectrum enumeration.
class DoubledSystem {
  public:
    explicit DoubledSystem(const CouplingTensor& c);

    int n_modes() const { return n_; }
    std::int64_t dim() const { return 1LL << n_; }

    const Eigen::VectorXcd& epr() const { return epr_; }
    const Eigen::VectorXd& eigenvalues() const { return evals_; }

    // e^{-beta H/2}|EPR>, normalized; if z_out is given, receives
    // Z(beta) = 2^{N/2} * ||e^{-beta H/2}|EPR>||^2.
    Eigen::VectorXcd tfd(double beta, double* z_out = nullptr) const;
    Eigen::VectorXcd evolve(double t, const Eigen::VectorXcd& state) const;
    double energy(const Eigen::VectorXcd& state) const;

  private:
    int n_;
    Eigen::VectorXd evals_;
    Eigen::MatrixXcd evecs_;
    Eigen::VectorXcd epr_;
};

struct MajoranaSpectrum {
    int n_modes = 0;
    double sum_c2 = 0.0;       // should be 2^N
    double sum_c4 = 0.0;
    double max_abs_imag = 0.0; // largest imaginary part seen across all strings
    // full coefficient vector indexed by (v_left << N) | v_right; kept for N <= 8
    std::vector<double> coefficients;

    bool has_full_vector() const { return !coefficients.empty(); }
};

// Enumerates all 4^N strings. Stores the full vector for N <= 8, streams the
// power sums above that; rejects N > 10.
MajoranaSpectrum majorana_spectrum(const Eigen::VectorXcd& state, int n_modes);

// c_{v,v} for the 2^N diagonal strings only.
std::vector<double> diagonal_coefficients(const Eigen::VectorXcd& state, int n_modes);

// M2 = -ln(2^-N sum c^4)
double stabilizer_renyi(const MajoranaSpectrum& spectrum);

// Mean and standard error with a fixed reduction order (compensated sums).
struct MeanStderr {
    double mean = 0.0;
    double stderr_of_mean = 0.0;
};
MeanStderr mean_stderr(const std::vector<double>& values);

}  // namespace srelab::ed
