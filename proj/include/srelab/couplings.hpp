#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace srelab {

struct ModelParams {
    int n_majorana = 8;       // N, number of left Majorana modes (even)
    int q = 4;                // interaction order (even, >= 4 for chaos)
    double j_coupling = 1.0;  // J
    std::uint64_t seed = 0;

    void validate() const;
};

// Antisymmetrized random couplings J_{i1<...<iq}. Tuples are stored in
// lexicographic order of the strictly increasing index sets; the draw order
// is part of the reproducibility contract.
struct CouplingTensor {
    int n = 0;
    int q = 0;
    std::vector<std::vector<int>> tuples;  // strictly increasing index sets, 0-based
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
};

std::uint64_t binomial(int n, int k);

// Gaussian couplings, mean 0, variance (q-1)! J^2 / N^{q-1}, deterministic in
// params.seed.
CouplingTensor sample_couplings(const ModelParams& params);

}  // namespace srelab
