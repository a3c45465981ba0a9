#include "srelab/couplings.hpp"

#include <cmath>

#include "srelab/rng.hpp"

namespace srelab {

void ModelParams::validate() const {
    if (n_majorana < 2 || n_majorana % 2 != 0)
        throw std::invalid_argument("model.n_majorana must be even and >= 2");
    if (q < 2 || q % 2 != 0) throw std::invalid_argument("model.q must be even and >= 2");
    if (q > n_majorana) throw std::invalid_argument("model.q must not exceed n_majorana");
    if (!(j_coupling >= 0.0)) throw std::invalid_argument("model.j_coupling must be >= 0");
}

std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / i;
    return r;
}

CouplingTensor sample_couplings(const ModelParams& params) {
    params.validate();
    const int n = params.n_majorana;
    const int q = params.q;

    double fact = 1.0;
    for (int i = 2; i <= q - 1; ++i) fact *= i;
    const double variance =
        fact * params.j_coupling * params.j_coupling / std::pow(static_cast<double>(n), q - 1);
    const double sigma = std::sqrt(variance);

    CouplingTensor t;
    t.n = n;
    t.q = q;
    t.tuples.reserve(binomial(n, q));
    t.values.reserve(t.tuples.capacity());

    GaussianSampler rng(params.seed);

    std::vector<int> idx(q);
    for (int i = 0; i < q; ++i) idx[i] = i;
    while (true) {
        t.tuples.push_back(idx);
        t.values.push_back(sigma * rng.gaussian());
        // next lexicographic combination
        int pos = q - 1;
        while (pos >= 0 && idx[pos] == n - q + pos) --pos;
        if (pos < 0) break;
        ++idx[pos];
        for (int i = pos + 1; i < q; ++i) idx[i] = idx[i - 1] + 1;
    }
    return t;
}

}  // namespace srelab
