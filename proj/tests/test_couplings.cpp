#include <doctest.h>

#include "srelab/couplings.hpp"
#include "srelab/rng.hpp"

using namespace srelab;

TEST_CASE("tuple count matches binomial") {
    ModelParams p4{4, 4, 1.0, 7};
    CHECK(sample_couplings(p4).size() == 1);
    ModelParams p8{8, 4, 1.0, 7};
    CHECK(sample_couplings(p8).size() == 70);
    CHECK(binomial(10, 4) == 210);
}

TEST_CASE("same seed gives identical tensors") {
    ModelParams p{8, 4, 1.0, 12345};
    const CouplingTensor a = sample_couplings(p);
    const CouplingTensor b = sample_couplings(p);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(a.values[k] == b.values[k]);

    p.seed = 54321;
    const CouplingTensor c = sample_couplings(p);
    bool differs = false;
    for (std::size_t k = 0; k < a.size(); ++k)
        if (a.values[k] != c.values[k]) differs = true;
    CHECK(differs);
}

TEST_CASE("sample mean and variance match the coupling distribution") {
    // N=4, q=4 has a single entry with variance 3 J^2 / 32
    const int n_seeds = 6000;
    double sum = 0.0, sum2 = 0.0;
    for (int s = 0; s < n_seeds; ++s) {
        ModelParams p{4, 4, 1.0, static_cast<std::uint64_t>(s)};
        const double v = sample_couplings(p).values[0];
        sum += v;
        sum2 += v * v;
    }
    const double mean = sum / n_seeds;
    const double var = sum2 / n_seeds - mean * mean;
    const double expected = 3.0 / 32.0;
    // 5-sigma tolerances
    CHECK(std::abs(mean) < 5.0 * std::sqrt(expected / n_seeds));
    CHECK(std::abs(var - expected) < 5.0 * expected * std::sqrt(2.0 / n_seeds));
}

TEST_CASE("parameter validation") {
    ModelParams bad{4, 6, 1.0, 0};  // q > N
    CHECK_THROWS_AS(sample_couplings(bad), std::invalid_argument);
    ModelParams odd{5, 4, 1.0, 0};
    CHECK_THROWS_AS(sample_couplings(odd), std::invalid_argument);
}

TEST_CASE("substream seeds differ") {
    CHECK(substream_seed(1, 0) != substream_seed(1, 1));
    CHECK(substream_seed(1, 0) != substream_seed(2, 0));
}
