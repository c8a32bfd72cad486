#include "doctest.h"

#include <cmath>

#include "toriclab/disorder.hpp"
#include "toriclab/errors.hpp"

using namespace toriclab;

TEST_CASE("bipartite limits and concentration") {
    auto lat = build_torus(4);
    auto all_plus = sample_bipartite(lat, 0.0, 0.7, 11);
    for (double v : all_plus.values) CHECK(v == 0.7);
    auto all_minus = sample_bipartite(lat, 1.0, 0.7, 11);
    for (double v : all_minus.values) CHECK(v == -0.7);

    CHECK_THROWS_AS(sample_bipartite(lat, -0.1, 1.0, 1), InvalidParameterError);
    CHECK_THROWS_AS(sample_bipartite(lat, 1.1, 1.0, 1), InvalidParameterError);

    // 5-sigma binomial bound on the antiferromagnetic fraction at L=32
    auto big = build_torus(32);
    auto r = sample_bipartite(big, 0.5, 1.0, 20250101);
    double n = big.n_bonds();
    double sigma = std::sqrt(0.25 / n);
    CHECK(std::abs(r.empirical_fraction - 0.5) < 5 * sigma);
}

TEST_CASE("diluted limits and concentration") {
    auto lat = build_torus(16);
    auto none = sample_diluted(lat, 0.0, 2.0, 5);
    for (double v : none.values) CHECK(v == 0.0);
    auto full = sample_diluted(lat, 1.0, 2.0, 5);
    for (double v : full.values) CHECK(v == 2.0);

    auto r = sample_diluted(lat, 0.3, 2.0, 77);
    int nz = 0;
    for (double v : r.values) nz += (v != 0.0);
    double n = lat.n_bonds();
    double sigma = std::sqrt(0.3 * 0.7 * n);
    CHECK(std::abs(nz - 0.3 * n) < 5 * sigma);
}

TEST_CASE("determinism and independence of streams") {
    auto lat = build_torus(8);
    auto a = sample_bipartite(lat, 0.4, 1.5, 42, 3);
    auto b = sample_bipartite(lat, 0.4, 1.5, 42, 3);
    CHECK(a.values == b.values);

    auto c = sample_bipartite(lat, 0.4, 1.5, 42, 4);
    CHECK(a.values != c.values);
    auto d = sample_bipartite(lat, 0.4, 1.5, 43, 3);
    CHECK(a.values != d.values);
}

TEST_CASE("json round trip") {
    auto lat = build_torus(3);
    auto r = sample_diluted(lat, 0.25, 1.0, 9, 2);
    auto back = realization_from_json(realization_to_json(r));
    CHECK(back.L == r.L);
    CHECK(back.distribution == r.distribution);
    CHECK(back.p == r.p);
    CHECK(back.seed == r.seed);
    CHECK(back.index == r.index);
    CHECK(back.values == r.values);
}
