#include "doctest.h"

#include <cmath>
#include <random>

#include "oracles/kaufman.hpp"
#include "toriclab/disorder.hpp"
#include "toriclab/errors.hpp"
#include "toriclab/rbim.hpp"

using namespace toriclab;

TEST_CASE("partition sums: free limits and closed forms") {
    auto lat = build_torus(2);
    auto zero = uniform_field(lat, 0.0);
    CHECK(log_partition_brute(lat, zero).log_z == doctest::Approx(4 * std::log(2.0)).epsilon(1e-14));
    CHECK(log_partition_transfer(lat, zero).log_z ==
          doctest::Approx(4 * std::log(2.0)).epsilon(1e-14));

    // single coupled bond: Z = 2^{N-2} * 2(e^b + e^-b)
    auto chain = uniform_field(lat, 0.0);
    chain.values[lat.hbond(0, 0)] = 0.4;
    double expect = (4 - 2) * std::log(2.0) + std::log(2.0 * (std::exp(0.4) + std::exp(-0.4)));
    CHECK(log_partition_brute(lat, chain).log_z == doctest::Approx(expect).epsilon(1e-13));

    SUBCASE("Kaufman torus closed form") {
        for (int L : {4, 10}) {
            auto big = build_torus(L);
            auto uni = uniform_field(big, 0.3);
            double exact = oracles::kaufman_log_z(L, 0.3);
            if (L <= 4)
                CHECK(log_partition_brute(big, uni).log_z ==
                      doctest::Approx(exact).epsilon(1e-11));
            CHECK(log_partition_transfer(big, uni).log_z ==
                  doctest::Approx(exact).epsilon(1e-11));
        }
    }
}

TEST_CASE("transfer equals brute with and without clamps") {
    auto lat = build_torus(3);
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        auto c = sample_bipartite(lat, 0.5, 0.8, seed);
        double zb = log_partition_brute(lat, c).log_z;
        double zt = log_partition_transfer(lat, c).log_z;
        CHECK(std::abs(zb - zt) / std::abs(zb) < 1e-10);

        BoundarySpec bc;
        bc.fixed = {{lat.site(0, 0), 1}, {lat.site(1, 2), -1}, {lat.site(2, 1), -1}};
        double cb = log_partition_brute(lat, c, bc).log_z;
        double ct = log_partition_transfer(lat, c, bc).log_z;
        CHECK(std::abs(cb - ct) / std::abs(cb) < 1e-10);
        CHECK(log_partition_brute(lat, c, bc).constrained_site_count == 3);
    }
    BoundarySpec bad;
    bad.fixed = {{99, 1}};
    auto c = sample_bipartite(lat, 0.5, 0.8, 1);
    CHECK_THROWS_AS(log_partition_brute(lat, c, bad), InvalidParameterError);
}

TEST_CASE("gauge covariance and coupling-negation symmetry") {
    auto lat = build_torus(3);
    auto c = sample_bipartite(lat, 0.3, 0.6, 9);

    // flipping theta_s and negating its incident couplings preserves Z
    auto flipped = c;
    int s = lat.site(1, 1);
    for (int b : lat.star_bonds[s]) flipped.values[b] = -flipped.values[b];
    CHECK(log_partition_brute(lat, c).log_z ==
          doctest::Approx(log_partition_brute(lat, flipped).log_z).epsilon(1e-13));

    // with a clamp at s, the flipped problem clamps -value
    BoundarySpec bc1, bc2;
    bc1.fixed = {{s, 1}};
    bc2.fixed = {{s, -1}};
    CHECK(log_partition_brute(lat, c, bc1).log_z ==
          doctest::Approx(log_partition_brute(lat, flipped, bc2).log_z).epsilon(1e-13));

    // global negation on the bipartite lattice: requires even L
    auto lat4 = build_torus(4);
    auto c4 = sample_bipartite(lat4, 0.4, 0.5, 5);
    auto neg = c4;
    for (double& v : neg.values) v = -v;
    CHECK(log_partition_transfer(lat4, c4).log_z ==
          doctest::Approx(log_partition_transfer(lat4, neg).log_z).epsilon(1e-12));
}

TEST_CASE("log-sum-exp stability at beta = 50") {
    auto lat = build_torus(2);
    auto c = uniform_field(lat, 50.0);
    double lz = log_partition_brute(lat, c).log_z;
    CHECK(std::isfinite(lz));
    // ground-state dominated: Z ~ 2 exp(8 * 50)
    double asymptote = 8 * 50.0 + std::log(2.0);
    CHECK(std::abs(lz - asymptote) / asymptote < 1e-9);
    double lt = log_partition_transfer(lat, c).log_z;
    CHECK(std::abs(lt - asymptote) / asymptote < 1e-9);
}

TEST_CASE("ratio R equals 4 at beta = 0 for every boundary config") {
    auto lat3 = build_torus(3);
    auto regs3 = minimal_regions_l3(lat3);
    std::vector<double> beta(lat3.n_bonds(), 0.0);
    std::mt19937 gen(3);
    for (int trial = 0; trial < 8; ++trial) {
        std::vector<int> theta(lat3.n_sites());
        for (auto& t : theta) t = gen() & 1 ? 1 : -1;
        CHECK(log2_ratio(lat3, beta, regs3, theta) == doctest::Approx(2.0).epsilon(1e-12));
    }
    auto lat6 = build_torus(6);
    auto regs6 = levin_wen_regions(lat6, 1, 2);
    std::vector<double> beta6(lat6.n_bonds(), 0.0);
    std::vector<int> theta(lat6.n_sites());
    for (auto& t : theta) t = gen() & 1 ? 1 : -1;
    CHECK(log2_ratio(lat6, beta6, regs6, theta) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("twisted boundary: flipping either component gives the same Z") {
    auto lat = build_torus(6);
    auto regs = levin_wen_regions(lat, 1, 2);
    auto c = sample_bipartite(lat, 0.5, 0.7, 12);
    std::mt19937 gen(5);
    std::vector<int> theta(lat.n_sites());
    for (auto& t : theta) t = gen() & 1 ? 1 : -1;

    auto inner = boundary_from_theta(regs[0], theta, "inner");
    auto outer = boundary_from_theta(regs[0], theta, "outer");
    double zi = log_partition_transfer(lat, c, inner).log_z;
    double zo = log_partition_transfer(lat, c, outer).log_z;
    CHECK(zi == doctest::Approx(zo).epsilon(1e-11));
    CHECK_THROWS_AS(boundary_from_theta(regs[0], theta, "nope"), InvalidParameterError);
}

TEST_CASE("topological entropy: enumeration sampler") {
    auto lat = build_torus(3);
    auto regs = minimal_regions_l3(lat);

    SUBCASE("beta = 0 gives exactly two bits at any p") {
        auto zero = uniform_field(lat, 0.0);
        auto r = topo_entropy_exact(lat, zero, regs, TopoSampler::enumerate_all);
        CHECK(r.s_topo == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(r.sampler == "enumerate");
        CHECK(r.n_samples == 512);
    }
    SUBCASE("strong uniform coupling kills the entropy") {
        auto strong = uniform_field(lat, 2.0);
        auto r = topo_entropy_exact(lat, strong, regs, TopoSampler::enumerate_all);
        CHECK(r.s_topo < 0.05);
        CHECK(r.s_topo >= 0.0);
    }
    SUBCASE("budget guards") {
        auto big = build_torus(6);
        auto c = uniform_field(big, 0.1);
        auto regs6 = levin_wen_regions(big, 1, 2);
        TopoBudget tight;
        tight.max_enum_sites = 20;
        CHECK_THROWS_AS(topo_entropy_exact(big, c, regs6, TopoSampler::enumerate_all, tight),
                        BudgetError);
    }
}

TEST_CASE("topological entropy: MC sampler is deterministic and errored") {
    auto lat = build_torus(6);
    auto regs = levin_wen_regions(lat, 1, 2);
    auto c = uniform_field(lat, 0.0);
    TopoBudget budget;
    budget.n_samples = 200;
    budget.burn_sweeps = 50;
    auto a = topo_entropy_exact(lat, c, regs, TopoSampler::boltzmann_mc, budget, 4);
    auto b = topo_entropy_exact(lat, c, regs, TopoSampler::boltzmann_mc, budget, 4);
    CHECK(a.s_topo == b.s_topo);
    CHECK(a.s_topo == doctest::Approx(2.0).epsilon(1e-12)); // constant observable at beta=0
    CHECK(a.stderr_.has_value());
    CHECK(*a.stderr_ <= 1e-12);
    CHECK(a.rhat == doctest::Approx(1.0));
}
