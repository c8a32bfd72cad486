#include "doctest.h"

#include <cmath>
#include <random>
#include <set>

#include "toriclab/disorder.hpp"
#include "toriclab/eab.hpp"
#include "toriclab/errors.hpp"
#include "toriclab/rng.hpp"

using namespace toriclab;

namespace {

// independent oracle: naive scan over all 2^N thetas (no Gray code, no
// incremental energies)
struct NaiveResult {
    long long energy;
    std::uint64_t count;
    std::vector<std::uint64_t> sat;
};

NaiveResult naive_ground_states(const TorusLattice& lat, const CouplingField& c) {
    const int N = lat.n_sites();
    NaiveResult res{1 << 30, 0, std::vector<std::uint64_t>(lat.n_bonds(), 0)};
    for (std::uint64_t cfg = 0; cfg < (1ULL << N); ++cfg) {
        if (cfg & 1) continue; // modulo global flip: keep theta[0] = +1
        long long e = 0;
        for (int b = 0; b < lat.n_bonds(); ++b) {
            int t0 = (cfg >> lat.bonds[b].s0) & 1 ? -1 : 1;
            int t1 = (cfg >> lat.bonds[b].s1) & 1 ? -1 : 1;
            e -= (c.values[b] > 0 ? 1 : -1) * t0 * t1;
        }
        if (e > res.energy) continue;
        if (e < res.energy) {
            res.energy = e;
            res.count = 0;
            std::fill(res.sat.begin(), res.sat.end(), 0);
        }
        ++res.count;
        for (int b = 0; b < lat.n_bonds(); ++b) {
            int t0 = (cfg >> lat.bonds[b].s0) & 1 ? -1 : 1;
            int t1 = (cfg >> lat.bonds[b].s1) & 1 ? -1 : 1;
            if ((c.values[b] > 0 ? 1 : -1) * t0 * t1 > 0) ++res.sat[b];
        }
    }
    return res;
}

} // namespace

TEST_CASE("clean limits") {
    for (int L : {3, 4}) {
        auto lat = build_torus(L);
        auto ferro = sample_bipartite(lat, 0.0, 1.0, 1);
        auto gs = enumerate_ground_states(lat, ferro);
        CHECK(gs.count == 1);
        CHECK(gs.energy_int == -2 * L * L);
        CHECK(gs.energy == doctest::Approx(-2.0 * L * L));
    }
    // all-antiferromagnetic on an even torus: unique Neel state mod flip
    auto lat4 = build_torus(4);
    auto af = sample_bipartite(lat4, 1.0, 1.0, 1);
    auto gs = enumerate_ground_states(lat4, af);
    CHECK(gs.count == 1);
    CHECK(gs.energy_int == -2 * 4 * 4);
}

TEST_CASE("engines agree with the naive oracle and each other") {
    for (int L : {2, 3}) {
        auto lat = build_torus(L);
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            auto c = sample_bipartite(lat, 0.5, 1.0, seed);
            auto naive = naive_ground_states(lat, c);
            for (auto method :
                 {EabMethod::exhaustive, EabMethod::branch_bound, EabMethod::transfer_count}) {
                auto gs = enumerate_ground_states(lat, c, method);
                CHECK(gs.energy_int == naive.energy);
                CHECK(gs.count == naive.count);
                CHECK(gs.sat_count == naive.sat);
                CHECK(gs.complete);
            }
        }
    }
    // larger cross-checks without the naive oracle
    for (int L : {4, 5}) {
        auto lat = build_torus(L);
        for (std::uint64_t seed = 11; seed <= 13; ++seed) {
            auto c = sample_bipartite(lat, 0.5, 1.0, seed);
            auto ex = enumerate_ground_states(lat, c, EabMethod::exhaustive);
            auto bb = enumerate_ground_states(lat, c, EabMethod::branch_bound);
            auto tc = enumerate_ground_states(lat, c, EabMethod::transfer_count);
            CHECK(ex.energy_int == bb.energy_int);
            CHECK(ex.count == bb.count);
            CHECK(ex.sat_count == bb.sat_count);
            CHECK(ex.energy_int == tc.energy_int);
            CHECK(ex.count == tc.count);
            CHECK(ex.sat_count == tc.sat_count);
        }
    }
}

TEST_CASE("rigid lattice classification") {
    auto lat = build_torus(3);

    SUBCASE("ferromagnet: everything rigid") {
        auto c = sample_bipartite(lat, 0.0, 1.0, 1);
        auto rl = rigid_lattice(enumerate_ground_states(lat, c), c);
        CHECK(rl.rigid_fraction == 1.0);
        for (auto cls : rl.classification) CHECK(cls == BondNature::always_satisfied);
    }

    SUBCASE("one frustrated plaquette produces mixed bonds") {
        // two AF bonds on a single plaquette
        auto c = sample_bipartite(lat, 0.0, 1.0, 1);
        c.values[lat.plaq_bonds[0][0]] = -1.0;
        c.values[lat.plaq_bonds[0][2]] = -1.0;
        auto gs = enumerate_ground_states(lat, c);
        CHECK(gs.count > 1);
        auto rl = rigid_lattice(gs, c);
        int mixed_on_plaq = 0;
        for (int b : lat.plaq_bonds[0])
            mixed_on_plaq += rl.classification[b] == BondNature::mixed;
        CHECK(mixed_on_plaq > 0);
    }

    SUBCASE("gauge covariance") {
        std::mt19937 gen(17);
        for (int trial = 0; trial < 50; ++trial) {
            auto c = sample_bipartite(lat, 0.5, 1.0, 100 + trial);
            auto rl = rigid_lattice(enumerate_ground_states(lat, c), c);

            // random gauge: flip a site subset, negate the cut bonds
            std::vector<int> flip(lat.n_sites());
            for (auto& f : flip) f = gen() & 1;
            auto gauged = c;
            for (int b = 0; b < lat.n_bonds(); ++b)
                if (flip[lat.bonds[b].s0] ^ flip[lat.bonds[b].s1])
                    gauged.values[b] = -gauged.values[b];
            auto rl2 = rigid_lattice(enumerate_ground_states(lat, gauged), gauged);
            CHECK(rl.classification.size() == rl2.classification.size());
            for (int b = 0; b < lat.n_bonds(); ++b) {
                bool rigid1 = rl.classification[b] != BondNature::mixed;
                bool rigid2 = rl2.classification[b] != BondNature::mixed;
                CHECK(rigid1 == rigid2);
            }
        }
    }
}

TEST_CASE("percolation report") {
    auto lat = build_torus(4);

    SUBCASE("all bonds rigid: wraps both ways") {
        RigidLattice rl;
        rl.classification.assign(lat.n_bonds(), BondNature::always_satisfied);
        for (int b = 0; b < lat.n_bonds(); ++b) rl.rigid_bonds.push_back(b);
        auto rep = percolation_report(rl, lat);
        CHECK(rep.largest_fraction == 1.0);
        CHECK(rep.wraps_dir1);
        CHECK(rep.wraps_dir2);
        CHECK(rep.spans_open);
    }
    SUBCASE("no rigid bonds") {
        RigidLattice rl;
        rl.classification.assign(lat.n_bonds(), BondNature::mixed);
        auto rep = percolation_report(rl, lat);
        CHECK(rep.largest_fraction == 0.0);
        CHECK(!rep.wraps_dir1);
        CHECK(!rep.wraps_dir2);
        CHECK(!rep.spans_open);
    }
    SUBCASE("single rigid column of vertical bonds wraps only vertically") {
        RigidLattice rl;
        rl.classification.assign(lat.n_bonds(), BondNature::mixed);
        for (int y = 0; y < lat.L; ++y) {
            rl.rigid_bonds.push_back(lat.vbond(1, y));
            rl.classification[lat.vbond(1, y)] = BondNature::always_satisfied;
        }
        auto rep = percolation_report(rl, lat);
        CHECK(rep.wraps_dir1);
        CHECK(!rep.wraps_dir2);
        CHECK(rep.largest_fraction == doctest::Approx(4.0 / 16.0));
    }
}

TEST_CASE("satisfied-count identity") {
    auto lat = build_torus(4);
    for (std::uint64_t seed : {3ULL, 4ULL}) {
        auto c = sample_bipartite(lat, 0.4, 1.0, seed);
        auto gs = enumerate_ground_states(lat, c);
        unsigned long long satsum = 0;
        for (auto v : gs.sat_count) satsum += v;
        long long lhs = 2 * static_cast<long long>(satsum) -
                        static_cast<long long>(lat.n_bonds()) * static_cast<long long>(gs.count);
        CHECK(lhs == -gs.energy_int * static_cast<long long>(gs.count));
        // explicit states all have the ground energy
        for (const auto& st : gs.states) {
            long long e = 0;
            for (int b = 0; b < lat.n_bonds(); ++b)
                e -= (c.values[b] > 0 ? 1 : -1) * st[lat.bonds[b].s0] * st[lat.bonds[b].s1];
            CHECK(e == gs.energy_int);
        }
    }
}

TEST_CASE("percolation scan behavior") {
    SUBCASE("ferromagnetic limit always wraps") {
        auto rows = rigid_percolation_scan(0.0, {3, 4}, 10, 42);
        for (const auto& r : rows) {
            CHECK(r.wrap_either_prob == 1.0);
            CHECK(r.n_failed == 0);
        }
    }
    SUBCASE("dilute frustration keeps the rigid lattice percolating") {
        auto rows = rigid_percolation_scan(0.05, {6}, 60, 7);
        CHECK(rows[0].wrap_either_prob > 0.9);
    }
}

TEST_CASE("input validation") {
    auto lat = build_torus(3);
    auto c = uniform_field(lat, 1.0);
    c.values[0] = 0.5; // not bimodal
    CHECK_THROWS_AS(enumerate_ground_states(lat, c), InvalidParameterError);

    GroundStateSet incomplete;
    incomplete.complete = false;
    CHECK_THROWS_AS(rigid_lattice(incomplete, c), InvalidParameterError);

    auto big = build_torus(6);
    auto cb = sample_bipartite(big, 0.5, 1.0, 1);
    CHECK_THROWS_AS(enumerate_ground_states(big, cb, EabMethod::exhaustive), BudgetError);
}
