#include "doctest.h"

#include "toriclab/disorder.hpp"
#include "toriclab/errors.hpp"
#include "toriclab/rng.hpp"
#include "toriclab/stabilizer.hpp"

using namespace toriclab;

TEST_CASE("toric code stabilizer group") {
    for (int L : {2, 3, 4, 6}) {
        auto lat = build_torus(L);
        auto code = build_toric_stabilizers(lat);
        CHECK(code.n == 2 * L * L);
        CHECK(static_cast<int>(code.generators.size()) == 2 * L * L);
        CHECK(all_generators_commute(code));
        CHECK(logical_qubit_count(code) == 2);
    }
    // L=2 instance of the rank formula: rank 6 over 8 qubits
    auto lat = build_torus(2);
    auto code = build_toric_stabilizers(lat);
    CHECK(code.n - logical_qubit_count(code) == 6);
}

TEST_CASE("pinning single bonds and winding loops") {
    auto lat = build_torus(4);
    auto code = build_toric_stabilizers(lat);

    SUBCASE("empty pin set leaves the code alone") {
        auto same = pin_spins(code, {});
        CHECK(logical_qubit_count(same) == 2);
        CHECK(same.generators.size() == code.generators.size());
    }
    SUBCASE("one pinned bond keeps both logical qubits") {
        auto pinned = pin_spins(code, {{lat.hbond(1, 2), 1}});
        CHECK(all_generators_commute(pinned));
        CHECK(logical_qubit_count(pinned) == 2);
    }
    SUBCASE("pinning a full winding column removes degeneracy") {
        auto w = winding_loops(lat);
        std::vector<std::pair<int, int>> pins;
        for (int b : w.w1_bonds) pins.emplace_back(b, 1);
        auto pinned = pin_spins(code, pins);
        CHECK(all_generators_commute(pinned));
        CHECK(logical_qubit_count(pinned) < 2);
    }
    SUBCASE("pinning everything kills all logical qubits") {
        std::vector<std::pair<int, int>> pins;
        for (int b = 0; b < lat.n_bonds(); ++b) pins.emplace_back(b, 1);
        CHECK(logical_qubit_count(pin_spins(code, pins)) == 0);
    }
    SUBCASE("contradictory pins are rejected") {
        CHECK_THROWS_AS(pin_spins(code, {{3, 1}, {3, -1}}), InvalidParameterError);
    }
    SUBCASE("k is monotone non-increasing under added pins") {
        std::vector<std::pair<int, int>> pins;
        int prev = 2;
        for (int i = 0; i < 12; ++i) {
            pins.emplace_back(static_cast<int>(prf(5, 0, i) % lat.n_bonds()), 1);
            std::vector<std::pair<int, int>> dedup;
            std::vector<char> seen(lat.n_bonds(), 0);
            for (auto [q, v] : pins)
                if (!seen[q]) { seen[q] = 1; dedup.emplace_back(q, v); }
            int k = logical_qubit_count(pin_spins(code, dedup));
            CHECK(k <= prev);
            prev = k;
        }
    }
}

TEST_CASE("pinned-set percolation flags") {
    auto lat = build_torus(4);
    auto w = winding_loops(lat);

    // direct vertical loop: star-connected, winds in y
    auto flags = pinned_wrap_flags(lat, w.w1_bonds, BondAdjacency::shared_star);
    CHECK(flags.wraps_dir1);
    CHECK(!flags.wraps_dir2);

    // dual horizontal loop (vertical bonds of one row): star-disconnected
    // but plaquette-connected, winding in x
    auto x = sector_loops(lat);
    auto star_flags = pinned_wrap_flags(lat, x.x1_bonds, BondAdjacency::shared_star);
    CHECK(!star_flags.wraps_dir1);
    CHECK(!star_flags.wraps_dir2);
    CHECK(star_flags.largest_cluster == 1);
    auto plaq_flags = pinned_wrap_flags(lat, x.x1_bonds, BondAdjacency::shared_plaquette);
    CHECK(plaq_flags.wraps_dir2);
    CHECK(!plaq_flags.wraps_dir1);
}

TEST_CASE("no wrap implies two logical qubits (sampled)") {
    auto lat = build_torus(4);
    auto code = build_toric_stabilizers(lat);
    for (double p : {0.2, 0.4, 0.6}) {
        for (int i = 0; i < 60; ++i) {
            auto f = sample_diluted(lat, p, 1.0, 900 + i, i);
            std::vector<int> pinned;
            std::vector<std::pair<int, int>> pins;
            for (int b = 0; b < lat.n_bonds(); ++b)
                if (f.values[b] != 0.0) { pinned.push_back(b); pins.emplace_back(b, 1); }
            auto flags = pinned_wrap_flags(lat, pinned);
            int k = logical_qubit_count(pin_spins(code, pins));
            if (!flags.wraps_dir1 && !flags.wraps_dir2) CHECK(k == 2);
            CHECK(k <= 2);
            CHECK(k >= 0);
        }
    }
}
