#include "doctest.h"

#include <algorithm>
#include <set>

#include "toriclab/errors.hpp"
#include "toriclab/lattice.hpp"

using namespace toriclab;

TEST_CASE("build_torus counts and incidences") {
    CHECK_THROWS_AS(build_torus(1), InvalidParameterError);

    auto l2 = build_torus(2);
    CHECK(l2.n_sites() == 4);
    CHECK(l2.n_bonds() == 8);
    CHECK(l2.n_plaquettes() == 4);

    auto l3 = build_torus(3);
    CHECK(l3.n_sites() == 9);
    CHECK(l3.n_bonds() == 18);
    CHECK(l3.n_plaquettes() == 9);

    auto l4 = build_torus(4);
    // every bond appears in exactly two stars and two plaquettes
    std::vector<int> star_hits(l4.n_bonds(), 0), plaq_hits(l4.n_bonds(), 0);
    for (const auto& st : l4.star_bonds)
        for (int b : st) ++star_hits[b];
    for (const auto& pl : l4.plaq_bonds)
        for (int b : pl) ++plaq_hits[b];
    CHECK(std::all_of(star_hits.begin(), star_hits.end(), [](int c) { return c == 2; }));
    CHECK(std::all_of(plaq_hits.begin(), plaq_hits.end(), [](int c) { return c == 2; }));

    for (const auto& b : l4.bonds) {
        CHECK(b.s0 != b.s1);
        CHECK(b.s0 >= 0);
        CHECK(b.s1 < l4.n_sites());
    }
}

TEST_CASE("sigma_from_theta is the two-to-one star-group map") {
    auto lat = build_torus(3);
    std::vector<int> plus(lat.n_sites(), 1), minus(lat.n_sites(), -1);
    auto s_plus = sigma_from_theta(lat, plus);
    auto s_minus = sigma_from_theta(lat, minus);
    CHECK(s_plus == s_minus);
    CHECK(std::all_of(s_plus.begin(), s_plus.end(), [](int v) { return v == 1; }));

    // single flipped site: exactly its star's bonds read -1
    std::vector<int> theta = plus;
    theta[lat.site(1, 2)] = -1;
    auto sig = sigma_from_theta(lat, theta);
    std::set<int> star(lat.star_bonds[lat.site(1, 2)].begin(),
                       lat.star_bonds[lat.site(1, 2)].end());
    for (int b = 0; b < lat.n_bonds(); ++b)
        CHECK(sig[b] == (star.count(b) ? -1 : 1));

    // image satisfies every plaquette constraint
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<int> t(lat.n_sites());
        for (int s = 0; s < lat.n_sites(); ++s) t[s] = ((trial * 2654435761u + s * 97) % 3) ? 1 : -1;
        auto sg = sigma_from_theta(lat, t);
        for (int p = 0; p < lat.n_plaquettes(); ++p) {
            int prod = 1;
            for (int b : lat.plaq_bonds[p]) prod *= sg[b];
            CHECK(prod == 1);
        }
    }
}

TEST_CASE("winding and sector loops") {
    for (int L : {2, 3, 4, 6}) {
        auto lat = build_torus(L);
        auto w = winding_loops(lat);
        auto x = sector_loops(lat);
        CHECK(static_cast<int>(w.w1_bonds.size()) == L);
        CHECK(static_cast<int>(w.w2_bonds.size()) == L);

        // sector strings commute with every plaquette (even overlap)
        for (const auto& loop : {x.x1_bonds, x.x2_bonds}) {
            std::set<int> ls(loop.begin(), loop.end());
            for (int p = 0; p < lat.n_plaquettes(); ++p) {
                int overlap = 0;
                for (int b : lat.plaq_bonds[p]) overlap += ls.count(b);
                CHECK(overlap % 2 == 0);
            }
        }
        // x1 toggles the w1 parity once, leaves w2 untouched (and vice versa)
        auto isect = [](const std::vector<int>& a, const std::vector<int>& b) {
            std::set<int> sa(a.begin(), a.end());
            int n = 0;
            for (int v : b) n += sa.count(v);
            return n;
        };
        CHECK(isect(x.x1_bonds, w.w1_bonds) % 2 == 1);
        CHECK(isect(x.x1_bonds, w.w2_bonds) % 2 == 0);
        CHECK(isect(x.x2_bonds, w.w2_bonds) % 2 == 1);
        CHECK(isect(x.x2_bonds, w.w1_bonds) % 2 == 0);
    }
}

TEST_CASE("levin_wen_regions structure") {
    auto lat = build_torus(8);
    auto regs = levin_wen_regions(lat, 1, 2);

    CHECK(regs[0].boundary_components.size() == 2);
    CHECK(regs[1].boundary_components.size() == 1);
    CHECK(regs[2].boundary_components.size() == 1);
    CHECK(regs[3].boundary_components.size() == 2);

    // region 4 bonds sit inside both slit regions
    std::set<int> r2(regs[1].region_bonds.begin(), regs[1].region_bonds.end());
    std::set<int> r3(regs[2].region_bonds.begin(), regs[2].region_bonds.end());
    for (int b : regs[3].region_bonds) {
        CHECK(r2.count(b) == 1);
        CHECK(r3.count(b) == 1);
    }

    // boundary sites are exactly the sites with bonds on both sides
    for (const auto& g : regs) {
        std::set<int> inA(g.region_bonds.begin(), g.region_bonds.end());
        std::set<int> boundary(g.boundary_sites.begin(), g.boundary_sites.end());
        for (int s = 0; s < lat.n_sites(); ++s) {
            int na = 0;
            for (int b : lat.star_bonds[s]) na += inA.count(b);
            CHECK(boundary.count(s) == (na > 0 && na < 4 ? 1u : 0u));
        }
    }

    SUBCASE("slit complementarity at L=6") {
        auto lat6 = build_torus(6);
        auto r = levin_wen_regions(lat6, 1, 2);
        std::set<int> u;
        u.insert(r[1].region_bonds.begin(), r[1].region_bonds.end());
        u.insert(r[2].region_bonds.begin(), r[2].region_bonds.end());
        std::set<int> r1(r[0].region_bonds.begin(), r[0].region_bonds.end());
        CHECK(u == r1);
    }

    SUBCASE("geometry that does not fit is rejected") {
        CHECK_THROWS_AS(levin_wen_regions(lat, 2, 2), InvalidGeometryError);
        CHECK_THROWS_AS(levin_wen_regions(lat, 1, 4), InvalidGeometryError);
        auto lat5 = build_torus(5);
        CHECK_THROWS_AS(levin_wen_regions(lat5, 1, 2), InvalidGeometryError);
    }
}

TEST_CASE("minimal L=3 quadruple") {
    auto lat = build_torus(3);
    auto regs = minimal_regions_l3(lat);
    CHECK(regs[0].boundary_components.size() == 2);
    CHECK(regs[0].region_bonds.size() == 12);
    CHECK(regs[1].region_bonds.size() == 9);
    CHECK(regs[2].region_bonds.size() == 9);
    CHECK(regs[3].region_bonds.size() == 6);

    auto lat4 = build_torus(4);
    CHECK_THROWS_AS(minimal_regions_l3(lat4), InvalidGeometryError);
}

TEST_CASE("lattice json export") {
    auto lat = build_torus(2);
    std::string j = lattice_to_json(lat);
    CHECK(j.find("\"L\": 2") != std::string::npos);
    CHECK(j.find("bonds") != std::string::npos);
}
