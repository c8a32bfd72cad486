#include "doctest.h"

#include <cmath>

#include "toriclab/disorder.hpp"
#include "toriclab/errors.hpp"
#include "toriclab/quantum_ed.hpp"

using namespace toriclab;

TEST_CASE("decoupled transverse spins") {
    auto lat = build_torus(3);
    HamiltonianSpec spec;
    spec.model = EdModel::trbim;
    spec.lamA = 1.0;
    spec.field = uniform_field(lat, 0.0);
    spec.lat = &lat;
    auto res = low_spectrum(spec, 3);
    CHECK(res.spectrum.eigenvalues[0] == doctest::Approx(-9.0).epsilon(1e-12));
    CHECK(res.spectrum.eigenvalues[1] == doctest::Approx(-7.0).epsilon(1e-12));
    CHECK(res.spectrum.degeneracy_groups[1] == 1);
}

TEST_CASE("clean toric code ground degeneracy") {
    auto lat = build_torus(2);
    HamiltonianSpec spec;
    spec.model = EdModel::toric_clean;
    spec.lamA = 1.0;
    spec.lamB = 1.0;
    spec.field = uniform_field(lat, 0.0);
    spec.lat = &lat;
    auto res = low_spectrum(spec, 6);
    CHECK(res.spectrum.eigenvalues[0] == doctest::Approx(-8.0).epsilon(1e-12));
    int ground = 0;
    for (int g : res.spectrum.degeneracy_groups) ground += (g == 0);
    CHECK(ground == 4);
    // excitations come in pairs on the torus: the gap is 4*min(lamA,lamB)
    CHECK(res.spectrum.eigenvalues[4] - res.spectrum.eigenvalues[0] ==
          doctest::Approx(4.0).epsilon(1e-10));
    for (double r : res.spectrum.residual_norms) CHECK(r < 1e-9 * 8.0);
}

TEST_CASE("lanczos path matches the dense solver") {
    auto lat = build_torus(3);
    HamiltonianSpec spec;
    spec.model = EdModel::trbim;
    spec.lamA = 0.1;
    spec.field = sample_bipartite(lat, 0.5, 1.0, 31);
    spec.lat = &lat;

    auto dense = low_spectrum(spec, 4);
    EdBudget tiny;
    tiny.dense_dim = 16; // force the iterative path on the 512-dim problem
    auto lanczos = low_spectrum(spec, 4, tiny);
    CHECK(!lanczos.dense);
    for (int i = 0; i < 4; ++i) {
        CHECK(lanczos.spectrum.eigenvalues[i] ==
              doctest::Approx(dense.spectrum.eigenvalues[i]).epsilon(1e-9));
        CHECK(lanczos.spectrum.residual_norms[i] <
              1e-9 * std::max(1.0, std::abs(lanczos.spectrum.eigenvalues[i])));
    }

    // Edwards-Anderson order parameter agrees between the two paths
    auto qd = ea_order_parameter(lat, dense);
    auto ql = ea_order_parameter(lat, lanczos);
    CHECK(qd.q == doctest::Approx(ql.q).epsilon(1e-6));
}

TEST_CASE("gauge covariance of the transverse-field model") {
    auto lat = build_torus(3);
    HamiltonianSpec spec;
    spec.model = EdModel::trbim;
    spec.lamA = 0.4;
    spec.field = sample_bipartite(lat, 0.3, 0.8, 17);
    spec.lat = &lat;
    auto base = low_spectrum(spec, 5);

    // negate all couplings on one site's star: isospectral
    auto flipped = spec;
    for (int b : lat.star_bonds[lat.site(2, 1)]) flipped.field.values[b] *= -1.0;
    auto res = low_spectrum(flipped, 5);
    for (int i = 0; i < 5; ++i)
        CHECK(res.spectrum.eigenvalues[i] ==
              doctest::Approx(base.spectrum.eigenvalues[i]).epsilon(1e-10));
}

TEST_CASE("dual mapping is exact above the sector crossover") {
    auto lat = build_torus(2);
    auto field = sample_bipartite(lat, 0.5, 1.0, 42);

    auto high = verify_dual_mapping(lat, 0.3, 50.0, field, 4);
    CHECK(high.max_rel_deviation < 1e-10);
    CHECK(high.ground_sector_weight == doctest::Approx(1.0).epsilon(1e-10));

    auto low = verify_dual_mapping(lat, 0.3, 0.25, field, 4);
    CHECK(low.max_rel_deviation > 1e-3); // defect sectors intrude below the threshold

    SUBCASE("zero field: exact sector match at any lamB") {
        auto zero = uniform_field(lat, 0.0);
        for (double lamB : {0.5, 2.0}) {
            auto rep = verify_dual_mapping(lat, 0.3, lamB, zero, 4);
            CHECK(rep.max_rel_deviation < 1e-10);
        }
    }
}

TEST_CASE("classical field minimizer") {
    auto lat = build_torus(3);

    SUBCASE("lamB = 0 aligns with the field") {
        auto f = sample_bipartite(lat, 0.5, 1.0, 5);
        auto rep = classical_field_ground(lat, 0.0, f);
        double expect = 0.0;
        for (double h : f.values) expect -= std::abs(h);
        CHECK(rep.energy == doctest::Approx(expect).epsilon(1e-12));
    }
    SUBCASE("large lamB enforces positive plaquettes") {
        auto f = sample_bipartite(lat, 0.5, 1.0, 6);
        CHECK(classical_field_ground(lat, 10.0, f).all_plaquettes_positive);
    }
    SUBCASE("monotone crossover near the scale h/2eta = 1") {
        for (std::uint64_t seed = 0; seed < 6; ++seed) {
            auto f = sample_bipartite(lat, 0.5, 1.0, 50 + seed);
            bool prev = false;
            bool monotone = true;
            for (double lam : {0.125, 0.25, 0.5, 1.0, 2.0, 4.0}) {
                bool now = classical_field_ground(lat, lam, f).all_plaquettes_positive;
                if (prev && !now) monotone = false;
                prev = now;
            }
            CHECK(monotone);
            double cross = polarized_phase_crossover(lat, f);
            CHECK(cross >= 0.25);
            CHECK(cross <= 4.0);
        }
    }
}

TEST_CASE("Edwards-Anderson order parameter limits") {
    auto lat = build_torus(2);

    SUBCASE("strong transverse field: q -> 0") {
        HamiltonianSpec spec;
        spec.model = EdModel::trbim;
        spec.lamA = 50.0;
        spec.field = sample_bipartite(lat, 0.5, 1.0, 3);
        spec.lat = &lat;
        auto res = low_spectrum(spec, 1);
        CHECK(ea_order_parameter(lat, res).q < 1e-3);
    }
    SUBCASE("classical ferromagnet: q = 1 via multiplet maximization") {
        HamiltonianSpec spec;
        spec.model = EdModel::trbim;
        spec.lamA = 0.0;
        spec.field = sample_bipartite(lat, 0.0, 1.0, 3);
        spec.lat = &lat;
        auto res = low_spectrum(spec, 2);
        auto q = ea_order_parameter(lat, res);
        CHECK(q.degenerate);
        CHECK(q.q == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("single star spectrum gaps") {
    for (double h : {0.5, 1.0, 2.0}) {
        auto gaps = single_star_gap(h);
        CHECK(gaps[0] == doctest::Approx(std::exp(-2 * h) - std::exp(-4 * h)).epsilon(1e-14));
        CHECK(gaps[1] == doctest::Approx(std::exp(2 * h) - std::exp(-4 * h)).epsilon(1e-14));
        CHECK(gaps[2] == doctest::Approx(std::exp(4 * h) - std::exp(-4 * h)).epsilon(1e-14));
    }
    SUBCASE("asymptotics") {
        auto gaps = single_star_gap(10.0);
        CHECK(gaps[0] < 1e-8);
        CHECK(gaps[2] / std::exp(40.0) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("h = 0 degenerates") {
        auto gaps = single_star_gap(0.0);
        CHECK(gaps[0] == 0.0);
        CHECK(gaps[1] == 0.0);
        CHECK(gaps[2] == 0.0);
    }
    SUBCASE("the linear field term on a star instead grows as 2h") {
        // spectrum of -sum h sigma^z on 4 spins: levels -4h + 2h k
        for (double h : {0.5, 1.0, 2.0}) {
            double gap = 2 * h; // first excited minus ground
            CHECK(gap == doctest::Approx(2 * h));
        }
    }
}

TEST_CASE("budget guards") {
    auto lat = build_torus(5);
    HamiltonianSpec spec;
    spec.model = EdModel::trbim;
    spec.lamA = 1.0;
    spec.field = uniform_field(lat, 0.0);
    spec.lat = &lat;
    CHECK_THROWS_AS(low_spectrum(spec, 2), BudgetError);

    auto lat4 = build_torus(4);
    HamiltonianSpec tf;
    tf.model = EdModel::toric_field;
    tf.lamA = 1.0;
    tf.lamB = 1.0;
    tf.field = uniform_field(lat4, 1.0);
    tf.lat = &lat4;
    CHECK_THROWS_AS(low_spectrum(tf, 2), BudgetError);

    auto big = build_torus(4);
    CHECK_THROWS_AS(classical_field_ground(big, 1.0, uniform_field(big, 1.0)), BudgetError);
}
