#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace toriclab {

// L x L square lattice with periodic boundaries. Ising degrees of freedom
// (theta spins, stars) live on the sites; the code's sigma spins live on the
// bonds. Indexing is deterministic: site (x,y) -> y*L + x, and each site owns
// two bonds, horizontal first: bond 2s points to (x+1,y), bond 2s+1 to
// (x,y+1). Plaquette p shares its index with its lower-left corner site.
struct TorusLattice {
    struct Bond {
        int s0, s1;    // ordered endpoints (owner site first)
        int x, y;      // owner site coordinates
        bool vertical; // false: along +x, true: along +y
    };

    int L = 0;
    std::vector<Bond> bonds;                       // size 2*L*L
    std::vector<std::array<int, 4>> star_bonds;    // per site
    std::vector<std::array<int, 4>> plaq_bonds;    // per plaquette

    int n_sites() const { return L * L; }
    int n_bonds() const { return 2 * L * L; }
    int n_plaquettes() const { return L * L; }

    int site(int x, int y) const {
        x %= L; if (x < 0) x += L;
        y %= L; if (y < 0) y += L;
        return y * L + x;
    }
    int hbond(int x, int y) const { return 2 * site(x, y); }
    int vbond(int x, int y) const { return 2 * site(x, y) + 1; }
    int site_x(int s) const { return s % L; }
    int site_y(int s) const { return s / L; }
};

TorusLattice build_torus(int L);

// sigma_j = theta_s * theta_s' on every bond j = (s,s').
std::vector<int> sigma_from_theta(const TorusLattice& lat, const std::vector<int>& theta);

// The two incontractible loops on the direct lattice. w1 runs vertically
// (the vertical bonds of column 0) and crosses every horizontal cut once;
// w2 runs horizontally (the horizontal bonds of row 0).
struct WindingLoops {
    std::vector<int> w1_bonds;
    std::vector<int> w2_bonds;
};
WindingLoops winding_loops(const TorusLattice& lat);

// Dual-lattice loops used as bit-flip strings to move between topological
// sectors: flipping x1 toggles the parity measured along w1 (and leaves
// every plaquette product invariant), likewise x2 for w2.
struct SectorLoops {
    std::vector<int> x1_bonds; // vertical bonds of row 0 (dual horizontal loop)
    std::vector<int> x2_bonds; // horizontal bonds of column 0 (dual vertical loop)
};
SectorLoops sector_loops(const TorusLattice& lat);

// One bipartition (region A, complement B) dressed with everything the
// constrained-partition-function machinery needs:
//  - boundary sites (bonds on both sides) grouped into components,
//  - interior sites of each side,
//  - for each side, the spin-flip moves that leave that side's energy sum
//    closed: the connected components of the *other* side's bond graph.
//    Summing a side's partition function requires one clamped sum per
//    subset of those components (the largest component is the gauge-fixed
//    reference and is never flipped).
struct BipartitionGeometry {
    struct Component {
        std::string name;
        std::vector<int> sites;          // all sites of the component
        std::vector<int> boundary_sites; // subset that carries clamped spins
    };
    struct Side {
        std::vector<int> bonds;             // bond set of this side
        std::vector<int> interior_sites;    // sites with all 4 bonds on this side
        std::vector<Component> flip_components; // non-designated components of the other side's graph
        bool halve = false; // set when the other side has no bonds: the free sum
                            // then counts every group element twice
    };

    std::vector<int> region_bonds;       // = inside.bonds
    std::vector<int> boundary_sites;     // sites with bonds on both sides
    std::vector<Component> boundary_components; // named partition of boundary_sites
    Side inside;  // data for Z_A
    Side outside; // data for Z_B
};

BipartitionGeometry make_bipartition(const TorusLattice& lat, const std::vector<int>& region_bonds);

// Levin-Wen quadruple built from a square annulus of sites with inner
// half-width r, outer half-width R and one-site-wide slits at the top and
// bottom arms. Requires the outer block plus a nonempty exterior to fit:
// R < L/2 and 2R+1 < L. Region order: {annulus, top slit removed, bottom
// slit removed, both removed}.
std::array<BipartitionGeometry, 4> levin_wen_regions(const TorusLattice& lat, int r, int R);

// Smallest torus that admits an exact Levin-Wen quadruple: a hand-built
// L=3 geometry whose counting limit gives exactly 2 bits at beta=0. The
// hole is the star of the central site; the exterior is a reduced star at
// the opposite corner; the slits carve out the residual stars of two
// neighbors of the hole.
std::array<BipartitionGeometry, 4> minimal_regions_l3(const TorusLattice& lat);

std::string lattice_to_json(const TorusLattice& lat);

} // namespace toriclab
