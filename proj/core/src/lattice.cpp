#include "toriclab/lattice.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "toriclab/errors.hpp"
#include "toriclab/union_find.hpp"

#include "json.hpp"

namespace toriclab {

TorusLattice build_torus(int L) {
    if (L < 2) throw InvalidParameterError("build_torus: L must be >= 2");
    TorusLattice lat;
    lat.L = L;
    const int N = L * L;
    lat.bonds.resize(2 * N);
    for (int y = 0; y < L; ++y) {
        for (int x = 0; x < L; ++x) {
            int s = lat.site(x, y);
            lat.bonds[2 * s] = {s, lat.site(x + 1, y), x, y, false};
            lat.bonds[2 * s + 1] = {s, lat.site(x, y + 1), x, y, true};
        }
    }
    lat.star_bonds.resize(N);
    lat.plaq_bonds.resize(N);
    for (int y = 0; y < L; ++y) {
        for (int x = 0; x < L; ++x) {
            int s = lat.site(x, y);
            lat.star_bonds[s] = {lat.hbond(x, y), lat.hbond(x - 1, y),
                                 lat.vbond(x, y), lat.vbond(x, y - 1)};
            lat.plaq_bonds[s] = {lat.hbond(x, y), lat.hbond(x, y + 1),
                                 lat.vbond(x, y), lat.vbond(x + 1, y)};
        }
    }
    return lat;
}

std::vector<int> sigma_from_theta(const TorusLattice& lat, const std::vector<int>& theta) {
    if (static_cast<int>(theta.size()) != lat.n_sites())
        throw InvalidParameterError("sigma_from_theta: theta size mismatch");
    std::vector<int> sigma(lat.n_bonds());
    for (int b = 0; b < lat.n_bonds(); ++b)
        sigma[b] = theta[lat.bonds[b].s0] * theta[lat.bonds[b].s1];
    return sigma;
}

WindingLoops winding_loops(const TorusLattice& lat) {
    WindingLoops w;
    for (int y = 0; y < lat.L; ++y) w.w1_bonds.push_back(lat.vbond(0, y));
    for (int x = 0; x < lat.L; ++x) w.w2_bonds.push_back(lat.hbond(x, 0));
    return w;
}

SectorLoops sector_loops(const TorusLattice& lat) {
    SectorLoops s;
    for (int x = 0; x < lat.L; ++x) s.x1_bonds.push_back(lat.vbond(x, 0));
    for (int y = 0; y < lat.L; ++y) s.x2_bonds.push_back(lat.hbond(0, y));
    return s;
}

namespace {

struct SideGraph {
    // connected components over sites using one side's bonds only
    std::vector<std::vector<int>> components; // non-single components, sorted
    std::vector<int> isolated;                // sites touching no bond of this side
};

SideGraph side_components(const TorusLattice& lat, const std::vector<char>& in_side) {
    const int N = lat.n_sites();
    UnionFind uf(N);
    std::vector<char> touched(N, 0);
    for (int b = 0; b < lat.n_bonds(); ++b) {
        if (!in_side[b]) continue;
        uf.unite(lat.bonds[b].s0, lat.bonds[b].s1);
        touched[lat.bonds[b].s0] = touched[lat.bonds[b].s1] = 1;
    }
    std::map<int, std::vector<int>> groups;
    for (int s = 0; s < N; ++s) groups[uf.find(s)].push_back(s);
    SideGraph g;
    for (auto& [root, sites] : groups) {
        bool any = false;
        for (int s : sites) any = any || touched[s];
        if (any)
            g.components.push_back(sites);
        else
            g.isolated.insert(g.isolated.end(), sites.begin(), sites.end());
    }
    // deterministic order: largest first, ties by smallest site index
    std::sort(g.components.begin(), g.components.end(), [](const auto& a, const auto& b) {
        if (a.size() != b.size()) return a.size() > b.size();
        return a.front() < b.front();
    });
    return g;
}

} // namespace

BipartitionGeometry make_bipartition(const TorusLattice& lat, const std::vector<int>& region_bonds) {
    const int NB = lat.n_bonds();
    const int N = lat.n_sites();
    std::vector<char> inA(NB, 0);
    for (int b : region_bonds) {
        if (b < 0 || b >= NB) throw InvalidParameterError("make_bipartition: bond index out of range");
        inA[b] = 1;
    }
    std::vector<char> inB(NB, 0);
    for (int b = 0; b < NB; ++b) inB[b] = !inA[b];

    BipartitionGeometry geo;
    for (int b = 0; b < NB; ++b) {
        if (inA[b]) geo.inside.bonds.push_back(b);
        else geo.outside.bonds.push_back(b);
    }
    geo.region_bonds = geo.inside.bonds;

    // per-site bond census
    std::vector<int> nA(N, 0);
    for (int b = 0; b < NB; ++b) {
        int cnt = inA[b] ? 1 : 0;
        nA[lat.bonds[b].s0] += cnt;
        nA[lat.bonds[b].s1] += cnt;
    }
    std::vector<char> is_boundary(N, 0);
    for (int s = 0; s < N; ++s) {
        if (nA[s] == 4) geo.inside.interior_sites.push_back(s);
        else if (nA[s] == 0) geo.outside.interior_sites.push_back(s);
        else { is_boundary[s] = 1; geo.boundary_sites.push_back(s); }
    }

    SideGraph agraph = side_components(lat, inA);
    SideGraph bgraph = side_components(lat, inB);

    auto fill_side = [&](BipartitionGeometry::Side& side, const SideGraph& other_graph) {
        // flip moves for this side = components of the other side's graph,
        // gauge-fixed by dropping the largest one
        if (other_graph.components.empty()) {
            side.halve = true;
            return;
        }
        for (std::size_t k = 1; k < other_graph.components.size(); ++k) {
            BipartitionGeometry::Component c;
            c.name = "c" + std::to_string(k - 1);
            c.sites = other_graph.components[k];
            for (int s : c.sites)
                if (is_boundary[s]) c.boundary_sites.push_back(s);
            side.flip_components.push_back(std::move(c));
        }
    };
    fill_side(geo.inside, bgraph);
    fill_side(geo.outside, agraph);

    // boundary components: boundary sites equivalent iff they share both the
    // A-side and the B-side component (this is the lattice version of "same
    // piece of boundary curve")
    std::vector<int> aid(N, -1), bid(N, -1);
    for (std::size_t k = 0; k < agraph.components.size(); ++k)
        for (int s : agraph.components[k]) aid[s] = static_cast<int>(k);
    for (std::size_t k = 0; k < bgraph.components.size(); ++k)
        for (int s : bgraph.components[k]) bid[s] = static_cast<int>(k);
    std::map<std::pair<int, int>, std::vector<int>> comps;
    for (int s : geo.boundary_sites) comps[{aid[s], bid[s]}].push_back(s);
    int idx = 0;
    for (auto& [key, sites] : comps) {
        BipartitionGeometry::Component c;
        c.name = "b" + std::to_string(idx++);
        c.sites = sites;
        c.boundary_sites = sites;
        geo.boundary_components.push_back(std::move(c));
    }
    return geo;
}

namespace {

int torus_dist(int a, int b, int L) {
    int d = std::abs(a - b) % L;
    return std::min(d, L - d);
}

std::vector<int> bonds_within(const TorusLattice& lat, const std::set<int>& sites) {
    std::vector<int> out;
    for (int b = 0; b < lat.n_bonds(); ++b)
        if (sites.count(lat.bonds[b].s0) && sites.count(lat.bonds[b].s1))
            out.push_back(b);
    return out;
}

void rename_component_containing(BipartitionGeometry& geo, int probe_site, const std::string& name) {
    for (auto& c : geo.boundary_components) {
        if (std::find(c.sites.begin(), c.sites.end(), probe_site) != c.sites.end()) {
            c.name = name;
            return;
        }
    }
}

} // namespace

std::array<BipartitionGeometry, 4> levin_wen_regions(const TorusLattice& lat, int r, int R) {
    const int L = lat.L;
    if (r < 1 || r >= R) throw InvalidGeometryError("levin_wen_regions: need 1 <= r < R");
    if (2 * R >= L) throw InvalidGeometryError("levin_wen_regions: need R < L/2");
    if (2 * R + 2 > L)
        throw InvalidGeometryError("levin_wen_regions: annulus leaves no exterior sites on this torus");

    const int cx = R, cy = R;
    std::set<int> annulus, slit_top, slit_bot;
    for (int y = 0; y < L; ++y) {
        for (int x = 0; x < L; ++x) {
            int d = std::max(torus_dist(x, cx, L), torus_dist(y, cy, L));
            if (d >= r && d <= R) annulus.insert(lat.site(x, y));
        }
    }
    for (int d = r; d <= R; ++d) {
        slit_top.insert(lat.site(cx, cy + d));
        slit_bot.insert(lat.site(cx, cy - d));
    }

    auto minus = [](std::set<int> a, const std::set<int>& b) {
        for (int s : b) a.erase(s);
        return a;
    };
    std::array<BipartitionGeometry, 4> regions = {
        make_bipartition(lat, bonds_within(lat, annulus)),
        make_bipartition(lat, bonds_within(lat, minus(annulus, slit_top))),
        make_bipartition(lat, bonds_within(lat, minus(annulus, slit_bot))),
        make_bipartition(lat, bonds_within(lat, minus(minus(annulus, slit_top), slit_bot)))};

    if (regions[0].boundary_components.size() != 2 ||
        regions[1].boundary_components.size() != 1 ||
        regions[2].boundary_components.size() != 1 ||
        regions[3].boundary_components.size() != 2)
        throw InvalidGeometryError("levin_wen_regions: unexpected boundary topology");

    rename_component_containing(regions[0], lat.site(cx + r, cy), "inner");
    rename_component_containing(regions[0], lat.site(cx + R, cy), "outer");
    regions[1].boundary_components[0].name = "boundary";
    regions[2].boundary_components[0].name = "boundary";
    rename_component_containing(regions[3], lat.site(cx - R, cy), "left");
    rename_component_containing(regions[3], lat.site(cx + R, cy), "right");
    return regions;
}

std::array<BipartitionGeometry, 4> minimal_regions_l3(const TorusLattice& lat) {
    if (lat.L != 3) throw InvalidGeometryError("minimal_regions_l3: requires L == 3");

    std::set<int> b1;
    for (int b : lat.star_bonds[lat.site(1, 1)]) b1.insert(b);
    b1.insert(lat.hbond(2, 0));
    b1.insert(lat.vbond(0, 2));

    std::vector<int> a1;
    for (int b = 0; b < lat.n_bonds(); ++b)
        if (!b1.count(b)) a1.push_back(b);

    // slits: the residual stars of two neighbors of the hole site
    std::set<int> slit_t = {lat.hbond(0, 0), lat.hbond(1, 0), lat.vbond(1, 2)}; // site (1,0)
    std::set<int> slit_b = {lat.vbond(0, 0), lat.vbond(0, 1), lat.hbond(2, 1)}; // site (0,1)

    auto remove = [&](const std::vector<int>& base, const std::set<int>& cut) {
        std::vector<int> out;
        for (int b : base)
            if (!cut.count(b)) out.push_back(b);
        return out;
    };
    std::vector<int> a2 = remove(a1, slit_t);
    std::vector<int> a3 = remove(a1, slit_b);
    std::vector<int> a4 = remove(a2, slit_b);

    std::array<BipartitionGeometry, 4> regions = {
        make_bipartition(lat, a1), make_bipartition(lat, a2),
        make_bipartition(lat, a3), make_bipartition(lat, a4)};
    rename_component_containing(regions[0], lat.site(1, 0), "inner");
    rename_component_containing(regions[0], lat.site(0, 0), "outer");
    return regions;
}

std::string lattice_to_json(const TorusLattice& lat) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["L"] = lat.L;
    nlohmann::json bonds = nlohmann::json::array();
    for (const auto& b : lat.bonds)
        bonds.push_back({b.s0, b.s1});
    j["bonds"] = bonds;
    return j.dump(2);
}

} // namespace toriclab
