#include "toriclab/stabilizer.hpp"

#include <algorithm>
#include <map>

#include "toriclab/errors.hpp"
#include "toriclab/union_find.hpp"

namespace toriclab {

StabilizerCode build_toric_stabilizers(const TorusLattice& lat) {
    StabilizerCode code;
    code.n = lat.n_bonds();
    for (int s = 0; s < lat.n_sites(); ++s) {
        PauliRow row(code.n);
        for (int b : lat.star_bonds[s]) row.x.flip(b);
        code.generators.push_back(std::move(row));
    }
    for (int p = 0; p < lat.n_plaquettes(); ++p) {
        PauliRow row(code.n);
        for (int b : lat.plaq_bonds[p]) row.z.flip(b);
        code.generators.push_back(std::move(row));
    }
    return code;
}

StabilizerCode pin_spins(const StabilizerCode& code, const std::vector<std::pair<int, int>>& pins) {
    std::map<int, int> pin_value;
    for (auto [q, v] : pins) {
        if (q < 0 || q >= code.n) throw InvalidParameterError("pin_spins: qubit out of range");
        if (v != 1 && v != -1) throw InvalidParameterError("pin_spins: pin value must be +-1");
        auto [it, fresh] = pin_value.emplace(q, v);
        if (!fresh && it->second != v)
            throw InvalidParameterError("pin_spins: contradictory pins on one bond");
    }
    if (pin_value.empty()) return code;

    const int np = static_cast<int>(pin_value.size());
    const int ng = static_cast<int>(code.generators.size());
    std::vector<int> pin_qubits;
    pin_qubits.reserve(np);
    for (auto& [q, v] : pin_value) pin_qubits.push_back(q);

    // syndrome of each generator against the pins, augmented with an
    // identity block so elimination reveals which combinations commute
    std::vector<Gf2Row> aug(ng, Gf2Row(np + ng));
    for (int i = 0; i < ng; ++i) {
        for (int j = 0; j < np; ++j)
            if (code.generators[i].x.get(pin_qubits[j])) aug[i].flip(j);
        aug[i].flip(np + i);
    }
    gf2_eliminate(aug);

    StabilizerCode out;
    out.n = code.n;
    out.pins = code.pins;
    for (auto& [q, v] : pin_value) out.pins.emplace_back(q, v);

    for (const auto& row : aug) {
        bool zero_syndrome = true;
        for (int j = 0; j < np; ++j)
            if (row.get(j)) { zero_syndrome = false; break; }
        if (!zero_syndrome) continue;
        PauliRow combo(code.n);
        bool nonempty = false;
        for (int i = 0; i < ng; ++i) {
            if (!row.get(np + i)) continue;
            combo.x ^= code.generators[i].x;
            combo.z ^= code.generators[i].z;
            nonempty = true;
        }
        if (nonempty && (combo.x.any() || combo.z.any()))
            out.generators.push_back(std::move(combo));
    }
    for (auto& [q, v] : pin_value) {
        PauliRow row(code.n);
        row.z.flip(q);
        out.generators.push_back(std::move(row));
    }
    return out;
}

int logical_qubit_count(const StabilizerCode& code) {
    const int n = code.n;
    std::vector<Gf2Row> rows;
    rows.reserve(code.generators.size());
    for (const auto& g : code.generators) {
        Gf2Row r(2 * n);
        for (int q = 0; q < n; ++q) {
            if (g.x.get(q)) r.flip(q);
            if (g.z.get(q)) r.flip(n + q);
        }
        rows.push_back(std::move(r));
    }
    return n - gf2_rank(std::move(rows));
}

bool all_generators_commute(const StabilizerCode& code) {
    for (std::size_t i = 0; i < code.generators.size(); ++i)
        for (std::size_t j = i + 1; j < code.generators.size(); ++j)
            if (code.generators[i].symplectic(code.generators[j])) return false;
    return true;
}

PinWrap pinned_wrap_flags(const TorusLattice& lat, const std::vector<int>& pinned_bonds,
                          BondAdjacency adjacency) {
    // cluster over bonds; displacements use doubled coordinates so bond
    // midpoints are integral (torus period 2L in each direction)
    const int nb = lat.n_bonds();
    std::vector<char> pinned(nb, 0);
    for (int b : pinned_bonds) pinned[b] = 1;

    auto rel_to_site = [&](int b, int s) -> std::pair<int, int> {
        const auto& bo = lat.bonds[b];
        if (bo.s0 == s) return bo.vertical ? std::pair{0, 1} : std::pair{1, 0};
        return bo.vertical ? std::pair{0, -1} : std::pair{-1, 0};
    };

    TorusUnionFind uf(nb);
    if (adjacency == BondAdjacency::shared_star) {
        for (int s = 0; s < lat.n_sites(); ++s) {
            int first = -1;
            for (int b : lat.star_bonds[s]) {
                if (!pinned[b]) continue;
                if (first < 0) { first = b; continue; }
                auto [x1, y1] = rel_to_site(first, s);
                auto [x2, y2] = rel_to_site(b, s);
                uf.unite(first, b, x2 - x1, y2 - y1);
            }
        }
    } else {
        for (int p = 0; p < lat.n_plaquettes(); ++p) {
            // positions of the four plaquette bonds relative to its center
            int first = -1, fx = 0, fy = 0;
            for (int k = 0; k < 4; ++k) {
                int b = lat.plaq_bonds[p][k];
                if (!pinned[b]) continue;
                static constexpr int off[4][2] = {{0, -1}, {0, 1}, {-1, 0}, {1, 0}};
                if (first < 0) { first = b; fx = off[k][0]; fy = off[k][1]; continue; }
                uf.unite(first, b, off[k][0] - fx, off[k][1] - fy);
            }
        }
    }

    PinWrap out;
    for (int b : pinned_bonds) {
        out.largest_cluster = std::max(out.largest_cluster, uf.component_size(b));
        if (uf.wraps_y(b)) out.wraps_dir1 = true;
        if (uf.wraps_x(b)) out.wraps_dir2 = true;
    }
    return out;
}

} // namespace toriclab
