#pragma once

#include <cstdint>
#include <vector>

#include "toriclab/gf2.hpp"
#include "toriclab/lattice.hpp"

namespace toriclab {

struct PauliRow {
    Gf2Row x, z; // over n qubits each

    explicit PauliRow(int n = 0) : x(n), z(n) {}
    int symplectic(const PauliRow& o) const { return (x.dot(o.z) ^ z.dot(o.x)); }
};

// Star and plaquette generators of the toric code, plus any sigma^z pins
// added afterwards. Pins are kept both as stabilizer rows (inside
// `generators`) and as (qubit, value) records for bookkeeping.
struct StabilizerCode {
    int n = 0;
    std::vector<PauliRow> generators;
    std::vector<std::pair<int, int>> pins; // (bond qubit, +-1)
};

StabilizerCode build_toric_stabilizers(const TorusLattice& lat);

// Add single-qubit sigma^z constraints. Generators that anticommute with a
// pin are replaced by the commuting combinations found by GF(2) elimination
// of the syndrome map (for stars this is the pairwise merging along pinned
// bonds). Contradictory pins on one bond raise InvalidParameterError.
StabilizerCode pin_spins(const StabilizerCode& code, const std::vector<std::pair<int, int>>& pins);

// k = n - rank of the generator matrix over GF(2).
int logical_qubit_count(const StabilizerCode& code);

bool all_generators_commute(const StabilizerCode& code);

// Percolation of a pinned-bond set. Two pinned bonds are adjacent when they
// share a star (the connectivity through which pinning obstructs star flips);
// plaquette sharing is offered for sensitivity checks.
enum class BondAdjacency { shared_star, shared_plaquette };

struct PinWrap {
    bool wraps_dir1 = false; // winds in y
    bool wraps_dir2 = false; // winds in x
    int largest_cluster = 0;
};

PinWrap pinned_wrap_flags(const TorusLattice& lat, const std::vector<int>& pinned_bonds,
                          BondAdjacency adjacency = BondAdjacency::shared_star);

} // namespace toriclab
