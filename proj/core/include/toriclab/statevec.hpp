#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "toriclab/disorder.hpp"
#include "toriclab/lattice.hpp"

namespace toriclab {

// Dense amplitude vector over the 2^{2L^2} sigma-spin configurations.
// Bit b of a configuration index set means sigma_b = -1 (reference state
// has all spins +Z). Amplitudes are real and nonnegative here.
struct StateVector {
    const TorusLattice* lat = nullptr;
    std::vector<double> amplitudes;
    bool normalized = false;

    int n_qubits() const { return lat ? lat->n_bonds() : 0; }
};

inline constexpr int kMaxStateQubits = 20;

// Deformed ground state in topological sector (i,j): the winding strings
// w1^i w2^j (dual-loop bit flips) act on the reference before the star
// group is summed with weights exp(1/2 sum_j beta_j sigma_j).
StateVector build_ground_state(const TorusLattice& lat, const CouplingField& couplings,
                               int sector_i, int sector_j);

// von Neumann entropy (bits) of the reduced state on region_bonds.
double entanglement_entropy(const StateVector& state, const std::vector<int>& region_bonds);

// -S(A1) + S(A2) + S(A3) - S(A4) for a Levin-Wen quadruple.
double topo_entropy_direct(const StateVector& state,
                           const std::array<BipartitionGeometry, 4>& regions);

// Maximum trace distance between the four sector states' reduced density
// matrices on region_bonds.
double indistinguishability_gap(const std::array<StateVector, 4>& states,
                                const std::vector<int>& region_bonds);

} // namespace toriclab
