#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "toriclab/disorder.hpp"
#include "toriclab/lattice.hpp"

namespace toriclab {

enum class EdModel { trbim, toric_field, toric_clean };

// Hamiltonians, all real symmetric in the computational (sigma^z / theta^z)
// basis:
//   trbim:        H = -lamA sum_s theta^x_s - sum_<ss'> h_ss' theta^z_s theta^z_s'
//   toric_field:  H = -lamA sum_s A_s - lamB sum_p B_p - sum_i h_i sigma^z_i
//   toric_clean:  toric_field with h = 0
struct HamiltonianSpec {
    EdModel model = EdModel::trbim;
    double lamA = 0.0;
    double lamB = 0.0;
    FieldRealization field;            // per-bond values (ignored for toric_clean)
    const TorusLattice* lat = nullptr;
    std::uint64_t gauge_mask = 0;      // trbim only: bonds with sign-flipped coupling
    bool even_parity_only = false;     // trbim only: restrict to the global-flip-even sector
};

struct Spectrum {
    std::vector<double> eigenvalues;        // ascending, k lowest
    std::vector<int> degeneracy_groups;     // group index per eigenvalue
    std::vector<double> residual_norms;     // ||H x - e x|| per pair
};

struct EdResult {
    Spectrum spectrum;
    std::vector<std::vector<double>> vectors; // eigenvectors (basis-ordered amplitudes)
    std::size_t dim = 0;
    bool dense = false;
};

struct EdBudget {
    int max_trbim_sites = 20;
    int max_toric_qubits = 20;
    std::size_t dense_dim = 1ULL << 12;
    int lanczos_m = 80;
    int lanczos_restarts = 40;
    double residual_rtol = 1e-9;
};

EdResult low_spectrum(const HamiltonianSpec& spec, int k, const EdBudget& budget = {});

// Compare the shifted low spectrum of the random-field toric code against
// the transverse-field RBIM prediction assembled from the four winding
// sectors (each with gauge-flipped couplings, even parity). The mapping is
// exact whenever the lowest k levels live in the B_p=+1 block, so the
// deviation measures exactly the defect-sector crossing.
struct DualMappingReport {
    std::vector<double> eq13_shifted;   // k lowest of Eq.(13) + lamB*L^2
    std::vector<double> dual_levels;    // k lowest of the sector-resolved dual
    double max_rel_deviation = 0.0;
    double ground_sector_weight = 0.0;  // ground-state weight in the B_p=+1 block
};

DualMappingReport verify_dual_mapping(const TorusLattice& lat, double lamA, double lamB,
                                      const FieldRealization& field, int k,
                                      const EdBudget& budget = {});

struct ClassicalGroundReport {
    std::uint64_t sigma_config = 0; // one minimizer (bit set <=> sigma = -1)
    double energy = 0.0;
    bool all_plaquettes_positive = false; // true if some minimizer satisfies B_p=+1 everywhere
};

// Exact minimizer of -lamB sum_p B_p - sum_i h_i sigma_i over all sigma.
ClassicalGroundReport classical_field_ground(const TorusLattice& lat, double lamB,
                                             const FieldRealization& field);

// Smallest lamB (by bisection over the provably monotone predicate) at which
// the classical minimizer satisfies B_p = +1 everywhere.
double polarized_phase_crossover(const TorusLattice& lat, const FieldRealization& field,
                                 double lam_max = 16.0, int iters = 24);

struct EaOrderParameter {
    double q = 0.0;
    bool degenerate = false; // maximized over a degenerate multiplet
};

// q = (1/N) sum_s <theta^z_s>^2 on the trbim ground state; within a
// degenerate ground multiplet the value is maximized over the multiplet.
EaOrderParameter ea_order_parameter(const TorusLattice& lat, const EdResult& result);

// The three excitation gaps of exp(-sum_{i in star} h sigma^z_i) on one
// star named in the comparison of deformation types: the vanishing first
// gap and the two exponentially growing ones.
std::array<double, 3> single_star_gap(double h);

} // namespace toriclab
