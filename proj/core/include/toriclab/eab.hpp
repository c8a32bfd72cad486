#pragma once

#include <cstdint>
#include <vector>

#include "toriclab/disorder.hpp"
#include "toriclab/lattice.hpp"

namespace toriclab {

// Complete ground-state manifold of the classical +-J Edwards-Anderson
// model, stored modulo the global spin flip. Energies are exact integers
// in units of |J|, so rigidity is tolerance-free. Besides an optional
// explicit state list (capped), the set carries per-bond satisfied-state
// counts, which determine the rigid lattice exactly.
struct GroundStateSet {
    double energy = 0.0;     // physical energy = strength * energy_int
    long long energy_int = 0;
    std::uint64_t count = 0; // ground states modulo global flip
    std::vector<std::uint64_t> sat_count; // per bond, modulo global flip
    std::vector<std::vector<signed char>> states; // explicit thetas (theta[0] = +1), up to cap
    enum class Method { exhaustive, branch_bound, transfer_count } method = Method::exhaustive;
    bool complete = false;
};

enum class EabMethod { auto_select, exhaustive, branch_bound, transfer_count };

struct EabBudget {
    int max_exhaustive_sites = 25;
    int max_branch_bound_sites = 64;
    int max_transfer_L = 10;
    std::size_t state_cap = 4096; // explicit states kept (counts stay exact beyond it)
};

GroundStateSet enumerate_ground_states(const TorusLattice& lat, const CouplingField& couplings,
                                       EabMethod method = EabMethod::auto_select,
                                       const EabBudget& budget = {});

enum class BondNature : std::uint8_t { always_satisfied, always_frustrated, mixed };

struct RigidLattice {
    std::vector<BondNature> classification; // per bond
    std::vector<int> rigid_bonds;           // non-mixed bonds
    double rigid_fraction = 0.0;
};

RigidLattice rigid_lattice(const GroundStateSet& gs, const CouplingField& couplings);

struct PercolationReport {
    std::vector<std::vector<int>> clusters; // site clusters joined by rigid bonds
    double largest_fraction = 0.0;          // largest cluster size / L^2
    bool wraps_dir1 = false;                // winds around the torus in y
    bool wraps_dir2 = false;                // winds around the torus in x
    bool spans_open = false;                // left-right spanning after cutting the torus
};

PercolationReport percolation_report(const RigidLattice& rigid, const TorusLattice& lat);

struct RigidScanRow {
    int L = 0;
    int n_ok = 0, n_failed = 0;
    double mean_rigid_fraction = 0.0;
    double wrap_either_prob = 0.0, wrap_either_err = 0.0;
    double wrap_both_prob = 0.0;
    double span_open_prob = 0.0;
    double mean_gs_count = 0.0;
};

// Ensemble scan over sizes; each sample derives its couplings from
// (master_seed, size, sample index). Aborts when >10% of samples fail.
std::vector<RigidScanRow> rigid_percolation_scan(double p, const std::vector<int>& sizes,
                                                 int n_samples, std::uint64_t master_seed,
                                                 const EabBudget& budget = {}, int threads = 1);

} // namespace toriclab
