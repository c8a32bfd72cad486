#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "toriclab/lattice.hpp"

namespace toriclab {

// One quenched realization of per-bond couplings or fields, together with
// enough metadata to regenerate it bit-exactly. Values are serialized in
// full, so stored results stay auditable even if the generator changes.
struct Realization {
    int L = 0;
    std::string distribution; // "bipartite" | "diluted" | "uniform"
    double p = 0.0;
    double strength = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t index = 0;          // realization index within an ensemble
    std::vector<double> values;       // one entry per bond
    double empirical_fraction = 0.0;  // measured fraction of flipped (or nonzero) bonds
};

// Couplings beta_ss' (dimensionless, J/T) live on bonds read as site pairs.
using CouplingField = Realization;
// Fields h_i (energy units) live on the sigma spins, i.e. also on bonds.
using FieldRealization = Realization;

// Each bond takes -strength with probability p, +strength otherwise.
Realization sample_bipartite(const TorusLattice& lat, double p, double strength,
                             std::uint64_t seed, std::uint64_t index = 0);

// Each bond takes strength h with probability p, 0 otherwise.
Realization sample_diluted(const TorusLattice& lat, double p, double h,
                           std::uint64_t seed, std::uint64_t index = 0);

// Uniform value on every bond (the clean limit; provided for scans).
Realization uniform_field(const TorusLattice& lat, double value);

std::string realization_to_json(const Realization& r);
Realization realization_from_json(const std::string& text);

} // namespace toriclab
