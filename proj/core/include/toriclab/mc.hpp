#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "toriclab/disorder.hpp"
#include "toriclab/lattice.hpp"

namespace toriclab {

struct McRunConfig {
    int L = 8;
    CouplingField couplings;          // J values per bond (energy units)
    std::vector<double> temps;        // strictly ascending temperature grid
    int sweeps_equil = 2000;
    int sweeps_measure = 10000;
    int measure_stride = 2;           // sweeps between measurements
    std::uint64_t seed = 1;
    int jackknife_blocks = 20;
};

struct McTemperatureRow {
    double T = 0.0;
    double e_per_site = 0.0, e_err = 0.0;
    double abs_m = 0.0, abs_m_err = 0.0;
    double m2 = 0.0, m2_err = 0.0;
    double m4 = 0.0, m4_err = 0.0;
    double binder = 0.0, binder_err = 0.0;
    double acc_flip = 0.0;
    double acc_exchange_up = 0.0; // exchange acceptance with the next-hotter replica
    double tau_int_m = 0.0;       // integrated autocorrelation estimate of |m|
};

struct McObservables {
    std::vector<McTemperatureRow> rows;
    bool acceptance_warning = false; // some neighbor pair outside [0.2, 0.6]
    bool acceptance_collapse = false; // some neighbor pair below 0.02
};

// Single-spin-flip Metropolis with replica exchange across the temperature
// grid. Fully deterministic given the config.
McObservables parallel_tempering_run(const McRunConfig& cfg);

struct BinderCrossing {
    double t_c = 0.0;
    double t_c_err = 0.0;
    std::vector<int> sizes;
    bool found = false;
    std::string diagnostic;
};

struct BinderDefaults {
    int n_temps = 13;
    int sweeps_equil = 4000;
    int sweeps_measure = 60000;
    int measure_stride = 2;
    int bootstrap = 200;
    std::uint64_t seed = 7;
};

// Crossing of the Binder cumulant curves of two or more sizes inside the
// temperature window; disorder is quenched-averaged over one realization per
// (size, seed) here, with p = 0 reproducing the clean Ising model.
BinderCrossing binder_crossing(double p, const std::vector<int>& sizes,
                               std::pair<double, double> t_window,
                               const BinderDefaults& defaults = {});

} // namespace toriclab
