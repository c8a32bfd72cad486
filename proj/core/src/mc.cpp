#include "toriclab/mc.hpp"

#include <algorithm>
#include <cmath>

#include "toriclab/errors.hpp"
#include "toriclab/numeric.hpp"
#include "toriclab/rng.hpp"

namespace toriclab {

namespace {

struct Replica {
    std::vector<signed char> theta;
    double energy = 0.0;
    CounterRng rng;
};

double full_energy(const TorusLattice& lat, const std::vector<double>& J,
                   const std::vector<signed char>& theta) {
    double e = 0.0;
    for (int b = 0; b < lat.n_bonds(); ++b)
        e -= J[b] * theta[lat.bonds[b].s0] * theta[lat.bonds[b].s1];
    return e;
}

} // namespace

McObservables parallel_tempering_run(const McRunConfig& cfg) {
    if (cfg.temps.empty()) throw InvalidParameterError("mc: empty temperature grid");
    for (std::size_t i = 1; i < cfg.temps.size(); ++i)
        if (!(cfg.temps[i] > cfg.temps[i - 1]))
            throw InvalidParameterError("mc: temperature grid must be strictly ascending");
    if (cfg.sweeps_equil <= 0 || cfg.sweeps_measure <= 0 || cfg.measure_stride <= 0)
        throw InvalidParameterError("mc: sweep counts must be positive");

    TorusLattice lat = build_torus(cfg.L);
    if (static_cast<int>(cfg.couplings.values.size()) != lat.n_bonds())
        throw InvalidParameterError("mc: coupling size mismatch");
    const std::vector<double>& J = cfg.couplings.values;
    const int N = lat.n_sites();
    const int R = static_cast<int>(cfg.temps.size());

    std::vector<Replica> reps;
    reps.reserve(R);
    for (int r = 0; r < R; ++r) {
        Replica rep{std::vector<signed char>(N), 0.0, CounterRng(cfg.seed, 100 + r)};
        for (int s = 0; s < N; ++s) rep.theta[s] = rep.rng.next_uniform() < 0.5 ? 1 : -1;
        rep.energy = full_energy(lat, J, rep.theta);
        reps.push_back(std::move(rep));
    }
    CounterRng xrng(cfg.seed, 7);

    std::vector<long long> flip_acc(R, 0), flip_tot(R, 0);
    std::vector<long long> ex_acc(R, 0), ex_tot(R, 0);

    auto sweep = [&](int r) {
        Replica& rep = reps[r];
        const double T = cfg.temps[r];
        for (int s = 0; s < N; ++s) {
            double h = 0.0;
            for (int b : lat.star_bonds[s]) {
                const auto& bo = lat.bonds[b];
                h += J[b] * rep.theta[bo.s0 == s ? bo.s1 : bo.s0];
            }
            double de = 2.0 * rep.theta[s] * h;
            ++flip_tot[r];
            if (de <= 0.0 || rep.rng.next_uniform() < std::exp(-de / T)) {
                rep.theta[s] = -rep.theta[s];
                rep.energy += de;
                ++flip_acc[r];
            }
        }
    };
    auto exchange = [&](int parity) {
        for (int r = parity; r + 1 < R; r += 2) {
            double dbeta = 1.0 / cfg.temps[r] - 1.0 / cfg.temps[r + 1];
            double de = reps[r].energy - reps[r + 1].energy;
            ++ex_tot[r];
            if (xrng.next_uniform() < std::exp(std::min(0.0, dbeta * de))) {
                std::swap(reps[r].theta, reps[r + 1].theta);
                std::swap(reps[r].energy, reps[r + 1].energy);
                ++ex_acc[r];
            }
        }
    };

    for (int t = 0; t < cfg.sweeps_equil; ++t) {
        for (int r = 0; r < R; ++r) sweep(r);
        exchange(t & 1);
    }

    const int nmeas = cfg.sweeps_measure / cfg.measure_stride;
    const int nb = std::max(2, cfg.jackknife_blocks);
    const int block_len = std::max(1, nmeas / nb);
    // per temperature: block sums of e, |m|, m2, m4 and a short |m| series
    std::vector<std::vector<std::vector<double>>> blocks(
        R, std::vector<std::vector<double>>(4, std::vector<double>(nb, 0.0)));
    std::vector<double> block_counts(nb, 0.0);
    std::vector<std::vector<double>> m_series(R);

    int taken = 0;
    for (int t = 0; t < cfg.sweeps_measure; ++t) {
        for (int r = 0; r < R; ++r) sweep(r);
        exchange((cfg.sweeps_equil + t) & 1);
        if ((t + 1) % cfg.measure_stride != 0) continue;
        if (taken >= nb * block_len) continue;
        int blk = std::min(taken / block_len, nb - 1);
        for (int r = 0; r < R; ++r) {
            double m = 0.0;
            for (int s = 0; s < N; ++s) m += reps[r].theta[s];
            m /= N;
            double am = std::abs(m);
            blocks[r][0][blk] += reps[r].energy / N;
            blocks[r][1][blk] += am;
            blocks[r][2][blk] += m * m;
            blocks[r][3][blk] += m * m * m * m;
            m_series[r].push_back(am);
        }
        block_counts[blk] += 1.0;
        ++taken;
    }

    McObservables obs;
    for (int r = 0; r < R; ++r) {
        McTemperatureRow row;
        row.T = cfg.temps[r];
        auto stat = [&](int q) {
            return jackknife({blocks[r][q]}, block_counts,
                             [](const std::vector<double>& m) { return m[0]; });
        };
        auto e = stat(0);
        row.e_per_site = e.mean; row.e_err = e.stderr_;
        auto am = stat(1);
        row.abs_m = am.mean; row.abs_m_err = am.stderr_;
        auto m2 = stat(2);
        row.m2 = m2.mean; row.m2_err = m2.stderr_;
        auto m4 = stat(3);
        row.m4 = m4.mean; row.m4_err = m4.stderr_;
        auto binder = jackknife({blocks[r][2], blocks[r][3]}, block_counts,
                                [](const std::vector<double>& m) {
                                    double q2 = m[0], q4 = m[1];
                                    return 1.0 - q4 / (3.0 * q2 * q2);
                                });
        row.binder = binder.mean; row.binder_err = binder.stderr_;
        row.acc_flip = flip_tot[r] ? static_cast<double>(flip_acc[r]) / flip_tot[r] : 0.0;
        row.acc_exchange_up = ex_tot[r] ? static_cast<double>(ex_acc[r]) / ex_tot[r] : 0.0;

        // integrated autocorrelation of |m| from the block/naive variance ratio
        const auto& ser = m_series[r];
        double mean = 0.0;
        for (double v : ser) mean += v;
        mean /= ser.size();
        double var = 0.0;
        for (double v : ser) var += (v - mean) * (v - mean);
        var /= (ser.size() - 1.0);
        double bvar = 0.0;
        for (int b = 0; b < nb; ++b) {
            double bm = blocks[r][1][b] / block_counts[b];
            bvar += (bm - mean) * (bm - mean);
        }
        bvar /= (nb - 1.0);
        row.tau_int_m = var > 0 ? 0.5 * bvar * block_len / var : 0.0;
        obs.rows.push_back(row);
    }
    for (int r = 0; r + 1 < R; ++r) {
        double a = obs.rows[r].acc_exchange_up;
        if (a < 0.2 || a > 0.6) obs.acceptance_warning = true;
        if (a < 0.02) obs.acceptance_collapse = true;
    }
    return obs;
}

BinderCrossing binder_crossing(double p, const std::vector<int>& sizes,
                               std::pair<double, double> t_window,
                               const BinderDefaults& defaults) {
    if (sizes.size() < 2)
        throw InvalidParameterError("binder_crossing: need at least two sizes");
    if (!(t_window.second > t_window.first))
        throw InvalidParameterError("binder_crossing: bad temperature window");

    std::vector<double> temps(defaults.n_temps);
    for (int i = 0; i < defaults.n_temps; ++i)
        temps[i] = t_window.first +
                   (t_window.second - t_window.first) * i / (defaults.n_temps - 1.0);

    std::vector<std::vector<double>> U(sizes.size()), Uerr(sizes.size());
    for (std::size_t si = 0; si < sizes.size(); ++si) {
        TorusLattice lat = build_torus(sizes[si]);
        McRunConfig cfg;
        cfg.L = sizes[si];
        cfg.couplings = sample_bipartite(lat, p, 1.0, prf(defaults.seed, sizes[si], 0), 0);
        cfg.temps = temps;
        cfg.sweeps_equil = defaults.sweeps_equil;
        cfg.sweeps_measure = defaults.sweeps_measure;
        cfg.measure_stride = defaults.measure_stride;
        cfg.seed = prf(defaults.seed, sizes[si], 1);
        McObservables obs = parallel_tempering_run(cfg);
        for (const auto& row : obs.rows) {
            U[si].push_back(row.binder);
            Uerr[si].push_back(row.binder_err);
        }
    }

    // crossing of the smallest and largest size curves
    const auto& U1 = U.front();
    const auto& U2 = U.back();
    const auto& E1 = Uerr.front();
    const auto& E2 = Uerr.back();

    auto crossing_from = [&](const std::vector<double>& u1,
                             const std::vector<double>& u2) -> std::optional<double> {
        for (int i = 0; i + 1 < defaults.n_temps; ++i) {
            double d0 = u1[i] - u2[i], d1 = u1[i + 1] - u2[i + 1];
            if (d0 == 0.0 && d1 == 0.0) continue;
            if (d0 * d1 <= 0.0 && d0 != d1) {
                // a crossing in the disordered tail is noise, not a transition
                if (std::max(u1[i], u2[i]) < 0.2) continue;
                double t = temps[i] + (temps[i + 1] - temps[i]) * d0 / (d0 - d1);
                return t;
            }
        }
        return std::nullopt;
    };

    BinderCrossing out;
    out.sizes = sizes;
    auto tc = crossing_from(U1, U2);
    if (!tc) {
        out.found = false;
        out.diagnostic = "no Binder crossing inside the temperature window";
        return out;
    }
    out.t_c = *tc;
    out.found = true;

    // parametric bootstrap over the measured errors
    std::vector<double> resampled;
    for (int bs = 0; bs < defaults.bootstrap; ++bs) {
        std::vector<double> u1(U1.size()), u2(U2.size());
        for (std::size_t i = 0; i < U1.size(); ++i) {
            // Box-Muller from the deterministic counter stream
            double a = prf_uniform(defaults.seed, 900 + bs, 2 * i);
            double b = prf_uniform(defaults.seed, 900 + bs, 2 * i + 1);
            double g1 = std::sqrt(-2.0 * std::log(a + 1e-300)) * std::cos(2 * M_PI * b);
            double g2 = std::sqrt(-2.0 * std::log(a + 1e-300)) * std::sin(2 * M_PI * b);
            u1[i] = U1[i] + E1[i] * g1;
            u2[i] = U2[i] + E2[i] * g2;
        }
        auto t = crossing_from(u1, u2);
        if (t) resampled.push_back(*t);
    }
    if (resampled.size() >= 10) {
        double m = 0.0;
        for (double v : resampled) m += v;
        m /= resampled.size();
        double var = 0.0;
        for (double v : resampled) var += (v - m) * (v - m);
        out.t_c_err = std::sqrt(var / (resampled.size() - 1.0));
    }
    return out;
}

} // namespace toriclab
