#include "toriclab/rbim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <unordered_map>

#include "toriclab/errors.hpp"
#include "toriclab/numeric.hpp"
#include "toriclab/rng.hpp"

namespace toriclab {

namespace {

constexpr double kLn2 = 0.6931471805599453094;

std::vector<signed char> resolve_clamps(const TorusLattice& lat, const BoundarySpec& bc) {
    std::vector<signed char> clamp(lat.n_sites(), 0);
    for (auto [s, v] : bc.fixed) {
        if (s < 0 || s >= lat.n_sites())
            throw InvalidParameterError("boundary spec: unknown fixed site");
        if (v != 1 && v != -1)
            throw InvalidParameterError("boundary spec: fixed value must be +-1");
        if (clamp[s] != 0 && clamp[s] != v)
            throw InvalidParameterError("boundary spec: conflicting values for one site");
        clamp[s] = static_cast<signed char>(v);
    }
    for (int s : bc.twist_sites) {
        if (s < 0 || s >= lat.n_sites() || clamp[s] == 0)
            throw InvalidParameterError("boundary spec: twist site is not a fixed site");
        clamp[s] = static_cast<signed char>(-clamp[s]);
    }
    return clamp;
}

// Streaming log-sum-exp over a Gray-code walk of the free sites.
// `bond_mask[b]` selects which bonds contribute to the energy.
double brute_log_z(const TorusLattice& lat, const std::vector<double>& beta,
                   const std::vector<char>& bond_mask, const std::vector<signed char>& clamp,
                   const std::vector<int>& free_sites, int max_free) {
    const int nf = static_cast<int>(free_sites.size());
    if (nf > max_free) throw BudgetError("brute partition sum: too many free sites");

    std::vector<int> theta(lat.n_sites(), 1);
    for (int s = 0; s < lat.n_sites(); ++s)
        if (clamp[s] != 0) theta[s] = clamp[s];

    // adjacency restricted to contributing bonds
    std::vector<std::array<std::pair<int, double>, 4>> adj(lat.n_sites());
    std::vector<int> deg(lat.n_sites(), 0);
    double e = 0.0;
    for (int b = 0; b < lat.n_bonds(); ++b) {
        if (!bond_mask[b]) continue;
        int s0 = lat.bonds[b].s0, s1 = lat.bonds[b].s1;
        adj[s0][deg[s0]++] = {s1, beta[b]};
        adj[s1][deg[s1]++] = {s0, beta[b]};
        e += beta[b] * theta[s0] * theta[s1];
    }

    double m = e, acc = 1.0; // online LSE
    const std::uint64_t total = 1ULL << nf;
    for (std::uint64_t k = 1; k < total; ++k) {
        int s = free_sites[std::countr_zero(k)];
        double h = 0.0;
        for (int d = 0; d < deg[s]; ++d) h += adj[s][d].second * theta[adj[s][d].first];
        e += -2.0 * theta[s] * h;
        theta[s] = -theta[s];
        if (e <= m) {
            acc += std::exp(e - m);
        } else {
            acc = acc * std::exp(m - e) + 1.0;
            m = e;
        }
    }
    return m + std::log(acc);
}

// Exact transfer evaluation on the torus: accumulate the column-to-column
// operator as a dense 2^L x 2^L matrix (row = current column configuration,
// bit y set <=> spin -1), then close the trace. Clamped sites project rows.
double transfer_log_z(const TorusLattice& lat, const std::vector<double>& beta,
                      const std::vector<char>& bond_mask, const std::vector<signed char>& clamp,
                      int max_L) {
    const int L = lat.L;
    if (L > max_L) throw BudgetError("transfer partition sum: L exceeds transfer budget");
    const std::size_t D = 1ULL << L;

    std::vector<double> M(D * D, 0.0);
    for (std::size_t i = 0; i < D; ++i) M[i * D + i] = 1.0;
    double logscale = 0.0;

    std::vector<double> diag(D);
    for (int x = 0; x < L; ++x) {
        // intra-column vertical bonds + clamps of column x
        std::fill(diag.begin(), diag.end(), 1.0);
        for (std::size_t cfg = 0; cfg < D; ++cfg) {
            double e = 0.0;
            for (int y = 0; y < L; ++y) {
                int b = lat.vbond(x, y);
                if (!bond_mask[b]) continue;
                int sy = ((cfg >> y) & 1) ? -1 : 1;
                int sy1 = ((cfg >> ((y + 1) % L)) & 1) ? -1 : 1;
                e += beta[b] * sy * sy1;
            }
            diag[cfg] = std::exp(e);
            for (int y = 0; y < L; ++y) {
                signed char c = clamp[lat.site(x, y)];
                if (c == 0) continue;
                int sy = ((cfg >> y) & 1) ? -1 : 1;
                if (sy != c) { diag[cfg] = 0.0; break; }
            }
        }
        for (std::size_t i = 0; i < D; ++i) {
            if (diag[i] == 0.0) {
                std::fill(M.begin() + i * D, M.begin() + (i + 1) * D, 0.0);
            } else if (diag[i] != 1.0) {
                for (std::size_t j = 0; j < D; ++j) M[i * D + j] *= diag[i];
            }
        }
        // inter-column horizontal bonds, one site at a time
        for (int y = 0; y < L; ++y) {
            int b = lat.hbond(x, y);
            double w = bond_mask[b] ? beta[b] : 0.0;
            double ep = std::exp(w), em = std::exp(-w);
            const std::size_t bit = 1ULL << y;
            for (std::size_t i = 0; i < D; ++i) {
                if (i & bit) continue;
                double* r0 = &M[i * D];
                double* r1 = &M[(i | bit) * D];
                for (std::size_t j = 0; j < D; ++j) {
                    double a = r0[j], c = r1[j];
                    r0[j] = ep * a + em * c;
                    r1[j] = em * a + ep * c;
                }
            }
        }
        double mx = 0.0;
        for (double v : M) mx = std::max(mx, std::abs(v));
        if (mx > 0.0) {
            for (double& v : M) v /= mx;
            logscale += std::log(mx);
        }
    }
    double tr = 0.0;
    for (std::size_t i = 0; i < D; ++i) tr += M[i * D + i];
    return logscale + std::log(tr);
}

struct SubsetProblem {
    std::vector<char> bond_mask;
    std::vector<char> involved; // per site
    std::vector<int> free_involved;
    int uninvolved_unclamped = 0;
};

SubsetProblem subset_problem(const TorusLattice& lat, const std::vector<int>& bonds,
                             const std::vector<signed char>& clamp) {
    SubsetProblem p;
    p.bond_mask.assign(lat.n_bonds(), 0);
    p.involved.assign(lat.n_sites(), 0);
    for (int b : bonds) {
        p.bond_mask[b] = 1;
        p.involved[lat.bonds[b].s0] = 1;
        p.involved[lat.bonds[b].s1] = 1;
    }
    for (int s = 0; s < lat.n_sites(); ++s) {
        if (p.involved[s]) {
            if (clamp[s] == 0) p.free_involved.push_back(s);
        } else if (clamp[s] == 0) {
            ++p.uninvolved_unclamped;
        }
    }
    return p;
}

} // namespace

BoundarySpec boundary_from_theta(const BipartitionGeometry& geo, const std::vector<int>& theta,
                                 const std::string& twisted_component) {
    BoundarySpec bc;
    for (int s : geo.boundary_sites) bc.fixed.emplace_back(s, theta[s]);
    if (!twisted_component.empty()) {
        const BipartitionGeometry::Component* found = nullptr;
        for (const auto& c : geo.boundary_components)
            if (c.name == twisted_component) found = &c;
        if (!found)
            throw InvalidParameterError("boundary_from_theta: no boundary component named '" +
                                        twisted_component + "'");
        bc.twist_sites = found->boundary_sites;
    }
    return bc;
}

PartitionResult log_partition_brute(const TorusLattice& lat, const CouplingField& couplings,
                                    const BoundarySpec& bc, const PartitionBudget& budget) {
    auto clamp = resolve_clamps(lat, bc);
    std::vector<char> mask(lat.n_bonds(), 1);
    std::vector<int> free_sites;
    for (int s = 0; s < lat.n_sites(); ++s)
        if (clamp[s] == 0) free_sites.push_back(s);
    PartitionResult r;
    r.log_z = brute_log_z(lat, couplings.values, mask, clamp, free_sites,
                          budget.max_brute_free_sites);
    r.method = PartitionResult::Method::brute;
    r.constrained_site_count = lat.n_sites() - static_cast<int>(free_sites.size());
    return r;
}

PartitionResult log_partition_transfer(const TorusLattice& lat, const CouplingField& couplings,
                                       const BoundarySpec& bc, const PartitionBudget& budget) {
    auto clamp = resolve_clamps(lat, bc);
    std::vector<char> mask(lat.n_bonds(), 1);
    PartitionResult r;
    r.log_z = transfer_log_z(lat, couplings.values, mask, clamp, budget.max_transfer_L);
    r.method = PartitionResult::Method::transfer;
    int fixed = 0;
    for (auto c : clamp) fixed += (c != 0);
    r.constrained_site_count = fixed;
    return r;
}

double clamped_subset_log_z(const TorusLattice& lat, const std::vector<double>& beta,
                            const std::vector<int>& bonds, const std::vector<signed char>& clamp,
                            PartitionEngine engine, const PartitionBudget& budget) {
    SubsetProblem p = subset_problem(lat, bonds, clamp);
    bool use_brute;
    switch (engine) {
        case PartitionEngine::brute: use_brute = true; break;
        case PartitionEngine::transfer: use_brute = false; break;
        default:
            use_brute = static_cast<int>(p.free_involved.size()) <= budget.max_brute_free_sites;
    }
    if (use_brute)
        return brute_log_z(lat, beta, p.bond_mask, clamp, p.free_involved,
                           budget.max_brute_free_sites);
    // the transfer sums every unclamped site; uninvolved ones contribute a
    // free factor 2 each that the subset sum must not count
    double lz = transfer_log_z(lat, beta, p.bond_mask, clamp, budget.max_transfer_L);
    return lz - kLn2 * p.uninvolved_unclamped;
}

double side_log_z(const TorusLattice& lat, const std::vector<double>& beta,
                  const BipartitionGeometry::Side& side, const std::vector<int>& boundary_sites,
                  const std::vector<int>& theta, const PartitionBudget& budget) {
    std::vector<signed char> clamp(lat.n_sites(), 0);
    for (int s : boundary_sites) clamp[s] = static_cast<signed char>(theta[s]);

    const int k = static_cast<int>(side.flip_components.size());
    std::vector<double> terms;
    terms.reserve(1ULL << k);
    for (std::uint32_t eps = 0; eps < (1U << k); ++eps) {
        for (int i = 0; i < k; ++i) {
            if (!((eps >> i) & 1)) continue;
            for (int s : side.flip_components[i].boundary_sites)
                clamp[s] = static_cast<signed char>(-clamp[s]);
        }
        terms.push_back(clamped_subset_log_z(lat, beta, side.bonds, clamp,
                                             PartitionEngine::auto_select, budget));
        for (int i = 0; i < k; ++i) { // undo
            if (!((eps >> i) & 1)) continue;
            for (int s : side.flip_components[i].boundary_sites)
                clamp[s] = static_cast<signed char>(-clamp[s]);
        }
    }
    double lz = log_sum_exp(terms);
    if (side.halve) lz -= kLn2;
    return lz;
}

double log2_ratio(const TorusLattice& lat, const std::vector<double>& beta,
                  const std::array<BipartitionGeometry, 4>& regions, const std::vector<int>& theta,
                  const PartitionBudget& budget) {
    double lr = 0.0;
    for (int i = 0; i < 4; ++i) {
        double s = side_log_z(lat, beta, regions[i].inside, regions[i].boundary_sites, theta, budget) +
                   side_log_z(lat, beta, regions[i].outside, regions[i].boundary_sites, theta, budget);
        lr += (i == 0 || i == 3) ? s : -s;
    }
    return lr / kLn2;
}

namespace {

std::vector<int> boundary_union(const std::array<BipartitionGeometry, 4>& regions) {
    std::vector<char> mark;
    for (const auto& g : regions)
        for (int s : g.boundary_sites) {
            if (static_cast<int>(mark.size()) <= s) mark.resize(s + 1, 0);
            mark[s] = 1;
        }
    std::vector<int> out;
    for (int s = 0; s < static_cast<int>(mark.size()); ++s)
        if (mark[s]) out.push_back(s);
    return out;
}

struct KeyAcc { // online log-sum-exp accumulator per boundary key
    double m = -std::numeric_limits<double>::infinity();
    double s = 0.0;
    void add(double e) {
        if (e <= m) {
            s += std::exp(e - m);
        } else {
            s = s * std::exp(m - e) + 1.0;
            m = e;
        }
    }
    double log_total() const { return m + std::log(s); }
};

} // namespace

TopoEntropyResult topo_entropy_exact(const TorusLattice& lat, const CouplingField& couplings,
                                     const std::array<BipartitionGeometry, 4>& regions,
                                     TopoSampler sampler, const TopoBudget& budget,
                                     std::uint64_t mc_seed) {
    const int N = lat.n_sites();
    const std::vector<double>& beta = couplings.values;
    std::vector<int> bu = boundary_union(regions);

    auto theta_from_key = [&](std::uint64_t key) {
        std::vector<int> theta(N, 1);
        for (std::size_t i = 0; i < bu.size(); ++i)
            if ((key >> i) & 1) theta[bu[i]] = -1;
        return theta;
    };
    std::unordered_map<std::uint64_t, double> ratio_cache;
    auto log2r_for_key = [&](std::uint64_t key) {
        auto it = ratio_cache.find(key);
        if (it != ratio_cache.end()) return it->second;
        double v = log2_ratio(lat, beta, regions, theta_from_key(key), budget.partition);
        ratio_cache.emplace(key, v);
        return v;
    };

    TopoEntropyResult res;
    if (sampler == TopoSampler::enumerate_all) {
        if (N > budget.max_enum_sites)
            throw BudgetError("topo_entropy_exact: lattice too large for full enumeration");
        if (static_cast<int>(bu.size()) > budget.max_enum_boundary)
            throw BudgetError("topo_entropy_exact: boundary too large for full enumeration");
        res.sampler = "enumerate";

        std::vector<int> theta(N, 1);
        std::vector<int> site_to_keybit(N, -1);
        for (std::size_t i = 0; i < bu.size(); ++i) site_to_keybit[bu[i]] = static_cast<int>(i);

        double e = 0.0;
        for (int b = 0; b < lat.n_bonds(); ++b)
            e += beta[b] * theta[lat.bonds[b].s0] * theta[lat.bonds[b].s1];

        std::unordered_map<std::uint64_t, KeyAcc> acc;
        std::uint64_t key = 0;
        acc[key].add(e);
        const std::uint64_t total = 1ULL << N;
        for (std::uint64_t k = 1; k < total; ++k) {
            int s = std::countr_zero(k);
            double h = 0.0;
            for (int b : lat.star_bonds[s]) {
                const auto& bo = lat.bonds[b];
                h += beta[b] * theta[bo.s0 == s ? bo.s1 : bo.s0];
            }
            e += -2.0 * theta[s] * h;
            theta[s] = -theta[s];
            if (site_to_keybit[s] >= 0) key ^= 1ULL << site_to_keybit[s];
            acc[key].add(e);
        }

        double M = -std::numeric_limits<double>::infinity();
        for (const auto& [k2, a] : acc) M = std::max(M, a.log_total());
        double wsum = 0.0, vsum = 0.0;
        for (const auto& [k2, a] : acc) {
            double w = std::exp(a.log_total() - M);
            wsum += w;
            vsum += w * log2r_for_key(k2);
        }
        res.s_topo = vsum / wsum;
        res.n_samples = static_cast<long long>(total);
        res.distinct_boundaries = static_cast<long long>(acc.size());
        return res;
    }

    // Boltzmann Monte Carlo over theta with deterministic seeding.
    res.sampler = "boltzmann_mc";
    const int chains = std::max(1, budget.chains);
    std::vector<std::vector<double>> samples(chains);

    for (int c = 0; c < chains; ++c) {
        CounterRng rng(mc_seed, 0x746F706FULL + static_cast<std::uint64_t>(c));
        std::vector<int> theta(N);
        for (int s = 0; s < N; ++s) theta[s] = rng.next_uniform() < 0.5 ? 1 : -1;
        auto sweep = [&]() {
            for (int s = 0; s < N; ++s) {
                double h = 0.0;
                for (int b : lat.star_bonds[s]) {
                    const auto& bo = lat.bonds[b];
                    h += beta[b] * theta[bo.s0 == s ? bo.s1 : bo.s0];
                }
                double de = -2.0 * theta[s] * h;
                if (de >= 0.0 || rng.next_uniform() < std::exp(de)) theta[s] = -theta[s];
            }
        };
        for (int t = 0; t < budget.burn_sweeps; ++t) sweep();
        samples[c].reserve(budget.n_samples);
        for (int t = 0; t < budget.n_samples; ++t) {
            for (int u = 0; u < budget.stride_sweeps; ++u) sweep();
            std::uint64_t key = 0;
            for (std::size_t i = 0; i < bu.size(); ++i)
                if (theta[bu[i]] < 0) key |= 1ULL << i;
            samples[c].push_back(log2r_for_key(key));
        }
    }

    // mean, batch-means stderr, split-chain Rhat
    long long n = 0;
    double mean = 0.0;
    for (const auto& ch : samples)
        for (double v : ch) { mean += v; ++n; }
    mean /= static_cast<double>(n);

    const int nb = 20;
    std::vector<double> batch_means;
    for (const auto& ch : samples) {
        int bs = static_cast<int>(ch.size()) / nb;
        if (bs == 0) continue;
        for (int b = 0; b < nb; ++b) {
            double m2 = 0.0;
            for (int i = b * bs; i < (b + 1) * bs; ++i) m2 += ch[i];
            batch_means.push_back(m2 / bs);
        }
    }
    double bm = 0.0;
    for (double v : batch_means) bm += v;
    bm /= static_cast<double>(batch_means.size());
    double bv = 0.0;
    for (double v : batch_means) bv += (v - bm) * (v - bm);
    double nbm = static_cast<double>(batch_means.size());
    res.stderr_ = std::sqrt(bv / (nbm * (nbm - 1.0)));

    // split each chain in half -> 2*chains segments
    std::vector<double> seg_mean, seg_var;
    std::size_t seg_len = samples[0].size() / 2;
    for (const auto& ch : samples) {
        for (int half = 0; half < 2; ++half) {
            double sm = 0.0;
            for (std::size_t i = half * seg_len; i < (half + 1) * seg_len; ++i) sm += ch[i];
            sm /= static_cast<double>(seg_len);
            double sv = 0.0;
            for (std::size_t i = half * seg_len; i < (half + 1) * seg_len; ++i)
                sv += (ch[i] - sm) * (ch[i] - sm);
            sv /= static_cast<double>(seg_len - 1);
            seg_mean.push_back(sm);
            seg_var.push_back(sv);
        }
    }
    double gm = 0.0;
    for (double v : seg_mean) gm += v;
    gm /= static_cast<double>(seg_mean.size());
    double B = 0.0, W = 0.0;
    for (std::size_t i = 0; i < seg_mean.size(); ++i) {
        B += (seg_mean[i] - gm) * (seg_mean[i] - gm);
        W += seg_var[i];
    }
    B *= static_cast<double>(seg_len) / (seg_mean.size() - 1.0);
    W /= static_cast<double>(seg_mean.size());
    if (W < 1e-24) {
        res.rhat = 1.0; // constant observable: converged by definition
    } else {
        double var_plus = (static_cast<double>(seg_len - 1) / seg_len) * W + B / seg_len;
        res.rhat = std::sqrt(var_plus / W);
    }
    res.s_topo = mean;
    res.n_samples = n;
    res.distinct_boundaries = static_cast<long long>(ratio_cache.size());
    if (res.rhat > budget.rhat_threshold)
        throw DiagnosticError("topo_entropy_exact: MC did not converge (Rhat = " +
                              std::to_string(res.rhat) + ")");
    return res;
}

} // namespace toriclab
