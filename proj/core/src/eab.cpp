#include "toriclab/eab.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "toriclab/errors.hpp"
#include "toriclab/parallel.hpp"
#include "toriclab/rng.hpp"
#include "toriclab/union_find.hpp"

namespace toriclab {

namespace {

// +-J sign extraction; the EAB machinery is integer-exact and needs a pure
// bimodal realization.
std::pair<std::vector<int>, double> bond_signs(const TorusLattice& lat, const CouplingField& c) {
    if (static_cast<int>(c.values.size()) != lat.n_bonds())
        throw InvalidParameterError("eab: coupling size mismatch");
    double strength = 0.0;
    for (double v : c.values) strength = std::max(strength, std::abs(v));
    if (strength <= 0.0) throw InvalidParameterError("eab: all couplings vanish");
    std::vector<int> s(lat.n_bonds());
    for (int b = 0; b < lat.n_bonds(); ++b) {
        if (std::abs(std::abs(c.values[b]) - strength) > 0.0)
            throw InvalidParameterError("eab: couplings must be bimodal +-J");
        s[b] = c.values[b] > 0 ? 1 : -1;
    }
    return {s, strength};
}

struct Accumulator {
    long long best = std::numeric_limits<long long>::max();
    std::uint64_t count = 0;
    std::vector<std::uint64_t> sat;
    std::vector<std::vector<signed char>> states;
    std::size_t cap;
    const TorusLattice* lat;
    const std::vector<int>* signs;

    Accumulator(const TorusLattice& l, const std::vector<int>& s, std::size_t cap_)
        : sat(l.n_bonds(), 0), cap(cap_), lat(&l), signs(&s) {}

    void offer(long long e, const std::vector<int>& theta) {
        if (e > best) return;
        if (e < best) {
            best = e;
            count = 0;
            std::fill(sat.begin(), sat.end(), 0);
            states.clear();
        }
        ++count;
        for (int b = 0; b < lat->n_bonds(); ++b) {
            int tt = theta[lat->bonds[b].s0] * theta[lat->bonds[b].s1];
            if ((*signs)[b] * tt > 0) ++sat[b];
        }
        if (states.size() < cap) {
            std::vector<signed char> st(theta.size());
            for (std::size_t i = 0; i < theta.size(); ++i) st[i] = static_cast<signed char>(theta[i]);
            states.push_back(std::move(st));
        }
    }
};

// exact identity linking energy, count and satisfied-bond tallies; doubles
// as the completeness audit for every engine
void audit_or_throw(const TorusLattice& lat, const GroundStateSet& gs) {
    unsigned long long satsum = 0;
    for (auto v : gs.sat_count) satsum += v;
    long long lhs = 2 * static_cast<long long>(satsum) -
                    static_cast<long long>(lat.n_bonds()) * static_cast<long long>(gs.count);
    long long rhs = -gs.energy_int * static_cast<long long>(gs.count);
    if (lhs != rhs)
        throw DiagnosticError("eab: ground-state count audit failed; results unusable");
}

GroundStateSet exhaustive_enumerate(const TorusLattice& lat, const std::vector<int>& signs,
                                    const EabBudget& budget) {
    const int N = lat.n_sites();
    if (N > budget.max_exhaustive_sites)
        throw BudgetError("eab exhaustive: lattice exceeds enumeration budget");

    std::vector<int> theta(N, 1);
    long long e = 0;
    for (int b = 0; b < lat.n_bonds(); ++b) e -= signs[b];

    Accumulator acc(lat, signs, budget.state_cap);
    acc.offer(e, theta);
    const std::uint64_t total = 1ULL << (N - 1); // theta[0] pinned: modulo global flip
    for (std::uint64_t k = 1; k < total; ++k) {
        int s = std::countr_zero(k) + 1;
        long long h = 0;
        for (int b : lat.star_bonds[s]) {
            const auto& bo = lat.bonds[b];
            h += signs[b] * theta[bo.s0 == s ? bo.s1 : bo.s0];
        }
        e += 2 * theta[s] * h; // E = -sum s.t.t, flipping theta[s] adds +2 t h
        theta[s] = -theta[s];
        acc.offer(e, theta);
    }

    GroundStateSet gs;
    gs.energy_int = acc.best;
    gs.count = acc.count;
    gs.sat_count = std::move(acc.sat);
    gs.states = std::move(acc.states);
    gs.method = GroundStateSet::Method::exhaustive;
    gs.complete = true;
    return gs;
}

GroundStateSet branch_bound_enumerate(const TorusLattice& lat, const std::vector<int>& signs,
                                      const EabBudget& budget) {
    const int N = lat.n_sites();
    if (N > budget.max_branch_bound_sites)
        throw BudgetError("eab branch_bound: lattice exceeds budget");

    // bonds become decided when their later endpoint is assigned
    std::vector<std::vector<std::pair<int, int>>> decide(N); // site -> (bond, earlier endpoint)
    for (int b = 0; b < lat.n_bonds(); ++b) {
        int a = lat.bonds[b].s0, c = lat.bonds[b].s1;
        decide[std::max(a, c)].push_back({b, std::min(a, c)});
    }
    std::vector<int> undecided_after(N + 1, 0); // bonds still open once sites 0..d-1 assigned
    {
        int open = lat.n_bonds();
        for (int d = 0; d <= N; ++d) {
            undecided_after[d] = open;
            if (d < N) open -= static_cast<int>(decide[d].size());
        }
    }

    Accumulator acc(lat, signs, budget.state_cap);
    std::vector<int> theta(N, 1);

    // depth-first over sites; ties at the incumbent are never pruned
    auto dfs = [&](auto&& self, int d, long long e) -> void {
        if (d == N) {
            acc.offer(e, theta);
            return;
        }
        for (int v : {1, -1}) {
            if (d == 0 && v < 0) continue; // modulo global flip
            theta[d] = v;
            long long e2 = e;
            for (auto [b, other] : decide[d]) e2 -= signs[b] * v * theta[other];
            if (e2 - undecided_after[d + 1] <= acc.best) self(self, d + 1, e2);
        }
    };
    dfs(dfs, 0, 0);

    GroundStateSet gs;
    gs.energy_int = acc.best;
    gs.count = acc.count;
    gs.sat_count = std::move(acc.sat);
    gs.states = std::move(acc.states);
    gs.method = GroundStateSet::Method::branch_bound;
    gs.complete = true;
    return gs;
}

// ---- column-transfer counting engine -------------------------------------
//
// For a fixed first column c0, sweep columns left to right with the column
// configuration as the DP state; torus wraps in y live inside the intra-
// column energies and the wrap in x is closed against c0. Forward/backward
// sweeps give, for every bond, the number of ground states in which it is
// satisfied, without materializing any state.

struct DpCell {
    int e = std::numeric_limits<int>::max() / 4;
    std::uint64_t cnt = 0;
};

struct ColumnSigns {
    // intra (vertical) and inter (horizontal) sign masks per column
    std::uint64_t v_pos = 0, v_neg = 0;
    std::uint64_t h_pos = 0, h_neg = 0;
    int v_base = 0, h_base = 0; // sums of signs
};

GroundStateSet transfer_count(const TorusLattice& lat, const std::vector<int>& signs,
                              const EabBudget& budget) {
    const int L = lat.L;
    if (L > budget.max_transfer_L)
        throw BudgetError("eab transfer_count: L exceeds budget");
    const std::uint32_t D = 1u << L;

    std::vector<ColumnSigns> cs(L);
    for (int x = 0; x < L; ++x) {
        for (int y = 0; y < L; ++y) {
            int bv = lat.vbond(x, y), bh = lat.hbond(x, y);
            if (signs[bv] > 0) cs[x].v_pos |= 1ULL << y; else cs[x].v_neg |= 1ULL << y;
            if (signs[bh] > 0) cs[x].h_pos |= 1ULL << y; else cs[x].h_neg |= 1ULL << y;
            cs[x].v_base += signs[bv];
            cs[x].h_base += signs[bh];
        }
    }
    auto rot1 = [L](std::uint32_t c) { return ((c >> 1) | (c << (L - 1))) & ((1u << L) - 1); };
    // E_intra(x,c) = -sum_y s_v(x,y) s_y s_{y+1}
    auto intra = [&](int x, std::uint32_t c) {
        std::uint32_t d = c ^ rot1(c);
        return -cs[x].v_base +
               2 * (std::popcount(d & static_cast<std::uint32_t>(cs[x].v_pos)) -
                    std::popcount(d & static_cast<std::uint32_t>(cs[x].v_neg)));
    };
    auto inter = [&](int x, std::uint32_t a, std::uint32_t b) {
        std::uint32_t d = a ^ b;
        return -cs[x].h_base +
               2 * (std::popcount(d & static_cast<std::uint32_t>(cs[x].h_pos)) -
                    std::popcount(d & static_cast<std::uint32_t>(cs[x].h_neg)));
    };

    GroundStateSet gs;
    gs.sat_count.assign(lat.n_bonds(), 0);
    long long best = std::numeric_limits<long long>::max();
    std::uint64_t count2 = 0; // counts both members of each +-theta pair
    std::vector<std::uint64_t> sat2(lat.n_bonds(), 0);

    std::vector<std::vector<DpCell>> fwd(L, std::vector<DpCell>(D));
    std::vector<std::vector<DpCell>> bwd(L, std::vector<DpCell>(D));

    for (std::uint32_t c0 = 0; c0 < D; ++c0) {
        // forward: fwd[x][s] covers columns 0..x with column x in state s
        for (auto& col : fwd) std::fill(col.begin(), col.end(), DpCell{});
        fwd[0][c0] = {intra(0, c0), 1};
        for (int x = 1; x < L; ++x) {
            for (std::uint32_t a = 0; a < D; ++a) {
                if (fwd[x - 1][a].cnt == 0) continue;
                int ea = fwd[x - 1][a].e;
                for (std::uint32_t b = 0; b < D; ++b) {
                    int e = ea + inter(x - 1, a, b) + intra(x, b);
                    DpCell& cell = fwd[x][b];
                    if (e < cell.e) cell = {e, fwd[x - 1][a].cnt};
                    else if (e == cell.e) cell.cnt += fwd[x - 1][a].cnt;
                }
            }
        }
        // backward: bwd[x][s] covers columns x+1..L-1 plus the closing bonds
        // against c0, given column x in state s (column-x intra not included)
        for (auto& col : bwd) std::fill(col.begin(), col.end(), DpCell{});
        for (std::uint32_t s = 0; s < D; ++s) bwd[L - 1][s] = {inter(L - 1, s, c0), 1};
        for (int x = L - 2; x >= 0; --x) {
            for (std::uint32_t s = 0; s < D; ++s) {
                int ebest = std::numeric_limits<int>::max() / 4;
                std::uint64_t c = 0;
                for (std::uint32_t t = 0; t < D; ++t) {
                    int e = inter(x, s, t) + intra(x + 1, t) + bwd[x + 1][t].e;
                    if (e < ebest) { ebest = e; c = bwd[x + 1][t].cnt; }
                    else if (e == ebest) c += bwd[x + 1][t].cnt;
                }
                bwd[x][s] = {ebest, c};
            }
        }

        const long long e0 = static_cast<long long>(fwd[0][c0].e) + bwd[0][c0].e;
        if (e0 > best) continue;
        if (e0 < best) {
            best = e0;
            count2 = 0;
            std::fill(sat2.begin(), sat2.end(), 0);
        }
        count2 += bwd[0][c0].cnt;

        // vertical bonds of column x are functions of the column state
        for (int x = 0; x < L; ++x) {
            for (std::uint32_t s = 0; s < D; ++s) {
                if (fwd[x][s].cnt == 0 || bwd[x][s].cnt == 0) continue;
                if (static_cast<long long>(fwd[x][s].e) + bwd[x][s].e != e0) continue;
                std::uint64_t w = fwd[x][s].cnt * bwd[x][s].cnt;
                std::uint32_t d = s ^ rot1(s);
                for (int y = 0; y < L; ++y) {
                    int bv = lat.vbond(x, y);
                    int tt = ((d >> y) & 1) ? -1 : 1;
                    if (signs[bv] * tt > 0) sat2[bv] += w;
                }
            }
        }
        // horizontal bonds between columns x and x+1
        for (int x = 0; x + 1 < L; ++x) {
            for (std::uint32_t s = 0; s < D; ++s) {
                if (fwd[x][s].cnt == 0) continue;
                for (std::uint32_t t = 0; t < D; ++t) {
                    if (bwd[x + 1][t].cnt == 0) continue;
                    long long e = static_cast<long long>(fwd[x][s].e) + inter(x, s, t) +
                                  intra(x + 1, t) + bwd[x + 1][t].e;
                    if (e != e0) continue;
                    std::uint64_t w = fwd[x][s].cnt * bwd[x + 1][t].cnt;
                    std::uint32_t d = s ^ t;
                    for (int y = 0; y < L; ++y) {
                        int bh = lat.hbond(x, y);
                        int tt = ((d >> y) & 1) ? -1 : 1;
                        if (signs[bh] * tt > 0) sat2[bh] += w;
                    }
                }
            }
        }
        // closing horizontal bonds between column L-1 and column 0
        for (std::uint32_t s = 0; s < D; ++s) {
            if (fwd[L - 1][s].cnt == 0) continue;
            if (static_cast<long long>(fwd[L - 1][s].e) + bwd[L - 1][s].e != e0) continue;
            std::uint64_t w = fwd[L - 1][s].cnt; // the closure leg has count 1
            std::uint32_t d = s ^ c0;
            for (int y = 0; y < L; ++y) {
                int bh = lat.hbond(L - 1, y);
                int tt = ((d >> y) & 1) ? -1 : 1;
                if (signs[bh] * tt > 0) sat2[bh] += w;
            }
        }
    }

    gs.energy_int = best;
    gs.count = count2 / 2; // each ground state appeared as theta and -theta
    for (int b = 0; b < lat.n_bonds(); ++b) gs.sat_count[b] = sat2[b] / 2;
    gs.method = GroundStateSet::Method::transfer_count;
    gs.complete = true;
    return gs;
}

} // namespace

GroundStateSet enumerate_ground_states(const TorusLattice& lat, const CouplingField& couplings,
                                       EabMethod method, const EabBudget& budget) {
    auto [signs, strength] = bond_signs(lat, couplings);
    GroundStateSet gs;
    switch (method) {
        case EabMethod::exhaustive:
            gs = exhaustive_enumerate(lat, signs, budget);
            break;
        case EabMethod::branch_bound:
            gs = branch_bound_enumerate(lat, signs, budget);
            break;
        case EabMethod::transfer_count:
            gs = transfer_count(lat, signs, budget);
            break;
        default:
            if (lat.n_sites() <= std::min(budget.max_exhaustive_sites, 20))
                gs = exhaustive_enumerate(lat, signs, budget);
            else if (lat.L <= budget.max_transfer_L)
                gs = transfer_count(lat, signs, budget);
            else
                gs = branch_bound_enumerate(lat, signs, budget);
    }
    gs.energy = strength * static_cast<double>(gs.energy_int);
    audit_or_throw(lat, gs);
    return gs;
}

RigidLattice rigid_lattice(const GroundStateSet& gs, const CouplingField& couplings) {
    if (!gs.complete)
        throw InvalidParameterError("rigid_lattice: ground-state set is not certified complete");
    RigidLattice rl;
    const int nb = static_cast<int>(gs.sat_count.size());
    rl.classification.resize(nb);
    for (int b = 0; b < nb; ++b) {
        if (gs.sat_count[b] == gs.count) rl.classification[b] = BondNature::always_satisfied;
        else if (gs.sat_count[b] == 0) rl.classification[b] = BondNature::always_frustrated;
        else rl.classification[b] = BondNature::mixed;
        if (rl.classification[b] != BondNature::mixed) rl.rigid_bonds.push_back(b);
    }
    (void)couplings;
    rl.rigid_fraction = static_cast<double>(rl.rigid_bonds.size()) / nb;
    return rl;
}

PercolationReport percolation_report(const RigidLattice& rigid, const TorusLattice& lat) {
    PercolationReport rep;
    const int N = lat.n_sites();
    TorusUnionFind uf(N);
    std::vector<char> touched(N, 0);
    for (int b : rigid.rigid_bonds) {
        const auto& bo = lat.bonds[b];
        uf.unite(bo.s0, bo.s1, bo.vertical ? 0 : 1, bo.vertical ? 1 : 0);
        touched[bo.s0] = touched[bo.s1] = 1;
    }
    std::vector<std::vector<int>> by_root(N);
    for (int s = 0; s < N; ++s)
        if (touched[s]) by_root[uf.find(s)].push_back(s);
    std::size_t largest = 0;
    for (int r = 0; r < N; ++r) {
        if (by_root[r].empty()) continue;
        largest = std::max(largest, by_root[r].size());
        if (uf.wraps_y(r)) rep.wraps_dir1 = true;
        if (uf.wraps_x(r)) rep.wraps_dir2 = true;
        rep.clusters.push_back(std::move(by_root[r]));
    }
    rep.largest_fraction = static_cast<double>(largest) / N;

    // open-boundary spanning: drop the bonds that cross the cut
    UnionFind open(N);
    for (int b : rigid.rigid_bonds) {
        const auto& bo = lat.bonds[b];
        if (!bo.vertical && bo.x == lat.L - 1) continue;
        if (bo.vertical && bo.y == lat.L - 1) continue;
        open.unite(bo.s0, bo.s1);
    }
    std::vector<char> has_left(N, 0), has_right(N, 0);
    for (int b : rigid.rigid_bonds) {
        const auto& bo = lat.bonds[b];
        for (int s : {bo.s0, bo.s1}) {
            if (lat.site_x(s) == 0) has_left[open.find(s)] = 1;
            if (lat.site_x(s) == lat.L - 1) has_right[open.find(s)] = 1;
        }
    }
    for (int r = 0; r < N; ++r)
        if (has_left[r] && has_right[r]) rep.spans_open = true;
    return rep;
}

std::vector<RigidScanRow> rigid_percolation_scan(double p, const std::vector<int>& sizes,
                                                 int n_samples, std::uint64_t master_seed,
                                                 const EabBudget& budget, int threads) {
    std::vector<RigidScanRow> rows;
    for (int L : sizes) {
        TorusLattice lat = build_torus(L);
        struct Sample { bool ok; double rf; bool wrap1, wrap2, span; double cnt; };
        std::vector<Sample> samples(n_samples);
        parallel_for_index(n_samples, threads, [&](int i) {
            try {
                std::uint64_t seed = prf(master_seed, static_cast<std::uint64_t>(L), i);
                CouplingField c = sample_bipartite(lat, p, 1.0, seed, i);
                GroundStateSet gs = enumerate_ground_states(lat, c, EabMethod::auto_select, budget);
                RigidLattice rl = rigid_lattice(gs, c);
                PercolationReport rep = percolation_report(rl, lat);
                samples[i] = {true, rl.rigid_fraction, rep.wraps_dir1, rep.wraps_dir2,
                              rep.spans_open, static_cast<double>(gs.count)};
            } catch (const std::exception&) {
                samples[i] = {false, 0, false, false, false, 0};
            }
        });
        RigidScanRow row;
        row.L = L;
        int wrap_any = 0, wrap_both = 0, span = 0;
        for (const auto& s : samples) {
            if (!s.ok) { ++row.n_failed; continue; }
            ++row.n_ok;
            row.mean_rigid_fraction += s.rf;
            row.mean_gs_count += s.cnt;
            wrap_any += (s.wrap1 || s.wrap2);
            wrap_both += (s.wrap1 && s.wrap2);
            span += s.span;
        }
        if (row.n_failed > n_samples / 10)
            throw DiagnosticError("rigid_percolation_scan: more than 10% of samples failed");
        if (row.n_ok > 0) {
            row.mean_rigid_fraction /= row.n_ok;
            row.mean_gs_count /= row.n_ok;
            double q = static_cast<double>(wrap_any) / row.n_ok;
            row.wrap_either_prob = q;
            row.wrap_either_err = std::sqrt(std::max(q * (1 - q), 1e-12) / row.n_ok);
            row.wrap_both_prob = static_cast<double>(wrap_both) / row.n_ok;
            row.span_open_prob = static_cast<double>(span) / row.n_ok;
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace toriclab
