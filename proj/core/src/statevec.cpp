#include "toriclab/statevec.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>

#include "toriclab/errors.hpp"

namespace toriclab {

namespace {

constexpr double kLn2 = 0.6931471805599453094;
constexpr double kClip = 1e-14;

std::uint64_t star_mask(const TorusLattice& lat, int s) {
    std::uint64_t m = 0;
    for (int b : lat.star_bonds[s]) m ^= 1ULL << b;
    return m;
}

double entropy_of_probs(std::vector<double>& p) {
    double total = 0.0;
    for (double v : p) total += (v >= kClip) ? v : 0.0;
    if (total <= 0.0) return 0.0;
    double s = 0.0;
    for (double v : p) {
        if (v < kClip) continue;
        double q = v / total;
        s -= q * std::log(q);
    }
    return s / kLn2;
}

} // namespace

StateVector build_ground_state(const TorusLattice& lat, const CouplingField& couplings,
                               int sector_i, int sector_j) {
    const int nb = lat.n_bonds();
    if (nb > kMaxStateQubits)
        throw BudgetError("build_ground_state: 2L^2 exceeds the amplitude budget");
    if ((sector_i | sector_j) & ~1)
        throw InvalidParameterError("build_ground_state: sector labels must be 0 or 1");

    SectorLoops loops = sector_loops(lat);
    std::uint64_t base = 0;
    if (sector_i)
        for (int b : loops.x1_bonds) base ^= 1ULL << b;
    if (sector_j)
        for (int b : loops.x2_bonds) base ^= 1ULL << b;

    const int N = lat.n_sites();
    std::vector<std::uint64_t> smask(N);
    for (int s = 0; s < N; ++s) smask[s] = star_mask(lat, s);

    StateVector st;
    st.lat = &lat;
    st.amplitudes.assign(1ULL << nb, 0.0);

    // one group element per theta with the first site's spin fixed
    const std::uint64_t ng = 1ULL << (N - 1);
    std::vector<double> exponents(ng);
    std::vector<std::uint64_t> cfgs(ng);
    double emax = -1e300;
    for (std::uint64_t t = 0; t < ng; ++t) {
        std::uint64_t cfg = base;
        for (int s = 1; s < N; ++s)
            if ((t >> (s - 1)) & 1) cfg ^= smask[s];
        double e = 0.0;
        for (int b = 0; b < nb; ++b)
            e += couplings.values[b] * (((cfg >> b) & 1) ? -1.0 : 1.0);
        exponents[t] = 0.5 * e;
        cfgs[t] = cfg;
        emax = std::max(emax, exponents[t]);
    }
    double norm2 = 0.0;
    for (std::uint64_t t = 0; t < ng; ++t) {
        double a = std::exp(exponents[t] - emax);
        st.amplitudes[cfgs[t]] = a;
        norm2 += a * a;
    }
    double inv = 1.0 / std::sqrt(norm2);
    for (double& a : st.amplitudes) a *= inv;
    st.normalized = true;
    return st;
}

namespace {

// Rearranged amplitude matrix: rows indexed by the smaller side's bits.
struct SchmidtMatrix {
    Eigen::MatrixXd M;
    bool swapped; // true when rows carry the complement side
};

SchmidtMatrix schmidt_matrix(const StateVector& state, const std::vector<int>& region_bonds) {
    const int nb = state.lat->n_bonds();
    std::vector<int> abits(region_bonds.begin(), region_bonds.end());
    std::sort(abits.begin(), abits.end());
    std::vector<char> inA(nb, 0);
    for (int b : abits) inA[b] = 1;
    std::vector<int> bbits;
    for (int b = 0; b < nb; ++b)
        if (!inA[b]) bbits.push_back(b);

    bool swapped = abits.size() > bbits.size();
    const auto& rows = swapped ? bbits : abits;
    const auto& cols = swapped ? abits : bbits;

    SchmidtMatrix out;
    out.swapped = swapped;
    out.M = Eigen::MatrixXd::Zero(1LL << rows.size(), 1LL << cols.size());
    const std::uint64_t total = 1ULL << nb;
    for (std::uint64_t c = 0; c < total; ++c) {
        double a = state.amplitudes[c];
        if (a == 0.0) continue;
        std::uint64_t r = 0, q = 0;
        for (std::size_t i = 0; i < rows.size(); ++i) r |= ((c >> rows[i]) & 1) << i;
        for (std::size_t i = 0; i < cols.size(); ++i) q |= ((c >> cols[i]) & 1) << i;
        out.M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(q)) += a;
    }
    return out;
}

} // namespace

double entanglement_entropy(const StateVector& state, const std::vector<int>& region_bonds) {
    if (region_bonds.empty()) return 0.0;
    SchmidtMatrix sm = schmidt_matrix(state, region_bonds);
    Eigen::MatrixXd gram = sm.M * sm.M.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
    std::vector<double> p(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    return entropy_of_probs(p);
}

double topo_entropy_direct(const StateVector& state,
                           const std::array<BipartitionGeometry, 4>& regions) {
    double s = 0.0;
    for (int i = 0; i < 4; ++i) {
        double si = entanglement_entropy(state, regions[i].region_bonds);
        s += (i == 0 || i == 3) ? -si : si;
    }
    return s;
}

double indistinguishability_gap(const std::array<StateVector, 4>& states,
                                const std::vector<int>& region_bonds) {
    if (region_bonds.size() > 10)
        throw BudgetError("indistinguishability_gap: region too large for dense density matrices");
    std::array<Eigen::MatrixXd, 4> rho;
    for (int k = 0; k < 4; ++k) {
        SchmidtMatrix sm = schmidt_matrix(states[k], region_bonds);
        // rows must carry the region; redo without swapping if needed
        if (!sm.swapped) {
            rho[k] = sm.M * sm.M.transpose();
        } else {
            rho[k] = sm.M.transpose() * sm.M;
        }
    }
    double gap = 0.0;
    for (int a = 0; a < 4; ++a) {
        for (int b = a + 1; b < 4; ++b) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rho[a] - rho[b], Eigen::EigenvaluesOnly);
            gap = std::max(gap, 0.5 * es.eigenvalues().cwiseAbs().sum());
        }
    }
    return gap;
}

} // namespace toriclab
