#include "toriclab/quantum_ed.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>

#include "toriclab/errors.hpp"
#include "toriclab/rng.hpp"

namespace toriclab {

namespace {

struct Operator {
    std::size_t dim = 0;
    std::vector<double> diag;
    std::vector<std::uint64_t> flip_masks; // off-diagonal: -lamA per mask
    double lamA = 0.0;
    // Even-parity trbim basis keeps the top site's bit at 0; a flip that sets
    // it is folded back by complementing all sites (the state (|c>+|c~>)/sqrt2).
    bool canonicalize = false;
    std::uint64_t top_bit = 0, full_mask = 0;

    void apply(const double* in, double* out) const {
        for (std::size_t i = 0; i < dim; ++i) out[i] = diag[i] * in[i];
        if (lamA == 0.0) return;
        for (std::uint64_t m : flip_masks) {
            if (!canonicalize) {
                for (std::size_t i = 0; i < dim; ++i) out[i ^ m] -= lamA * in[i];
            } else {
                for (std::size_t i = 0; i < dim; ++i) {
                    std::uint64_t j = i ^ m;
                    if (j & top_bit) j ^= full_mask;
                    out[j] -= lamA * in[i];
                }
            }
        }
    }
};

} // namespace

namespace detail {

// Matrix-free symmetric operator with explicit apply.
struct LinOp {
    std::size_t dim;
    std::function<void(const double*, double*)> apply;
};

Eigen::VectorXd random_unit(std::size_t dim, std::uint64_t seed, std::uint64_t stream) {
    Eigen::VectorXd v(dim);
    for (std::size_t i = 0; i < dim; ++i)
        v[static_cast<Eigen::Index>(i)] = prf_uniform(seed, stream, i) - 0.5;
    v.normalize();
    return v;
}

// Lowest-k eigenpairs by restarted Lanczos with full reorthogonalization and
// explicit deflation against converged pairs. Dense fallback is handled by
// the caller.
void lanczos_lowest(const LinOp& op, int k, int m_max, int max_restarts, double rtol,
                    std::vector<double>& evals, std::vector<Eigen::VectorXd>& evecs) {
    const std::size_t dim = op.dim;
    evals.clear();
    evecs.clear();
    Eigen::VectorXd work(dim), tmp(dim);

    auto reorth = [&](Eigen::VectorXd& v, const std::vector<Eigen::VectorXd>& basis) {
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& u : evecs) v -= (u.dot(v)) * u;
            for (const auto& u : basis) v -= (u.dot(v)) * u;
        }
    };

    for (int target = 0; target < k; ++target) {
        Eigen::VectorXd start = random_unit(dim, 0xEDC0FFEEULL, target);
        reorth(start, {});
        if (start.norm() < 1e-12) throw DiagnosticError("lanczos: degenerate start vector");
        start.normalize();

        bool done = false;
        for (int restart = 0; restart < max_restarts && !done; ++restart) {
            std::vector<Eigen::VectorXd> V;
            std::vector<double> alpha, beta;
            V.push_back(start);
            int m = std::min<std::size_t>(m_max, dim);
            for (int j = 0; j < m; ++j) {
                op.apply(V[j].data(), work.data());
                double a = V[j].dot(work);
                alpha.push_back(a);
                work -= a * V[j];
                if (j > 0) work -= beta[j - 1] * V[j - 1];
                reorth(work, V);
                double b = work.norm();
                if (b < 1e-13 || j + 1 == m) { beta.push_back(b); break; }
                beta.push_back(b);
                V.push_back(work / b);
            }
            const int mm = static_cast<int>(alpha.size());
            Eigen::MatrixXd T = Eigen::MatrixXd::Zero(mm, mm);
            for (int i = 0; i < mm; ++i) {
                T(i, i) = alpha[i];
                if (i + 1 < mm) T(i, i + 1) = T(i + 1, i) = beta[i];
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
            Eigen::VectorXd y = es.eigenvectors().col(0);
            double theta = es.eigenvalues()[0];
            Eigen::VectorXd x = Eigen::VectorXd::Zero(dim);
            for (int j = 0; j < static_cast<int>(V.size()); ++j) x += y[j] * V[j];
            reorth(x, {});
            double nx = x.norm();
            if (nx < 1e-12) throw DiagnosticError("lanczos: collapsed Ritz vector");
            x /= nx;
            op.apply(x.data(), tmp.data());
            theta = x.dot(tmp);
            double resid = (tmp - theta * x).norm();
            double scale = std::max(1.0, std::abs(theta));
            if (resid <= rtol * scale) {
                evals.push_back(theta);
                evecs.push_back(x);
                done = true;
            } else {
                start = x;
            }
        }
        if (!done)
            throw DiagnosticError("lanczos: eigenpair " + std::to_string(target) +
                                  " did not converge");
    }
}

} // namespace detail

namespace {

Operator build_operator(const HamiltonianSpec& spec, const EdBudget& budget) {
    const TorusLattice& lat = *spec.lat;
    Operator op;
    if (spec.model == EdModel::trbim) {
        const int N = lat.n_sites();
        if (N > budget.max_trbim_sites) throw BudgetError("low_spectrum: trbim exceeds site budget");
        const int nbits = spec.even_parity_only ? N - 1 : N;
        op.dim = 1ULL << nbits;
        op.lamA = spec.lamA;
        op.full_mask = (1ULL << N) - 1;
        op.top_bit = 1ULL << (N - 1);
        op.canonicalize = spec.even_parity_only;
        op.diag.assign(op.dim, 0.0);
        for (std::size_t c = 0; c < op.dim; ++c) {
            double e = 0.0;
            for (int b = 0; b < lat.n_bonds(); ++b) {
                const auto& bo = lat.bonds[b];
                int t0 = (c >> bo.s0) & 1, t1 = (c >> bo.s1) & 1;
                double sign = ((spec.gauge_mask >> b) & 1) ? -1.0 : 1.0;
                e -= sign * spec.field.values[b] * (t0 == t1 ? 1.0 : -1.0);
            }
            op.diag[c] = e;
        }
        for (int s = 0; s < N; ++s) op.flip_masks.push_back(1ULL << s);
    } else {
        const int nb = lat.n_bonds();
        if (nb > budget.max_toric_qubits)
            throw BudgetError("low_spectrum: toric model exceeds qubit budget");
        op.dim = 1ULL << nb;
        op.lamA = spec.lamA;
        op.diag.assign(op.dim, 0.0);
        std::vector<std::uint64_t> plaq_masks(lat.n_plaquettes(), 0);
        for (int p = 0; p < lat.n_plaquettes(); ++p)
            for (int b : lat.plaq_bonds[p]) plaq_masks[p] ^= 1ULL << b;
        const bool with_field = spec.model == EdModel::toric_field;
        for (std::size_t c = 0; c < op.dim; ++c) {
            double e = 0.0;
            for (auto m : plaq_masks)
                e -= spec.lamB * ((std::popcount(c & m) & 1) ? -1.0 : 1.0);
            if (with_field)
                for (int b = 0; b < nb; ++b)
                    e -= spec.field.values[b] * (((c >> b) & 1) ? -1.0 : 1.0);
            op.diag[c] = e;
        }
        for (int s = 0; s < lat.n_sites(); ++s) {
            std::uint64_t m = 0;
            for (int b : lat.star_bonds[s]) m ^= 1ULL << b;
            op.flip_masks.push_back(m);
        }
    }
    return op;
}

void group_degeneracies(Spectrum& sp) {
    sp.degeneracy_groups.assign(sp.eigenvalues.size(), 0);
    if (sp.eigenvalues.empty()) return;
    double scale = 1.0;
    for (double e : sp.eigenvalues) scale = std::max(scale, std::abs(e));
    int g = 0;
    for (std::size_t i = 1; i < sp.eigenvalues.size(); ++i) {
        if (std::abs(sp.eigenvalues[i] - sp.eigenvalues[i - 1]) > 1e-8 * scale) ++g;
        sp.degeneracy_groups[i] = g;
    }
}

} // namespace

EdResult low_spectrum(const HamiltonianSpec& spec, int k, const EdBudget& budget) {
    if (!spec.lat) throw InvalidParameterError("low_spectrum: missing lattice");
    if (spec.model != EdModel::toric_clean &&
        static_cast<int>(spec.field.values.size()) != spec.lat->n_bonds())
        throw InvalidParameterError("low_spectrum: field length does not match bond count");

    Operator op = build_operator(spec, budget);
    EdResult res;
    res.dim = op.dim;
    k = std::min<int>(k, static_cast<int>(op.dim));

    if (op.dim <= budget.dense_dim) {
        res.dense = true;
        Eigen::MatrixXd H = Eigen::MatrixXd::Zero(op.dim, op.dim);
        std::vector<double> e(op.dim, 0.0), out(op.dim, 0.0);
        for (std::size_t j = 0; j < op.dim; ++j) {
            std::fill(e.begin(), e.end(), 0.0);
            e[j] = 1.0;
            op.apply(e.data(), out.data());
            for (std::size_t i = 0; i < op.dim; ++i) H(i, j) = out[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
        for (int i = 0; i < k; ++i) {
            res.spectrum.eigenvalues.push_back(es.eigenvalues()[i]);
            Eigen::VectorXd x = es.eigenvectors().col(i);
            res.spectrum.residual_norms.push_back((H * x - es.eigenvalues()[i] * x).norm());
            res.vectors.emplace_back(x.data(), x.data() + x.size());
        }
    } else {
        detail::LinOp lop{op.dim, [&op](const double* in, double* out) { op.apply(in, out); }};
        std::vector<double> evals;
        std::vector<Eigen::VectorXd> evecs;
        detail::lanczos_lowest(lop, k, budget.lanczos_m, budget.lanczos_restarts,
                               budget.residual_rtol, evals, evecs);
        // deflated pairs may converge out of order; sort jointly
        std::vector<int> order(evals.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
        std::sort(order.begin(), order.end(), [&](int a, int b) { return evals[a] < evals[b]; });
        std::vector<double> out(op.dim);
        for (int idx : order) {
            res.spectrum.eigenvalues.push_back(evals[idx]);
            op.apply(evecs[idx].data(), out.data());
            double resid = 0.0;
            for (std::size_t i = 0; i < op.dim; ++i) {
                double r = out[i] - evals[idx] * evecs[idx][static_cast<Eigen::Index>(i)];
                resid += r * r;
            }
            res.spectrum.residual_norms.push_back(std::sqrt(resid));
            res.vectors.emplace_back(evecs[idx].data(), evecs[idx].data() + evecs[idx].size());
        }
    }
    group_degeneracies(res.spectrum);
    return res;
}

DualMappingReport verify_dual_mapping(const TorusLattice& lat, double lamA, double lamB,
                                      const FieldRealization& field, int k,
                                      const EdBudget& budget) {
    DualMappingReport rep;

    HamiltonianSpec toric;
    toric.model = EdModel::toric_field;
    toric.lamA = lamA;
    toric.lamB = lamB;
    toric.field = field;
    toric.lat = &lat;
    EdResult full = low_spectrum(toric, k, budget);
    const double shift = lamB * lat.n_sites();
    for (double e : full.spectrum.eigenvalues) rep.eq13_shifted.push_back(e + shift);

    // ground-state weight in the B_p = +1 block
    std::vector<std::uint64_t> plaq_masks(lat.n_plaquettes(), 0);
    for (int p = 0; p < lat.n_plaquettes(); ++p)
        for (int b : lat.plaq_bonds[p]) plaq_masks[p] ^= 1ULL << b;
    const auto& gs = full.vectors.front();
    double w = 0.0;
    for (std::size_t c = 0; c < gs.size(); ++c) {
        bool good = true;
        for (auto m : plaq_masks)
            if (std::popcount(c & m) & 1) { good = false; break; }
        if (good) w += gs[c] * gs[c];
    }
    rep.ground_sector_weight = w;

    // dual prediction: union over the four winding sectors of the
    // even-parity trbim spectra with gauge-flipped couplings
    SectorLoops loops = sector_loops(lat);
    std::vector<double> dual;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            std::uint64_t gauge = 0;
            if (i) for (int b : loops.x1_bonds) gauge ^= 1ULL << b;
            if (j) for (int b : loops.x2_bonds) gauge ^= 1ULL << b;
            HamiltonianSpec dualspec;
            dualspec.model = EdModel::trbim;
            dualspec.lamA = lamA;
            dualspec.field = field;
            dualspec.lat = &lat;
            dualspec.gauge_mask = gauge;
            dualspec.even_parity_only = true;
            EdResult sector = low_spectrum(dualspec, k, budget);
            dual.insert(dual.end(), sector.spectrum.eigenvalues.begin(),
                        sector.spectrum.eigenvalues.end());
        }
    }
    std::sort(dual.begin(), dual.end());
    dual.resize(std::min<std::size_t>(dual.size(), k));
    rep.dual_levels = dual;

    for (std::size_t i = 0; i < rep.dual_levels.size() && i < rep.eq13_shifted.size(); ++i) {
        double d = std::abs(rep.eq13_shifted[i] - rep.dual_levels[i]) /
                   std::max(std::abs(rep.dual_levels[i]), 1e-12);
        rep.max_rel_deviation = std::max(rep.max_rel_deviation, d);
    }
    return rep;
}

ClassicalGroundReport classical_field_ground(const TorusLattice& lat, double lamB,
                                             const FieldRealization& field) {
    const int nb = lat.n_bonds();
    if (nb > 26) throw BudgetError("classical_field_ground: exhaustive budget is 2L^2 <= 26");
    const int np = lat.n_plaquettes();

    // plaquettes containing each bond
    std::vector<std::array<int, 2>> bond_plaqs(nb, {-1, -1});
    for (int p = 0; p < np; ++p)
        for (int b : lat.plaq_bonds[p]) {
            if (bond_plaqs[b][0] < 0) bond_plaqs[b][0] = p;
            else bond_plaqs[b][1] = p;
        }

    std::vector<int> bp(np, 1);
    int P = np;
    double F = 0.0;
    for (double h : field.values) F += h;

    double bestE = -lamB * P - F;
    std::uint64_t best_cfg = 0;
    bool best_allplus = true;
    const double tiny = 1e-9 * (std::abs(lamB) * np + 1.0);

    std::vector<int> sigma(nb, 1);
    std::uint64_t cfg = 0;
    const std::uint64_t total = 1ULL << nb;
    for (std::uint64_t kk = 1; kk < total; ++kk) {
        int b = std::countr_zero(kk);
        sigma[b] = -sigma[b];
        cfg ^= 1ULL << b;
        F += 2.0 * field.values[b] * sigma[b]; // sigma already flipped
        for (int p : bond_plaqs[b]) {
            P -= 2 * bp[p];
            bp[p] = -bp[p];
        }
        double E = -lamB * P - F;
        if (E < bestE - tiny) {
            bestE = E;
            best_cfg = cfg;
            best_allplus = (P == np);
        } else if (E <= bestE + tiny) {
            if (P == np && !best_allplus) { best_allplus = true; best_cfg = cfg; }
        }
    }
    ClassicalGroundReport rep;
    rep.sigma_config = best_cfg;
    rep.energy = bestE;
    rep.all_plaquettes_positive = best_allplus;
    return rep;
}

double polarized_phase_crossover(const TorusLattice& lat, const FieldRealization& field,
                                 double lam_max, int iters) {
    if (classical_field_ground(lat, lam_max, field).all_plaquettes_positive == false)
        throw DiagnosticError("polarized_phase_crossover: no crossover below lam_max");
    double lo = 0.0, hi = lam_max;
    if (classical_field_ground(lat, 0.0, field).all_plaquettes_positive) return 0.0;
    for (int i = 0; i < iters; ++i) {
        double mid = 0.5 * (lo + hi);
        if (classical_field_ground(lat, mid, field).all_plaquettes_positive) hi = mid;
        else lo = mid;
    }
    return hi;
}

EaOrderParameter ea_order_parameter(const TorusLattice& lat, const EdResult& result) {
    if (result.vectors.empty()) throw InvalidParameterError("ea_order_parameter: no ground state");
    const int N = lat.n_sites();
    const std::size_t dim = result.dim;
    if (dim != (1ULL << N))
        throw InvalidParameterError("ea_order_parameter: expects a full trbim ground state");

    // collect the ground multiplet
    std::vector<const std::vector<double>*> multiplet;
    for (std::size_t i = 0; i < result.vectors.size(); ++i)
        if (result.spectrum.degeneracy_groups[i] == 0) multiplet.push_back(&result.vectors[i]);

    auto q_of = [&](const std::vector<double>& psi) {
        double q = 0.0;
        for (int s = 0; s < N; ++s) {
            double m = 0.0;
            for (std::size_t c = 0; c < dim; ++c) {
                double w = psi[c] * psi[c];
                m += ((c >> s) & 1) ? -w : w;
            }
            q += m * m;
        }
        return q / N;
    };

    EaOrderParameter out;
    if (multiplet.size() == 1) {
        out.q = q_of(*multiplet[0]);
        return out;
    }
    out.degenerate = true;
    // maximize over real unit combinations; exact 1-parameter scan for pairs,
    // seeded coordinate ascent for larger multiplets
    if (multiplet.size() == 2) {
        const auto& v0 = *multiplet[0];
        const auto& v1 = *multiplet[1];
        std::vector<double> mix(dim);
        double best = 0.0;
        const int grid = 360;
        for (int g = 0; g <= grid; ++g) {
            double phi = M_PI * g / grid;
            double c = std::cos(phi), s = std::sin(phi);
            for (std::size_t i = 0; i < dim; ++i) mix[i] = c * v0[i] + s * v1[i];
            best = std::max(best, q_of(mix));
        }
        out.q = best;
        return out;
    }
    std::vector<double> mix(dim);
    double best = 0.0;
    for (int trial = 0; trial < 16; ++trial) {
        std::vector<double> coef(multiplet.size());
        double norm = 0.0;
        for (std::size_t j = 0; j < coef.size(); ++j) {
            coef[j] = prf_uniform(0xEA0BDULL, trial, j) - 0.5;
            norm += coef[j] * coef[j];
        }
        norm = std::sqrt(norm);
        for (std::size_t i = 0; i < dim; ++i) {
            double v = 0.0;
            for (std::size_t j = 0; j < coef.size(); ++j) v += coef[j] * (*multiplet[j])[i];
            mix[i] = v / norm;
        }
        best = std::max(best, q_of(mix));
    }
    out.q = best;
    return out;
}

std::array<double, 3> single_star_gap(double h) {
    if (h < 0) throw InvalidParameterError("single_star_gap: h must be >= 0");
    std::vector<double> levels;
    for (int cfg = 0; cfg < 16; ++cfg) {
        int up = 4 - 2 * std::popcount(static_cast<unsigned>(cfg)); // sum of sigma^z
        levels.push_back(std::exp(-h * up));
    }
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end(),
                             [](double a, double b) { return std::abs(a - b) < 1e-15; }),
                 levels.end());
    std::array<double, 3> gaps = {0.0, 0.0, 0.0};
    if (levels.size() >= 2) gaps[0] = levels[1] - levels[0];
    if (levels.size() >= 4) gaps[1] = levels[3] - levels[0];
    if (levels.size() >= 5) gaps[2] = levels[4] - levels[0];
    return gaps;
}

} // namespace toriclab
