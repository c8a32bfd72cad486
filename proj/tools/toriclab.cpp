// toriclab: exact and Monte Carlo tools for the toric code under quenched
// random fields and its random-bond Ising duals.

#include <bit>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "toriclab/disorder.hpp"
#include "toriclab/eab.hpp"
#include "toriclab/errors.hpp"
#include "toriclab/format.hpp"
#include "toriclab/lattice.hpp"
#include "toriclab/mc.hpp"
#include "toriclab/quantum_ed.hpp"
#include "toriclab/rbim.hpp"
#include "toriclab/scan.hpp"
#include "toriclab/stabilizer.hpp"
#include "toriclab/statevec.hpp"
#include "toriclab/version.hpp"

using namespace toriclab;
using nlohmann::json;

namespace {

void emit(const json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << std::endl;
    } else {
        std::ofstream f(out_path, std::ios::trunc);
        f << j.dump(2) << '\n';
    }
}

Realization make_field(const TorusLattice& lat, const std::string& dist, double p,
                       double strength, std::uint64_t seed, const std::string& field_file) {
    if (!field_file.empty()) {
        std::ifstream f(field_file);
        if (!f) throw InvalidParameterError("cannot open field file " + field_file);
        std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
        Realization r = realization_from_json(text);
        if (r.L != lat.L) throw InvalidParameterError("field file lattice size mismatch");
        return r;
    }
    if (dist == "bipartite") return sample_bipartite(lat, p, strength, seed);
    if (dist == "diluted") return sample_diluted(lat, p, strength, seed);
    if (dist == "uniform") return uniform_field(lat, strength);
    throw InvalidParameterError("unknown distribution '" + dist + "'");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"desk-scale laboratory for the toric code in random fields"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    std::uint64_t seed = 1;
    std::string out;
    int threads = 1;
    int budget_override = 0;
    app.add_option("--seed", seed, "master seed")->capture_default_str();
    app.add_option("--out", out, "output file (JSON); stdout when empty");
    app.add_option("--threads", threads, "worker threads for ensembles")->capture_default_str();
    app.add_option("--budget", budget_override, "override the dominant budget cap of the subcommand");

    // ---- lattice ----
    auto* c_lat = app.add_subcommand("lattice", "dump lattice indexing as JSON");
    int lat_L = 4;
    c_lat->add_option("--L", lat_L, "side length")->capture_default_str();

    // ---- stopo ----
    auto* c_st = app.add_subcommand("stopo", "topological entropy of the deformed model");
    int st_L = 3, st_r = 1, st_R = 2, st_samples = 2000, st_burn = 500, st_stride = 2;
    double st_p = 0.0, st_beta = 0.0;
    std::string st_dist = "bipartite", st_sampler = "auto", st_csv;
    c_st->add_option("--L", st_L)->capture_default_str();
    c_st->add_option("--r", st_r)->capture_default_str();
    c_st->add_option("--R", st_R)->capture_default_str();
    c_st->add_option("--dist", st_dist, "bipartite|uniform")->capture_default_str();
    c_st->add_option("--p", st_p, "antiferromagnetic bond density")->capture_default_str();
    c_st->add_option("--beta", st_beta, "coupling strength J/T")->capture_default_str();
    c_st->add_option("--sampler", st_sampler, "auto|enumerate|mc")->capture_default_str();
    c_st->add_option("--samples", st_samples, "MC samples per chain")->capture_default_str();
    c_st->add_option("--burn", st_burn, "MC burn-in sweeps")->capture_default_str();
    c_st->add_option("--stride", st_stride, "MC sweeps between samples")->capture_default_str();
    c_st->add_option("--csv", st_csv, "append one CSV row for scans");

    // ---- eab / perc ----
    auto* c_eab = app.add_subcommand("eab", "exact EAB ground states and rigid lattice");
    int eab_L = 4;
    double eab_p = 0.5;
    std::string eab_method = "auto";
    c_eab->add_option("--L", eab_L)->capture_default_str();
    c_eab->add_option("--p", eab_p)->capture_default_str();
    c_eab->add_option("--method", eab_method, "auto|exhaustive|bb|transfer")->capture_default_str();

    auto* c_perc = app.add_subcommand("perc", "rigid-lattice percolation scan");
    std::vector<int> perc_sizes{4, 6};
    int perc_n = 100;
    double perc_p = 0.5;
    std::string perc_csv;
    c_perc->add_option("--p", perc_p)->capture_default_str();
    c_perc->add_option("--sizes", perc_sizes, "lattice sizes")->capture_default_str();
    c_perc->add_option("--samples", perc_n, "instances per size")->capture_default_str();
    c_perc->add_option("--csv", perc_csv, "write per-size CSV");

    // ---- pin ----
    auto* c_pin = app.add_subcommand("pin", "diluted pinning: percolation vs logical qubits");
    int pin_L = 6, pin_n = 100;
    double pin_p = 0.3;
    std::string pin_csv;
    c_pin->add_option("--L", pin_L)->capture_default_str();
    c_pin->add_option("--p", pin_p, "pinned fraction")->capture_default_str();
    c_pin->add_option("--samples", pin_n)->capture_default_str();
    c_pin->add_option("--csv", pin_csv, "write per-sample CSV");

    // ---- ed ----
    auto* c_ed = app.add_subcommand("ed", "exact low spectra of the quantum models");
    std::string ed_model = "trbim", ed_dist = "bipartite", ed_field_file;
    int ed_L = 3, ed_k = 4;
    double ed_lamA = 0.3, ed_lamB = 1.0, ed_p = 0.5, ed_strength = 1.0;
    c_ed->add_option("--model", ed_model, "trbim|toric_field|toric_clean")->capture_default_str();
    c_ed->add_option("--L", ed_L)->capture_default_str();
    c_ed->add_option("--lamA", ed_lamA)->capture_default_str();
    c_ed->add_option("--lamB", ed_lamB)->capture_default_str();
    c_ed->add_option("--dist", ed_dist)->capture_default_str();
    c_ed->add_option("--p", ed_p)->capture_default_str();
    c_ed->add_option("--strength", ed_strength)->capture_default_str();
    c_ed->add_option("--field-file", ed_field_file, "realization JSON instead of sampling");
    c_ed->add_option("--k", ed_k, "number of eigenvalues")->capture_default_str();

    // ---- mc ----
    auto* c_mc = app.add_subcommand("mc", "parallel-tempering RBIM thermodynamics");
    int mc_L = 8, mc_ntemps = 13, mc_equil = 4000, mc_measure = 40000, mc_stride = 2;
    double mc_p = 0.0, mc_tmin = 2.0, mc_tmax = 2.6;
    std::string mc_csv;
    c_mc->add_option("--L", mc_L)->capture_default_str();
    c_mc->add_option("--p", mc_p)->capture_default_str();
    c_mc->add_option("--tmin", mc_tmin)->capture_default_str();
    c_mc->add_option("--tmax", mc_tmax)->capture_default_str();
    c_mc->add_option("--ntemps", mc_ntemps)->capture_default_str();
    c_mc->add_option("--equil", mc_equil)->capture_default_str();
    c_mc->add_option("--measure", mc_measure)->capture_default_str();
    c_mc->add_option("--stride", mc_stride)->capture_default_str();
    c_mc->add_option("--csv", mc_csv, "write per-temperature CSV");

    // ---- scan ----
    auto* c_scan = app.add_subcommand("scan", "grid scan driven by a JSON config");
    std::string scan_config;
    c_scan->add_option("--config", scan_config, "scan config JSON")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*c_lat) {
            TorusLattice lat = build_torus(lat_L);
            if (out.empty()) std::cout << lattice_to_json(lat) << std::endl;
            else { std::ofstream f(out); f << lattice_to_json(lat) << '\n'; }
            return 0;
        }

        if (*c_st) {
            TorusLattice lat = build_torus(st_L);
            auto regions = (st_L == 3) ? minimal_regions_l3(lat)
                                       : levin_wen_regions(lat, st_r, st_R);
            CouplingField c = (st_dist == "uniform" || st_beta == 0.0)
                                  ? uniform_field(lat, st_beta)
                                  : sample_bipartite(lat, st_p, std::abs(st_beta), seed);
            TopoBudget budget;
            budget.n_samples = st_samples;
            budget.burn_sweeps = st_burn;
            budget.stride_sweeps = st_stride;
            if (budget_override > 0) budget.max_enum_sites = budget_override;
            TopoSampler ts = st_sampler == "enumerate" ? TopoSampler::enumerate_all
                             : st_sampler == "mc"      ? TopoSampler::boltzmann_mc
                             : (st_L * st_L <= 16 ? TopoSampler::enumerate_all
                                                  : TopoSampler::boltzmann_mc);
            TopoEntropyResult res = topo_entropy_exact(lat, c, regions, ts, budget, seed);
            json j;
            j["s_topo"] = res.s_topo;
            if (res.stderr_) j["stderr"] = *res.stderr_;
            j["method"] = res.sampler;
            j["rhat"] = res.rhat;
            j["params"] = {{"L", st_L}, {"r", st_r},       {"R", st_R},   {"dist", c.distribution},
                           {"p", st_p}, {"beta", st_beta}, {"seed", seed}};
            emit(j, out);
            if (!st_csv.empty()) {
                bool fresh = !std::ifstream(st_csv).good();
                std::ofstream f(st_csv, std::ios::app);
                if (fresh)
                    f << "L,r,R,distribution,p,beta,seed,sampler,s_topo,s_topo_stderr\n";
                f << st_L << ',' << st_r << ',' << st_R << ',' << c.distribution << ','
                  << fmt_double(st_p) << ',' << fmt_double(st_beta) << ',' << seed << ','
                  << res.sampler << ',' << fmt_double(res.s_topo) << ','
                  << (res.stderr_ ? fmt_double(*res.stderr_) : "") << '\n';
            }
            return 0;
        }

        if (*c_eab) {
            TorusLattice lat = build_torus(eab_L);
            CouplingField c = sample_bipartite(lat, eab_p, 1.0, seed);
            EabMethod m = eab_method == "exhaustive" ? EabMethod::exhaustive
                          : eab_method == "bb"       ? EabMethod::branch_bound
                          : eab_method == "transfer" ? EabMethod::transfer_count
                                                     : EabMethod::auto_select;
            GroundStateSet gs = enumerate_ground_states(lat, c, m);
            RigidLattice rl = rigid_lattice(gs, c);
            PercolationReport rep = percolation_report(rl, lat);
            json j;
            j["L"] = eab_L;
            j["p"] = eab_p;
            j["seed"] = seed;
            j["energy"] = gs.energy;
            j["gs_count"] = gs.count;
            j["rigid_fraction"] = rl.rigid_fraction;
            j["wraps_dir1"] = rep.wraps_dir1;
            j["wraps_dir2"] = rep.wraps_dir2;
            j["spans_open"] = rep.spans_open;
            j["largest_fraction"] = rep.largest_fraction;
            emit(j, out);
            return 0;
        }

        if (*c_perc) {
            EabBudget budget;
            auto rows = rigid_percolation_scan(perc_p, perc_sizes, perc_n, seed, budget, threads);
            json j = json::array();
            for (const auto& r : rows) {
                j.push_back({{"L", r.L},
                             {"n_ok", r.n_ok},
                             {"n_failed", r.n_failed},
                             {"mean_rigid_fraction", r.mean_rigid_fraction},
                             {"wrap_either_prob", r.wrap_either_prob},
                             {"wrap_either_err", r.wrap_either_err},
                             {"wrap_both_prob", r.wrap_both_prob},
                             {"span_open_prob", r.span_open_prob},
                             {"mean_gs_count", r.mean_gs_count}});
            }
            emit(json{{"p", perc_p}, {"seed", seed}, {"rows", j}}, out);
            if (!perc_csv.empty()) {
                std::ofstream f(perc_csv, std::ios::trunc);
                f << "L,p,n_ok,n_failed,mean_rigid_fraction,wrap_either_prob,wrap_either_err,"
                     "wrap_both_prob,span_open_prob,mean_gs_count\n";
                for (const auto& r : rows)
                    f << r.L << ',' << fmt_double(perc_p) << ',' << r.n_ok << ',' << r.n_failed
                      << ',' << fmt_double(r.mean_rigid_fraction) << ','
                      << fmt_double(r.wrap_either_prob) << ',' << fmt_double(r.wrap_either_err)
                      << ',' << fmt_double(r.wrap_both_prob) << ','
                      << fmt_double(r.span_open_prob) << ',' << fmt_double(r.mean_gs_count)
                      << '\n';
            }
            return 0;
        }

        if (*c_pin) {
            TorusLattice lat = build_torus(pin_L);
            StabilizerCode base = build_toric_stabilizers(lat);
            std::ofstream f;
            if (!pin_csv.empty()) {
                f.open(pin_csv, std::ios::trunc);
                f << "sample,seed,pinned_fraction,wraps_dir1,wraps_dir2,logical_qubits,"
                     "largest_cluster\n";
            }
            int wraps = 0, k_not_two_unwrapped = 0;
            for (int i = 0; i < pin_n; ++i) {
                std::uint64_t s = prf(seed, 0x70696eULL, i);
                FieldRealization field = sample_diluted(lat, pin_p, 1.0, s, i);
                std::vector<int> pinned;
                std::vector<std::pair<int, int>> pins;
                for (int b = 0; b < lat.n_bonds(); ++b)
                    if (field.values[b] != 0.0) { pinned.push_back(b); pins.emplace_back(b, 1); }
                int k = logical_qubit_count(pin_spins(base, pins));
                PinWrap w = pinned_wrap_flags(lat, pinned);
                bool wrap = w.wraps_dir1 || w.wraps_dir2;
                wraps += wrap;
                if (!wrap && k != 2) ++k_not_two_unwrapped;
                if (f.is_open())
                    f << i << ',' << s << ','
                      << fmt_double(static_cast<double>(pinned.size()) / lat.n_bonds()) << ','
                      << w.wraps_dir1 << ',' << w.wraps_dir2 << ',' << k << ','
                      << w.largest_cluster << '\n';
            }
            json j;
            j["L"] = pin_L;
            j["p"] = pin_p;
            j["samples"] = pin_n;
            j["wrap_fraction"] = static_cast<double>(wraps) / pin_n;
            j["unwrapped_with_k_not_2"] = k_not_two_unwrapped;
            emit(j, out);
            return 0;
        }

        if (*c_ed) {
            TorusLattice lat = build_torus(ed_L);
            HamiltonianSpec spec;
            spec.lat = &lat;
            spec.lamA = ed_lamA;
            spec.lamB = ed_lamB;
            if (ed_model == "trbim") spec.model = EdModel::trbim;
            else if (ed_model == "toric_field") spec.model = EdModel::toric_field;
            else if (ed_model == "toric_clean") spec.model = EdModel::toric_clean;
            else throw InvalidParameterError("unknown model '" + ed_model + "'");
            if (spec.model != EdModel::toric_clean)
                spec.field = make_field(lat, ed_dist, ed_p, ed_strength, seed, ed_field_file);
            else
                spec.field = uniform_field(lat, 0.0);
            EdResult res = low_spectrum(spec, ed_k);
            json j;
            j["model"] = ed_model;
            j["L"] = ed_L;
            j["eigenvalues"] = res.spectrum.eigenvalues;
            j["degeneracy_groups"] = res.spectrum.degeneracy_groups;
            j["residual_norms"] = res.spectrum.residual_norms;
            if (spec.model == EdModel::trbim) {
                EaOrderParameter q = ea_order_parameter(lat, res);
                j["q_ea"] = q.q;
                j["q_ea_degenerate"] = q.degenerate;
            } else {
                // ground-state weight in the B_p = +1 block
                std::vector<std::uint64_t> masks(lat.n_plaquettes(), 0);
                for (int p = 0; p < lat.n_plaquettes(); ++p)
                    for (int b : lat.plaq_bonds[p]) masks[p] ^= 1ULL << b;
                const auto& gs = res.vectors.front();
                double w = 0.0;
                for (std::size_t cfg = 0; cfg < gs.size(); ++cfg) {
                    bool good = true;
                    for (auto m : masks)
                        if (std::popcount(cfg & m) & 1) { good = false; break; }
                    if (good) w += gs[cfg] * gs[cfg];
                }
                j["sector_weight"] = w;
            }
            emit(j, out);
            return 0;
        }

        if (*c_mc) {
            TorusLattice lat = build_torus(mc_L);
            McRunConfig cfg;
            cfg.L = mc_L;
            cfg.couplings = sample_bipartite(lat, mc_p, 1.0, seed);
            cfg.temps.resize(mc_ntemps);
            for (int i = 0; i < mc_ntemps; ++i)
                cfg.temps[i] = mc_tmin + (mc_tmax - mc_tmin) * i / (mc_ntemps - 1.0);
            cfg.sweeps_equil = mc_equil;
            cfg.sweeps_measure = mc_measure;
            cfg.measure_stride = mc_stride;
            cfg.seed = seed;
            McObservables obs = parallel_tempering_run(cfg);
            json rows = json::array();
            for (const auto& r : obs.rows)
                rows.push_back({{"T", r.T},
                                {"e_per_site", r.e_per_site},
                                {"e_err", r.e_err},
                                {"abs_m", r.abs_m},
                                {"abs_m_err", r.abs_m_err},
                                {"binder", r.binder},
                                {"binder_err", r.binder_err},
                                {"acc_flip", r.acc_flip},
                                {"acc_exchange_up", r.acc_exchange_up},
                                {"tau_int_m", r.tau_int_m}});
            json j;
            j["L"] = mc_L;
            j["p"] = mc_p;
            j["seed"] = seed;
            j["acceptance_warning"] = obs.acceptance_warning;
            j["acceptance_collapse"] = obs.acceptance_collapse;
            j["rows"] = rows;
            emit(j, out);
            if (!mc_csv.empty()) {
                std::ofstream f(mc_csv, std::ios::trunc);
                f << "T,e_per_site,e_err,abs_m,abs_m_err,m2,m2_err,m4,m4_err,binder,binder_err,"
                     "acc_flip,acc_exchange_up,tau_int_m\n";
                for (const auto& r : obs.rows)
                    f << fmt_double(r.T) << ',' << fmt_double(r.e_per_site) << ','
                      << fmt_double(r.e_err) << ',' << fmt_double(r.abs_m) << ','
                      << fmt_double(r.abs_m_err) << ',' << fmt_double(r.m2) << ','
                      << fmt_double(r.m2_err) << ',' << fmt_double(r.m4) << ','
                      << fmt_double(r.m4_err) << ',' << fmt_double(r.binder) << ','
                      << fmt_double(r.binder_err) << ',' << fmt_double(r.acc_flip) << ','
                      << fmt_double(r.acc_exchange_up) << ',' << fmt_double(r.tau_int_m) << '\n';
            }
            return 0;
        }

        if (*c_scan) {
            std::ifstream f(scan_config);
            if (!f) throw InvalidParameterError("cannot open scan config " + scan_config);
            std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
            ScanConfig cfg = scan_config_from_json(text);
            if (threads > 1) cfg.threads = threads;
            if (!out.empty()) cfg.out_dir = out;
            ScanResult res = run_scan(cfg);
            json j;
            j["csv"] = res.csv_path;
            j["manifest"] = res.manifest_path;
            j["rows"] = res.rows_written;
            j["failures"] = res.failures;
            j["resumed"] = res.resumed;
            std::cout << j.dump(2) << std::endl;
            if (res.rows_written > 0 &&
                res.failures * 10 > res.rows_written) // >10% failed samples
                return 4;
            return 0;
        }
    } catch (const BudgetError& e) {
        std::cerr << "budget error: " << e.what() << std::endl;
        return 3;
    } catch (const InvalidParameterError& e) {
        std::cerr << "config error: " << e.what() << std::endl;
        return 2;
    } catch (const InvalidGeometryError& e) {
        std::cerr << "config error: " << e.what() << std::endl;
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
    return 0;
}
