#include "toriclab/scan.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "toriclab/disorder.hpp"
#include "toriclab/eab.hpp"
#include "toriclab/errors.hpp"
#include "toriclab/format.hpp"
#include "toriclab/lattice.hpp"
#include "toriclab/parallel.hpp"
#include "toriclab/rbim.hpp"
#include "toriclab/rng.hpp"
#include "toriclab/stabilizer.hpp"
#include "toriclab/version.hpp"

namespace toriclab {

namespace {

struct GridPoint {
    std::vector<std::pair<std::string, double>> params;
    double get(const std::string& key, double fallback) const {
        for (const auto& [k, v] : params)
            if (k == key) return v;
        return fallback;
    }
    bool has(const std::string& key) const {
        for (const auto& [k, v] : params)
            if (k == key) return true;
        return false;
    }
};

std::vector<GridPoint> expand_grid(const ScanConfig& cfg) {
    std::vector<GridPoint> pts;
    pts.push_back({});
    for (const auto& [name, values] : cfg.grid) {
        if (values.empty()) throw InvalidParameterError("scan: empty grid axis '" + name + "'");
        std::vector<GridPoint> next;
        for (const auto& base : pts) {
            for (double v : values) {
                GridPoint p = base;
                p.params.emplace_back(name, v);
                next.push_back(std::move(p));
            }
        }
        pts = std::move(next);
    }
    return pts;
}

std::string opt(const ScanConfig& cfg, const std::string& key, const std::string& fallback) {
    auto it = cfg.options.find(key);
    return it == cfg.options.end() ? fallback : it->second;
}

struct TargetSpec {
    std::string header;
    // returns the row tail (after experiment,grid,sample,seed); throws on failure
    std::function<std::string(const ScanConfig&, const GridPoint&, std::uint64_t seed)> run;
};

std::string stopo_row(const ScanConfig& cfg, const GridPoint& gp, std::uint64_t seed) {
    int L = static_cast<int>(gp.get("L", 3));
    int r = static_cast<int>(gp.get("r", 1));
    int R = static_cast<int>(gp.get("R", 2));
    double p = gp.get("p", 0.0);
    double beta = gp.get("beta", 0.0);
    TorusLattice lat = build_torus(L);
    auto regions = (L == 3) ? minimal_regions_l3(lat) : levin_wen_regions(lat, r, R);

    CouplingField c = (p > 0.0 && beta != 0.0) ? sample_bipartite(lat, p, std::abs(beta), seed)
                                               : uniform_field(lat, beta);
    std::string sampler = opt(cfg, "sampler", "auto");
    TopoBudget budget;
    budget.n_samples = static_cast<int>(gp.get("mc_samples", 2000));
    TopoSampler ts;
    if (sampler == "enumerate") ts = TopoSampler::enumerate_all;
    else if (sampler == "mc") ts = TopoSampler::boltzmann_mc;
    else ts = (L * L <= 16) ? TopoSampler::enumerate_all : TopoSampler::boltzmann_mc;
    TopoEntropyResult res = topo_entropy_exact(lat, c, regions, ts, budget, seed);

    std::ostringstream os;
    os << L << ',' << r << ',' << R << ',' << c.distribution << ',' << fmt_double(p) << ','
       << fmt_double(beta) << ',' << res.sampler << ',' << fmt_double(res.s_topo) << ','
       << (res.stderr_ ? fmt_double(*res.stderr_) : "") << ',' << res.distinct_boundaries;
    return os.str();
}

std::string eab_row(const ScanConfig& cfg, const GridPoint& gp, std::uint64_t seed) {
    (void)cfg;
    int L = static_cast<int>(gp.get("L", 4));
    double p = gp.get("p", 0.5);
    TorusLattice lat = build_torus(L);
    CouplingField c = sample_bipartite(lat, p, 1.0, seed);
    GroundStateSet gs = enumerate_ground_states(lat, c);
    RigidLattice rl = rigid_lattice(gs, c);
    PercolationReport rep = percolation_report(rl, lat);
    std::ostringstream os;
    os << L << ',' << fmt_double(p) << ',' << gs.energy_int << ',' << gs.count << ','
       << fmt_double(rl.rigid_fraction) << ',' << rep.wraps_dir1 << ',' << rep.wraps_dir2 << ','
       << rep.spans_open << ',' << fmt_double(rep.largest_fraction);
    return os.str();
}

std::string pin_row(const ScanConfig& cfg, const GridPoint& gp, std::uint64_t seed) {
    (void)cfg;
    int L = static_cast<int>(gp.get("L", 6));
    double p = gp.get("p", 0.3);
    TorusLattice lat = build_torus(L);
    FieldRealization f = sample_diluted(lat, p, 1.0, seed);
    std::vector<int> pinned;
    std::vector<std::pair<int, int>> pins;
    for (int b = 0; b < lat.n_bonds(); ++b) {
        if (f.values[b] != 0.0) {
            pinned.push_back(b);
            pins.emplace_back(b, 1);
        }
    }
    StabilizerCode code = pin_spins(build_toric_stabilizers(lat), pins);
    int k = logical_qubit_count(code);
    PinWrap star = pinned_wrap_flags(lat, pinned, BondAdjacency::shared_star);
    PinWrap plaq = pinned_wrap_flags(lat, pinned, BondAdjacency::shared_plaquette);
    std::ostringstream os;
    os << L << ',' << fmt_double(p) << ','
       << fmt_double(static_cast<double>(pinned.size()) / lat.n_bonds()) << ',' << star.wraps_dir1
       << ',' << star.wraps_dir2 << ',' << k << ',' << star.largest_cluster << ','
       << plaq.wraps_dir1 << ',' << plaq.wraps_dir2;
    return os.str();
}

TargetSpec target_spec(const std::string& target) {
    if (target == "stopo")
        return {"L,r,R,distribution,p,beta,sampler,s_topo,s_topo_stderr,distinct_boundaries",
                stopo_row};
    if (target == "eab")
        return {"L,p,energy_int,gs_count,rigid_fraction,wraps_dir1,wraps_dir2,spans_open,"
                "largest_fraction",
                eab_row};
    if (target == "pin")
        return {"L,p,pinned_fraction,wraps_dir1,wraps_dir2,logical_qubits,largest_cluster,"
                "plaq_wraps_dir1,plaq_wraps_dir2",
                pin_row};
    throw InvalidParameterError("scan: unknown target '" + target + "'");
}

std::string canonical_config_json(const ScanConfig& cfg) {
    nlohmann::json j;
    j["experiment"] = cfg.experiment_id;
    j["target"] = cfg.target;
    nlohmann::json grid = nlohmann::json::array();
    for (const auto& [k, v] : cfg.grid) grid.push_back({{"name", k}, {"values", v}});
    j["grid"] = grid;
    j["n_samples"] = cfg.n_samples;
    j["seed"] = cfg.seed;
    nlohmann::json o = nlohmann::json::object();
    for (const auto& [k, v] : cfg.options) o[k] = v;
    j["options"] = o;
    return j.dump();
}

} // namespace

ScanConfig scan_config_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    ScanConfig cfg;
    cfg.experiment_id = j.at("experiment").get<std::string>();
    cfg.target = j.at("target").get<std::string>();
    for (const auto& axis : j.at("grid")) {
        if (axis.is_object() && axis.contains("name")) {
            cfg.grid.emplace_back(axis.at("name").get<std::string>(),
                                  axis.at("values").get<std::vector<double>>());
        }
    }
    if (cfg.grid.empty() && j.at("grid").is_object()) {
        for (auto it = j.at("grid").begin(); it != j.at("grid").end(); ++it)
            cfg.grid.emplace_back(it.key(), it.value().get<std::vector<double>>());
    }
    cfg.n_samples = j.value("n_samples", 1);
    cfg.seed = j.value("seed", 1ULL);
    cfg.out_dir = j.value("out_dir", std::string("."));
    cfg.threads = j.value("threads", 1);
    if (j.contains("options"))
        for (auto it = j["options"].begin(); it != j["options"].end(); ++it)
            cfg.options[it.key()] = it.value().is_string() ? it.value().get<std::string>()
                                                           : it.value().dump();
    if (cfg.n_samples <= 0) throw InvalidParameterError("scan: n_samples must be positive");
    return cfg;
}

ScanResult run_scan(const ScanConfig& cfg) {
    namespace fs = std::filesystem;
    const auto t0 = std::chrono::steady_clock::now();
    TargetSpec spec = target_spec(cfg.target);
    std::vector<GridPoint> grid = expand_grid(cfg);

    fs::create_directories(cfg.out_dir);
    ScanResult result;
    result.csv_path = (fs::path(cfg.out_dir) / (cfg.experiment_id + ".csv")).string();
    result.manifest_path = (fs::path(cfg.out_dir) / (cfg.experiment_id + ".manifest.json")).string();

    const std::string header =
        "experiment,grid_index,sample_index,seed,status," + spec.header;

    // resume: count completed grid points in an existing, schema-matching CSV
    long long resume_from = 0;
    if (fs::exists(result.csv_path)) {
        std::ifstream in(result.csv_path);
        std::string line;
        std::getline(in, line);
        if (line != header)
            throw InvalidParameterError("scan: existing CSV has a different schema; refusing");
        std::vector<long long> per_point(grid.size(), 0);
        while (std::getline(in, line)) {
            auto c1 = line.find(',');
            auto c2 = line.find(',', c1 + 1);
            long long g = std::stoll(line.substr(c1 + 1, c2 - c1 - 1));
            if (g >= 0 && g < static_cast<long long>(grid.size())) ++per_point[g];
        }
        while (resume_from < static_cast<long long>(grid.size()) &&
               per_point[resume_from] == cfg.n_samples)
            ++resume_from;
        result.resumed = resume_from > 0;
        // keep only fully completed grid points; partial ones are recomputed
        std::ifstream rein(result.csv_path);
        std::ostringstream keep;
        std::getline(rein, line);
        keep << line << '\n';
        while (std::getline(rein, line)) {
            auto c1 = line.find(',');
            auto c2 = line.find(',', c1 + 1);
            long long g = std::stoll(line.substr(c1 + 1, c2 - c1 - 1));
            if (g < resume_from) keep << line << '\n';
        }
        rein.close();
        std::ofstream rw(result.csv_path, std::ios::trunc);
        rw << keep.str();
        result.rows_written = resume_from * cfg.n_samples;
    } else {
        std::ofstream out(result.csv_path, std::ios::trunc);
        out << header << '\n';
    }

    std::ofstream out(result.csv_path, std::ios::app);
    for (long long g = resume_from; g < static_cast<long long>(grid.size()); ++g) {
        std::vector<std::string> rows(cfg.n_samples);
        std::vector<char> failed(cfg.n_samples, 0);
        parallel_for_index(cfg.n_samples, cfg.threads, [&](int i) {
            std::uint64_t seed = prf(cfg.seed, static_cast<std::uint64_t>(g), i);
            std::ostringstream os;
            os << cfg.experiment_id << ',' << g << ',' << i << ',' << seed << ',';
            try {
                std::string tail = spec.run(cfg, grid[g], seed);
                os << "ok," << tail;
            } catch (const BudgetError&) {
                os << "budget_error,";
                failed[i] = 1;
            } catch (const std::exception&) {
                os << "error,";
                failed[i] = 1;
            }
            rows[i] = os.str();
        });
        for (int i = 0; i < cfg.n_samples; ++i) {
            out << rows[i] << '\n';
            ++result.rows_written;
            result.failures += failed[i];
        }
        out.flush();
    }
    out.close();

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    nlohmann::json manifest;
    manifest["experiment"] = cfg.experiment_id;
    manifest["target"] = cfg.target;
    manifest["schema_version"] = 1;
    manifest["software_version"] = kVersion;
    manifest["config"] = nlohmann::json::parse(canonical_config_json(cfg));
    manifest["config_hash"] = fnv1a64(canonical_config_json(cfg));
    manifest["wall_time_s"] = wall;
    manifest["rows"] = result.rows_written;
    manifest["failures"] = result.failures;
    std::ofstream mf(result.manifest_path, std::ios::trunc);
    mf << manifest.dump(2) << '\n';
    return result;
}

} // namespace toriclab
