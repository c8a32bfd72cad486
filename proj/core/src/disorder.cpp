#include "toriclab/disorder.hpp"

#include "toriclab/errors.hpp"
#include "toriclab/rng.hpp"

#include "json.hpp"

namespace toriclab {

namespace {

// stream ids keep bipartite and diluted draws decorrelated under equal seeds
constexpr std::uint64_t kStreamBipartite = 0x42495041ULL;
constexpr std::uint64_t kStreamDiluted = 0x44494C55ULL;

void check_p(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidParameterError("disorder: p must lie in [0,1]");
}

} // namespace

Realization sample_bipartite(const TorusLattice& lat, double p, double strength,
                             std::uint64_t seed, std::uint64_t index) {
    check_p(p);
    if (!(strength > 0.0)) throw InvalidParameterError("sample_bipartite: strength must be > 0");
    Realization r;
    r.L = lat.L;
    r.distribution = "bipartite";
    r.p = p;
    r.strength = strength;
    r.seed = seed;
    r.index = index;
    r.values.resize(lat.n_bonds());
    int flipped = 0;
    for (int b = 0; b < lat.n_bonds(); ++b) {
        double u = prf_uniform(seed, kStreamBipartite ^ (index << 20), static_cast<std::uint64_t>(b));
        bool neg = u < p;
        r.values[b] = neg ? -strength : strength;
        flipped += neg;
    }
    r.empirical_fraction = static_cast<double>(flipped) / lat.n_bonds();
    return r;
}

Realization sample_diluted(const TorusLattice& lat, double p, double h,
                           std::uint64_t seed, std::uint64_t index) {
    check_p(p);
    if (!(h > 0.0)) throw InvalidParameterError("sample_diluted: h must be > 0");
    Realization r;
    r.L = lat.L;
    r.distribution = "diluted";
    r.p = p;
    r.strength = h;
    r.seed = seed;
    r.index = index;
    r.values.resize(lat.n_bonds());
    int on = 0;
    for (int b = 0; b < lat.n_bonds(); ++b) {
        double u = prf_uniform(seed, kStreamDiluted ^ (index << 20), static_cast<std::uint64_t>(b));
        bool hit = u < p;
        r.values[b] = hit ? h : 0.0;
        on += hit;
    }
    r.empirical_fraction = static_cast<double>(on) / lat.n_bonds();
    return r;
}

Realization uniform_field(const TorusLattice& lat, double value) {
    Realization r;
    r.L = lat.L;
    r.distribution = "uniform";
    r.p = 0.0;
    r.strength = value;
    r.seed = 0;
    r.index = 0;
    r.values.assign(lat.n_bonds(), value);
    r.empirical_fraction = 0.0;
    return r;
}

std::string realization_to_json(const Realization& r) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["L"] = r.L;
    j["distribution"] = r.distribution;
    j["parameters"] = {{"p", r.p}, {"strength", r.strength}};
    j["seed"] = r.seed;
    j["index"] = r.index;
    j["empirical_fraction"] = r.empirical_fraction;
    j["values"] = r.values;
    return j.dump(2);
}

Realization realization_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    if (j.at("schema_version").get<int>() != 1)
        throw InvalidParameterError("realization_from_json: unknown schema version");
    Realization r;
    r.L = j.at("L").get<int>();
    r.distribution = j.at("distribution").get<std::string>();
    r.p = j.at("parameters").at("p").get<double>();
    r.strength = j.at("parameters").at("strength").get<double>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.index = j.at("index").get<std::uint64_t>();
    r.empirical_fraction = j.value("empirical_fraction", 0.0);
    r.values = j.at("values").get<std::vector<double>>();
    if (static_cast<int>(r.values.size()) != 2 * r.L * r.L)
        throw InvalidParameterError("realization_from_json: value count does not match L");
    return r;
}

} // namespace toriclab
