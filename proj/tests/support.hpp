#pragma once

// Shared fixtures and instance generators for the test suites.

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <unistd.h>

#include "compsel/catalog.hpp"
#include "compsel/filter.hpp"
#include "compsel/perfmodel.hpp"
#include "compsel/pliability.hpp"
#include "compsel/selector.hpp"

namespace support {

// Deterministic draws independent of the standard library's distributions.
inline std::size_t rand_index(std::mt19937_64& rng, std::size_t n) {
    return static_cast<std::size_t>(rng() % n);
}

inline double rand_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double rand_range(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * rand_unit(rng);
}

inline compsel::Component comp(std::string id, std::set<std::string> provides,
                               double cost,
                               std::map<std::string, double> quality = {},
                               std::map<std::string, compsel::SpecValue> spec = {}) {
    compsel::Component c;
    c.id = std::move(id);
    c.name = c.id;
    c.provides = std::move(provides);
    c.cost = cost;
    c.raw_quality = std::move(quality);
    c.spec_attrs = std::move(spec);
    return c;
}

struct Instance {
    compsel::Catalog catalog;
    compsel::SystemSpec spec;
    compsel::QualityWeights weights;
    compsel::NormalizedQuality nq;
    std::set<std::string> survivors; // all catalog ids unless stated otherwise
};

inline Instance finish_instance(std::vector<compsel::Component> components,
                                std::set<compsel::RequirementId> requirements,
                                compsel::QualityWeights weights) {
    Instance inst;
    inst.catalog = compsel::make_catalog(std::move(components));
    inst.spec.requirements = std::move(requirements);
    inst.weights = std::move(weights);
    inst.nq = compsel::normalize(inst.catalog);
    for (const auto& c : inst.catalog.components) inst.survivors.insert(c.id);
    return inst;
}

/// Three components covering {r1, r2}: A provides both at cost 3, B and C
/// one each at cost 1. The cheapest cover is {B, C}.
inline Instance cover_instance() {
    std::vector<compsel::Component> components;
    components.push_back(comp("A", {"r1", "r2"}, 3.0, {{"reliability", 8.0}}));
    components.push_back(comp("B", {"r1"}, 1.0, {{"reliability", 10.0}}));
    components.push_back(comp("C", {"r2"}, 1.0, {{"reliability", 4.0}}));
    return finish_instance(std::move(components), {"r1", "r2"},
                           {{{"reliability", 1.0}}});
}

struct RandomCoverOptions {
    std::size_t components = 10;
    std::size_t requirements = 8;
    bool unit_costs = false;
    bool uniform_quality = true; // identical quality -> constant pliability
};

/// Coverable random instance: every requirement is provided by at least one
/// component, components carry 1-3 requirements beyond that, and costs are
/// unit or drawn from [0.5, 3].
inline Instance random_cover_instance(std::mt19937_64& rng,
                                      const RandomCoverOptions& opt = {}) {
    std::vector<std::string> req_ids;
    for (std::size_t r = 0; r < opt.requirements; ++r) {
        req_ids.push_back("r" + std::to_string(r));
    }
    std::vector<compsel::Component> components;
    for (std::size_t i = 0; i < opt.components; ++i) {
        std::string id = "c";
        if (i < 10) id += "0";
        id += std::to_string(i);
        std::set<std::string> provides;
        const std::size_t picks = 1 + rand_index(rng, 3);
        for (std::size_t k = 0; k < picks; ++k) {
            provides.insert(req_ids[rand_index(rng, req_ids.size())]);
        }
        const double cost = opt.unit_costs ? 1.0 : rand_range(rng, 0.5, 3.0);
        const double quality =
            opt.uniform_quality ? 5.0 : rand_range(rng, 0.0, 10.0);
        components.push_back(comp(std::move(id), std::move(provides), cost,
                                  {{"reliability", quality}}));
    }
    // Patch coverage so the instance is always coverable.
    for (const auto& r : req_ids) {
        components[rand_index(rng, components.size())].provides.insert(r);
    }
    return finish_instance(std::move(components),
                           std::set<compsel::RequirementId>(req_ids.begin(), req_ids.end()),
                           {{{"reliability", 1.0}}});
}

/// Independent subset enumeration: covering subsets ranked by
/// (cost, -mean pliability, lexicographic ids), written without touching the
/// selection algorithms so it can stand as their oracle.
struct BruteResult {
    std::vector<std::string> selection;
    double cost = 0.0;
    bool feasible = false;
};

inline BruteResult brute_force_min_cover(const Instance& inst) {
    std::vector<std::string> ids(inst.survivors.begin(), inst.survivors.end());
    BruteResult best;
    double best_pliability = 0.0;
    bool have_best = false;

    for (std::uint32_t mask = 0; mask < (1u << ids.size()); ++mask) {
        std::vector<std::string> selection;
        std::set<std::string> covered;
        double cost = 0.0;
        for (std::size_t i = 0; i < ids.size(); ++i) {
            if (!(mask & (1u << i))) continue;
            selection.push_back(ids[i]);
            const auto& c = inst.catalog.at(ids[i]);
            cost += c.cost;
            covered.insert(c.provides.begin(), c.provides.end());
        }
        bool covers = true;
        for (const auto& r : inst.spec.requirements) {
            if (!covered.count(r)) covers = false;
        }
        if (!covers) continue;

        double pliability = 0.0;
        if (!selection.empty()) {
            for (const auto& id : selection) {
                pliability += compsel::component_pliability(id, inst.nq, inst.weights);
            }
            pliability /= static_cast<double>(selection.size());
        }
        const bool better =
            !have_best || cost < best.cost ||
            (cost == best.cost && pliability > best_pliability) ||
            (cost == best.cost && pliability == best_pliability &&
             selection < best.selection);
        if (better) {
            best.selection = selection;
            best.cost = cost;
            best.feasible = true;
            best_pliability = pliability;
            have_best = true;
        }
    }
    return best;
}

/// Scratch directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<unsigned> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("compsel_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string file(const std::string& name, const std::string& content) const {
        const std::filesystem::path p = path_ / name;
        std::ofstream out(p);
        out << content;
        return p.string();
    }
    std::string path(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
}

} // namespace support
