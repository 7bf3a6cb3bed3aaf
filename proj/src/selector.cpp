#include "compsel/selector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "compsel/errors.hpp"
#include "json_util.hpp"

namespace compsel {

using nlohmann::json;

std::string algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::Greedy: return "greedy";
        case Algorithm::Intelligent: return "intelligent";
        case Algorithm::Sa: return "sa";
        case Algorithm::Exhaustive: return "exhaustive";
    }
    throw ValidationError("unhandled algorithm");
}

Algorithm algorithm_from_name(const std::string& name) {
    if (name == "greedy") return Algorithm::Greedy;
    if (name == "intelligent") return Algorithm::Intelligent;
    if (name == "sa") return Algorithm::Sa;
    if (name == "exhaustive") return Algorithm::Exhaustive;
    throw ValidationError("unknown algorithm: " + name);
}

Candidate evaluate(const std::set<std::string>& selection,
                   const Catalog& catalog,
                   const SystemSpec& spec,
                   const PerformanceModel* model,
                   const NormalizedQuality& nq,
                   const QualityWeights& weights) {
    Candidate candidate;
    candidate.selection.assign(selection.begin(), selection.end());

    double cost = 0.0;
    for (const auto& id : selection) {
        const Component& c = catalog.at(id);
        cost += c.cost;
        for (const auto& r : c.provides) candidate.covered.insert(r);
    }
    candidate.total_cost = cost;
    for (const auto& r : spec.requirements) {
        if (!candidate.covered.count(r)) candidate.uncovered.insert(r);
    }
    candidate.system_pliability =
        selection.empty() ? 0.0 : system_pliability(selection, nq, weights);

    bool perf_ok = true;
    if (!spec.perf_requirements.empty()) {
        if (model == nullptr) {
            throw ValidationError(
                "performance requirements present but no fitted model was provided");
        }
        for (const auto& req : spec.perf_requirements) {
            const double value = predict_metric(*model, req.metric, selection, catalog);
            candidate.predicted[req.metric] = value;
            perf_ok = perf_ok && requirement_satisfied(req, value);
        }
    }
    candidate.feasible = candidate.uncovered.empty() && perf_ok;
    return candidate;
}

namespace {

double violation_total(const Candidate& candidate, const SystemSpec& spec) {
    double total = 0.0;
    for (const auto& req : spec.perf_requirements) {
        const auto it = candidate.predicted.find(req.metric);
        if (it == candidate.predicted.end()) continue;
        const double gap = req.op == PerfOp::LessEq ? it->second - req.bound
                                                    : req.bound - it->second;
        if (gap > 0.0) total += gap / (std::abs(req.bound) + 1.0);
    }
    return total;
}

} // namespace

double candidate_energy(const Candidate& candidate, const SystemSpec& spec,
                        double survivor_cost_total) {
    double energy = 10.0 * static_cast<double>(candidate.uncovered.size());
    energy += candidate.total_cost / (1.0 + survivor_cost_total);
    energy += (10.0 - candidate.system_pliability) / 10.0;
    energy += violation_total(candidate, spec);
    return energy;
}

bool prefer_candidate(const Candidate& a, const Candidate& b, const SystemSpec& spec) {
    if (a.feasible != b.feasible) return a.feasible;
    if (a.uncovered.size() != b.uncovered.size()) {
        return a.uncovered.size() < b.uncovered.size();
    }
    const double va = violation_total(a, spec);
    const double vb = violation_total(b, spec);
    if (va != vb) return va < vb;
    if (a.total_cost != b.total_cost) return a.total_cost < b.total_cost;
    if (a.system_pliability != b.system_pliability) {
        return a.system_pliability > b.system_pliability;
    }
    return a.selection < b.selection;
}

namespace {

constexpr double kZeroCostEpsilon = 1e-9;

std::vector<std::string> sorted_ids(const std::set<std::string>& survivors) {
    return std::vector<std::string>(survivors.begin(), survivors.end());
}

/// Requirements no survivor provides, sorted; empty means coverable.
std::vector<RequirementId> uncoverable_requirements(const std::set<std::string>& survivors,
                                                    const Catalog& catalog,
                                                    const SystemSpec& spec) {
    std::set<RequirementId> providable;
    for (const auto& id : survivors) {
        for (const auto& r : catalog.at(id).provides) providable.insert(r);
    }
    std::vector<RequirementId> missing;
    for (const auto& r : spec.requirements) {
        if (!providable.count(r)) missing.push_back(r);
    }
    return missing;
}

SelectionResult single_round_result(Candidate best, Algorithm algorithm,
                                    std::optional<std::uint64_t> seed) {
    SelectionResult result;
    result.status = best.feasible ? SelectionStatus::Feasible
                                  : SelectionStatus::InfeasibleBestEffort;
    result.algorithm = algorithm;
    result.rounds_used = 1;
    result.rng_seed = seed;
    result.trace.push_back(TraceEntry{1, best.selection, best.total_cost,
                                      best.system_pliability, best.uncovered,
                                      best.feasible});
    result.best = std::move(best);
    return result;
}

struct GreedyScore {
    double score = 0.0;
    double pliability = 0.0; // tie-break for the intelligent variant
};

/// Shared cover loop for both greedy variants. `score_of` rates one
/// component given its count of newly covered requirements; among exactly
/// tied scores the winner is rotated by `tie_rotation`.
template <typename ScoreFn>
Candidate greedy_cover(const std::set<std::string>& survivors,
                       const Catalog& catalog, const SystemSpec& spec,
                       const PerformanceModel* model, const NormalizedQuality& nq,
                       const QualityWeights& weights, unsigned tie_rotation,
                       bool tie_break_on_pliability, ScoreFn score_of) {
    auto missing = uncoverable_requirements(survivors, catalog, spec);
    if (!missing.empty()) throw UncoverableError(std::move(missing));

    const std::vector<std::string> ids = sorted_ids(survivors);
    std::vector<bool> chosen(ids.size(), false);
    std::set<std::string> selection;
    std::set<RequirementId> covered;

    while (covered.size() < spec.requirements.size()) {
        struct Tied {
            std::size_t index;
            double pliability;
        };
        double best_score = -std::numeric_limits<double>::infinity();
        std::vector<Tied> ties;
        for (std::size_t i = 0; i < ids.size(); ++i) {
            if (chosen[i]) continue;
            const Component& c = catalog.at(ids[i]);
            std::size_t newly = 0;
            for (const auto& r : c.provides) {
                if (spec.requirements.count(r) && !covered.count(r)) ++newly;
            }
            if (newly == 0) continue;
            const GreedyScore s = score_of(c, newly);
            if (s.score > best_score) {
                best_score = s.score;
                ties.clear();
            }
            if (s.score == best_score) {
                ties.push_back(Tied{i, s.pliability});
            }
        }
        if (ties.empty()) break; // nothing adds coverage

        if (tie_break_on_pliability) {
            std::stable_sort(ties.begin(), ties.end(), [](const Tied& a, const Tied& b) {
                return a.pliability > b.pliability;
            });
        }
        const std::size_t pick = ties[tie_rotation % ties.size()].index;
        chosen[pick] = true;
        selection.insert(ids[pick]);
        for (const auto& r : catalog.at(ids[pick]).provides) {
            if (spec.requirements.count(r)) covered.insert(r);
        }
    }
    return evaluate(selection, catalog, spec, model, nq, weights);
}

} // namespace

SelectionResult greedy_select(const std::set<std::string>& survivors,
                              const Catalog& catalog, const SystemSpec& spec,
                              const PerformanceModel* model,
                              const NormalizedQuality& nq,
                              const QualityWeights& weights, unsigned tie_rotation) {
    Candidate best = greedy_cover(
        survivors, catalog, spec, model, nq, weights, tie_rotation,
        /*tie_break_on_pliability=*/false,
        [&](const Component& c, std::size_t newly) {
            const double denom = c.cost > 0.0 ? c.cost : kZeroCostEpsilon;
            return GreedyScore{static_cast<double>(newly) / denom, 0.0};
        });
    return single_round_result(std::move(best), Algorithm::Greedy, std::nullopt);
}

SelectionResult intelligent_greedy_select(const std::set<std::string>& survivors,
                                          const Catalog& catalog,
                                          const SystemSpec& spec,
                                          const PerformanceModel* model,
                                          const NormalizedQuality& nq,
                                          const QualityWeights& weights,
                                          unsigned tie_rotation) {
    if (!spec.perf_requirements.empty() && model == nullptr) {
        throw ValidationError(
            "performance requirements present but no fitted model was provided");
    }
    Candidate best = greedy_cover(
        survivors, catalog, spec, model, nq, weights, tie_rotation,
        /*tie_break_on_pliability=*/true,
        [&](const Component& c, std::size_t newly) {
            const double pliability = component_pliability(c.id, nq, weights);
            double min_prob = 1.0;
            for (const auto& req : spec.perf_requirements) {
                min_prob = std::min(min_prob, satisfaction_probability(*model, c.id, req));
            }
            const double denom = c.cost > 0.0 ? c.cost : kZeroCostEpsilon;
            const double score =
                static_cast<double>(newly) * (1.0 + pliability / 10.0) * min_prob / denom;
            return GreedyScore{score, pliability};
        });
    return single_round_result(std::move(best), Algorithm::Intelligent, std::nullopt);
}

namespace {

/// Deterministic draws layered over mt19937_64: rejection sampling for
/// indices, 53-bit mantissa for unit doubles. Keeps run-to-run behavior
/// independent of the standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::size_t index(std::size_t n) {
        const std::uint64_t bound = n;
        const std::uint64_t limit =
            std::numeric_limits<std::uint64_t>::max() -
            std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t draw;
        do {
            draw = engine_();
        } while (draw >= limit);
        return static_cast<std::size_t>(draw % bound);
    }

    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

enum class MoveKind { Add, Remove, Swap };

struct SubsetState {
    std::vector<char> in; // membership flag per survivor index
    std::size_t count = 0;

    void toggle(std::size_t i) {
        in[i] = !in[i];
        count += in[i] ? 1 : -1;
    }
};

/// Mutates `state` by one uniformly chosen applicable move.
void apply_random_move(SubsetState& state, Rng& rng) {
    const std::size_t n = state.in.size();
    const std::size_t present = state.count;
    const std::size_t absent = n - present;

    MoveKind kinds[3];
    std::size_t kind_count = 0;
    if (absent > 0) kinds[kind_count++] = MoveKind::Add;
    if (present > 0) kinds[kind_count++] = MoveKind::Remove;
    if (present > 0 && absent > 0) kinds[kind_count++] = MoveKind::Swap;
    if (kind_count == 0) return;

    const MoveKind kind = kinds[rng.index(kind_count)];

    const auto nth_with = [&](bool member, std::size_t nth) {
        for (std::size_t i = 0; i < n; ++i) {
            if (static_cast<bool>(state.in[i]) == member && nth-- == 0) return i;
        }
        return n; // unreachable for valid nth
    };

    switch (kind) {
        case MoveKind::Add:
            state.toggle(nth_with(false, rng.index(absent)));
            break;
        case MoveKind::Remove:
            state.toggle(nth_with(true, rng.index(present)));
            break;
        case MoveKind::Swap: {
            // Both picks against the pre-move membership, so the element
            // being removed can never be the one added back.
            const std::size_t out = nth_with(true, rng.index(present));
            const std::size_t in = nth_with(false, rng.index(absent));
            state.toggle(out);
            state.toggle(in);
            break;
        }
    }
}

std::set<std::string> state_selection(const SubsetState& state,
                                      const std::vector<std::string>& ids) {
    std::set<std::string> selection;
    for (std::size_t i = 0; i < state.in.size(); ++i) {
        if (state.in[i]) selection.insert(ids[i]);
    }
    return selection;
}

} // namespace

SelectionResult sa_select(const std::set<std::string>& survivors,
                          const Catalog& catalog, const SystemSpec& spec,
                          const PerformanceModel* model, const NormalizedQuality& nq,
                          const QualityWeights& weights, const SaParams& params,
                          const SaStepObserver& observer) {
    if (!(params.cooling_factor > 0.0 && params.cooling_factor < 1.0)) {
        throw ValidationError("cooling_factor must lie in (0, 1)");
    }
    if (params.steps_per_temperature < 1) {
        throw ValidationError("steps_per_temperature must be positive");
    }
    if (params.min_temperature <= 0.0) {
        throw ValidationError("min_temperature must be positive");
    }
    if (params.initial_temperature && *params.initial_temperature <= 0.0) {
        throw ValidationError("initial_temperature must be positive");
    }

    {
        auto missing = uncoverable_requirements(survivors, catalog, spec);
        if (!missing.empty()) throw UncoverableError(std::move(missing));
    }

    const std::vector<std::string> ids = sorted_ids(survivors);
    double survivor_cost_total = 0.0;
    for (const auto& id : ids) survivor_cost_total += catalog.at(id).cost;

    const auto energy_of = [&](const Candidate& c) {
        return candidate_energy(c, spec, survivor_cost_total);
    };

    // Seed the walk from the greedy cover.
    SubsetState state{std::vector<char>(ids.size(), 0), 0};
    {
        const SelectionResult seed_result =
            greedy_select(survivors, catalog, spec, model, nq, weights);
        for (const auto& id : seed_result.best.selection) {
            state.toggle(static_cast<std::size_t>(
                std::lower_bound(ids.begin(), ids.end(), id) - ids.begin()));
        }
    }

    Rng rng(params.seed);
    Candidate current = evaluate(state_selection(state, ids), catalog, spec, model, nq, weights);
    double current_energy = energy_of(current);
    Candidate best = current;
    double best_energy = current_energy;

    double temperature;
    if (params.initial_temperature) {
        temperature = *params.initial_temperature;
    } else {
        // Probe the move landscape: mean |dE| over a 100-step random walk,
        // scaled so a typical worsening move starts near 50% acceptance.
        SubsetState walk = state;
        double walk_energy = current_energy;
        double total_abs_delta = 0.0;
        constexpr int kProbeMoves = 100;
        for (int i = 0; i < kProbeMoves; ++i) {
            apply_random_move(walk, rng);
            const double e = energy_of(
                evaluate(state_selection(walk, ids), catalog, spec, model, nq, weights));
            total_abs_delta += std::abs(e - walk_energy);
            walk_energy = e;
        }
        temperature = total_abs_delta / kProbeMoves / std::numbers::ln2;
        if (temperature <= 0.0) temperature = 1.0;
    }

    while (temperature >= params.min_temperature) {
        for (int step = 0; step < params.steps_per_temperature; ++step) {
            SubsetState neighbor = state;
            apply_random_move(neighbor, rng);
            const Candidate proposed =
                evaluate(state_selection(neighbor, ids), catalog, spec, model, nq, weights);
            const double proposed_energy = energy_of(proposed);
            const double delta = proposed_energy - current_energy;
            const bool accepted =
                delta <= 0.0 || rng.unit() < std::exp(-delta / temperature);
            if (observer) {
                observer(SaStepInfo{temperature, current_energy, proposed_energy,
                                    best_energy, accepted});
            }
            if (accepted) {
                state = std::move(neighbor);
                current = proposed;
                current_energy = proposed_energy;
                if (current_energy < best_energy) {
                    best = current;
                    best_energy = current_energy;
                }
            }
        }
        temperature *= params.cooling_factor;
    }

    return single_round_result(std::move(best), Algorithm::Sa, params.seed);
}

SelectionResult exhaustive_select(const std::set<std::string>& survivors,
                                  const Catalog& catalog, const SystemSpec& spec,
                                  const PerformanceModel* model,
                                  const NormalizedQuality& nq,
                                  const QualityWeights& weights) {
    if (survivors.size() > exhaustive_survivor_limit) {
        throw ValidationError("exhaustive selection is limited to " +
                              std::to_string(exhaustive_survivor_limit) +
                              " survivors, got " + std::to_string(survivors.size()));
    }
    const std::vector<std::string> ids = sorted_ids(survivors);
    const std::uint32_t subset_count = 1u << ids.size();

    std::optional<Candidate> best;
    for (std::uint32_t mask = 0; mask < subset_count; ++mask) {
        std::set<std::string> selection;
        for (std::size_t i = 0; i < ids.size(); ++i) {
            if (mask & (1u << i)) selection.insert(ids[i]);
        }
        Candidate candidate = evaluate(selection, catalog, spec, model, nq, weights);
        if (!best || prefer_candidate(candidate, *best, spec)) {
            best = std::move(candidate);
        }
    }
    return single_round_result(std::move(*best), Algorithm::Exhaustive, std::nullopt);
}

SelectionResult run_selection_loop(Algorithm algorithm,
                                   const std::set<std::string>& survivors,
                                   const Catalog& catalog, const SystemSpec& spec,
                                   const PerformanceModel* model,
                                   const NormalizedQuality& nq,
                                   const QualityWeights& weights,
                                   const SaParams& sa_params, int max_rounds) {
    if (max_rounds < 1) throw ValidationError("max_rounds must be positive");

    SelectionResult result;
    result.algorithm = algorithm;
    if (algorithm == Algorithm::Sa) result.rng_seed = sa_params.seed;

    std::optional<Candidate> best_seen;
    for (int round = 0; round < max_rounds; ++round) {
        SelectionResult round_result;
        switch (algorithm) {
            case Algorithm::Greedy:
                round_result = greedy_select(survivors, catalog, spec, model, nq,
                                             weights, static_cast<unsigned>(round));
                break;
            case Algorithm::Intelligent:
                round_result = intelligent_greedy_select(
                    survivors, catalog, spec, model, nq, weights,
                    static_cast<unsigned>(round));
                break;
            case Algorithm::Sa: {
                SaParams round_params = sa_params;
                round_params.seed = sa_params.seed + static_cast<std::uint64_t>(round);
                round_result =
                    sa_select(survivors, catalog, spec, model, nq, weights, round_params);
                break;
            }
            case Algorithm::Exhaustive:
                round_result =
                    exhaustive_select(survivors, catalog, spec, model, nq, weights);
                break;
        }

        const Candidate& candidate = round_result.best;
        result.trace.push_back(TraceEntry{round + 1, candidate.selection,
                                          candidate.total_cost,
                                          candidate.system_pliability,
                                          candidate.uncovered, candidate.feasible});
        if (candidate.feasible) {
            result.best = candidate;
            result.status = SelectionStatus::Feasible;
            result.rounds_used = round + 1;
            return result;
        }
        if (!best_seen || prefer_candidate(candidate, *best_seen, spec)) {
            best_seen = candidate;
        }
    }

    result.best = std::move(*best_seen);
    result.status = SelectionStatus::InfeasibleBestEffort;
    result.rounds_used = max_rounds;
    return result;
}

std::string result_to_string(const SelectionResult& result) {
    json j;
    j["format_version"] = "1";
    j["algorithm"] = algorithm_name(result.algorithm);
    j["status"] = result.status == SelectionStatus::Feasible ? "feasible"
                                                             : "infeasible-best-effort";
    j["rounds_used"] = result.rounds_used;
    if (result.rng_seed) j["seed"] = *result.rng_seed;
    j["selection"] = result.best.selection;
    j["covered"] = result.best.covered;
    j["uncovered"] = result.best.uncovered;
    j["total_cost"] = result.best.total_cost;
    j["system_pliability"] = result.best.system_pliability;
    j["predicted"] = result.best.predicted;
    j["feasible"] = result.best.feasible;
    json trace = json::array();
    for (const TraceEntry& entry : result.trace) {
        trace.push_back({{"round", entry.round},
                         {"selection", entry.selection},
                         {"total_cost", entry.total_cost},
                         {"system_pliability", entry.system_pliability},
                         {"uncovered", entry.uncovered},
                         {"verdict", entry.feasible ? "feasible" : "infeasible"}});
    }
    j["trace"] = std::move(trace);
    return j.dump(2) + "\n";
}

} // namespace compsel
