#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "compsel/catalog.hpp"
#include "compsel/filter.hpp"
#include "compsel/perfmodel.hpp"
#include "compsel/pliability.hpp"

namespace compsel {

enum class Algorithm { Greedy, Intelligent, Sa, Exhaustive };

std::string algorithm_name(Algorithm a);
Algorithm algorithm_from_name(const std::string& name);

/// One evaluated combination of components.
struct Candidate {
    std::vector<std::string> selection; // sorted component ids
    std::set<RequirementId> covered;
    std::set<RequirementId> uncovered;
    double total_cost = 0.0;
    double system_pliability = 0.0; // 0 for the empty selection
    std::map<std::string, double> predicted;
    bool feasible = false;

    bool operator==(const Candidate&) const = default;
};

struct TraceEntry {
    int round = 0;
    std::vector<std::string> selection;
    double total_cost = 0.0;
    double system_pliability = 0.0;
    std::set<RequirementId> uncovered;
    bool feasible = false;

    bool operator==(const TraceEntry&) const = default;
};

enum class SelectionStatus { Feasible, InfeasibleBestEffort };

struct SelectionResult {
    Candidate best;
    SelectionStatus status = SelectionStatus::InfeasibleBestEffort;
    Algorithm algorithm = Algorithm::Greedy;
    int rounds_used = 0;
    std::optional<std::uint64_t> rng_seed; // set for seeded algorithms
    std::vector<TraceEntry> trace;

    bool operator==(const SelectionResult&) const = default;
};

/// Annealing schedule. Leaving initial_temperature unset derives it from the
/// observed move energies (mean |dE| over 100 random moves, divided by ln 2).
struct SaParams {
    std::optional<double> initial_temperature;
    double cooling_factor = 0.95;  // in (0, 1)
    int steps_per_temperature = 50;
    double min_temperature = 1e-3;
    std::uint64_t seed = 0;
};

/// Per-step annealing observation, for tests and diagnostics.
struct SaStepInfo {
    double temperature = 0.0;
    double current_energy = 0.0;
    double proposed_energy = 0.0;
    double best_energy = 0.0;
    bool accepted = false;
};
using SaStepObserver = std::function<void(const SaStepInfo&)>;

/// Fills coverage, cost, pliability, predicted metrics and the feasibility
/// verdict for a selection. `model` may be null only when the spec carries
/// no performance requirements.
Candidate evaluate(const std::set<std::string>& selection,
                   const Catalog& catalog,
                   const SystemSpec& spec,
                   const PerformanceModel* model,
                   const NormalizedQuality& nq,
                   const QualityWeights& weights);

/// Energy minimized by the annealer; defined for any candidate. Lower is
/// better; feasible low-cost high-quality candidates approach 0.
///   10 * |uncovered|
/// + cost / (1 + survivor_cost_total)
/// + (10 - system_pliability) / 10
/// + sum of per-metric bound violations, each scaled by 1/(|bound| + 1)
double candidate_energy(const Candidate& candidate,
                        const SystemSpec& spec,
                        double survivor_cost_total);

/// Preference order shared by the exhaustive oracle and best-effort
/// tracking: feasibility, fewer uncovered requirements, smaller total bound
/// violation, lower cost, higher pliability, lexicographically smaller ids.
bool prefer_candidate(const Candidate& a, const Candidate& b, const SystemSpec& spec);

/// Set-cover greedy: repeatedly adds the component with the best
/// newly-covered / cost ratio (zero cost counts as 1e-9). `tie_rotation`
/// rotates the winner among exactly tied components; 0 keeps the natural
/// tie-break (lexicographically smallest id).
SelectionResult greedy_select(const std::set<std::string>& survivors,
                              const Catalog& catalog,
                              const SystemSpec& spec,
                              const PerformanceModel* model,
                              const NormalizedQuality& nq,
                              const QualityWeights& weights,
                              unsigned tie_rotation = 0);

/// Greedy with a quality- and probability-aware score:
///   newly_covered * (1 + pliability/10) * min satisfaction probability / cost
/// Ties prefer the higher-pliability component, then the smaller id.
SelectionResult intelligent_greedy_select(const std::set<std::string>& survivors,
                                          const Catalog& catalog,
                                          const SystemSpec& spec,
                                          const PerformanceModel* model,
                                          const NormalizedQuality& nq,
                                          const QualityWeights& weights,
                                          unsigned tie_rotation = 0);

/// Simulated annealing over survivor subsets, seeded from the greedy cover.
/// Moves add, remove, or swap one component; worsening moves are accepted
/// with probability exp(-dE/T) under geometric cooling. Deterministic for a
/// fixed seed. Returns the best-energy candidate ever visited.
SelectionResult sa_select(const std::set<std::string>& survivors,
                          const Catalog& catalog,
                          const SystemSpec& spec,
                          const PerformanceModel* model,
                          const NormalizedQuality& nq,
                          const QualityWeights& weights,
                          const SaParams& params,
                          const SaStepObserver& observer = nullptr);

/// Ground-truth oracle for small instances: enumerates every subset of at
/// most 20 survivors and returns the feasible candidate minimizing
/// (cost, -pliability, lexicographic ids), or the least-violating candidate
/// when none is feasible.
SelectionResult exhaustive_select(const std::set<std::string>& survivors,
                                  const Catalog& catalog,
                                  const SystemSpec& spec,
                                  const PerformanceModel* model,
                                  const NormalizedQuality& nq,
                                  const QualityWeights& weights);

inline constexpr std::size_t exhaustive_survivor_limit = 20;

/// Generate-estimate-compare loop: each round produces a candidate (greedy
/// variants rotate tie-breaks by round, SA reruns with seed + round), stops
/// at the first feasible one, and otherwise reports the best candidate seen
/// after max_rounds rounds.
SelectionResult run_selection_loop(Algorithm algorithm,
                                   const std::set<std::string>& survivors,
                                   const Catalog& catalog,
                                   const SystemSpec& spec,
                                   const PerformanceModel* model,
                                   const NormalizedQuality& nq,
                                   const QualityWeights& weights,
                                   const SaParams& sa_params = {},
                                   int max_rounds = 50);

/// Serialized JSON form of a result (two-space indent, trailing newline).
/// Identical results serialize to identical bytes.
std::string result_to_string(const SelectionResult& result);

} // namespace compsel
