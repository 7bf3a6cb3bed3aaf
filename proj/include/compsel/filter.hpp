#pragma once

#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "compsel/catalog.hpp"
#include "compsel/perfmodel.hpp"
#include "compsel/pliability.hpp"

namespace compsel {

enum class SpecOp { Eq, Le, Ge };

/// Hard constraint on a component specification attribute. Le/Ge carry a
/// numeric bound; Eq may compare either a number or a token.
struct SpecConstraint {
    std::string attribute;
    SpecOp op = SpecOp::Eq;
    SpecValue value;
};

/// What the assembled system must provide and obey.
struct SystemSpec {
    std::set<RequirementId> requirements;
    std::vector<SpecConstraint> constraints;
    std::vector<PerformanceRequirement> perf_requirements;
    double pliability_threshold = 0.0;  // in [0, 10]
    double probability_threshold = 0.0; // in [0, 1]
};

/// Throws ValidationError on empty requirements or out-of-range thresholds.
void validate_system_spec(const SystemSpec& spec);

SystemSpec load_system_spec(std::istream& in, const std::string& source_name = "<stream>");
SystemSpec load_system_spec_file(const std::string& path);

/// True iff the component carries the attribute and the predicate holds.
/// A missing attribute (or a type mismatch) counts as non-compliance.
bool satisfies_constraint(const Component& component, const SpecConstraint& constraint);

/// Components surviving every specification constraint.
std::set<std::string> apply_spec_filter(const Catalog& catalog, const SystemSpec& spec);

/// Keeps components whose pliability is at least `threshold`.
std::set<std::string> apply_pliability_filter(const std::set<std::string>& survivors,
                                              const NormalizedQuality& nq,
                                              const QualityWeights& weights,
                                              double threshold);

/// Keeps components whose minimum satisfaction probability across `reqs`
/// is at least `threshold`. An empty requirement list keeps everything.
std::set<std::string> apply_probability_filter(const std::set<std::string>& survivors,
                                               const PerformanceModel& model,
                                               const std::vector<PerformanceRequirement>& reqs,
                                               double threshold);

} // namespace compsel
