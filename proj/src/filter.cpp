#include "compsel/filter.hpp"

#include <fstream>

#include "compsel/errors.hpp"
#include "json_util.hpp"

namespace compsel {

using nlohmann::json;

void validate_system_spec(const SystemSpec& spec) {
    if (spec.requirements.empty()) {
        throw ValidationError("system spec lists no requirements");
    }
    for (const auto& c : spec.constraints) {
        if (c.attribute.empty()) {
            throw ValidationError("spec constraint with empty attribute name");
        }
    }
    if (spec.pliability_threshold < 0.0 || spec.pliability_threshold > 10.0) {
        throw ValidationError("pliability_threshold outside [0, 10]");
    }
    if (spec.probability_threshold < 0.0 || spec.probability_threshold > 1.0) {
        throw ValidationError("probability_threshold outside [0, 1]");
    }
    std::set<std::string> metrics;
    for (const auto& r : spec.perf_requirements) {
        if (!metrics.insert(r.metric).second) {
            throw ValidationError("duplicate performance requirement for metric " + r.metric);
        }
    }
}

bool satisfies_constraint(const Component& component, const SpecConstraint& constraint) {
    const auto it = component.spec_attrs.find(constraint.attribute);
    if (it == component.spec_attrs.end()) {
        return false; // missing attribute counts as non-compliant
    }
    const SpecValue& attr = it->second;
    switch (constraint.op) {
        case SpecOp::Eq:
            return attr == constraint.value;
        case SpecOp::Le:
        case SpecOp::Ge: {
            if (!std::holds_alternative<double>(attr) ||
                !std::holds_alternative<double>(constraint.value)) {
                return false;
            }
            const double v = std::get<double>(attr);
            const double bound = std::get<double>(constraint.value);
            return constraint.op == SpecOp::Le ? v <= bound : v >= bound;
        }
    }
    return false;
}

std::set<std::string> apply_spec_filter(const Catalog& catalog, const SystemSpec& spec) {
    std::set<std::string> survivors;
    for (const Component& c : catalog.components) {
        bool ok = true;
        for (const auto& constraint : spec.constraints) {
            if (!satisfies_constraint(c, constraint)) {
                ok = false;
                break;
            }
        }
        if (ok) survivors.insert(c.id);
    }
    return survivors;
}

std::set<std::string> apply_pliability_filter(const std::set<std::string>& survivors,
                                              const NormalizedQuality& nq,
                                              const QualityWeights& weights,
                                              double threshold) {
    validate_weights(weights);
    std::set<std::string> kept;
    for (const auto& id : survivors) {
        if (component_pliability(id, nq, weights) >= threshold) kept.insert(id);
    }
    return kept;
}

std::set<std::string> apply_probability_filter(const std::set<std::string>& survivors,
                                               const PerformanceModel& model,
                                               const std::vector<PerformanceRequirement>& reqs,
                                               double threshold) {
    std::set<std::string> kept;
    for (const auto& id : survivors) {
        double min_prob = 1.0; // vacuous over an empty requirement list
        for (const auto& req : reqs) {
            min_prob = std::min(min_prob, satisfaction_probability(model, id, req));
        }
        if (min_prob >= threshold) kept.insert(id);
    }
    return kept;
}

namespace {

SpecOp spec_op_from_name(const std::string& name, const std::string& source_name) {
    if (name == "eq") return SpecOp::Eq;
    if (name == "le") return SpecOp::Le;
    if (name == "ge") return SpecOp::Ge;
    throw ParseError(source_name + ": constraint op must be \"eq\", \"le\" or \"ge\", got \"" +
                     name + "\"");
}

} // namespace

SystemSpec load_system_spec(std::istream& in, const std::string& source_name) {
    const json j = detail::parse_json(in, source_name);
    if (!j.is_object()) {
        throw ParseError(source_name + ": spec file must be a JSON object");
    }
    detail::check_format_version(j, source_name);
    for (const auto& [key, _] : j.items()) {
        if (key != "format_version" && key != "requirements" && key != "constraints" &&
            key != "perf_requirements" && key != "pliability_threshold" &&
            key != "probability_threshold") {
            throw ParseError(source_name + ": unknown key \"" + key + "\" in system spec");
        }
    }

    SystemSpec spec;
    try {
        if (!j.contains("requirements") || !j.at("requirements").is_array()) {
            throw ParseError(source_name + ": spec requires a \"requirements\" array");
        }
        for (const auto& r : j.at("requirements")) {
            if (!r.is_string() || r.get<std::string>().empty()) {
                throw ParseError(source_name + ": requirement ids must be non-empty strings");
            }
            if (!spec.requirements.insert(r.get<std::string>()).second) {
                throw ParseError(source_name + ": duplicate requirement id " +
                                 r.get<std::string>());
            }
        }
        if (j.contains("constraints")) {
            for (const auto& c : j.at("constraints")) {
                SpecConstraint constraint;
                constraint.attribute = c.at("attribute").get<std::string>();
                constraint.op = spec_op_from_name(c.at("op").get<std::string>(), source_name);
                const auto& v = c.at("value");
                if (v.is_number()) {
                    constraint.value = v.get<double>();
                } else if (v.is_string()) {
                    constraint.value = v.get<std::string>();
                } else {
                    throw ParseError(source_name + ": constraint value must be a number or string");
                }
                if (constraint.op != SpecOp::Eq &&
                    !std::holds_alternative<double>(constraint.value)) {
                    throw ParseError(source_name + ": le/ge constraint on " +
                                     constraint.attribute + " requires a numeric value");
                }
                spec.constraints.push_back(std::move(constraint));
            }
        }
        if (j.contains("perf_requirements")) {
            for (const auto& r : j.at("perf_requirements")) {
                PerformanceRequirement req;
                req.metric = r.at("metric").get<std::string>();
                const std::string op = r.at("op").get<std::string>();
                if (op == "le") {
                    req.op = PerfOp::LessEq;
                } else if (op == "ge") {
                    req.op = PerfOp::GreaterEq;
                } else {
                    throw ParseError(source_name + ": perf requirement op must be \"le\" or \"ge\"");
                }
                req.bound = r.at("bound").get<double>();
                spec.perf_requirements.push_back(std::move(req));
            }
        }
        if (j.contains("pliability_threshold")) {
            spec.pliability_threshold = j.at("pliability_threshold").get<double>();
        }
        if (j.contains("probability_threshold")) {
            spec.probability_threshold = j.at("probability_threshold").get<double>();
        }
    } catch (const json::exception& e) {
        throw ParseError(source_name + ": " + e.what());
    }

    validate_system_spec(spec);
    return spec;
}

SystemSpec load_system_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open spec file: " + path);
    return load_system_spec(in, path);
}

} // namespace compsel
