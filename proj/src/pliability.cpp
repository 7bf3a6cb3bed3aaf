#include "compsel/pliability.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "compsel/errors.hpp"
#include "json_util.hpp"

namespace compsel {

namespace {
constexpr double kWeightSumTolerance = 1e-9;
}

void validate_weights(const QualityWeights& weights) {
    double sum = 0.0;
    for (const auto& [attr, w] : weights.weights) {
        if (w < 0.0 || w > 1.0) {
            throw ValidationError("weight for " + attr + " is " +
                                  detail::format_double(w) + ", outside [0, 1]");
        }
        sum += w;
    }
    if (std::abs(sum - 1.0) > kWeightSumTolerance) {
        throw ValidationError("weights sum to " + detail::format_double(sum) +
                              ", expected 1");
    }
}

QualityWeights renormalized(QualityWeights weights) {
    double sum = 0.0;
    for (const auto& [_, w] : weights.weights) sum += w;
    if (sum <= 0.0) {
        throw ValidationError("cannot renormalize weights with sum " +
                              detail::format_double(sum));
    }
    for (auto& [_, w] : weights.weights) w /= sum;
    return weights;
}

double NormalizedQuality::value(const std::string& component_id,
                                const std::string& attribute) const {
    const Eigen::Index row = row_of(component_id);
    const auto it = std::lower_bound(attribute_names.begin(), attribute_names.end(),
                                     attribute);
    if (it == attribute_names.end() || *it != attribute) return 0.0;
    return values(row, it - attribute_names.begin());
}

Eigen::Index NormalizedQuality::row_of(const std::string& component_id) const {
    const auto it = std::find(component_ids.begin(), component_ids.end(), component_id);
    if (it == component_ids.end()) {
        throw ValidationError("unknown component id: " + component_id);
    }
    return it - component_ids.begin();
}

NormalizedQuality normalize(const Catalog& catalog) {
    NormalizedQuality nq;
    nq.attribute_names = catalog.attribute_names;
    nq.component_ids.reserve(catalog.components.size());
    for (const Component& c : catalog.components) nq.component_ids.push_back(c.id);

    const Eigen::Index rows = static_cast<Eigen::Index>(catalog.components.size());
    const Eigen::Index cols = static_cast<Eigen::Index>(nq.attribute_names.size());
    Eigen::MatrixXd raw = Eigen::MatrixXd::Zero(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto& quality = catalog.components[i].raw_quality;
        for (Eigen::Index h = 0; h < cols; ++h) {
            const auto it = quality.find(nq.attribute_names[h]);
            if (it != quality.end()) raw(i, h) = it->second;
        }
    }

    nq.values = Eigen::MatrixXd::Zero(rows, cols);
    for (Eigen::Index h = 0; h < cols; ++h) {
        const double max_value = rows == 0 ? 0.0 : raw.col(h).maxCoeff();
        if (max_value > 0.0) {
            nq.values.col(h) = raw.col(h) / max_value * 10.0;
        }
        // max 0 leaves the column at 0: an attribute nobody exhibits carries
        // no quality signal.
    }
    return nq;
}

double component_pliability(const std::string& component_id,
                            const NormalizedQuality& nq,
                            const QualityWeights& weights) {
    validate_weights(weights);
    const Eigen::Index row = nq.row_of(component_id);
    double q = 0.0;
    for (const auto& [attr, w] : weights.weights) {
        const auto it = std::lower_bound(nq.attribute_names.begin(),
                                         nq.attribute_names.end(), attr);
        if (it == nq.attribute_names.end() || *it != attr) continue;
        q += w * nq.values(row, it - nq.attribute_names.begin());
    }
    return q;
}

double system_pliability(const std::set<std::string>& selected,
                         const NormalizedQuality& nq,
                         const QualityWeights& weights) {
    if (selected.empty()) {
        throw ValidationError("system pliability of an empty selection is undefined");
    }
    double sum = 0.0;
    for (const auto& id : selected) {
        sum += component_pliability(id, nq, weights);
    }
    return sum / static_cast<double>(selected.size());
}

std::vector<std::string> unknown_weight_attributes(const QualityWeights& weights,
                                                   const Catalog& catalog) {
    std::vector<std::string> unknown;
    for (const auto& [attr, _] : weights.weights) {
        if (!std::binary_search(catalog.attribute_names.begin(),
                                catalog.attribute_names.end(), attr)) {
            unknown.push_back(attr);
        }
    }
    return unknown;
}

QualityWeights load_weights(std::istream& in, const std::string& source_name) {
    const nlohmann::json j = detail::parse_json(in, source_name);
    if (!j.is_object()) {
        throw ParseError(source_name + ": weights file must be a JSON object");
    }
    detail::check_format_version(j, source_name);
    QualityWeights weights;
    for (const auto& [attr, v] : j.items()) {
        if (attr == "format_version") continue;
        if (!v.is_number()) {
            throw ParseError(source_name + ": weight \"" + attr + "\" must be a number");
        }
        weights.weights[attr] = v.get<double>();
    }
    return weights;
}

QualityWeights load_weights_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open weights file: " + path);
    return load_weights(in, path);
}

} // namespace compsel
