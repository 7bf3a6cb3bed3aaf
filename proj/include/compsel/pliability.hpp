#pragma once

#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "compsel/catalog.hpp"

namespace compsel {

/// Relative importance of each quality attribute. Valid weights lie in
/// [0, 1] and sum to 1 (absolute tolerance 1e-9).
struct QualityWeights {
    std::map<std::string, double> weights;
};

/// Throws ValidationError on an out-of-range weight (naming the attribute)
/// or on a sum away from 1 (reporting the actual sum).
void validate_weights(const QualityWeights& weights);

/// Scales all weights by 1/sum. Requires a positive sum. Used only on
/// explicit request; weights are never rescaled silently.
QualityWeights renormalized(QualityWeights weights);

/// Quality values rescaled to [0, 10] per attribute: a component's raw value
/// divided by the catalog-wide maximum of that attribute, times 10. Rows
/// follow catalog component order, columns catalog.attribute_names order.
struct NormalizedQuality {
    std::vector<std::string> component_ids;
    std::vector<std::string> attribute_names;
    Eigen::MatrixXd values; // components x attributes, each entry in [0, 10]

    /// Value for one component/attribute. Attributes absent from the catalog
    /// read as 0; an unknown component id throws ValidationError.
    double value(const std::string& component_id, const std::string& attribute) const;

    Eigen::Index row_of(const std::string& component_id) const; // throws
};

/// Per-attribute 0-10 rescaling over the whole catalog. An attribute whose
/// maximum is 0 normalizes to 0 for every component.
NormalizedQuality normalize(const Catalog& catalog);

/// Weighted linear combination of a component's normalized attribute values.
/// Attributes carrying no weight (or missing from the catalog) contribute 0.
double component_pliability(const std::string& component_id,
                            const NormalizedQuality& nq,
                            const QualityWeights& weights);

/// Arithmetic mean of component_pliability over a non-empty selection.
double system_pliability(const std::set<std::string>& selected,
                         const NormalizedQuality& nq,
                         const QualityWeights& weights);

/// Weight attributes that appear in no catalog component; they contribute 0
/// everywhere, which usually deserves a warning at the call site.
std::vector<std::string> unknown_weight_attributes(const QualityWeights& weights,
                                                   const Catalog& catalog);

/// Reads a weights file: a JSON object mapping attribute name to weight.
/// "format_version" is reserved (must be "1" when present).
QualityWeights load_weights(std::istream& in, const std::string& source_name = "<stream>");
QualityWeights load_weights_file(const std::string& path);

} // namespace compsel
