#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

namespace compsel {

/// Identifier of one requirement a component can provide.
using RequirementId = std::string;

/// A specification attribute is either numeric or a plain token.
using SpecValue = std::variant<double, std::string>;

/// The eight conventional quality attribute names. Catalogs may carry any
/// attribute names; these are predeclared for convenience only.
inline constexpr std::array<const char*, 8> canonical_attributes = {
    "reliability",   "performance",  "fault_tolerance", "safety",
    "security",      "availability", "testability",     "maintainability",
};

/// One selectable unit: what it provides, what it costs, and its measured
/// quality and specification attributes.
struct Component {
    std::string id;
    std::string name;
    std::set<RequirementId> provides;
    double cost = 0.0;
    std::map<std::string, double> raw_quality; // raw measured values, >= 0
    std::map<std::string, SpecValue> spec_attrs;

    bool operator==(const Component&) const = default;
};

/// Immutable component repository. `attribute_names` is the sorted union of
/// every quality attribute appearing on any component.
struct Catalog {
    std::vector<Component> components;
    std::vector<std::string> attribute_names;

    const Component* find(const std::string& id) const;
    const Component& at(const std::string& id) const; // throws ValidationError
    std::optional<std::size_t> index_of(const std::string& id) const;

    bool operator==(const Catalog& other) const {
        return components == other.components &&
               attribute_names == other.attribute_names;
    }

private:
    friend Catalog make_catalog(std::vector<Component> components);
    std::unordered_map<std::string, std::size_t> id_index_;
};

/// Builds a validated catalog: ids must be unique, costs and raw quality
/// values non-negative. Throws ValidationError naming the offending id.
Catalog make_catalog(std::vector<Component> components);

/// Reads a catalog from its JSON form. `source_name` is used in messages.
Catalog load_catalog(std::istream& in, const std::string& source_name = "<stream>");
Catalog load_catalog_file(const std::string& path);

/// Writes the JSON form accepted by load_catalog.
void save_catalog(const Catalog& catalog, std::ostream& out);

/// Maximum raw measured value of `attribute` attained by any component;
/// components lacking the attribute count as 0. Throws ValidationError for
/// names outside catalog.attribute_names.
double attribute_max(const Catalog& catalog, const std::string& attribute);

} // namespace compsel
