#include "compsel/catalog.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>

#include "compsel/errors.hpp"
#include "json_util.hpp"

namespace compsel {

using nlohmann::json;

UncoverableError::UncoverableError(std::vector<std::string> missing_ids)
    : ValidationError([&] {
          std::string msg = "requirements provided by no surviving component:";
          for (const auto& id : missing_ids) msg += " " + id;
          return msg;
      }()),
      missing_(std::move(missing_ids)) {}

const Component* Catalog::find(const std::string& id) const {
    const auto it = id_index_.find(id);
    return it == id_index_.end() ? nullptr : &components[it->second];
}

const Component& Catalog::at(const std::string& id) const {
    if (const Component* c = find(id)) return *c;
    throw ValidationError("unknown component id: " + id);
}

std::optional<std::size_t> Catalog::index_of(const std::string& id) const {
    const auto it = id_index_.find(id);
    if (it == id_index_.end()) return std::nullopt;
    return it->second;
}

Catalog make_catalog(std::vector<Component> components) {
    Catalog catalog;
    catalog.components = std::move(components);

    std::set<std::string> attrs;
    for (std::size_t i = 0; i < catalog.components.size(); ++i) {
        const Component& c = catalog.components[i];
        if (c.id.empty()) {
            throw ValidationError("component at position " + std::to_string(i) +
                                  " has an empty id");
        }
        if (!catalog.id_index_.emplace(c.id, i).second) {
            throw ValidationError("duplicate component id: " + c.id);
        }
        if (c.cost < 0.0) {
            throw ValidationError("component " + c.id + " has negative cost");
        }
        for (const auto& [attr, value] : c.raw_quality) {
            if (value < 0.0) {
                throw ValidationError("component " + c.id +
                                      " has negative quality value for " + attr);
            }
            attrs.insert(attr);
        }
    }
    catalog.attribute_names.assign(attrs.begin(), attrs.end());
    return catalog;
}

namespace {

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& context, const std::string& source_name) {
    for (const auto& [key, _] : obj.items()) {
        if (std::find_if(allowed.begin(), allowed.end(),
                         [&](const char* a) { return key == a; }) == allowed.end()) {
            throw ParseError(source_name + ": unknown key \"" + key + "\" in " + context);
        }
    }
}

Component parse_component(const json& j, std::size_t index, const std::string& source_name) {
    const std::string where = "component #" + std::to_string(index);
    if (!j.is_object()) throw ParseError(source_name + ": " + where + " is not an object");
    reject_unknown_keys(j, {"id", "name", "provides", "cost", "quality", "spec"},
                        where, source_name);

    Component c;
    if (!j.contains("id") || !j.at("id").is_string()) {
        throw ParseError(source_name + ": " + where + " is missing a string \"id\"");
    }
    c.id = j.at("id").get<std::string>();
    if (j.contains("name")) {
        if (!j.at("name").is_string()) {
            throw ParseError(source_name + ": " + where + " \"name\" must be a string");
        }
        c.name = j.at("name").get<std::string>();
    }
    if (j.contains("provides")) {
        if (!j.at("provides").is_array()) {
            throw ParseError(source_name + ": " + where + " \"provides\" must be an array");
        }
        for (const auto& r : j.at("provides")) {
            if (!r.is_string() || r.get<std::string>().empty()) {
                throw ParseError(source_name + ": " + where +
                                 " \"provides\" entries must be non-empty strings");
            }
            c.provides.insert(r.get<std::string>());
        }
    }
    if (j.contains("cost")) {
        if (!j.at("cost").is_number()) {
            throw ParseError(source_name + ": " + where + " \"cost\" must be a number");
        }
        c.cost = j.at("cost").get<double>();
    }
    if (j.contains("quality")) {
        if (!j.at("quality").is_object()) {
            throw ParseError(source_name + ": " + where + " \"quality\" must be an object");
        }
        for (const auto& [attr, v] : j.at("quality").items()) {
            if (!v.is_number()) {
                throw ParseError(source_name + ": " + where + " quality \"" + attr +
                                 "\" must be a number");
            }
            c.raw_quality[attr] = v.get<double>();
        }
    }
    if (j.contains("spec")) {
        if (!j.at("spec").is_object()) {
            throw ParseError(source_name + ": " + where + " \"spec\" must be an object");
        }
        for (const auto& [attr, v] : j.at("spec").items()) {
            if (v.is_number()) {
                c.spec_attrs[attr] = v.get<double>();
            } else if (v.is_string()) {
                c.spec_attrs[attr] = v.get<std::string>();
            } else {
                throw ParseError(source_name + ": " + where + " spec \"" + attr +
                                 "\" must be a number or a string");
            }
        }
    }
    return c;
}

} // namespace

Catalog load_catalog(std::istream& in, const std::string& source_name) {
    const json j = detail::parse_json(in, source_name);
    if (!j.is_object()) {
        throw ParseError(source_name + ": catalog file must be a JSON object");
    }
    detail::check_format_version(j, source_name);
    reject_unknown_keys(j, {"format_version", "components"}, "catalog", source_name);
    if (!j.contains("components") || !j.at("components").is_array()) {
        throw ParseError(source_name + ": catalog requires a \"components\" array");
    }

    std::vector<Component> components;
    std::size_t index = 0;
    for (const auto& cj : j.at("components")) {
        components.push_back(parse_component(cj, index++, source_name));
    }
    return make_catalog(std::move(components));
}

Catalog load_catalog_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open catalog file: " + path);
    return load_catalog(in, path);
}

void save_catalog(const Catalog& catalog, std::ostream& out) {
    json comps = json::array();
    for (const Component& c : catalog.components) {
        json cj;
        cj["id"] = c.id;
        cj["name"] = c.name;
        cj["provides"] = c.provides;
        cj["cost"] = c.cost;
        cj["quality"] = c.raw_quality;
        json spec = json::object();
        for (const auto& [attr, v] : c.spec_attrs) {
            if (std::holds_alternative<double>(v)) {
                spec[attr] = std::get<double>(v);
            } else {
                spec[attr] = std::get<std::string>(v);
            }
        }
        cj["spec"] = std::move(spec);
        comps.push_back(std::move(cj));
    }
    json j;
    j["format_version"] = "1";
    j["components"] = std::move(comps);
    out << j.dump(2) << "\n";
}

double attribute_max(const Catalog& catalog, const std::string& attribute) {
    if (!std::binary_search(catalog.attribute_names.begin(),
                            catalog.attribute_names.end(), attribute)) {
        throw ValidationError("unknown quality attribute: " + attribute);
    }
    double max_value = 0.0;
    for (const Component& c : catalog.components) {
        const auto it = c.raw_quality.find(attribute);
        const double v = it == c.raw_quality.end() ? 0.0 : it->second;
        max_value = std::max(max_value, v);
    }
    return max_value;
}

} // namespace compsel
