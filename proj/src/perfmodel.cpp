#include "compsel/perfmodel.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

#include "compsel/errors.hpp"
#include "json_util.hpp"

namespace compsel {

using nlohmann::json;

std::string aggregator_name(Aggregator a) {
    switch (a) {
        case Aggregator::Sum: return "sum";
        case Aggregator::Mean: return "mean";
        case Aggregator::Max: return "max";
    }
    throw ValidationError("unhandled aggregator");
}

Aggregator aggregator_from_name(const std::string& name) {
    if (name == "sum") return Aggregator::Sum;
    if (name == "mean") return Aggregator::Mean;
    if (name == "max") return Aggregator::Max;
    throw ValidationError("unknown aggregator: " + name);
}

bool requirement_satisfied(const PerformanceRequirement& req, double value) {
    return req.op == PerfOp::LessEq ? value <= req.bound : value >= req.bound;
}

Eigen::VectorXd featurize(const std::set<std::string>& selection,
                          const Catalog& catalog, Aggregator aggregator) {
    const Eigen::Index p = static_cast<Eigen::Index>(catalog.attribute_names.size());
    Eigen::VectorXd features = Eigen::VectorXd::Zero(p + 1);
    features(0) = 1.0;

    for (const auto& id : selection) {
        const Component& c = catalog.at(id);
        for (Eigen::Index h = 0; h < p; ++h) {
            const auto it = c.raw_quality.find(catalog.attribute_names[h]);
            const double v = it == c.raw_quality.end() ? 0.0 : it->second;
            if (aggregator == Aggregator::Max) {
                features(h + 1) = std::max(features(h + 1), v);
            } else {
                features(h + 1) += v;
            }
        }
    }
    if (aggregator == Aggregator::Mean && !selection.empty()) {
        features.tail(p) /= static_cast<double>(selection.size());
    }
    return features;
}

namespace {

// Normal equations with one refinement pass; complete orthogonal
// decomposition supplies the minimum-norm solution when X loses rank.
Eigen::VectorXd solve_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(X);
    if (cod.rank() < X.cols()) {
        return cod.solve(y);
    }
    const Eigen::MatrixXd xtx = X.transpose() * X;
    const Eigen::VectorXd xty = X.transpose() * y;
    const auto ldlt = xtx.ldlt();
    Eigen::VectorXd beta = ldlt.solve(xty);
    beta += ldlt.solve(xty - xtx * beta);
    return beta;
}

} // namespace

PerformanceModel fit(const std::vector<TrainingSample>& samples,
                     const Catalog& catalog,
                     const std::vector<PerformanceRequirement>& requirements,
                     Aggregator aggregator) {
    PerformanceModel model;
    model.attribute_names = catalog.attribute_names;
    model.aggregator = aggregator;
    model.requirements = requirements;

    std::set<std::string> metric_names;
    for (const TrainingSample& s : samples) {
        if (s.selection.empty()) {
            throw ValidationError("training sample has an empty selection");
        }
        for (const auto& id : s.selection) {
            if (!catalog.find(id)) {
                throw ValidationError("training sample references unknown component " + id);
            }
        }
        for (const auto& [metric, _] : s.measured) metric_names.insert(metric);
    }
    {
        std::set<std::string> seen;
        for (const auto& req : requirements) {
            if (!seen.insert(req.metric).second) {
                throw ValidationError("duplicate performance requirement for metric " +
                                      req.metric);
            }
            if (!metric_names.count(req.metric)) {
                throw ValidationError("no samples measure metric " + req.metric);
            }
        }
    }

    const Eigen::Index p = static_cast<Eigen::Index>(catalog.attribute_names.size());
    for (const auto& metric : metric_names) {
        std::vector<const TrainingSample*> rows;
        for (const TrainingSample& s : samples) {
            if (s.measured.count(metric)) rows.push_back(&s);
        }
        const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
        Eigen::MatrixXd X(n, p + 1);
        Eigen::VectorXd y(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            X.row(i) = featurize(rows[i]->selection, catalog, aggregator).transpose();
            y(i) = rows[i]->measured.at(metric);
        }

        const Eigen::VectorXd beta = solve_ols(X, y);
        MetricFit mf;
        mf.intercept = beta(0);
        mf.coefficients = beta.tail(p);
        mf.sample_count = rows.size();
        mf.rss = (y - X * beta).squaredNorm();
        const double tss = (y.array() - y.mean()).matrix().squaredNorm();
        if (tss > 0.0) {
            mf.r_squared = 1.0 - mf.rss / tss;
        } else {
            mf.r_squared = mf.rss <= 1e-12 * static_cast<double>(n) ? 1.0 : 0.0;
        }
        model.metrics.emplace(metric, std::move(mf));
    }

    // Laplace-smoothed satisfaction counts keep every probability inside
    // (0, 1), so one thin sample never blacklists a component for good.
    for (const Component& c : catalog.components) {
        auto& per_metric = model.cond_prob[c.id];
        for (const auto& req : requirements) {
            std::size_t n = 0;
            std::size_t k = 0;
            for (const TrainingSample& s : samples) {
                if (!s.selection.count(c.id)) continue;
                const auto it = s.measured.find(req.metric);
                if (it == s.measured.end()) continue;
                ++n;
                if (requirement_satisfied(req, it->second)) ++k;
            }
            per_metric[req.metric] = static_cast<double>(k + 1) / static_cast<double>(n + 2);
        }
    }
    return model;
}

double predict_metric(const PerformanceModel& model, const std::string& metric,
                      const std::set<std::string>& selection, const Catalog& catalog) {
    if (model.attribute_names != catalog.attribute_names) {
        throw ValidationError("model was fitted against a different catalog "
                              "(attribute names differ)");
    }
    const auto it = model.metrics.find(metric);
    if (it == model.metrics.end()) {
        throw ValidationError("model has no fitted metric " + metric);
    }
    const Eigen::VectorXd features = featurize(selection, catalog, model.aggregator);
    const MetricFit& mf = it->second;
    return mf.intercept + mf.coefficients.dot(features.tail(features.size() - 1));
}

std::map<std::string, double> predict(const PerformanceModel& model,
                                      const std::set<std::string>& selection,
                                      const Catalog& catalog) {
    std::map<std::string, double> out;
    for (const auto& [metric, _] : model.metrics) {
        out[metric] = predict_metric(model, metric, selection, catalog);
    }
    return out;
}

double satisfaction_probability(const PerformanceModel& model,
                                const std::string& component_id,
                                const PerformanceRequirement& req) {
    const auto fitted = std::find_if(model.requirements.begin(), model.requirements.end(),
                                     [&](const PerformanceRequirement& r) {
                                         return r.metric == req.metric;
                                     });
    if (fitted == model.requirements.end() || !(*fitted == req)) {
        throw ValidationError("model was not fitted with a requirement on metric " +
                              req.metric + " matching the query");
    }
    const auto comp = model.cond_prob.find(component_id);
    if (comp == model.cond_prob.end()) {
        throw ValidationError("unknown component id: " + component_id);
    }
    return comp->second.at(req.metric);
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> cells;
    std::string::size_type start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        if (pos == std::string::npos) {
            cells.push_back(line.substr(start));
            return cells;
        }
        cells.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

double parse_number(const std::string& cell, const std::string& where) {
    double value = 0.0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    const auto res = std::from_chars(begin, end, value);
    if (res.ec != std::errc() || res.ptr != end || cell.empty()) {
        throw ParseError(where + ": expected a number, got \"" + cell + "\"");
    }
    return value;
}

} // namespace

std::vector<TrainingSample> load_samples_csv(std::istream& in,
                                             const std::string& source_name) {
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line)) {
        throw ParseError(source_name + ": samples file is empty");
    }
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::vector<std::string> header = split(line, ',');
    if (header.empty() || header[0] != "selection") {
        throw ParseError(source_name + ":1: header must start with \"selection\"");
    }
    std::vector<std::string> metrics(header.begin() + 1, header.end());
    {
        std::set<std::string> seen;
        for (const auto& m : metrics) {
            if (m.empty()) throw ParseError(source_name + ":1: empty metric name");
            if (!seen.insert(m).second) {
                throw ParseError(source_name + ":1: duplicate metric column " + m);
            }
        }
    }

    std::vector<TrainingSample> samples;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::string where = source_name + ":" + std::to_string(line_no);
        const std::vector<std::string> cells = split(line, ',');
        if (cells.size() != metrics.size() + 1) {
            throw ParseError(where + ": expected " + std::to_string(metrics.size() + 1) +
                             " cells, got " + std::to_string(cells.size()));
        }
        TrainingSample sample;
        for (const auto& id : split(cells[0], ';')) {
            if (id.empty()) {
                throw ParseError(where + ": empty component id in selection");
            }
            sample.selection.insert(id);
        }
        if (sample.selection.empty()) {
            throw ParseError(where + ": empty selection");
        }
        for (std::size_t m = 0; m < metrics.size(); ++m) {
            sample.measured[metrics[m]] =
                parse_number(cells[m + 1], where + " column " + metrics[m]);
        }
        samples.push_back(std::move(sample));
    }
    return samples;
}

std::vector<TrainingSample> load_samples_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open samples file: " + path);
    return load_samples_csv(in, path);
}

namespace {

std::string perf_op_name(PerfOp op) { return op == PerfOp::LessEq ? "le" : "ge"; }

PerfOp perf_op_from_name(const std::string& name, const std::string& source_name) {
    if (name == "le") return PerfOp::LessEq;
    if (name == "ge") return PerfOp::GreaterEq;
    throw ParseError(source_name + ": performance requirement op must be \"le\" or \"ge\", got \"" +
                     name + "\"");
}

} // namespace

void save_model(const PerformanceModel& model, std::ostream& out) {
    json j;
    j["format_version"] = "1";
    j["aggregator"] = aggregator_name(model.aggregator);
    j["attribute_names"] = model.attribute_names;
    json metrics = json::object();
    for (const auto& [name, mf] : model.metrics) {
        json m;
        m["intercept"] = mf.intercept;
        m["coefficients"] = std::vector<double>(mf.coefficients.begin(), mf.coefficients.end());
        m["sample_count"] = mf.sample_count;
        m["rss"] = mf.rss;
        m["r_squared"] = mf.r_squared;
        metrics[name] = std::move(m);
    }
    j["metrics"] = std::move(metrics);
    json reqs = json::array();
    for (const auto& r : model.requirements) {
        reqs.push_back({{"metric", r.metric}, {"op", perf_op_name(r.op)}, {"bound", r.bound}});
    }
    j["requirements"] = std::move(reqs);
    j["cond_prob"] = model.cond_prob;
    out << j.dump(2) << "\n";
}

PerformanceModel load_model(std::istream& in, const std::string& source_name) {
    const json j = detail::parse_json(in, source_name);
    if (!j.is_object()) {
        throw ParseError(source_name + ": model file must be a JSON object");
    }
    detail::check_format_version(j, source_name);
    PerformanceModel model;
    try {
        model.aggregator = aggregator_from_name(j.at("aggregator").get<std::string>());
        model.attribute_names = j.at("attribute_names").get<std::vector<std::string>>();
        for (const auto& [name, m] : j.at("metrics").items()) {
            MetricFit mf;
            mf.intercept = m.at("intercept").get<double>();
            const auto coeffs = m.at("coefficients").get<std::vector<double>>();
            if (coeffs.size() != model.attribute_names.size()) {
                throw ParseError(source_name + ": metric " + name + " carries " +
                                 std::to_string(coeffs.size()) + " coefficients for " +
                                 std::to_string(model.attribute_names.size()) + " attributes");
            }
            mf.coefficients = Eigen::Map<const Eigen::VectorXd>(
                coeffs.data(), static_cast<Eigen::Index>(coeffs.size()));
            mf.sample_count = m.at("sample_count").get<std::size_t>();
            mf.rss = m.at("rss").get<double>();
            mf.r_squared = m.at("r_squared").get<double>();
            model.metrics.emplace(name, std::move(mf));
        }
        for (const auto& r : j.at("requirements")) {
            PerformanceRequirement req;
            req.metric = r.at("metric").get<std::string>();
            req.op = perf_op_from_name(r.at("op").get<std::string>(), source_name);
            req.bound = r.at("bound").get<double>();
            model.requirements.push_back(std::move(req));
        }
        for (const auto& [id, per_metric] : j.at("cond_prob").items()) {
            for (const auto& [metric, p] : per_metric.items()) {
                const double prob = p.get<double>();
                if (prob < 0.0 || prob > 1.0) {
                    throw ParseError(source_name + ": probability for (" + id + ", " +
                                     metric + ") is outside [0, 1]");
                }
                model.cond_prob[id][metric] = prob;
            }
        }
    } catch (const json::exception& e) {
        throw ParseError(source_name + ": " + e.what());
    }
    return model;
}

PerformanceModel load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open model file: " + path);
    return load_model(in, path);
}

} // namespace compsel
