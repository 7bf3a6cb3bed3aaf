#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "compsel/catalog.hpp"

namespace compsel {

/// How a selection's per-attribute raw values are collapsed into one feature.
enum class Aggregator { Sum, Mean, Max };

std::string aggregator_name(Aggregator a);
Aggregator aggregator_from_name(const std::string& name);

/// One observed system: which components were integrated and what each
/// performance metric measured.
struct TrainingSample {
    std::set<std::string> selection;
    std::map<std::string, double> measured;
};

enum class PerfOp { LessEq, GreaterEq };

/// A bound one performance metric must satisfy, e.g. latency <= 50.
struct PerformanceRequirement {
    std::string metric;
    PerfOp op = PerfOp::LessEq;
    double bound = 0.0;

    bool operator==(const PerformanceRequirement&) const = default;
};

bool requirement_satisfied(const PerformanceRequirement& req, double value);

/// Fitted linear relation for one metric plus fit diagnostics.
struct MetricFit {
    double intercept = 0.0;
    Eigen::VectorXd coefficients; // one per catalog attribute name, same order
    std::size_t sample_count = 0;
    double rss = 0.0;       // residual sum of squares
    double r_squared = 0.0; // 1 when the fit reproduces a constant exactly

    bool operator==(const MetricFit& other) const {
        return intercept == other.intercept &&
               coefficients.size() == other.coefficients.size() &&
               coefficients == other.coefficients &&
               sample_count == other.sample_count && rss == other.rss &&
               r_squared == other.r_squared;
    }
};

/// Regression equations per metric plus, for every catalog component and
/// fitted requirement, the smoothed probability that a system containing the
/// component satisfies the requirement.
struct PerformanceModel {
    std::vector<std::string> attribute_names; // coefficient ordering
    Aggregator aggregator = Aggregator::Sum;
    std::map<std::string, MetricFit> metrics;
    std::vector<PerformanceRequirement> requirements;
    // component id -> metric -> probability in (0, 1)
    std::map<std::string, std::map<std::string, double>> cond_prob;

    bool operator==(const PerformanceModel&) const = default;
};

/// Feature vector of a selection: a leading 1 for the intercept, then one
/// aggregated raw-quality value per catalog attribute, in
/// catalog.attribute_names order. An empty selection aggregates to zeros.
Eigen::VectorXd featurize(const std::set<std::string>& selection,
                          const Catalog& catalog,
                          Aggregator aggregator = Aggregator::Sum);

/// Ordinary least squares per metric over (featurize(selection), measured),
/// solved by the normal equations with a minimum-norm fallback when the
/// feature matrix is rank-deficient. Conditional probabilities use Laplace
/// smoothing (k+1)/(n+2) over the samples containing each component.
PerformanceModel fit(const std::vector<TrainingSample>& samples,
                     const Catalog& catalog,
                     const std::vector<PerformanceRequirement>& requirements,
                     Aggregator aggregator = Aggregator::Sum);

/// Predicted value of every fitted metric for a selection.
std::map<std::string, double> predict(const PerformanceModel& model,
                                      const std::set<std::string>& selection,
                                      const Catalog& catalog);

double predict_metric(const PerformanceModel& model, const std::string& metric,
                      const std::set<std::string>& selection,
                      const Catalog& catalog);

/// Smoothed probability that a system containing `component_id` satisfies
/// `req`. The requirement must be one the model was fitted with.
double satisfaction_probability(const PerformanceModel& model,
                                const std::string& component_id,
                                const PerformanceRequirement& req);

/// Samples file: CSV with header `selection,<metric>,...`; the selection
/// cell is a semicolon-joined component id list.
std::vector<TrainingSample> load_samples_csv(std::istream& in,
                                             const std::string& source_name = "<stream>");
std::vector<TrainingSample> load_samples_file(const std::string& path);

/// Model file JSON round-trips bit-exactly through save_model/load_model.
void save_model(const PerformanceModel& model, std::ostream& out);
PerformanceModel load_model(std::istream& in, const std::string& source_name = "<stream>");
PerformanceModel load_model_file(const std::string& path);

} // namespace compsel
