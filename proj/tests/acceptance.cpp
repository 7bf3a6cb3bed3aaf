// Acceptance suite: one line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "compsel/cli.hpp"
#include "compsel/errors.hpp"
#include "compsel/selector.hpp"
#include "support.hpp"

using namespace compsel;

namespace {

struct CheckFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool condition, const std::string& message) {
    if (!condition) throw CheckFailure(message);
}

// ---------------------------------------------------------------------------
// 1. Pliability formula suite: 1,000 randomized catalogs.

void criterion_pliability() {
    std::mt19937_64 rng(1001);
    const char* attr_pool[8] = {"reliability",  "performance", "fault_tolerance",
                                "safety",       "security",    "availability",
                                "testability",  "maintainability"};

    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n_components = 1 + support::rand_index(rng, 30);
        const std::size_t n_attributes = 1 + support::rand_index(rng, 8);

        std::vector<Component> comps;
        for (std::size_t i = 0; i < n_components; ++i) {
            std::map<std::string, double> quality;
            for (std::size_t h = 0; h < n_attributes; ++h) {
                if (support::rand_unit(rng) < 0.8) {
                    quality[attr_pool[h]] = support::rand_range(rng, 0.0, 100.0);
                }
            }
            comps.push_back(support::comp("c" + std::to_string(i), {}, 1.0,
                                          std::move(quality)));
        }
        const Catalog catalog = make_catalog(std::move(comps));
        const NormalizedQuality nq = normalize(catalog);

        for (Eigen::Index col = 0; col < nq.values.cols(); ++col) {
            double column_max = 0.0;
            for (Eigen::Index row = 0; row < nq.values.rows(); ++row) {
                const double v = nq.values(row, col);
                require(v >= 0.0 && v <= 10.0, "normalized value outside [0, 10]");
                column_max = std::max(column_max, v);
            }
            if (attribute_max(catalog, nq.attribute_names[col]) > 0.0) {
                require(column_max == 10.0, "positive column never attains exactly 10");
            }
        }

        if (!catalog.attribute_names.empty()) {
            // Column-scale invariance to 1e-12.
            const std::string attr = catalog.attribute_names[support::rand_index(
                rng, catalog.attribute_names.size())];
            const double scale = support::rand_range(rng, 0.05, 40.0);
            std::vector<Component> scaled = catalog.components;
            for (auto& c : scaled) {
                const auto it = c.raw_quality.find(attr);
                if (it != c.raw_quality.end()) it->second *= scale;
            }
            const NormalizedQuality rescaled = normalize(make_catalog(std::move(scaled)));
            for (Eigen::Index row = 0; row < nq.values.rows(); ++row) {
                for (Eigen::Index col = 0; col < nq.values.cols(); ++col) {
                    require(std::abs(nq.values(row, col) - rescaled.values(row, col)) <=
                                1e-12,
                            "column rescaling moved a normalized value by more than 1e-12");
                }
            }

            // Weight-sum validation: the exact simplex passes, a 1e-6
            // perturbation (well beyond the 1e-9 tolerance) is rejected.
            QualityWeights weights;
            double total = 0.0;
            std::vector<double> draws;
            for (std::size_t h = 0; h < catalog.attribute_names.size(); ++h) {
                draws.push_back(support::rand_range(rng, 0.05, 1.0));
                total += draws.back();
            }
            for (std::size_t h = 0; h < catalog.attribute_names.size(); ++h) {
                weights.weights[catalog.attribute_names[h]] = draws[h] / total;
            }
            validate_weights(weights);

            QualityWeights perturbed = weights;
            auto largest = perturbed.weights.begin();
            for (auto it = perturbed.weights.begin(); it != perturbed.weights.end(); ++it) {
                if (it->second > largest->second) largest = it;
            }
            largest->second -= 1e-6;
            bool rejected = false;
            try {
                validate_weights(perturbed);
            } catch (const ValidationError&) {
                rejected = true;
            }
            require(rejected, "perturbed weight vector was not rejected");
        }
    }
}

// ---------------------------------------------------------------------------
// 2. Regression recovery: noiseless linear ground truth refits to <= 1e-9.

void criterion_regression() {
    std::mt19937_64 rng(2002);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n_components = 5 + support::rand_index(rng, 16);
        const std::size_t n_attributes = 1 + support::rand_index(rng, 6);

        std::vector<std::string> attrs;
        for (std::size_t h = 0; h < n_attributes; ++h) {
            attrs.push_back("a" + std::to_string(h));
        }
        std::vector<Component> comps;
        for (std::size_t i = 0; i < n_components; ++i) {
            std::map<std::string, double> quality;
            for (const auto& a : attrs) quality[a] = support::rand_range(rng, 1.0, 10.0);
            comps.push_back(support::comp("c" + std::to_string(i), {}, 1.0,
                                          std::move(quality)));
        }
        const Catalog catalog = make_catalog(std::move(comps));

        const double intercept = support::rand_range(rng, -5.0, 5.0);
        std::map<std::string, double> truth_coeffs;
        for (const auto& a : attrs) truth_coeffs[a] = support::rand_range(rng, -2.0, 2.0);

        // Ground truth over raw attribute sums, computed without featurize.
        const auto truth = [&](const std::set<std::string>& sel) {
            double y = intercept;
            for (const auto& id : sel) {
                for (const auto& [a, v] : catalog.at(id).raw_quality) {
                    y += truth_coeffs.at(a) * v;
                }
            }
            return y;
        };
        const auto random_selection = [&] {
            std::set<std::string> sel;
            while (sel.empty()) {
                for (const auto& c : catalog.components) {
                    if (support::rand_unit(rng) < 0.4) sel.insert(c.id);
                }
            }
            return sel;
        };

        std::vector<TrainingSample> samples;
        for (std::size_t i = 0; i < n_attributes + 10; ++i) {
            const auto sel = random_selection();
            samples.push_back({sel, {{"m", truth(sel)}}});
        }
        const PerformanceModel model = fit(samples, catalog, {});
        for (int probe = 0; probe < 20; ++probe) {
            const auto sel = random_selection();
            const double err = std::abs(predict_metric(model, "m", sel, catalog) -
                                        truth(sel));
            require(err <= 1e-9, "refit prediction error " + std::to_string(err) +
                                     " exceeds 1e-9");
        }
    }
}

// ---------------------------------------------------------------------------
// 3. Oracle equivalence: greedy within the harmonic bound, exhaustive against
//    an independently coded enumeration.

void criterion_oracle() {
    std::mt19937_64 rng(3003);
    for (int trial = 0; trial < 200; ++trial) {
        support::RandomCoverOptions opt;
        opt.components = 3 + support::rand_index(rng, 10);
        opt.requirements = 2 + support::rand_index(rng, 11);
        opt.unit_costs = trial % 2 == 0;
        const support::Instance inst = support::random_cover_instance(rng, opt);

        const SelectionResult greedy = greedy_select(
            inst.survivors, inst.catalog, inst.spec, nullptr, inst.nq, inst.weights);
        const SelectionResult oracle = exhaustive_select(
            inst.survivors, inst.catalog, inst.spec, nullptr, inst.nq, inst.weights);
        require(oracle.best.feasible, "generated instance is not coverable");
        require(greedy.best.feasible, "greedy failed to cover a coverable instance");

        double harmonic = 0.0;
        for (std::size_t k = 1; k <= inst.spec.requirements.size(); ++k) {
            harmonic += 1.0 / static_cast<double>(k);
        }
        require(greedy.best.total_cost <= harmonic * oracle.best.total_cost + 1e-9,
                "greedy exceeded the harmonic bound on trial " + std::to_string(trial));
    }

    for (int trial = 0; trial < 50; ++trial) {
        support::RandomCoverOptions opt;
        opt.components = 2 + support::rand_index(rng, 9);
        opt.requirements = 1 + support::rand_index(rng, 6);
        opt.uniform_quality = false;
        const support::Instance inst = support::random_cover_instance(rng, opt);

        const SelectionResult got = exhaustive_select(
            inst.survivors, inst.catalog, inst.spec, nullptr, inst.nq, inst.weights);
        const support::BruteResult expected = support::brute_force_min_cover(inst);
        require(expected.feasible, "brute-force enumeration found no cover");
        require(got.best.feasible && got.best.selection == expected.selection &&
                    got.best.total_cost == expected.cost,
                "exhaustive_select disagrees with the independent enumeration");
    }
}

// ---------------------------------------------------------------------------
// 4. Annealing quality: feasible and within 10% of the oracle optimum on at
//    least 90 of 100 seeded instances; byte-deterministic per seed.

void criterion_annealing() {
    std::mt19937_64 rng(4004);
    int within = 0;
    for (int trial = 0; trial < 100; ++trial) {
        support::RandomCoverOptions opt;
        opt.components = 10;
        opt.requirements = 8;
        const support::Instance inst = support::random_cover_instance(rng, opt);

        const SelectionResult oracle = exhaustive_select(
            inst.survivors, inst.catalog, inst.spec, nullptr, inst.nq, inst.weights);
        require(oracle.best.feasible, "generated instance is not coverable");

        SaParams params;
        params.seed = static_cast<std::uint64_t>(trial);
        const SelectionResult annealed = sa_select(
            inst.survivors, inst.catalog, inst.spec, nullptr, inst.nq, inst.weights,
            params);
        const SelectionResult again = sa_select(
            inst.survivors, inst.catalog, inst.spec, nullptr, inst.nq, inst.weights,
            params);
        require(result_to_string(annealed) == result_to_string(again),
                "annealing is not byte-deterministic for seed " + std::to_string(trial));

        if (annealed.best.feasible &&
            annealed.best.total_cost <= 1.1 * oracle.best.total_cost + 1e-9) {
            ++within;
        }
    }
    require(within >= 90, "annealing hit the 10% band in only " +
                              std::to_string(within) + "/100 instances");
}

// ---------------------------------------------------------------------------
// 5. Filter laws on 500 randomized (catalog, spec, threshold) triples.

void criterion_filters() {
    std::mt19937_64 rng(5005);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<Component> comps;
        const std::size_t n = 2 + support::rand_index(rng, 10);
        for (std::size_t i = 0; i < n; ++i) {
            std::map<std::string, SpecValue> spec_attrs;
            if (support::rand_unit(rng) < 0.8) {
                spec_attrs["memory"] = support::rand_range(rng, 64.0, 2048.0);
            }
            comps.push_back(support::comp(
                "c" + std::to_string(i), {"r0"}, support::rand_range(rng, 0.5, 4.0),
                {{"reliability", support::rand_range(rng, 0.0, 10.0)}},
                std::move(spec_attrs)));
        }
        const Catalog catalog = make_catalog(std::move(comps));
        const NormalizedQuality nq = normalize(catalog);
        const QualityWeights weights{{{"reliability", 1.0}}};

        SystemSpec spec;
        spec.requirements = {"r0"};
        if (support::rand_unit(rng) < 0.7) {
            spec.constraints.push_back(
                {"memory", SpecOp::Le, support::rand_range(rng, 64.0, 2048.0)});
        }
        spec.perf_requirements.push_back({"latency", PerfOp::LessEq, 50.0});
        spec.pliability_threshold = support::rand_range(rng, 0.0, 10.0);
        spec.probability_threshold = support::rand_range(rng, 0.0, 1.0);

        PerformanceModel model;
        model.attribute_names = catalog.attribute_names;
        model.requirements = spec.perf_requirements;
        for (const auto& c : catalog.components) {
            model.cond_prob[c.id]["latency"] = support::rand_range(rng, 0.0, 1.0);
        }

        std::set<std::string> everyone;
        for (const auto& c : catalog.components) everyone.insert(c.id);

        const auto intersect = [](const std::set<std::string>& a,
                                  const std::set<std::string>& b) {
            std::set<std::string> out;
            for (const auto& id : a) {
                if (b.count(id)) out.insert(id);
            }
            return out;
        };
        using Pass = std::function<std::set<std::string>(const std::set<std::string>&)>;
        const Pass spec_pass = [&](const std::set<std::string>& in) {
            return intersect(in, apply_spec_filter(catalog, spec));
        };
        const Pass pli_pass = [&](const std::set<std::string>& in) {
            return apply_pliability_filter(in, nq, weights, spec.pliability_threshold);
        };
        const Pass prob_pass = [&](const std::set<std::string>& in) {
            return apply_probability_filter(in, model, spec.perf_requirements,
                                            spec.probability_threshold);
        };
        const std::vector<Pass> passes = {spec_pass, pli_pass, prob_pass};

        for (const auto& pass : passes) {
            const auto once = pass(everyone);
            require(intersect(once, everyone) == once, "filter output is not a subset");
            require(pass(once) == once, "filter is not idempotent");
        }

        const auto strict = apply_pliability_filter(everyone, nq, weights,
                                                    spec.pliability_threshold);
        const auto loose = apply_pliability_filter(everyone, nq, weights,
                                                   spec.pliability_threshold * 0.5);
        require(intersect(strict, loose) == strict,
                "raising the pliability threshold enlarged the survivor set");
        const auto prob_strict = prob_pass(everyone);
        const auto prob_loose = apply_probability_filter(
            everyone, model, spec.perf_requirements, spec.probability_threshold * 0.5);
        require(intersect(prob_strict, prob_loose) == prob_strict,
                "raising the probability threshold enlarged the survivor set");

        std::vector<int> order = {0, 1, 2};
        std::set<std::set<std::string>> outcomes;
        do {
            std::set<std::string> current = everyone;
            for (int idx : order) current = passes[idx](current);
            outcomes.insert(current);
        } while (std::next_permutation(order.begin(), order.end()));
        require(outcomes.size() == 1, "filter order changed the survivor set");
    }
}

// ---------------------------------------------------------------------------
// 6. End-to-end loop through the CLI: an all-subsets-infeasible instance
//    exits 2 after exactly max_rounds; a feasible instance exits 0 and its
//    result file survives independent re-evaluation.

int run_cli(const std::vector<std::string>& args, std::string* out_text = nullptr) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = compsel::cli::run(args, out, err);
    if (out_text) *out_text = out.str();
    return code;
}

void criterion_end_to_end() {
    const char* catalog_json = R"({"components": [
        {"id": "A", "provides": ["r1", "r2"], "cost": 3, "quality": {"reliability": 8}},
        {"id": "B", "provides": ["r1"], "cost": 1, "quality": {"reliability": 10}},
        {"id": "C", "provides": ["r2"], "cost": 1, "quality": {"reliability": 4}}
    ]})";
    const char* weights_json = R"({"reliability": 1.0})";
    const char* spec_json = R"({
        "requirements": ["r1", "r2"],
        "perf_requirements": [{"metric": "latency", "op": "le", "bound": 10}]
    })";

    // --- infeasible half: every subset predicts latency 100 > 10.
    {
        support::TempDir dir("accept_infeasible");
        const std::string cat = dir.file("catalog.json", catalog_json);
        const std::string spec_path = dir.file("spec.json", spec_json);
        const std::string weights = dir.file("weights.json", weights_json);
        const std::string samples = dir.file(
            "samples.csv", "selection,latency\nA,100\nB,100\nA;C,100\n");
        const std::string model_path = dir.path("model.json");
        require(run_cli({"fit", "--catalog", cat, "--spec", spec_path, "--samples",
                         samples, "--model", model_path}) == 0,
                "fit failed on the infeasible fixture");

        // Oracle verification that no subset satisfies the bound.
        const Catalog catalog = load_catalog_file(cat);
        const SystemSpec spec = load_system_spec_file(spec_path);
        const PerformanceModel model = load_model_file(model_path);
        const NormalizedQuality nq = normalize(catalog);
        const QualityWeights w{{{"reliability", 1.0}}};
        std::set<std::string> everyone;
        for (const auto& c : catalog.components) everyone.insert(c.id);
        const SelectionResult oracle =
            exhaustive_select(everyone, catalog, spec, &model, nq, w);
        require(oracle.status == SelectionStatus::InfeasibleBestEffort,
                "oracle unexpectedly found a feasible subset");

        const std::string result_path = dir.path("result.json");
        const int code = run_cli({"select", "--catalog", cat, "--spec", spec_path,
                                  "--weights", weights, "--model", model_path,
                                  "--algorithm", "sa", "--seed", "3", "--max-rounds",
                                  "5", "--out", result_path});
        require(code == 2, "infeasible instance did not exit with code 2");
        const nlohmann::json result =
            nlohmann::json::parse(support::read_file(result_path));
        require(result.at("status") == "infeasible-best-effort",
                "result file does not record the best-effort status");
        require(result.at("rounds_used") == 5 && result.at("trace").size() == 5,
                "loop did not run exactly max_rounds rounds");
    }

    // --- feasible half: fit y = 0.4 + 0.2 * sum(reliability), bound holds.
    {
        support::TempDir dir("accept_feasible");
        const std::string cat = dir.file("catalog.json", catalog_json);
        const std::string spec_path = dir.file("spec.json", spec_json);
        const std::string weights = dir.file("weights.json", weights_json);
        const std::string samples =
            dir.file("samples.csv", "selection,latency\nA,2\nA;B,4\n");
        const std::string model_path = dir.path("model.json");
        require(run_cli({"fit", "--catalog", cat, "--spec", spec_path, "--samples",
                         samples, "--model", model_path}) == 0,
                "fit failed on the feasible fixture");

        const std::string result_path = dir.path("result.json");
        const int code = run_cli({"select", "--catalog", cat, "--spec", spec_path,
                                  "--weights", weights, "--model", model_path,
                                  "--algorithm", "sa", "--seed", "1", "--out",
                                  result_path});
        require(code == 0, "feasible instance did not exit with code 0");

        // Independent re-evaluation of the reported candidate.
        const nlohmann::json result =
            nlohmann::json::parse(support::read_file(result_path));
        require(result.at("status") == "feasible", "result file is not feasible");
        const Catalog catalog = load_catalog_file(cat);
        const SystemSpec spec = load_system_spec_file(spec_path);
        const PerformanceModel model = load_model_file(model_path);
        const NormalizedQuality nq = normalize(catalog);
        const QualityWeights w{{{"reliability", 1.0}}};

        std::set<std::string> selection;
        for (const auto& id : result.at("selection")) {
            selection.insert(id.get<std::string>());
        }
        std::set<std::string> covered;
        double cost = 0.0;
        double pliability = 0.0;
        for (const auto& id : selection) {
            const Component& c = catalog.at(id);
            cost += c.cost;
            covered.insert(c.provides.begin(), c.provides.end());
            pliability += component_pliability(id, nq, w);
        }
        pliability /= static_cast<double>(selection.size());
        for (const auto& r : spec.requirements) {
            require(covered.count(r) == 1, "reported selection misses requirement " + r);
        }
        require(std::abs(cost - result.at("total_cost").get<double>()) <= 1e-12,
                "reported cost does not re-derive");
        require(std::abs(pliability - result.at("system_pliability").get<double>()) <=
                    1e-12,
                "reported pliability does not re-derive");
        for (const auto& req : spec.perf_requirements) {
            const double predicted = predict_metric(model, req.metric, selection, catalog);
            require(std::abs(predicted -
                             result.at("predicted").at(req.metric).get<double>()) <=
                        1e-12,
                    "reported prediction does not re-derive");
            require(requirement_satisfied(req, predicted),
                    "reported selection violates " + req.metric);
        }
    }
}

struct Criterion {
    int number;
    const char* name;
    std::function<void()> check;
    double budget_seconds; // 0 = no stated budget
};

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "pliability formula suite", criterion_pliability, 5.0},
        {2, "regression recovery", criterion_regression, 5.0},
        {3, "oracle equivalence", criterion_oracle, 30.0},
        {4, "annealing quality", criterion_annealing, 60.0},
        {5, "filter laws", criterion_filters, 5.0},
        {6, "end-to-end loop", criterion_end_to_end, 0.0},
    };

    bool all_passed = true;
    for (const auto& criterion : criteria) {
        const auto start = std::chrono::steady_clock::now();
        std::string failure;
        try {
            criterion.check();
        } catch (const std::exception& e) {
            failure = e.what();
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        if (failure.empty() && criterion.budget_seconds > 0.0 &&
            elapsed >= criterion.budget_seconds) {
            failure = "runtime " + std::to_string(elapsed) + "s exceeds " +
                      std::to_string(criterion.budget_seconds) + "s budget";
        }
        if (failure.empty()) {
            std::printf("criterion %d (%s): PASS (%.2fs)\n", criterion.number,
                        criterion.name, elapsed);
        } else {
            std::printf("criterion %d (%s): FAIL (%.2fs): %s\n", criterion.number,
                        criterion.name, elapsed, failure.c_str());
            all_passed = false;
        }
    }
    return all_passed ? 0 : 1;
}
