#include "compsel/cli.hpp"

#include <fstream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "compsel/catalog.hpp"
#include "compsel/errors.hpp"
#include "compsel/filter.hpp"
#include "compsel/perfmodel.hpp"
#include "compsel/pliability.hpp"
#include "compsel/selector.hpp"
#include "json_util.hpp"

namespace compsel::cli {

namespace {

struct RunConfig {
    std::string catalog_path;
    std::string spec_path;
    std::string weights_path;
    std::string model_path;
    std::string samples_path;
    std::string out_path;
    std::string algorithm = "sa";
    std::optional<std::uint64_t> seed;
    int max_rounds = 50;
    bool renormalize_weights = false;
    std::optional<double> sa_t0;
    double sa_alpha = 0.95;
    int sa_steps = 50;
};

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open output file: " + path);
    out << content;
    if (!out) throw ValidationError("failed writing output file: " + path);
}

/// Applies the explicit renormalization request, then validates. Weights are
/// never rescaled silently.
QualityWeights prepare_weights(const RunConfig& cfg, const Catalog& catalog,
                               std::ostream& err) {
    QualityWeights weights = load_weights_file(cfg.weights_path);
    if (cfg.renormalize_weights) {
        double sum = 0.0;
        for (const auto& [_, w] : weights.weights) sum += w;
        weights = renormalized(std::move(weights));
        err << "warning: weights summed to " << detail::format_double(sum)
            << "; renormalized to 1\n";
    }
    validate_weights(weights);
    for (const auto& attr : unknown_weight_attributes(weights, catalog)) {
        err << "warning: weight attribute \"" << attr
            << "\" appears on no component; it contributes 0\n";
    }
    return weights;
}

int cmd_fit(const RunConfig& cfg, std::ostream& out) {
    const Catalog catalog = load_catalog_file(cfg.catalog_path);
    const SystemSpec spec = load_system_spec_file(cfg.spec_path);
    const std::vector<TrainingSample> samples = load_samples_file(cfg.samples_path);
    if (samples.empty()) {
        throw ValidationError(cfg.samples_path + ": no training samples");
    }

    const PerformanceModel model = fit(samples, catalog, spec.perf_requirements);
    std::ostringstream buf;
    save_model(model, buf);
    write_file(cfg.model_path, buf.str());

    for (const auto& [metric, mf] : model.metrics) {
        out << "metric " << metric << ": samples=" << mf.sample_count
            << " r_squared=" << detail::format_double(mf.r_squared) << "\n";
    }
    out << "model written to " << cfg.model_path << "\n";
    return 0;
}

int cmd_score(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const Catalog catalog = load_catalog_file(cfg.catalog_path);
    const QualityWeights weights = prepare_weights(cfg, catalog, err);
    const NormalizedQuality nq = normalize(catalog);

    out << "component_id";
    for (const auto& attr : nq.attribute_names) out << "," << attr;
    out << ",pliability\n";
    for (Eigen::Index row = 0; row < nq.values.rows(); ++row) {
        const std::string& id = nq.component_ids[row];
        out << id;
        for (Eigen::Index col = 0; col < nq.values.cols(); ++col) {
            out << "," << detail::format_double(nq.values(row, col));
        }
        out << "," << detail::format_double(component_pliability(id, nq, weights))
            << "\n";
    }
    return 0;
}

struct SelectionInputs {
    Catalog catalog;
    SystemSpec spec;
    QualityWeights weights;
    std::optional<PerformanceModel> model;
    NormalizedQuality nq;
    std::set<std::string> survivors;
};

/// Loads and validates every input, then runs the spec -> pliability ->
/// probability filter chain.
SelectionInputs prepare_selection(const RunConfig& cfg, std::ostream& out,
                                  std::ostream& err) {
    SelectionInputs in;
    in.catalog = load_catalog_file(cfg.catalog_path);
    in.spec = load_system_spec_file(cfg.spec_path);
    in.weights = prepare_weights(cfg, in.catalog, err);
    if (!in.spec.perf_requirements.empty()) {
        if (cfg.model_path.empty()) {
            throw ValidationError(
                "the spec lists performance requirements; --model is required");
        }
        in.model = load_model_file(cfg.model_path);
    } else if (!cfg.model_path.empty()) {
        in.model = load_model_file(cfg.model_path);
    }
    in.nq = normalize(in.catalog);

    const std::set<std::string> after_spec = apply_spec_filter(in.catalog, in.spec);
    std::set<std::string> after_pliability = apply_pliability_filter(
        after_spec, in.nq, in.weights, in.spec.pliability_threshold);
    std::set<std::string> survivors = after_pliability;
    if (in.model) {
        survivors = apply_probability_filter(after_pliability, *in.model,
                                             in.spec.perf_requirements,
                                             in.spec.probability_threshold);
    }
    out << "filters: " << in.catalog.components.size() << " components -> "
        << after_spec.size() << " (spec) -> " << after_pliability.size()
        << " (pliability) -> " << survivors.size() << " (probability)\n";
    in.survivors = std::move(survivors);
    return in;
}

void print_summary(const SelectionResult& result, const SystemSpec& spec,
                   std::ostream& out) {
    out << "algorithm: " << algorithm_name(result.algorithm) << "\n";
    out << "status: "
        << (result.status == SelectionStatus::Feasible ? "feasible"
                                                       : "infeasible-best-effort")
        << " after " << result.rounds_used << " round(s)\n";
    out << "selection:";
    for (const auto& id : result.best.selection) out << " " << id;
    out << "\n";
    out << "total_cost: " << detail::format_double(result.best.total_cost) << "\n";
    out << "system_pliability: " << detail::format_double(result.best.system_pliability)
        << "\n";
    for (const auto& req : spec.perf_requirements) {
        const auto it = result.best.predicted.find(req.metric);
        if (it == result.best.predicted.end()) continue;
        out << "predicted " << req.metric << ": " << detail::format_double(it->second)
            << " (" << (req.op == PerfOp::LessEq ? "<=" : ">=") << " "
            << detail::format_double(req.bound) << ")\n";
    }
    if (!result.best.uncovered.empty()) {
        out << "uncovered:";
        for (const auto& r : result.best.uncovered) out << " " << r;
        out << "\n";
    }
}

int cmd_select(const RunConfig& cfg, bool oracle_mode, std::ostream& out,
               std::ostream& err) {
    SelectionInputs in = prepare_selection(cfg, out, err);
    const PerformanceModel* model = in.model ? &*in.model : nullptr;

    const Algorithm algorithm =
        oracle_mode ? Algorithm::Exhaustive : algorithm_from_name(cfg.algorithm);

    SelectionResult result;
    if (algorithm == Algorithm::Exhaustive) {
        // Exhaustive search is complete; rerunning it per round would only
        // repeat the same answer, so it bypasses the round loop.
        result = exhaustive_select(in.survivors, in.catalog, in.spec, model, in.nq,
                                   in.weights);
    } else {
        SaParams params;
        params.initial_temperature = cfg.sa_t0;
        params.cooling_factor = cfg.sa_alpha;
        params.steps_per_temperature = cfg.sa_steps;
        if (algorithm == Algorithm::Sa) {
            std::uint64_t seed;
            if (cfg.seed) {
                seed = *cfg.seed;
            } else {
                std::random_device rd;
                seed = (static_cast<std::uint64_t>(rd()) << 32) | rd();
            }
            params.seed = seed;
            out << "seed: " << seed << "\n";
        }
        result = run_selection_loop(algorithm, in.survivors, in.catalog, in.spec,
                                    model, in.nq, in.weights, params, cfg.max_rounds);
    }

    write_file(cfg.out_path, result_to_string(result));
    print_summary(result, in.spec, out);
    out << "result written to " << cfg.out_path << "\n";
    return result.status == SelectionStatus::Feasible ? 0 : 2;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"component selection engine", "compsel"};
    app.require_subcommand(1);

    CLI::App* fit = app.add_subcommand("fit", "fit the performance model from samples");
    fit->add_option("--catalog", cfg.catalog_path, "catalog JSON file")->required();
    fit->add_option("--samples", cfg.samples_path, "training samples CSV")->required();
    fit->add_option("--spec", cfg.spec_path, "system spec JSON file")->required();
    fit->add_option("--model", cfg.model_path, "output model JSON file")->required();

    CLI::App* score = app.add_subcommand("score", "print the pliability table as CSV");
    score->add_option("--catalog", cfg.catalog_path, "catalog JSON file")->required();
    score->add_option("--weights", cfg.weights_path, "quality weights JSON file")->required();
    score->add_flag("--renormalize-weights", cfg.renormalize_weights,
                    "rescale weights to sum to 1");

    const auto add_selection_options = [&](CLI::App* cmd, bool with_algorithm) {
        cmd->add_option("--catalog", cfg.catalog_path, "catalog JSON file")->required();
        cmd->add_option("--spec", cfg.spec_path, "system spec JSON file")->required();
        cmd->add_option("--weights", cfg.weights_path, "quality weights JSON file")
            ->required();
        cmd->add_option("--model", cfg.model_path,
                        "fitted model JSON file (required with performance requirements)");
        cmd->add_option("--out", cfg.out_path, "output result JSON file")->required();
        cmd->add_flag("--renormalize-weights", cfg.renormalize_weights,
                      "rescale weights to sum to 1");
        if (with_algorithm) {
            cmd->add_option("--algorithm", cfg.algorithm,
                            "greedy|intelligent|sa|exhaustive (default sa)");
            cmd->add_option("--seed", cfg.seed, "seed for randomized algorithms");
            cmd->add_option("--max-rounds", cfg.max_rounds,
                            "selection loop round budget (default 50)");
            cmd->add_option("--sa-t0", cfg.sa_t0, "annealing initial temperature");
            cmd->add_option("--sa-alpha", cfg.sa_alpha,
                            "annealing cooling factor (default 0.95)");
            cmd->add_option("--sa-steps", cfg.sa_steps,
                            "annealing steps per temperature (default 50)");
        }
    };
    CLI::App* select = app.add_subcommand("select", "search for a requirement-covering subset");
    add_selection_options(select, true);
    CLI::App* oracle = app.add_subcommand("oracle", "exhaustive search over small survivor sets");
    add_selection_options(oracle, false);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 1;
    }

    try {
        if (fit->parsed()) return cmd_fit(cfg, out);
        if (score->parsed()) return cmd_score(cfg, out, err);
        if (select->parsed()) return cmd_select(cfg, /*oracle_mode=*/false, out, err);
        if (oracle->parsed()) return cmd_select(cfg, /*oracle_mode=*/true, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    err << "error: no subcommand given\n";
    return 1;
}

} // namespace compsel::cli
