#ifndef GSAUDIT_MULTIVERSE_PIPELINE_HPP
#define GSAUDIT_MULTIVERSE_PIPELINE_HPP

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "../corpus.hpp"
#include "../diffexpr.hpp"
#include "../enrichment.hpp"
#include "../preprocess.hpp"
#include "choice_graph.hpp"
#include "optimize.hpp"

namespace gsaudit {

/**
 * Data shared by every configuration of a study. Gene sets are keyed by target identifiers when `id_map`
 * is present and by matrix identifiers otherwise.
 */
struct PipelineInputs {
    CountMatrix counts;
    ConditionLabels labels;
    GeneSetCollection primary;
    std::optional<GeneSetCollection> alternative;
    std::optional<IdMap> id_map;

    Capabilities capabilities() const {
        return Capabilities{id_map.has_value() && !id_map->empty(), alternative.has_value(), counts.has_lengths()};
    }
};

/**
 * Engine settings that are not exploited as choices.
 */
struct EngineSettings {
    int permutations = 1000;
    int resamples = 1000;
    std::size_t min_size = 5;
    std::size_t max_size = 500;
    double de_alpha = 0.05;
    bool ease = false;
    int num_threads = 1;

    bool operator==(const EngineSettings&) const = default;
};

namespace detail {

inline const std::string& option_or(const Config& config, std::string_view choice, const std::string& fallback) {
    auto it = config.find(std::string(choice));
    return it == config.end() ? fallback : it->second;
}

inline PrefilterRule prefilter_rule(const std::string& option) {
    if (option == "total>=10") {
        return PrefilterRule::total_at_least(10);
    }
    if (option == "total>=50") {
        return PrefilterRule::total_at_least(50);
    }
    if (option == "expr-filter") {
        return PrefilterRule::expr_filter();
    }
    if (option == "cpm>=1-in-2") {
        return PrefilterRule::cpm_in_samples(1, 2);
    }
    throw Error(Errc::InvalidConfig, "unknown pre-filter option '" + option + "'");
}

inline DeMethod de_method_option(const std::string& option) {
    if (option == "nb-wald") {
        return DeMethod::NbWald;
    }
    if (option == "moderated-t") {
        return DeMethod::ModeratedT;
    }
    throw Error(Errc::InvalidConfig, "unknown DE method '" + option + "'");
}

inline TransformMethod transform_option(const std::string& option) {
    if (option == "log-cpm") {
        return TransformMethod::LogCpm;
    }
    if (option == "shifted-log-vst") {
        return TransformMethod::ShiftedLogVst;
    }
    throw Error(Errc::InvalidConfig, "unknown transform '" + option + "'");
}

inline RankingStat gene_stat_option(const std::string& option) {
    if (option == "signal-to-noise") {
        return RankingStat::SignalToNoise;
    }
    if (option == "t-statistic") {
        return RankingStat::TStatistic;
    }
    if (option == "diff-of-classes") {
        return RankingStat::DiffOfClasses;
    }
    throw Error(Errc::InvalidConfig, "unknown gene statistic '" + option + "'");
}

inline double exponent_option(const std::string& option) {
    if (option == "0") {
        return 0;
    }
    if (option == "1") {
        return 1;
    }
    if (option == "1.5") {
        return 1.5;
    }
    if (option == "2") {
        return 2;
    }
    throw Error(Errc::InvalidConfig, "unknown exponent '" + option + "'");
}

inline DeTable run_de(const CountMatrix& matrix, const ConditionLabels& labels, DeMethod method) {
    if (method == DeMethod::NbWald) {
        return nb_wald(matrix, labels);
    }
    return moderated_t(transform(matrix, TransformMethod::LogCpm), labels);
}

inline std::vector<double> mean_cpm(const CountMatrix& matrix) {
    const auto values = cpm(matrix);
    const std::size_t ns = matrix.num_samples();
    std::vector<double> out(matrix.num_genes());
    for (std::size_t g = 0; g < out.size(); ++g) {
        double s = 0;
        for (std::size_t j = 0; j < ns; ++j) {
            s += values[g * ns + j];
        }
        out[g] = s / static_cast<double>(ns);
    }
    return out;
}

}

/**
 * Intermediate products of one pipeline run, filled on request.
 */
struct PipelineDump {
    std::optional<DeTable> de;
    std::optional<RankedList> ranked;
    std::optional<TransformedMatrix> transformed;
};

/**
 * Runs collapse, pre-filter, DE or transformation, and the engine under one configuration. Choices absent
 * from `config` take their shipped defaults; with an IdMap but no duplicate choice the first source is kept.
 */
inline EnrichmentTable run_pipeline(const PipelineInputs& inputs, const ConditionLabels& labels, Engine engine, const Config& config,
                                    const EngineSettings& settings, std::uint64_t seed, PipelineDump* dump = nullptr)
{
    static const std::string nb_wald_opt = "nb-wald", total10 = "total>=10", expr = "expr-filter", keep_first = "keep-first", primary = "primary",
                             annotated = "annotated", wallenius = "wallenius", length = "transcript-length", mean_expr = "mean-expression",
                             log_cpm = "log-cpm", snr = "signal-to-noise", one = "1";

    const bool de_based = engine == Engine::Ora || engine == Engine::Goseq || engine == Engine::GseaPreranked;
    const auto de_method = detail::de_method_option(detail::option_or(config, choice::de_method, nb_wald_opt));
    const std::string& prefilter_default = de_based ? (de_method == DeMethod::NbWald ? total10 : expr) : total10;
    const auto rule = detail::prefilter_rule(detail::option_or(config, choice::prefilter, prefilter_default));

    const auto& dup_opt = detail::option_or(config, choice::duplicates, keep_first);
    if (dup_opt != "keep-first" && dup_opt != "rounded-mean") {
        throw Error(Errc::InvalidConfig, "unknown duplicate policy '" + dup_opt + "'");
    }
    const auto policy = dup_opt == "keep-first" ? DuplicatePolicy::KeepFirst : DuplicatePolicy::RoundedMean;

    const auto& coll_opt = detail::option_or(config, choice::collection, primary);
    const GeneSetCollection* sets = &inputs.primary;
    if (coll_opt == "alternative") {
        if (!inputs.alternative) {
            throw Error(Errc::InvalidConfig, "alternative collection requested but not supplied");
        }
        sets = &*inputs.alternative;
    } else if (coll_opt != "primary") {
        throw Error(Errc::InvalidConfig, "unknown collection option '" + coll_opt + "'");
    }

    CountMatrix matrix = inputs.id_map ? collapse_duplicates(inputs.counts, *inputs.id_map, policy) : inputs.counts;
    matrix = prefilter(matrix, rule, labels);

    EnrichmentTable table;
    switch (engine) {
        case Engine::Ora:
        case Engine::Goseq: {
            const auto de = detail::run_de(matrix, labels, de_method);
            if (dump) {
                dump->de = de;
            }
            const auto de_genes = de_gene_list(de, settings.de_alpha);
            const auto& uni = detail::option_or(config, choice::universe, annotated);
            if (uni != "annotated" && uni != "all-tested") {
                throw Error(Errc::InvalidConfig, "unknown universe '" + uni + "'");
            }
            const auto universe = uni == "annotated" ? UniverseChoice::AnnotatedGenes : UniverseChoice::AllTestedGenes;
            if (engine == Engine::Ora) {
                table = ora(de_genes, *sets, matrix.gene_ids(), OraOptions{universe, settings.ease});
                break;
            }
            const auto& pv = detail::option_or(config, choice::pvalue_method, wallenius);
            if (pv != "wallenius" && pv != "resampling") {
                throw Error(Errc::InvalidConfig, "unknown p-value method '" + pv + "'");
            }
            const auto& bias_opt = detail::option_or(config, choice::bias, matrix.has_lengths() ? length : mean_expr);
            std::vector<double> bias;
            if (bias_opt == "transcript-length") {
                if (!matrix.has_lengths()) {
                    throw Error(Errc::BiasUnavailable, "no transcript lengths supplied");
                }
                bias.assign(matrix.lengths()->begin(), matrix.lengths()->end());
            } else if (bias_opt == "mean-expression") {
                bias = detail::mean_cpm(matrix);
            } else {
                throw Error(Errc::InvalidConfig, "unknown bias option '" + bias_opt + "'");
            }
            GoseqOptions opts{pv == "wallenius" ? PvalueMethod::Wallenius : PvalueMethod::Resampling, universe, settings.resamples, settings.num_threads};
            table = goseq(de_genes, matrix.gene_ids(), bias, *sets, opts, seed);
            break;
        }
        case Engine::GseaPhenotype: {
            const auto values = transform(matrix, detail::transform_option(detail::option_or(config, choice::transform, log_cpm)));
            const auto stat = detail::gene_stat_option(detail::option_or(config, choice::gene_stat, snr));
            if (dump) {
                dump->transformed = values;
                dump->ranked = ranking_stat(values, labels, stat);
            }
            GseaOptions opts{detail::exponent_option(detail::option_or(config, choice::exponent, one)), settings.permutations, settings.min_size,
                             settings.max_size, settings.num_threads};
            table = gsea_phenotype(values, labels, *sets, stat, opts, seed);
            break;
        }
        case Engine::GseaPreranked: {
            auto de = detail::run_de(matrix, labels, de_method);
            const auto ranked = ranked_from_de(de);
            if (dump) {
                dump->de = std::move(de);
                dump->ranked = ranked;
            }
            GseaOptions opts{detail::exponent_option(detail::option_or(config, choice::exponent, one)), settings.permutations, settings.min_size,
                             settings.max_size, settings.num_threads};
            table = gsea_preranked(ranked, *sets, opts, seed);
            break;
        }
        case Engine::Padog: {
            const auto values = transform(matrix, detail::transform_option(detail::option_or(config, choice::transform, log_cpm)));
            if (dump) {
                dump->transformed = values;
            }
            table = padog(values, labels, *sets, PadogOptions{settings.permutations, settings.min_size, settings.max_size, settings.num_threads}, seed);
            break;
        }
    }
    return table;
}

/**
 * Memoising evaluator for one setting: every configuration is run with the same seed and cached under its
 * canonical encoding. Engine errors become failed evaluations scoring the goal's worst value.
 */
class PipelineEvaluator {
public:
    struct Result {
        EnrichmentTable table;
        double objective = 0.0;
        bool failed = false;
        std::string error;
    };

    PipelineEvaluator(const PipelineInputs& inputs, ConditionLabels labels, const ChoiceGraph& graph, Goal goal, EngineSettings settings, std::uint64_t seed)
        : my_inputs(&inputs), my_labels(std::move(labels)), my_graph(&graph), my_goal(std::move(goal)), my_settings(settings), my_seed(seed) {}

    /** Thread-safe; concurrent requests for the same configuration run it once. */
    const Result& evaluate(const Config& config) {
        const auto key = my_graph->canonical(config);
        std::shared_ptr<Slot> slot;
        {
            std::lock_guard lock(my_mutex);
            auto& entry = my_cache[key];
            if (!entry) {
                entry = std::make_shared<Slot>();
            }
            slot = entry;
        }
        std::call_once(slot->once, [&] {
            {
                std::lock_guard lock(my_mutex);
                ++my_executions;
            }
            try {
                slot->result.table = run_pipeline(*my_inputs, my_labels, my_graph->engine(), my_graph->resolve(config), my_settings, my_seed);
                slot->result.objective = objective(slot->result.table, my_goal);
            } catch (const Error& e) {
                slot->result.failed = true;
                slot->result.error = e.what();
                slot->result.objective = my_goal.worst();
            }
        });
        return slot->result;
    }

    EvalOutcome operator()(const Config& config) {
        const auto& r = evaluate(config);
        return EvalOutcome{r.objective, r.failed, r.error};
    }

    Evaluator as_evaluator() {
        return [this](const Config& c) { return (*this)(c); };
    }

    std::size_t executions() const {
        std::lock_guard lock(my_mutex);
        return my_executions;
    }

private:
    struct Slot {
        std::once_flag once;
        Result result;
    };

    const PipelineInputs* my_inputs;
    ConditionLabels my_labels;
    const ChoiceGraph* my_graph;
    Goal my_goal;
    EngineSettings my_settings;
    std::uint64_t my_seed;
    mutable std::mutex my_mutex;
    std::map<std::string, std::shared_ptr<Slot>> my_cache;
    std::size_t my_executions = 0;
};

}

#endif
