#ifndef GSAUDIT_MULTIVERSE_OPTIMIZE_HPP
#define GSAUDIT_MULTIVERSE_OPTIMIZE_HPP

#include <functional>
#include <string>
#include <vector>

#include "../parallel.hpp"
#include "choice_graph.hpp"

namespace gsaudit {

struct EvalOutcome {
    double objective = 0.0;
    bool failed = false;
    std::string error;
};

/** Objective oracle over resolved configurations; must be deterministic for a fixed config. */
using Evaluator = std::function<EvalOutcome(const Config&)>;

struct EvaluatedOption {
    std::string option;
    double objective = 0.0;
    bool failed = false;
    std::string error;
};

struct TraceStep {
    std::string choice;
    std::string incumbent;
    std::vector<EvaluatedOption> evaluated;
    std::string adopted;
    double objective_before = 0.0;
    double objective_after = 0.0;
};

struct OptimizationTrace {
    std::vector<TraceStep> steps;
    Config default_config;
    double default_objective = 0.0;
    Config final_config;
    double final_objective = 0.0;
};

/**
 * Greedy one-choice-at-a-time search in graph order. At each point every active option is scored with the
 * adopted options upstream and defaults downstream; the best strict improvement is adopted, ties going to
 * the earlier-listed option. Evaluations within a step may run on `num_threads` workers.
 */
inline OptimizationTrace stepwise_optimize(const ChoiceGraph& graph, const Goal& goal, const Evaluator& evaluate, int num_threads = 1) {
    OptimizationTrace trace;
    trace.default_config = graph.defaults();
    const auto start = evaluate(trace.default_config);
    trace.default_objective = start.failed ? goal.worst() : start.objective;

    Config adopted;
    double incumbent_value = trace.default_objective;
    for (const auto& point : graph.points()) {
        Config base = graph.resolve(adopted);
        const auto& list = point.active(base);
        TraceStep step;
        step.choice = point.id;
        step.incumbent = base.at(point.id);
        step.objective_before = incumbent_value;

        std::vector<Config> candidates;
        candidates.reserve(list.options.size());
        for (const auto& option : list.options) {
            // Downstream points go back to their defaults under the candidate option.
            Config trial = adopted;
            trial[point.id] = option;
            candidates.push_back(graph.resolve(trial));
        }
        std::vector<EvalOutcome> outcomes(candidates.size());
        parallel_for(candidates.size(), num_threads, [&](std::size_t i) { outcomes[i] = evaluate(candidates[i]); });

        std::string best_option = step.incumbent;
        double best_value = incumbent_value;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            EvaluatedOption ev{list.options[i], outcomes[i].failed ? goal.worst() : outcomes[i].objective, outcomes[i].failed, outcomes[i].error};
            step.evaluated.push_back(ev);
            if (list.options[i] != step.incumbent && goal.better(ev.objective, best_value)) {
                best_value = ev.objective;
                best_option = list.options[i];
            }
        }
        adopted[point.id] = best_option;
        step.adopted = best_option;
        step.objective_after = best_value;
        incumbent_value = best_value;
        trace.steps.push_back(std::move(step));
    }
    trace.final_config = graph.resolve(adopted);
    trace.final_objective = incumbent_value;
    return trace;
}

struct ExhaustiveResult {
    Config config;
    double objective = 0.0;
    std::size_t evaluated = 0;
};

/**
 * Global optimum over the dependency-resolved Cartesian product, visited in declared option order so the
 * first-found best wins ties.
 */
inline ExhaustiveResult exhaustive_optimize(const ChoiceGraph& graph, const Goal& goal, const Evaluator& evaluate, std::size_t cap = 10000) {
    const auto total = graph.space_size();
    if (total > cap) {
        throw Error(Errc::SearchSpaceTooLarge, std::to_string(total) + " configurations exceed the cap of " + std::to_string(cap));
    }
    ExhaustiveResult best;
    bool have = false;
    Config cfg;
    std::function<void(std::size_t)> walk = [&](std::size_t i) {
        if (i == graph.size()) {
            const auto out = evaluate(cfg);
            const double value = out.failed ? goal.worst() : out.objective;
            ++best.evaluated;
            if (!have || goal.better(value, best.objective)) {
                best.config = cfg;
                best.objective = value;
                have = true;
            }
            return;
        }
        const auto& point = graph.points()[i];
        for (const auto& option : point.active(cfg).options) {
            cfg[point.id] = option;
            walk(i + 1);
        }
        cfg.erase(point.id);
    };
    walk(0);
    return best;
}

}

#endif
