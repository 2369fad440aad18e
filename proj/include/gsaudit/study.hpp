#ifndef GSAUDIT_STUDY_HPP
#define GSAUDIT_STUDY_HPP

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "multiverse.hpp"
#include "parallel.hpp"
#include "random.hpp"
#include "stats.hpp"

/**
 * @file study.hpp
 * @brief Label permutations, the settings grid and the over-optimism summary.
 */

namespace gsaudit {

struct Labeling {
    /** 0 for the true labels, 1.. for permutations. */
    std::size_t index = 0;
    ConditionLabels labels;

    bool is_true() const { return index == 0; }
    std::string name() const { return is_true() ? std::string("true") : "perm-" + std::to_string(index); }
};

namespace detail {

inline std::size_t hamming(const std::vector<int>& a, const std::vector<int>& b) {
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d += a[i] != b[i];
    }
    return d;
}

/** Binomial coefficient saturating at `cap + 1`. */
inline std::uint64_t choose_capped(std::uint64_t n, std::uint64_t k, std::uint64_t cap) {
    k = std::min(k, n - k);
    long double c = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        c = c * static_cast<long double>(n - k + i) / static_cast<long double>(i);
        if (c > static_cast<long double>(cap)) {
            return cap + 1;
        }
    }
    return static_cast<std::uint64_t>(c + 0.5L);
}

inline constexpr std::uint64_t enumeration_limit = 100000;

}

/**
 * `count` distinct rearrangements of `labels` with unchanged group sizes, none equal to the true assignment
 * and, when `min_hamming > 0`, each differing from it in at least that many samples. Small arrangement spaces
 * are enumerated and sampled without replacement; large ones are drawn by shuffling with rejection.
 */
inline std::vector<Labeling> generate_permutations(const ConditionLabels& labels, std::size_t count, std::uint64_t seed, std::size_t min_hamming = 0) {
    if (count < 1) {
        throw Error(Errc::InvalidConfig, "permutation count must be at least 1");
    }
    const auto& truth = labels.groups();
    const std::size_t n = truth.size();
    const std::size_t n1 = labels.group_sizes()[1];
    Rng rng(derive_seed(seed, "label-permutations"));
    std::vector<Labeling> out;

    const auto total = detail::choose_capped(n, n1, detail::enumeration_limit);
    if (total <= detail::enumeration_limit) {
        std::vector<std::vector<int>> pool;
        std::vector<int> current(n, 0);
        std::fill(current.end() - static_cast<std::ptrdiff_t>(n1), current.end(), 1);
        do {
            if (current != truth && detail::hamming(current, truth) >= min_hamming) {
                pool.push_back(current);
            }
        } while (std::next_permutation(current.begin(), current.end()));
        if (pool.size() < count) {
            throw Error(Errc::InsufficientPermutations, std::to_string(pool.size()) + " eligible arrangements, " + std::to_string(count) + " requested");
        }
        partial_shuffle(pool, count, rng);
        for (std::size_t i = 0; i < count; ++i) {
            out.push_back(Labeling{i + 1, labels.with_groups(pool[i])});
        }
        return out;
    }

    std::set<std::vector<int>> seen;
    std::vector<int> current = truth;
    const std::size_t max_attempts = 1000 * count + 10000;
    for (std::size_t attempt = 0; out.size() < count; ++attempt) {
        if (attempt == max_attempts) {
            throw Error(Errc::InsufficientPermutations, "could not draw enough eligible arrangements");
        }
        fisher_yates(current, rng);
        if (current == truth || detail::hamming(current, truth) < min_hamming || !seen.insert(current).second) {
            continue;
        }
        out.push_back(Labeling{out.size() + 1, labels.with_groups(current)});
    }
    return out;
}

struct StudyConfig {
    std::vector<Engine> engines;
    std::vector<Goal::Kind> goals;
    std::vector<std::string> targets;
    std::size_t permutations = 10;
    bool include_true_labels = true;
    std::size_t min_hamming = 0;
    EngineSettings engine;
    /** Optional per-engine visiting order of the choice points. */
    std::map<Engine, std::vector<std::string>> choice_order;
    /** When non-empty, only these labeling indices (0 = true labels) are run. */
    std::vector<std::size_t> only_labelings;
    /** Workers over settings; never changes results. */
    int num_threads = 1;
};

struct SettingRecord {
    Goal goal;
    Engine engine = Engine::Ora;
    std::size_t labeling = 0;
    std::uint64_t seed = 0;
    double default_objective = 0.0;
    double final_objective = 0.0;
    OptimizationTrace trace;
    std::size_t executions = 0;
    bool failed = false;
    std::string error;
    std::string trace_file;

    std::string labeling_name() const { return labeling == 0 ? std::string("true") : "perm-" + std::to_string(labeling); }
    double improvement() const { return goal.improvement(default_objective, final_objective); }
};

struct SummaryRow {
    Engine engine = Engine::Ora;
    Goal::Kind goal = Goal::Kind::MaxDegs;
    std::size_t settings = 0;
    std::size_t failed = 0;
    std::size_t improved = 0;
    double median_improvement = 0.0;
    double max_improvement = 0.0;
    /** Set-count goal on permuted labels: settings going from no significant set to at least one. */
    std::size_t zero_to_positive = 0;
};

struct StudyReport {
    std::uint64_t seed = 0;
    StudyConfig config;
    std::vector<SettingRecord> records;
    std::vector<SummaryRow> summary;
};

/**
 * Stable 64-bit seed for one setting: the master seed mixed with the hash of `goal|engine|labeling|target`.
 */
inline std::uint64_t setting_seed(std::uint64_t master, Goal::Kind goal, Engine engine, std::size_t labeling, std::string_view target) {
    std::string key;
    key += goal_name(goal);
    key += '|';
    key += engine_name(engine);
    key += '|';
    key += std::to_string(labeling);
    key += '|';
    key += target;
    return mix_seed(master, fnv1a(key));
}

/**
 * Builds the graph for one setting and runs the stepwise search on it.
 */
inline SettingRecord run_setting(const Goal& goal, Engine engine, const Labeling& labeling, const PipelineInputs& inputs, const EngineSettings& settings,
                                 std::uint64_t master_seed, const std::vector<std::string>& order = {})
{
    if ((goal.kind == Goal::Kind::MaxDegs) != goal.target.empty()) {
        throw Error(Errc::InvalidConfig, "a target set is required for goal " + std::string(goal_name(goal.kind)) + " and only for it");
    }
    SettingRecord rec;
    rec.goal = goal;
    rec.engine = engine;
    rec.labeling = labeling.index;
    rec.seed = setting_seed(master_seed, goal.kind, engine, labeling.index, goal.target);

    auto graph = build_graph(engine, goal.kind, inputs.capabilities());
    if (!order.empty()) {
        graph = reorder_graph(graph, order);
    }
    PipelineEvaluator evaluator(inputs, labeling.labels, graph, goal, settings, rec.seed);
    rec.trace = stepwise_optimize(graph, goal, evaluator.as_evaluator());
    rec.default_objective = rec.trace.default_objective;
    rec.final_objective = rec.trace.final_objective;
    rec.executions = evaluator.executions();
    return rec;
}

namespace detail {

inline std::string trace_file_name(std::size_t index, const SettingRecord& rec) {
    std::string name = "trace_" + std::to_string(index) + "_" + std::string(engine_name(rec.engine)) + "_" + std::string(goal_name(rec.goal.kind)) + "_" +
                       rec.labeling_name();
    if (!rec.goal.target.empty()) {
        name += '_';
        for (char c : rec.goal.target) {
            name += std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.' ? c : '_';
        }
    }
    return name + ".json";
}

}

inline std::vector<SummaryRow> summarise(const std::vector<SettingRecord>& records) {
    std::vector<SummaryRow> rows;
    std::map<std::pair<Engine, Goal::Kind>, std::size_t> slot;
    std::vector<std::vector<double>> gains;
    for (const auto& rec : records) {
        auto key = std::make_pair(rec.engine, rec.goal.kind);
        auto it = slot.find(key);
        if (it == slot.end()) {
            it = slot.emplace(key, rows.size()).first;
            rows.push_back(SummaryRow{rec.engine, rec.goal.kind});
            gains.emplace_back();
        }
        auto& row = rows[it->second];
        ++row.settings;
        if (rec.failed) {
            ++row.failed;
            continue;
        }
        const double gain = rec.improvement();
        gains[it->second].push_back(gain);
        row.improved += gain > 0;
        if (rec.goal.kind == Goal::Kind::MaxDegs && rec.labeling != 0 && rec.default_objective == 0 && rec.final_objective > 0) {
            ++row.zero_to_positive;
        }
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!gains[i].empty()) {
            rows[i].median_improvement = stats::median(gains[i]);
            rows[i].max_improvement = *std::max_element(gains[i].begin(), gains[i].end());
        }
    }
    return rows;
}

/**
 * Every (goal, engine, labeling, target) setting of `config`, in that nesting order. Settings run concurrently
 * on `config.num_threads` workers; records keep the enumeration order. A setting that throws is kept as a failed
 * record with worst objectives.
 */
inline StudyReport run_grid(const StudyConfig& config, const PipelineInputs& inputs, std::uint64_t seed) {
    StudyReport report;
    report.seed = seed;
    report.config = config;
    for (auto goal : config.goals) {
        if (goal != Goal::Kind::MaxDegs && config.targets.empty()) {
            throw Error(Errc::InvalidConfig, "goal " + std::string(goal_name(goal)) + " needs at least one target set");
        }
    }

    std::vector<Labeling> labelings;
    if (config.include_true_labels) {
        labelings.push_back(Labeling{0, inputs.labels});
    }
    if (config.permutations > 0 && !config.engines.empty() && !config.goals.empty()) {
        auto perms = generate_permutations(inputs.labels, config.permutations, seed, config.min_hamming);
        labelings.insert(labelings.end(), perms.begin(), perms.end());
    }

    struct Task {
        Goal goal;
        Engine engine;
        const Labeling* labeling;
    };
    std::vector<Task> tasks;
    for (auto kind : config.goals) {
        for (auto engine : config.engines) {
            for (const auto& lab : labelings) {
                if (!config.only_labelings.empty() &&
                    std::find(config.only_labelings.begin(), config.only_labelings.end(), lab.index) == config.only_labelings.end()) {
                    continue;
                }
                if (kind == Goal::Kind::MaxDegs) {
                    tasks.push_back(Task{Goal{kind, ""}, engine, &lab});
                } else {
                    for (const auto& target : config.targets) {
                        tasks.push_back(Task{Goal{kind, target}, engine, &lab});
                    }
                }
            }
        }
    }

    // Parallelism goes to settings when there are several, otherwise to the engine.
    const int outer = std::max(1, config.num_threads);
    EngineSettings settings = config.engine;
    settings.num_threads = tasks.size() > 1 ? 1 : outer;

    report.records.resize(tasks.size());
    parallel_for(tasks.size(), outer, [&](std::size_t i) {
        const auto& task = tasks[i];
        static const std::vector<std::string> no_order;
        auto oit = config.choice_order.find(task.engine);
        try {
            report.records[i] = run_setting(task.goal, task.engine, *task.labeling, inputs, settings, seed, oit == config.choice_order.end() ? no_order : oit->second);
        } catch (const Error& e) {
            auto& rec = report.records[i];
            rec.goal = task.goal;
            rec.engine = task.engine;
            rec.labeling = task.labeling->index;
            rec.seed = setting_seed(seed, task.goal.kind, task.engine, task.labeling->index, task.goal.target);
            rec.failed = true;
            rec.error = e.what();
            rec.default_objective = rec.final_objective = task.goal.worst();
            rec.trace.default_objective = rec.trace.final_objective = task.goal.worst();
        }
    });
    for (std::size_t i = 0; i < report.records.size(); ++i) {
        report.records[i].trace_file = detail::trace_file_name(i, report.records[i]);
    }
    report.summary = summarise(report.records);
    return report;
}

struct PlotRow {
    std::string engine;
    std::string goal;
    std::string labeling;
    std::string target;
    double default_value = 0.0;
    double optimized_value = 0.0;
};

/**
 * Paired default and optimised objective per setting.
 */
inline std::vector<PlotRow> plot_data(const StudyReport& report) {
    if (report.records.empty()) {
        throw Error(Errc::EmptyReport, "report has no settings");
    }
    std::vector<PlotRow> rows;
    rows.reserve(report.records.size());
    for (const auto& rec : report.records) {
        rows.push_back(PlotRow{std::string(engine_name(rec.engine)), std::string(goal_name(rec.goal.kind)), rec.labeling == 0 ? "true" : "permuted",
                               rec.goal.target, rec.default_objective, rec.final_objective});
    }
    return rows;
}

}

#endif
