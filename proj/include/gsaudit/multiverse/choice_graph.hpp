#ifndef GSAUDIT_MULTIVERSE_CHOICE_GRAPH_HPP
#define GSAUDIT_MULTIVERSE_CHOICE_GRAPH_HPP

#include <algorithm>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "../enrichment/table.hpp"
#include "../error.hpp"

/**
 * @file choice_graph.hpp
 * @brief Ordered, dependency-aware analysis choices and the optimisation goals evaluated over them.
 */

namespace gsaudit {

/**
 * Full or partial assignment of option ids to choice ids.
 */
using Config = std::map<std::string, std::string>;

enum class ChoiceKind { Preprocessing, Parameter };

inline constexpr std::string_view choice_kind_name(ChoiceKind kind) { return kind == ChoiceKind::Preprocessing ? "preprocessing" : "parameter"; }

struct OptionList {
    std::vector<std::string> options;
    std::size_t default_index = 0;

    const std::string& default_option() const { return options[default_index]; }
    bool contains(std::string_view option) const { return std::find(options.begin(), options.end(), option) != options.end(); }
};

/**
 * One analysis decision. When `depends_on` names an earlier choice, the option list is looked up in
 * `conditional` by the option adopted for that choice; otherwise `options` applies.
 */
struct ChoicePoint {
    std::string id;
    ChoiceKind kind = ChoiceKind::Preprocessing;
    OptionList options;
    std::string depends_on;
    std::map<std::string, OptionList> conditional;

    const OptionList& active(const Config& upstream) const {
        if (depends_on.empty()) {
            return options;
        }
        auto it = upstream.find(depends_on);
        if (it == upstream.end()) {
            throw Error(Errc::UnknownChoice, id + " depends on unresolved choice " + depends_on);
        }
        auto cit = conditional.find(it->second);
        if (cit == conditional.end()) {
            throw Error(Errc::UnknownChoice, id + " has no options for " + depends_on + "=" + it->second);
        }
        return cit->second;
    }
};

struct Goal {
    enum class Kind { MaxDegs, MinAdjP, MinRelRank };

    Kind kind = Kind::MaxDegs;
    std::string target;

    bool maximise() const { return kind == Kind::MaxDegs; }

    /** Objective assigned to failed evaluations and to absent targets. */
    double worst() const { return kind == Kind::MaxDegs ? 0.0 : 1.0; }

    /** Strict improvement of `candidate` over `incumbent`. */
    bool better(double candidate, double incumbent) const { return maximise() ? candidate > incumbent : candidate < incumbent; }

    /** Signed improvement: count gained, or adjusted value / relative rank shed. */
    double improvement(double from, double to) const { return maximise() ? to - from : from - to; }

    bool operator==(const Goal&) const = default;
};

inline constexpr std::string_view goal_name(Goal::Kind kind) {
    switch (kind) {
        case Goal::Kind::MaxDegs: return "max-degs";
        case Goal::Kind::MinAdjP: return "min-adjp";
        case Goal::Kind::MinRelRank: return "min-relrank";
    }
    return "";
}

inline Goal::Kind parse_goal(std::string_view name) {
    for (auto k : {Goal::Kind::MaxDegs, Goal::Kind::MinAdjP, Goal::Kind::MinRelRank}) {
        if (goal_name(k) == name) {
            return k;
        }
    }
    throw Error(Errc::InvalidConfig, "unknown goal '" + std::string(name) + "'");
}

/**
 * Objective read from an assembled table: the number of significant sets, the target's adjusted value,
 * or the target's relative rank. An absent target scores the worst value.
 */
inline double objective(const EnrichmentTable& table, const Goal& goal) {
    if (goal.kind == Goal::Kind::MaxDegs) {
        return static_cast<double>(table.significant_count());
    }
    const auto* row = table.find(goal.target);
    if (!row) {
        return goal.worst();
    }
    return goal.kind == Goal::Kind::MinAdjP ? row->adjusted : row->relative_rank;
}

class ChoiceGraph {
public:
    ChoiceGraph() = default;

    ChoiceGraph(std::vector<ChoicePoint> points, Engine engine, Goal::Kind goal) : my_points(std::move(points)), my_engine(engine), my_goal(goal) {
        for (std::size_t i = 0; i < my_points.size(); ++i) {
            const auto& p = my_points[i];
            for (std::size_t j = 0; j < i; ++j) {
                if (my_points[j].id == p.id) {
                    throw Error(Errc::InvalidConfig, "duplicate choice " + p.id);
                }
            }
            auto check = [&](const OptionList& list) {
                if (list.options.size() < 2 || list.default_index >= list.options.size()) {
                    throw Error(Errc::InvalidConfig, "choice " + p.id + " needs at least two options and a valid default");
                }
            };
            if (p.depends_on.empty()) {
                check(p.options);
            } else {
                auto upstream = std::find_if(my_points.begin(), my_points.begin() + static_cast<std::ptrdiff_t>(i), [&](const ChoicePoint& q) { return q.id == p.depends_on; });
                if (upstream == my_points.begin() + static_cast<std::ptrdiff_t>(i)) {
                    throw Error(Errc::InvalidConfig, "choice " + p.id + " depends on a later or unknown choice " + p.depends_on);
                }
                for (const auto& [key, list] : p.conditional) {
                    check(list);
                }
            }
        }
    }

    const std::vector<ChoicePoint>& points() const { return my_points; }
    std::size_t size() const { return my_points.size(); }
    Engine engine() const { return my_engine; }
    Goal::Kind goal() const { return my_goal; }

    const ChoicePoint* find(std::string_view id) const {
        for (const auto& p : my_points) {
            if (p.id == id) {
                return &p;
            }
        }
        return nullptr;
    }

    std::size_t count(ChoiceKind kind) const {
        return std::count_if(my_points.begin(), my_points.end(), [&](const ChoicePoint& p) { return p.kind == kind; });
    }

    /**
     * Complete assignment: options valid under the resolved upstream choices are kept, everything else
     * falls back to the active default. Entries for choices outside the graph are dropped.
     */
    Config resolve(const Config& partial) const {
        Config out;
        for (const auto& p : my_points) {
            const auto& list = p.active(out);
            auto it = partial.find(p.id);
            if (it != partial.end() && list.contains(it->second)) {
                out[p.id] = it->second;
            } else {
                out[p.id] = list.default_option();
            }
        }
        return out;
    }

    Config defaults() const { return resolve(Config{}); }

    /**
     * Canonical encoding of the resolved assignment: sorted `choice=option` pairs joined by `;`.
     */
    std::string canonical(const Config& partial) const {
        std::string out;
        for (const auto& [choice, option] : resolve(partial)) {
            if (!out.empty()) {
                out += ';';
            }
            out += choice;
            out += '=';
            out += option;
        }
        return out;
    }

    /**
     * Number of dependency-resolved full assignments.
     */
    std::size_t space_size() const {
        Config cfg;
        return count_from(0, cfg);
    }

private:
    std::size_t count_from(std::size_t i, Config& cfg) const {
        if (i == my_points.size()) {
            return 1;
        }
        const auto& list = my_points[i].active(cfg);
        std::size_t total = 0;
        for (const auto& option : list.options) {
            cfg[my_points[i].id] = option;
            total += count_from(i + 1, cfg);
        }
        cfg.erase(my_points[i].id);
        return total;
    }

    std::vector<ChoicePoint> my_points;
    Engine my_engine = Engine::Ora;
    Goal::Kind my_goal = Goal::Kind::MaxDegs;
};

/**
 * What the inputs of a run make available to the graph builder.
 */
struct Capabilities {
    bool has_id_map = false;
    bool has_alternative_collection = false;
    bool has_lengths = false;
};

namespace choice {

inline constexpr std::string_view de_method = "de_method";
inline constexpr std::string_view prefilter = "prefilter";
inline constexpr std::string_view duplicates = "duplicates";
inline constexpr std::string_view collection = "collection";
inline constexpr std::string_view universe = "universe";
inline constexpr std::string_view pvalue_method = "pvalue_method";
inline constexpr std::string_view bias = "bias";
inline constexpr std::string_view transform = "transform";
inline constexpr std::string_view gene_stat = "gene_stat";
inline constexpr std::string_view exponent = "exponent";

}

namespace detail {

inline ChoicePoint simple_point(std::string_view id, ChoiceKind kind, std::vector<std::string> options) {
    ChoicePoint p;
    p.id = std::string(id);
    p.kind = kind;
    p.options.options = std::move(options);
    return p;
}

inline ChoicePoint de_method_point() {
    return simple_point(choice::de_method, ChoiceKind::Preprocessing, {"nb-wald", "moderated-t"});
}

/** Pre-filter options follow the adopted DE method, so this point must come after it. */
inline ChoicePoint de_dependent_prefilter_point() {
    ChoicePoint p;
    p.id = std::string(choice::prefilter);
    p.kind = ChoiceKind::Preprocessing;
    p.depends_on = std::string(choice::de_method);
    p.conditional["nb-wald"] = OptionList{{"total>=10", "total>=50"}, 0};
    p.conditional["moderated-t"] = OptionList{{"expr-filter", "cpm>=1-in-2"}, 0};
    return p;
}

inline ChoicePoint plain_prefilter_point() {
    return simple_point(choice::prefilter, ChoiceKind::Preprocessing, {"total>=10", "expr-filter"});
}

inline ChoicePoint duplicates_point() {
    return simple_point(choice::duplicates, ChoiceKind::Preprocessing, {"keep-first", "rounded-mean"});
}

inline ChoicePoint collection_point() {
    return simple_point(choice::collection, ChoiceKind::Parameter, {"primary", "alternative"});
}

inline ChoicePoint exponent_point() {
    return simple_point(choice::exponent, ChoiceKind::Parameter, {"1", "0", "1.5", "2"});
}

inline ChoicePoint transform_point() {
    return simple_point(choice::transform, ChoiceKind::Preprocessing, {"log-cpm", "shifted-log-vst"});
}

}

/**
 * Per-engine choice graph in its fixed evaluation order. Preprocessing choices precede parameter choices,
 * except that the DE method precedes pre-filtering because the pre-filter options depend on it.
 * The collection choice only exists for the set-count goal and when an alternative collection is supplied.
 */
inline ChoiceGraph build_graph(Engine engine, Goal::Kind goal, const Capabilities& caps) {
    std::vector<ChoicePoint> points;
    const bool with_collection = goal == Goal::Kind::MaxDegs && caps.has_alternative_collection;

    switch (engine) {
        case Engine::Ora:
            points.push_back(detail::de_method_point());
            points.push_back(detail::de_dependent_prefilter_point());
            if (caps.has_id_map) {
                points.push_back(detail::duplicates_point());
            }
            if (with_collection) {
                points.push_back(detail::collection_point());
            }
            points.push_back(detail::simple_point(choice::universe, ChoiceKind::Parameter, {"annotated", "all-tested"}));
            break;

        case Engine::Goseq:
            points.push_back(detail::de_method_point());
            points.push_back(detail::de_dependent_prefilter_point());
            if (with_collection) {
                points.push_back(detail::collection_point());
            }
            points.push_back(detail::simple_point(choice::universe, ChoiceKind::Parameter, {"annotated", "all-tested"}));
            points.push_back(detail::simple_point(choice::pvalue_method, ChoiceKind::Parameter, {"wallenius", "resampling"}));
            if (caps.has_lengths) {
                points.push_back(detail::simple_point(choice::bias, ChoiceKind::Parameter, {"transcript-length", "mean-expression"}));
            }
            break;

        case Engine::GseaPhenotype:
            points.push_back(detail::plain_prefilter_point());
            points.push_back(detail::transform_point());
            if (with_collection) {
                points.push_back(detail::collection_point());
            }
            points.push_back(detail::simple_point(choice::gene_stat, ChoiceKind::Parameter, {"signal-to-noise", "t-statistic", "diff-of-classes"}));
            points.push_back(detail::exponent_point());
            break;

        case Engine::GseaPreranked:
            points.push_back(detail::de_method_point());
            points.push_back(detail::de_dependent_prefilter_point());
            if (caps.has_id_map) {
                points.push_back(detail::duplicates_point());
            }
            if (with_collection) {
                points.push_back(detail::collection_point());
            }
            points.push_back(detail::exponent_point());
            break;

        case Engine::Padog:
            points.push_back(detail::plain_prefilter_point());
            if (caps.has_id_map) {
                points.push_back(detail::duplicates_point());
            }
            points.push_back(detail::transform_point());
            break;
    }
    return ChoiceGraph(std::move(points), engine, goal);
}

/**
 * Same graph visited in `order`, which must list every choice id exactly once and keep each dependent
 * choice after the choice it depends on.
 */
inline ChoiceGraph reorder_graph(const ChoiceGraph& graph, const std::vector<std::string>& order) {
    if (order.size() != graph.size()) {
        throw Error(Errc::InvalidConfig, "choice order must list all " + std::to_string(graph.size()) + " choices");
    }
    std::vector<ChoicePoint> points;
    for (const auto& id : order) {
        const auto* p = graph.find(id);
        if (!p) {
            throw Error(Errc::UnknownChoice, id);
        }
        points.push_back(*p);
    }
    return ChoiceGraph(std::move(points), graph.engine(), graph.goal());
}

}

#endif
