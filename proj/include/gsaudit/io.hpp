#ifndef GSAUDIT_IO_HPP
#define GSAUDIT_IO_HPP

#include <charconv>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>

#include "json.hpp"

#include "diffexpr.hpp"
#include "enrichment/table.hpp"
#include "preprocess.hpp"
#include "study.hpp"
#include "synthdata.hpp"
#include "version.hpp"

/**
 * @file io.hpp
 * @brief TSV, CSV and JSON serialisation of tables, traces and study reports.
 */

namespace gsaudit {

using json = nlohmann::ordered_json;

/** Shortest text that reads back to the same double. */
inline std::string format_double(double value) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view token) {
    double v = 0;
    auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
        throw Error(Errc::MalformedCell, "not a number: '" + std::string(token) + "'");
    }
    return v;
}

/* Enrichment tables */

inline void write_enrichment_tsv(std::ostream& out, const EnrichmentTable& table) {
    out << "set\tstatistic\traw_p\tadjusted\tdense_rank\trelative_rank\tsignificant\n";
    for (const auto& r : table.rows) {
        out << r.set << '\t' << format_double(r.statistic) << '\t' << format_double(r.raw_p) << '\t' << format_double(r.adjusted) << '\t' << r.dense_rank
            << '\t' << format_double(r.relative_rank) << '\t' << (r.significant ? "true" : "false") << '\n';
    }
}

inline EnrichmentTable read_enrichment_tsv(std::istream& in, Engine engine) {
    EnrichmentTable table;
    table.engine = engine;
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(Errc::MalformedLine, "missing enrichment table header");
    }
    while (std::getline(in, line)) {
        detail::strip_cr(line);
        if (line.empty()) {
            continue;
        }
        auto cells = detail::split_tabs(line);
        if (cells.size() != 7) {
            throw Error(Errc::RaggedRow, line);
        }
        EnrichmentRow r;
        r.set = std::string(cells[0]);
        r.statistic = parse_double(cells[1]);
        r.raw_p = parse_double(cells[2]);
        r.adjusted = parse_double(cells[3]);
        auto rank = detail::parse_int(cells[4]);
        if (!rank) {
            throw Error(Errc::MalformedCell, std::string(cells[4]));
        }
        r.dense_rank = static_cast<int>(*rank);
        r.relative_rank = parse_double(cells[5]);
        r.significant = cells[6] == "true";
        table.rows.push_back(std::move(r));
    }
    return table;
}

inline json to_json(const EnrichmentTable& table) {
    json rows = json::array();
    for (const auto& r : table.rows) {
        rows.push_back({{"set", r.set},
                        {"statistic", r.statistic},
                        {"raw_p", r.raw_p},
                        {"adjusted", r.adjusted},
                        {"dense_rank", r.dense_rank},
                        {"relative_rank", r.relative_rank},
                        {"significant", r.significant}});
    }
    return json{{"engine", engine_name(table.engine)}, {"rows", std::move(rows)}};
}

inline EnrichmentTable enrichment_from_json(const json& j) {
    EnrichmentTable table;
    table.engine = parse_engine(j.at("engine").get<std::string>());
    for (const auto& r : j.at("rows")) {
        table.rows.push_back(EnrichmentRow{r.at("set").get<std::string>(), r.at("statistic").get<double>(), r.at("raw_p").get<double>(),
                                           r.at("adjusted").get<double>(), r.at("dense_rank").get<int>(), r.at("relative_rank").get<double>(),
                                           r.at("significant").get<bool>()});
    }
    return table;
}

/* Gene-level tables */

inline void write_de_tsv(std::ostream& out, const DeTable& table) {
    out << "gene_id\tlog2_fold_change\tstatistic\traw_p\tadjusted_p\n";
    for (const auto& r : table.rows) {
        out << r.gene_id << '\t' << format_double(r.log2_fold_change) << '\t' << format_double(r.statistic) << '\t' << format_double(r.raw_p) << '\t'
            << format_double(r.adjusted_p) << '\n';
    }
}

inline void write_ranked_tsv(std::ostream& out, const RankedList& list) {
    out << "gene_id\t" << ranking_stat_name(list.stat) << '\n';
    for (std::size_t i = 0; i < list.size(); ++i) {
        out << list.gene_ids[i] << '\t' << format_double(list.values[i]) << '\n';
    }
}

inline void write_transformed_tsv(std::ostream& out, const TransformedMatrix& m) {
    out << "gene_id";
    for (const auto& s : m.samples) {
        out << '\t' << s;
    }
    out << '\n';
    for (std::size_t g = 0; g < m.num_genes(); ++g) {
        out << m.gene_ids[g];
        for (std::size_t s = 0; s < m.num_samples(); ++s) {
            out << '\t' << format_double(m.at(g, s));
        }
        out << '\n';
    }
}

/* Traces */

inline json to_json(const Config& config) {
    json j = json::object();
    for (const auto& [k, v] : config) {
        j[k] = v;
    }
    return j;
}

inline Config config_from_json(const json& j) {
    Config c;
    for (const auto& [k, v] : j.items()) {
        c[k] = v.get<std::string>();
    }
    return c;
}

inline json to_json(const OptimizationTrace& trace) {
    json steps = json::array();
    for (const auto& s : trace.steps) {
        json evaluated = json::array();
        for (const auto& e : s.evaluated) {
            json item{{"option", e.option}, {"objective", e.objective}};
            if (e.failed) {
                item["failed"] = true;
                item["error"] = e.error;
            }
            evaluated.push_back(std::move(item));
        }
        steps.push_back({{"choice", s.choice},
                         {"incumbent", s.incumbent},
                         {"evaluated", std::move(evaluated)},
                         {"adopted", s.adopted},
                         {"objective_before", s.objective_before},
                         {"objective_after", s.objective_after}});
    }
    return json{{"steps", std::move(steps)},
                {"default_config", to_json(trace.default_config)},
                {"default_objective", trace.default_objective},
                {"final_config", to_json(trace.final_config)},
                {"final_objective", trace.final_objective}};
}

inline OptimizationTrace trace_from_json(const json& j) {
    OptimizationTrace t;
    for (const auto& s : j.at("steps")) {
        TraceStep step;
        step.choice = s.at("choice").get<std::string>();
        step.incumbent = s.value("incumbent", std::string());
        for (const auto& e : s.at("evaluated")) {
            step.evaluated.push_back(EvaluatedOption{e.at("option").get<std::string>(), e.at("objective").get<double>(), e.value("failed", false),
                                                     e.value("error", std::string())});
        }
        step.adopted = s.at("adopted").get<std::string>();
        step.objective_before = s.value("objective_before", 0.0);
        step.objective_after = s.at("objective_after").get<double>();
        t.steps.push_back(std::move(step));
    }
    if (j.contains("default_config")) {
        t.default_config = config_from_json(j.at("default_config"));
    }
    t.default_objective = j.at("default_objective").get<double>();
    t.final_config = config_from_json(j.at("final_config"));
    t.final_objective = j.at("final_objective").get<double>();
    return t;
}

/* Study configuration and reports */

inline json to_json(const EngineSettings& s) {
    return json{{"engine_permutations", s.permutations}, {"resamples", s.resamples}, {"min_size", s.min_size},
                {"max_size", s.max_size},                {"de_alpha", s.de_alpha},   {"ease", s.ease}};
}

/**
 * Resolved study configuration as recorded in report metadata. The worker count is left out because it never
 * affects results.
 */
inline json to_json(const StudyConfig& c) {
    json engines = json::array(), goals = json::array();
    for (auto e : c.engines) {
        engines.push_back(engine_name(e));
    }
    for (auto g : c.goals) {
        goals.push_back(goal_name(g));
    }
    json order = json::object();
    for (const auto& [engine, ids] : c.choice_order) {
        order[std::string(engine_name(engine))] = ids;
    }
    json j{{"engines", std::move(engines)},
           {"goals", std::move(goals)},
           {"targets", c.targets},
           {"permutations", c.permutations},
           {"include_true_labels", c.include_true_labels},
           {"min_hamming", c.min_hamming}};
    const json settings = to_json(c.engine);
    for (const auto& [k, v] : settings.items()) {
        j[k] = v;
    }
    j["choice_order"] = std::move(order);
    if (!c.only_labelings.empty()) {
        j["only_labelings"] = c.only_labelings;
    }
    return j;
}

inline StudyConfig study_config_from_json(const json& j) {
    StudyConfig c;
    for (const auto& e : j.at("engines")) {
        c.engines.push_back(parse_engine(e.get<std::string>()));
    }
    for (const auto& g : j.at("goals")) {
        c.goals.push_back(parse_goal(g.get<std::string>()));
    }
    c.targets = j.at("targets").get<std::vector<std::string>>();
    c.permutations = j.at("permutations").get<std::size_t>();
    c.include_true_labels = j.at("include_true_labels").get<bool>();
    c.min_hamming = j.at("min_hamming").get<std::size_t>();
    c.engine.permutations = j.at("engine_permutations").get<int>();
    c.engine.resamples = j.at("resamples").get<int>();
    c.engine.min_size = j.at("min_size").get<std::size_t>();
    c.engine.max_size = j.at("max_size").get<std::size_t>();
    c.engine.de_alpha = j.at("de_alpha").get<double>();
    c.engine.ease = j.at("ease").get<bool>();
    for (const auto& [engine, ids] : j.at("choice_order").items()) {
        c.choice_order[parse_engine(engine)] = ids.get<std::vector<std::string>>();
    }
    if (j.contains("only_labelings")) {
        c.only_labelings = j.at("only_labelings").get<std::vector<std::size_t>>();
    }
    return c;
}

inline json record_json(const SettingRecord& r) {
    json j{{"goal", goal_name(r.goal.kind)},
           {"engine", engine_name(r.engine)},
           {"labeling", r.labeling_name()},
           {"target", r.goal.target.empty() ? json(nullptr) : json(r.goal.target)},
           {"seed", r.seed},
           {"default_objective", r.default_objective},
           {"final_objective", r.final_objective},
           {"improvement", r.improvement()},
           {"evaluations", r.executions},
           {"final_config", to_json(r.trace.final_config)},
           {"trace_file", r.trace_file}};
    if (r.failed) {
        j["failed"] = true;
        j["error"] = r.error;
    }
    return j;
}

inline json summary_json(const SummaryRow& s) {
    return json{{"engine", engine_name(s.engine)},
                {"goal", goal_name(s.goal)},
                {"settings", s.settings},
                {"failed", s.failed},
                {"improved", s.improved},
                {"median_improvement", s.median_improvement},
                {"max_improvement", s.max_improvement},
                {"zero_to_positive", s.zero_to_positive}};
}

/**
 * Metadata block: tool version, master seed, resolved configuration and any extra provenance entries.
 */
inline json meta_json(std::uint64_t seed, const json& config, const json& extra = json::object()) {
    json meta{{"tool", "gsaudit"}, {"version", version}, {"seed", seed}, {"config", config}};
    for (const auto& [k, v] : extra.items()) {
        meta[k] = v;
    }
    return meta;
}

inline json to_json(const StudyReport& report, const json& extra_meta = json::object()) {
    json records = json::array(), summary = json::array();
    for (const auto& r : report.records) {
        records.push_back(record_json(r));
    }
    for (const auto& s : report.summary) {
        summary.push_back(summary_json(s));
    }
    return json{{"meta", meta_json(report.seed, to_json(report.config), extra_meta)}, {"records", std::move(records)}, {"summary", std::move(summary)}};
}

inline json trace_document(const StudyReport& report, const SettingRecord& r, const json& extra_meta = json::object()) {
    json doc{{"meta", meta_json(report.seed, to_json(report.config), extra_meta)}};
    json setting = record_json(r);
    setting.erase("final_config");
    setting.erase("trace_file");
    doc["setting"] = std::move(setting);
    const json trace = to_json(r.trace);
    for (const auto& [k, v] : trace.items()) {
        doc[k] = v;
    }
    return doc;
}

/**
 * Configuration, records and summary read back from a report document; traces are not embedded and stay empty
 * apart from their final configuration and objectives.
 */
inline StudyReport report_from_json(const json& j) {
    StudyReport report;
    report.seed = j.at("meta").at("seed").get<std::uint64_t>();
    report.config = study_config_from_json(j.at("meta").at("config"));
    for (const auto& r : j.at("records")) {
        SettingRecord rec;
        rec.goal.kind = parse_goal(r.at("goal").get<std::string>());
        if (!r.at("target").is_null()) {
            rec.goal.target = r.at("target").get<std::string>();
        }
        rec.engine = parse_engine(r.at("engine").get<std::string>());
        const auto lab = r.at("labeling").get<std::string>();
        rec.labeling = lab == "true" ? 0 : std::stoul(lab.substr(lab.find('-') + 1));
        rec.seed = r.at("seed").get<std::uint64_t>();
        rec.default_objective = r.at("default_objective").get<double>();
        rec.final_objective = r.at("final_objective").get<double>();
        rec.executions = r.value("evaluations", std::size_t{0});
        rec.trace_file = r.value("trace_file", std::string());
        rec.failed = r.value("failed", false);
        rec.error = r.value("error", std::string());
        rec.trace.default_objective = rec.default_objective;
        rec.trace.final_objective = rec.final_objective;
        rec.trace.final_config = config_from_json(r.at("final_config"));
        report.records.push_back(std::move(rec));
    }
    report.summary = summarise(report.records);
    return report;
}

inline void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
    out << "engine,goal,settings,failed,improved,median_improvement,max_improvement,zero_to_positive\n";
    for (const auto& s : rows) {
        out << engine_name(s.engine) << ',' << goal_name(s.goal) << ',' << s.settings << ',' << s.failed << ',' << s.improved << ','
            << format_double(s.median_improvement) << ',' << format_double(s.max_improvement) << ',' << s.zero_to_positive << '\n';
    }
}

namespace detail {

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        out += c;
        if (c == '"') {
            out += '"';
        }
    }
    return out + '"';
}

}

inline void write_plot_csv(std::ostream& out, const std::vector<PlotRow>& rows) {
    out << "engine,goal,labeling,target,default_value,optimized_value\n";
    for (const auto& r : rows) {
        out << r.engine << ',' << r.goal << ',' << r.labeling << ',' << detail::csv_field(r.target) << ',' << format_double(r.default_value) << ','
            << format_double(r.optimized_value) << '\n';
    }
}

/* Simulation output */

inline json to_json(const SimSpec& s) {
    return json{{"genes", s.genes},
                {"samples", {s.samples[0], s.samples[1]}},
                {"base_mean", s.base_mean},
                {"dispersion", s.dispersion},
                {"within_set_correlation", s.within_set_correlation},
                {"de_fraction", s.de_fraction},
                {"lfc", s.lfc},
                {"seed", s.seed},
                {"lengths", s.lengths}};
}

inline json truth_json(const SimSpec& spec, const SimTruth& truth) {
    return json{{"meta", meta_json(spec.seed, to_json(spec))}, {"de_genes", truth.de_genes}, {"enriched_sets", truth.enriched_sets}};
}

/* Files */

inline std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(Errc::WriteFailed, "cannot write " + path.string());
    }
    return out;
}

inline void write_json_file(const std::filesystem::path& path, const json& j) {
    auto out = open_output(path);
    out << j.dump(2) << '\n';
}

inline json read_json_file(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(Errc::InvalidConfig, path.string() + ": " + e.what());
    }
}

}

#endif
