#ifndef GSAUDIT_CLI_HPP
#define GSAUDIT_CLI_HPP

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "io.hpp"

/**
 * @file cli.hpp
 * @brief The `gsaudit` command line: argument and config-file handling on top of the library API.
 */

namespace gsaudit::cli {

namespace fs = std::filesystem;

/**
 * Fully resolved inputs of an `audit run` or `audit grid` invocation.
 */
struct RunConfig {
    std::string counts;
    std::string labels;
    std::string collection;
    std::string alt_collection;
    std::string id_map;
    std::string lengths;
    std::vector<Engine> engines;
    std::vector<Goal::Kind> goals;
    std::vector<std::string> targets;
    std::size_t permutations = 10;
    bool include_true_labels = true;
    std::size_t min_hamming = 0;
    std::uint64_t seed = 0;
    EngineSettings engine;
    std::map<Engine, std::vector<std::string>> choice_order;
    int threads = 1;
    std::string out;
    std::string labeling = "true";
    std::string dump_dir;
};

namespace detail {

enum class Kind { Path, Text, List, Int, UInt64, Real, Bool, Order };

struct FlagSpec {
    const char* key;
    const char* flag;
    Kind kind;
    const char* help;
};

inline const std::vector<FlagSpec>& audit_flags() {
    static const std::vector<FlagSpec> specs{
        {"counts", "--counts", Kind::Path, "Count matrix TSV"},
        {"labels", "--labels", Kind::Path, "Sample labels TSV"},
        {"collection", "--collection", Kind::Path, "Gene set collection"},
        {"alt_collection", "--alt-collection", Kind::Path, "Alternative gene set collection"},
        {"id_map", "--id-map", Kind::Path, "Source-to-target identifier map"},
        {"lengths", "--lengths", Kind::Path, "Per-gene transcript lengths"},
        {"engine", "--engine", Kind::List, "Enrichment engines (ora, goseq, gsea-phenotype, gsea-preranked, padog)"},
        {"goal", "--goal", Kind::List, "Goals (max-degs, min-adjp, min-relrank)"},
        {"target_set", "--target-set", Kind::List, "Target gene sets for min-adjp and min-relrank"},
        {"permutations", "--permutations", Kind::Int, "Number of label permutations"},
        {"include_true_labels", "--include-true-labels", Kind::Bool, "Also run the true labels (true/false)"},
        {"min_hamming", "--min-hamming", Kind::Int, "Minimum number of relabelled samples per permutation"},
        {"seed", "--seed", Kind::UInt64, "Master seed"},
        {"engine_permutations", "--engine-permutations", Kind::Int, "Permutations inside GSEA and PADOG"},
        {"resamples", "--resamples", Kind::Int, "Resamples for the goseq resampling null"},
        {"de_alpha", "--de-alpha", Kind::Real, "Adjusted p-value cut-off for the DE gene list"},
        {"ease", "--ease", Kind::Bool, "Conservative EASE variant of ORA (true/false)"},
        {"min_size", "--min-size", Kind::Int, "Smallest gene set tested by GSEA and PADOG"},
        {"max_size", "--max-size", Kind::Int, "Largest gene set tested by GSEA and PADOG"},
        {"choice_order", "--choice-order", Kind::Order, "Visiting order for one engine, as engine=choice,choice,..."},
        {"threads", "--threads", Kind::Int, "Worker threads"},
        {"out", "--out", Kind::Path, "Output directory"},
        {"labeling", "--labeling", Kind::Text, "Labeling for audit run: true or perm-<k>"},
        {"dump_dir", "--dump-dir", Kind::Path, "Write intermediate tables of the optimised configuration here (audit run)"},
    };
    return specs;
}

inline std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        auto end = s.find(',', start);
        if (end == std::string::npos) {
            end = s.size();
        }
        if (end > start) {
            out.push_back(s.substr(start, end - start));
        }
        start = end + 1;
    }
    return out;
}

inline json parse_value(const FlagSpec& spec, const std::vector<std::string>& raw) {
    auto bad = [&](const std::string& v) { return Error(Errc::InvalidConfig, std::string(spec.flag) + ": invalid value '" + v + "'"); };
    const std::string& last = raw.back();
    switch (spec.kind) {
        case Kind::Path:
        case Kind::Text:
            return last;
        case Kind::List: {
            json arr = json::array();
            for (const auto& r : raw) {
                for (auto& item : split_commas(r)) {
                    arr.push_back(item);
                }
            }
            return arr;
        }
        case Kind::Int: {
            long long v = 0;
            auto res = std::from_chars(last.data(), last.data() + last.size(), v);
            if (res.ec != std::errc() || res.ptr != last.data() + last.size()) {
                throw bad(last);
            }
            return v;
        }
        case Kind::UInt64: {
            std::uint64_t v = 0;
            auto res = std::from_chars(last.data(), last.data() + last.size(), v);
            if (res.ec != std::errc() || res.ptr != last.data() + last.size()) {
                throw bad(last);
            }
            return v;
        }
        case Kind::Real:
            try {
                return parse_double(last);
            } catch (const Error&) {
                throw bad(last);
            }
        case Kind::Bool:
            if (last == "true" || last == "1") {
                return true;
            }
            if (last == "false" || last == "0") {
                return false;
            }
            throw bad(last);
        case Kind::Order: {
            json obj = json::object();
            for (const auto& r : raw) {
                auto eq = r.find('=');
                if (eq == std::string::npos || eq == 0) {
                    throw bad(r);
                }
                obj[r.substr(0, eq)] = split_commas(r.substr(eq + 1));
            }
            return obj;
        }
    }
    return nullptr;
}

inline std::string resolve_path(const std::string& p, const fs::path& base) {
    if (p.empty() || base.empty() || fs::path(p).is_absolute()) {
        return p;
    }
    return (base / p).lexically_normal().string();
}

/**
 * Config-file values win over flags; a flag that disagrees with the file draws a warning.
 * Relative paths in the file are taken from the file's directory.
 */
inline json merge_settings(const json& flags, const std::string& config_path, std::ostream& err) {
    json merged = json::object();
    if (!config_path.empty()) {
        const auto file = read_json_file(config_path);
        if (!file.is_object()) {
            throw Error(Errc::InvalidConfig, config_path + ": top level must be an object");
        }
        const auto base = fs::path(config_path).parent_path();
        for (const auto& [key, value] : file.items()) {
            const auto spec = std::find_if(audit_flags().begin(), audit_flags().end(), [&](const FlagSpec& s) { return key == s.key; });
            if (spec == audit_flags().end()) {
                throw Error(Errc::InvalidConfig, config_path + ": unknown key '" + key + "'");
            }
            if (spec->kind == Kind::Path && value.is_string()) {
                merged[key] = resolve_path(value.get<std::string>(), base.empty() ? fs::path(".") : base);
            } else if (spec->kind == Kind::List && value.is_string()) {
                merged[key] = json::array({value});
            } else {
                merged[key] = value;
            }
        }
    }
    for (const auto& [key, value] : flags.items()) {
        if (merged.contains(key)) {
            if (merged[key] != value) {
                err << "warning: --" << key << " differs from the config file; using the config file value\n";
            }
            continue;
        }
        merged[key] = value;
    }
    return merged;
}

template<typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) {
        return fallback;
    }
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw Error(Errc::InvalidConfig, std::string("'") + key + "' has the wrong type");
    }
}

inline void require_file(const std::string& path, const char* key, bool required) {
    if (path.empty()) {
        if (required) {
            throw Error(Errc::InvalidConfig, std::string("missing required input '") + key + "'");
        }
        return;
    }
    if (!fs::is_regular_file(path)) {
        throw Error(Errc::FileNotFound, path);
    }
}

}

/**
 * Validates and types the merged settings.
 */
inline RunConfig parse_run_config(const json& j, bool single) {
    RunConfig c;
    c.counts = detail::get_or<std::string>(j, "counts", "");
    c.labels = detail::get_or<std::string>(j, "labels", "");
    c.collection = detail::get_or<std::string>(j, "collection", "");
    c.alt_collection = detail::get_or<std::string>(j, "alt_collection", "");
    c.id_map = detail::get_or<std::string>(j, "id_map", "");
    c.lengths = detail::get_or<std::string>(j, "lengths", "");
    detail::require_file(c.counts, "counts", true);
    detail::require_file(c.labels, "labels", true);
    detail::require_file(c.collection, "collection", true);
    detail::require_file(c.alt_collection, "alt_collection", false);
    detail::require_file(c.id_map, "id_map", false);
    detail::require_file(c.lengths, "lengths", false);

    if (!j.contains("engine")) {
        throw Error(Errc::InvalidConfig, "no engine given");
    }
    for (const auto& e : detail::get_or<std::vector<std::string>>(j, "engine", {})) {
        c.engines.push_back(parse_engine(e));
    }
    for (const auto& g : detail::get_or<std::vector<std::string>>(j, "goal", {"max-degs"})) {
        c.goals.push_back(parse_goal(g));
    }
    c.targets = detail::get_or<std::vector<std::string>>(j, "target_set", {});
    const bool targeted = std::any_of(c.goals.begin(), c.goals.end(), [](Goal::Kind k) { return k != Goal::Kind::MaxDegs; });
    if (targeted && c.targets.empty()) {
        throw Error(Errc::InvalidConfig, "goals min-adjp and min-relrank need --target-set");
    }
    if (!targeted && !c.targets.empty()) {
        throw Error(Errc::InvalidConfig, "--target-set is only used by goals min-adjp and min-relrank");
    }

    auto non_negative = [&](const char* key, long long fallback) {
        const auto v = detail::get_or<long long>(j, key, fallback);
        if (v < 0) {
            throw Error(Errc::InvalidConfig, std::string("'") + key + "' must not be negative");
        }
        return v;
    };
    auto positive = [&](const char* key, long long fallback) {
        const auto v = detail::get_or<long long>(j, key, fallback);
        if (v < 1) {
            throw Error(Errc::InvalidConfig, std::string("'") + key + "' must be at least 1");
        }
        return v;
    };
    c.permutations = static_cast<std::size_t>(non_negative("permutations", 10));
    c.include_true_labels = detail::get_or<bool>(j, "include_true_labels", true);
    c.min_hamming = static_cast<std::size_t>(non_negative("min_hamming", 0));
    if (!j.contains("seed")) {
        throw Error(Errc::InvalidConfig, "a seed is required (--seed)");
    }
    c.seed = detail::get_or<std::uint64_t>(j, "seed", 0);
    c.engine.permutations = static_cast<int>(positive("engine_permutations", 1000));
    c.engine.resamples = static_cast<int>(positive("resamples", 1000));
    c.engine.de_alpha = detail::get_or<double>(j, "de_alpha", 0.05);
    if (!(c.engine.de_alpha > 0 && c.engine.de_alpha < 1)) {
        throw Error(Errc::InvalidConfig, "'de_alpha' must lie in (0, 1)");
    }
    c.engine.ease = detail::get_or<bool>(j, "ease", false);
    c.engine.min_size = static_cast<std::size_t>(positive("min_size", 5));
    c.engine.max_size = static_cast<std::size_t>(positive("max_size", 500));
    if (c.engine.min_size > c.engine.max_size) {
        throw Error(Errc::InvalidConfig, "'min_size' exceeds 'max_size'");
    }
    for (const auto& [engine, ids] : detail::get_or<std::map<std::string, std::vector<std::string>>>(j, "choice_order", {})) {
        c.choice_order[parse_engine(engine)] = ids;
    }

    if (j.contains("threads")) {
        c.threads = static_cast<int>(positive("threads", 1));
    } else if (const char* env = std::getenv("AUDIT_THREADS"); env && *env) {
        int v = 0;
        std::string_view s(env);
        auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size() || v < 1) {
            throw Error(Errc::InvalidConfig, "AUDIT_THREADS must be a positive integer");
        }
        c.threads = v;
    }
    c.out = detail::get_or<std::string>(j, "out", "");
    if (c.out.empty()) {
        throw Error(Errc::InvalidConfig, "an output directory is required (--out)");
    }
    c.labeling = detail::get_or<std::string>(j, "labeling", "true");
    c.dump_dir = detail::get_or<std::string>(j, "dump_dir", "");

    if (single) {
        if (c.engines.size() != 1 || c.goals.size() != 1 || c.targets.size() > 1) {
            throw Error(Errc::InvalidConfig, "audit run takes exactly one engine, one goal and at most one target set");
        }
        if (c.labeling != "true") {
            std::size_t k = 0;
            const bool ok = c.labeling.rfind("perm-", 0) == 0 && c.labeling.size() > 5 &&
                            std::from_chars(c.labeling.data() + 5, c.labeling.data() + c.labeling.size(), k).ptr == c.labeling.data() + c.labeling.size();
            if (!ok || k < 1) {
                throw Error(Errc::InvalidConfig, "--labeling must be 'true' or 'perm-<k>' with k >= 1");
            }
        }
    } else if (j.contains("labeling") || j.contains("dump_dir")) {
        throw Error(Errc::InvalidConfig, "--labeling and --dump-dir apply to audit run only");
    }
    return c;
}

inline PipelineInputs load_inputs(const RunConfig& c) {
    PipelineInputs in;
    in.counts = parse_count_matrix(fs::path(c.counts));
    if (!c.lengths.empty()) {
        in.counts = attach_lengths(in.counts, fs::path(c.lengths));
    }
    in.labels = parse_labels(fs::path(c.labels), in.counts);
    in.primary = parse_gene_sets(fs::path(c.collection));
    if (!c.alt_collection.empty()) {
        in.alternative = parse_gene_sets(fs::path(c.alt_collection));
    }
    if (!c.id_map.empty()) {
        in.id_map = parse_id_map(fs::path(c.id_map));
    }
    return in;
}

inline StudyConfig study_config(const RunConfig& c, bool single) {
    StudyConfig s;
    s.engines = c.engines;
    s.goals = c.goals;
    s.targets = c.targets;
    s.permutations = c.permutations;
    s.include_true_labels = c.include_true_labels;
    s.min_hamming = c.min_hamming;
    s.engine = c.engine;
    s.choice_order = c.choice_order;
    s.num_threads = c.threads;
    if (single) {
        if (c.labeling == "true") {
            s.permutations = 0;
            s.include_true_labels = true;
            s.only_labelings = {0};
        } else {
            const auto k = std::stoul(c.labeling.substr(5));
            s.permutations = k;
            s.include_true_labels = false;
            s.only_labelings = {k};
        }
    }
    return s;
}

inline json inputs_meta(const RunConfig& c) {
    json j = json::object();
    auto add = [&](const char* key, const std::string& v) {
        if (!v.empty()) {
            j[key] = v;
        }
    };
    add("counts", c.counts);
    add("labels", c.labels);
    add("collection", c.collection);
    add("alt_collection", c.alt_collection);
    add("id_map", c.id_map);
    add("lengths", c.lengths);
    return json{{"inputs", j}};
}

/**
 * Writes `report.json`, `summary.csv`, one trace file per setting and `plot_data.csv` into `dir`.
 */
inline void write_artifacts(const fs::path& dir, const StudyReport& report, const json& extra_meta) {
    fs::create_directories(dir);
    write_json_file(dir / "report.json", to_json(report, extra_meta));
    {
        auto out = open_output(dir / "summary.csv");
        write_summary_csv(out, report.summary);
    }
    for (const auto& rec : report.records) {
        write_json_file(dir / rec.trace_file, trace_document(report, rec, extra_meta));
    }
    auto out = open_output(dir / "plot_data.csv");
    write_plot_csv(out, report.records.empty() ? std::vector<PlotRow>{} : plot_data(report));
}

inline void dump_final(const RunConfig& c, const PipelineInputs& in, const StudyReport& report, const StudyConfig& sc) {
    const auto& rec = report.records.front();
    auto labelings = std::vector<Labeling>{Labeling{0, in.labels}};
    if (rec.labeling != 0) {
        labelings = generate_permutations(in.labels, rec.labeling, report.seed, sc.min_hamming);
    }
    const auto& lab = labelings.back();
    PipelineDump dump;
    const auto table = run_pipeline(in, lab.labels, rec.engine, rec.trace.final_config, c.engine, rec.seed, &dump);
    const fs::path dir = c.dump_dir;
    fs::create_directories(dir);
    {
        auto out = open_output(dir / "enrichment.tsv");
        write_enrichment_tsv(out, table);
    }
    write_json_file(dir / "enrichment.json", to_json(table));
    if (dump.de) {
        auto out = open_output(dir / "de.tsv");
        write_de_tsv(out, *dump.de);
    }
    if (dump.ranked) {
        auto out = open_output(dir / "ranked.tsv");
        write_ranked_tsv(out, *dump.ranked);
    }
    if (dump.transformed) {
        auto out = open_output(dir / "transformed.tsv");
        write_transformed_tsv(out, *dump.transformed);
    }
}

inline int report_error(const Error& e, std::ostream& err) {
    err << "error: " << e.what() << '\n';
    return is_validation_error(e.code()) ? 2 : 1;
}

/**
 * Entry point shared by the executable and the tests. Exit status 0 on success, 2 on invalid input or
 * arguments, 1 on runtime failure.
 */
inline int main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Audit gene set analysis results for over-optimism", "gsaudit"};
    app.set_version_flag("--version", std::string(version));
    app.require_subcommand(1);

    auto* audit = app.add_subcommand("audit", "Optimise analysis choices for one setting or a grid");
    audit->require_subcommand(1);
    auto* run = audit->add_subcommand("run", "One setting");
    auto* grid = audit->add_subcommand("grid", "Every goal, engine, labeling and target combination");

    std::map<std::string, std::vector<std::string>> raw;
    std::string config_path;
    for (auto* sub : {run, grid}) {
        sub->add_option("--config", config_path, "JSON file with the same keys as the flags (underscores for dashes)");
        for (const auto& spec : detail::audit_flags()) {
            sub->add_option(spec.flag, raw[spec.key], spec.help)->take_all();
        }
    }

    auto* simulate_cmd = app.add_subcommand("simulate", "Write a synthetic data set");
    SimSpec spec;
    std::string samples = "10,10", out_dir, sets_path;
    std::optional<std::uint64_t> sim_seed;
    std::size_t random_sets = 0, alt_random_sets = 0, set_min = 10, set_max = 50;
    bool no_lengths = false;
    simulate_cmd->add_option("--genes", spec.genes, "Number of genes");
    simulate_cmd->add_option("--samples", samples, "Samples per group, as n0,n1");
    simulate_cmd->add_option("--base-mean", spec.base_mean, "Base mean count");
    simulate_cmd->add_option("--dispersion", spec.dispersion, "Negative-binomial dispersion");
    simulate_cmd->add_option("--correlation", spec.within_set_correlation, "Within-set correlation");
    simulate_cmd->add_option("--de-fraction", spec.de_fraction, "Fraction of DE genes");
    simulate_cmd->add_option("--lfc", spec.lfc, "log2 fold change of DE genes");
    simulate_cmd->add_option("--seed", sim_seed, "Seed");
    simulate_cmd->add_option("--out", out_dir, "Output directory");
    simulate_cmd->add_option("--sets", sets_path, "Gene set collection over the simulated gene ids");
    simulate_cmd->add_option("--random-sets", random_sets, "Number of random sets to generate");
    simulate_cmd->add_option("--alt-random-sets", alt_random_sets, "Number of random sets in an alternative collection");
    simulate_cmd->add_option("--set-min", set_min, "Smallest random set");
    simulate_cmd->add_option("--set-max", set_max, "Largest random set");
    simulate_cmd->add_flag("--no-lengths", no_lengths, "Do not write transcript lengths");

    auto* report_cmd = app.add_subcommand("report", "Post-process a report");
    report_cmd->require_subcommand(1);
    auto* plot_cmd = report_cmd->add_subcommand("plot-data", "Paired default and optimised values as CSV");
    std::string report_path, plot_out;
    plot_cmd->add_option("--report", report_path, "report.json")->required();
    plot_cmd->add_option("--out", plot_out, "Output CSV (standard output when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << version << '\n';
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (run->parsed() || grid->parsed()) {
            const bool single = run->parsed();
            json flags = json::object();
            for (const auto& spec : detail::audit_flags()) {
                const auto& values = raw[spec.key];
                if (!values.empty()) {
                    flags[spec.key] = detail::parse_value(spec, values);
                }
            }
            const auto merged = detail::merge_settings(flags, config_path, err);
            const auto cfg = parse_run_config(merged, single);
            const auto inputs = load_inputs(cfg);
            const auto sc = study_config(cfg, single);
            const auto report = run_grid(sc, inputs, cfg.seed);
            write_artifacts(cfg.out, report, inputs_meta(cfg));
            if (single && !cfg.dump_dir.empty()) {
                dump_final(cfg, inputs, report, sc);
            }
            std::size_t failed = 0;
            for (const auto& r : report.records) {
                failed += r.failed;
            }
            out << report.records.size() << " setting(s) written to " << cfg.out;
            if (failed) {
                out << ", " << failed << " failed";
            }
            out << '\n';
            return 0;
        }

        if (simulate_cmd->parsed()) {
            if (!sim_seed) {
                throw Error(Errc::InvalidSpec, "a seed is required (--seed)");
            }
            if (out_dir.empty()) {
                throw Error(Errc::InvalidSpec, "an output directory is required (--out)");
            }
            spec.seed = *sim_seed;
            spec.lengths = !no_lengths;
            const auto parts = detail::split_commas(samples);
            std::size_t n0 = 0, n1 = 0;
            if (parts.size() != 2 || std::from_chars(parts[0].data(), parts[0].data() + parts[0].size(), n0).ptr != parts[0].data() + parts[0].size() ||
                std::from_chars(parts[1].data(), parts[1].data() + parts[1].size(), n1).ptr != parts[1].data() + parts[1].size()) {
                throw Error(Errc::InvalidSpec, "--samples must be two integers n0,n1");
            }
            spec.samples = {n0, n1};
            if (!sets_path.empty() && random_sets > 0) {
                throw Error(Errc::InvalidSpec, "--sets and --random-sets are mutually exclusive");
            }
            spec.validate();
            std::optional<GeneSetCollection> sets, alt;
            if (!sets_path.empty()) {
                sets = parse_gene_sets(fs::path(sets_path));
            } else if (random_sets > 0) {
                sets = random_collection(simulated_gene_ids(spec.genes), random_sets, spec.seed, set_min, set_max, "collection");
            }
            if (alt_random_sets > 0) {
                alt = random_collection(simulated_gene_ids(spec.genes), alt_random_sets, spec.seed, set_min, set_max, "alt_collection");
            }
            const auto sim = simulate(spec, sets ? &*sets : nullptr);
            const fs::path dir = out_dir;
            fs::create_directories(dir);
            {
                auto o = open_output(dir / "counts.tsv");
                write_count_matrix(o, sim.counts);
            }
            {
                auto o = open_output(dir / "labels.tsv");
                write_labels(o, sim.counts, sim.labels);
            }
            if (sets) {
                auto o = open_output(dir / "collection.tsv");
                write_gene_sets(o, *sets);
            }
            if (alt) {
                auto o = open_output(dir / "alt_collection.tsv");
                write_gene_sets(o, *alt);
            }
            write_json_file(dir / "truth.json", truth_json(spec, sim.truth));
            out << "simulated " << spec.genes << " genes x " << (n0 + n1) << " samples into " << out_dir << '\n';
            return 0;
        }

        if (plot_cmd->parsed()) {
            const auto report = report_from_json(read_json_file(report_path));
            const auto rows = plot_data(report);
            if (plot_out.empty()) {
                write_plot_csv(out, rows);
            } else {
                auto o = open_output(plot_out);
                write_plot_csv(o, rows);
            }
            return 0;
        }
    } catch (const Error& e) {
        return report_error(e, err);
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const json::exception& e) {
        err << "error: malformed document: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

}

#endif
