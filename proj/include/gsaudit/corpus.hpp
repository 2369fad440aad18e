#ifndef GSAUDIT_CORPUS_HPP
#define GSAUDIT_CORPUS_HPP

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "error.hpp"

/**
 * @file corpus.hpp
 * @brief Input data model and the tab-separated parsers that populate it.
 */

namespace gsaudit {

namespace detail {

inline std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find('\t', start);
        if (pos == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

inline void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
}

inline std::optional<std::int64_t> parse_int(std::string_view token) {
    std::int64_t value = 0;
    if (token.empty()) {
        return std::nullopt;
    }
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
        return std::nullopt;
    }
    return value;
}

inline std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(Errc::FileNotFound, path.string());
    }
    return in;
}

}

/**
 * Dense genes-by-samples matrix of non-negative integer counts, stored row-major,
 * with optional per-gene lengths in base pairs.
 */
class CountMatrix {
public:
    CountMatrix() = default;

    /**
     * @param gene_ids Unique gene identifiers, one per row.
     * @param samples Unique sample names, one per column.
     * @param counts Row-major counts of length `gene_ids.size() * samples.size()`.
     * @param lengths Optional per-gene lengths, each at least 1.
     */
    CountMatrix(std::vector<std::string> gene_ids, std::vector<std::string> samples, std::vector<std::int64_t> counts,
                std::optional<std::vector<std::int64_t>> lengths = std::nullopt)
        : my_gene_ids(std::move(gene_ids)), my_samples(std::move(samples)), my_counts(std::move(counts)), my_lengths(std::move(lengths))
    {
        if (my_counts.size() != my_gene_ids.size() * my_samples.size()) {
            throw Error(Errc::RaggedRow, "count vector does not match matrix dimensions");
        }
        std::unordered_set<std::string_view> seen;
        for (const auto& id : my_gene_ids) {
            if (!seen.insert(id).second) {
                throw Error(Errc::DuplicateGeneId, id);
            }
        }
        seen.clear();
        for (const auto& s : my_samples) {
            if (!seen.insert(s).second) {
                throw Error(Errc::DuplicateSample, s);
            }
        }
        const std::size_t ns = my_samples.size();
        for (std::size_t i = 0; i < my_counts.size(); ++i) {
            if (my_counts[i] < 0) {
                throw Error(Errc::MalformedCell, "row " + std::to_string(i / ns + 1) + ", column " + std::to_string(i % ns + 2));
            }
        }
        if (my_lengths) {
            if (my_lengths->size() != my_gene_ids.size()) {
                throw Error(Errc::RaggedRow, "length vector does not match gene count");
            }
            for (std::size_t g = 0; g < my_lengths->size(); ++g) {
                if ((*my_lengths)[g] < 1) {
                    throw Error(Errc::MalformedCell, "row " + std::to_string(g + 1) + ", length column");
                }
            }
        }
    }

    std::size_t num_genes() const { return my_gene_ids.size(); }
    std::size_t num_samples() const { return my_samples.size(); }

    const std::vector<std::string>& gene_ids() const { return my_gene_ids; }
    const std::vector<std::string>& samples() const { return my_samples; }
    const std::vector<std::int64_t>& counts() const { return my_counts; }
    const std::optional<std::vector<std::int64_t>>& lengths() const { return my_lengths; }
    bool has_lengths() const { return my_lengths.has_value(); }

    std::int64_t at(std::size_t gene, std::size_t sample) const { return my_counts[gene * my_samples.size() + sample]; }

    std::span<const std::int64_t> row(std::size_t gene) const {
        return std::span<const std::int64_t>(my_counts).subspan(gene * my_samples.size(), my_samples.size());
    }

    std::int64_t row_sum(std::size_t gene) const {
        std::int64_t total = 0;
        for (auto c : row(gene)) {
            total += c;
        }
        return total;
    }

    std::vector<std::int64_t> library_sizes() const {
        std::vector<std::int64_t> sizes(my_samples.size());
        for (std::size_t g = 0; g < my_gene_ids.size(); ++g) {
            auto r = row(g);
            for (std::size_t s = 0; s < r.size(); ++s) {
                sizes[s] += r[s];
            }
        }
        return sizes;
    }

    /**
     * Sub-matrix of the given rows, in the given order.
     */
    CountMatrix select_rows(std::span<const std::size_t> rows) const {
        std::vector<std::string> ids;
        std::vector<std::int64_t> values;
        std::optional<std::vector<std::int64_t>> lens;
        ids.reserve(rows.size());
        values.reserve(rows.size() * my_samples.size());
        if (my_lengths) {
            lens.emplace();
        }
        for (auto g : rows) {
            ids.push_back(my_gene_ids[g]);
            auto r = row(g);
            values.insert(values.end(), r.begin(), r.end());
            if (lens) {
                lens->push_back((*my_lengths)[g]);
            }
        }
        return CountMatrix(std::move(ids), my_samples, std::move(values), std::move(lens));
    }

    bool operator==(const CountMatrix&) const = default;

private:
    std::vector<std::string> my_gene_ids;
    std::vector<std::string> my_samples;
    std::vector<std::int64_t> my_counts;
    std::optional<std::vector<std::int64_t>> my_lengths;
};

/**
 * Binary condition assignment aligned to the samples of a `CountMatrix`.
 * Level 0 is the lexicographically smaller label token.
 */
class ConditionLabels {
public:
    ConditionLabels() = default;

    ConditionLabels(std::array<std::string, 2> levels, std::vector<int> groups) : my_levels(std::move(levels)), my_groups(std::move(groups)) {
        if (my_levels[0] == my_levels[1]) {
            throw Error(Errc::EmptyGroup, "both levels are '" + my_levels[0] + "'");
        }
        for (auto g : my_groups) {
            if (g != 0 && g != 1) {
                throw Error(Errc::TooManyConditions, "group index " + std::to_string(g));
            }
        }
        auto sizes = group_sizes();
        if (sizes[0] == 0 || sizes[1] == 0) {
            throw Error(Errc::EmptyGroup, "level '" + my_levels[sizes[0] == 0 ? 0 : 1] + "' has no samples");
        }
    }

    /**
     * Builds labels from one token per sample.
     */
    static ConditionLabels from_tokens(const std::vector<std::string>& tokens) {
        std::vector<std::string> distinct(tokens.begin(), tokens.end());
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        if (distinct.size() > 2) {
            throw Error(Errc::TooManyConditions, std::to_string(distinct.size()) + " distinct labels");
        }
        if (distinct.size() < 2) {
            throw Error(Errc::EmptyGroup, "only one distinct label");
        }
        std::vector<int> groups;
        groups.reserve(tokens.size());
        for (const auto& t : tokens) {
            groups.push_back(t == distinct[0] ? 0 : 1);
        }
        return ConditionLabels({distinct[0], distinct[1]}, std::move(groups));
    }

    std::size_t size() const { return my_groups.size(); }
    const std::vector<int>& groups() const { return my_groups; }
    const std::array<std::string, 2>& levels() const { return my_levels; }
    int group(std::size_t sample) const { return my_groups[sample]; }
    const std::string& label(std::size_t sample) const { return my_levels[my_groups[sample]]; }

    std::array<std::size_t, 2> group_sizes() const {
        std::array<std::size_t, 2> sizes{0, 0};
        for (auto g : my_groups) {
            ++sizes[g];
        }
        return sizes;
    }

    /**
     * Same levels with a different assignment, e.g. a permutation.
     */
    ConditionLabels with_groups(std::vector<int> groups) const { return ConditionLabels(my_levels, std::move(groups)); }

    bool operator==(const ConditionLabels&) const = default;

private:
    std::array<std::string, 2> my_levels;
    std::vector<int> my_groups;
};

struct GeneSet {
    std::string name;
    std::string description;
    /** Distinct members in first-occurrence order. */
    std::vector<std::string> members;

    bool operator==(const GeneSet&) const = default;
};

/**
 * Named gene sets with unique, non-empty entries.
 */
class GeneSetCollection {
public:
    GeneSetCollection() = default;

    GeneSetCollection(std::string name, std::vector<GeneSet> sets) : my_name(std::move(name)), my_sets(std::move(sets)) {
        for (std::size_t i = 0; i < my_sets.size(); ++i) {
            if (my_sets[i].members.empty()) {
                throw Error(Errc::MalformedLine, "set '" + my_sets[i].name + "' has no members");
            }
            if (!my_index.emplace(my_sets[i].name, i).second) {
                throw Error(Errc::DuplicateSetName, my_sets[i].name);
            }
        }
    }

    const std::string& name() const { return my_name; }
    const std::vector<GeneSet>& sets() const { return my_sets; }
    std::size_t size() const { return my_sets.size(); }
    bool empty() const { return my_sets.empty(); }

    const GeneSet* find(std::string_view set_name) const {
        auto it = my_index.find(std::string(set_name));
        return it == my_index.end() ? nullptr : &my_sets[it->second];
    }

    bool operator==(const GeneSetCollection& other) const { return my_name == other.my_name && my_sets == other.my_sets; }

private:
    std::string my_name;
    std::vector<GeneSet> my_sets;
    std::map<std::string, std::size_t> my_index;
};

/**
 * Source-to-target gene identifier mapping. Targets may repeat; an empty map means identity.
 */
class IdMap {
public:
    IdMap() = default;

    explicit IdMap(std::vector<std::pair<std::string, std::string>> entries) : my_entries(std::move(entries)) {
        for (std::size_t i = 0; i < my_entries.size(); ++i) {
            if (!my_lookup.emplace(my_entries[i].first, i).second) {
                throw Error(Errc::DuplicateSource, my_entries[i].first);
            }
        }
    }

    bool empty() const { return my_entries.empty(); }
    std::size_t size() const { return my_entries.size(); }
    const std::vector<std::pair<std::string, std::string>>& entries() const { return my_entries; }

    /**
     * Position of `source` in file order, if mapped.
     */
    std::optional<std::size_t> position(std::string_view source) const {
        auto it = my_lookup.find(std::string(source));
        if (it == my_lookup.end()) {
            return std::nullopt;
        }
        return it->second;
    }

    const std::string* target(std::string_view source) const {
        auto pos = position(source);
        return pos ? &my_entries[*pos].second : nullptr;
    }

    /**
     * Number of targets reached by more than one source.
     */
    std::size_t duplicated_targets() const {
        std::map<std::string_view, std::size_t> hits;
        for (const auto& e : my_entries) {
            ++hits[e.second];
        }
        return std::count_if(hits.begin(), hits.end(), [](const auto& h) { return h.second > 1; });
    }

private:
    std::vector<std::pair<std::string, std::string>> my_entries;
    std::unordered_map<std::string, std::size_t> my_lookup;
};

/**
 * Parses a count matrix with header `gene_id<TAB>s1<TAB>...[<TAB>length]`.
 * Blank lines are skipped; row and column numbers in errors are 1-based file positions.
 */
inline CountMatrix parse_count_matrix(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> samples;
    bool has_length = false;

    while (std::getline(in, line)) {
        ++line_no;
        detail::strip_cr(line);
        if (!line.empty()) {
            break;
        }
    }
    if (line.empty()) {
        throw Error(Errc::RaggedRow, "missing header row");
    }
    {
        auto fields = detail::split_tabs(line);
        if (fields.size() < 2) {
            throw Error(Errc::RaggedRow, "row " + std::to_string(line_no) + ": header lists no samples");
        }
        std::size_t last = fields.size();
        if (fields.back() == "length") {
            has_length = true;
            --last;
        }
        for (std::size_t i = 1; i < last; ++i) {
            samples.emplace_back(fields[i]);
        }
    }

    const std::size_t expected = 1 + samples.size() + (has_length ? 1 : 0);
    std::vector<std::string> ids;
    std::vector<std::int64_t> counts;
    std::vector<std::int64_t> lengths;
    std::unordered_set<std::string> seen;

    while (std::getline(in, line)) {
        ++line_no;
        detail::strip_cr(line);
        if (line.empty()) {
            continue;
        }
        auto fields = detail::split_tabs(line);
        if (fields.size() != expected) {
            throw Error(Errc::RaggedRow, "row " + std::to_string(line_no) + ": expected " + std::to_string(expected) + " fields, got " + std::to_string(fields.size()));
        }
        std::string id(fields[0]);
        if (!seen.insert(id).second) {
            throw Error(Errc::DuplicateGeneId, id + " (row " + std::to_string(line_no) + ")");
        }
        for (std::size_t s = 0; s < samples.size(); ++s) {
            auto value = detail::parse_int(fields[s + 1]);
            if (!value || *value < 0) {
                throw Error(Errc::MalformedCell, "row " + std::to_string(line_no) + ", column " + std::to_string(s + 2));
            }
            counts.push_back(*value);
        }
        if (has_length) {
            auto value = detail::parse_int(fields.back());
            if (!value || *value < 1) {
                throw Error(Errc::MalformedCell, "row " + std::to_string(line_no) + ", column " + std::to_string(expected));
            }
            lengths.push_back(*value);
        }
        ids.push_back(std::move(id));
    }

    std::optional<std::vector<std::int64_t>> lens;
    if (has_length) {
        lens = std::move(lengths);
    }
    return CountMatrix(std::move(ids), std::move(samples), std::move(counts), std::move(lens));
}

inline CountMatrix parse_count_matrix(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    return parse_count_matrix(in);
}

inline void write_count_matrix(std::ostream& out, const CountMatrix& matrix) {
    out << "gene_id";
    for (const auto& s : matrix.samples()) {
        out << '\t' << s;
    }
    if (matrix.has_lengths()) {
        out << "\tlength";
    }
    out << '\n';
    for (std::size_t g = 0; g < matrix.num_genes(); ++g) {
        out << matrix.gene_ids()[g];
        for (auto c : matrix.row(g)) {
            out << '\t' << c;
        }
        if (matrix.has_lengths()) {
            out << '\t' << (*matrix.lengths())[g];
        }
        out << '\n';
    }
}

/**
 * Parses `sample_id<TAB>label` rows (an optional `sample_id<TAB>label` header is skipped)
 * and aligns them to the sample order of `matrix`. Rows for samples absent from the matrix are ignored.
 */
inline ConditionLabels parse_labels(std::istream& in, const CountMatrix& matrix) {
    std::unordered_map<std::string, std::string> by_sample;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        detail::strip_cr(line);
        if (line.empty()) {
            continue;
        }
        auto fields = detail::split_tabs(line);
        if (fields.size() < 2) {
            throw Error(Errc::MalformedLine, "labels line " + std::to_string(line_no));
        }
        if (line_no == 1 && fields[0] == "sample_id" && fields[1] == "label") {
            continue;
        }
        std::string sample(fields[0]);
        std::string label(fields[1]);
        auto [it, inserted] = by_sample.emplace(sample, label);
        if (!inserted && it->second != label) {
            throw Error(Errc::DuplicateSample, sample + " has conflicting labels");
        }
    }

    std::vector<std::string> tokens;
    tokens.reserve(matrix.num_samples());
    for (const auto& s : matrix.samples()) {
        auto it = by_sample.find(s);
        if (it == by_sample.end()) {
            throw Error(Errc::MissingLabel, s);
        }
        tokens.push_back(it->second);
    }
    return ConditionLabels::from_tokens(tokens);
}

inline ConditionLabels parse_labels(const std::filesystem::path& path, const CountMatrix& matrix) {
    auto in = detail::open_input(path);
    return parse_labels(in, matrix);
}

inline void write_labels(std::ostream& out, const CountMatrix& matrix, const ConditionLabels& labels) {
    out << "sample_id\tlabel\n";
    for (std::size_t s = 0; s < matrix.num_samples(); ++s) {
        out << matrix.samples()[s] << '\t' << labels.label(s) << '\n';
    }
}

/**
 * Parses one set per line: `name<TAB>description<TAB>member...`.
 * Duplicate members are collapsed and empty member fields ignored.
 */
inline GeneSetCollection parse_gene_sets(std::istream& in, std::string collection_name) {
    std::vector<GeneSet> sets;
    std::unordered_set<std::string> names;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        detail::strip_cr(line);
        if (line.empty()) {
            continue;
        }
        auto fields = detail::split_tabs(line);
        if (fields.size() < 3) {
            throw Error(Errc::MalformedLine, "gene set line " + std::to_string(line_no) + " has fewer than 3 fields");
        }
        GeneSet set;
        set.name = std::string(fields[0]);
        set.description = std::string(fields[1]);
        if (!names.insert(set.name).second) {
            throw Error(Errc::DuplicateSetName, set.name);
        }
        std::unordered_set<std::string_view> members;
        for (std::size_t i = 2; i < fields.size(); ++i) {
            if (!fields[i].empty() && members.insert(fields[i]).second) {
                set.members.emplace_back(fields[i]);
            }
        }
        if (set.members.empty()) {
            throw Error(Errc::MalformedLine, "gene set line " + std::to_string(line_no) + " has no members");
        }
        sets.push_back(std::move(set));
    }
    return GeneSetCollection(std::move(collection_name), std::move(sets));
}

inline GeneSetCollection parse_gene_sets(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    return parse_gene_sets(in, path.stem().string());
}

inline void write_gene_sets(std::ostream& out, const GeneSetCollection& collection) {
    for (const auto& set : collection.sets()) {
        out << set.name << '\t' << set.description;
        for (const auto& m : set.members) {
            out << '\t' << m;
        }
        out << '\n';
    }
}

/**
 * Parses `source_id<TAB>target_id` rows, retaining file order.
 */
inline IdMap parse_id_map(std::istream& in) {
    std::vector<std::pair<std::string, std::string>> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        detail::strip_cr(line);
        if (line.empty()) {
            continue;
        }
        auto fields = detail::split_tabs(line);
        if (fields.size() < 2 || fields[0].empty() || fields[1].empty()) {
            throw Error(Errc::MalformedLine, "id map line " + std::to_string(line_no));
        }
        entries.emplace_back(std::string(fields[0]), std::string(fields[1]));
    }
    return IdMap(std::move(entries));
}

inline IdMap parse_id_map(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    return parse_id_map(in);
}

/**
 * Parses `gene_id<TAB>length` rows and attaches them to `matrix`.
 * Every gene of the matrix must receive a length.
 */
inline CountMatrix attach_lengths(const CountMatrix& matrix, std::istream& in) {
    std::unordered_map<std::string, std::int64_t> lookup;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        detail::strip_cr(line);
        if (line.empty()) {
            continue;
        }
        auto fields = detail::split_tabs(line);
        if (fields.size() < 2) {
            throw Error(Errc::MalformedLine, "lengths line " + std::to_string(line_no));
        }
        auto value = detail::parse_int(fields[1]);
        if (!value || *value < 1) {
            if (line_no == 1) {
                continue; // header
            }
            throw Error(Errc::MalformedCell, "lengths row " + std::to_string(line_no) + ", column 2");
        }
        lookup[std::string(fields[0])] = *value;
    }
    std::vector<std::int64_t> lengths;
    lengths.reserve(matrix.num_genes());
    for (const auto& id : matrix.gene_ids()) {
        auto it = lookup.find(id);
        if (it == lookup.end()) {
            throw Error(Errc::MalformedLine, "no length for gene " + id);
        }
        lengths.push_back(it->second);
    }
    return CountMatrix(matrix.gene_ids(), matrix.samples(), matrix.counts(), std::move(lengths));
}

inline CountMatrix attach_lengths(const CountMatrix& matrix, const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    return attach_lengths(matrix, in);
}

}

#endif
