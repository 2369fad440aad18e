#ifndef GSAUDIT_PREPROCESS_HPP
#define GSAUDIT_PREPROCESS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "corpus.hpp"
#include "error.hpp"
#include "stats.hpp"

/**
 * @file preprocess.hpp
 * @brief Pre-filtering, duplicate-identifier collapse, normalisation and transformation of count matrices.
 */

namespace gsaudit {

/**
 * Rule deciding which lowly expressed genes are removed.
 */
struct PrefilterRule {
    enum class Kind {
        /** Keep genes whose total count is at least `threshold`. */
        TotalAtLeast,
        /** Keep genes with CPM of at least `cpm_cutoff` in at least `min_samples` samples. */
        CpmInSamples,
        /**
         * Keep genes with CPM of at least `10e6 / median(library size)` in at least `min(group sizes)` samples
         * and a total count of at least 15.
         */
        ExprFilter
    };

    Kind kind = Kind::TotalAtLeast;
    std::int64_t threshold = 10;
    double cpm_cutoff = 1;
    int min_samples = 2;

    static PrefilterRule total_at_least(std::int64_t threshold) {
        if (threshold < 0) {
            throw Error(Errc::InvalidRule, "negative count threshold");
        }
        return PrefilterRule{Kind::TotalAtLeast, threshold, 1, 2};
    }

    static PrefilterRule cpm_in_samples(double cutoff, int min_samples) {
        if (!(cutoff > 0) || min_samples < 1) {
            throw Error(Errc::InvalidRule, "CPM rule needs cutoff > 0 and at least one sample");
        }
        return PrefilterRule{Kind::CpmInSamples, 0, cutoff, min_samples};
    }

    static PrefilterRule expr_filter() { return PrefilterRule{Kind::ExprFilter, 15, 10, 1}; }

    bool operator==(const PrefilterRule&) const = default;
};

enum class DuplicatePolicy { KeepFirst, RoundedMean };

enum class TransformMethod { LogCpm, ShiftedLogVst };

inline constexpr std::string_view transform_name(TransformMethod method) {
    return method == TransformMethod::LogCpm ? "log-cpm" : "shifted-log-vst";
}

/**
 * Continuous expression values on a log scale, row-major genes by samples.
 */
struct TransformedMatrix {
    std::vector<std::string> gene_ids;
    std::vector<std::string> samples;
    std::vector<double> values;
    TransformMethod method = TransformMethod::LogCpm;

    std::size_t num_genes() const { return gene_ids.size(); }
    std::size_t num_samples() const { return samples.size(); }
    double at(std::size_t g, std::size_t s) const { return values[g * samples.size() + s]; }
    std::span<const double> row(std::size_t g) const { return std::span<const double>(values).subspan(g * samples.size(), samples.size()); }
};

/**
 * Counts per million, row-major. Throws `ZeroLibrary` if any sample has no counts.
 */
inline std::vector<double> cpm(const CountMatrix& matrix) {
    auto libs = matrix.library_sizes();
    for (std::size_t s = 0; s < libs.size(); ++s) {
        if (libs[s] <= 0) {
            throw Error(Errc::ZeroLibrary, matrix.samples()[s]);
        }
    }
    const std::size_t ns = matrix.num_samples();
    std::vector<double> out(matrix.counts().size());
    for (std::size_t g = 0; g < matrix.num_genes(); ++g) {
        for (std::size_t s = 0; s < ns; ++s) {
            out[g * ns + s] = static_cast<double>(matrix.at(g, s)) * 1e6 / static_cast<double>(libs[s]);
        }
    }
    return out;
}

/**
 * Removes genes failing `rule`, preserving row order. `labels` is only consulted by `ExprFilter`.
 */
inline CountMatrix prefilter(const CountMatrix& matrix, const PrefilterRule& rule, const ConditionLabels& labels) {
    std::vector<std::size_t> keep;
    const std::size_t ns = matrix.num_samples();

    switch (rule.kind) {
        case PrefilterRule::Kind::TotalAtLeast:
            for (std::size_t g = 0; g < matrix.num_genes(); ++g) {
                if (matrix.row_sum(g) >= rule.threshold) {
                    keep.push_back(g);
                }
            }
            break;

        case PrefilterRule::Kind::CpmInSamples: {
            auto values = cpm(matrix);
            for (std::size_t g = 0; g < matrix.num_genes(); ++g) {
                int passing = 0;
                for (std::size_t s = 0; s < ns; ++s) {
                    passing += values[g * ns + s] >= rule.cpm_cutoff;
                }
                if (passing >= rule.min_samples) {
                    keep.push_back(g);
                }
            }
            break;
        }

        case PrefilterRule::Kind::ExprFilter: {
            auto values = cpm(matrix);
            auto libs = matrix.library_sizes();
            std::vector<double> lib_d(libs.begin(), libs.end());
            const double cutoff = 10e6 / stats::median(lib_d);
            auto sizes = labels.group_sizes();
            const std::size_t min_samples = std::min(sizes[0], sizes[1]);
            for (std::size_t g = 0; g < matrix.num_genes(); ++g) {
                std::size_t passing = 0;
                for (std::size_t s = 0; s < ns; ++s) {
                    passing += values[g * ns + s] >= cutoff;
                }
                if (passing >= min_samples && matrix.row_sum(g) >= 15) {
                    keep.push_back(g);
                }
            }
            break;
        }
    }

    if (keep.empty()) {
        throw Error(Errc::AllGenesFiltered, "");
    }
    return matrix.select_rows(keep);
}

/**
 * Re-keys rows to the targets of `map` and resolves targets reached by several rows.
 * Output rows follow the matrix position of each target's first source in map order.
 * An empty map returns the matrix unchanged.
 */
inline CountMatrix collapse_duplicates(const CountMatrix& matrix, const IdMap& map, DuplicatePolicy policy) {
    if (map.empty()) {
        return matrix;
    }

    struct Group {
        std::string target;
        std::vector<std::pair<std::size_t, std::size_t>> sources; // (map position, matrix row)
    };
    std::vector<Group> groups;
    std::map<std::string_view, std::size_t> group_of;

    for (std::size_t g = 0; g < matrix.num_genes(); ++g) {
        auto pos = map.position(matrix.gene_ids()[g]);
        if (!pos) {
            throw Error(Errc::UnmappedGene, matrix.gene_ids()[g]);
        }
        const auto& target = map.entries()[*pos].second;
        auto it = group_of.find(target);
        if (it == group_of.end()) {
            it = group_of.emplace(target, groups.size()).first;
            groups.push_back(Group{target, {}});
        }
        groups[it->second].sources.emplace_back(*pos, g);
    }
    for (auto& grp : groups) {
        std::sort(grp.sources.begin(), grp.sources.end());
    }
    std::stable_sort(groups.begin(), groups.end(), [](const Group& a, const Group& b) { return a.sources.front().second < b.sources.front().second; });

    const std::size_t ns = matrix.num_samples();
    std::vector<std::string> ids;
    std::vector<std::int64_t> counts;
    std::optional<std::vector<std::int64_t>> lengths;
    if (matrix.has_lengths()) {
        lengths.emplace();
    }
    ids.reserve(groups.size());
    counts.reserve(groups.size() * ns);

    auto rounded_mean = [](double sum, std::size_t n) { return static_cast<std::int64_t>(std::llround(sum / static_cast<double>(n))); };

    for (const auto& grp : groups) {
        ids.push_back(grp.target);
        if (policy == DuplicatePolicy::KeepFirst || grp.sources.size() == 1) {
            auto first = grp.sources.front().second;
            auto r = matrix.row(first);
            counts.insert(counts.end(), r.begin(), r.end());
            if (lengths) {
                lengths->push_back((*matrix.lengths())[first]);
            }
            continue;
        }
        for (std::size_t s = 0; s < ns; ++s) {
            double sum = 0;
            for (const auto& src : grp.sources) {
                sum += static_cast<double>(matrix.at(src.second, s));
            }
            counts.push_back(rounded_mean(sum, grp.sources.size()));
        }
        if (lengths) {
            double sum = 0;
            for (const auto& src : grp.sources) {
                sum += static_cast<double>((*matrix.lengths())[src.second]);
            }
            lengths->push_back(std::max<std::int64_t>(1, rounded_mean(sum, grp.sources.size())));
        }
    }
    return CountMatrix(std::move(ids), matrix.samples(), std::move(counts), std::move(lengths));
}

/**
 * Median-of-ratios size factors over genes with all-positive counts, rescaled to geometric mean 1.
 */
inline std::vector<double> size_factors(const CountMatrix& matrix) {
    const std::size_t ns = matrix.num_samples();
    std::vector<std::vector<double>> log_ratios(ns);
    for (std::size_t g = 0; g < matrix.num_genes(); ++g) {
        auto r = matrix.row(g);
        if (std::any_of(r.begin(), r.end(), [](std::int64_t c) { return c <= 0; })) {
            continue;
        }
        double log_geo = 0;
        for (auto c : r) {
            log_geo += std::log(static_cast<double>(c));
        }
        log_geo /= static_cast<double>(ns);
        for (std::size_t s = 0; s < ns; ++s) {
            log_ratios[s].push_back(std::log(static_cast<double>(r[s])) - log_geo);
        }
    }
    if (ns == 0 || log_ratios[0].empty()) {
        throw Error(Errc::NoReferenceGenes, "");
    }

    // The median of log-ratios is the log of the median ratio: log is monotone.
    std::vector<double> log_factors(ns);
    double centre = 0;
    for (std::size_t s = 0; s < ns; ++s) {
        log_factors[s] = stats::median(std::move(log_ratios[s]));
        centre += log_factors[s];
    }
    centre /= static_cast<double>(ns);

    std::vector<double> factors(ns);
    for (std::size_t s = 0; s < ns; ++s) {
        factors[s] = std::exp(log_factors[s] - centre);
    }
    return factors;
}

/**
 * `LogCpm`: `log2((count + 0.5) / (libsize + 1) * 1e6)`.
 * `ShiftedLogVst`: `log2(count / size_factor + 1)`.
 */
inline TransformedMatrix transform(const CountMatrix& matrix, TransformMethod method) {
    TransformedMatrix out;
    out.gene_ids = matrix.gene_ids();
    out.samples = matrix.samples();
    out.method = method;
    out.values.resize(matrix.counts().size());
    const std::size_t ns = matrix.num_samples();

    if (method == TransformMethod::LogCpm) {
        auto libs = matrix.library_sizes();
        for (std::size_t s = 0; s < ns; ++s) {
            if (libs[s] <= 0) {
                throw Error(Errc::ZeroLibrary, matrix.samples()[s]);
            }
        }
        for (std::size_t g = 0; g < matrix.num_genes(); ++g) {
            for (std::size_t s = 0; s < ns; ++s) {
                double c = static_cast<double>(matrix.at(g, s));
                out.values[g * ns + s] = std::log2((c + 0.5) * 1e6 / (static_cast<double>(libs[s]) + 1));
            }
        }
    } else {
        auto factors = size_factors(matrix);
        for (std::size_t g = 0; g < matrix.num_genes(); ++g) {
            for (std::size_t s = 0; s < ns; ++s) {
                double c = static_cast<double>(matrix.at(g, s));
                out.values[g * ns + s] = std::log2(c / factors[s] + 1);
            }
        }
    }
    return out;
}

}

#endif
