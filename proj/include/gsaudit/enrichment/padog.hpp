#ifndef GSAUDIT_ENRICHMENT_PADOG_HPP
#define GSAUDIT_ENRICHMENT_PADOG_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "../corpus.hpp"
#include "../diffexpr.hpp"
#include "../parallel.hpp"
#include "../preprocess.hpp"
#include "../random.hpp"
#include "gsea.hpp"
#include "table.hpp"

/**
 * @file padog.hpp
 * @brief Set scoring that down-weights genes shared by many sets, against a label-permutation null.
 */

namespace gsaudit {

struct PadogOptions {
    int permutations = 1000;
    std::size_t min_size = 5;
    std::size_t max_size = 500;
    int num_threads = 1;
};

/**
 * Weights `1 + sqrt((f_max - f) / (f_max - f_min))` from per-gene set frequencies `f`; all ones when
 * every frequency is equal. Genes in no set (frequency 0) are ignored when taking the range.
 */
inline std::vector<double> padog_weights(const std::vector<int>& frequency) {
    int f_min = 0, f_max = 0;
    bool any = false;
    for (auto f : frequency) {
        if (f <= 0) {
            continue;
        }
        if (!any) {
            f_min = f_max = f;
            any = true;
        }
        f_min = std::min(f_min, f);
        f_max = std::max(f_max, f);
    }
    std::vector<double> w(frequency.size(), 1.0);
    if (!any || f_max == f_min) {
        return w;
    }
    for (std::size_t g = 0; g < frequency.size(); ++g) {
        if (frequency[g] > 0) {
            w[g] = 1 + std::sqrt(static_cast<double>(f_max - frequency[g]) / static_cast<double>(f_max - f_min));
        }
    }
    return w;
}

/**
 * Per set, the mean of `weight * |moderated t|` over members, standardised against the permutation null.
 * The statistic is the standardised score; the raw p-value counts null scores at least as large, with a pseudo-count.
 */
inline EnrichmentTable padog(const TransformedMatrix& values, const ConditionLabels& labels, const GeneSetCollection& sets,
                             const PadogOptions& options, std::uint64_t seed)
{
    detail::require_replicates(labels);
    auto indexed = detail::index_sets(sets, values.gene_ids, options.min_size, options.max_size);
    const std::size_t ns = indexed.names.size();

    std::vector<int> frequency(values.num_genes(), 0);
    for (const auto& m : indexed.members) {
        for (auto g : m) {
            ++frequency[g];
        }
    }
    const auto weights = padog_weights(frequency);

    auto score_all = [&](const ConditionLabels& lab, std::vector<double>& out) {
        auto t = moderated_t_statistics(values, lab);
        out.resize(ns);
        for (std::size_t s = 0; s < ns; ++s) {
            double sum = 0;
            for (auto g : indexed.members[s]) {
                sum += weights[g] * std::abs(t[g]);
            }
            out[s] = sum / static_cast<double>(indexed.members[s].size());
        }
    };

    std::vector<double> observed;
    score_all(labels, observed);

    const std::size_t P = static_cast<std::size_t>(std::max(1, options.permutations));
    std::vector<std::vector<double>> by_perm(P);
    parallel_for(P, options.num_threads, [&](std::size_t p) {
        Rng rng(derive_seed(seed, "padog", p));
        auto groups = labels.groups();
        fisher_yates(groups, rng);
        score_all(labels.with_groups(std::move(groups)), by_perm[p]);
    });

    EnrichmentTable table;
    table.engine = Engine::Padog;
    std::vector<double> raw(ns);
    std::vector<double> z(ns);
    for (std::size_t s = 0; s < ns; ++s) {
        double sum = 0;
        std::size_t beyond = 0;
        for (std::size_t p = 0; p < P; ++p) {
            sum += by_perm[p][s];
            beyond += by_perm[p][s] >= observed[s];
        }
        const double mean = sum / static_cast<double>(P);
        double ss = 0;
        for (std::size_t p = 0; p < P; ++p) {
            double d = by_perm[p][s] - mean;
            ss += d * d;
        }
        const double sd = P > 1 ? std::sqrt(ss / static_cast<double>(P - 1)) : 0;
        z[s] = sd > 0 && std::isfinite(observed[s]) ? (observed[s] - mean) / sd : 0;
        raw[s] = static_cast<double>(1 + beyond) / static_cast<double>(1 + P);
    }
    auto adj = bh_adjust(raw);
    for (std::size_t s = 0; s < ns; ++s) {
        table.rows.push_back(EnrichmentRow{indexed.names[s], z[s], raw[s], adj[s], 0, 1, false});
    }
    std::sort(table.rows.begin(), table.rows.end(), [](const EnrichmentRow& a, const EnrichmentRow& b) {
        if (a.adjusted != b.adjusted) {
            return a.adjusted < b.adjusted;
        }
        if (a.statistic != b.statistic) {
            return a.statistic > b.statistic;
        }
        return a.set < b.set;
    });
    return assemble_ranks(std::move(table));
}

}

#endif
