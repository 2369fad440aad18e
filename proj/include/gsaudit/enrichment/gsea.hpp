#ifndef GSAUDIT_ENRICHMENT_GSEA_HPP
#define GSAUDIT_ENRICHMENT_GSEA_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "../corpus.hpp"
#include "../diffexpr.hpp"
#include "../error.hpp"
#include "../parallel.hpp"
#include "../preprocess.hpp"
#include "../random.hpp"
#include "table.hpp"

/**
 * @file gsea.hpp
 * @brief Weighted Kolmogorov-Smirnov enrichment scores with phenotype-permutation and gene-set-permutation nulls.
 */

namespace gsaudit {

struct GseaOptions {
    /** Weight exponent on `|statistic|`; one of 0, 1, 1.5 and 2 in the shipped choice graphs. */
    double exponent = 1;
    int permutations = 1000;
    std::size_t min_size = 5;
    std::size_t max_size = 500;
    int num_threads = 1;
};

namespace detail {

/**
 * Enrichment score from the sorted positions of the members within a ranked list of `total` genes.
 * `weights[i]` is the hit weight of the gene at position `i`. The running sum only changes direction at hits,
 * so its extremes are found by checking the value just before and just after each hit.
 */
inline double es_from_positions(std::span<const std::size_t> positions, std::span<const double> weights, std::size_t total) {
    const std::size_t hits = positions.size();
    const double miss_total = static_cast<double>(total - hits);
    double hit_total = 0;
    for (auto p : positions) {
        hit_total += weights[p];
    }
    // Equal weights (exponent 0) take the exact count form; so does the degenerate all-zero case.
    const bool flat = !(hit_total > 0) || std::all_of(positions.begin(), positions.end(), [&](std::size_t p) { return weights[p] == weights[positions[0]]; });
    if (flat) {
        hit_total = static_cast<double>(hits);
    }

    // Later extremes must beat earlier ones by more than rounding noise, so exact ties keep the first.
    constexpr double tie = 1e-14;
    double cumulative = 0, best = 0, best_abs = 0;
    for (std::size_t h = 0; h < hits; ++h) {
        const std::size_t p = positions[h];
        const double misses = static_cast<double>(p - h);
        if (p > 0) {
            double before = cumulative - misses / miss_total;
            if (std::abs(before) > best_abs + tie) {
                best_abs = std::abs(before);
                best = before;
            }
        }
        cumulative = flat ? static_cast<double>(h + 1) / hit_total : cumulative + weights[p] / hit_total;
        double after = cumulative - misses / miss_total;
        if (std::abs(after) > best_abs + tie) {
            best_abs = std::abs(after);
            best = after;
        }
    }
    return best;
}

inline std::vector<double> hit_weights(std::span<const double> ranked_values, double exponent) {
    std::vector<double> out(ranked_values.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = exponent == 0 ? 1.0 : std::pow(std::abs(ranked_values[i]), exponent);
    }
    return out;
}

struct IndexedSets {
    std::vector<std::string> names;
    std::vector<std::vector<std::size_t>> members; // gene indices
};

/**
 * Maps set members onto gene indices and keeps sets whose mapped size lies in `[min_size, max_size]`
 * and leaves at least one non-member.
 */
inline IndexedSets index_sets(const GeneSetCollection& sets, const std::vector<std::string>& genes, std::size_t min_size, std::size_t max_size) {
    std::unordered_map<std::string, std::size_t> lookup;
    lookup.reserve(genes.size());
    for (std::size_t i = 0; i < genes.size(); ++i) {
        lookup.emplace(genes[i], i);
    }
    IndexedSets out;
    for (const auto& set : sets.sets()) {
        std::vector<std::size_t> idx;
        for (const auto& m : set.members) {
            auto it = lookup.find(m);
            if (it != lookup.end()) {
                idx.push_back(it->second);
            }
        }
        if (idx.size() >= std::max<std::size_t>(min_size, 1) && idx.size() <= max_size && idx.size() < genes.size()) {
            std::sort(idx.begin(), idx.end());
            out.names.push_back(set.name);
            out.members.push_back(std::move(idx));
        }
    }
    if (out.names.empty()) {
        throw Error(Errc::EmptyCollectionAfterFilter, sets.name());
    }
    return out;
}

/**
 * Position of every gene in the ranking induced by `values` (descending, identifier tie-break).
 */
inline std::vector<std::size_t> rank_positions(const std::vector<double>& values, const std::vector<std::string>& ids, std::vector<std::size_t>& order) {
    order.resize(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (values[a] != values[b]) {
            return values[a] > values[b];
        }
        return ids[a] < ids[b];
    });
    std::vector<std::size_t> position(values.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        position[order[i]] = i;
    }
    return position;
}

inline double set_es(const std::vector<std::size_t>& members, const std::vector<std::size_t>& position, std::span<const double> weights, std::vector<std::size_t>& scratch) {
    scratch.clear();
    for (auto g : members) {
        scratch.push_back(position[g]);
    }
    std::sort(scratch.begin(), scratch.end());
    return es_from_positions(scratch, weights, position.size());
}

/**
 * Normalisation, permutation p-values and tail-ratio q-values from observed and null enrichment scores.
 * `null_es[s]` holds the null scores of set `s`.
 */
inline EnrichmentTable finish_gsea(const std::vector<std::string>& names, const std::vector<double>& observed, const std::vector<std::vector<double>>& null_es, Engine engine) {
    const std::size_t ns = names.size();
    std::vector<double> nes(ns, 0), raw(ns, 1);
    std::vector<double> pooled_pos, pooled_neg; // magnitudes of null NES by sign

    for (std::size_t s = 0; s < ns; ++s) {
        double pos_sum = 0, neg_sum = 0;
        std::size_t pos_n = 0, neg_n = 0;
        for (auto v : null_es[s]) {
            if (v > 0) {
                pos_sum += v;
                ++pos_n;
            } else if (v < 0) {
                neg_sum += -v;
                ++neg_n;
            }
        }
        const double pos_mean = pos_n ? pos_sum / static_cast<double>(pos_n) : 0;
        const double neg_mean = neg_n ? neg_sum / static_cast<double>(neg_n) : 0;

        for (auto v : null_es[s]) {
            if (v > 0 && pos_mean > 0) {
                pooled_pos.push_back(v / pos_mean);
            } else if (v < 0 && neg_mean > 0) {
                pooled_neg.push_back(-v / neg_mean);
            }
        }

        const double es = observed[s];
        if (es > 0 && pos_n > 0) {
            nes[s] = es / pos_mean;
            std::size_t beyond = std::count_if(null_es[s].begin(), null_es[s].end(), [&](double v) { return v > 0 && v >= es; });
            raw[s] = static_cast<double>(1 + beyond) / static_cast<double>(1 + pos_n);
        } else if (es < 0 && neg_n > 0) {
            nes[s] = es / neg_mean;
            std::size_t beyond = std::count_if(null_es[s].begin(), null_es[s].end(), [&](double v) { return v < 0 && v <= es; });
            raw[s] = static_cast<double>(1 + beyond) / static_cast<double>(1 + neg_n);
        }
    }

    std::sort(pooled_pos.begin(), pooled_pos.end());
    std::sort(pooled_neg.begin(), pooled_neg.end());

    std::vector<double> q(ns, 1);
    for (int sign : {1, -1}) {
        const auto& pooled = sign > 0 ? pooled_pos : pooled_neg;
        std::vector<std::size_t> side;
        for (std::size_t s = 0; s < ns; ++s) {
            if (sign * nes[s] > 0) {
                side.push_back(s);
            }
        }
        if (side.empty()) {
            continue;
        }
        // Most extreme first.
        std::sort(side.begin(), side.end(), [&](std::size_t a, std::size_t b) {
            if (std::abs(nes[a]) != std::abs(nes[b])) {
                return std::abs(nes[a]) > std::abs(nes[b]);
            }
            return names[a] < names[b];
        });
        std::vector<double> magnitudes;
        for (auto s : side) {
            magnitudes.push_back(std::abs(nes[s]));
        }
        std::vector<double> ascending(magnitudes.rbegin(), magnitudes.rend());

        double running = 0;
        for (auto s : side) {
            const double star = std::abs(nes[s]);
            double null_frac = 0;
            if (!pooled.empty()) {
                auto at_least = std::max<std::ptrdiff_t>(1, pooled.end() - std::lower_bound(pooled.begin(), pooled.end(), star));
                null_frac = static_cast<double>(at_least) / static_cast<double>(pooled.size());
            } else {
                null_frac = 1;
            }
            auto obs_at_least = ascending.end() - std::lower_bound(ascending.begin(), ascending.end(), star);
            double obs_frac = static_cast<double>(obs_at_least) / static_cast<double>(side.size());
            double value = std::clamp(null_frac / obs_frac, 0.0, 1.0);
            running = std::max(running, value);
            q[s] = running;
        }
    }

    EnrichmentTable table;
    table.engine = engine;
    for (std::size_t s = 0; s < ns; ++s) {
        table.rows.push_back(EnrichmentRow{names[s], nes[s], raw[s], q[s], 0, 1, false});
    }
    order_rows(table.rows);
    return assemble_ranks(std::move(table));
}

}

/**
 * Weighted Kolmogorov-Smirnov enrichment score of `members` in `ranked`.
 * Hits step up by `|stat|^exponent` over the member total, misses step down by one over the number of non-members;
 * the score is the signed running-sum value farthest from zero (first occurrence on ties).
 */
inline double enrichment_score(const RankedList& ranked, const std::vector<std::string>& members, double exponent) {
    std::unordered_map<std::string_view, std::size_t> position;
    position.reserve(ranked.size());
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        position.emplace(ranked.gene_ids[i], i);
    }
    std::vector<std::size_t> hits;
    for (const auto& m : members) {
        auto it = position.find(m);
        if (it != position.end()) {
            hits.push_back(it->second);
        }
    }
    std::sort(hits.begin(), hits.end());
    hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
    if (hits.empty()) {
        throw Error(Errc::EmptySetInList, "");
    }
    if (hits.size() == ranked.size()) {
        throw Error(Errc::NoComplement, "");
    }
    auto weights = detail::hit_weights(ranked.values, exponent);
    return detail::es_from_positions(hits, weights, ranked.size());
}

/**
 * GSEA with a phenotype-permutation null: labels are shuffled, the ranking statistic recomputed
 * and every set rescored for each replicate.
 */
inline EnrichmentTable gsea_phenotype(const TransformedMatrix& values, const ConditionLabels& labels, const GeneSetCollection& sets,
                                      RankingStat stat, const GseaOptions& options, std::uint64_t seed)
{
    const auto& ids = values.gene_ids;
    auto indexed = detail::index_sets(sets, ids, options.min_size, options.max_size);
    const std::size_t ns = indexed.names.size();

    auto score_all = [&](const ConditionLabels& lab, std::vector<double>& out) {
        auto stat_values = ranking_values(values, lab, stat);
        std::vector<std::size_t> order, scratch;
        auto position = detail::rank_positions(stat_values, ids, order);
        std::vector<double> sorted(order.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            sorted[i] = stat_values[order[i]];
        }
        auto weights = detail::hit_weights(sorted, options.exponent);
        out.resize(ns);
        for (std::size_t s = 0; s < ns; ++s) {
            out[s] = detail::set_es(indexed.members[s], position, weights, scratch);
        }
    };

    std::vector<double> observed;
    score_all(labels, observed);

    const std::size_t P = static_cast<std::size_t>(std::max(1, options.permutations));
    std::vector<std::vector<double>> by_perm(P);
    parallel_for(P, options.num_threads, [&](std::size_t p) {
        Rng rng(derive_seed(seed, "gsea-phenotype", p));
        auto groups = labels.groups();
        fisher_yates(groups, rng);
        score_all(labels.with_groups(std::move(groups)), by_perm[p]);
    });

    std::vector<std::vector<double>> null_es(ns, std::vector<double>(P));
    for (std::size_t p = 0; p < P; ++p) {
        for (std::size_t s = 0; s < ns; ++s) {
            null_es[s][p] = by_perm[p][s];
        }
    }
    return detail::finish_gsea(indexed.names, observed, null_es, Engine::GseaPhenotype);
}

/**
 * GSEA on a fixed ranked list with a gene-set-permutation null: each replicate scores random sets
 * of the same size drawn from the list.
 */
inline EnrichmentTable gsea_preranked(const RankedList& ranked, const GeneSetCollection& sets, const GseaOptions& options, std::uint64_t seed) {
    auto indexed = detail::index_sets(sets, ranked.gene_ids, options.min_size, options.max_size);
    const std::size_t ns = indexed.names.size();
    const std::size_t total = ranked.size();
    auto weights = detail::hit_weights(ranked.values, options.exponent);

    std::vector<double> observed(ns);
    for (std::size_t s = 0; s < ns; ++s) {
        // Gene indices are ranked positions here.
        observed[s] = detail::es_from_positions(indexed.members[s], weights, total);
    }

    const std::size_t P = static_cast<std::size_t>(std::max(1, options.permutations));
    std::vector<std::vector<double>> by_perm(P, std::vector<double>(ns));
    parallel_for(P, options.num_threads, [&](std::size_t p) {
        Rng rng(derive_seed(seed, "gsea-preranked", p));
        std::vector<std::size_t> pool(total);
        std::iota(pool.begin(), pool.end(), 0);
        std::vector<std::size_t> draw;
        for (std::size_t s = 0; s < ns; ++s) {
            const std::size_t k = indexed.members[s].size();
            partial_shuffle(pool, k, rng);
            draw.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
            std::sort(draw.begin(), draw.end());
            by_perm[p][s] = detail::es_from_positions(draw, weights, total);
        }
    });

    std::vector<std::vector<double>> null_es(ns, std::vector<double>(P));
    for (std::size_t p = 0; p < P; ++p) {
        for (std::size_t s = 0; s < ns; ++s) {
            null_es[s][p] = by_perm[p][s];
        }
    }
    return detail::finish_gsea(indexed.names, observed, null_es, Engine::GseaPreranked);
}

}

#endif
