#ifndef GSAUDIT_ENRICHMENT_ORA_HPP
#define GSAUDIT_ENRICHMENT_ORA_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "../corpus.hpp"
#include "../diffexpr.hpp"
#include "../error.hpp"
#include "../stats.hpp"
#include "table.hpp"

/**
 * @file ora.hpp
 * @brief Over-representation analysis with a hypergeometric null.
 */

namespace gsaudit {

enum class UniverseChoice {
    /** Tested genes annotated to at least one set of the collection. */
    AnnotatedGenes,
    /** All genes tested for differential expression. */
    AllTestedGenes
};

/**
 * Population and draw sizes for one set: `N` universe genes, `K` of them in the set,
 * `n` drawn (differentially expressed) of which `k` fall in the set.
 */
struct Contingency {
    long long k = 0, N = 0, K = 0, n = 0;
};

namespace detail {

inline void check_contingency(long long k, long long N, long long K, long long n) {
    if (N < 0 || K < 0 || K > N || n < 0 || n > N || k < std::max(0LL, n + K - N) || k > std::min(K, n)) {
        throw Error(Errc::InvalidContingency,
            "k=" + std::to_string(k) + " N=" + std::to_string(N) + " K=" + std::to_string(K) + " n=" + std::to_string(n));
    }
}

inline double hypergeom_log_pmf(long long x, long long N, long long K, long long n) {
    return stats::log_choose(K, x) + stats::log_choose(N - K, n - x) - stats::log_choose(N, n);
}

}

/**
 * Upper tail `P(X >= k)` of the hypergeometric distribution with population `N`, `K` successes and `n` draws.
 */
inline double hypergeom_tail(long long k, long long N, long long K, long long n) {
    detail::check_contingency(k, N, K, n);
    const long long lo = std::max(0LL, n + K - N), hi = std::min(K, n);
    if (k <= lo) {
        return 1;
    }
    double log_sum = -std::numeric_limits<double>::infinity();
    for (long long x = k; x <= hi; ++x) {
        log_sum = stats::log_add(log_sum, detail::hypergeom_log_pmf(x, N, K, n));
    }
    return std::min(1.0, std::exp(log_sum));
}

struct OraOptions {
    UniverseChoice universe = UniverseChoice::AnnotatedGenes;
    /** Conservative variant that removes one differentially expressed gene from each set's overlap. */
    bool ease = false;
};

/**
 * Tests each set for over-representation of `de_genes` among the universe genes.
 * Sets with no universe members are left out of the table.
 * The statistic is the enrichment ratio `(k / n) / (K / N)`, zero when nothing is drawn.
 */
inline EnrichmentTable ora(const std::vector<std::string>& de_genes, const GeneSetCollection& sets, const std::vector<std::string>& tested, const OraOptions& options = OraOptions()) {
    std::unordered_set<std::string> tested_set(tested.begin(), tested.end());
    std::unordered_set<std::string> universe;
    if (options.universe == UniverseChoice::AllTestedGenes) {
        universe = tested_set;
    } else {
        for (const auto& set : sets.sets()) {
            for (const auto& m : set.members) {
                if (tested_set.count(m)) {
                    universe.insert(m);
                }
            }
        }
    }
    if (universe.empty()) {
        throw Error(Errc::EmptyUniverse, sets.name());
    }

    std::unordered_set<std::string> drawn;
    for (const auto& g : de_genes) {
        if (universe.count(g)) {
            drawn.insert(g);
        }
    }
    const long long N = static_cast<long long>(universe.size());
    const long long n = static_cast<long long>(drawn.size());

    EnrichmentTable table;
    table.engine = Engine::Ora;
    std::vector<double> raw;
    for (const auto& set : sets.sets()) {
        long long K = 0, k = 0;
        for (const auto& m : set.members) {
            if (universe.count(m)) {
                ++K;
                k += drawn.count(m) ? 1 : 0;
            }
        }
        if (K == 0) {
            continue;
        }
        long long tested_k = options.ease ? std::max(k - 1, std::max(0LL, n + K - N)) : k;
        double p = std::max(hypergeom_tail(tested_k, N, K, n), std::numeric_limits<double>::min());
        double ratio = n == 0 ? 0 : (static_cast<double>(k) / static_cast<double>(n)) / (static_cast<double>(K) / static_cast<double>(N));
        table.rows.push_back(EnrichmentRow{set.name, ratio, p, 1, 0, 1, false});
        raw.push_back(p);
    }
    if (table.rows.empty()) {
        throw Error(Errc::EmptyTable, "no set overlaps the universe");
    }
    auto adj = bh_adjust(raw);
    for (std::size_t i = 0; i < adj.size(); ++i) {
        table.rows[i].adjusted = adj[i];
    }
    detail::order_rows(table.rows);
    return assemble_ranks(std::move(table));
}

}

#endif
