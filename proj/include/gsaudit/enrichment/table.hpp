#ifndef GSAUDIT_ENRICHMENT_TABLE_HPP
#define GSAUDIT_ENRICHMENT_TABLE_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "../error.hpp"

/**
 * @file table.hpp
 * @brief Result table shared by all enrichment engines, and its rank assembly.
 */

namespace gsaudit {

enum class Engine { Ora, Goseq, GseaPhenotype, GseaPreranked, Padog };

inline constexpr std::string_view engine_name(Engine engine) {
    switch (engine) {
        case Engine::Ora: return "ora";
        case Engine::Goseq: return "goseq";
        case Engine::GseaPhenotype: return "gsea-phenotype";
        case Engine::GseaPreranked: return "gsea-preranked";
        case Engine::Padog: return "padog";
    }
    return "";
}

inline Engine parse_engine(std::string_view name) {
    for (auto e : {Engine::Ora, Engine::Goseq, Engine::GseaPhenotype, Engine::GseaPreranked, Engine::Padog}) {
        if (engine_name(e) == name) {
            return e;
        }
    }
    throw Error(Errc::UnknownEngine, std::string(name));
}

/**
 * Adjusted values (BH p-values or GSEA q-values) below this threshold are significant.
 */
inline constexpr double significance_threshold(Engine engine) {
    return (engine == Engine::GseaPhenotype || engine == Engine::GseaPreranked) ? 0.25 : 0.05;
}

struct EnrichmentRow {
    std::string set;
    double statistic = 0;
    double raw_p = 1;
    double adjusted = 1;
    int dense_rank = 0;
    double relative_rank = 1;
    bool significant = false;
};

struct EnrichmentTable {
    std::vector<EnrichmentRow> rows;
    Engine engine = Engine::Ora;

    const EnrichmentRow* find(std::string_view set) const {
        for (const auto& row : rows) {
            if (row.set == set) {
                return &row;
            }
        }
        return nullptr;
    }

    std::size_t significant_count() const {
        return std::count_if(rows.begin(), rows.end(), [](const EnrichmentRow& r) { return r.significant; });
    }
};

/**
 * Dense ranks over distinct adjusted values (ascending), relative ranks as rank over maximum rank,
 * and significance flags from the engine threshold. Row order is unchanged.
 */
inline EnrichmentTable assemble_ranks(EnrichmentTable table) {
    if (table.rows.empty()) {
        throw Error(Errc::EmptyTable, std::string(engine_name(table.engine)));
    }
    std::vector<double> distinct;
    distinct.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        distinct.push_back(row.adjusted);
    }
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    const double max_rank = static_cast<double>(distinct.size());
    const double threshold = significance_threshold(table.engine);

    for (auto& row : table.rows) {
        auto pos = std::lower_bound(distinct.begin(), distinct.end(), row.adjusted) - distinct.begin();
        row.dense_rank = static_cast<int>(pos) + 1;
        row.relative_rank = row.adjusted >= 1 ? 1.0 : static_cast<double>(row.dense_rank) / max_rank;
        row.significant = row.adjusted < threshold;
    }
    return table;
}

namespace detail {

/**
 * Sorts rows by adjusted value, then by decreasing `|statistic|`, then by set name.
 */
inline void order_rows(std::vector<EnrichmentRow>& rows) {
    std::sort(rows.begin(), rows.end(), [](const EnrichmentRow& a, const EnrichmentRow& b) {
        if (a.adjusted != b.adjusted) {
            return a.adjusted < b.adjusted;
        }
        if (std::abs(a.statistic) != std::abs(b.statistic)) {
            return std::abs(a.statistic) > std::abs(b.statistic);
        }
        return a.set < b.set;
    });
}

}

}

#endif
