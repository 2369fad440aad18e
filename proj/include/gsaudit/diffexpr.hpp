#ifndef GSAUDIT_DIFFEXPR_HPP
#define GSAUDIT_DIFFEXPR_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "corpus.hpp"
#include "error.hpp"
#include "preprocess.hpp"
#include "stats.hpp"

/**
 * @file diffexpr.hpp
 * @brief Gene-level differential expression, ranking statistics and multiple-testing adjustment.
 */

namespace gsaudit {

enum class DeMethod { ModeratedT, NbWald };

inline constexpr std::string_view de_method_name(DeMethod method) {
    return method == DeMethod::ModeratedT ? "moderated-t" : "nb-wald";
}

struct DeRow {
    std::string gene_id;
    double log2_fold_change = 0;
    double statistic = 0;
    double raw_p = 1;
    double adjusted_p = 1;
};

/**
 * Per-gene differential-expression evidence, in input row order.
 * Fold changes and statistics are oriented as level 1 minus level 0.
 */
struct DeTable {
    std::vector<DeRow> rows;
    DeMethod method = DeMethod::NbWald;
};

enum class RankingStat { SignalToNoise, TStatistic, DiffOfClasses, DeDerived };

inline constexpr std::string_view ranking_stat_name(RankingStat stat) {
    switch (stat) {
        case RankingStat::SignalToNoise: return "signal-to-noise";
        case RankingStat::TStatistic: return "t-statistic";
        case RankingStat::DiffOfClasses: return "diff-of-classes";
        case RankingStat::DeDerived: return "de-derived";
    }
    return "";
}

/**
 * Genes ordered by decreasing statistic; ties are broken by ascending gene identifier.
 */
struct RankedList {
    std::vector<std::string> gene_ids;
    std::vector<double> values;
    RankingStat stat = RankingStat::SignalToNoise;

    std::size_t size() const { return gene_ids.size(); }
};

inline RankedList make_ranked_list(const std::vector<std::string>& ids, const std::vector<double>& values, RankingStat stat) {
    std::vector<std::size_t> order(ids.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (values[a] != values[b]) {
            return values[a] > values[b];
        }
        return ids[a] < ids[b];
    });
    RankedList out;
    out.stat = stat;
    out.gene_ids.reserve(ids.size());
    out.values.reserve(ids.size());
    for (auto i : order) {
        out.gene_ids.push_back(ids[i]);
        out.values.push_back(values[i]);
    }
    return out;
}

/**
 * Benjamini-Hochberg step-up adjustment; output is in input order.
 */
inline std::vector<double> bh_adjust(std::span<const double> p) {
    const std::size_t m = p.size();
    for (auto v : p) {
        if (!(v >= 0 && v <= 1)) {
            throw Error(Errc::InvalidP, std::to_string(v));
        }
    }
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });

    std::vector<double> adjusted(m);
    double running = 1;
    for (std::size_t r = m; r > 0; --r) {
        auto i = order[r - 1];
        double candidate = std::min(1.0, static_cast<double>(m) * p[i] / static_cast<double>(r));
        running = std::min(running, candidate);
        adjusted[i] = running;
    }
    return adjusted;
}

inline std::vector<double> bh_adjust(const std::vector<double>& p) { return bh_adjust(std::span<const double>(p)); }

namespace detail {

inline void require_replicates(const ConditionLabels& labels) {
    auto sizes = labels.group_sizes();
    if (sizes[0] < 2 || sizes[1] < 2) {
        throw Error(Errc::DegenerateDesign, "each condition needs at least two samples");
    }
}

struct GroupMoments {
    double mean[2] = {0, 0};
    double ss[2] = {0, 0};
};

inline GroupMoments group_moments(std::span<const double> row, const std::vector<int>& groups, const std::array<std::size_t, 2>& sizes) {
    GroupMoments out;
    for (std::size_t s = 0; s < row.size(); ++s) {
        out.mean[groups[s]] += row[s];
    }
    out.mean[0] /= static_cast<double>(sizes[0]);
    out.mean[1] /= static_cast<double>(sizes[1]);
    for (std::size_t s = 0; s < row.size(); ++s) {
        double d = row[s] - out.mean[groups[s]];
        out.ss[groups[s]] += d * d;
    }
    return out;
}

}

/**
 * Moderated-t constants: the prior degrees of freedom are fixed and the prior variance is the median residual variance.
 */
struct ModeratedTOptions {
    static constexpr double prior_df = 4;
};

/**
 * Per-gene moderated t statistics without p-values, for engines that permute labels many times.
 * `delta` receives mean(level 1) - mean(level 0) when non-null.
 */
inline std::vector<double> moderated_t_statistics(const TransformedMatrix& values, const ConditionLabels& labels, std::vector<double>* delta = nullptr) {
    detail::require_replicates(labels);
    const auto sizes = labels.group_sizes();
    const std::size_t ng = values.num_genes();
    const double n = static_cast<double>(sizes[0] + sizes[1]);
    const double resid_df = n - 2;
    const double prior_df = ModeratedTOptions::prior_df;
    const double scale = std::sqrt(1.0 / static_cast<double>(sizes[0]) + 1.0 / static_cast<double>(sizes[1]));

    std::vector<double> diff(ng), s2(ng);
    for (std::size_t g = 0; g < ng; ++g) {
        auto mom = detail::group_moments(values.row(g), labels.groups(), sizes);
        diff[g] = mom.mean[1] - mom.mean[0];
        s2[g] = (mom.ss[0] + mom.ss[1]) / resid_df;
    }
    const double prior_s2 = stats::median(s2);

    std::vector<double> t(ng);
    for (std::size_t g = 0; g < ng; ++g) {
        double shrunk = (prior_df * prior_s2 + resid_df * s2[g]) / (prior_df + resid_df);
        if (diff[g] == 0) {
            t[g] = 0;
        } else if (shrunk <= 0) {
            t[g] = std::copysign(std::numeric_limits<double>::infinity(), diff[g]);
        } else {
            t[g] = diff[g] / (std::sqrt(shrunk) * scale);
        }
    }
    if (delta) {
        *delta = std::move(diff);
    }
    return t;
}

/**
 * Moderated t-test on continuous expression values.
 * Residual variances are shrunk toward their median with 4 prior degrees of freedom;
 * p-values come from the t distribution with `4 + n - 2` degrees of freedom and are BH-adjusted.
 */
inline DeTable moderated_t(const TransformedMatrix& values, const ConditionLabels& labels) {
    std::vector<double> delta;
    auto t = moderated_t_statistics(values, labels, &delta);
    const auto sizes = labels.group_sizes();
    const double df = ModeratedTOptions::prior_df + static_cast<double>(sizes[0] + sizes[1]) - 2;

    DeTable out;
    out.method = DeMethod::ModeratedT;
    out.rows.resize(t.size());
    std::vector<double> raw(t.size());
    for (std::size_t g = 0; g < t.size(); ++g) {
        raw[g] = stats::t_two_sided(t[g], df);
        out.rows[g] = DeRow{values.gene_ids[g], delta[g], t[g], raw[g], 1};
    }
    auto adj = bh_adjust(raw);
    for (std::size_t g = 0; g < t.size(); ++g) {
        out.rows[g].adjusted_p = adj[g];
    }
    return out;
}

/**
 * Negative-binomial Wald test on size-factor normalised counts.
 *
 * Per gene, the dispersion is a method-of-moments estimate from the pooled within-group variance,
 * floored at 1e-8 and shrunk halfway toward the median across genes.
 * The log2 fold change uses a pseudo-count of 0.5 and its variance is approximated by the delta method.
 */
inline DeTable nb_wald(const CountMatrix& matrix, const ConditionLabels& labels) {
    detail::require_replicates(labels);
    const auto factors = size_factors(matrix);
    const auto sizes = labels.group_sizes();
    const std::size_t ng = matrix.num_genes();
    const std::size_t ns = matrix.num_samples();
    const double n = static_cast<double>(ns);
    const double ln2_sq = std::log(2.0) * std::log(2.0);

    std::vector<double> m0(ng), m1(ng), disp(ng);
    std::vector<double> norm(ns);
    for (std::size_t g = 0; g < ng; ++g) {
        for (std::size_t s = 0; s < ns; ++s) {
            norm[s] = static_cast<double>(matrix.at(g, s)) / factors[s];
        }
        auto mom = detail::group_moments(norm, labels.groups(), sizes);
        m0[g] = mom.mean[0];
        m1[g] = mom.mean[1];
        double overall = (static_cast<double>(sizes[0]) * mom.mean[0] + static_cast<double>(sizes[1]) * mom.mean[1]) / n;
        double pooled_var = (mom.ss[0] + mom.ss[1]) / (n - 2);
        double alpha = overall > 0 ? (pooled_var - overall) / (overall * overall) : 0;
        disp[g] = std::max(1e-8, alpha);
    }
    const double disp_median = stats::median(disp);

    DeTable out;
    out.method = DeMethod::NbWald;
    out.rows.resize(ng);
    std::vector<double> raw(ng);
    for (std::size_t g = 0; g < ng; ++g) {
        double lfc = std::log2((m1[g] + 0.5) / (m0[g] + 0.5));
        double shrunk = (disp[g] + disp_median) / 2;
        double v0 = (1.0 / (m0[g] + 0.5) + shrunk) / (static_cast<double>(sizes[0]) * ln2_sq);
        double v1 = (1.0 / (m1[g] + 0.5) + shrunk) / (static_cast<double>(sizes[1]) * ln2_sq);
        double z = m0[g] == m1[g] ? 0 : lfc / std::sqrt(v0 + v1);
        raw[g] = stats::normal_two_sided(z);
        out.rows[g] = DeRow{matrix.gene_ids()[g], m0[g] == m1[g] ? 0 : lfc, z, raw[g], 1};
    }
    auto adj = bh_adjust(raw);
    for (std::size_t g = 0; g < ng; ++g) {
        out.rows[g].adjusted_p = adj[g];
    }
    return out;
}

/**
 * Per-gene ranking statistic oriented as level 0 minus level 1:
 * signal-to-noise `(mu0 - mu1) / (sd0' + sd1')` with `sd' = max(sd, 0.2 |mu|, 1e-8)`,
 * Welch t, or the plain difference of class means.
 */
inline std::vector<double> ranking_values(const TransformedMatrix& values, const ConditionLabels& labels, RankingStat stat) {
    if (stat == RankingStat::DeDerived) {
        throw Error(Errc::InvalidConfig, "de-derived ranking requires a DE table");
    }
    const auto sizes = labels.group_sizes();
    if (stat != RankingStat::DiffOfClasses) {
        detail::require_replicates(labels);
    }
    const double n0 = static_cast<double>(sizes[0]), n1 = static_cast<double>(sizes[1]);

    std::vector<double> out(values.num_genes());
    for (std::size_t g = 0; g < values.num_genes(); ++g) {
        auto mom = detail::group_moments(values.row(g), labels.groups(), sizes);
        double diff = mom.mean[0] - mom.mean[1];
        switch (stat) {
            case RankingStat::SignalToNoise: {
                double sd0 = std::sqrt(mom.ss[0] / (n0 - 1));
                double sd1 = std::sqrt(mom.ss[1] / (n1 - 1));
                sd0 = std::max({sd0, 0.2 * std::abs(mom.mean[0]), 1e-8});
                sd1 = std::max({sd1, 0.2 * std::abs(mom.mean[1]), 1e-8});
                out[g] = diff / (sd0 + sd1);
                break;
            }
            case RankingStat::TStatistic: {
                double se = std::sqrt(mom.ss[0] / (n0 - 1) / n0 + mom.ss[1] / (n1 - 1) / n1);
                out[g] = diff == 0 ? 0 : diff / std::max(se, 1e-8);
                break;
            }
            default:
                out[g] = diff;
                break;
        }
    }
    return out;
}

inline RankedList ranking_stat(const TransformedMatrix& values, const ConditionLabels& labels, RankingStat stat) {
    return make_ranked_list(values.gene_ids, ranking_values(values, labels, stat), stat);
}

/**
 * Ranks genes by `sign(LFC) * -log10(max(raw_p, 1e-300))`.
 */
inline RankedList ranked_from_de(const DeTable& table) {
    std::vector<std::string> ids;
    std::vector<double> values;
    ids.reserve(table.rows.size());
    values.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        double sign = (row.log2_fold_change > 0) - (row.log2_fold_change < 0);
        double score = sign * -std::log10(std::max(row.raw_p, 1e-300));
        ids.push_back(row.gene_id);
        values.push_back(score + 0.0);
    }
    return make_ranked_list(ids, values, RankingStat::DeDerived);
}

/**
 * Genes with `adjusted_p < alpha`, in table order.
 */
inline std::vector<std::string> de_gene_list(const DeTable& table, double alpha) {
    if (!(alpha > 0 && alpha < 1)) {
        throw Error(Errc::InvalidConfig, "alpha must lie in (0, 1)");
    }
    std::vector<std::string> out;
    for (const auto& row : table.rows) {
        if (row.adjusted_p < alpha) {
            out.push_back(row.gene_id);
        }
    }
    return out;
}

}

#endif
