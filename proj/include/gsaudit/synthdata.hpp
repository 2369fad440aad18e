#ifndef GSAUDIT_SYNTHDATA_HPP
#define GSAUDIT_SYNTHDATA_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>

#include "corpus.hpp"
#include "random.hpp"

/**
 * @file synthdata.hpp
 * @brief Seeded negative-binomial count simulator with optional set-level correlation and spiked signal.
 */

namespace gsaudit {

struct SimSpec {
    std::size_t genes = 2000;
    std::array<std::size_t, 2> samples{10, 10};
    double base_mean = 100;
    double dispersion = 0.1;
    double within_set_correlation = 0;
    double de_fraction = 0;
    double lfc = 0;
    std::uint64_t seed = 1;
    /** Also draw per-gene transcript lengths. */
    bool lengths = true;

    void validate() const {
        auto fail = [](const std::string& what) { throw Error(Errc::InvalidSpec, what); };
        if (genes < 1 || samples[0] < 1 || samples[1] < 1) {
            fail("genes and both group sizes must be at least 1");
        }
        if (!(base_mean > 0) || !std::isfinite(base_mean)) {
            fail("base mean must be positive");
        }
        if (!(dispersion > 0) || !std::isfinite(dispersion)) {
            fail("dispersion must be positive");
        }
        if (!(within_set_correlation >= 0 && within_set_correlation < 1)) {
            fail("within-set correlation must lie in [0, 1)");
        }
        if (within_set_correlation * (1 + dispersion) >= 1) {
            fail("within-set correlation too large for the dispersion: needs correlation * (1 + dispersion) < 1");
        }
        if (!(de_fraction >= 0 && de_fraction <= 1)) {
            fail("DE fraction must lie in [0, 1]");
        }
        if (!std::isfinite(lfc)) {
            fail("log fold change must be finite");
        }
    }
};

struct SimTruth {
    std::vector<std::string> de_genes;
    std::vector<std::string> enriched_sets;
};

struct SimResult {
    CountMatrix counts;
    ConditionLabels labels;
    SimTruth truth;
};

namespace detail {

inline std::string padded(std::string_view prefix, std::size_t value, std::size_t total) {
    const auto width = std::to_string(total).size();
    auto digits = std::to_string(value);
    return std::string(prefix) + std::string(width - std::min(width, digits.size()), '0') + digits;
}

}

inline std::vector<std::string> simulated_gene_ids(std::size_t genes) {
    std::vector<std::string> ids;
    ids.reserve(genes);
    for (std::size_t g = 0; g < genes; ++g) {
        ids.push_back(detail::padded("g", g + 1, genes));
    }
    return ids;
}

/**
 * `count` sets of uniformly drawn sizes in `[min_size, max_size]` over `gene_ids`.
 */
inline GeneSetCollection random_collection(const std::vector<std::string>& gene_ids, std::size_t count, std::uint64_t seed, std::size_t min_size = 10,
                                           std::size_t max_size = 50, std::string name = "random")
{
    if (min_size < 1 || min_size > max_size || max_size > gene_ids.size()) {
        throw Error(Errc::InvalidSpec, "set sizes must satisfy 1 <= min <= max <= number of genes");
    }
    std::vector<GeneSet> sets;
    std::vector<std::string> pool = gene_ids;
    for (std::size_t i = 0; i < count; ++i) {
        Rng rng(derive_seed(seed, name, i));
        const auto size = min_size + uniform_index(rng, max_size - min_size + 1);
        partial_shuffle(pool, size, rng);
        std::vector<std::string> members(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(size));
        std::sort(members.begin(), members.end());
        sets.push_back(GeneSet{detail::padded("set", i + 1, count), "simulated", std::move(members)});
    }
    return GeneSetCollection(std::move(name), std::move(sets));
}

/**
 * Draws counts `Poisson(mu_g * f * G)` with `G ~ Gamma(1/alpha, alpha)` and gene means `mu_g = base_mean * LogNormal(0, 1)`.
 *
 * A gene in at least one set shares the first such set's per-sample factor `f ~ LogNormal(-s^2/2, s^2)`, with
 * `exp(s^2) - 1 = r (1/base_mean + alpha) / (1 - r (1 + alpha))` so that two members at the base mean correlate at `r`.
 * With sets, the DE genes are the members of whole sets taken in random order until `de_fraction` of all genes are
 * covered; otherwise they are a random subset. DE genes have mean `mu_g * 2^lfc` in the second group.
 *
 * Stream layout: gene `g` uses `derive_seed(seed, "sim-gene", g)` for its mean, length, gamma and Poisson draws in that
 * order; set `k` uses `derive_seed(seed, "sim-latent", k)` for its factors; DE selection uses `derive_seed(seed, "sim-de")`.
 */
inline SimResult simulate(const SimSpec& spec, const GeneSetCollection* sets = nullptr) {
    spec.validate();
    if (spec.within_set_correlation > 0 && (!sets || sets->empty())) {
        throw Error(Errc::MissingSets, "within-set correlation needs a gene set collection");
    }
    const std::size_t ng = spec.genes;
    const std::size_t n0 = spec.samples[0], n1 = spec.samples[1], ns = n0 + n1;
    auto ids = simulated_gene_ids(ng);
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t g = 0; g < ng; ++g) {
        index.emplace(ids[g], g);
    }

    // First containing set per gene.
    std::vector<std::ptrdiff_t> home(ng, -1);
    if (sets) {
        for (std::size_t k = 0; k < sets->size(); ++k) {
            for (const auto& m : sets->sets()[k].members) {
                auto it = index.find(m);
                if (it != index.end() && home[it->second] < 0) {
                    home[it->second] = static_cast<std::ptrdiff_t>(k);
                }
            }
        }
    }

    std::vector<std::vector<double>> factor;
    if (spec.within_set_correlation > 0) {
        const double r = spec.within_set_correlation, a = spec.dispersion;
        const double v = r * (1 / spec.base_mean + a) / (1 - r * (1 + a));
        const double s2 = std::log1p(v);
        factor.resize(sets->size());
        for (std::size_t k = 0; k < sets->size(); ++k) {
            Rng rng(derive_seed(spec.seed, "sim-latent", k));
            boost::random::normal_distribution<double> z(-s2 / 2, std::sqrt(s2));
            factor[k].resize(ns);
            for (auto& f : factor[k]) {
                f = std::exp(z(rng));
            }
        }
    }

    SimTruth truth;
    std::vector<char> is_de(ng, 0);
    const auto target = static_cast<std::size_t>(std::llround(spec.de_fraction * static_cast<double>(ng)));
    if (target > 0) {
        Rng rng(derive_seed(spec.seed, "sim-de"));
        std::size_t covered = 0;
        if (sets && !sets->empty()) {
            std::vector<std::size_t> order(sets->size());
            std::iota(order.begin(), order.end(), std::size_t{0});
            fisher_yates(order, rng);
            for (auto k : order) {
                if (covered >= target) {
                    break;
                }
                bool any = false;
                for (const auto& m : sets->sets()[k].members) {
                    auto it = index.find(m);
                    if (it != index.end()) {
                        any = true;
                        if (!is_de[it->second]) {
                            is_de[it->second] = 1;
                            ++covered;
                        }
                    }
                }
                if (any) {
                    truth.enriched_sets.push_back(sets->sets()[k].name);
                }
            }
        } else {
            std::vector<std::size_t> order(ng);
            std::iota(order.begin(), order.end(), std::size_t{0});
            partial_shuffle(order, target, rng);
            for (std::size_t i = 0; i < target; ++i) {
                is_de[order[i]] = 1;
            }
        }
    }
    const double fold = std::exp2(spec.lfc);

    std::vector<std::int64_t> counts(ng * ns);
    std::optional<std::vector<std::int64_t>> lengths;
    if (spec.lengths) {
        lengths.emplace(ng);
    }
    const double shape = 1 / spec.dispersion;
    for (std::size_t g = 0; g < ng; ++g) {
        Rng rng(derive_seed(spec.seed, "sim-gene", g));
        boost::random::normal_distribution<double> z(0, 1);
        const double mu = spec.base_mean * std::exp(z(rng));
        const double len = std::exp(std::log(2000.0) + 0.5 * z(rng));
        if (lengths) {
            (*lengths)[g] = std::max<std::int64_t>(1, std::llround(len));
        }
        boost::random::gamma_distribution<double> gamma(shape, spec.dispersion);
        for (std::size_t j = 0; j < ns; ++j) {
            double m = mu * gamma(rng);
            if (j >= n0 && is_de[g]) {
                m *= fold;
            }
            if (!factor.empty() && home[g] >= 0) {
                m *= factor[static_cast<std::size_t>(home[g])][j];
            }
            if (m > 0) {
                boost::random::poisson_distribution<std::int64_t, double> pois(m);
                counts[g * ns + j] = pois(rng);
            }
        }
    }

    if (spec.lfc != 0) {
        for (std::size_t g = 0; g < ng; ++g) {
            if (is_de[g]) {
                truth.de_genes.push_back(ids[g]);
            }
        }
    } else {
        truth.enriched_sets.clear();
    }

    std::vector<std::string> samples;
    std::vector<int> groups;
    for (std::size_t j = 0; j < ns; ++j) {
        samples.push_back("s" + std::to_string(j + 1));
        groups.push_back(j < n0 ? 0 : 1);
    }
    return SimResult{CountMatrix(std::move(ids), std::move(samples), std::move(counts), std::move(lengths)), ConditionLabels({"A", "B"}, std::move(groups)),
                     std::move(truth)};
}

}

#endif
