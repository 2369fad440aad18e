#include <gtest/gtest.h>

#include <random>

#include <gsaudit/enrichment.hpp>
#include <gsaudit/preprocess.hpp>
#include <gsaudit/synthdata.hpp>

#include "oracles.hpp"

using namespace gsaudit;

namespace {

template <typename F>
Errc code_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return Errc::InvalidConfig;
}

RankedList list_of(std::vector<double> values) {
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < values.size(); ++i) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "g%04zu", i + 1);
        ids.push_back(buf);
    }
    return make_ranked_list(ids, values, RankingStat::DiffOfClasses);
}

struct NullData {
    TransformedMatrix values;
    ConditionLabels labels;
    GeneSetCollection sets;
};

NullData null_data(std::uint64_t seed, std::size_t genes = 500, std::size_t sets = 20) {
    SimSpec spec;
    spec.genes = genes;
    spec.samples = {6, 6};
    spec.seed = seed;
    auto sim = simulate(spec);
    auto coll = random_collection(sim.counts.gene_ids(), sets, seed, 10, 40);
    return {transform(sim.counts, TransformMethod::LogCpm), sim.labels, coll};
}

}

TEST(EnrichmentScore, WorkedExample) {
    auto ranked = list_of({4, 3, 2, 1});
    EXPECT_NEAR(enrichment_score(ranked, {"g0001", "g0003"}, 1.0), 2.0 / 3, 1e-12);
}

TEST(EnrichmentScore, SingleLeadingMember) {
    auto ranked = list_of({4, 3, 2, 1});
    EXPECT_DOUBLE_EQ(enrichment_score(ranked, {"g0001"}, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(enrichment_score(ranked, {"g0004"}, 0.0), -1.0);
}

TEST(EnrichmentScore, Errors) {
    auto ranked = list_of({4, 3, 2, 1});
    EXPECT_EQ(code_of([&] { enrichment_score(ranked, {"g0001", "g0002", "g0003", "g0004"}, 1.0); }), Errc::NoComplement);
    EXPECT_EQ(code_of([&] { enrichment_score(ranked, {"zzz"}, 1.0); }), Errc::EmptySetInList);
}

TEST(EnrichmentScore, MatchesKsOracles) {
    std::mt19937_64 rng(14);
    std::normal_distribution<double> z(0, 1);
    for (int rep = 0; rep < 300; ++rep) {
        const std::size_t n = 2 + rng() % 60;
        std::vector<double> v(n);
        for (auto& x : v) {
            x = z(rng);
        }
        auto ranked = list_of(v);
        std::vector<int> in_set(n, 0);
        std::vector<std::string> members;
        while (members.empty() || members.size() == n) {
            members.clear();
            for (std::size_t i = 0; i < n; ++i) {
                in_set[i] = rng() % 3 == 0;
                if (in_set[i]) {
                    members.push_back(ranked.gene_ids[i]);
                }
            }
        }
        const double es0 = enrichment_score(ranked, members, 0.0);
        EXPECT_NEAR(es0, oracle::unweighted_ks(in_set), 1e-12);
        for (double e : {1.0, 1.5, 2.0}) {
            const double es = enrichment_score(ranked, members, e);
            const auto [hi, lo] = oracle::weighted_ks_extremes(ranked.values, in_set, e);
            if (std::abs(hi + lo) > 1e-12) {
                EXPECT_NEAR(es, oracle::weighted_ks(ranked.values, in_set, e), 1e-12);
            } else {
                EXPECT_NEAR(std::abs(es), hi, 1e-12);
            }
            EXPECT_GE(es, -1.0);
            EXPECT_LE(es, 1.0);
        }
    }
}

TEST(EnrichmentScore, NegationAndReversal) {
    std::mt19937_64 rng(15);
    std::normal_distribution<double> z(0, 1);
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t n = 10 + rng() % 30;
        RankedList a = list_of(std::vector<double>(n));
        for (auto& x : a.values) {
            x = z(rng);
        }
        std::sort(a.values.begin(), a.values.end(), std::greater<>());
        RankedList b;
        b.gene_ids.assign(a.gene_ids.rbegin(), a.gene_ids.rend());
        for (auto it = a.values.rbegin(); it != a.values.rend(); ++it) {
            b.values.push_back(-*it);
        }
        std::vector<std::string> members;
        for (std::size_t i = 0; i < n; i += 3) {
            members.push_back(a.gene_ids[i]);
        }
        std::vector<int> in_set(n, 0);
        for (std::size_t i = 0; i < n; i += 3) {
            in_set[i] = 1;
        }
        for (double e : {0.0, 1.0, 2.0}) {
            const auto [hi, lo] = oracle::weighted_ks_extremes(a.values, in_set, e);
            if (std::abs(hi + lo) < 1e-12) {
                // Equal positive and negative excursions: the sign is a tie-break, only the magnitude is symmetric.
                EXPECT_NEAR(std::abs(enrichment_score(b, members, e)), std::abs(enrichment_score(a, members, e)), 1e-12);
                continue;
            }
            EXPECT_NEAR(enrichment_score(b, members, e), -enrichment_score(a, members, e), 1e-12);
        }
    }
}

TEST(GseaPreranked, SizeFilter) {
    auto ranked = list_of({5, 4, 3, 2, 1, 0, -1});
    GeneSetCollection sets("c", {GeneSet{"tiny", "", {"g0001"}}});
    EXPECT_EQ(code_of([&] { gsea_preranked(ranked, sets, GseaOptions{}, 1); }), Errc::EmptyCollectionAfterFilter);
}

TEST(GseaPreranked, TopSetEnriched) {
    std::vector<double> v(200);
    for (std::size_t i = 0; i < 200; ++i) {
        v[i] = 200.0 - static_cast<double>(i);
    }
    auto ranked = list_of(v);
    std::vector<std::string> top(ranked.gene_ids.begin(), ranked.gene_ids.begin() + 20);
    std::vector<std::string> spread;
    for (std::size_t i = 0; i < 200; i += 10) {
        spread.push_back(ranked.gene_ids[i]);
    }
    GeneSetCollection sets("c", {GeneSet{"top", "", top}, GeneSet{"spread", "", spread}});
    GseaOptions opt;
    opt.permutations = 200;
    auto t = gsea_preranked(ranked, sets, opt, 3);
    EXPECT_GT(t.find("top")->statistic, 0);
    EXPECT_LT(t.find("top")->raw_p, 0.01);
    EXPECT_TRUE(t.find("top")->significant);
    EXPECT_GT(t.find("spread")->raw_p, 0.05);
    for (const auto& r : t.rows) {
        EXPECT_GT(r.raw_p, 0.0);
        EXPECT_LE(r.raw_p, 1.0);
        EXPECT_LE(r.adjusted, 1.0);
    }
}

TEST(GseaPhenotype, SharesScoreWithPreranked) {
    auto data = null_data(4, 200, 8);
    GseaOptions opt;
    opt.exponent = 0;
    opt.permutations = 50;
    auto ranking = ranking_stat(data.values, data.labels, RankingStat::SignalToNoise);
    auto ph = gsea_phenotype(data.values, data.labels, data.sets, RankingStat::SignalToNoise, opt, 5);
    auto pr = gsea_preranked(ranking, data.sets, opt, 5);
    for (const auto& set : data.sets.sets()) {
        const double es = enrichment_score(ranking, set.members, 0.0);
        auto* a = ph.find(set.name);
        auto* b = pr.find(set.name);
        ASSERT_TRUE(a && b);
        EXPECT_EQ(a->statistic > 0, es > 0);
        EXPECT_EQ(b->statistic > 0, es > 0);
    }
}

TEST(GseaPhenotype, NullCalibration) {
    double frac_sum = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto data = null_data(seed);
        GseaOptions opt;
        opt.permutations = 100;
        auto t = gsea_phenotype(data.values, data.labels, data.sets, RankingStat::SignalToNoise, opt, seed);
        frac_sum += static_cast<double>(t.significant_count()) / static_cast<double>(t.rows.size());
    }
    EXPECT_LE(frac_sum / 20, 0.35);
}

TEST(GseaPhenotype, DegenerateDesign) {
    auto data = null_data(2, 100, 5);
    std::vector<int> g(12, 1);
    g[0] = 0;
    EXPECT_EQ(code_of([&] { gsea_phenotype(data.values, data.labels.with_groups(g), data.sets, RankingStat::SignalToNoise, GseaOptions{}, 1); }),
              Errc::DegenerateDesign);
}

TEST(Gsea, ThreadCountDoesNotChangeResults) {
    auto data = null_data(6, 300, 15);
    GseaOptions one;
    one.permutations = 60;
    GseaOptions many = one;
    many.num_threads = 4;
    auto a = gsea_phenotype(data.values, data.labels, data.sets, RankingStat::TStatistic, one, 8);
    auto b = gsea_phenotype(data.values, data.labels, data.sets, RankingStat::TStatistic, many, 8);
    auto ranking = ranking_stat(data.values, data.labels, RankingStat::TStatistic);
    auto c = gsea_preranked(ranking, data.sets, one, 8);
    auto d = gsea_preranked(ranking, data.sets, many, 8);
    ASSERT_EQ(a.rows.size(), b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        EXPECT_EQ(a.rows[i].set, b.rows[i].set);
        EXPECT_EQ(a.rows[i].statistic, b.rows[i].statistic);
        EXPECT_EQ(a.rows[i].adjusted, b.rows[i].adjusted);
        EXPECT_EQ(c.rows[i].set, d.rows[i].set);
        EXPECT_EQ(c.rows[i].raw_p, d.rows[i].raw_p);
        EXPECT_EQ(c.rows[i].adjusted, d.rows[i].adjusted);
    }
}
