#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include <gsaudit/io.hpp>

using namespace gsaudit;

namespace {

EnrichmentTable table_of(std::vector<double> adjusted, Engine engine = Engine::Ora) {
    EnrichmentTable t;
    t.engine = engine;
    for (std::size_t i = 0; i < adjusted.size(); ++i) {
        t.rows.push_back(EnrichmentRow{"set" + std::to_string(i), 0.5 * static_cast<double>(i), std::min(1.0, adjusted[i]), adjusted[i], 0, 1, false});
    }
    return t;
}

}

TEST(AssembleRanks, DenseRanks) {
    auto t = assemble_ranks(table_of({0.01, 0.5, 0.5, 1.0, 1.0}));
    std::vector<int> dense;
    std::vector<double> rel;
    for (const auto& r : t.rows) {
        dense.push_back(r.dense_rank);
        rel.push_back(r.relative_rank);
    }
    EXPECT_EQ(dense, (std::vector<int>{1, 2, 2, 3, 3}));
    EXPECT_DOUBLE_EQ(rel[0], 1.0 / 3);
    EXPECT_DOUBLE_EQ(rel[1], 2.0 / 3);
    EXPECT_DOUBLE_EQ(rel[2], 2.0 / 3);
    EXPECT_EQ(rel[3], 1.0);
    EXPECT_EQ(rel[4], 1.0);
    EXPECT_EQ(t.significant_count(), 1u);
}

TEST(AssembleRanks, AllOnesAndSingleRow) {
    for (const auto& r : assemble_ranks(table_of({1, 1, 1})).rows) {
        EXPECT_EQ(r.relative_rank, 1.0);
        EXPECT_EQ(r.dense_rank, 1);
    }
    EXPECT_EQ(assemble_ranks(table_of({0.001})).rows[0].relative_rank, 1.0);
}

TEST(AssembleRanks, EngineThresholds) {
    auto ora = assemble_ranks(table_of({0.04, 0.05, 0.2}));
    EXPECT_EQ(ora.significant_count(), 1u);
    auto gsea = assemble_ranks(table_of({0.04, 0.05, 0.2, 0.25}, Engine::GseaPreranked));
    EXPECT_EQ(gsea.significant_count(), 3u);
}

TEST(AssembleRanks, EmptyTable) {
    try {
        assemble_ranks(EnrichmentTable{});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::EmptyTable);
    }
}

TEST(AssembleRanks, RandomTableProperties) {
    std::mt19937_64 rng(31);
    for (int rep = 0; rep < 1000; ++rep) {
        std::vector<double> adj(1 + rng() % 40);
        for (auto& a : adj) {
            const auto r = rng() % 10;
            a = r < 3 ? 1.0 : (r < 5 ? static_cast<double>(rng() % 8 + 1) / 8 : std::ldexp(static_cast<double>(rng() >> 11), -53));
            a = std::max(a, 1e-300);
        }
        auto t = assemble_ranks(table_of(adj));
        int max_rank = 0;
        for (const auto& r : t.rows) {
            max_rank = std::max(max_rank, r.dense_rank);
        }
        std::vector<char> seen(max_rank + 1, 0);
        for (const auto& a : t.rows) {
            seen[a.dense_rank] = 1;
            if (a.adjusted >= 1) {
                ASSERT_EQ(a.relative_rank, 1.0);
            }
            ASSERT_GT(a.relative_rank, 0.0);
            ASSERT_LE(a.relative_rank, 1.0);
            for (const auto& b : t.rows) {
                if (a.adjusted < b.adjusted) {
                    ASSERT_LT(a.dense_rank, b.dense_rank);
                    ASSERT_LE(a.relative_rank, b.relative_rank);
                } else if (a.adjusted == b.adjusted) {
                    ASSERT_EQ(a.dense_rank, b.dense_rank);
                }
            }
        }
        for (int k = 1; k <= max_rank; ++k) {
            ASSERT_TRUE(seen[k]) << "dense ranks must be consecutive";
        }
    }
}

TEST(TableIo, TsvRoundTrip) {
    auto t = assemble_ranks(table_of({0.013, 0.5, 1.0 / 3, 1.0}, Engine::Padog));
    std::stringstream ss;
    write_enrichment_tsv(ss, t);
    auto back = read_enrichment_tsv(ss, Engine::Padog);
    ASSERT_EQ(back.rows.size(), t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        EXPECT_EQ(back.rows[i].set, t.rows[i].set);
        EXPECT_EQ(back.rows[i].statistic, t.rows[i].statistic);
        EXPECT_EQ(back.rows[i].raw_p, t.rows[i].raw_p);
        EXPECT_EQ(back.rows[i].adjusted, t.rows[i].adjusted);
        EXPECT_EQ(back.rows[i].dense_rank, t.rows[i].dense_rank);
        EXPECT_EQ(back.rows[i].relative_rank, t.rows[i].relative_rank);
        EXPECT_EQ(back.rows[i].significant, t.rows[i].significant);
    }
}

TEST(TableIo, JsonRoundTrip) {
    auto t = assemble_ranks(table_of({0.2, 0.1, 0.7}, Engine::GseaPhenotype));
    auto back = enrichment_from_json(json::parse(to_json(t).dump()));
    EXPECT_EQ(back.engine, Engine::GseaPhenotype);
    ASSERT_EQ(back.rows.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(back.rows[i].adjusted, t.rows[i].adjusted);
        EXPECT_EQ(back.rows[i].relative_rank, t.rows[i].relative_rank);
    }
}

TEST(TableIo, ShortestRoundTripNumbers) {
    for (double v : {0.1, 1.0 / 3, 1e-300, 2.5e-17, 123456.789}) {
        EXPECT_EQ(parse_double(format_double(v)), v);
    }
    EXPECT_EQ(format_double(1.0), "1");
}
