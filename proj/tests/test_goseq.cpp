#include <gtest/gtest.h>

#include <random>

#include <gsaudit/enrichment.hpp>

#include "oracles.hpp"

using namespace gsaudit;

namespace {

std::vector<std::string> genes(int from, int to) {
    std::vector<std::string> out;
    for (int i = from; i <= to; ++i) {
        out.push_back("g" + std::to_string(i));
    }
    return out;
}

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

}

TEST(PwfFit, PoolAdjacentViolators) {
    std::vector<int> ind{0, 1, 0, 1};
    std::vector<double> bias{1, 2, 3, 4};
    // Fitted (0, 0.5, 0.5, 1), then clipped to [1/8, 7/8].
    auto w = pwf_fit(ind, bias);
    EXPECT_DOUBLE_EQ(w[0], 0.125);
    EXPECT_DOUBLE_EQ(w[1], 0.5);
    EXPECT_DOUBLE_EQ(w[2], 0.5);
    EXPECT_DOUBLE_EQ(w[3], 0.875);
}

TEST(PwfFit, MonotoneInputUnchanged) {
    std::vector<int> ind{0, 0, 1, 1, 0, 0, 1, 1};
    std::vector<double> bias{1, 2, 7, 8, 3, 4, 5, 6};
    auto w = pwf_fit(ind, bias);
    const double lo = 1.0 / 16, hi = 15.0 / 16;
    EXPECT_EQ(w, (std::vector<double>{lo, lo, hi, hi, lo, lo, hi, hi}));
}

TEST(PwfFit, TiedCovariatesShareValue) {
    std::vector<int> ind{1, 0, 0, 1};
    std::vector<double> bias{1, 1, 2, 2};
    auto w = pwf_fit(ind, bias);
    EXPECT_DOUBLE_EQ(w[0], w[1]);
    EXPECT_DOUBLE_EQ(w[2], w[3]);
}

TEST(PwfFit, NonDecreasingInCovariate) {
    std::mt19937_64 rng(5);
    std::vector<int> ind(300);
    std::vector<double> bias(300);
    for (std::size_t i = 0; i < 300; ++i) {
        bias[i] = static_cast<double>(rng() % 1000);
        ind[i] = (rng() % 1000) < bias[i] * 0.5;
    }
    auto w = pwf_fit(ind, bias);
    for (std::size_t i = 0; i < 300; ++i) {
        for (std::size_t j = 0; j < 300; ++j) {
            if (bias[i] < bias[j]) {
                ASSERT_LE(w[i], w[j]);
            }
        }
        EXPECT_GT(w[i], 0.0);
        EXPECT_LT(w[i], 1.0);
    }
}

TEST(PwfFit, Degenerate) {
    std::vector<double> bias{1, 2, 3};
    EXPECT_EQ(code_of([&] { pwf_fit(std::vector<int>{1, 1, 1}, bias); }), Errc::DegeneratePwf);
    EXPECT_EQ(code_of([&] { pwf_fit(std::vector<int>{0, 0, 0}, bias); }), Errc::DegeneratePwf);
}

TEST(Wallenius, CentralCaseIsHypergeometric) {
    EXPECT_NEAR(wallenius_tail(4, 10, 4, 5, 1.0), 6.0 / 252, 1e-6);
    for (int N = 1; N <= 30; N += 3) {
        for (int K = 0; K <= N; K += 2) {
            for (int n = 0; n <= N; n += 3) {
                for (int k = std::max(0, n + K - N); k <= std::min(K, n); ++k) {
                    EXPECT_NEAR(wallenius_tail(k, N, K, n, 1.0), hypergeom_tail(k, N, K, n), 1e-6);
                }
            }
        }
    }
}

TEST(Wallenius, PmfSumsToOne) {
    for (double omega : {0.3, 1.0, 2.0, 7.5}) {
        double sum = 0;
        for (int x = 0; x <= 12; ++x) {
            sum += wallenius_pmf(x, 40, 12, 15, omega);
        }
        EXPECT_NEAR(sum, 1.0, 1e-8);
    }
}

TEST(Wallenius, AgreesWithUrnSimulation) {
    const double w = wallenius_tail(4, 20, 6, 8, 2.0);
    EXPECT_GT(w, hypergeom_tail(4, 20, 6, 8));
    EXPECT_NEAR(w, oracle::wallenius_urn_tail(4, 20, 6, 8, 2.0, 1000000, 77), 3e-3);
    const double low = wallenius_tail(3, 20, 6, 8, 0.5);
    EXPECT_LT(low, hypergeom_tail(3, 20, 6, 8));
    EXPECT_NEAR(low, oracle::wallenius_urn_tail(3, 20, 6, 8, 0.5, 1000000, 78), 3e-3);
}

TEST(Wallenius, NonpositiveOdds) {
    EXPECT_EQ(code_of([] { wallenius_tail(1, 10, 4, 5, 0.0); }), Errc::NonpositiveOdds);
    EXPECT_EQ(code_of([] { wallenius_tail(1, 10, 4, 5, -2.0); }), Errc::NonpositiveOdds);
}

TEST(Goseq, ConstantBiasMatchesOra) {
    std::mt19937_64 rng(21);
    std::vector<GeneSet> sets;
    for (int s = 0; s < 10; ++s) {
        std::vector<std::string> members;
        for (int i = 1; i <= 100; ++i) {
            if (rng() % 6 == 0) {
                members.push_back("g" + std::to_string(i));
            }
        }
        sets.push_back(GeneSet{"set" + std::to_string(s), "", members});
    }
    GeneSetCollection coll("c", sets);
    std::vector<std::string> de;
    for (int i = 1; i <= 100; ++i) {
        if (rng() % 4 == 0) {
            de.push_back("g" + std::to_string(i));
        }
    }
    auto tested = genes(1, 100);
    std::vector<double> flat(100, 3.0);
    for (auto universe : {UniverseChoice::AnnotatedGenes, UniverseChoice::AllTestedGenes}) {
        GoseqOptions opt;
        opt.universe = universe;
        auto g = goseq(de, tested, flat, coll, opt, 1);
        auto o = ora(de, coll, tested, OraOptions{universe, false});
        ASSERT_EQ(g.rows.size(), o.rows.size());
        for (const auto& row : o.rows) {
            EXPECT_NEAR(g.find(row.set)->raw_p, row.raw_p, 1e-6);
        }
    }
}

TEST(Goseq, EmptyDeListIsDegenerate) {
    GeneSetCollection coll("c", {GeneSet{"S", "", genes(1, 5)}});
    std::vector<double> bias(10, 1.0);
    EXPECT_EQ(code_of([&] { goseq({}, genes(1, 10), bias, coll, GoseqOptions{}, 1); }), Errc::DegeneratePwf);
}

TEST(Goseq, MissingCovariate) {
    GeneSetCollection coll("c", {GeneSet{"S", "", genes(1, 5)}});
    std::vector<double> bias(3, 1.0);
    EXPECT_EQ(code_of([&] { goseq(genes(1, 2), genes(1, 10), bias, coll, GoseqOptions{}, 1); }), Errc::BiasUnavailable);
}

TEST(Goseq, ResamplingTracksWallenius) {
    // 20 genes, short (g1..g10) and long (g11..g20); long genes are DE more often.
    // The class sets have uniform weight inside and outside, where the two-colour model is exact.
    auto tested = genes(1, 20);
    std::vector<double> bias(20);
    for (int i = 0; i < 20; ++i) {
        bias[i] = i < 10 ? 1 : 2;
    }
    std::vector<std::string> de{"g3", "g9", "g12", "g14", "g16", "g17", "g19", "g20"};
    GeneSetCollection coll("c", {GeneSet{"short", "", genes(1, 10)}, GeneSet{"long", "", genes(11, 20)},
                                 GeneSet{"mixed", "", {"g7", "g8", "g9", "g11", "g12", "g14"}}});
    GoseqOptions wal;
    wal.universe = UniverseChoice::AllTestedGenes;
    GoseqOptions res = wal;
    res.method = PvalueMethod::Resampling;
    res.resamples = 999;
    auto a = goseq(de, tested, bias, coll, wal, 1);
    auto b = goseq(de, tested, bias, coll, res, 42);
    for (const auto& row : a.rows) {
        EXPECT_NEAR(b.find(row.set)->raw_p, row.raw_p, 0.05) << row.set;
    }
}

TEST(Goseq, ResamplingDeterministicAcrossThreads) {
    auto tested = genes(1, 20);
    std::vector<double> bias(20);
    for (int i = 0; i < 20; ++i) {
        bias[i] = i % 7;
    }
    std::vector<std::string> de{"g1", "g5", "g7", "g14"};
    GeneSetCollection coll("c", {GeneSet{"a", "", genes(1, 8)}, GeneSet{"b", "", genes(6, 15)}});
    GoseqOptions o1;
    o1.method = PvalueMethod::Resampling;
    o1.resamples = 200;
    GoseqOptions o4 = o1;
    o4.num_threads = 4;
    auto a = goseq(de, tested, bias, coll, o1, 9), b = goseq(de, tested, bias, coll, o4, 9);
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        EXPECT_EQ(a.rows[i].raw_p, b.rows[i].raw_p);
    }
}
