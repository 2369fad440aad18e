#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>

#include <gsaudit/synthdata.hpp>

using namespace gsaudit;

namespace {

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n, my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

std::vector<double> row_of(const CountMatrix& m, std::size_t g) {
    std::vector<double> out;
    for (std::size_t s = 0; s < m.num_samples(); ++s) {
        out.push_back(static_cast<double>(m.at(g, s)));
    }
    return out;
}

}

TEST(Simulate, NullHasEmptyTruth) {
    SimSpec spec;
    spec.genes = 100;
    auto sim = simulate(spec);
    EXPECT_TRUE(sim.truth.de_genes.empty());
    EXPECT_TRUE(sim.truth.enriched_sets.empty());
    EXPECT_EQ(sim.counts.num_genes(), 100u);
    EXPECT_EQ(sim.counts.num_samples(), 20u);
    EXPECT_EQ(sim.labels.group_sizes(), (std::array<std::size_t, 2>{10, 10}));
    EXPECT_EQ(sim.counts.gene_ids().front(), "g001");
    EXPECT_EQ(sim.counts.samples().front(), "s1");
    EXPECT_TRUE(sim.counts.has_lengths());
}

TEST(Simulate, ZeroFoldChangeHasNoEffect) {
    SimSpec spec;
    spec.genes = 200;
    spec.de_fraction = 0.5;
    spec.lfc = 0;
    auto sets = random_collection(simulated_gene_ids(200), 5, 1);
    auto sim = simulate(spec, &sets);
    EXPECT_TRUE(sim.truth.de_genes.empty());
    EXPECT_TRUE(sim.truth.enriched_sets.empty());
    SimSpec null = spec;
    null.de_fraction = 0;
    EXPECT_EQ(simulate(null, &sets).counts.counts(), sim.counts.counts());
}

TEST(Simulate, SpikedSignal) {
    SimSpec spec;
    spec.genes = 400;
    spec.de_fraction = 0.1;
    spec.lfc = 3;
    auto plain = simulate(spec);
    EXPECT_EQ(plain.truth.de_genes.size(), 40u);
    auto sets = random_collection(simulated_gene_ids(400), 20, 2, 10, 20);
    auto sim = simulate(spec, &sets);
    EXPECT_GE(sim.truth.de_genes.size(), 40u);
    EXPECT_FALSE(sim.truth.enriched_sets.empty());
    for (const auto& name : sim.truth.enriched_sets) {
        for (const auto& m : sets.find(name)->members) {
            EXPECT_NE(std::find(sim.truth.de_genes.begin(), sim.truth.de_genes.end(), m), sim.truth.de_genes.end());
        }
    }
    // Group B means are about eight times group A for spiked genes.
    double up = 0;
    for (const auto& id : plain.truth.de_genes) {
        std::size_t g = std::find(plain.counts.gene_ids().begin(), plain.counts.gene_ids().end(), id) - plain.counts.gene_ids().begin();
        double a = 0, b = 0;
        for (std::size_t s = 0; s < 20; ++s) {
            (s < 10 ? a : b) += static_cast<double>(plain.counts.at(g, s));
        }
        up += b > a;
    }
    EXPECT_GE(up, 38);
}

TEST(Simulate, Deterministic) {
    SimSpec spec;
    spec.genes = 150;
    spec.seed = 77;
    spec.within_set_correlation = 0.2;
    auto sets = random_collection(simulated_gene_ids(150), 6, 77);
    auto a = simulate(spec, &sets), b = simulate(spec, &sets);
    EXPECT_EQ(a.counts.counts(), b.counts.counts());
    EXPECT_EQ(*a.counts.lengths(), *b.counts.lengths());
    spec.seed = 78;
    EXPECT_NE(simulate(spec, &sets).counts.counts(), a.counts.counts());
}

TEST(Simulate, OverDispersed) {
    SimSpec spec;
    spec.genes = 1000;
    spec.samples = {25, 25};
    auto sim = simulate(spec);
    double excess = 0;
    for (std::size_t g = 0; g < 1000; ++g) {
        auto r = row_of(sim.counts, g);
        const double m = std::accumulate(r.begin(), r.end(), 0.0) / 50;
        double v = 0;
        for (auto x : r) {
            v += (x - m) * (x - m);
        }
        v /= 49;
        excess += v - m;
    }
    EXPECT_GT(excess / 1000, 0);
}

TEST(Simulate, WithinSetCorrelation) {
    SimSpec spec;
    spec.genes = 60;
    spec.samples = {300, 300};
    spec.within_set_correlation = 0.3;
    spec.lengths = false;
    auto ids = simulated_gene_ids(60);
    GeneSetCollection sets("c", {GeneSet{"S", "", std::vector<std::string>(ids.begin(), ids.begin() + 20)}});
    auto sim = simulate(spec, &sets);
    EXPECT_FALSE(sim.counts.has_lengths());
    double inside = 0, outside = 0;
    int n_in = 0, n_out = 0;
    for (std::size_t i = 0; i < 60; ++i) {
        for (std::size_t j = i + 1; j < 60; ++j) {
            const double r = pearson(row_of(sim.counts, i), row_of(sim.counts, j));
            if (i < 20 && j < 20) {
                inside += r;
                ++n_in;
            } else if (i >= 20) {
                outside += r;
                ++n_out;
            }
        }
    }
    EXPECT_GT(inside / n_in, 0.15);
    EXPECT_LT(inside / n_in, 0.45);
    EXPECT_LT(std::abs(outside / n_out), 0.03);
}

TEST(Simulate, NullGroupsExchangeable) {
    SimSpec spec;
    spec.genes = 2000;
    spec.seed = 4;
    auto sim = simulate(spec);
    double log_ratio = 0;
    for (std::size_t g = 0; g < 2000; ++g) {
        double a = 0, b = 0;
        for (std::size_t s = 0; s < 20; ++s) {
            (s < 10 ? a : b) += static_cast<double>(sim.counts.at(g, s));
        }
        log_ratio += std::log((b + 1) / (a + 1));
    }
    EXPECT_LT(std::abs(log_ratio / 2000), 0.02);
}

TEST(Simulate, Errors) {
    SimSpec spec;
    spec.within_set_correlation = 0.3;
    try {
        simulate(spec);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::MissingSets);
    }
    for (auto bad : {SimSpec{0}, SimSpec{10, {0, 3}}, SimSpec{10, {3, 3}, -1}, SimSpec{10, {3, 3}, 5, 0}}) {
        EXPECT_THROW(bad.validate(), Error);
    }
    SimSpec high;
    high.within_set_correlation = 0.95;
    EXPECT_THROW(high.validate(), Error);
}

TEST(RandomCollection, SizesAndNames) {
    auto ids = simulated_gene_ids(500);
    auto c = random_collection(ids, 30, 9, 10, 50, "rand");
    EXPECT_EQ(c.name(), "rand");
    EXPECT_EQ(c.size(), 30u);
    EXPECT_EQ(c.sets().front().name, "set01");
    for (const auto& s : c.sets()) {
        EXPECT_GE(s.members.size(), 10u);
        EXPECT_LE(s.members.size(), 50u);
        std::set<std::string> distinct(s.members.begin(), s.members.end());
        EXPECT_EQ(distinct.size(), s.members.size());
    }
    EXPECT_EQ(random_collection(ids, 30, 9, 10, 50, "rand").sets(), c.sets());
}
