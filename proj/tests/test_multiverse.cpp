#include <gtest/gtest.h>

#include <gsaudit/io.hpp>
#include <gsaudit/multiverse.hpp>
#include <gsaudit/synthdata.hpp>

using namespace gsaudit;

namespace {

ChoicePoint binary(std::string id) {
    ChoicePoint p;
    p.id = std::move(id);
    p.options = OptionList{{"d", "a"}, 0};
    return p;
}

ChoiceGraph two_point_graph() {
    return ChoiceGraph({binary("x"), binary("y")}, Engine::Ora, Goal::Kind::MaxDegs);
}

// Objective looked up by the options of x and y, e.g. "ad" for x=a, y=d.
struct TableEvaluator {
    std::map<std::string, double> values;
    std::shared_ptr<int> calls = std::make_shared<int>(0);

    EvalOutcome operator()(const Config& c) const {
        ++*calls;
        std::string key;
        for (const auto& [k, v] : c) {
            key += v;
        }
        return EvalOutcome{values.at(key), false, ""};
    }
};

EnrichmentTable table_of(std::vector<std::pair<std::string, double>> rows, Engine engine = Engine::Ora) {
    EnrichmentTable t;
    t.engine = engine;
    for (auto& [name, adj] : rows) {
        t.rows.push_back(EnrichmentRow{name, 0, adj, adj, 0, 1, false});
    }
    return assemble_ranks(std::move(t));
}

PipelineInputs small_inputs(double base_mean = 100, std::uint64_t seed = 3) {
    SimSpec spec;
    spec.genes = 300;
    spec.samples = {5, 5};
    spec.base_mean = base_mean;
    spec.seed = seed;
    spec.de_fraction = 0.1;
    spec.lfc = 2;
    auto sets = random_collection(simulated_gene_ids(spec.genes), 12, seed, 10, 30);
    auto sim = simulate(spec, &sets);
    return PipelineInputs{sim.counts, sim.labels, sets, std::nullopt, std::nullopt};
}

}

TEST(BuildGraph, GoseqPointKinds) {
    auto g = build_graph(Engine::Goseq, Goal::Kind::MaxDegs, Capabilities{true, true, true});
    EXPECT_EQ(g.size(), 6u);
    EXPECT_EQ(g.count(ChoiceKind::Parameter), 4u);
    EXPECT_EQ(g.find(choice::duplicates), nullptr);
}

TEST(BuildGraph, PadogHasNoParameterChoices) {
    for (auto caps : {Capabilities{}, Capabilities{true, true, true}}) {
        EXPECT_EQ(build_graph(Engine::Padog, Goal::Kind::MaxDegs, caps).count(ChoiceKind::Parameter), 0u);
    }
}

TEST(BuildGraph, CollectionOnlyForSetCountGoal) {
    const Capabilities all{true, true, true};
    for (auto e : {Engine::Ora, Engine::Goseq, Engine::GseaPhenotype, Engine::GseaPreranked, Engine::Padog}) {
        EXPECT_EQ(build_graph(e, Goal::Kind::MinAdjP, all).find(choice::collection), nullptr);
        EXPECT_EQ(build_graph(e, Goal::Kind::MinRelRank, all).find(choice::collection), nullptr);
        EXPECT_EQ(build_graph(e, Goal::Kind::MaxDegs, Capabilities{}).find(choice::collection), nullptr);
    }
    EXPECT_NE(build_graph(Engine::Ora, Goal::Kind::MaxDegs, all).find(choice::collection), nullptr);
}

TEST(BuildGraph, PrefilterOptionsFollowDeMethod) {
    auto g = build_graph(Engine::Ora, Goal::Kind::MaxDegs, Capabilities{});
    auto nb = g.resolve({{"de_method", "nb-wald"}});
    auto mt = g.resolve({{"de_method", "moderated-t"}});
    EXPECT_EQ(nb.at("prefilter"), "total>=10");
    EXPECT_EQ(mt.at("prefilter"), "expr-filter");
    EXPECT_EQ(g.space_size(), 2u * 2u * 2u);
    EXPECT_EQ(build_graph(Engine::GseaPhenotype, Goal::Kind::MaxDegs, Capabilities{}).space_size(), 2u * 2u * 3u * 4u);
}

TEST(ChoiceGraph, CanonicalIgnoresInactiveOptions) {
    auto g = build_graph(Engine::Ora, Goal::Kind::MaxDegs, Capabilities{});
    EXPECT_EQ(g.canonical({{"de_method", "moderated-t"}, {"prefilter", "total>=50"}}), g.canonical({{"de_method", "moderated-t"}}));
    EXPECT_EQ(g.canonical({{"unknown", "x"}}), g.canonical({}));
    EXPECT_EQ(g.canonical({}), "de_method=nb-wald;prefilter=total>=10;universe=annotated");
}

TEST(ChoiceGraph, Validation) {
    ChoicePoint lonely;
    lonely.id = "x";
    lonely.options = OptionList{{"only"}, 0};
    EXPECT_THROW(ChoiceGraph({lonely}, Engine::Ora, Goal::Kind::MaxDegs), Error);
    EXPECT_THROW(ChoiceGraph({binary("x"), binary("x")}, Engine::Ora, Goal::Kind::MaxDegs), Error);
}

TEST(ChoiceGraph, Reorder) {
    auto g = build_graph(Engine::Ora, Goal::Kind::MaxDegs, Capabilities{});
    auto r = reorder_graph(g, {"universe", "de_method", "prefilter"});
    EXPECT_EQ(r.points().front().id, "universe");
    EXPECT_EQ(r.defaults(), g.defaults());
    EXPECT_THROW(reorder_graph(g, {"prefilter", "de_method", "universe"}), Error);
    EXPECT_THROW(reorder_graph(g, {"de_method", "prefilter"}), Error);
    EXPECT_THROW(reorder_graph(g, {"de_method", "prefilter", "bogus"}), Error);
}

TEST(Objective, Examples) {
    EnrichmentTable t;
    for (double a : {0.01, 0.02, 0.03, 0.5}) {
        t.rows.push_back(EnrichmentRow{"s" + std::to_string(t.rows.size()), 0, a, a, 0, 1, false});
    }
    t = assemble_ranks(t);
    EXPECT_EQ(objective(t, Goal{Goal::Kind::MaxDegs, ""}), 3.0);
    EXPECT_EQ(objective(t, Goal{Goal::Kind::MinAdjP, "missing"}), 1.0);
    EXPECT_EQ(objective(t, Goal{Goal::Kind::MinRelRank, "missing"}), 1.0);
    EXPECT_EQ(objective(t, Goal{Goal::Kind::MinAdjP, "s1"}), 0.02);

    auto three = table_of({{"t", 0.01}, {"u", 0.2}, {"v", 0.7}});
    EXPECT_DOUBLE_EQ(objective(three, Goal{Goal::Kind::MinRelRank, "t"}), 1.0 / 3);
}

TEST(Goal, Names) {
    EXPECT_EQ(parse_goal("max-degs"), Goal::Kind::MaxDegs);
    EXPECT_EQ(parse_goal("min-adjp"), Goal::Kind::MinAdjP);
    EXPECT_EQ(parse_goal("min-relrank"), Goal::Kind::MinRelRank);
    EXPECT_THROW(parse_goal("max-sets"), Error);
}

TEST(Stepwise, AdoptsBothImprovements) {
    TableEvaluator f{{{"dd", 0}, {"ad", 1}, {"da", 2}, {"aa", 5}}};
    auto trace = stepwise_optimize(two_point_graph(), Goal{}, f);
    EXPECT_EQ(trace.default_objective, 0);
    EXPECT_EQ(trace.steps[0].adopted, "a");
    EXPECT_EQ(trace.steps[1].adopted, "a");
    EXPECT_EQ(trace.final_objective, 5);
    EXPECT_EQ(trace.steps[1].objective_before, 1);
}

TEST(Stepwise, GreedyMissesGlobalOptimum) {
    TableEvaluator f{{{"dd", 0}, {"ad", 0}, {"da", 1}, {"aa", 10}}};
    auto g = two_point_graph();
    auto trace = stepwise_optimize(g, Goal{}, f);
    EXPECT_EQ(trace.steps[0].adopted, "d");
    EXPECT_EQ(trace.final_config, (Config{{"x", "d"}, {"y", "a"}}));
    EXPECT_EQ(trace.final_objective, 1);
    auto ex = exhaustive_optimize(g, Goal{}, f);
    EXPECT_EQ(ex.objective, 10);
    EXPECT_EQ(ex.config, (Config{{"x", "a"}, {"y", "a"}}));
    EXPECT_EQ(ex.evaluated, 4u);
}

TEST(Stepwise, TieGoesToEarlierOption) {
    ChoicePoint p;
    p.id = "x";
    p.options = OptionList{{"d", "a", "b"}, 0};
    ChoiceGraph g({p}, Engine::Ora, Goal::Kind::MaxDegs);
    Evaluator f = [](const Config& c) {
        return EvalOutcome{c.at("x") == "d" ? 0.0 : 2.0, false, ""};
    };
    auto trace = stepwise_optimize(g, Goal{}, f);
    EXPECT_EQ(trace.final_config.at("x"), "a");
    EXPECT_EQ(trace.steps[0].evaluated.size(), 3u);
    EXPECT_EQ(exhaustive_optimize(g, Goal{}, f).objective, trace.final_objective);
}

TEST(Stepwise, MinimisingGoal) {
    TableEvaluator f{{{"dd", 0.5}, {"ad", 0.2}, {"da", 0.6}, {"aa", 0.1}}};
    Goal goal{Goal::Kind::MinAdjP, "t"};
    auto trace = stepwise_optimize(two_point_graph(), goal, f);
    EXPECT_EQ(trace.final_objective, 0.1);
    EXPECT_EQ(goal.improvement(trace.default_objective, trace.final_objective), 0.4);
}

TEST(Stepwise, FailuresScoreWorst) {
    Evaluator f = [](const Config& c) {
        if (c.at("x") == "a") {
            return EvalOutcome{99, true, "AllGenesFiltered"};
        }
        return EvalOutcome{1, false, ""};
    };
    auto trace = stepwise_optimize(two_point_graph(), Goal{}, f);
    EXPECT_EQ(trace.steps[0].evaluated[1].objective, 0);
    EXPECT_TRUE(trace.steps[0].evaluated[1].failed);
    EXPECT_EQ(trace.final_objective, 1);
}

TEST(Exhaustive, SearchSpaceCap) {
    TableEvaluator f{{{"dd", 0}, {"ad", 0}, {"da", 1}, {"aa", 10}}};
    try {
        exhaustive_optimize(two_point_graph(), Goal{}, f, 3);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::SearchSpaceTooLarge);
    }
}

TEST(Trace, JsonRoundTripAndReplay) {
    TableEvaluator f{{{"dd", 0}, {"ad", 1}, {"da", 2}, {"aa", 5}}};
    auto g = two_point_graph();
    auto trace = stepwise_optimize(g, Goal{}, f);
    auto back = trace_from_json(json::parse(to_json(trace).dump()));
    EXPECT_EQ(back.final_config, trace.final_config);
    EXPECT_EQ(back.final_objective, trace.final_objective);
    ASSERT_EQ(back.steps.size(), trace.steps.size());
    Config adopted;
    for (const auto& step : back.steps) {
        for (const auto& ev : step.evaluated) {
            Config c = adopted;
            c[step.choice] = ev.option;
            EXPECT_EQ(f(g.resolve(c)).objective, ev.objective);
        }
        adopted[step.choice] = step.adopted;
        EXPECT_EQ(f(g.resolve(adopted)).objective, step.objective_after);
    }
    EXPECT_EQ(g.resolve(adopted), back.final_config);
}

TEST(PipelineEvaluator, MemoisesOnCanonicalConfig) {
    auto inputs = small_inputs();
    auto g = build_graph(Engine::Ora, Goal::Kind::MaxDegs, inputs.capabilities());
    PipelineEvaluator ev(inputs, inputs.labels, g, Goal{}, EngineSettings{}, 1);
    const auto& a = ev.evaluate({});
    const auto& b = ev.evaluate(g.defaults());
    const auto& c = ev.evaluate({{"de_method", "nb-wald"}, {"bogus", "x"}});
    EXPECT_EQ(ev.executions(), 1u);
    EXPECT_EQ(&a, &b);
    EXPECT_EQ(&a, &c);
    ev.evaluate({{"de_method", "moderated-t"}, {"prefilter", "total>=50"}});
    ev.evaluate({{"de_method", "moderated-t"}});
    EXPECT_EQ(ev.executions(), 2u);
    EXPECT_FALSE(a.failed);
    EXPECT_GT(a.objective, 0);
}

TEST(PipelineEvaluator, FilteredOutConfigScoresWorst) {
    auto inputs = small_inputs(0.1);
    auto g = build_graph(Engine::Ora, Goal::Kind::MaxDegs, inputs.capabilities());
    PipelineEvaluator ev(inputs, inputs.labels, g, Goal{}, EngineSettings{}, 1);
    const auto& r = ev.evaluate({{"de_method", "nb-wald"}, {"prefilter", "total>=50"}});
    EXPECT_TRUE(r.failed);
    EXPECT_NE(r.error.find("AllGenesFiltered"), std::string::npos);
    EXPECT_EQ(r.objective, 0);

    Goal min{Goal::Kind::MinAdjP, "set01"};
    auto gm = build_graph(Engine::Ora, min.kind, inputs.capabilities());
    PipelineEvaluator em(inputs, inputs.labels, gm, min, EngineSettings{}, 1);
    EXPECT_EQ(em.evaluate({{"prefilter", "total>=50"}}).objective, 1.0);
}

TEST(Pipeline, EveryEngineRunsAtDefaults) {
    auto inputs = small_inputs();
    EngineSettings s;
    s.permutations = 50;
    s.resamples = 50;
    for (auto e : {Engine::Ora, Engine::Goseq, Engine::GseaPhenotype, Engine::GseaPreranked, Engine::Padog}) {
        auto g = build_graph(e, Goal::Kind::MaxDegs, inputs.capabilities());
        auto table = run_pipeline(inputs, inputs.labels, e, g.defaults(), s, 7);
        EXPECT_EQ(table.engine, e);
        EXPECT_FALSE(table.rows.empty());
        for (const auto& r : table.rows) {
            EXPECT_GT(r.raw_p, 0.0);
            EXPECT_LE(r.raw_p, 1.0);
            EXPECT_GT(r.adjusted, 0.0);
            EXPECT_LE(r.adjusted, 1.0);
        }
    }
}

TEST(Pipeline, StepwiseNeverWorseThanDefault) {
    auto inputs = small_inputs();
    EngineSettings s;
    s.permutations = 40;
    for (auto e : {Engine::Ora, Engine::GseaPreranked, Engine::Padog}) {
        auto g = build_graph(e, Goal::Kind::MaxDegs, inputs.capabilities());
        PipelineEvaluator ev(inputs, inputs.labels, g, Goal{}, s, 5);
        auto trace = stepwise_optimize(g, Goal{}, ev.as_evaluator(), 2);
        EXPECT_GE(trace.final_objective, trace.default_objective);
        EXPECT_EQ(ev.evaluate(trace.final_config).objective, trace.final_objective);
    }
}
