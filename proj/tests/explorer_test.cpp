#include <gtest/gtest.h>

#include <sstream>

#include "test_support.hpp"

namespace restex {
namespace {

using testing::fixture_spec;
using testing::raw;

BoundProperty stub_property(const ApiSpec& spec, BehaviourId b, const std::string& key, bool verdict) {
  const auto ops = query_operations(spec);
  for (const auto& r : build_operations_generator(b, ops, build_schema_graph(spec))) {
    if (r.key != key) continue;
    return {b, r, [verdict](const PlannedSequence&, std::span<const Observation>, const ProcessedObservations&) {
              return Verdict{verdict, verdict ? "always" : "never"};
            }};
  }
  throw std::runtime_error("no recipe");
}

BoundProperty real_property(const ApiSpec& spec, BehaviourId b, const std::string& key) {
  for (const auto& r : build_operations_generator(b, query_operations(spec), build_schema_graph(spec))) {
    if (r.key == key) return bind(r);
  }
  throw std::runtime_error("no recipe");
}

TEST(CheckProperty, NeverHoldingCheckUsesExactlyNTrials) {
  const auto spec = fixture_spec();
  testing::ScriptedExecutor ex([](const HttpRequest&) { return raw(201, "{}"); });
  const auto out = check_property(stub_property(spec, BehaviourId::b1, "addProduct", false), 5, spec,
                                  build_schema_graph(spec), ex, 1);
  EXPECT_EQ(out.outcome, Outcome::no_example_found);
  EXPECT_EQ(out.trials, 5u);
  EXPECT_EQ(out.stats.sequences_generated, 5u);
  EXPECT_EQ(ex.requests.size(), 10u);
  EXPECT_FALSE(out.example.has_value());
}

TEST(CheckProperty, AlwaysHoldingCheckStopsAfterOneTrialPlusShrinking) {
  const auto spec = fixture_spec();
  testing::ScriptedExecutor ex([](const HttpRequest&) { return raw(201, "{}"); });
  const auto out = check_property(stub_property(spec, BehaviourId::b1, "addProduct", true), 100, spec,
                                  build_schema_graph(spec), ex, 1);
  ASSERT_EQ(out.outcome, Outcome::example);
  EXPECT_EQ(out.trials, 1u);
  EXPECT_EQ(out.stats.sequences_generated, 1u);
  ASSERT_TRUE(out.example.has_value());
  EXPECT_EQ(out.stats.executions, 1 + out.example->shrink.executions);
  EXPECT_EQ(ex.requests.size(), 2 * out.stats.executions);
}

TEST(CheckProperty, UnsatisfiableRecipeNeedsNoTrials) {
  const auto spec = fixture_spec(FixtureVariant::no_delete);
  testing::ScriptedExecutor ex([](const HttpRequest&) { return raw(200, "[]"); });
  const auto out =
      check_property(real_property(spec, BehaviourId::b4, "getAllProducts"), 100, spec, build_schema_graph(spec), ex, 1);
  EXPECT_EQ(out.outcome, Outcome::no_example_found);
  EXPECT_EQ(out.trials, 0u);
  EXPECT_TRUE(ex.requests.empty());
  EXPECT_FALSE(out.note.empty());
}

TEST(CheckProperty, UnreachableSystemIsReportedDistinctly) {
  const auto spec = fixture_spec();
  testing::ScriptedExecutor ex([](const HttpRequest&) -> RawObservation { throw TransportError("refused"); });
  const auto out =
      check_property(real_property(spec, BehaviourId::b1, "addProduct"), 4, spec, build_schema_graph(spec), ex, 1);
  EXPECT_EQ(out.outcome, Outcome::unreachable);
  EXPECT_EQ(out.stats.transport_failures, 4u);
  EXPECT_EQ(out.stats.abandoned, 4u);
}

TEST(CheckBehaviour, B1OnLaxMatchesAScriptedDoublePost) {
  auto oracle_fx = start_fixture(FixtureVariant::lax);
  HttpExecutor oracle(oracle_fx->base_url());
  const auto a = process_observation(oracle.execute({HttpMethod::post, "/products", R"({"productName":"k"})", true}));
  const auto b = process_observation(oracle.execute({HttpMethod::post, "/products", R"({"productName":"k"})", true}));
  ASSERT_EQ(a, b);

  auto fx = start_fixture(FixtureVariant::lax);
  HttpExecutor ex(fx->base_url());
  const auto spec = fixture_spec();
  Rng rng(4);
  const auto t = check_behaviour(real_property(spec, BehaviourId::b1, "addProduct"), spec, build_schema_graph(spec), ex, rng);
  EXPECT_TRUE(t.verdict);
  ASSERT_EQ(t.run.observations.size(), 2u);
  EXPECT_EQ(t.run.observations[0], t.run.observations[1]);
}

TEST(CheckBehaviour, B1OnStrictSeesCreatedThenRejected) {
  auto fx = start_fixture(FixtureVariant::strict);
  HttpExecutor ex(fx->base_url());
  const auto spec = fixture_spec(FixtureVariant::strict);
  Rng rng(4);
  const auto t = check_behaviour(real_property(spec, BehaviourId::b1, "addProduct"), spec, build_schema_graph(spec), ex, rng);
  EXPECT_FALSE(t.verdict);
  ASSERT_EQ(t.run.observations.size(), 2u);
  EXPECT_EQ(t.run.observations[0].status, 201);
  EXPECT_EQ(t.run.observations[1].status, 400);
}

TEST(CheckBehaviour, UnreachableTrialIsAbandoned) {
  const auto spec = fixture_spec();
  HttpExecutor ex("http://127.0.0.1:1", std::chrono::milliseconds(300));
  Rng rng(1);
  const auto t = check_behaviour(real_property(spec, BehaviourId::b3, "getAllProducts"), spec, build_schema_graph(spec), ex, rng);
  EXPECT_FALSE(t.verdict);
  EXPECT_TRUE(t.run.transport_failure);
}

TEST(CheckProperty, B1OnLaxFindsDuplicateAcceptance) {
  auto fx = start_fixture(FixtureVariant::lax);
  HttpExecutor ex(fx->base_url());
  const auto spec = fixture_spec();
  const auto out =
      check_property(real_property(spec, BehaviourId::b1, "addProduct"), 100, spec, build_schema_graph(spec), ex, 7);
  ASSERT_EQ(out.outcome, Outcome::example);
  EXPECT_LE(out.trials, 100u);
  const auto& ex_seq = out.example->sequence;
  ASSERT_EQ(ex_seq.steps.size(), 2u);
  EXPECT_EQ(out.example->observations[0].status, 201);
  EXPECT_EQ(out.example->observations[0], out.example->observations[1]);
}

TEST(Explore, B2OnDeterministicGetFindsNothing) {
  auto fx = start_fixture(FixtureVariant::lax);
  HttpExecutor ex(fx->base_url());
  const auto spec = fixture_spec();
  // Oracle: the only B2 sequence for a parameterless GET is GET, GET.
  const auto a = process_observation(ex.execute({HttpMethod::get, "/products", "", false}));
  const auto b = process_observation(ex.execute({HttpMethod::get, "/products", "", false}));
  ASSERT_EQ(a, b);
  ExplorationConfig config;
  config.trials = 20;
  const auto result = explore(BehaviourId::b2, spec, config, ex);
  const auto* o = result.find(BehaviourId::b2, "getAllProducts");
  ASSERT_NE(o, nullptr);
  EXPECT_EQ(o->outcome, Outcome::no_example_found);
  EXPECT_EQ(o->trials, 20u);
}

TEST(Explore, B4WithoutDeleteFindsNothing) {
  auto fx = start_fixture(FixtureVariant::no_delete);
  HttpExecutor ex(fx->base_url());
  const auto result = explore(BehaviourId::b4, fixture_spec(FixtureVariant::no_delete), {}, ex);
  ASSERT_EQ(result.outcomes.size(), 2u);
  for (const auto& o : result.outcomes) EXPECT_EQ(o.outcome, Outcome::no_example_found);
  EXPECT_TRUE(fx->requests().empty());
}

TEST(Explore, B3OnSpecWithoutGetIsSkipped) {
  const Value doc = {{"openapi", "3.0.3"},
                     {"info", {{"title", "t"}, {"version", "1"}}},
                     {"paths", {{"/a", {{"post", {{"operationId", "a"}, {"responses", Value::object()}}}}}}}};
  testing::ScriptedExecutor ex([](const HttpRequest&) { return raw(200); });
  const auto result = explore(BehaviourId::b3, parse_spec(doc.dump()), {}, ex);
  ASSERT_EQ(result.outcomes.size(), 1u);
  EXPECT_EQ(result.outcomes[0].outcome, Outcome::skipped);
  EXPECT_EQ(result.outcomes[0].key, "*");
}

TEST(Explore, OneOutcomePerRecipeAndSoundEvidence) {
  auto fx = start_fixture(FixtureVariant::lax);
  HttpExecutor ex(fx->base_url());
  const auto spec = fixture_spec();
  ExplorationConfig config;
  config.trials = 50;
  std::ostringstream progress;
  config.progress = &progress;
  const auto result = explore_all(spec, config, ex);
  std::set<std::pair<BehaviourId, std::string>> keys;
  for (const auto& o : result.outcomes) {
    EXPECT_TRUE(keys.insert({o.behaviour, o.key}).second);
    EXPECT_LE(o.stats.sequences_generated, config.trials);
    if (!o.example) continue;
    const auto& e = *o.example;
    const auto processed = process_observations(e.observations, e.sequence);
    EXPECT_TRUE(build_behaviour_check(o.behaviour)(e.sequence, e.observations, processed).conforms)
        << to_string(o.behaviour) << " " << o.key;
    EXPECT_TRUE(dependencies_resolved(e.sequence));
  }
  // 4 operations for B1, B2 and FUZZ, 2 GETs for B3 and B4.
  EXPECT_EQ(result.outcomes.size(), 16u);
  std::size_t lines = 0;
  for (char c : progress.str()) lines += c == '\n';
  EXPECT_EQ(lines, result.outcomes.size());
}

TEST(Explore, ReproducibleForASeed) {
  auto run = [] {
    auto fx = start_fixture(FixtureVariant::lax);
    HttpExecutor ex(fx->base_url());
    ExplorationConfig config;
    config.trials = 30;
    config.seed = 21;
    config.behaviours = {BehaviourId::b1, BehaviourId::b3, BehaviourId::b4};
    return serialize(to_document(explore_all(fixture_spec(), config, ex), "sut"));
  };
  EXPECT_EQ(run(), run());
}

TEST(RecipeSeed, StableAndDistinct) {
  EXPECT_EQ(recipe_seed(1, BehaviourId::b1, "a"), recipe_seed(1, BehaviourId::b1, "a"));
  EXPECT_NE(recipe_seed(1, BehaviourId::b1, "a"), recipe_seed(1, BehaviourId::b2, "a"));
  EXPECT_NE(recipe_seed(1, BehaviourId::b1, "a"), recipe_seed(2, BehaviourId::b1, "a"));
  EXPECT_NE(recipe_seed(1, BehaviourId::b1, "a"), recipe_seed(1, BehaviourId::b1, "b"));
}

TEST(Outcome, NamesRoundTrip) {
  for (auto o : {Outcome::example, Outcome::no_example_found, Outcome::skipped, Outcome::unreachable}) {
    EXPECT_EQ(parse_outcome(to_string(o)), o);
  }
  EXPECT_FALSE(parse_outcome("nope").has_value());
}

}  // namespace
}  // namespace restex
