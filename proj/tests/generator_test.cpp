#include <gtest/gtest.h>

#include "test_support.hpp"

namespace restex {
namespace {

using testing::data_spec;
using testing::fixture_spec;

struct Bound {
  ApiSpec spec;
  std::vector<ApiOperation> ops;
  TypeGraph graph;

  explicit Bound(ApiSpec s) : spec(std::move(s)), ops(query_operations(spec)), graph(build_schema_graph(spec)) {}

  SequenceRecipe recipe(BehaviourId b, const std::string& key, RecipeOptions options = {}) const {
    for (auto& r : build_operations_generator(b, ops, graph, options)) {
      if (r.key == key) return r;
    }
    throw std::runtime_error("no recipe " + key);
  }
};

TEST(GenerateSequence, B1RepeatsTheSubjectVerbatim) {
  const Bound f(fixture_spec());
  Rng rng(3);
  const auto seq = generate_sequence(f.recipe(BehaviourId::b1, "addProduct"), f.spec, f.graph, rng, 3);
  ASSERT_EQ(seq.steps.size(), 2u);
  EXPECT_EQ(seq.steps[0].operation, "addProduct");
  EXPECT_EQ(seq.steps[1].operation, "addProduct");
  EXPECT_EQ(seq.steps[1].copy_of, std::size_t{0});
  ASSERT_EQ(seq.steps[0].arguments.size(), 1u);
  const auto& body = seq.steps[0].arguments[0].literal;
  ASSERT_TRUE(body.is_object());
  ASSERT_TRUE(body.contains("productName"));
  EXPECT_TRUE(body["productName"].is_string());
  EXPECT_EQ(seq.seed, 3u);
}

TEST(GenerateSequence, B3SingleMiddleShape) {
  const Bound f(fixture_spec());
  RecipeOptions opt;
  opt.max_middle = 1;
  const auto recipe = f.recipe(BehaviourId::b3, "getAllProducts", opt);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const auto seq = generate_sequence(recipe, f.spec, f.graph, rng, seed);
    ASSERT_EQ(seq.steps.size(), 3u);
    EXPECT_EQ(seq.steps[0].operation, "getAllProducts");
    EXPECT_EQ(seq.steps[2].operation, "getAllProducts");
    EXPECT_TRUE(is_state_changing(seq.steps[1].method));
    EXPECT_TRUE(satisfies_slot_constraints(recipe, seq));
  }
}

TEST(GenerateSequence, B4DeleteReusesANameFromAnEarlierPost) {
  const Bound f(fixture_spec());
  const auto recipe = f.recipe(BehaviourId::b4, "getAllProducts");
  const auto oracle = candidate_producers(f.graph, parameter_key("deleteProductByName", "productName"));
  std::size_t deletes = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Rng rng(seed);
    const auto seq = generate_sequence(recipe, f.spec, f.graph, rng, seed);
    for (std::size_t i = 0; i < seq.steps.size(); ++i) {
      const auto& s = seq.steps[i];
      if (s.operation != "deleteProductByName") continue;
      ++deletes;
      ASSERT_EQ(s.arguments.size(), 1u);
      ASSERT_EQ(s.arguments[0].reuses.size(), 1u);
      const auto& src = s.arguments[0].reuses[0].source;
      EXPECT_LT(src.step, i);
      EXPECT_EQ(seq.steps[src.step].operation, "addProduct");
      const bool known = std::any_of(oracle.begin(), oracle.end(), [&](const ProducerCandidate& c) {
        return c.operation == "addProduct" && c.kind == src.kind && c.source_pointer == src.pointer;
      });
      EXPECT_TRUE(known) << src.pointer;
    }
  }
  EXPECT_GT(deletes, 0u);
}

TEST(GenerateSequence, DeterministicForASeed) {
  const Bound f(data_spec("features_service.json"));
  for (auto b : kAllBehaviours) {
    for (const auto& recipe : build_operations_generator(b, f.ops, f.graph)) {
      Rng a(99), c(99);
      EXPECT_EQ(generate_sequence(recipe, f.spec, f.graph, a, 99), generate_sequence(recipe, f.spec, f.graph, c, 99));
    }
  }
}

TEST(GenerateSequence, NoForwardReferencesAndSlotsHold) {
  for (const auto& spec : {fixture_spec(), fixture_spec(FixtureVariant::lax, true), data_spec("features_service.json")}) {
    const Bound f(spec);
    for (auto b : kAllBehaviours) {
      for (const auto& recipe : build_operations_generator(b, f.ops, f.graph)) {
        if (!recipe.unsatisfiable.empty()) continue;
        Rng rng(17);
        for (int i = 0; i < 25; ++i) {
          const auto seq = generate_sequence(recipe, f.spec, f.graph, rng);
          EXPECT_TRUE(dependencies_resolved(seq)) << recipe.key;
          EXPECT_TRUE(satisfies_slot_constraints(recipe, seq)) << to_string(b) << " " << recipe.key;
        }
      }
    }
  }
}

TEST(GenerateSequence, FreshStringsWithinASession) {
  const Bound f(fixture_spec());
  const auto recipe = f.recipe(BehaviourId::b1, "addProduct");
  Rng rng(5);
  std::set<std::string> used;
  std::set<std::string> names;
  for (int i = 0; i < 200; ++i) {
    const auto seq = generate_sequence(recipe, f.spec, f.graph, rng, 0, &used);
    EXPECT_TRUE(names.insert(seq.steps[0].arguments[0].literal["productName"].get<std::string>()).second);
  }
}

TEST(GenerateValue, ShortAlphanumericStrings) {
  const auto spec = fixture_spec();
  Rng rng(1);
  std::size_t total = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto v = generate_value(spec, Schema::of(ScalarType::string), rng);
    ASSERT_TRUE(v.is_string());
    const auto s = v.get<std::string>();
    EXPECT_GE(s.size(), 1u);
    EXPECT_LE(s.size(), 8u);
    for (char c : s) EXPECT_NE(kStringAlphabet.find(c), std::string_view::npos);
    total += s.size();
  }
  EXPECT_LT(total, 4000u);  // biased toward short values
}

TEST(GenerateValue, ObjectFollowsSchema) {
  const auto spec = fixture_spec();
  Rng rng(2);
  for (int i = 0; i < 100; ++i) {
    const auto v = generate_value(spec, Schema::ref_to("Product"), rng);
    ASSERT_TRUE(v.is_object());
    EXPECT_TRUE(v.contains("productName"));
    EXPECT_TRUE(conforms_to(spec, v, Schema::ref_to("Product")));
  }
}

TEST(GenerateValue, IntegersStayWithinTheMagnitudeBound) {
  const auto spec = fixture_spec();
  Rng rng(7);
  bool zero = false, negative = false;
  for (int i = 0; i < 1000; ++i) {
    const auto v = generate_value(spec, Schema::of(ScalarType::integer), rng).get<std::int64_t>();
    EXPECT_LE(std::abs(v), kIntegerMagnitude);
    zero = zero || v == 0;
    negative = negative || v < 0;
  }
  EXPECT_TRUE(zero);
  EXPECT_TRUE(negative);
}

TEST(GenerateValue, RespectsBoundsAndEnums) {
  const auto spec = data_spec("cyclic.json");
  Rng rng(4);
  Schema colour = Schema::of(ScalarType::string);
  colour.enumeration = {"red", "green"};
  for (int i = 0; i < 200; ++i) {
    const auto link = generate_value(spec, Schema::ref_to("Link"), rng);
    EXPECT_TRUE(conforms_to(spec, link, Schema::ref_to("Link")));
    if (link.contains("weight")) {
      EXPECT_GE(link["weight"].get<int>(), 1);
      EXPECT_LE(link["weight"].get<int>(), 9);
    }
    const auto c = generate_value(spec, colour, rng);
    EXPECT_TRUE(c == "red" || c == "green");
  }
}

TEST(GenerateValue, RequiredCycleIsUnsupported) {
  const auto spec = data_spec("cyclic.json");
  Rng rng(1);
  EXPECT_THROW(generate_value(spec, Schema::ref_to("Node"), rng), UnsupportedSchema);
  for (int i = 0; i < 50; ++i) {
    const auto tree = generate_value(spec, Schema::ref_to("Tree"), rng);
    EXPECT_TRUE(tree.contains("label"));
  }
}

TEST(GenerateValue, FuzzSometimesBreaksTheSchema) {
  const auto spec = fixture_spec();
  Rng rng(8);
  int broken = 0;
  for (int i = 0; i < 200; ++i) {
    if (!conforms_to(spec, fuzz_value(spec, Schema::ref_to("Product"), rng), Schema::ref_to("Product"))) ++broken;
  }
  EXPECT_GT(broken, 10);
  EXPECT_LT(broken, 200);
}

TEST(RefreshLiterals, KeepsShapeAndCopies) {
  const Bound f(fixture_spec());
  const auto recipe = f.recipe(BehaviourId::b4, "getProductByName");
  Rng rng(12);
  const auto seq = generate_sequence(recipe, f.spec, f.graph, rng);
  const auto again = refresh_literals(seq, f.spec, rng);
  ASSERT_EQ(again.steps.size(), seq.steps.size());
  for (std::size_t i = 0; i < seq.steps.size(); ++i) {
    EXPECT_EQ(again.steps[i].operation, seq.steps[i].operation);
    EXPECT_EQ(again.steps[i].copy_of, seq.steps[i].copy_of);
    if (again.steps[i].copy_of) {
      EXPECT_EQ(again.steps[i].arguments, again.steps[*again.steps[i].copy_of].arguments);
    }
  }
}

}  // namespace
}  // namespace restex
