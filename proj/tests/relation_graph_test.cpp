#include <gtest/gtest.h>

#include "oracles.hpp"
#include "test_support.hpp"

namespace restex {
namespace {

using testing::brute_force_related;
using testing::data_spec;
using testing::fixture_spec;
using testing::floyd_warshall;

bool has_edge(const TypeGraph& g, const std::string& a, const std::string& b) {
  const auto x = g.find(a), y = g.find(b);
  if (!x || !y) return false;
  for (const auto& e : g.edges()) {
    if ((e.from == *x && e.to == *y) || (e.bidirectional && e.from == *y && e.to == *x)) return true;
  }
  return false;
}

int distance(const TypeGraph& g, const std::vector<std::vector<int>>& d, const std::string& a, const std::string& b) {
  return d[g.require(a)][g.require(b)];
}

TEST(BuildSchemaGraph, PersonAndCommentShareTheStringNode) {
  const auto g = build_schema_graph(data_spec("person_comment.json"));
  EXPECT_TRUE(has_edge(g, "field:firstName:string", "scalar:string"));
  EXPECT_TRUE(has_edge(g, "field:commentBy:string", "scalar:string"));
  EXPECT_TRUE(has_edge(g, "param:addComment:commentBy", "field:commentBy:string"));
  EXPECT_TRUE(has_edge(g, "type:Person", "field:firstName:string"));
  EXPECT_TRUE(has_edge(g, "param:addPerson:person", "type:Person"));
}

TEST(BuildSchemaGraph, ParameterlessGetHasOnlyResponseTypes) {
  const Value doc = {{"openapi", "3.0.3"},
                     {"info", {{"title", "t"}, {"version", "1"}}},
                     {"paths",
                      {{"/count",
                        {{"get",
                          {{"operationId", "count"},
                           {"responses",
                            {{"200",
                              {{"description", "n"},
                               {"content", {{"application/json", {{"schema", {{"type", "integer"}}}}}}}}}}}}}}}}}};
  const auto g = build_schema_graph(parse_spec(doc.dump()));
  std::map<NodeKind, int> kinds;
  for (const auto& n : g.nodes()) ++kinds[n.kind];
  EXPECT_EQ(kinds[NodeKind::operation], 1);
  EXPECT_EQ(kinds[NodeKind::response], 1);
  EXPECT_EQ(kinds[NodeKind::parameter], 0);
  EXPECT_EQ(kinds[NodeKind::scalar_type], 1);
  EXPECT_EQ(g.nodes().size(), 3u);
  EXPECT_TRUE(has_edge(g, "response:count", "scalar:integer"));
}

TEST(BuildSchemaGraph, FixtureNamesMeetBeforeTheBareScalar) {
  const auto g = build_schema_graph(fixture_spec());
  const auto d = floyd_warshall(g);
  const auto add = "param:addProduct:productName";
  const auto del = "param:deleteProductByName:productName";
  const auto direct = distance(g, d, add, del);
  const auto via_scalar = distance(g, d, add, "scalar:string") + distance(g, d, "scalar:string", del);
  EXPECT_EQ(direct, 3);
  EXPECT_LT(direct, via_scalar);
}

TEST(BuildSchemaGraph, ScalarNodesAreUnique) {
  const auto g = build_schema_graph(data_spec("features_service.json"));
  std::set<std::string> names;
  for (const auto& n : g.nodes()) {
    if (n.kind == NodeKind::scalar_type) EXPECT_TRUE(names.insert(n.name).second) << n.key;
  }
  EXPECT_TRUE(names.contains("string"));
  EXPECT_TRUE(names.contains("integer"));
}

TEST(BuildSchemaGraph, EveryParameterReachesATypeNode) {
  for (const auto* name : {"features_service.json", "person_comment.json", "cyclic.json"}) {
    const auto g = build_schema_graph(data_spec(name));
    const auto d = floyd_warshall(g);
    for (std::size_t p = 0; p < g.nodes().size(); ++p) {
      if (g.node(p).kind != NodeKind::parameter) continue;
      bool reaches = false;
      for (std::size_t t = 0; t < g.nodes().size(); ++t) {
        const auto k = g.node(t).kind;
        if ((k == NodeKind::scalar_type || k == NodeKind::structural_field || k == NodeKind::named_type) &&
            d[p][t] < testing::kUnreachable) {
          reaches = true;
        }
      }
      EXPECT_TRUE(reaches) << name << " " << g.node(p).key;
    }
  }
}

TEST(BuildSchemaGraph, Deterministic) {
  const auto spec = data_spec("features_service.json");
  const auto a = build_schema_graph(spec);
  const auto b = build_schema_graph(spec);
  EXPECT_EQ(to_dot(a), to_dot(b));
}

TEST(BuildSchemaGraph, CyclicTypesTerminate) {
  const auto g = build_schema_graph(data_spec("cyclic.json"));
  EXPECT_TRUE(g.find("type:Node").has_value());
  EXPECT_TRUE(g.find("type:Tree").has_value());
  EXPECT_TRUE(has_edge(g, "field:next:Node", "type:Node"));
}

TEST(BuildSchemaGraph, NominalSharingBeatsScalarPaths) {
  const auto g = build_schema_graph(data_spec("features_service.json"));
  const auto d = floyd_warshall(g);
  // Both responses are Product; the scalar-only route goes through scalar:string.
  const auto a = "response:getProductByName";
  const auto b = "response:addProduct";
  EXPECT_EQ(distance(g, d, a, b), 2);
  EXPECT_LT(distance(g, d, a, b), distance(g, d, a, "scalar:string") + distance(g, d, "scalar:string", b));
}

TEST(BuildSchemaGraph, InlineObjectsShareStructuralFields) {
  const Value body = {{"type", "object"}, {"properties", {{"title", {{"type", "string"}}}}}};
  auto op = [&](const char* id) {
    return Value{{"operationId", id},
                 {"requestBody", {{"content", {{"application/json", {{"schema", body}}}}}}},
                 {"responses", Value::object()}};
  };
  const Value doc = {{"openapi", "3.0.3"},
                     {"info", {{"title", "t"}, {"version", "1"}}},
                     {"paths", {{"/a", {{"post", op("a")}}}, {"/b", {{"post", op("b")}}}}}};
  const auto g = build_schema_graph(parse_spec(doc.dump()));
  EXPECT_TRUE(has_edge(g, "param:a:body", "field:title:string"));
  EXPECT_TRUE(has_edge(g, "param:b:body", "field:title:string"));
  const auto d = floyd_warshall(g);
  EXPECT_EQ(distance(g, d, "param:a:body", "param:b:body"), 2);
}

TEST(RelatedParameters, FirstNameReachesCommentByThroughTheScalar) {
  const auto g = build_schema_graph(data_spec("person_comment.json"));
  const auto paths = related_parameters(g, "param:addPerson:person", 5);
  auto it = std::find_if(paths.begin(), paths.end(),
                         [](const RelationPath& p) { return p.target == "param:addComment:commentBy"; });
  ASSERT_NE(it, paths.end());
  EXPECT_EQ(it->distance, 5);
  EXPECT_EQ(it->hops, (std::vector<std::string>{"param:addPerson:person", "type:Person", "field:firstName:string",
                                                "scalar:string", "field:commentBy:string",
                                                "param:addComment:commentBy"}));
  EXPECT_EQ(it->hops.size(), static_cast<std::size_t>(it->distance) + 1);
}

TEST(RelatedParameters, IsolatedParameterHasNoRelations) {
  const auto g = build_schema_graph(data_spec("person_comment.json"));
  EXPECT_TRUE(related_parameters(g, "param:getFlag:enabled", 2).empty());
}

TEST(RelatedParameters, UnknownNodeThrows) {
  const auto g = build_schema_graph(fixture_spec());
  EXPECT_THROW(related_parameters(g, "param:nope:x", 4), GraphError);
}

TEST(RelatedParameters, FixtureDeleteRankedBeforeUnrelated) {
  const auto g = build_schema_graph(fixture_spec());
  const auto paths = related_parameters(g, "response:addProduct", 4);
  ASSERT_FALSE(paths.empty());
  std::size_t del = paths.size();
  for (std::size_t i = 0; i < paths.size(); ++i) {
    if (paths[i].target == "param:deleteProductByName:productName") del = i;
  }
  ASSERT_LT(del, paths.size());
  for (std::size_t i = 0; i < del; ++i) EXPECT_LE(paths[i].distance, paths[del].distance);
  for (std::size_t i = 1; i < paths.size(); ++i) {
    EXPECT_TRUE(paths[i - 1].distance < paths[i].distance ||
                (paths[i - 1].distance == paths[i].distance && paths[i - 1].target < paths[i].target));
  }
}

TEST(RelatedParameters, MatchesFloydWarshallOracle) {
  std::vector<ApiSpec> specs{fixture_spec(), fixture_spec(FixtureVariant::lax, true), data_spec("person_comment.json"),
                             data_spec("cyclic.json"), data_spec("features_service.json")};
  for (const auto& spec : specs) {
    const auto g = build_schema_graph(spec);
    const auto d = floyd_warshall(g);
    for (const auto& n : g.nodes()) {
      if (n.kind != NodeKind::parameter && n.kind != NodeKind::response) continue;
      for (int max = 0; max <= 6; ++max) {
        EXPECT_EQ(related_parameters(g, n.key, max), brute_force_related(g, d, n.key, max)) << n.key << " " << max;
      }
    }
  }
}

TEST(CandidateProducers, DeleteIsFedByAddProduct) {
  const auto g = build_schema_graph(fixture_spec());
  const auto cands = candidate_producers(g, "param:deleteProductByName:productName");
  ASSERT_FALSE(cands.empty());
  auto it = std::find_if(cands.begin(), cands.end(), [](const ProducerCandidate& c) {
    return c.operation == "addProduct" && c.kind == SourceKind::argument;
  });
  ASSERT_NE(it, cands.end());
  EXPECT_EQ(it->parameter, "productName");
  EXPECT_EQ(it->source_pointer, "/productName");
  EXPECT_EQ(it->target_pointer, "");
  EXPECT_TRUE(it->same_name);
  EXPECT_EQ(it->distance, 3);
  // The same-named path parameter of getProductByName is closer still.
  EXPECT_EQ(cands.front().operation, "getProductByName");
  EXPECT_EQ(cands.front().distance, 2);
  for (std::size_t i = 1; i < cands.size(); ++i) EXPECT_LE(cands[i - 1].distance, cands[i].distance);
}

TEST(CandidateProducers, ConfigurationsFedByAddProduct) {
  const auto g = build_schema_graph(fixture_spec(FixtureVariant::lax, true));
  const auto cands = candidate_producers(g, "param:getConfigurationsForProduct:productName");
  EXPECT_TRUE(std::any_of(cands.begin(), cands.end(),
                          [](const ProducerCandidate& c) { return c.operation == "addProduct"; }));
}

TEST(CandidateProducers, SingleOperationSpecHasNone) {
  const Value doc = {
      {"openapi", "3.0.3"},
      {"info", {{"title", "t"}, {"version", "1"}}},
      {"paths",
       {{"/a/{id}",
         {{"get",
           {{"operationId", "a"},
            {"parameters", {{{"name", "id"}, {"in", "path"}, {"schema", {{"type", "string"}}}}}},
            {"responses",
             {{"200",
               {{"description", "x"}, {"content", {{"application/json", {{"schema", {{"type", "string"}}}}}}}}}}}}}}}}}};
  const auto g = build_schema_graph(parse_spec(doc.dump()));
  EXPECT_TRUE(candidate_producers(g, "param:a:id").empty());
}

TEST(CandidateProducers, RequiresAParameterNode) {
  const auto g = build_schema_graph(fixture_spec());
  EXPECT_THROW(candidate_producers(g, "response:addProduct"), GraphError);
  EXPECT_THROW(candidate_producers(g, "param:x:y"), GraphError);
}

TEST(ToDot, LabelsKindAndKey) {
  const auto dot = to_dot(build_schema_graph(fixture_spec()));
  EXPECT_NE(dot.find("digraph relations {"), std::string::npos);
  EXPECT_NE(dot.find("parameter\\nparam:addProduct:productName"), std::string::npos);
  EXPECT_NE(dot.find("[dir=both]"), std::string::npos);
}

}  // namespace
}  // namespace restex
