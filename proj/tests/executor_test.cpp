#include <gtest/gtest.h>

#include "test_support.hpp"

namespace restex {
namespace {

using testing::fixture_spec;
using testing::raw;

PlannedInvocation invocation(const ApiSpec& spec, const std::string& op, StepRole role) {
  const auto* o = spec.find_operation(op);
  PlannedInvocation inv{o->id, o->method, o->path, role, {}, std::nullopt};
  for (const auto& p : o->parameters) inv.arguments.push_back({p.name, p.location, nullptr, {}});
  return inv;
}

TEST(BuildRequest, SubstitutesAndEncodes) {
  RealizedInvocation inv{"x", HttpMethod::get, "/a/{id}/b", {}};
  inv.arguments.push_back({"id", ParamLocation::path, "x y/z"});
  inv.arguments.push_back({"tags", ParamLocation::query, Value::array({"p", "q&r"})});
  inv.arguments.push_back({"n", ParamLocation::query, 3});
  const auto req = build_request(inv);
  EXPECT_EQ(req.target, "/a/x%20y%2Fz/b?tags=p&tags=q%26r&n=3");
  EXPECT_FALSE(req.has_body);
}

TEST(BuildRequest, BodyIsCompactJson) {
  RealizedInvocation inv{"addProduct", HttpMethod::post, "/products", {}};
  inv.arguments.push_back({"productName", ParamLocation::body, {{"productName", "0"}}});
  const auto req = build_request(inv);
  EXPECT_EQ(req.target, "/products");
  EXPECT_TRUE(req.has_body);
  EXPECT_EQ(req.body, R"({"productName":"0"})");
}

TEST(ProcessObservation, DropsHeadersAndCanonicalizes) {
  auto r = raw(200, R"({"b":1,"a":2})");
  r.headers["Date"] = "today";
  const auto o = process_observation(r);
  EXPECT_EQ(o.status, 200);
  EXPECT_EQ(o.body.dump(), R"({"a":2,"b":1})");
  EXPECT_FALSE(o.opaque);
}

TEST(ProcessObservation, StripsVolatileFields) {
  const std::vector<std::string> vol{"id", "meta.at"};
  const auto o = process_observation(raw(201, R"({"id":17,"name":"A","meta":{"at":1,"k":2}})"), vol);
  EXPECT_EQ(o.body, (Value{{"name", "A"}, {"meta", {{"k", 2}}}}));
  EXPECT_EQ(o.volatile_stripped, vol);
  const auto list = process_observation(raw(200, R"([{"id":1,"n":1},{"id":2,"n":2}])"), vol);
  EXPECT_EQ(list.body, Value::parse(R"([{"n":1},{"n":2}])"));
}

TEST(ProcessObservation, HtmlBecomesOpaque) {
  const auto o = process_observation(raw(500, "<html><body>boom</body></html>"));
  EXPECT_EQ(o.status, 500);
  EXPECT_TRUE(o.opaque);
  EXPECT_EQ(o.body, "<html><body>boom</body></html>");
}

TEST(ProcessObservation, Idempotent) {
  const std::vector<std::string> vol{"id"};
  for (const auto* body : {R"({"b":[1,{"d":1,"c":2}],"id":4})", "[]", "", "not json", "17"}) {
    const auto once = process_observation(raw(200, body), vol);
    const auto twice = process_observation(raw(200, once.opaque ? once.body.get<std::string>()
                                                    : once.body.is_null() ? std::string() : once.body.dump()),
                                           vol);
    EXPECT_EQ(once, twice) << body;
  }
}

TEST(ProcessObservation, EqualityIsAnEquivalence) {
  const std::vector<Observation> all{process_observation(raw(200, "[]")), process_observation(raw(200, "[ ]")),
                                     process_observation(raw(200, "{}")), process_observation(raw(201, "[]")),
                                     process_observation(raw(200, "x"))};
  for (const auto& a : all) {
    EXPECT_EQ(a, a);
    for (const auto& b : all) {
      EXPECT_EQ(a == b, b == a);
      for (const auto& c : all) {
        if (a == b && b == c) EXPECT_EQ(a, c);
      }
    }
  }
  EXPECT_EQ(all[0], all[1]);
  EXPECT_FALSE(all[0] == all[3]);  // status codes compare exactly
}

TEST(ProcessObservations, AnchorPairAndMatrix) {
  const auto spec = fixture_spec();
  PlannedSequence seq{BehaviourId::b3, 0, {}};
  seq.steps.push_back(invocation(spec, "getAllProducts", StepRole::anchor));
  seq.steps.push_back(invocation(spec, "addProduct", StepRole::middle));
  seq.steps.push_back(invocation(spec, "getAllProducts", StepRole::probe));
  seq.steps.push_back(invocation(spec, "addProduct", StepRole::middle));
  seq.steps.push_back(invocation(spec, "getAllProducts", StepRole::anchor));
  std::vector<Observation> o(5, process_observation(raw(200, "[]")));
  const auto p = process_observations(o, seq);
  ASSERT_TRUE(p.anchors.has_value());
  EXPECT_EQ(*p.anchors, (std::pair<std::size_t, std::size_t>{0, 4}));
  EXPECT_EQ(p.probes, (std::vector<std::size_t>{2}));
  EXPECT_EQ(p.middle, (std::vector<std::size_t>{1, 3}));
  EXPECT_EQ(p.size(), 5u);
  EXPECT_TRUE(p.equal[0][4]);
  o.pop_back();
  EXPECT_THROW(process_observations(o, seq), std::invalid_argument);
}

TEST(ProcessObservations, PairHasNoAnchors) {
  const auto spec = fixture_spec();
  PlannedSequence seq{BehaviourId::b1, 0,
                      {invocation(spec, "addProduct", StepRole::subject), invocation(spec, "addProduct", StepRole::subject)}};
  const std::vector<Observation> o{process_observation(raw(201, "{}")), process_observation(raw(400, "{}"))};
  const auto p = process_observations(o, seq);
  EXPECT_FALSE(p.anchors.has_value());
  EXPECT_FALSE(p.equal[0][1]);
}

TEST(ParseBaseUrl, SplitsOriginAndPrefix) {
  const auto a = parse_base_url("http://localhost:8080/api/v1/");
  EXPECT_EQ(a.origin, "http://localhost:8080");
  EXPECT_EQ(a.prefix, "/api/v1");
  EXPECT_EQ(parse_base_url("http://h").prefix, "");
  EXPECT_THROW(parse_base_url("https://h"), std::invalid_argument);
  EXPECT_THROW(parse_base_url("localhost:80"), std::invalid_argument);
}

TEST(RealizeInvocation, ReusedArgumentLandsInThePath) {
  const auto spec = fixture_spec();
  PlannedSequence seq{BehaviourId::b4, 0, {}};
  seq.steps.push_back(invocation(spec, "addProduct", StepRole::middle));
  seq.steps[0].arguments[0].literal = {{"productName", "B"}};
  seq.steps.push_back(invocation(spec, "deleteProductByName", StepRole::middle));
  seq.steps[1].arguments[0].literal = "ignored";
  seq.steps[1].arguments[0].reuses.push_back({"", {0, SourceKind::argument, "productName", "/productName"}});

  std::vector<RealizedInvocation> realized{realize_invocation(seq, 0, {}, {}, {})};
  EXPECT_EQ(realized[0].arguments[0].value, (Value{{"productName", "B"}}));
  const std::vector<Observation> obs{process_observation(raw(201, R"({"productName":"B"})"))};
  const std::vector<Value> bodies{Value{{"productName", "B"}}};
  const auto del = realize_invocation(seq, 1, realized, obs, bodies);
  EXPECT_EQ(build_request(del).target, "/products/B");
  EXPECT_EQ(build_request(del).method, HttpMethod::del);
}

TEST(RealizeInvocation, ResponseFieldOfAnErrorIsUnresolvable) {
  const auto spec = fixture_spec();
  PlannedSequence seq{BehaviourId::b4, 0, {}};
  seq.steps.push_back(invocation(spec, "addProduct", StepRole::middle));
  seq.steps[0].arguments[0].literal = {{"productName", ""}};
  seq.steps.push_back(invocation(spec, "deleteProductByName", StepRole::middle));
  seq.steps[1].arguments[0].reuses.push_back({"", {0, SourceKind::response, "", "/productName"}});
  const std::vector<RealizedInvocation> realized{realize_invocation(seq, 0, {}, {}, {})};
  const std::vector<Observation> obs{process_observation(raw(400, R"({"error":"bad"})"))};
  const std::vector<Value> bodies{Value{{"error", "bad"}}};
  EXPECT_THROW(realize_invocation(seq, 1, realized, obs, bodies), UnresolvableReuse);

  // A 2xx response without the field is just as unresolvable.
  const std::vector<Observation> ok{process_observation(raw(201, "{}"))};
  const std::vector<Value> empty{Value::object()};
  EXPECT_THROW(realize_invocation(seq, 1, realized, ok, empty), UnresolvableReuse);
}

TEST(RealizeInvocation, LiteralsPassThrough) {
  const auto spec = fixture_spec();
  PlannedSequence seq{BehaviourId::b1, 0, {invocation(spec, "getProductByName", StepRole::subject)}};
  seq.steps[0].arguments[0].literal = "abc";
  const auto r = realize_invocation(seq, 0, {}, {}, {});
  ASSERT_EQ(r.arguments.size(), 1u);
  EXPECT_EQ(r.arguments[0].value, "abc");
}

TEST(ExecuteSequence, AbandonsOnUnresolvableReuse) {
  const auto spec = fixture_spec();
  PlannedSequence seq{BehaviourId::b4, 0, {}};
  seq.steps.push_back(invocation(spec, "addProduct", StepRole::middle));
  seq.steps[0].arguments[0].literal = {{"productName", "x"}};
  seq.steps.push_back(invocation(spec, "deleteProductByName", StepRole::middle));
  seq.steps[1].arguments[0].reuses.push_back({"", {0, SourceKind::response, "", "/productName"}});
  testing::ScriptedExecutor ex([](const HttpRequest&) { return raw(400, "{}"); });
  const auto run = execute_sequence(seq, ex);
  EXPECT_FALSE(run.complete());
  EXPECT_FALSE(run.transport_failure);
  EXPECT_EQ(run.observations.size(), 1u);
  EXPECT_EQ(ex.requests.size(), 1u);
}

TEST(HttpExecutor, TalksToTheFixture) {
  auto fx = start_fixture(FixtureVariant::lax);
  HttpExecutor ex(fx->base_url());
  const auto empty = ex.execute({HttpMethod::get, "/products", "", false});
  EXPECT_EQ(empty.status, 200);
  EXPECT_EQ(empty.body, "[]");
  const auto created = ex.execute({HttpMethod::post, "/products", R"({"productName":"0"})", true});
  EXPECT_EQ(created.status, 201);
  EXPECT_EQ(Value::parse(created.body), (Value{{"productName", "0"}}));
  EXPECT_EQ(fx->requests().size(), 2u);
}

TEST(HttpExecutor, OneRequestPerInvocation) {
  auto fx = start_fixture(FixtureVariant::lax);
  const auto spec = fixture_spec();
  PlannedSequence seq{BehaviourId::b3, 0, {}};
  seq.steps.push_back(invocation(spec, "getAllProducts", StepRole::anchor));
  seq.steps.push_back(invocation(spec, "addProduct", StepRole::middle));
  seq.steps[1].arguments[0].literal = {{"productName", "q"}};
  seq.steps.push_back(invocation(spec, "getProductByName", StepRole::middle));
  seq.steps[2].arguments[0].reuses.push_back({"", {1, SourceKind::argument, "productName", "/productName"}});
  seq.steps.push_back(invocation(spec, "getAllProducts", StepRole::anchor));
  seq.steps[3].copy_of = 0;
  HttpExecutor ex(fx->base_url());
  const auto run = execute_sequence(seq, ex);
  ASSERT_TRUE(run.complete());
  const auto log = fx->requests();
  ASSERT_EQ(log.size(), 4u);
  EXPECT_EQ(log[2].path, "/products/q");
  EXPECT_EQ(run.observations[2].status, 200);
}

TEST(HttpExecutor, ClosedPortIsATransportError) {
  int port = 0;
  {
    auto fx = start_fixture(FixtureVariant::lax);
    port = fx->port();
  }
  HttpExecutor ex("http://127.0.0.1:" + std::to_string(port), std::chrono::milliseconds(500));
  EXPECT_THROW(ex.execute({HttpMethod::get, "/products", "", false}), TransportError);
}

}  // namespace
}  // namespace restex
