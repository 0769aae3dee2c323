#include <cmath>
#include <sstream>

#include <doctest.h>
#include <json.hpp>

#include "sclab/experiment.hpp"

using namespace sclab;
using nlohmann::json;

namespace {

json free_config() {
  return {{"model", {{"A", {{1.0, 0.2}, {0.2, 1.5}}}}},
          {"phi0", {{0.6, 0.1}, {-0.3, 0.4}}},
          {"xi", {0.3, 0.0}},
          {"T", 1.0},
          {"times", {0.5, 1.0}},
          {"epsilons", {0.4, 0.2}},
          {"nmax", {{"policy", "tail"}, {"threshold", 1e-8}}},
          {"classical_steps", 400}};
}

json quartic_config() {
  return {{"model",
           {{"pphi2",
             {{"alphas", {0, 0, 0, 0, 1}},
              {"m0", 1.0},
              {"grid", {{"k", {0.0}}, {"k_weights", {1.0}}, {"x", {0.0}}, {"x_weights", {1.0}}, {"g", {0.1}}}}}}}},
          {"phi0", {1.0}},
          {"xi", {0.3}},
          {"T", 1.0},
          {"times", {0.5, 1.0}},
          {"epsilons", {0.4, 0.2}},
          {"nmax", {{"policy", "tail"}, {"threshold", 1e-8}}},
          {"classical_steps", 400}};
}

}  // namespace

TEST_CASE("config validation") {
  CHECK_NOTHROW(parse_config(free_config()));
  const auto rejects = [](const char* key, const json& value) {
    json j = free_config();
    j[key] = value;
    CHECK_THROWS_AS(parse_config(j), ConfigError);
  };
  rejects("epsilons", {0.2, 0.4});
  rejects("epsilons", {1.5});
  rejects("epsilons", json::array());
  rejects("T", -1.0);
  rejects("phi0", {1.0});
  rejects("times", {0.3333});
  rejects("classical_steps", 401);
  rejects("workers", 0);
  rejects("nmax", {{"policy", "tail"}, {"threshold", 1e-3}});
  rejects("nmax", {{"policy", "guess"}});
  rejects("model", 3);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("log-log fit recovers power laws") {
  const LogLogFit f = fit_loglog({0.4, 0.2, 0.1, 0.05}, {3.0 * std::sqrt(0.4), 3.0 * std::sqrt(0.2),
                                                         3.0 * std::sqrt(0.1), 3.0 * std::sqrt(0.05)});
  CHECK(f.slope == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::exp(f.intercept) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(f.residual < 1e-12);
  CHECK(f.points == 4);
}

TEST_CASE("free field scaling is exact and independent of worker count") {
  json j = free_config();
  j["workers"] = 1;
  const ScalingResult one = run_scaling(parse_config(j));
  j["workers"] = 4;
  const ScalingResult four = run_scaling(parse_config(j));
  REQUIRE(one.rows.size() == 4);
  for (const auto& row : one.rows) {
    CHECK(row.valid);
    CHECK(row.error < 1e-8);
    CHECK(row.tail < 1e-8);
  }
  std::ostringstream a, b;
  write_scaling_csv(a, one);
  write_scaling_csv(b, four);
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("epsilon,time,error,omega,nmax,dim,tail,norm_drift\n", 0) == 0);
  // one U2 propagation per output time, shared across eps
  CHECK(one.u2_propagations == 2);
}

TEST_CASE("quartic scaling and Hepp errors shrink with eps") {
  const ExperimentConfig cfg = parse_config(quartic_config());
  const ScalingResult s = run_scaling(cfg);
  REQUIRE(s.rows.size() == 4);
  for (const auto& row : s.rows) {
    CHECK(row.valid);
    CHECK(row.error <= 2.0);
  }
  CHECK(s.rows[3].error < s.rows[1].error);
  const HeppResult h = run_hepp(cfg);
  for (const auto& [t, dec] : h.decreasing) CHECK(dec);

  json no_xi = quartic_config();
  no_xi.erase("xi");
  CHECK_THROWS_AS(run_hepp(parse_config(no_xi)), ConfigError);
}

TEST_CASE("invariant report") {
  json j = free_config();
  j["epsilons"] = {0.2};
  const InvariantReport ok = run_invariants(parse_config(j));
  CHECK(ok.ok());
  for (const auto& o : ok.outcomes) CHECK_MESSAGE(o.status == "pass", o.name);

  j["epsilons"] = {0.5};
  bool skipped = false;
  for (const auto& o : run_invariants(parse_config(j)).outcomes)
    if (o.name == "estana_bound") skipped = o.status == "skipped";
  CHECK(skipped);

  // complex coefficient breaks realness and hermiticity
  j["model"]["symbol"] = {{"d", 2}, {"tensors", {{{"n", 2}, {"entries", {{{"m", {1, 1}}, {"re", 0.1}, {"im", 0.2}}}}}}}};
  const InvariantReport bad = run_invariants(parse_config(j));
  CHECK_FALSE(bad.ok());
  for (const auto& o : bad.outcomes)
    if (o.name == "symbol_realness" || o.name == "hermiticity") CHECK(o.status == "fail");

  // non-Hermitian A parses; the h1 invariant reports it
  json skew = free_config();
  skew["model"]["A"] = {{1.0, 0.2}, {0.0, 1.5}};
  const InvariantReport h1 = run_invariants(parse_config(skew));
  CHECK_FALSE(h1.ok());
  CHECK(h1.outcomes.front().name == "h1");
  CHECK(h1.outcomes.front().status == "fail");
}
