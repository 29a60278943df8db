#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "dks/errors.hpp"
#include "dks/instance.hpp"
#include "dks/io.hpp"
#include "dks/oracles.hpp"
#include "dks/rng.hpp"

using namespace dks;

namespace {

ModelParams small_gamma_reg() {
  ModelParams mp;
  mp.kind = ModelKind::GammaReg;
  mp.n = 60;
  mp.k = 12;
  mp.d = 6;
  mp.delta = 0.05;
  mp.gamma = 0.02;
  return mp;
}

ModelParams small_exp() {
  ModelParams mp;
  mp.kind = ModelKind::Exp;
  mp.n = 60;
  mp.k = 12;
  mp.d = 6;
  mp.delta = 0.05;
  mp.d_prime = 4;
  mp.lambda = 3.8;
  return mp;
}

int count_zone(const PlantedInstance& inst, bool cross) {
  int count = 0;
  for (auto [u, v, w] : inst.graph.sorted_edges()) {
    bool us = u < inst.params.k, vs = v < inst.params.k;
    (void)w;
    if (cross ? (us != vs) : (!us && !vs)) ++count;
  }
  return count;
}

}  // namespace

TEST_CASE("parameter validation rejects each broken invariant") {
  auto mp = small_gamma_reg();
  CHECK_NOTHROW(mp.validate());

  auto bad = mp;
  bad.k = 0;
  CHECK_THROWS_AS(bad.validate(), ParameterError);
  bad = mp;
  bad.k = bad.n;
  CHECK_THROWS_AS(bad.validate(), ParameterError);
  bad = mp;
  bad.d = 0;
  CHECK_THROWS_AS(bad.validate(), ParameterError);
  bad = mp;
  bad.delta = 0;
  CHECK_THROWS_AS(bad.validate(), ParameterError);
  bad = mp;
  bad.delta = 1.0;  // p = d/k * 1 = 0.5, fine; then push p over 1
  CHECK_NOTHROW(bad.validate());
  bad.delta = 1.0;
  bad.d = 13;  // violates Reg d < k as well, but p = 13/12 > 1 first
  CHECK_THROWS_AS(bad.validate(), ParameterError);
  bad = mp;
  bad.gamma = 0;
  CHECK_THROWS_AS(bad.validate(), ParameterError);
  bad = mp;
  bad.d = 5.5;  // Reg kinds need integer d
  CHECK_THROWS_AS(bad.validate(), ParameterError);
  bad = mp;
  bad.k = 13;
  bad.d = 5;  // k*d odd
  CHECK_THROWS_AS(bad.validate(), ParameterError);
  bad = mp;
  bad.xi = 0;
  CHECK_THROWS_AS(bad.validate(), ParameterError);

  auto exp_bad = small_exp();
  CHECK_NOTHROW(exp_bad.validate());
  exp_bad.lambda = 4.0;  // lambda >= d_prime
  CHECK_THROWS_AS(exp_bad.validate(), ParameterError);
  exp_bad = small_exp();
  exp_bad.d_prime = 48;  // d_prime >= n-k
  CHECK_THROWS_AS(exp_bad.validate(), ParameterError);
  exp_bad = small_exp();
  exp_bad.d_prime = 4.5;
  CHECK_THROWS_AS(exp_bad.validate(), ParameterError);
}

TEST_CASE("p accessor and low-p advisory") {
  auto mp = small_gamma_reg();
  CHECK(mp.p() == doctest::Approx(0.05 * 6 / 12));
  // log(60)/60 ~ 0.068 exceeds p = 0.025, so the advisory fires here.
  CHECK(mp.low_p_advisory());
  auto big = mp;
  big.delta = 0.8;  // p = 0.4 clears the floor
  CHECK(!big.low_p_advisory());
}

TEST_CASE("kind and strategy names round-trip") {
  for (auto kind : {ModelKind::Exp, ModelKind::ExpReg, ModelKind::Gamma, ModelKind::GammaReg})
    CHECK(model_kind_from_string(to_string(kind)) == kind);
  CHECK_THROWS_AS(model_kind_from_string("nope"), ParameterError);
  for (auto s : {AdversaryStrategy::None, AdversaryStrategy::RandomFraction,
                 AdversaryStrategy::TargetHighDegree})
    CHECK(adversary_strategy_from_string(to_string(s)) == s);
}

TEST_CASE("regular dense core hits the degree exactly") {
  for (auto [k, d] : {std::pair{12, 6}, {12, 9}, {10, 3}}) {
    auto core = build_dense_core(k, d, CoreStyle::Regular, 5);
    REQUIRE(core.vertex_count() == k);
    for (int i = 0; i < k; ++i) CHECK(core.weighted_degree(i) == doctest::Approx(d));
    for (auto [u, v, w] : core.sorted_edges()) {
      CHECK(w == 1.0);
      CHECK(u < v);
    }
  }
}

TEST_CASE("weighted random core hits the average degree exactly") {
  auto core = build_dense_core(20, 7.5, CoreStyle::WeightedRandom, 11);
  REQUIRE(core.vertex_count() == 20);
  CHECK(2.0 * core.total_weight() / 20 == doctest::Approx(7.5).epsilon(1e-12));
  for (auto [u, v, w] : core.sorted_edges()) {
    (void)u;
    (void)v;
    CHECK(w > 0);
  }
}

TEST_CASE("expander construction certifies its spectral bound") {
  auto g = build_expander(30, 4, 3.8, 3);
  auto cert = certify_expander(g, 4, 3.8);
  CHECK(cert.pass);
  CHECK(cert.regular);
  CHECK(cert.lambda1 == doctest::Approx(4.0));
  CHECK(cert.max_abs_rest <= 3.8 + 1e-9);
}

TEST_CASE("expander construction throws after exhausting retries") {
  // 2-regular graphs are unions of cycles; lambda cannot beat 1.5 at m=8.
  CHECK_THROWS_AS(build_expander(8, 2, 0.5, 1, 3), RetryExhaustedError);
}

TEST_CASE("gamma part respects the density certificate in all regimes") {
  // gamma*d < 1/2: empty graph.
  auto empty = build_gamma_part(30, 0.01, 10, 3);
  CHECK(empty.edge_count() == 0);

  // Moderate: nonempty but certified below gamma*d.
  auto sparse = build_gamma_part(30, 0.08, 10, 3);
  auto best = densest_subgraph(sparse);
  CHECK(best.value <= 0.08 * 10 + 1e-9);

  // Denser regime.
  auto dense = build_gamma_part(40, 0.2, 10, 3);
  CHECK(densest_subgraph(dense).value <= 0.2 * 10 + 1e-9);
  CHECK(dense.edge_count() > 0);
}

TEST_CASE("cross edges appear with the planted probability") {
  WeightedGraph core(10), outer(40);
  auto result = plant_cross_edges(core, outer, 0.25, 9);
  REQUIRE(result.graph.vertex_count() == 50);
  int cross = 0;
  for (auto [u, v, w] : result.graph.sorted_edges()) {
    CHECK(u < 10);
    CHECK(v >= 10);
    CHECK(w == 1.0);
    ++cross;
  }
  CHECK(cross == static_cast<int>(result.log.size()));
  // 400 pairs at p = .25: expect ~100, allow +-5 sigma (sigma ~ 8.7).
  CHECK(cross > 55);
  CHECK(cross < 145);
  // p = 1 fills the whole bipartite zone.
  auto full = plant_cross_edges(core, outer, 1.0, 9);
  CHECK(full.graph.edge_count() == 400);
}

TEST_CASE("generate assembles all four kinds deterministically") {
  for (auto kind : {ModelKind::Exp, ModelKind::ExpReg, ModelKind::Gamma, ModelKind::GammaReg}) {
    ModelParams mp = is_exp_kind(kind) ? small_exp() : small_gamma_reg();
    mp.kind = kind;
    if (is_reg_kind(kind)) mp.d = 6;
    auto a = generate(mp, {}, 42);
    auto b = generate(mp, {}, 42);
    CHECK(a == b);
    auto c = generate(mp, {}, 43);
    CHECK(!(a.graph == c.graph));

    CHECK(a.planted == VertexSubset::range(0, mp.k));
    CHECK(a.adversary_log.empty());
    CHECK(static_cast<int>(a.cross_edge_log.size()) == count_zone(a, true));
    CHECK(static_cast<int>(a.outer_edge_log.size()) == count_zone(a, false));

    auto core = induced_subgraph(a.graph, a.planted).graph;
    if (is_reg_kind(kind)) {
      for (int i = 0; i < mp.k; ++i) CHECK(core.weighted_degree(i) == doctest::Approx(mp.d));
    } else {
      CHECK(2.0 * core.total_weight() / mp.k == doctest::Approx(mp.d).epsilon(1e-12));
    }
  }
}

TEST_CASE("random-fraction adversary deletes only unprotected edges") {
  auto mp = small_gamma_reg();
  auto base = generate(mp, {}, 7);

  AdversarySpec adv;
  adv.strategy = AdversaryStrategy::RandomFraction;
  adv.q_cross = 1.0;
  adv.q_outer = 1.0;
  adv.seed = 1;
  auto hit = apply_adversary(base, adv);

  CHECK(count_zone(hit, true) == 0);
  CHECK(count_zone(hit, false) == 0);
  // Planted-interior edges survive untouched.
  auto core_before = induced_subgraph(base.graph, base.planted).graph;
  auto core_after = induced_subgraph(hit.graph, hit.planted).graph;
  CHECK(core_before == core_after);
  CHECK(hit.adversary_log.size() ==
        base.cross_edge_log.size() + base.outer_edge_log.size());
  CHECK(std::is_sorted(hit.adversary_log.begin(), hit.adversary_log.end()));
  // Monotone composition: the log accumulates across applications.
  auto again = apply_adversary(hit, adv);
  CHECK(again.adversary_log == hit.adversary_log);
}

TEST_CASE("high-degree adversary deletes the requested count") {
  auto mp = small_exp();
  auto base = generate(mp, {}, 7);
  AdversarySpec adv;
  adv.strategy = AdversaryStrategy::TargetHighDegree;
  adv.count = 5;
  auto hit = apply_adversary(base, adv);
  CHECK(hit.adversary_log.size() == 5);
  CHECK(hit.graph.edge_count() == base.graph.edge_count() - 5);
  for (auto [u, v] : hit.adversary_log) {
    CHECK(base.graph.has_edge(u, v));
    CHECK(!hit.graph.has_edge(u, v));
    CHECK(!(u < mp.k && v < mp.k));
  }
}

TEST_CASE("adversary spec validation") {
  AdversarySpec adv;
  adv.strategy = AdversaryStrategy::RandomFraction;
  adv.q_cross = 1.5;
  CHECK_THROWS_AS(adv.validate(), ParameterError);
  adv.q_cross = 0.5;
  adv.q_outer = -0.1;
  CHECK_THROWS_AS(adv.validate(), ParameterError);
  AdversarySpec target;
  target.strategy = AdversaryStrategy::TargetHighDegree;
  target.count = -1;
  CHECK_THROWS_AS(target.validate(), ParameterError);
}

TEST_CASE("instance text round-trips bit-exactly") {
  for (auto kind : {ModelKind::Exp, ModelKind::GammaReg}) {
    ModelParams mp = is_exp_kind(kind) ? small_exp() : small_gamma_reg();
    mp.kind = kind;
    AdversarySpec adv;
    adv.strategy = AdversaryStrategy::RandomFraction;
    adv.q_cross = 0.3;
    adv.q_outer = 0.2;
    adv.seed = 5;
    auto inst = generate(mp, adv, 99);

    std::string text = instance_to_text(inst);
    auto back = instance_from_text(text);
    CHECK(back == inst);
    CHECK(instance_to_text(back) == text);
  }
}

TEST_CASE("instance files round-trip via disk") {
  namespace fs = std::filesystem;
  auto inst = generate(small_gamma_reg(), {}, 3);
  auto path = (fs::temp_directory_path() / "dks_test_instance.json").string();
  save_instance(inst, path);
  auto back = load_instance(path);
  CHECK(back == inst);
  fs::remove(path);
  CHECK_THROWS_AS(load_instance(path), Error);
}

TEST_CASE("instance parser rejects malformed documents") {
  auto inst = generate(small_gamma_reg(), {}, 3);
  std::string text = instance_to_text(inst);

  CHECK_THROWS_AS(instance_from_text("{ not json"), ParseError);

  // Version bump.
  auto versioned = text;
  auto pos = versioned.find("\"format_version\": 1");
  REQUIRE(pos != std::string::npos);
  versioned.replace(pos, 19, "\"format_version\": 2");
  CHECK_THROWS_AS(instance_from_text(versioned), VersionError);

  // Duplicate edge.
  auto duplicated = text;
  auto first_edge = duplicated.find("[0, ");
  REQUIRE(first_edge != std::string::npos);
  auto line_end = duplicated.find('\n', first_edge);
  std::string edge_line = duplicated.substr(first_edge, line_end - first_edge);
  if (edge_line.back() != ',') edge_line += ',';
  duplicated.insert(first_edge, edge_line + "\n");
  CHECK_THROWS_AS(instance_from_text(duplicated), ParseError);

  // Parse errors carry a line number for syntax problems.
  try {
    instance_from_text("{\n\"format_version\": 1,\n!!!\n}");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() >= 2);
  }
}

TEST_CASE("instance parser enforces core integrity") {
  auto inst = generate(small_gamma_reg(), {}, 3);
  // Remove one planted-interior edge behind the serializer's back.
  auto tampered = inst;
  for (auto [u, v, w] : inst.graph.sorted_edges()) {
    (void)w;
    if (u < inst.params.k && v < inst.params.k) {
      tampered.graph.set_weight(u, v, 0.0);
      break;
    }
  }
  CHECK_THROWS_AS(instance_from_text(instance_to_text(tampered)), ParseError);
}

TEST_CASE("generate composes the adversary into the instance") {
  auto mp = small_gamma_reg();
  AdversarySpec adv;
  adv.strategy = AdversaryStrategy::TargetHighDegree;
  adv.count = 3;
  auto inst = generate(mp, adv, 7);
  CHECK(inst.adversary_log.size() == 3);
  auto pristine = generate(mp, {}, 7);
  CHECK(pristine.graph.edge_count() == inst.graph.edge_count() + 3);
}

TEST_CASE("per-stage seeds decorrelate construction stages") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(1, 0) == derive_seed(1, 0));
}
