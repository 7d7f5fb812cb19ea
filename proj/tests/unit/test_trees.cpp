#include "doctest.h"

#include <paperlab/trees.hpp>

#include <random>

using namespace paperlab;

namespace {

const auto S = LeafKind::Snaky;
const auto St = LeafKind::Straight;

PlanarTree random_tree(std::mt19937& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, 5);
  int r = pick(rng);
  if (depth == 0 || r < 2) return PlanarTree::leaf(r == 0 ? St : r == 1 ? S : LeafKind::Bumpy);
  std::uniform_int_distribution<std::size_t> ar(0, 3);
  std::vector<PlanarTree> ch;
  std::size_t k = ar(rng);
  for (std::size_t i = 0; i < k; ++i) ch.push_back(random_tree(rng, depth - 1));
  return PlanarTree::vertex(std::move(ch));
}

std::size_t inner_edges(const PlanarTree& t) {
  return t.inner_vertex_count() == 0 ? 0 : t.inner_vertex_count() - 1;
}

}  // namespace

TEST_CASE("graft examples") {
  auto t = graft(PlanarTree::corolla(2), 1, PlanarTree::corolla(3));
  CHECK(t.leaf_count() == 4);
  CHECK(t.height() == 3);
  CHECK(t.code() == "((~~~)~)");

  auto c = PlanarTree::corolla({St, S, St});
  for (std::size_t i = 1; i <= 3; ++i) CHECK(graft(c, i, PlanarTree::leaf(c.leaves()[i - 1])) == c);

  auto corked = graft(PlanarTree::corolla(2), 2, PlanarTree::corolla(0));
  CHECK(corked.leaf_count() == 1);
  CHECK(corked.code() == "(~())");

  CHECK_THROWS_AS(graft(c, 0, c), SlotOutOfRange);
  CHECK_THROWS_AS(graft(c, 4, c), SlotOutOfRange);
}

TEST_CASE("contract_inner_edge examples") {
  auto t = graft(PlanarTree::corolla(4), 3, PlanarTree::corolla(3));
  auto merged = contract_inner_edge(t, {2});
  CHECK(merged == PlanarTree::corolla(6));
  CHECK_THROWS_AS(contract_inner_edge(t, {0}), BadEdge);
  CHECK_THROWS_AS(contract_inner_edge(t, {}), BadEdge);

  auto mixed = graft(PlanarTree::corolla({St, S}), 2, PlanarTree::corolla({S, St, St}));
  CHECK(contract_inner_edge(mixed, {1}).leaves() == std::vector<LeafKind>{St, S, St, St});
}

TEST_CASE("subdivide_edge examples") {
  auto single = PlanarTree::leaf(S);
  auto sub = subdivide_edge(single, {});
  CHECK(sub == PlanarTree::corolla(1));

  auto c = PlanarTree::corolla({St, S});
  auto s1 = subdivide_edge(c, {1});
  CHECK(contract_inner_edge(s1, {1}) == c);
  auto s2 = subdivide_edge(subdivide_edge(c, {0}), {});
  CHECK(s2.inner_vertex_count() == c.inner_vertex_count() + 2);
  CHECK(s2.leaves() == c.leaves());
}

TEST_CASE("canonical codes round trip") {
  CHECK(canonical_code(PlanarTree::leaf(S)) == "~");
  CHECK(decode("~") == PlanarTree::leaf(S));
  CHECK(decode(PlanarTree::corolla(2).code()) == PlanarTree::corolla(2));
  CHECK_THROWS_AS(decode("(~"), MalformedCode);
  CHECK_THROWS_AS(decode("~~"), MalformedCode);
  CHECK_THROWS_AS(decode("x"), MalformedCode);
  CHECK_THROWS_AS(decode(""), MalformedCode);

  std::mt19937 rng(5);
  for (int i = 0; i < 300; ++i) {
    auto t = random_tree(rng, 4);
    CHECK(decode(t.code()) == t);
    CHECK(decode(t.code()).code() == t.code());
  }
}

TEST_CASE("enumerate_trees examples") {
  TreeSpec corollas;
  corollas.snaky = 1;
  corollas.max_straight = 2;
  corollas.max_inner_vertices = 1;
  corollas.min_inner_vertices = 1;
  corollas.max_height = 2;
  CHECK(enumerate_trees(corollas).size() == 6);

  TreeSpec binary;
  binary.snaky = 3;
  binary.arities = std::set<std::size_t>{2};
  auto bt = enumerate_trees(binary);
  REQUIRE(bt.size() == 2);
  CHECK(bt[0].code() == "((~~)~)");
  CHECK(bt[1].code() == "(~(~~))");

  TreeSpec cork;
  cork.max_inner_vertices = 1;
  auto ck = enumerate_trees(cork);
  REQUIRE(ck.size() == 1);
  CHECK(ck[0] == PlanarTree::corolla(0));

  TreeSpec unbounded;
  unbounded.snaky = 1;
  CHECK_THROWS_AS(enumerate_trees(unbounded), UnboundedSpec);
}

TEST_CASE("enumerate_trees counts match Catalan numbers") {
  const std::size_t catalan[] = {1, 1, 2, 5, 14, 42};
  for (std::size_t n = 1; n <= 6; ++n) {
    TreeSpec spec;
    spec.snaky = n;
    spec.arities = std::set<std::size_t>{2};
    CHECK(enumerate_trees(spec).size() == catalan[n - 1]);
  }
}

TEST_CASE("enumerate_trees respects level constraints") {
  // Height <= 3, snaky leaves only at level 2, level-3 nodes are straight leaves.
  TreeSpec spec;
  spec.snaky = 1;
  spec.max_straight = 2;
  spec.max_height = 3;
  spec.max_inner_vertices = 3;
  spec.min_inner_vertices = 1;
  spec.level_leaf_kinds[2] = {S};
  spec.level_leaf_kinds[3] = {St};
  spec.leaf_only_levels = {3};
  auto ts = enumerate_trees(spec);
  CHECK_FALSE(ts.empty());
  for (const auto& t : ts) {
    CHECK(t.height() <= 3);
    CHECK(t.count(S) == 1);
    for (const auto& p : t.leaf_paths()) CHECK((p.size() == 1) == (t.at(p).kind() == S));
  }
  CHECK(std::find(ts.begin(), ts.end(), decode("(()~(||))")) != ts.end());
}

TEST_CASE("enumerate_trees output is strictly increasing") {
  TreeSpec spec;
  spec.snaky = 2;
  spec.max_straight = 2;
  spec.max_inner_vertices = 3;
  auto ts = enumerate_trees(spec);
  for (std::size_t i = 1; i < ts.size(); ++i) CHECK(ts[i - 1].code() < ts[i].code());
}

TEST_CASE("property: graft associativity and leaf arithmetic") {
  std::mt19937 rng(17);
  int checked = 0;
  for (int trial = 0; trial < 400; ++trial) {
    auto t = random_tree(rng, 3), s = random_tree(rng, 3), r = random_tree(rng, 3);
    std::size_t p = t.leaf_count(), q = s.leaf_count();
    if (p == 0 || q == 0 || r.leaf_count() == 0) continue;
    std::uniform_int_distribution<std::size_t> pi(1, p), pj(1, q);
    std::size_t i = pi(rng), j = pj(rng);
    auto ts = graft(t, i, s);
    CHECK(ts.leaf_count() == p + q - 1);
    CHECK(graft(ts, i + j - 1, r) == graft(t, i, graft(s, j, r)));
    ++checked;
  }
  CHECK(checked > 100);
}

TEST_CASE("property: contracting all inner edges gives a corolla with the same leaves") {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    auto t = random_tree(rng, 4);
    if (t.is_leaf()) continue;
    auto c = contract_all(t);
    CHECK(c.height() <= 2);
    CHECK(c.leaves() == t.leaves());
    // One contraction at a time reaches the same corolla.
    PlanarTree step = t;
    while (inner_edges(step) > 0) {
      auto vs = step.vertex_paths();
      step = contract_inner_edge(step, vs.back());
    }
    CHECK(step == c);
  }
}
