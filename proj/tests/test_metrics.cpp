#include <doctest.h>

#include <random>
#include <stdexcept>
#include <vector>

#include <riskmesh/metrics.hpp>

using namespace riskmesh;

namespace {

InfectionEdge edge(AgentId child, AgentId parent, int day = 0,
                   LocationKind kind = LocationKind::household) {
  InfectionEdge e;
  e.child = child;
  e.parent = parent;
  e.location = parent == kNoAgent ? kNoLocation : LocationId{1};
  e.location_kind = kind;
  e.day = day;
  e.seed = parent == kNoAgent;
  return e;
}

}  // namespace

TEST_CASE("infection tree counts nodes and out-degrees") {
  InfectionTree tree;
  tree.add(edge(1, kNoAgent));
  tree.add(edge(2, 1));
  tree.add(edge(3, 1));
  tree.add(edge(4, 2));

  CHECK(tree.node_count() == 4);
  CHECK(tree.contains(1));
  CHECK(tree.contains(4));
  CHECK_FALSE(tree.contains(99));
  CHECK(tree.out_degree(1) == 2);
  CHECK(tree.out_degree(2) == 1);
  CHECK(tree.out_degree(3) == 0);
  CHECK(tree.out_degree(99) == 0);
  CHECK(tree.edges().size() == 4);
}

TEST_CASE("seed infections carry no parent and bump nobody's degree") {
  InfectionTree tree;
  tree.add(edge(7, kNoAgent));
  tree.add(edge(8, kNoAgent));
  CHECK(tree.node_count() == 2);
  CHECK(tree.out_degree(kNoAgent) == 0);
  CHECK(tree.out_degree(7) == 0);
}

TEST_CASE("a second infection of the same agent is rejected") {
  InfectionTree tree;
  tree.add(edge(1, kNoAgent));
  tree.add(edge(2, 1));
  CHECK_THROWS_AS(tree.add(edge(2, 1)), std::logic_error);
  CHECK_THROWS_AS(tree.add(edge(2, kNoAgent)), std::logic_error);
  // The failed insert must not have mutated anything.
  CHECK(tree.node_count() == 2);
  CHECK(tree.out_degree(1) == 1);
}

TEST_CASE("an infection without a child agent is malformed") {
  InfectionTree tree;
  CHECK_THROWS_AS(tree.add(edge(kNoAgent, 1)), std::invalid_argument);
}

TEST_CASE("rt is the mean out-degree of the closing cohort") {
  InfectionTree tree;
  tree.add(edge(1, kNoAgent));
  tree.add(edge(2, kNoAgent));
  tree.add(edge(3, 1));
  tree.add(edge(4, 1));
  tree.add(edge(5, 1));
  tree.add(edge(6, 2));

  // Agent 1 infected three, agent 2 one. Both close inside the window.
  std::vector<std::pair<AgentId, int>> ends{{1, 10}, {2, 12}};
  auto rt = estimate_rt(tree, ends, 14, 7);
  REQUIRE(rt.has_value());
  CHECK(*rt == doctest::Approx(2.0));
}

TEST_CASE("every closed case infecting exactly two gives rt 2.0") {
  InfectionTree tree;
  std::vector<std::pair<AgentId, int>> ends;
  AgentId next = 100;
  for (AgentId parent = 0; parent < 50; ++parent) {
    tree.add(edge(parent, kNoAgent));
    tree.add(edge(next++, parent));
    tree.add(edge(next++, parent));
    ends.emplace_back(parent, 5 + static_cast<int>(parent) % 3);
  }
  auto rt = estimate_rt(tree, ends, 8, 4);
  REQUIRE(rt.has_value());
  CHECK(*rt == doctest::Approx(2.0));
}

TEST_CASE("the rt window is inclusive on both ends") {
  InfectionTree tree;
  tree.add(edge(1, kNoAgent));
  tree.add(edge(2, kNoAgent));
  tree.add(edge(3, kNoAgent));
  tree.add(edge(10, 1));
  tree.add(edge(11, 1));
  tree.add(edge(12, 2));
  tree.add(edge(13, 3));

  // day 10, window 3 covers end days [7, 10].
  std::vector<std::pair<AgentId, int>> ends{{1, 7}, {2, 10}, {3, 11}};
  auto rt = estimate_rt(tree, ends, 10, 3);
  REQUIRE(rt.has_value());
  // Agent 3 closes after the window: cohort is {1, 2} with 2 + 1 children.
  CHECK(*rt == doctest::Approx(1.5));

  // One day later the cohort is {2, 3}.
  auto later = estimate_rt(tree, ends, 11, 3);
  REQUIRE(later.has_value());
  CHECK(*later == doctest::Approx(1.0));
}

TEST_CASE("an empty cohort yields no estimate") {
  InfectionTree tree;
  tree.add(edge(1, kNoAgent));
  std::vector<std::pair<AgentId, int>> ends{{1, 20}};

  CHECK_FALSE(estimate_rt(tree, ends, 0, 7).has_value());
  CHECK_FALSE(estimate_rt(tree, ends, 12, 7).has_value());
  CHECK_FALSE(estimate_rt(tree, {}, 20, 7).has_value());
  CHECK(estimate_rt(tree, ends, 20, 7).has_value());
}

TEST_CASE("a windowless rt request is rejected") {
  InfectionTree tree;
  CHECK_THROWS_AS(estimate_rt(tree, {}, 5, 0), std::invalid_argument);
  CHECK_THROWS_AS(estimate_rt(tree, {}, 5, -2), std::invalid_argument);
}

TEST_CASE("closed cases without children drag the estimate down") {
  InfectionTree tree;
  tree.add(edge(1, kNoAgent));
  tree.add(edge(2, kNoAgent));
  tree.add(edge(3, 1));
  std::vector<std::pair<AgentId, int>> ends{{1, 5}, {2, 5}};
  auto rt = estimate_rt(tree, ends, 5, 2);
  REQUIRE(rt.has_value());
  CHECK(*rt == doctest::Approx(0.5));
}

TEST_CASE("rt recovers the offspring mean of a simulated branching process") {
  // Oracle: run a Poisson(1.7) branching process directly and track every
  // realized offspring count. Only generations whose children were actually
  // drawn count as closed; the final generation stays open, otherwise its
  // zero degrees would bias the estimate.
  std::mt19937 gen(20260818);
  std::poisson_distribution<int> offspring(1.7);

  InfectionTree tree;
  std::vector<std::pair<AgentId, int>> ends;
  AgentId next_id = 0;
  std::vector<AgentId> current;
  for (int i = 0; i < 400; ++i) {
    AgentId a = next_id++;
    tree.add(edge(a, kNoAgent));
    current.push_back(a);
  }

  long closed = 0;
  double oracle_children = 0.0;
  int generation = 0;
  while (closed < 10000 && !current.empty()) {
    std::vector<AgentId> next_gen;
    for (AgentId parent : current) {
      int kids = offspring(gen);
      for (int c = 0; c < kids; ++c) {
        AgentId child = next_id++;
        tree.add(edge(child, parent, generation + 1));
        next_gen.push_back(child);
      }
      ends.emplace_back(parent, generation);
      closed += 1;
      oracle_children += kids;
    }
    current = std::move(next_gen);
    generation += 1;
  }
  REQUIRE(closed >= 10000);

  double oracle_mean = oracle_children / static_cast<double>(closed);
  auto rt = estimate_rt(tree, ends, generation, generation + 1);
  REQUIRE(rt.has_value());
  // Exact agreement with the hand-tracked mean, and both near the true 1.7.
  CHECK(*rt == doctest::Approx(oracle_mean).epsilon(1e-12));
  CHECK(std::abs(*rt - 1.7) <= 0.1);
}

TEST_CASE("branching-process cohorts split cleanly by generation") {
  // Same construction, but query one generation at a time: window 1 at
  // day g selects exactly generations g-1 and g, so a window of 0 days
  // worth of slack is avoided by using per-generation end days spaced 2.
  std::mt19937 gen(41);
  std::poisson_distribution<int> offspring(2.0);

  InfectionTree tree;
  std::vector<std::pair<AgentId, int>> ends;
  std::vector<double> per_gen_mean;
  AgentId next_id = 0;
  std::vector<AgentId> current;
  for (int i = 0; i < 200; ++i) {
    AgentId a = next_id++;
    tree.add(edge(a, kNoAgent));
    current.push_back(a);
  }
  for (int g = 0; g < 4 && !current.empty(); ++g) {
    std::vector<AgentId> next_gen;
    double kids_total = 0.0;
    for (AgentId parent : current) {
      int kids = offspring(gen);
      kids_total += kids;
      for (int c = 0; c < kids; ++c) {
        AgentId child = next_id++;
        tree.add(edge(child, parent));
        next_gen.push_back(child);
      }
      ends.emplace_back(parent, 2 * g);
    }
    per_gen_mean.push_back(kids_total / static_cast<double>(current.size()));
    current = std::move(next_gen);
  }

  for (int g = 0; g < static_cast<int>(per_gen_mean.size()); ++g) {
    auto rt = estimate_rt(tree, ends, 2 * g, 1);
    REQUIRE(rt.has_value());
    CHECK(*rt == doctest::Approx(per_gen_mean[static_cast<std::size_t>(g)])
                     .epsilon(1e-12));
  }
}

TEST_CASE("monotone and single-peak series are unimodal") {
  CHECK(is_unimodal({0, 1, 2, 3, 4, 5}, 1));
  CHECK(is_unimodal({5, 4, 3, 2, 1, 0}, 1));
  CHECK(is_unimodal({0, 5, 20, 80, 100, 70, 30, 10, 2, 0}, 1));
  CHECK(is_unimodal({0, 5, 20, 80, 100, 70, 30, 10, 2, 0}, 3));
}

TEST_CASE("degenerate series are vacuously unimodal") {
  CHECK(is_unimodal({}, 3));
  CHECK(is_unimodal({7}, 3));
  CHECK(is_unimodal({3, 9}, 3));
  CHECK(is_unimodal({0, 0, 0, 0, 0, 0}, 3));  // zero-infection run
}

TEST_CASE("a genuine second wave is not unimodal") {
  CHECK_FALSE(is_unimodal({0, 10, 100, 10, 0, 10, 100, 10, 0}, 1));
  CHECK_FALSE(is_unimodal({0, 10, 100, 10, 0, 10, 100, 10, 0}, 3));
  // Second wave after a long quiet stretch.
  std::vector<double> two(60, 0.0);
  for (int i = 0; i < 20; ++i) two[static_cast<std::size_t>(i)] = 100.0 - 5.0 * std::abs(i - 10);
  for (int i = 40; i < 60; ++i) two[static_cast<std::size_t>(i)] = 80.0 - 4.0 * std::abs(i - 50);
  CHECK_FALSE(is_unimodal(two, 3));
}

TEST_CASE("dips within the slack are forgiven, larger ones are not") {
  // Peak 100 gives a slack of 5: a dip of 4 before the peak passes,
  // a dip of 10 fails. Window 1 disables smoothing so the slack rule
  // is what is exercised.
  CHECK(is_unimodal({0, 50, 46, 100, 60, 20, 0}, 1));
  CHECK_FALSE(is_unimodal({0, 50, 40, 100, 60, 20, 0}, 1));
  // Rebound after the peak: 4 passes, 10 fails.
  CHECK(is_unimodal({0, 50, 100, 60, 56, 58, 20, 0}, 1));
  CHECK_FALSE(is_unimodal({0, 50, 100, 60, 50, 60, 20, 0}, 1));
}

TEST_CASE("smoothing rescues integer sawtooth on a small curve") {
  // Alternating +4/-2 steps: the raw dips of 2 exceed the slack of 1
  // at this scale, but a 3-day moving average flattens them out.
  std::vector<double> saw{0, 4, 2, 6, 4, 8, 6, 10, 8, 6, 4, 2, 0};
  CHECK_FALSE(is_unimodal(saw, 1));
  CHECK(is_unimodal(saw, 3));
}
