#include <doctest.h>

#include <cmath>

#include "crowdrank/correlation.hpp"
#include "crowdrank/error.hpp"
#include "crowdrank/synthgen.hpp"
#include "helpers.hpp"

using namespace crowdrank;

TEST_CASE("perfect workers copy the truth") {
  for (int classes : {2, 4}) {
    SynthConfig cfg;
    cfg.skills = SkillDistribution::constant(1.0);
    cfg.class_count = classes;
    cfg.task_count = 50;
    const auto inst = generate(cfg);
    for (const auto& o : inst.observations.triples())
      CHECK(o.label == inst.labels[static_cast<std::size_t>(o.task)]);
  }
}

TEST_CASE("generation is reproducible from the seed") {
  SynthConfig cfg;
  cfg.graph_family = GraphFamily::kRing;
  cfg.seed = 42;
  const auto a = generate(cfg);
  const auto b = generate(cfg);
  CHECK(std::equal(a.observations.triples().begin(), a.observations.triples().end(),
                   b.observations.triples().begin(), b.observations.triples().end()));
  CHECK(a.labels == b.labels);
  CHECK(a.skills.values == b.skills.values);
  cfg.seed = 43;
  CHECK(generate(cfg).labels != a.labels);
}

TEST_CASE("family graphs") {
  const auto clique = make_family_graph(GraphFamily::kClique, 11, 0, 0);
  CHECK(clique.edge_count() == 55);
  const auto star = make_family_graph(GraphFamily::kStar3, 11, 0, 0);
  CHECK(star.edge_count() == 11);
  CHECK(star.degree(0) == 10);
  CHECK(star.count(1, 2) == 1);
  const auto ring = make_family_graph(GraphFamily::kRing, 11, 0, 0);
  CHECK(ring.edge_count() == 11);
  CHECK(ring.max_degree() == 2);
  for (int w : {4, 9, 11, 16}) {
    const auto grid = make_family_graph(GraphFamily::kGridPlusEdge, w, 0, 0);
    CHECK(analyze_components(grid).identifiable);
    CHECK(analyze_components(grid).components.size() == 1);
  }
  CHECK(parse_graph_family("grid_plus_edge") == GraphFamily::kGridPlusEdge);
  CHECK_THROWS_AS(parse_graph_family("torus"), Error);
}

TEST_CASE("round-robin assignment spreads tasks evenly over edges") {
  SynthConfig cfg;
  cfg.graph_family = GraphFamily::kRing;
  cfg.task_count = 330;
  const auto inst = generate(cfg);
  CHECK(inst.assignment == AssignmentMode::kEdgeRoundRobin);
  const auto g = build_graph(inst.observations);
  for (const auto& e : g.edges()) CHECK(e.n == 30);
  CHECK(inst.observations.task_count() == 330);
}

TEST_CASE("infeasible config: fewer tasks than design edges") {
  SynthConfig cfg;
  cfg.graph_family = GraphFamily::kClique;
  cfg.assignment = AssignmentMode::kEdgeRoundRobin;
  cfg.task_count = 11;
  CHECK_THROWS_AS(generate(cfg), Error);
}

TEST_CASE("beta(5,1) skills have mean near 2/3") {
  SynthConfig cfg;
  cfg.worker_count = 4000;
  cfg.task_count = 1;
  cfg.graph_family = GraphFamily::kClique;
  cfg.skills = SkillDistribution::beta(5, 1);
  const auto inst = generate(cfg);
  CHECK(inst.skills.values.mean() == doctest::Approx(2.0 / 3.0).epsilon(0.02));
  cfg.skills = SkillDistribution::beta(1, 3);
  CHECK(generate(cfg).skills.values.mean() == doctest::Approx(-0.5).epsilon(0.05));
}

TEST_CASE("grid skills lie on the grid") {
  SynthConfig cfg;
  cfg.shuffle_skills = false;
  const auto inst = generate(cfg);
  for (int i = 0; i < 11; ++i) CHECK(inst.skills.values(i) == doctest::Approx(-0.3 + 0.11 * i));
}

TEST_CASE("empirical ring correlations stay within the Hoeffding radius") {
  int covered = 0;
  const double delta = 0.1;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    SynthConfig cfg;
    cfg.graph_family = GraphFamily::kRing;
    cfg.seed = seed;
    const auto inst = generate(cfg);
    const auto corr = estimate_correlations(inst.observations);
    const auto g = corr.graph();
    const double r = hoeffding_radius(g.n_min(), static_cast<double>(g.degree_sum()), delta);
    bool ok = true;
    for (const auto& e : corr.entries())
      ok &= std::abs(e.c - inst.skills.values(e.i) * inst.skills.values(e.j)) <= r;
    covered += ok;
  }
  CHECK(covered >= 45);
}

TEST_CASE("inject_correlation_noise") {
  const auto g = testing::clique(6);
  const auto corr = testing::exact_corr(g, Eigen::VectorXd::Constant(6, 0.5));
  const auto same = inject_correlation_noise(corr, 0.0, 1);
  for (std::size_t k = 0; k < corr.size(); ++k) CHECK(same.entries()[k].c == corr.entries()[k].c);
  const auto noisy = inject_correlation_noise(corr, 0.2, 1);
  double dmax = 0.0;
  for (std::size_t k = 0; k < corr.size(); ++k)
    dmax = std::max(dmax, std::abs(noisy.entries()[k].c - corr.entries()[k].c));
  CHECK(dmax <= 0.2);
  CHECK(dmax > 0.0);
  CHECK_THROWS_AS(inject_correlation_noise(corr, -0.1, 1), Error);
}

TEST_CASE("sparsify") {
  SynthConfig cfg;
  cfg.task_count = 100;
  const auto inst = generate(cfg);
  const auto g = build_graph(inst.observations);
  SUBCASE("loose cap is the identity") {
    const auto out = sparsify(g, inst.observations, 10, 1);
    CHECK(out.graph.dense_counts() == g.dense_counts());
    CHECK(out.observations.size() == inst.observations.size());
  }
  SUBCASE("degree cap 2 leaves paths and cycles") {
    const auto out = sparsify(g, inst.observations, 2, 1);
    CHECK(out.graph.max_degree() <= 2);
    CHECK(out.graph.edge_count() <= 11);
    // The graph reported matches the observations left behind.
    CHECK(build_graph(out.observations).dense_counts() == out.graph.dense_counts());
    for (int t = 0; t < out.observations.task_count(); ++t) CHECK(out.observations.task_labels(t).size() != 1);
  }
}
