#include <doctest.h>

#include <sstream>

#include "crowdrank/error.hpp"
#include "crowdrank/experiment.hpp"
#include "crowdrank/inference.hpp"
#include "crowdrank/io.hpp"
#include "crowdrank/pipeline.hpp"
#include "crowdrank/synthgen.hpp"
#include "helpers.hpp"

using namespace crowdrank;

namespace {

std::string error_of(const std::string& text, LabelEncoding enc = LabelEncoding::kPlusMinusOne) {
  std::istringstream in(text);
  try {
    read_observations(in, enc, 0, "f.csv");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kData);
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("read_observations parses ids and labels") {
  std::istringstream in("\xEF\xBB\xBFworker_id,task_id,label\r\nalice,q1,1\r\nbob,q1,-1\n\"carol\",q2, 1\n");
  const auto data = read_observations(in, LabelEncoding::kPlusMinusOne);
  CHECK(data.workers.size() == 3);
  CHECK(data.tasks.size() == 2);
  CHECK(data.workers.name(2) == "carol");
  CHECK(data.observations.size() == 3);
  CHECK(data.observations.triples()[0].label == kPositiveClass);
  CHECK(data.observations.triples()[1].label == kNegativeClass);
}

TEST_CASE("read_observations reports line numbers") {
  CHECK(error_of("").find("empty file") != std::string::npos);
  CHECK(error_of("worker_id,task_id,label\na,t,1\nb,t\n").find("f.csv:3") != std::string::npos);
  CHECK(error_of("worker_id,task_id,label\na,t,1\nb,t,7\n").find("f.csv:3") != std::string::npos);
  CHECK(error_of("who,what,label\na,t,1\n").find("f.csv:1") != std::string::npos);
  CHECK(error_of("worker_id,task_id,label\na,t,1\na,t,-1\n") != "");
  CHECK(error_of("worker_id,task_id,label\na,t,2\n", LabelEncoding::kZeroOne).find("f.csv:2") != std::string::npos);
}

TEST_CASE("class encoding infers the class count") {
  std::istringstream in("worker_id,task_id,label\na,t,0\nb,t,3\n");
  CHECK(read_observations(in, LabelEncoding::kClassIndex).observations.class_count() == 4);
}

TEST_CASE("observation and truth files round-trip") {
  for (auto enc : {LabelEncoding::kPlusMinusOne, LabelEncoding::kZeroOne}) {
    SynthConfig cfg;
    cfg.task_count = 40;
    const auto inst = generate(cfg);
    IdMap workers, tasks;
    for (int i = 0; i < 11; ++i) workers.intern("w" + std::to_string(i));
    for (int t = 0; t < 40; ++t) tasks.intern("t" + std::to_string(t));
    std::stringstream buf;
    write_observations(buf, inst.observations, workers, tasks, enc);
    const auto back = read_observations(buf, enc);
    REQUIRE(back.observations.size() == inst.observations.size());
    for (std::size_t k = 0; k < back.observations.size(); ++k) {
      const auto& o = back.observations.triples()[k];
      const auto& orig = inst.observations.triples()[k];
      CHECK(back.workers.name(o.worker) == workers.name(orig.worker));
      CHECK(back.tasks.name(o.task) == tasks.name(orig.task));
      CHECK(o.label == orig.label);
    }
    std::stringstream tbuf;
    write_truth(tbuf, inst.labels, tasks, enc);
    const auto truth = read_truth(tbuf, enc);
    REQUIRE(truth.size() == 40);
    for (int t = 0; t < 40; ++t) CHECK(truth[static_cast<std::size_t>(t)].second == inst.labels[static_cast<std::size_t>(t)]);
  }
  CHECK(decode_label("-1", LabelEncoding::kPlusMinusOne) == kNegativeClass);
  CHECK(decode_label("0", LabelEncoding::kZeroOne) == kNegativeClass);
  CHECK_FALSE(decode_label("0", LabelEncoding::kPlusMinusOne));
  CHECK(encode_label(kPositiveClass, LabelEncoding::kPlusMinusOne) == "1");
}

TEST_CASE("estimate_skills: large-T clique is close to the truth") {
  SynthConfig cfg;
  cfg.task_count = 10000;
  cfg.seed = 5;
  const auto inst = generate(cfg);
  const auto res = estimate_skills(inst.observations, EstimateOptions{});
  CHECK((res.skills.values - inst.skills.values).cwiseAbs().maxCoeff() <= 0.05);
  CHECK(res.perturbation_bound.has_value());
  CHECK(res.hoeffding_radius > 0.0);
}

TEST_CASE("estimate_skills: expgrad and pgd agree on noiseless data") {
  const auto g = testing::clique(8, 1000000);
  Eigen::VectorXd s(8);
  s << 0.3, 0.5, 0.7, 0.9, 0.4, 0.6, 0.8, 0.35;
  const auto corr = testing::exact_corr(g, s);
  const std::vector<int> tasks(8, 1000000);
  EstimateOptions pgd;
  EstimateOptions eg;
  eg.solver.method = Method::kExpgrad;
  const auto a = estimate_skills(corr, tasks, pgd);
  const auto b = estimate_skills(corr, tasks, eg);
  CHECK((a.skills.values - b.skills.values).cwiseAbs().maxCoeff() <= 1e-3);
  CHECK((a.skills.values - s).cwiseAbs().maxCoeff() <= 1e-3);
}

TEST_CASE("estimate_skills refuses bipartite data unless forced") {
  const auto g = testing::ring(6, 50);
  const auto corr = testing::exact_corr(g, Eigen::VectorXd::Constant(6, 0.6));
  const std::vector<int> tasks(6, 100);
  try {
    estimate_skills(corr, tasks, EstimateOptions{});
    FAIL("expected refusal");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kNotIdentifiable);
  }
  EstimateOptions forced;
  forced.force = true;
  const auto res = estimate_skills(corr, tasks, forced);
  CHECK_FALSE(res.perturbation_bound.has_value());
  CHECK(res.skills.size() == 6);
}

TEST_CASE("estimate_skills: isolated workers get zero skill") {
  std::vector<Edge> edges = {{0, 1, 100}, {1, 2, 100}, {0, 2, 100}};
  const auto g = InteractionGraph::from_edges(4, edges);
  Eigen::VectorXd s(4);
  s << 0.6, 0.7, 0.8, 0.0;
  const auto res = estimate_skills(testing::exact_corr(g, s), {200, 200, 200, 5}, EstimateOptions{});
  CHECK(res.skills.values(3) == 0.0);
  CHECK_FALSE(res.components.estimable(1));
}

TEST_CASE("plug-in prediction beats majority vote on a skilled clique") {
  const auto trial = run_trial([] {
    SynthConfig cfg;
    cfg.task_count = 330;
    cfg.seed = 3;
    return cfg;
  }(), EstimateOptions{});
  CHECK(trial.pipeline_ok);
  CHECK(trial.pe_pipeline <= trial.pe_majority);
}

TEST_CASE("run_sweep is independent of the thread count") {
  SweepSpec spec;
  spec.base.graph_family = GraphFamily::kStar3;
  spec.task_counts = {33, 110};
  spec.seeds = {0, 1, 2, 3};
  spec.label = "star3";
  const auto one = run_sweep(spec, 1);
  const auto many = run_sweep(spec, 3);
  REQUIRE(one.size() == many.size());
  REQUIRE(one.size() == 6);
  for (std::size_t k = 0; k < one.size(); ++k) {
    CHECK(one[k].series == many[k].series);
    CHECK(one[k].x == many[k].x);
    CHECK(one[k].mean == many[k].mean);
    CHECK(one[k].std == many[k].std);
  }
  const auto [m, sd] = mean_std({1.0, 2.0, 3.0});
  CHECK(m == 2.0);
  CHECK(sd == doctest::Approx(1.0));
}
