#include <doctest.h>

#include <cmath>
#include <sstream>

#include "graspmc/error.hpp"
#include "graspmc/experiment.hpp"
#include "graspmc/serialization.hpp"
#include "support.hpp"

using namespace graspmc;

namespace {

ResultRecord record(Experiment e, const std::string& object, std::uint64_t seed, Tallies t) {
  ResultRecord r;
  r.config.experiment = e;
  r.config.object = object;
  r.config.seed = seed;
  r.tallies = t;
  return r;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

Json withoutClock(Json j) {
  j.erase("wall_clock_seconds");
  return j;
}

}  // namespace

TEST_CASE("config defaults") {
  const Json j = toJson(ExperimentConfig{});
  CHECK(j["iterations"] == 1000);
  CHECK(j["burn_in"] == 100);
  CHECK(j["subsample_size"] == 100);
  CHECK(j["gamma"].get<double>() == 0.0001);
  CHECK(j["nu"].get<double>() == 2.38 / std::sqrt(6.0));
  CHECK(j["p_check"].get<double>() == 0.6);
  CHECK(j["epsilon"].get<double>() == 0.7);
  CHECK(j["demonstration_count"] == 5);
  CHECK(j["schema"] == kConfigSchema);

  const auto partial = configFromJson(Json{{"object", "pan"}, {"seed", 4}});
  CHECK(partial.object == "pan");
  CHECK(partial.seed == 4);
  CHECK(partial.iterations == 1000);
  CHECK(toJson(configFromJson(j)) == j);
  CHECK_THROWS_AS(configFromJson(Json{{"iterashuns", 5}}), Error);
  CHECK_THROWS_AS(configFromJson(Json{{"experiment", "nope"}}), Error);
}

TEST_CASE("runExperiment presets") {
  const auto& catalog = grasp::objectCatalog();
  ExperimentConfig c;
  c.object = "plate";
  c.seed = 3;

  SUBCASE("baseline budget and determinism") {
    c.experiment = Experiment::RandomWalkBaseline;
    const auto a = runExperiment(c, catalog);
    const auto b = runExperiment(c, catalog);
    CHECK(a.record.tallies.total() == 1100);
    CHECK_FALSE(a.model.has_value());
    CHECK(a.record.trace.size() == 1100);
    CHECK(withoutClock(toJson(a.record)).dump() == withoutClock(toJson(b.record)).dump());
    CHECK(a.record.version == libraryVersion());
  }
  SUBCASE("active then transfer") {
    c.experiment = Experiment::ActiveBiasedInit;
    const auto source = runExperiment(c, catalog);
    REQUIRE(source.model.has_value());
    CHECK(source.record.tallies.total() == 1100);
    CHECK(source.record.sketchEvaluations == 1101);

    ExperimentConfig t = c;
    t.experiment = Experiment::TransferSimilarModes;
    t.object = "soup_plate";
    const auto moved = runExperiment(t, catalog, &*source.model);
    CHECK(moved.record.sketchEvaluations == 0);
    CHECK(moved.record.sourceObject == "plate");
    CHECK(moved.record.tallies.total() == 1100);

    try {
      runExperiment(t, catalog);
      FAIL("expected MissingSourceModel");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::MissingSourceModel);
    }
  }
  SUBCASE("random init and no trace") {
    c.experiment = Experiment::ActiveRandomInit;
    c.keepTrace = false;
    const auto r = runExperiment(c, catalog);
    CHECK(r.record.trace.empty());
    CHECK(r.record.tallies.total() == 1100);
  }
  SUBCASE("paired seeds share demonstrations") {
    c.experiment = Experiment::ActiveBiasedInit;
    const auto a = runExperiment(c, catalog);
    c.experiment = Experiment::ActiveRandomInit;
    const auto b = runExperiment(c, catalog);
    CHECK(a.model->modes == b.model->modes);
    CHECK(experimentDemonstrations(c, catalog)[0].grasp.toState() == a.model->modes[0]);
  }
  SUBCASE("unknown object") {
    c.object = "teapot";
    CHECK_THROWS_AS(runExperiment(c, catalog), Error);
  }
}

TEST_CASE("result documents round-trip") {
  ExperimentConfig c;
  c.experiment = Experiment::RandomWalkBaseline;
  c.iterations = 50;
  c.seed = 8;
  const auto r = runExperiment(c, grasp::objectCatalog()).record;
  const Json j = toJson(r);
  CHECK(toJson(resultFromJson(j)) == j);
  CHECK_FALSE(toJson(r, false).contains("trace"));
}

TEST_CASE("tables") {
  SUBCASE("pass-through") {
    const auto rows = tableRows({record(Experiment::ActiveBiasedInit, "plate", 1, {10, 20, 30, 1040})});
    const auto csv = lines(formatCsv(rows));
    REQUIRE(csv.size() == 2);
    CHECK(csv[0] == "experiment,object,seed,success,slipped,collision,miss");
    CHECK(csv[1] == "active_biased_init,plate,1,10,20,30,1040");
  }
  SUBCASE("grouped by experiment then object") {
    std::vector<ResultRecord> recs;
    for (auto e : {Experiment::ActiveBiasedInit, Experiment::RandomWalkBaseline}) {
      for (const char* o : {"pitcher", "pan", "plate"}) recs.push_back(record(e, o, 0, {}));
    }
    const auto rows = tableRows(recs);
    REQUIRE(rows.size() == 6);
    const std::vector<std::pair<std::string, std::string>> expected = {
        {"random_walk_baseline", "pitcher"}, {"random_walk_baseline", "pan"}, {"random_walk_baseline", "plate"},
        {"active_biased_init", "pitcher"},   {"active_biased_init", "pan"},   {"active_biased_init", "plate"}};
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CHECK(rows[i].experiment == expected[i].first);
      CHECK(rows[i].object == expected[i].second);
    }
    CHECK(lines(formatText(rows)).size() == 8);
  }
  SUBCASE("zeros") {
    const auto csv = lines(formatCsv(tableRows({record(Experiment::ActiveRandomInit, "pan", 2, {})})));
    CHECK(csv[1] == "active_random_init,pan,2,0,0,0,0");
  }
  SUBCASE("medians") {
    std::vector<ResultRecord> recs;
    for (std::size_t s : {5u, 1u, 9u}) recs.push_back(record(Experiment::ActiveBiasedInit, "pan", s, {s, 0, 0, 0}));
    const auto rows = medianRows(recs);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].tallies.success == 5);
    CHECK(rows[0].seed == "median(3)");
  }
}

TEST_CASE("sample export") {
  LearnedModel m;
  Rng rng(3);
  for (int i = 0; i < 5; ++i) {
    grasp::Grasp g;
    g.position = grasp::Vec3(rng.normal(), rng.normal(), rng.normal());
    g.orientation = UnitQuaternion::canonicalize(rng.normal(), rng.normal(), rng.normal(), rng.normal());
    m.modes.push_back(g.toState());
    m.modeDensities.push_back(i == 0 ? 0.0 : 0.5);
  }
  auto all = exportSamples(m, false);
  REQUIRE(all.size() == 5);
  for (const auto& s : all) {
    CHECK(s.tag == SampleTag::Demonstrated);
    const grasp::Vec3 a = s.orientationEnd - s.orientationStart, b = s.spanEnd - s.spanStart;
    CHECK(std::abs(a.normalized().dot(b.normalized())) < 1e-6);
  }
  CHECK(exportSamples(m, true).size() == 4);

  m.chain.seedState(m.modes[1], 0.5);
  m.chain.recordStep({m.modes[2], 0.0, OutcomeKind::Collision, false, false}, m.modes[1], 0.5);
  m.chain.recordStep({m.modes[3], 0.7, OutcomeKind::Success, true, true}, m.modes[3], 0.7);
  all = exportSamples(m, false);
  CHECK(all.size() == 7);
  CHECK(all.back().tag == SampleTag::Learned);
  CHECK(exportSamples(m, true).size() == 5);
  const Json doc = samplesToJson(all);
  CHECK(doc["schema"] == kSamplesSchema);
  CHECK(doc["samples"].size() == 7);
}

TEST_CASE("catalog documents") {
  const auto& catalog = grasp::objectCatalog();
  const Json doc = catalogToJson(catalog);
  const auto back = catalogFromJson(Json::parse(doc.dump()));
  REQUIRE(back.size() == catalog.size());
  Rng rng(4);
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    CHECK(back[i].name == catalog[i].name);
    const auto box = catalog[i].bounds.inflated(0.05);
    for (int k = 0; k < 200; ++k) {
      const grasp::Vec3 p(rng.uniform(box.lower.x(), box.upper.x()), rng.uniform(box.lower.y(), box.upper.y()),
                          rng.uniform(box.lower.z(), box.upper.z()));
      CHECK(back[i].sdf(p) == catalog[i].sdf(p));
    }
  }
  Json bad = doc;
  bad["objects"][0]["shape"]["kind"] = "blob";
  CHECK_THROWS_AS(catalogFromJson(bad), Error);
  CHECK_THROWS_AS(catalogFromJson(Json{{"objects", Json::array()}}), Error);

  // A hand-written document with defaulted poses.
  const Json custom = Json::parse(R"({"schema": "graspmc.catalog/1", "objects": [
      {"name": "ball", "shape": {"kind": "sphere", "radius": 0.03}},
      {"name": "ring", "shape": {"kind": "difference", "translation": [0, 0, 0.01], "children": [
          {"kind": "cylinder", "radius": 0.05, "half_height": 0.01},
          {"kind": "cylinder", "radius": 0.04, "half_height": 0.02}]}}]})");
  const auto objs = catalogFromJson(custom);
  CHECK(objs[0].sdf(grasp::Vec3::Zero()) == doctest::Approx(-0.03));
  CHECK(objs[1].sdf(grasp::Vec3(0, 0, 0.01)) > 0.0);
  CHECK(objs[1].sdf(grasp::Vec3(0.045, 0, 0.01)) < 0.0);
}
