#include "graspmc/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <map>
#include <sstream>

#include "graspmc/error.hpp"

#ifndef GRASPMC_VERSION
#define GRASPMC_VERSION "0.0.0"
#endif

namespace graspmc {

namespace {

constexpr const char* kExperimentNames[] = {
    "random_walk_baseline", "active_random_init", "active_biased_init", "transfer_similar_modes",
    "transfer_actual_modes",
};

TraceRow traceRow(const ProposalRecord& p) { return {p.state, p.density, p.outcome, p.accepted, p.jump}; }

std::vector<Vector> demoStates(const std::vector<grasp::Demonstration>& demos) {
  std::vector<Vector> out;
  out.reserve(demos.size());
  for (const auto& d : demos) out.push_back(d.grasp.toState());
  return out;
}

}  // namespace

const char* libraryVersion() noexcept { return GRASPMC_VERSION; }

const char* experimentName(Experiment e) { return kExperimentNames[static_cast<std::size_t>(e)]; }

Experiment experimentFromName(const std::string& name) {
  for (std::size_t i = 0; i < std::size(kExperimentNames); ++i) {
    if (name == kExperimentNames[i]) return static_cast<Experiment>(i);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown experiment '" + name + "'");
}

bool isTransfer(Experiment e) noexcept {
  return e == Experiment::TransferSimilarModes || e == Experiment::TransferActualModes;
}

void ExperimentConfig::validate() const {
  if (object.empty()) throw Error(ErrorCode::InvalidArgument, "config: object is empty");
  if (budget() == 0) throw Error(ErrorCode::InvalidArgument, "config: burnIn + iterations must be positive");
  if (demonstrationCount == 0) throw Error(ErrorCode::InvalidArgument, "config: demonstrationCount must be positive");
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw Error(ErrorCode::InvalidArgument, "config: kappa must be >= 0");
  if (!(positionSigma >= 0.0) || !std::isfinite(positionSigma)) {
    throw Error(ErrorCode::InvalidArgument, "config: positionSigma must be >= 0");
  }
  learningParams().validate();
}

LearningParams ExperimentConfig::learningParams() const {
  LearningParams p;
  p.kameleon.gamma = gamma;
  p.kameleon.nu = nu;
  p.kameleon.subsampleSize = subsampleSize;
  p.kameleon.burnInIterations = burnIn;
  p.darting.pCheck = pCheck;
  p.darting.epsilon = epsilon;
  p.darting.invertedAcceptance = invertedAcceptance;
  p.darting.sqrtScales = sqrtScales;
  p.iterations = iterations;
  p.invertPCheck = invertPCheck;
  p.space = StateSpace::Grasp;
  return p;
}

SketchParams ExperimentConfig::sketchParams() const {
  SketchParams p;
  p.iterations = budget();
  p.positionSigma = positionSigma;
  p.kappa = kappa;
  return p;
}

SeedStreams::SeedStreams(std::uint64_t seed) : demo(0), sketch(0), learn(0) {
  Rng master(seed);
  demo = master.split();
  sketch = master.split();
  learn = master.split();
}

namespace {

void validateRun(const ExperimentConfig& config, const grasp::GripperModel& gripper,
                 const grasp::EvaluationParams& params) {
  config.validate();
  gripper.validate();
  params.validate();
}

RoughSketch makeSketch(const ExperimentConfig& config, const grasp::ObjectModel& object,
                       const grasp::GripperModel& gripper, const grasp::GraspTarget& target,
                       const std::vector<Vector>& modes, Rng& rng) {
  RoughSketch sketch;
  if (config.experiment == Experiment::ActiveRandomInit) {
    const grasp::Aabb box = grasp::workspaceBox(object, gripper);
    sketch = buildRandomSketch(target, box.lower, box.upper, config.budget(), rng);
  } else {
    const Vector& start = modes[rng.index(modes.size())];
    sketch = buildRoughSketch(target, StateSpace::Grasp, start, config.sketchParams(), rng);
  }
  sketch.sourceObject = object.name;
  return sketch;
}

}  // namespace

std::vector<grasp::Demonstration> experimentDemonstrations(const ExperimentConfig& config,
                                                           const std::vector<grasp::ObjectModel>& catalog,
                                                           const grasp::GripperModel& gripper,
                                                           const grasp::EvaluationParams& params) {
  validateRun(config, gripper, params);
  SeedStreams streams(config.seed);
  return demonstrateGrasps(grasp::findObject(catalog, config.object), gripper, config.demonstrationCount,
                           streams.demo, params);
}

RoughSketch experimentSketch(const ExperimentConfig& config, const std::vector<grasp::ObjectModel>& catalog,
                             const grasp::GripperModel& gripper, const grasp::EvaluationParams& params) {
  validateRun(config, gripper, params);
  const auto& object = grasp::findObject(catalog, config.object);
  SeedStreams streams(config.seed);
  const auto modes = demoStates(demonstrateGrasps(object, gripper, config.demonstrationCount, streams.demo, params));
  grasp::GraspTarget target(object, gripper, params);
  return makeSketch(config, object, gripper, target, modes, streams.sketch);
}

ExperimentOutput runExperiment(const ExperimentConfig& config, const std::vector<grasp::ObjectModel>& catalog,
                               const LearnedModel* source, const grasp::GripperModel& gripper,
                               const grasp::EvaluationParams& params) {
  validateRun(config, gripper, params);
  if (isTransfer(config.experiment) && source == nullptr) {
    throw Error(ErrorCode::MissingSourceModel,
                std::string(experimentName(config.experiment)) + " requires a source model");
  }
  const auto& object = grasp::findObject(catalog, config.object);
  const auto t0 = std::chrono::steady_clock::now();

  SeedStreams streams(config.seed);
  grasp::GraspTarget target(object, gripper, params);
  ExperimentOutput out;
  ResultRecord& rec = out.record;
  rec.config = config;
  rec.version = libraryVersion();
  auto demonstrations = [&] {
    return demoStates(demonstrateGrasps(object, gripper, config.demonstrationCount, streams.demo, params));
  };

  switch (config.experiment) {
    case Experiment::RandomWalkBaseline: {
      const RoughSketch sketch = makeSketch(config, object, gripper, target, demonstrations(), streams.sketch);
      rec.tallies = tallyOutcomes(sketch.proposals);
      rec.sketchEvaluations = sketch.evaluations;
      rec.stats.localSteps = sketch.proposals.size();
      for (const auto& p : sketch.proposals) rec.stats.localAccepted += p.accepted ? 1 : 0;
      if (config.keepTrace) {
        for (const auto& p : sketch.proposals) rec.trace.push_back(traceRow(p));
      }
      break;
    }
    case Experiment::ActiveRandomInit:
    case Experiment::ActiveBiasedInit: {
      const auto modes = demonstrations();
      const RoughSketch sketch = makeSketch(config, object, gripper, target, modes, streams.sketch);
      rec.sketchEvaluations = sketch.evaluations;
      out.model = activeLearn(target, sketch, modes, config.learningParams(), streams.learn, object.name);
      break;
    }
    case Experiment::TransferSimilarModes:
    case Experiment::TransferActualModes: {
      std::vector<Vector> actual;
      ModeSource ms = ModeSource::SimilarObjectModes;
      if (config.experiment == Experiment::TransferActualModes) {
        actual = demonstrations();
        ms = ModeSource::ActualObjectModes;
      }
      rec.sourceObject = source->object;
      out.model = transferLearn(target, *source, ms, actual, config.learningParams(), streams.learn, object.name);
      break;
    }
  }

  if (out.model) {
    out.model->seed = config.seed;
    rec.tallies = tallyOutcomes(*out.model);
    rec.stats = out.model->stats;
    if (config.keepTrace) {
      const auto& props = out.model->chain.proposals();
      for (std::size_t i = out.model->chain.inheritedProposals(); i < props.size(); ++i) {
        rec.trace.push_back(traceRow(props[i]));
      }
    }
  }
  rec.wallClockSeconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

std::vector<TableRow> tableRows(const std::vector<ResultRecord>& records) {
  std::map<std::string, std::size_t> objectOrder;
  for (const auto& r : records) objectOrder.emplace(r.config.object, objectOrder.size());
  std::vector<const ResultRecord*> sorted;
  for (const auto& r : records) sorted.push_back(&r);
  std::stable_sort(sorted.begin(), sorted.end(), [&](const ResultRecord* a, const ResultRecord* b) {
    const auto ka = std::tuple(a->config.experiment, objectOrder.at(a->config.object), a->config.seed);
    const auto kb = std::tuple(b->config.experiment, objectOrder.at(b->config.object), b->config.seed);
    return ka < kb;
  });
  std::vector<TableRow> rows;
  for (const auto* r : sorted) {
    rows.push_back({experimentName(r->config.experiment), r->config.object, std::to_string(r->config.seed), r->tallies});
  }
  return rows;
}

std::vector<TableRow> medianRows(const std::vector<ResultRecord>& records) {
  const auto rows = tableRows(records);
  std::vector<TableRow> out;
  auto median = [](std::vector<std::size_t> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    // Lower middle for even counts.
    return v[(n - 1) / 2];
  };
  for (std::size_t i = 0; i < rows.size();) {
    std::size_t j = i;
    std::vector<std::size_t> s, sl, c, m;
    while (j < rows.size() && rows[j].experiment == rows[i].experiment && rows[j].object == rows[i].object) {
      s.push_back(rows[j].tallies.success);
      sl.push_back(rows[j].tallies.slipped);
      c.push_back(rows[j].tallies.collision);
      m.push_back(rows[j].tallies.miss);
      ++j;
    }
    out.push_back({rows[i].experiment, rows[i].object, "median(" + std::to_string(j - i) + ")",
                   Tallies{median(s), median(sl), median(c), median(m)}});
    i = j;
  }
  return out;
}

std::string formatCsv(const std::vector<TableRow>& rows) {
  std::ostringstream os;
  os << "experiment,object,seed,success,slipped,collision,miss\n";
  for (const auto& r : rows) {
    os << r.experiment << ',' << r.object << ',' << r.seed << ',' << r.tallies.success << ',' << r.tallies.slipped
       << ',' << r.tallies.collision << ',' << r.tallies.miss << '\n';
  }
  return os.str();
}

std::string formatText(const std::vector<TableRow>& rows) {
  const std::vector<std::string> header = {"Experiment", "Object", "Seed", "Success", "Slipped", "Collision", "Miss"};
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows) {
    cells.push_back({r.experiment, r.object, r.seed, std::to_string(r.tallies.success),
                     std::to_string(r.tallies.slipped), std::to_string(r.tallies.collision),
                     std::to_string(r.tallies.miss)});
  }
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = header[c].size();
    for (const auto& row : cells) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) os << "  ";
      // Text columns left-aligned, counts right-aligned.
      if (c < 3) os << std::left; else os << std::right;
      os << std::setw(static_cast<int>(width[c])) << row[c];
    }
    os << '\n';
  };
  line(header);
  std::size_t total = 2 * (header.size() - 1);
  for (auto w : width) total += w;
  os << std::string(total, '-') << '\n';
  for (const auto& row : cells) line(row);
  return os.str();
}

namespace {

SampleRecord sampleFor(const Vector& state, double quality, OutcomeKind outcome, SampleTag tag,
                       const grasp::GripperModel& gripper) {
  const auto g = grasp::Grasp::fromState(state);
  const Eigen::Matrix3d r = g.orientation.rotationMatrix();
  const grasp::Vec3 approach = r * gripper.approachAxis.normalized();
  const grasp::Vec3 closing = r * gripper.closingAxis.normalized();
  SampleRecord s;
  s.position = g.position;
  s.orientation = g.orientation.coeffs();
  s.orientationStart = g.position;
  s.orientationEnd = g.position + gripper.fingerLength * approach;
  const grasp::Vec3 mid = g.position + gripper.contactDepth() * approach;
  s.spanStart = mid - 0.5 * gripper.jawSpan * closing;
  s.spanEnd = mid + 0.5 * gripper.jawSpan * closing;
  s.quality = quality;
  s.outcome = outcome;
  s.tag = tag;
  return s;
}

}  // namespace

std::vector<SampleRecord> exportSamples(const LearnedModel& model, bool successOnly, const grasp::GripperModel& gripper) {
  std::vector<SampleRecord> out;
  for (std::size_t i = 0; i < model.modes.size(); ++i) {
    const double q = i < model.modeDensities.size() ? model.modeDensities[i] : 0.0;
    if (successOnly && !(q > 0.0)) continue;
    out.push_back(sampleFor(model.modes[i], q, q > 0.0 ? OutcomeKind::Success : OutcomeKind::Miss,
                            SampleTag::Demonstrated, gripper));
  }
  const auto& props = model.chain.proposals();
  for (std::size_t i = model.chain.inheritedProposals(); i < props.size(); ++i) {
    if (successOnly && !(props[i].density > 0.0)) continue;
    out.push_back(sampleFor(props[i].state, props[i].density, props[i].outcome, SampleTag::Learned, gripper));
  }
  return out;
}

}  // namespace graspmc
