#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "graspmc/grasp/grasp.hpp"
#include "graspmc/learning.hpp"

namespace graspmc {

/// Library version, echoed into every result document.
const char* libraryVersion() noexcept;

enum class Experiment : std::uint8_t {
  RandomWalkBaseline,
  ActiveRandomInit,
  ActiveBiasedInit,
  TransferSimilarModes,
  TransferActualModes,
};

const char* experimentName(Experiment e);
Experiment experimentFromName(const std::string& name);
bool isTransfer(Experiment e) noexcept;

struct ExperimentConfig {
  Experiment experiment = Experiment::ActiveBiasedInit;
  std::string object = "plate";
  std::uint64_t seed = 0;
  std::size_t iterations = 1000;
  std::size_t burnIn = 100;
  std::size_t subsampleSize = 100;
  double gamma = 1e-4;
  double nu = 2.38 / std::sqrt(6.0);
  double pCheck = 0.6;
  double epsilon = 0.7;
  double kappa = 50.0;
  double positionSigma = 0.2;
  std::size_t demonstrationCount = 5;
  bool invertedAcceptance = false;
  bool sqrtScales = false;
  bool invertPCheck = false;
  bool keepTrace = true;

  void validate() const;
  std::size_t budget() const noexcept { return burnIn + iterations; }
  LearningParams learningParams() const;
  SketchParams sketchParams() const;
};

struct TraceRow {
  Vector state;
  double density = 0.0;
  OutcomeKind outcome = OutcomeKind::Miss;
  bool accepted = false;
  bool jumped = false;
};

struct ResultRecord {
  ExperimentConfig config;
  Tallies tallies;
  RunStatistics stats;
  std::vector<TraceRow> trace;
  /// Target evaluations spent on a rough sketch; zero for transfer runs.
  std::uint64_t sketchEvaluations = 0;
  /// Empty unless this is a transfer run.
  std::string sourceObject;
  double wallClockSeconds = 0.0;
  std::string version;
};

struct ExperimentOutput {
  ResultRecord record;
  /// Absent for the random-walk baseline.
  std::optional<LearnedModel> model;
};

/// Runs one preset end to end. The seed is split into independent demo,
/// sketch and learning streams, so presets sharing a seed share their
/// demonstrations. Transfer presets need `source`, else MissingSourceModel.
ExperimentOutput runExperiment(const ExperimentConfig& config, const std::vector<grasp::ObjectModel>& catalog,
                               const LearnedModel* source = nullptr, const grasp::GripperModel& gripper = {},
                               const grasp::EvaluationParams& params = {});

/// Independent generators derived from one experiment seed.
struct SeedStreams {
  Rng demo;
  Rng sketch;
  Rng learn;

  explicit SeedStreams(std::uint64_t seed);
};

/// The demonstrations runExperiment would use for this config.
std::vector<grasp::Demonstration> experimentDemonstrations(const ExperimentConfig& config,
                                                           const std::vector<grasp::ObjectModel>& catalog,
                                                           const grasp::GripperModel& gripper = {},
                                                           const grasp::EvaluationParams& params = {});

/// The rough sketch runExperiment would build: uniform poses for
/// ActiveRandomInit, otherwise a random walk from a demonstration.
RoughSketch experimentSketch(const ExperimentConfig& config, const std::vector<grasp::ObjectModel>& catalog,
                             const grasp::GripperModel& gripper = {}, const grasp::EvaluationParams& params = {});

struct TableRow {
  std::string experiment;
  std::string object;
  std::string seed;
  Tallies tallies;
};

/// Records ordered by experiment, then object (first appearance), then seed.
std::vector<TableRow> tableRows(const std::vector<ResultRecord>& records);
/// One row per (experiment, object) with per-column medians; the seed column
/// reads "median(n)".
std::vector<TableRow> medianRows(const std::vector<ResultRecord>& records);

std::string formatCsv(const std::vector<TableRow>& rows);
std::string formatText(const std::vector<TableRow>& rows);

enum class SampleTag : std::uint8_t { Demonstrated, Learned };

struct SampleRecord {
  grasp::Vec3 position = grasp::Vec3::Zero();
  /// (w, x, y, z).
  Eigen::Vector4d orientation = Eigen::Vector4d::UnitX();
  /// Palm centre to fingertip centre, along the approach axis.
  grasp::Vec3 orientationStart = grasp::Vec3::Zero();
  grasp::Vec3 orientationEnd = grasp::Vec3::Zero();
  /// Jaw to jaw at the contact depth, along the closing axis.
  grasp::Vec3 spanStart = grasp::Vec3::Zero();
  grasp::Vec3 spanEnd = grasp::Vec3::Zero();
  double quality = 0.0;
  OutcomeKind outcome = OutcomeKind::Miss;
  SampleTag tag = SampleTag::Learned;
};

/// Modes (tagged demonstrated) followed by this run's evaluated proposals.
std::vector<SampleRecord> exportSamples(const LearnedModel& model, bool successOnly,
                                        const grasp::GripperModel& gripper = {});

}  // namespace graspmc
