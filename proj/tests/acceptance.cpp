// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "graspmc/darting.hpp"
#include "graspmc/error.hpp"
#include "graspmc/experiment.hpp"
#include "graspmc/kameleon.hpp"
#include "graspmc/learning.hpp"
#include "graspmc/vmf.hpp"
#include "support.hpp"

using namespace graspmc;
using graspmc::testing::vec;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

template <class F>
void parallelFor(std::size_t n, F&& f) {
  const unsigned workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), unsigned(n)));
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) f(i);
    });
  }
  for (auto& t : pool) t.join();
}

double medianReal(std::vector<std::size_t> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? double(v[n / 2]) : 0.5 * double(v[n / 2 - 1] + v[n / 2]);
}

std::string join(const std::vector<std::size_t>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

// 1 -------------------------------------------------------------------------
Verdict volumeIdentity() {
  const auto r = buildJumpRegion(Vector::Zero(3), Matrix::Identity(3, 3), 1.0);
  const double err = std::abs(r.volume - 4.0 * std::numbers::pi / 3.0);
  char buf[64];
  std::snprintf(buf, sizeof buf, "|V - 4pi/3| = %.3e", err);
  return {err < 1e-12, buf};
}

// 2 -------------------------------------------------------------------------
Verdict jumpInvolution() {
  Rng rng(2);
  double worst = 0.0;
  auto region = [&] {
    Vector mu(5);
    for (int i = 0; i < 5; ++i) mu[i] = 3.0 * rng.normal();
    return buildJumpRegion(mu, graspmc::testing::randomPsd(5, rng) + 0.1 * Matrix::Identity(5, 5), 0.7);
  };
  for (int i = 0; i < 1000; ++i) {
    const auto a = region(), b = region();
    Vector x(5);
    for (int j = 0; j < 5; ++j) x[j] = 3.0 * rng.normal();
    worst = std::max(worst, (jumpTransform(jumpTransform(x, a, b), b, a) - x).norm());
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "max round-trip error %.3e", worst);
  return {worst < 1e-9, buf};
}

// 3 -------------------------------------------------------------------------
Verdict kameleonReduction() {
  const double gamma = 0.5;
  FunctionTarget target(3, [](const Vector& x) { return std::exp(-0.5 * x.squaredNorm()) * (1.0 + std::sin(x[0])); });
  const std::uint64_t seed = 2024;
  const int steps = 10000;

  KameleonConfig cfg;
  cfg.gamma = gamma;
  cfg.nu = 0.0;
  KameleonSampler sampler(cfg, StateSpace::Euclidean);
  ChainHistory history;
  Vector x = Vector::Zero(3);
  double d = target.density(x);
  history.seedState(x, d);
  Rng rng(seed);
  std::vector<Vector> chain;
  for (int i = 0; i < steps; ++i) {
    if (adaptationSchedule(std::size_t(i), cfg)) sampler.adapt(history, rng);
    const auto r = sampler.step(x, d, target, history, rng);
    x = r.next;
    d = r.nextDensity;
    chain.push_back(x);
  }

  // Plain random-walk Metropolis, written out by hand.
  Rng ref(seed);
  const double sd = std::sqrt(gamma * gamma);
  Vector y = Vector::Zero(3);
  double py = target.density(y);
  int mismatches = 0;
  for (int i = 0; i < steps; ++i) {
    Vector z(3);
    for (int j = 0; j < 3; ++j) z[j] = ref.normal();
    const Vector proposal = y + sd * z;
    const double pp = target.density(proposal);
    const double u = ref.uniform();
    bool accept = false;
    if (pp > 0.0) accept = py > 0.0 ? u < std::exp(std::min(0.0, std::log(pp) - std::log(py))) : true;
    if (accept) {
      y = proposal;
      py = pp;
    }
    if (!(chain[std::size_t(i)].array() == y.array()).all()) ++mismatches;
  }
  return {mismatches == 0, std::to_string(mismatches) + " of " + std::to_string(steps) + " states differ"};
}

// 4 -------------------------------------------------------------------------
Verdict stationarity() {
  FunctionTarget normal(2, [](const Vector& x) { return std::exp(-0.5 * x.squaredNorm()); });
  KameleonConfig cfg;
  cfg.gamma = 0.1;
  cfg.nu = 2.38 / std::sqrt(2.0);
  cfg.burnInIterations = 1000;
  KameleonSampler sampler(cfg, StateSpace::Euclidean);
  ChainHistory history;
  Vector x = Vector::Zero(2);
  double d = 1.0;
  history.seedState(x, d);
  Rng rng(4);
  const int post = 100000;
  Vector mean = Vector::Zero(2);
  Matrix second = Matrix::Zero(2, 2);
  for (std::size_t i = 0; i < cfg.burnInIterations + post; ++i) {
    if (adaptationSchedule(i, cfg)) sampler.adapt(history, rng);
    const auto r = sampler.step(x, d, normal, history, rng);
    x = r.next;
    d = r.nextDensity;
    if (i >= cfg.burnInIterations) {
      mean += x;
      second += x * x.transpose();
    }
  }
  mean /= post;
  const Matrix cov = (second - post * mean * mean.transpose()) / (post - 1);
  const double covErr = (cov - Matrix::Identity(2, 2)).norm();
  char buf[128];
  std::snprintf(buf, sizeof buf, "|mean| = %.4f, ||cov - I||_F = %.4f, bandwidth %.3f", mean.norm(), covErr,
                sampler.kernel().bandwidth());
  return {mean.norm() <= 0.05 && covErr <= 0.1, buf};
}

// 5 -------------------------------------------------------------------------
Verdict modeCoverage() {
  const double sigma = 0.1;
  const std::vector<Vector> centers{vec({0, 0}), vec({3, 0}), vec({1.5, 3})};
  FunctionTarget mix(2, [&](const Vector& x) { return graspmc::testing::mixtureDensity(x, centers, sigma); });

  auto covered = [&](std::uint64_t seed, double pCheck) {
    Rng rng(seed);
    Rng sketchRng = rng.split(), learnRng = rng.split();
    SketchParams sp;
    sp.positionSigma = sigma;
    const auto sketch = buildRoughSketch(mix, StateSpace::Euclidean, centers[0], sp, sketchRng);
    LearningParams lp;
    lp.space = StateSpace::Euclidean;
    lp.iterations = 2000;
    lp.kameleon.gamma = 0.1;
    lp.kameleon.nu = 2.38 / std::sqrt(2.0);
    lp.darting.pCheck = pCheck;
    lp.darting.epsilon = 2.0;
    lp.darting.sqrtScales = true;
    const auto model = activeLearn(mix, sketch, centers, lp, learnRng);
    std::size_t counts[3] = {0, 0, 0};
    const auto& props = model.chain.proposals();
    for (std::size_t i = model.chain.inheritedProposals(); i < props.size(); ++i) {
      if (!props[i].accepted) continue;
      for (int k = 0; k < 3; ++k) counts[k] += (props[i].state - centers[std::size_t(k)]).norm() <= 3 * sigma;
    }
    return counts[0] >= 50 && counts[1] >= 50 && counts[2] >= 50;
  };
  std::vector<int> combined(20), local(20);
  parallelFor(40, [&](std::size_t i) {
    if (i < 20) combined[i] = covered(i + 1, 0.6);
    else local[i - 20] = covered(i - 19, 1.0);
  });
  const int c = std::accumulate(combined.begin(), combined.end(), 0);
  const int l = std::accumulate(local.begin(), local.end(), 0);
  return {c >= 19 && l <= 5,
          "all modes covered: combined " + std::to_string(c) + "/20, Kameleon-only " + std::to_string(l) + "/20"};
}

// 6-9 share one sweep over catalog objects --------------------------------------
struct Sweep {
  std::map<std::string, std::vector<ResultRecord>> records;  // key: experiment/object
  std::vector<std::string> errors;
};

std::string key(Experiment e, const std::string& object) { return std::string(experimentName(e)) + "/" + object; }

Sweep runSweep() {
  const auto& catalog = grasp::objectCatalog();
  struct Job {
    Experiment experiment;
    std::string object;
    std::string source;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    for (const char* o : {"pitcher", "pan", "plate"}) {
      for (auto e : {Experiment::RandomWalkBaseline, Experiment::ActiveRandomInit, Experiment::ActiveBiasedInit}) {
        jobs.push_back({e, o, "", seed});
      }
    }
    for (auto [src, dst] : {std::pair{"plate", "soup_plate"}, {"pan", "small_pan"}, {"pitcher", "tall_pitcher"}}) {
      jobs.push_back({Experiment::TransferSimilarModes, dst, src, seed});
      jobs.push_back({Experiment::TransferActualModes, dst, src, seed});
    }
  }
  Sweep sweep;
  std::vector<std::optional<ResultRecord>> out(jobs.size());
  std::vector<std::string> errors(jobs.size());
  parallelFor(jobs.size(), [&](std::size_t i) {
    const Job& j = jobs[i];
    try {
      ExperimentConfig c;
      c.experiment = j.experiment;
      c.object = j.object;
      c.seed = j.seed;
      c.keepTrace = false;
      if (isTransfer(j.experiment)) {
        // The source model is the ActiveBiasedInit run on the source object with the same seed.
        ExperimentConfig s = c;
        s.experiment = Experiment::ActiveBiasedInit;
        s.object = j.source;
        const auto source = runExperiment(s, catalog);
        out[i] = runExperiment(c, catalog, &*source.model).record;
      } else {
        out[i] = runExperiment(c, catalog).record;
      }
    } catch (const std::exception& e) {
      errors[i] = std::string(experimentName(j.experiment)) + "/" + j.object + "/" + std::to_string(j.seed) + ": " +
                  e.what();
    }
  });
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (out[i]) sweep.records[key(jobs[i].experiment, jobs[i].object)].push_back(*out[i]);
    if (!errors[i].empty()) sweep.errors.push_back(errors[i]);
  }
  return sweep;
}

std::vector<std::size_t> successes(const Sweep& s, Experiment e, const std::string& object) {
  std::vector<std::size_t> out;
  const auto it = s.records.find(key(e, object));
  if (it == s.records.end()) return out;
  for (const auto& r : it->second) out.push_back(r.tallies.success);
  return out;
}

Verdict budgetConservation(const Sweep& s) {
  std::size_t runs = 0, bad = 0;
  std::set<Experiment> seen;
  for (const auto& [k, recs] : s.records) {
    for (const auto& r : recs) {
      ++runs;
      seen.insert(r.config.experiment);
      if (r.tallies.total() != 1100) ++bad;
    }
  }
  return {bad == 0 && s.errors.empty() && seen.size() == 5,
          std::to_string(runs) + " runs over " + std::to_string(seen.size()) + " presets, " + std::to_string(bad) +
              " with tallies != 1100, " + std::to_string(s.errors.size()) + " errors"};
}

Verdict baselineDominance(const Sweep& s) {
  bool ok = true;
  std::string detail;
  for (const char* o : {"pitcher", "pan", "plate"}) {
    const auto active = successes(s, Experiment::ActiveBiasedInit, o);
    const auto walk = successes(s, Experiment::RandomWalkBaseline, o);
    if (active.size() != 10 || walk.size() != 10) return {false, std::string("incomplete sweep for ") + o};
    const double ma = medianReal(active), mw = medianReal(walk);
    ok = ok && ma > mw && mw <= 5;
    char buf[128];
    std::snprintf(buf, sizeof buf, "%s%s: biased %.1f vs walk %.1f", detail.empty() ? "" : "; ", o, ma, mw);
    detail += buf;
  }
  return {ok, "median successes " + detail};
}

Verdict initialisationOrdering(const Sweep& s) {
  bool ok = true;
  std::string detail;
  for (const char* o : {"pitcher", "pan", "plate"}) {
    const auto biased = successes(s, Experiment::ActiveBiasedInit, o);
    const auto random = successes(s, Experiment::ActiveRandomInit, o);
    if (biased.size() != 10 || random.size() != 10) return {false, std::string("incomplete sweep for ") + o};
    const double mb = medianReal(biased), mr = medianReal(random);
    ok = ok && mb >= mr;
    char buf[128];
    std::snprintf(buf, sizeof buf, "%s%s: biased %.1f vs random %.1f", detail.empty() ? "" : "; ", o, mb, mr);
    detail += buf;
  }
  return {ok, "median successes " + detail};
}

Verdict transferOrdering(const Sweep& s) {
  bool ok = true;
  std::string detail;
  for (const char* o : {"soup_plate", "small_pan"}) {
    const auto similar = successes(s, Experiment::TransferSimilarModes, o);
    const auto actual = successes(s, Experiment::TransferActualModes, o);
    if (similar.size() != 10 || actual.size() != 10) return {false, std::string("incomplete sweep for ") + o};
    const double ms = medianReal(similar), ma = medianReal(actual);
    ok = ok && ma >= ms;
    char buf[128];
    std::snprintf(buf, sizeof buf, "%s%s: actual %.1f vs similar %.1f", detail.empty() ? "" : "; ", o, ma, ms);
    detail += buf;
  }
  const auto tall = successes(s, Experiment::TransferSimilarModes, "tall_pitcher");
  ok = ok && tall.size() == 10;
  detail += "; tall_pitcher similar-modes runs completed " + std::to_string(tall.size()) + "/10 (successes " +
            join(tall) + ")";
  return {ok, detail};
}

// 10 ------------------------------------------------------------------------
Verdict vmfResultant() {
  // I_2(k) / I_1(k) from an independent high-precision evaluation.
  const std::vector<std::pair<double, double>> oracle = {
      {1.0, 0.24019372387008975}, {5.0, 0.71934058136431289}, {20.0, 0.9259877485828848}};
  bool ok = true;
  std::string detail;
  Rng rng(10);
  for (const auto& [kappa, expected] : oracle) {
    ok = ok && std::abs(graspmc::testing::besselRatio(4, kappa) - expected) < 1e-12;
    const VonMisesFisher v(vec({0.5, 0.5, 0.5, 0.5}), kappa);
    Vector sum = Vector::Zero(4);
    for (int i = 0; i < 100000; ++i) sum += v.sample(rng);
    const double r = (sum / 1e5).norm();
    ok = ok && std::abs(r - expected) < 0.01;
    char buf[96];
    std::snprintf(buf, sizeof buf, "%skappa %g: %.4f vs %.4f", detail.empty() ? "" : "; ", kappa, r, expected);
    detail += buf;
  }
  return {ok, detail};
}

// 11 ------------------------------------------------------------------------
Verdict graspInvariants() {
  const auto& catalog = grasp::objectCatalog();
  const grasp::GripperModel gripper;
  std::vector<std::string> failures(catalog.size());
  std::vector<std::size_t> successCases(catalog.size()), creaseSkips(catalog.size());
  parallelFor(catalog.size(), [&](std::size_t oi) {
    const auto& o = catalog[oi];
    Rng rng(1100 + oi);
    std::ostringstream fail;
    const auto demos = grasp::demonstrateGrasps(o, gripper, 5, rng);
    const auto box = o.bounds.inflated(0.05);
    for (int i = 0; i < 1000; ++i) {
      grasp::Grasp g;
      if (i % 2 == 0) {
        g = demos[std::size_t(i / 2) % demos.size()].grasp;
        g.position += 0.004 * grasp::Vec3(rng.normal(), rng.normal(), rng.normal());
        g.orientation = UnitQuaternion::canonicalize(VonMisesFisher(g.orientation.coeffs(), 400.0).sample(rng));
      } else {
        for (int k = 0; k < 3; ++k) g.position[k] = rng.uniform(box.lower[k], box.upper[k]);
        g.orientation = UnitQuaternion::canonicalize(rng.normal(), rng.normal(), rng.normal(), rng.normal());
      }
      const auto a = grasp::evaluateGrasp(g, o, gripper);
      const auto b = grasp::evaluateGrasp(g, o, gripper);
      if (a.kind != b.kind || a.quality != b.quality) fail << "nondeterministic; ";
      if (!(a.quality >= 0.0) || !std::isfinite(a.quality)) fail << "negative density; ";
      if ((a.quality > 0.0) != (a.kind == OutcomeKind::Success)) fail << "quality/kind mismatch; ";
      successCases[oi] += a.kind == OutcomeKind::Success;

      const auto q = UnitQuaternion::canonicalize(rng.normal(), rng.normal(), rng.normal(), rng.normal());
      const grasp::RigidTransform pose{q.rotationMatrix(),
                                       grasp::Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1))};
      const grasp::Grasp moved{pose.apply(g.position),
                               UnitQuaternion::fromRotation(pose.rotation * g.orientation.rotationMatrix())};
      const auto w = grasp::evaluateGrasp(moved, grasp::PosedObject{&o, pose}, gripper);
      if (w.kind != a.kind || std::abs(w.quality - a.quality) >= 1e-6) fail << "frame dependence; ";

      grasp::Vec3 p, r;
      for (int k = 0; k < 3; ++k) {
        p[k] = rng.uniform(box.lower[k], box.upper[k]);
        r[k] = p[k] + 0.02 * rng.normal();
      }
      if (std::abs(o.sdf(p) - o.sdf(r)) > (p - r).norm() + 1e-3) fail << "Lipschitz; ";

      const grasp::Vec3 s = grasp::sampleSurfacePoint(o, rng);
      const double h = 1e-5;
      grasp::Vec3 grad;
      bool smooth = true;
      for (int k = 0; k < 3; ++k) {
        grasp::Vec3 e = grasp::Vec3::Zero();
        e[k] = h;
        const double f0 = o.sdf(s), fp = o.sdf(s + e), fm = o.sdf(s - e);
        grad[k] = (fp - fm) / (2 * h);
        smooth = smooth && std::abs((fp - f0) - (f0 - fm)) / h < 0.01;
      }
      if (!smooth) ++creaseSkips[oi];
      else if (std::abs(grad.norm() - 1.0) >= 1e-3) fail << "gradient norm; ";
    }
    if (creaseSkips[oi] > 10) fail << "too many crease points; ";
    failures[oi] = fail.str();
  });
  bool ok = true;
  std::ostringstream detail;
  detail << "1000 cases per object;";
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    ok = ok && failures[i].empty();
    detail << ' ' << catalog[i].name << " (" << successCases[i] << " successes, " << creaseSkips[i] << " crease points)";
    if (!failures[i].empty()) detail << " FAILED: " << failures[i];
  }
  return {ok, detail.str()};
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](int id, const char* name, const std::function<Verdict()>& check) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d %s: %s (%s) [%.2fs]\n", id, v.pass ? "PASS" : "FAIL", name, v.detail.c_str(), secs);
    std::fflush(stdout);
    failed += v.pass ? 0 : 1;
  };

  report(1, "ellipsoid volume identity", volumeIdentity);
  report(2, "jump involution", jumpInvolution);
  report(3, "Kameleon reduction to random-walk Metropolis", kameleonReduction);
  report(4, "stationarity on a 2D standard normal", stationarity);
  report(5, "mode coverage on a 3-component mixture", modeCoverage);
  Sweep sweep;
  const auto t0 = std::chrono::steady_clock::now();
  sweep = runSweep();
  std::printf("experiment sweep: %zu groups in %.1fs\n", sweep.records.size(),
              std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  for (const auto& e : sweep.errors) std::printf("  sweep error: %s\n", e.c_str());
  report(6, "budget conservation", [&] { return budgetConservation(sweep); });
  report(7, "baseline dominance", [&] { return baselineDominance(sweep); });
  report(8, "initialisation ordering", [&] { return initialisationOrdering(sweep); });
  report(9, "transfer ordering", [&] { return transferOrdering(sweep); });
  report(10, "vMF mean resultant length", vmfResultant);
  report(11, "grasp-domain invariants", graspInvariants);
  std::printf("%d of 11 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
