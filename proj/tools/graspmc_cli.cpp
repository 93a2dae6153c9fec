// graspmc command-line runner. Talks to the library through the C interface only.
#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "graspmc/graspmc.h"

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

struct Failure : std::runtime_error {
  explicit Failure(const std::string& m) : std::runtime_error(m) {}
};

void check(gmc_status s, const std::string& what) {
  if (s != GMC_OK) throw Failure(what + ": " + gmc_status_name(s) + ": " + gmc_last_error());
}

std::string take(char* s) {
  std::string out(s ? s : "");
  gmc_string_free(s);
  return out;
}

std::string readFile(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Failure("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void writeFile(const fs::path& p, const std::string& content) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Failure("cannot write " + p.string());
  out << content;
  if (content.empty() || content.back() != '\n') out << '\n';
}

using CatalogPtr = std::unique_ptr<gmc_catalog, decltype(&gmc_catalog_free)>;
using ResultPtr = std::unique_ptr<gmc_result, decltype(&gmc_result_free)>;
using ModelPtr = std::unique_ptr<gmc_model, decltype(&gmc_model_free)>;

CatalogPtr loadCatalog(const std::string& path) {
  gmc_catalog* c = nullptr;
  if (path.empty()) {
    check(gmc_catalog_builtin(&c), "catalog");
  } else {
    check(gmc_catalog_from_json(readFile(path).c_str(), &c), "catalog " + path);
  }
  return {c, gmc_catalog_free};
}

ModelPtr loadModel(const fs::path& path) {
  gmc_model* m = nullptr;
  check(gmc_model_from_json(readFile(path).c_str(), &m), "model " + path.string());
  return {m, gmc_model_free};
}

std::vector<std::uint64_t> parseSeeds(const std::string& spec) {
  const auto dots = spec.find("..");
  try {
    if (dots == std::string::npos) return {std::stoull(spec)};
    const std::uint64_t a = std::stoull(spec.substr(0, dots));
    const std::uint64_t b = std::stoull(spec.substr(dots + 2));
    if (b < a) throw Failure("empty seed range " + spec);
    std::vector<std::uint64_t> out;
    for (std::uint64_t s = a;; ++s) {
      out.push_back(s);
      if (s == b) break;
    }
    return out;
  } catch (const std::logic_error&) {
    throw Failure("bad seed specification '" + spec + "'");
  }
}

std::string replaceAll(std::string s, const std::string& from, const std::string& to) {
  for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
  return s;
}

/// Config fields settable from the command line. Only flags actually given
/// override the config file.
struct ConfigFlags {
  std::string configFile;
  std::string experiment;
  std::string object;
  std::uint64_t iterations = 0, burnIn = 0, subsample = 0, demonstrations = 0;
  double gamma = 0, nu = 0, pCheck = 0, epsilon = 0, kappa = 0, positionSigma = 0;
  bool invertedAcceptance = false, sqrtScales = false, invertPCheck = false, noTrace = false;
  std::vector<std::pair<CLI::Option*, std::string>> bound;

  void attach(CLI::App& app, bool withExperiment) {
    app.add_option("--config", configFile, "Experiment config document")->check(CLI::ExistingFile);
    if (withExperiment) bound.push_back({app.add_option("--experiment", experiment, "Experiment preset"), "experiment"});
    bound.push_back({app.add_option("--object", object, "Catalog object"), "object"});
    bound.push_back({app.add_option("--iterations", iterations, "Iterations after burn-in"), "iterations"});
    bound.push_back({app.add_option("--burn-in", burnIn, "Burn-in iterations"), "burn_in"});
    bound.push_back({app.add_option("--subsample", subsample, "Kameleon subsample size"), "subsample_size"});
    bound.push_back({app.add_option("--gamma", gamma, "Isotropic proposal scale"), "gamma"});
    bound.push_back({app.add_option("--nu", nu, "Kernel proposal scale"), "nu"});
    bound.push_back({app.add_option("--p-check", pCheck, "Local-step probability"), "p_check"});
    bound.push_back({app.add_option("--epsilon", epsilon, "Jump region scale"), "epsilon"});
    bound.push_back({app.add_option("--kappa", kappa, "Sketch vMF concentration"), "kappa"});
    bound.push_back({app.add_option("--position-sigma", positionSigma, "Sketch position step"), "position_sigma"});
    bound.push_back(
        {app.add_option("--demonstrations", demonstrations, "Demonstrated grasps per run"), "demonstration_count"});
    bound.push_back({app.add_flag("--inverted-acceptance", invertedAcceptance, "Darting accepts when u > P"), "inverted_acceptance"});
    bound.push_back({app.add_flag("--sqrt-scales", sqrtScales, "Jump semi-axes scale with sqrt(eigenvalue)"), "sqrt_scales"});
    bound.push_back({app.add_flag("--invert-p-check", invertPCheck, "p-check is the darting probability instead"), "invert_p_check"});
    app.add_flag("--no-trace", noTrace, "Drop per-iteration traces from result documents");
  }

  Json document() const {
    Json doc = configFile.empty() ? Json::object() : Json::parse(readFile(configFile));
    for (const auto& [opt, key] : bound) {
      if (opt->count() == 0) continue;
      if (key == "experiment") doc[key] = experiment;
      else if (key == "object") doc[key] = object;
      else if (key == "iterations") doc[key] = iterations;
      else if (key == "burn_in") doc[key] = burnIn;
      else if (key == "subsample_size") doc[key] = subsample;
      else if (key == "gamma") doc[key] = gamma;
      else if (key == "nu") doc[key] = nu;
      else if (key == "p_check") doc[key] = pCheck;
      else if (key == "epsilon") doc[key] = epsilon;
      else if (key == "kappa") doc[key] = kappa;
      else if (key == "position_sigma") doc[key] = positionSigma;
      else if (key == "demonstration_count") doc[key] = demonstrations;
      else if (key == "inverted_acceptance") doc[key] = invertedAcceptance;
      else if (key == "sqrt_scales") doc[key] = sqrtScales;
      else if (key == "invert_p_check") doc[key] = invertPCheck;
    }
    if (noTrace) doc["keep_trace"] = false;
    return doc;
  }
};

/// Effective config for one seed, after library defaulting.
Json effectiveConfig(Json doc, std::uint64_t seed) {
  doc["seed"] = seed;
  char* out = nullptr;
  check(gmc_config_normalize(doc.dump().c_str(), &out), "config");
  return Json::parse(take(out));
}

std::string runStem(const Json& cfg) {
  return cfg.at("experiment").get<std::string>() + "_" + cfg.at("object").get<std::string>() + "_s" +
         std::to_string(cfg.at("seed").get<std::uint64_t>());
}

struct Sweep {
  std::vector<std::uint64_t> seeds;
  unsigned threads = 1;
  fs::path outDir = "runs";
  std::string source;
};

/// Runs one config per seed, writing <stem>.config.json, <stem>.result.json
/// and, when a model is produced, <stem>.model.json.
int runSweep(const gmc_catalog* catalog, const Json& doc, const Sweep& sweep) {
  std::vector<Json> configs;
  for (auto s : sweep.seeds) configs.push_back(effectiveConfig(doc, s));
  std::vector<ResultPtr> results;
  for (std::size_t i = 0; i < configs.size(); ++i) results.emplace_back(nullptr, gmc_result_free);
  std::vector<std::string> errors(configs.size());
  std::atomic<std::size_t> next{0};
  std::mutex logMutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      const Json& cfg = configs[i];
      const std::string stem = runStem(cfg);
      try {
        ModelPtr source(nullptr, gmc_model_free);
        if (!sweep.source.empty()) {
          source = loadModel(replaceAll(sweep.source, "{seed}", std::to_string(cfg.at("seed").get<std::uint64_t>())));
        }
        writeFile(sweep.outDir / (stem + ".config.json"), cfg.dump(2));
        gmc_result* r = nullptr;
        gmc_model* m = nullptr;
        check(gmc_run_experiment(catalog, cfg.dump().c_str(), source.get(), &r, &m), stem);
        ResultPtr result(r, gmc_result_free);
        ModelPtr model(m, gmc_model_free);
        char* text = nullptr;
        check(gmc_result_to_json(result.get(), cfg.at("keep_trace").get<bool>() ? 1 : 0, &text), stem);
        writeFile(sweep.outDir / (stem + ".result.json"), take(text));
        if (model) {
          check(gmc_model_to_json(model.get(), &text), stem);
          writeFile(sweep.outDir / (stem + ".model.json"), take(text));
        }
        results[i] = std::move(result);
        std::lock_guard lock(logMutex);
        std::cerr << "done " << stem << '\n';
      } catch (const std::exception& e) {
        errors[i] = e.what();
        std::lock_guard lock(logMutex);
        std::cerr << "failed " << stem << ": " << e.what() << '\n';
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(sweep.threads, static_cast<unsigned>(configs.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::vector<const gmc_result*> done;
  for (const auto& r : results) {
    if (r) done.push_back(r.get());
  }
  if (!done.empty()) {
    char* table = nullptr;
    check(gmc_report(done.data(), done.size(), GMC_TABLE_TEXT, 0, &table), "report");
    std::cout << take(table);
  }
  const bool failed = std::any_of(errors.begin(), errors.end(), [](const std::string& e) { return !e.empty(); });
  return failed ? 1 : 0;
}

std::vector<fs::path> resultFiles(const std::vector<std::string>& inputs) {
  std::vector<fs::path> files;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(in)) {
        const auto name = e.path().filename().string();
        if (e.is_regular_file() && name.size() > 12 && name.ends_with(".result.json")) found.push_back(e.path());
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.emplace_back(in);
    }
  }
  return files;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grasp density learning with kernel-adaptive MCMC and darting"};
  app.set_version_flag("--version", std::string(gmc_version()));
  app.require_subcommand(1);
  std::string catalogPath;
  app.add_option("--catalog", catalogPath, "Object catalog document (default: built-in)")->check(CLI::ExistingFile);

  // demonstrate
  auto* demo = app.add_subcommand("demonstrate", "Produce demonstrated grasps for an object");
  ConfigFlags demoFlags;
  demoFlags.attach(*demo, false);
  std::uint64_t demoSeed = 0;
  std::string demoOut;
  demo->add_option("--seed", demoSeed, "Seed");
  demo->add_option("-o,--out", demoOut, "Output file (default: stdout)");

  // sketch
  auto* sketch = app.add_subcommand("sketch", "Build the rough sketch a learning run would start from");
  ConfigFlags sketchFlags;
  sketchFlags.attach(*sketch, false);
  std::uint64_t sketchSeed = 0;
  bool sketchRandom = false;
  std::string sketchOut;
  sketch->add_option("--seed", sketchSeed, "Seed");
  sketch->add_flag("--random", sketchRandom, "Uniform poses in the workspace box instead of a random walk");
  sketch->add_option("-o,--out", sketchOut, "Output file (default: stdout)");

  // learn
  auto* learn = app.add_subcommand("learn", "Run learning experiments (baseline or active)");
  ConfigFlags learnFlags;
  learnFlags.attach(*learn, true);
  Sweep learnSweep;
  std::string learnSeed, learnSeeds;
  auto* learnSeedOpt = learn->add_option("--seed", learnSeed, "Seed");
  auto* learnSeedsOpt = learn->add_option("--seeds", learnSeeds, "Seed range a..b (inclusive)");
  learnSeedOpt->excludes(learnSeedsOpt);
  learn->add_option("--out", learnSweep.outDir, "Output directory");
  learn->add_option("--threads", learnSweep.threads, "Parallel runs")->check(CLI::PositiveNumber);

  // transfer
  auto* transfer = app.add_subcommand("transfer", "Transfer a learned model to a novel object");
  ConfigFlags transferFlags;
  transferFlags.attach(*transfer, false);
  Sweep transferSweep;
  std::string transferSeed, transferSeeds, modes = "similar";
  auto* tSeedOpt = transfer->add_option("--seed", transferSeed, "Seed");
  auto* tSeedsOpt = transfer->add_option("--seeds", transferSeeds, "Seed range a..b (inclusive)");
  tSeedOpt->excludes(tSeedsOpt);
  transfer->add_option("--source", transferSweep.source, "Source model; '{seed}' is replaced by the run seed")
      ->required();
  transfer->add_option("--modes", modes, "Mode set: similar (source demonstrations) or actual")
      ->check(CLI::IsMember({"similar", "actual"}));
  transfer->add_option("--out", transferSweep.outDir, "Output directory");
  transfer->add_option("--threads", transferSweep.threads, "Parallel runs")->check(CLI::PositiveNumber);

  // report
  auto* report = app.add_subcommand("report", "Tabulate result documents");
  std::vector<std::string> reportInputs;
  std::string reportCsv;
  bool reportMedians = false;
  report->add_option("inputs", reportInputs, "Result files or directories")->required();
  report->add_option("--csv", reportCsv, "Also write the table as CSV to this file");
  report->add_flag("--medians", reportMedians, "One row per experiment and object with median counts");

  // export
  auto* exportCmd = app.add_subcommand("export", "Export grasps of a learned model as plot-ready segments");
  std::string exportModel, exportOut;
  bool successOnly = false;
  exportCmd->add_option("model", exportModel, "Learned model file")->required()->check(CLI::ExistingFile);
  exportCmd->add_flag("--success-only", successOnly, "Drop zero-quality grasps");
  exportCmd->add_option("-o,--out", exportOut, "Output file (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  auto emit = [](const std::string& path, const std::string& content) {
    if (path.empty()) std::cout << content << '\n';
    else writeFile(path, content);
  };

  try {
    if (*learn || *transfer) {
      const bool isLearn = static_cast<bool>(*learn);
      const std::string& one = isLearn ? learnSeed : transferSeed;
      const std::string& many = isLearn ? learnSeeds : transferSeeds;
      if (one.empty() && many.empty()) throw Failure("--seed or --seeds is required");
      Sweep sweep = isLearn ? learnSweep : transferSweep;
      sweep.seeds = parseSeeds(one.empty() ? many : one);
      Json doc = (isLearn ? learnFlags : transferFlags).document();
      if (!isLearn) doc["experiment"] = modes == "actual" ? "transfer_actual_modes" : "transfer_similar_modes";
      if (isLearn && doc.contains("experiment") && doc["experiment"].is_string() &&
          doc["experiment"].get<std::string>().rfind("transfer_", 0) == 0) {
        throw Failure("use the transfer verb for transfer experiments");
      }
      auto catalog = loadCatalog(catalogPath);
      return runSweep(catalog.get(), doc, sweep);
    }
    if (*demo || *sketch) {
      const bool isDemo = static_cast<bool>(*demo);
      Json doc = (isDemo ? demoFlags : sketchFlags).document();
      if (!isDemo) doc["experiment"] = sketchRandom ? "active_random_init" : "active_biased_init";
      const Json cfg = effectiveConfig(doc, isDemo ? demoSeed : sketchSeed);
      auto catalog = loadCatalog(catalogPath);
      char* out = nullptr;
      if (isDemo) check(gmc_demonstrate(catalog.get(), cfg.dump().c_str(), &out), "demonstrate");
      else check(gmc_sketch(catalog.get(), cfg.dump().c_str(), &out), "sketch");
      Json result = Json::parse(take(out));
      result["config"] = cfg;
      emit(isDemo ? demoOut : sketchOut, result.dump(2));
      return 0;
    }
    if (*report) {
      std::vector<ResultPtr> owned;
      std::vector<const gmc_result*> raw;
      for (const auto& f : resultFiles(reportInputs)) {
        gmc_result* r = nullptr;
        check(gmc_result_from_json(readFile(f).c_str(), &r), f.string());
        owned.emplace_back(r, gmc_result_free);
        raw.push_back(r);
      }
      if (raw.empty()) throw Failure("no result documents found");
      char* out = nullptr;
      check(gmc_report(raw.data(), raw.size(), GMC_TABLE_TEXT, reportMedians ? 1 : 0, &out), "report");
      std::cout << take(out);
      if (!reportCsv.empty()) {
        check(gmc_report(raw.data(), raw.size(), GMC_TABLE_CSV, reportMedians ? 1 : 0, &out), "report");
        writeFile(reportCsv, take(out));
      }
      return 0;
    }
    if (*exportCmd) {
      auto model = loadModel(exportModel);
      char* out = nullptr;
      check(gmc_model_export_samples(model.get(), successOnly ? 1 : 0, &out), "export");
      emit(exportOut, take(out));
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
