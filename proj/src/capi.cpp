#include "graspmc/graspmc.h"

#include <cstring>
#include <new>
#include <string>

#include "graspmc/error.hpp"
#include "graspmc/experiment.hpp"
#include "graspmc/serialization.hpp"

struct gmc_catalog {
  std::vector<graspmc::grasp::ObjectModel> objects;
};

struct gmc_model {
  graspmc::LearnedModel model;
};

struct gmc_result {
  graspmc::ResultRecord record;
};

namespace {

thread_local std::string lastError;

gmc_status statusFor(graspmc::ErrorCode code) { return static_cast<gmc_status>(static_cast<int>(code)); }

template <class F>
gmc_status guarded(F&& f) noexcept {
  try {
    f();
    return GMC_OK;
  } catch (const graspmc::Error& e) {
    lastError = e.what();
    return statusFor(e.code());
  } catch (const std::bad_alloc&) {
    lastError = "out of memory";
    return GMC_INTERNAL_ERROR;
  } catch (const std::exception& e) {
    lastError = e.what();
    return GMC_INTERNAL_ERROR;
  } catch (...) {
    lastError = "unknown exception";
    return GMC_INTERNAL_ERROR;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw graspmc::Error(graspmc::ErrorCode::InvalidArgument, what);
}

char* duplicate(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

graspmc::Json parse(const char* json) {
  require(json != nullptr, "null JSON string");
  try {
    return graspmc::Json::parse(json);
  } catch (const std::exception& e) {
    throw graspmc::Error(graspmc::ErrorCode::ParseError, e.what());
  }
}

graspmc::ExperimentConfig config(const char* json) {
  auto c = graspmc::configFromJson(parse(json));
  c.validate();
  return c;
}

}  // namespace

extern "C" {

const char* gmc_version(void) { return graspmc::libraryVersion(); }

const char* gmc_status_name(gmc_status status) {
  if (status == GMC_OK) return "Ok";
  if (status == GMC_INTERNAL_ERROR) return "InternalError";
  if (status >= GMC_INVALID_ARGUMENT && status <= GMC_IO_ERROR) {
    return graspmc::errorCodeName(static_cast<graspmc::ErrorCode>(status));
  }
  return "Unknown";
}

const char* gmc_last_error(void) { return lastError.c_str(); }

void gmc_string_free(char* s) { delete[] s; }

gmc_status gmc_catalog_builtin(gmc_catalog** out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    *out = new gmc_catalog{graspmc::grasp::objectCatalog()};
  });
}

gmc_status gmc_catalog_from_json(const char* json, gmc_catalog** out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    *out = new gmc_catalog{graspmc::catalogFromJson(parse(json))};
  });
}

gmc_status gmc_catalog_to_json(const gmc_catalog* catalog, char** out) {
  return guarded([&] {
    require(catalog && out, "null argument");
    *out = duplicate(graspmc::catalogToJson(catalog->objects).dump());
  });
}

gmc_status gmc_catalog_size(const gmc_catalog* catalog, size_t* out) {
  return guarded([&] {
    require(catalog && out, "null argument");
    *out = catalog->objects.size();
  });
}

gmc_status gmc_catalog_name(const gmc_catalog* catalog, size_t index, char** out) {
  return guarded([&] {
    require(catalog && out, "null argument");
    require(index < catalog->objects.size(), "catalog index out of range");
    *out = duplicate(catalog->objects[index].name);
  });
}

void gmc_catalog_free(gmc_catalog* catalog) { delete catalog; }

gmc_status gmc_config_default(char** out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    *out = duplicate(graspmc::toJson(graspmc::ExperimentConfig{}).dump(2));
  });
}

gmc_status gmc_config_normalize(const char* json, char** out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    *out = duplicate(graspmc::toJson(config(json)).dump(2));
  });
}

gmc_status gmc_demonstrate(const gmc_catalog* catalog, const char* config_json, char** out) {
  return guarded([&] {
    require(catalog && out, "null argument");
    const auto c = config(config_json);
    const auto demos = graspmc::experimentDemonstrations(c, catalog->objects);
    *out = duplicate(graspmc::toJson(demos, c.object).dump());
  });
}

gmc_status gmc_sketch(const gmc_catalog* catalog, const char* config_json, char** out) {
  return guarded([&] {
    require(catalog && out, "null argument");
    *out = duplicate(graspmc::toJson(graspmc::experimentSketch(config(config_json), catalog->objects)).dump());
  });
}

gmc_status gmc_run_experiment(const gmc_catalog* catalog, const char* config_json, const gmc_model* source,
                              gmc_result** out_result, gmc_model** out_model) {
  return guarded([&] {
    require(catalog && out_result, "null argument");
    *out_result = nullptr;
    if (out_model) *out_model = nullptr;
    auto run = graspmc::runExperiment(config(config_json), catalog->objects, source ? &source->model : nullptr);
    auto* result = new gmc_result{std::move(run.record)};
    if (out_model && run.model) {
      try {
        *out_model = new gmc_model{std::move(*run.model)};
      } catch (...) {
        delete result;
        throw;
      }
    }
    *out_result = result;
  });
}

gmc_status gmc_result_to_json(const gmc_result* result, int include_trace, char** out) {
  return guarded([&] {
    require(result && out, "null argument");
    *out = duplicate(graspmc::toJson(result->record, include_trace != 0).dump());
  });
}

gmc_status gmc_result_from_json(const char* json, gmc_result** out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    *out = new gmc_result{graspmc::resultFromJson(parse(json))};
  });
}

gmc_status gmc_result_tallies(const gmc_result* result, size_t out[4]) {
  return guarded([&] {
    require(result && out, "null argument");
    const auto& t = result->record.tallies;
    out[0] = t.success;
    out[1] = t.slipped;
    out[2] = t.collision;
    out[3] = t.miss;
  });
}

void gmc_result_free(gmc_result* result) { delete result; }

gmc_status gmc_model_to_json(const gmc_model* model, char** out) {
  return guarded([&] {
    require(model && out, "null argument");
    *out = duplicate(graspmc::toJson(model->model).dump());
  });
}

gmc_status gmc_model_from_json(const char* json, gmc_model** out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    *out = new gmc_model{graspmc::modelFromJson(parse(json))};
  });
}

gmc_status gmc_model_export_samples(const gmc_model* model, int success_only, char** out) {
  return guarded([&] {
    require(model && out, "null argument");
    *out = duplicate(graspmc::samplesToJson(graspmc::exportSamples(model->model, success_only != 0)).dump());
  });
}

void gmc_model_free(gmc_model* model) { delete model; }

gmc_status gmc_report(const gmc_result* const* results, size_t count, gmc_table_format format, int medians,
                      char** out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    require(results != nullptr && count > 0, "report needs at least one result");
    require(format == GMC_TABLE_CSV || format == GMC_TABLE_TEXT, "unknown table format");
    std::vector<graspmc::ResultRecord> records;
    for (size_t i = 0; i < count; ++i) {
      require(results[i] != nullptr, "null result in report");
      records.push_back(results[i]->record);
    }
    const auto rows = medians ? graspmc::medianRows(records) : graspmc::tableRows(records);
    *out = duplicate(format == GMC_TABLE_CSV ? graspmc::formatCsv(rows) : graspmc::formatText(rows));
  });
}

}  // extern "C"
