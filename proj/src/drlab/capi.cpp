#include "drlab/capi.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <new>
#include <sstream>
#include <stdexcept>
#include <string>

#include "drlab/core/analysis.hpp"
#include "drlab/core/serialize.hpp"
#include "drlab/core/spec.hpp"
#include "drlab/fixtures/fixtures.hpp"
#include "drlab/run/run_config.hpp"
#include "drlab/run/trainer.hpp"
#include "drlab/run/verify.hpp"

struct drlab_spec {
  drlab::DrmdpSpec spec;
  std::string scratch;  // backing store for strings returned on this handle
};

namespace {

thread_local std::string g_last_error;

// Runs a callable, translating C++ exceptions into status codes and the
// thread-local error message.
template <typename F>
drlab_status guarded(F&& body) {
  try {
    g_last_error.clear();
    return body();
  } catch (const std::length_error& e) {
    g_last_error = e.what();
    return DRLAB_ERR_LIMIT;
  } catch (const std::out_of_range& e) {
    g_last_error = e.what();
    return DRLAB_ERR_NOT_FOUND;
  } catch (const std::invalid_argument& e) {
    g_last_error = e.what();
    return DRLAB_ERR_INVALID_ARGUMENT;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return DRLAB_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return DRLAB_ERR_INTERNAL;
  }
}

drlab_status require(bool ok, const char* what) {
  if (ok) return DRLAB_OK;
  g_last_error = what;
  return DRLAB_ERR_INVALID_ARGUMENT;
}

char* copy_string(const std::string& text) {
  char* out = new char[text.size() + 1];
  std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* drlab_version(void) { return "0.1.0"; }

const char* drlab_last_error(void) { return g_last_error.c_str(); }

drlab_status drlab_spec_parse(const char* text, drlab_spec** out) {
  if (auto rc = require(text && out, "drlab_spec_parse: null argument")) return rc;
  return guarded([&] {
    auto handle = new drlab_spec{drlab::parse_spec(text), {}};
    *out = handle;
    return DRLAB_OK;
  });
}

drlab_status drlab_spec_save(drlab_spec* spec, const char** out_text) {
  if (auto rc = require(spec && out_text, "drlab_spec_save: null argument")) return rc;
  return guarded([&] {
    spec->scratch = drlab::save_spec(spec->spec);
    *out_text = spec->scratch.c_str();
    return DRLAB_OK;
  });
}

void drlab_spec_free(drlab_spec* spec) { delete spec; }

drlab_status drlab_spec_check_pi(drlab_spec* spec, int32_t max_len, int* holds,
                                 const char** witness_out) {
  if (auto rc = require(spec && holds, "drlab_spec_check_pi: null argument")) return rc;
  return guarded([&] {
    auto report = drlab::check_pi_condition(spec->spec, max_len);
    *holds = report.holds ? 1 : 0;
    if (witness_out) {
      spec->scratch = report.witness ? report.witness->describe(spec->spec) : "";
      *witness_out = spec->scratch.c_str();
    }
    return DRLAB_OK;
  });
}

drlab_status drlab_fixture_build(const char* name, drlab_spec** out) {
  if (auto rc = require(name && out, "drlab_fixture_build: null argument")) return rc;
  return guarded([&]() -> drlab_status {
    drlab::FixtureName fixture_name;
    try {
      fixture_name = drlab::fixture_name_from_string(name);
    } catch (const std::exception&) {
      g_last_error = std::string("unknown fixture: ") + name;
      return DRLAB_ERR_NOT_FOUND;
    }
    auto fixture = drlab::build_fixture(fixture_name);
    *out = new drlab_spec{std::move(fixture.spec), {}};
    return DRLAB_OK;
  });
}

drlab_status drlab_fixture_report(const char* name, char** out_text) {
  if (auto rc = require(name && out_text, "drlab_fixture_report: null argument")) return rc;
  return guarded([&]() -> drlab_status {
    drlab::FixtureName fixture_name;
    try {
      fixture_name = drlab::fixture_name_from_string(name);
    } catch (const std::exception&) {
      g_last_error = std::string("unknown fixture: ") + name;
      return DRLAB_ERR_NOT_FOUND;
    }
    const drlab::NamedFixture fixture = drlab::build_fixture(fixture_name);
    std::ostringstream text;
    text.precision(12);
    text << "fixture " << drlab::fixture_name_string(fixture.name) << " (gamma = 0.99)\n";
    for (const auto& [key, expected] : fixture.expected) {
      const double computed = fixture.computed.at(key);
      text << "  " << key << ": expected " << expected.value << ", computed " << computed
           << ", |difference| " << std::abs(expected.value - computed) << "\n    basis: "
           << expected.basis << "\n";
    }
    *out_text = copy_string(text.str());
    return DRLAB_OK;
  });
}

drlab_status drlab_verify(const char* suite, char** out_text, int* passed) {
  if (auto rc = require(suite && out_text && passed, "drlab_verify: null argument")) {
    return rc;
  }
  return guarded([&]() -> drlab_status {
    drlab::VerifySuite parsed;
    try {
      parsed = drlab::verify_suite_from_string(suite);
    } catch (const std::exception& e) {
      g_last_error = e.what();
      return DRLAB_ERR_NOT_FOUND;
    }
    const drlab::VerifyReport report = drlab::run_verify(parsed);
    *out_text = copy_string(report.render());
    *passed = report.all_passed() ? 1 : 0;
    return DRLAB_OK;
  });
}

drlab_status drlab_train(const char* config_path, uint64_t seed) {
  if (auto rc = require(config_path, "drlab_train: null config path")) return rc;
  {
    std::ifstream probe(config_path);
    if (!probe) {
      g_last_error = std::string("cannot read config file: ") + config_path;
      return DRLAB_ERR_IO;
    }
  }
  return guarded([&] {
    const drlab::RunConfig config = drlab::load_run_config(config_path);
    drlab::train(config, static_cast<std::int32_t>(seed));
    return DRLAB_OK;
  });
}

drlab_status drlab_heatmap(const char* snapshot_path, const char* out_csv_path) {
  if (auto rc = require(snapshot_path && out_csv_path, "drlab_heatmap: null argument")) {
    return rc;
  }
  {
    std::ifstream probe(snapshot_path);
    if (!probe) {
      g_last_error = std::string("cannot read snapshot: ") + snapshot_path;
      return DRLAB_ERR_IO;
    }
  }
  return guarded([&]() -> drlab_status {
    const drlab::Heatmap map = drlab::heatmap_from_snapshot(snapshot_path);
    std::ofstream out(out_csv_path, std::ios::binary);
    if (!out) {
      g_last_error = std::string("cannot write: ") + out_csv_path;
      return DRLAB_ERR_IO;
    }
    out << map.to_csv();
    out.flush();
    if (!out) {
      g_last_error = std::string("write failed: ") + out_csv_path;
      return DRLAB_ERR_IO;
    }
    return DRLAB_OK;
  });
}

drlab_status drlab_rap(const char* const* result_paths, const double* oracles,
                       const double* offsets, size_t count, double* out) {
  if (auto rc = require(result_paths && oracles && offsets && out && count > 0,
                        "drlab_rap: null argument or empty task list")) {
    return rc;
  }
  return guarded([&]() -> drlab_status {
    double total = 0.0;
    for (size_t i = 0; i < count; ++i) {
      std::ifstream in(result_paths[i]);
      if (!in) {
        g_last_error = std::string("cannot read result file: ") + result_paths[i];
        return DRLAB_ERR_IO;
      }
      // Metrics CSV: header line, then rows whose second column is the
      // evaluation return; the task's return is the last row's.
      std::string line;
      std::string last;
      bool header = true;
      while (std::getline(in, line)) {
        if (header) {
          header = false;
          continue;
        }
        if (!line.empty()) last = line;
      }
      if (last.empty()) {
        throw std::invalid_argument(std::string("no data rows in ") + result_paths[i]);
      }
      const size_t first_comma = last.find(',');
      const size_t second_comma =
          first_comma == std::string::npos ? std::string::npos
                                           : last.find(',', first_comma + 1);
      if (second_comma == std::string::npos) {
        throw std::invalid_argument(std::string("malformed metrics row in ") +
                                    result_paths[i]);
      }
      const double task_return =
          std::stod(last.substr(first_comma + 1, second_comma - first_comma - 1));
      const double denominator = oracles[i] + offsets[i];
      if (denominator == 0.0) {
        throw std::invalid_argument("zero oracle denominator for task " +
                                    std::to_string(i));
      }
      total += (task_return + offsets[i]) / denominator;
    }
    *out = total / static_cast<double>(count);
    return DRLAB_OK;
  });
}

void drlab_string_free(char* text) { delete[] text; }

}  // extern "C"
