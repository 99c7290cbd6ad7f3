// Command-line front end for the delayed-reward laboratory. Talks to the
// core exclusively through the stable C API. Exit code 0 only on full
// success (for verify: every check passed).

#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "drlab/capi.h"

namespace {

int usage() {
  std::fprintf(
      stderr,
      "usage: drlab-cli <subcommand> [options]\n"
      "\n"
      "subcommands:\n"
      "  verify [--suite theory|counterexamples|gradients|all]\n"
      "      run the named check suite (default: all); one line per check\n"
      "  train --config <file> --seed <int>\n"
      "      run a training experiment; metrics CSV and parameter snapshot\n"
      "      are written to the config's output directory\n"
      "  heatmap --snapshot <file> --out <csv>\n"
      "      render a snapshot's per-cell guidance values as a 10x10 CSV\n"
      "  fixtures --name <XorPolicyClass|FixedPointBias|OptimalNotInPiS>\n"
      "      print a fixture's expected-vs-computed table\n");
  return 2;
}

int report_failure(const char* verb) {
  std::fprintf(stderr, "drlab-cli: %s failed: %s\n", verb, drlab_last_error());
  return 1;
}

int cmd_verify(int argc, char** argv) {
  const char* suite = "all";
  for (int i = 2; i < argc; ++i) {
    if (std::strcmp(argv[i], "--suite") == 0 && i + 1 < argc) {
      suite = argv[++i];
    } else {
      return usage();
    }
  }
  char* text = nullptr;
  int passed = 0;
  if (drlab_verify(suite, &text, &passed) != DRLAB_OK) return report_failure("verify");
  std::fputs(text, stdout);
  drlab_string_free(text);
  return passed ? 0 : 1;
}

int cmd_train(int argc, char** argv) {
  const char* config = nullptr;
  const char* seed_text = nullptr;
  for (int i = 2; i < argc; ++i) {
    if (std::strcmp(argv[i], "--config") == 0 && i + 1 < argc) {
      config = argv[++i];
    } else if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc) {
      seed_text = argv[++i];
    } else {
      return usage();
    }
  }
  if (!config || !seed_text) return usage();
  char* end = nullptr;
  const long long seed = std::strtoll(seed_text, &end, 10);
  if (end == seed_text || *end != '\0' || seed < 0) {
    std::fprintf(stderr, "drlab-cli: --seed wants a non-negative integer, got '%s'\n",
                 seed_text);
    return 2;
  }
  if (drlab_train(config, static_cast<uint64_t>(seed)) != DRLAB_OK) {
    return report_failure("train");
  }
  std::printf("training run complete: config %s, seed %lld\n", config, seed);
  return 0;
}

int cmd_heatmap(int argc, char** argv) {
  const char* snapshot = nullptr;
  const char* out = nullptr;
  for (int i = 2; i < argc; ++i) {
    if (std::strcmp(argv[i], "--snapshot") == 0 && i + 1 < argc) {
      snapshot = argv[++i];
    } else if (std::strcmp(argv[i], "--out") == 0 && i + 1 < argc) {
      out = argv[++i];
    } else {
      return usage();
    }
  }
  if (!snapshot || !out) return usage();
  if (drlab_heatmap(snapshot, out) != DRLAB_OK) return report_failure("heatmap");
  std::printf("wrote %s\n", out);
  return 0;
}

int cmd_fixtures(int argc, char** argv) {
  const char* name = nullptr;
  for (int i = 2; i < argc; ++i) {
    if (std::strcmp(argv[i], "--name") == 0 && i + 1 < argc) {
      name = argv[++i];
    } else {
      return usage();
    }
  }
  if (!name) return usage();
  char* text = nullptr;
  if (drlab_fixture_report(name, &text) != DRLAB_OK) return report_failure("fixtures");
  std::fputs(text, stdout);
  drlab_string_free(text);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) return usage();
  if (std::strcmp(argv[1], "verify") == 0) return cmd_verify(argc, argv);
  if (std::strcmp(argv[1], "train") == 0) return cmd_train(argc, argv);
  if (std::strcmp(argv[1], "heatmap") == 0) return cmd_heatmap(argc, argv);
  if (std::strcmp(argv[1], "fixtures") == 0) return cmd_fixtures(argc, argv);
  return usage();
}
