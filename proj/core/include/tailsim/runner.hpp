#pragma once

// Config-driven experiment runner: builds a model from a declarative JSON
// config, executes a list of registered tasks against it and emits
// machine-readable results. Identical (config, seed) pairs produce
// byte-identical payloads for any worker count; timestamps live only in
// the manifest.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tailsim::runner {

inline constexpr const char* version = "0.1.0";

struct TaskResult {
  std::string task;
  std::optional<bool> passed;  // set when the task declares a tolerance
  std::string summary;
  std::string payload;  // canonical JSON payload (the determinism contract)
  std::vector<std::string> files;
};

struct RunManifest {
  std::string config_hash;
  std::string toolkit_version;
  std::string started_at;
  std::string finished_at;
  std::vector<TaskResult> tasks;
  bool all_passed = true;
};

struct RunOptions {
  std::optional<std::uint64_t> seed_override;
  int workers = 0;      // 0: pick automatically
  std::string out_dir;  // empty: nothing written to disk
  bool ci = false;      // terse one-line-per-task reporting to stdout
};

RunManifest run_config(const std::string& config_json, const RunOptions& opts = {});
RunManifest run_config_file(const std::string& path, const RunOptions& opts = {});

std::string manifest_to_json(const RunManifest& manifest);

std::vector<std::string> list_model_classes();
std::vector<std::string> list_tasks();
// one-paragraph description of a registered task, including the identity
// or statistic it exercises; throws on unknown names
std::string describe_task(const std::string& task);

}  // namespace tailsim::runner
