#pragma once
#include <string>

#include "tcdiff/fno.hpp"
#include "tcdiff/prior.hpp"
#include "tcdiff/schedule.hpp"
#include "tcdiff/training.hpp"

namespace tcdiff {

struct DatasetConfig {
  std::string kind = "gmm";  // gmm | mnist
  int native_resolution = 64;
  std::string mnist_images;
  int limit = -1;
};

struct SampleConfig {
  int count = 16;
  int resolution = 0;  // 0: native resolution
  int steps = 200;
  double delta = -1.0;  // < 0: 1e-3 * T
  int n_proj = 64;
};

struct RunConfig {
  std::uint64_t seed = 1;
  std::string outdir = "out";
  DatasetConfig dataset;
  PriorSpec prior;
  Schedule schedule;
  FnoConfig fno;
  TrainConfig train;
  SampleConfig sample;
};

// Sectioned key = value text ([run], [dataset], [prior], [schedule], [fno],
// [train], [sample]; '#' comments). Unknown sections or keys, duplicate keys
// and malformed values are rejected with the offending line number. All keys
// are optional; defaults are the struct initializers.
RunConfig parse_config(const std::string& text, const std::string& name);
RunConfig parse_config_file(const std::string& path);

// Canonical rendering of every key; parse(serialize(c)) == c.
std::string serialize_config(const RunConfig& c);

}  // namespace tcdiff
