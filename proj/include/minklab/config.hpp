#pragma once

#include <optional>
#include <string>
#include <vector>

#include "minklab/io.hpp"

namespace minklab {

constexpr const char* kToolVersion = "minklab 0.1.0";
constexpr int kConfigSchemaVersion = 1;

enum class ExperimentKind {
  GroupInfo,
  Maximize,
  Continuation,
  Planar,
  LocalMax,
  VbarScan,
  DualityCheck,
};

struct FSpecConfig {
  std::string kind = "constant";  // constant | formula | table
  double value = 1.0;
  std::string expr;
  std::string table_path;
};

struct ExperimentConfig {
  int version = kConfigSchemaVersion;
  ExperimentKind kind = ExperimentKind::GroupInfo;
  std::string group_spec;      // e.g. "dihedral:6", "octahedral"
  FSpecConfig f;
  std::optional<double> p;
  std::optional<double> q;
  std::vector<double> p_schedule;
  std::vector<double> q_schedule;
  int k = 4;                   // planar symmetry order
  std::string polytope;        // regular catalog symbol (localmax / vbar-scan)
  int polytope_n = 2;
  double delta = 0.1;
  int trials = 500;
  std::string functional = "V";  // V | Vq | Vpf
  int s1_nodes = kDefaultS1Nodes;
  int s2_level = kDefaultS2Level;
  int search_s1_nodes = 512;
  int search_s2_level = 16;
  int classes = 3;
  int starts = 8;
  std::uint64_t seed = 20240817;
  std::string out_dir = "out";

  static ExperimentConfig from_json(const Json& j);  // throws ConfigInvalid with a field pointer
  Json to_json() const;
};

const char* kind_name(ExperimentKind k);

}  // namespace minklab
