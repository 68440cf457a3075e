#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wassinc/inclusion.hpp"
#include "wassinc/relax.hpp"

namespace wassinc {

struct SamplerSpec {
  std::string kind = "gaussian";  // gaussian | uniform | two_clusters | atoms
  std::vector<double> mean;       // gaussian, defaults to 0
  double sigma = 1.0;             // gaussian, two_clusters
  std::vector<double> low;        // uniform, per coordinate (one value broadcasts)
  std::vector<double> high;
  double gap = 10.0;              // two_clusters
  double fraction = 0.1;          // two_clusters: share of the far cluster
  std::vector<Point> atoms;       // atoms
};

struct FieldSpec {
  std::string label;
  RateFunctions rates;
  std::optional<Growth> growth;  // catalog default when absent
};

struct FamilySpec {
  std::string kind;               // constants | gain
  std::vector<Point> controls;    // constants
  std::optional<FieldSpec> field; // gain
  std::vector<double> gains;      // gain
  RateFunctions rates;
};

struct ExperimentSpec {
  std::string kind = "simulate";  // simulate | peano | filippov | relax | verify
  std::string verify;             // verify kind
  std::size_t n = 8;
  std::size_t substeps = 4;
  std::string strategy = "first";
  std::vector<std::size_t> n_list;
  std::vector<double> R;          // empty: kind default
  double delta = 0.1;
  double tol = 1e-10;
  std::size_t max_iter = 20;
  std::size_t q = 2;
  std::size_t weight_steps = 4;
  std::vector<double> relaxed_control;  // weights over the base controls
  std::string policy = "empirical";
  bool rescale = true;
  std::size_t samples = 1000;
  bool include_error_term = true;
};

struct ScenarioConfig {
  double p = 1.0;
  double T = 1.0;
  std::size_t d = 1;
  std::size_t N = 16;
  std::uint64_t seed = 0;
  std::size_t steps = 100;
  Method method = Method::kEuler;
  double slack = 0.05;
  SamplerSpec initial;
  std::optional<SamplerSpec> reference_initial;
  std::optional<FieldSpec> field;
  std::optional<FieldSpec> reference_field;
  std::optional<FamilySpec> family;
  ExperimentSpec experiment;
};

// Throws ConfigError naming the offending key.
ScenarioConfig parse_config(const std::string& json_text);
ScenarioConfig load_config(const std::filesystem::path& path);

// Stream 0 samples the initial cloud, stream 1 the reference cloud.
ParticleCloud sample_cloud(const SamplerSpec& spec, std::size_t dim, std::size_t count, std::uint64_t seed,
                           std::uint64_t stream);

NonlocalField build_field(const FieldSpec& spec, std::size_t dim, double horizon);
ControlledFamily build_family(const FamilySpec& spec, std::size_t dim, double horizon);

}  // namespace wassinc
