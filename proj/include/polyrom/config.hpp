#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "polyrom/mesh.hpp"

namespace polyrom {

struct ExperimentConfig {
  // [experiment]
  std::string geometry = "obstacle_channel";  // step | obstacle_channel |
                                              // path to .msh / .polymesh
  double h_target = 0.02;
  std::string bc_preset = "dirichlet";  // dirichlet | mixed_dn | mixed_slip |
                                        // explicit (tags under [bc])
  double nu = 1.0;
  int N = 100;
  std::vector<int> n_values;  // empty = 1..N; file syntax "1..60" or list
  std::string viscous_form = "sym_grad";  // sym_grad | grad_grad
  std::uint64_t seed = 20240601;

  // [bc] — only read when bc_preset = explicit
  std::map<std::string, std::string> bc_explicit;  // tag -> dirichlet|neumann|slip

  // [solver]
  double newton_tol = 1e-10;
  int newton_max_iters = 30;
  double eig_tol = 1e-10;
  int cont_restarts = 20;
  bool allow_above_threshold = false;

  // [pod]
  bool pod_euclidean = false;  // plain-Euclidean inner product (comparison)

  // [fit]
  double fit_tau = 1e-8;

  // [constants] — optional user override (skips the estimation stage)
  bool has_constants_override = false;
  double c_coer_override = 0;
  double c_cont_override = 0;

  // [output]
  std::string out_dir = "out";

  std::vector<int> effective_n_values() const;
};

// key = value lines with [section] headers and # comments. Unknown keys or
// malformed values raise ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Normalized full rendering (every key, fixed order, 17-digit floats); equal
// configs produce identical text.
std::string canonical_config(const ExperimentConfig& cfg);

// FNV-1a 64-bit over the canonical text.
std::uint64_t config_hash(const ExperimentConfig& cfg);
std::uint64_t fnv1a64(const std::string& bytes);

// Boundary-condition preset expansion over the mesh's tag set.
BoundarySpec expand_preset(const std::vector<std::string>& tags,
                           const std::string& preset,
                           const std::map<std::string, std::string>&
                               explicit_map = {});

void validate_config(const ExperimentConfig& cfg);

}  // namespace polyrom
