#pragma once

#include "polyrom/config.hpp"
#include "polyrom/decay_fit.hpp"
#include "polyrom/pod.hpp"
#include "polyrom/stability.hpp"

namespace polyrom {

enum class Stage { Mesh, Eigs, Constants, Snapshots, Curve, Fit, Plot };

struct ExperimentReport {
  ExperimentConfig cfg;
  std::string out_dir;

  int n_vertices = 0, n_triangles = 0;
  int n_velocity = 0, n_pressure = 0, n_free_velocity = 0;

  int n_eigs = 0;
  ConstantsReport constants;
  double threshold = 0;

  int snapshots_total = 0;
  int snapshots_converged = 0;

  std::vector<KnwPoint> curve;
  std::vector<DecayFit> fits_u, fits_p;  // ranked by R²

  bool forced_sym_grad = false;  // grad_grad requested but non-Dirichlet BCs
  std::vector<std::string> notes;
};

// Runs the experiment through `upto`, persisting every stage under
// cfg.out_dir and reusing persisted stages whose cache key still matches.
ExperimentReport run_pipeline(const ExperimentConfig& cfg,
                              Stage upto = Stage::Plot);

// Human-readable rendering of the report (also what `run` prints).
std::string render_report(const ExperimentReport& rep);

}  // namespace polyrom
