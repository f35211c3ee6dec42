#include "polyrom/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "polyrom/csv.hpp"
#include "polyrom/errors.hpp"
#include "polyrom/flow_solver.hpp"
#include "polyrom/snapshot_store.hpp"
#include "polyrom/svg_plot.hpp"

namespace polyrom {

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw IoError("cannot open: " + p.string());
  return std::string((std::istreambuf_iterator<char>(f)),
                     std::istreambuf_iterator<char>());
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw IoError("cannot open for write: " + p.string());
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw IoError("write failed: " + p.string());
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(v));
  return buf;
}

// Persisted stage bookkeeping: a stage is fresh when its key file matches and
// every artifact exists.
struct StageCache {
  fs::path dir;

  bool fresh(const std::string& stage, const std::string& key,
             const std::vector<std::string>& artifacts) const {
    const fs::path kf = dir / "keys" / (stage + ".key");
    std::error_code ec;
    if (!fs::exists(kf, ec)) return false;
    if (slurp(kf) != key) return false;
    for (const auto& a : artifacts)
      if (!fs::exists(dir / a, ec)) return false;
    return true;
  }
  void commit(const std::string& stage, const std::string& key) const {
    fs::create_directories(dir / "keys");
    spit(dir / "keys" / (stage + ".key"), key);
  }
};

template <class Fn>
auto stage_guard(const std::string& stage, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    throw ConfigError("stage " + stage + ": " + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError("stage " + stage + ": " + e.what());
  } catch (const IoError& e) {
    throw IoError("stage " + stage + ": " + e.what());
  }
}

Mesh build_or_load_geometry(const ExperimentConfig& cfg, std::string& key) {
  if (cfg.geometry == "step") {
    key = "step|" + to_g17(cfg.h_target);
    return generate_step_domain(cfg.h_target);
  }
  if (cfg.geometry == "obstacle_channel") {
    key = "obstacle_channel|" + to_g17(cfg.h_target);
    return generate_obstacle_channel(cfg.h_target);
  }
  // Imported mesh; key from file bytes so edits invalidate the cache.
  const std::string bytes = slurp(cfg.geometry);
  key = "import|" + hex64(fnv1a64(bytes));
  const fs::path p(cfg.geometry);
  Mesh mesh;
  if (p.extension() == ".msh")
    mesh = import_msh(bytes);
  else if (p.extension() == ".polymesh")
    mesh = read_polymesh(bytes);
  else
    throw ConfigError("geometry file must be .msh or .polymesh: " +
                      cfg.geometry);
  const auto report = validate(mesh);
  if (!report.ok()) {
    std::string msg = "imported mesh fails validation:";
    for (const auto& i : report.issues) msg += "\n  " + i;
    throw ConfigError(msg);
  }
  return mesh;
}

std::string bc_canonical(const BoundarySpec& bcs) {
  std::string out;
  for (const auto& [tag, kind] : bcs.kinds) {
    out += tag;
    out += '=';
    out += kind == BcKind::Dirichlet ? 'D' : (kind == BcKind::Neumann ? 'N' : 'S');
    out += ';';
  }
  return out;
}

}  // namespace

ExperimentReport run_pipeline(const ExperimentConfig& cfg, Stage upto) {
  validate_config(cfg);
  ExperimentReport rep;
  rep.cfg = cfg;
  rep.out_dir = cfg.out_dir;

  const fs::path out(cfg.out_dir);
  fs::create_directories(out);
  spit(out / "config.txt", canonical_config(cfg));
  const StageCache cache{out};

  // ---- mesh ----------------------------------------------------------
  std::string mesh_key;
  Mesh mesh = stage_guard("mesh", [&] {
    std::string key;
    Mesh m = build_or_load_geometry(cfg, key);
    mesh_key = key;
    if (!cache.fresh("mesh", key, {"mesh.polymesh"})) {
      spit(out / "mesh.polymesh", write_polymesh(m));
      cache.commit("mesh", key);
    }
    return m;
  });
  rep.n_vertices = static_cast<int>(mesh.vertices.size());
  rep.n_triangles = static_cast<int>(mesh.triangles.size());

  const BoundarySpec bcs = stage_guard("mesh", [&] {
    return expand_preset(mesh.segment_tags, cfg.bc_preset, cfg.bc_explicit);
  });
  ViscousForm form = cfg.viscous_form == "sym_grad" ? ViscousForm::SymGrad
                                                    : ViscousForm::GradGrad;
  if (form == ViscousForm::GradGrad && !bcs.all_dirichlet()) {
    form = ViscousForm::SymGrad;
    rep.forced_sym_grad = true;
    rep.notes.push_back(
        "viscous form forced to sym_grad: non-Dirichlet boundary present");
  }
  const std::string form_name =
      form == ViscousForm::SymGrad ? "sym_grad" : "grad_grad";

  const DofMap dm = stage_guard("mesh", [&] { return build_dofmap(mesh, bcs); });
  rep.n_velocity = dm.n_velocity;
  rep.n_pressure = dm.n_pressure;
  rep.n_free_velocity = dm.velocity.reduced_size();
  if (upto == Stage::Mesh) return rep;

  // ---- eigenbasis ----------------------------------------------------
  const std::string eig_key = mesh_key + "|eigs|" + std::to_string(cfg.N) +
                              "|" + to_g17(cfg.eig_tol) + "|" +
                              std::to_string(cfg.seed);
  std::vector<EigenPair> eigs = stage_guard("eigs", [&] {
    std::vector<EigenPair> pairs;
    if (cache.fresh("eigs", eig_key, {"basis.pods", "eigs.csv"})) {
      const auto store = read_store((out / "basis.pods").string());
      const auto& vecs = store_get(store, "eig_vectors");
      const auto& lams = store_get(store, "eig_lambda");
      pairs.resize(vecs.cols());
      for (int k = 0; k < vecs.cols(); ++k)
        pairs[k] = {lams(k, 0), vecs.col(k)};
      return pairs;
    }
    pairs = dirichlet_eigs(dm, cfg.N, cfg.eig_tol, cfg.seed);
    Eigen::MatrixXd vecs(dm.n_scalar, cfg.N), lams(cfg.N, 1);
    CsvWriter csv({"k", "lambda"});
    for (int k = 0; k < cfg.N; ++k) {
      vecs.col(k) = pairs[k].vector;
      lams(k, 0) = pairs[k].lambda;
      csv.row({std::to_string(k + 1), to_g17(pairs[k].lambda)});
    }
    write_store((out / "basis.pods").string(),
                {{"eig_vectors", vecs}, {"eig_lambda", lams}});
    csv.save((out / "eigs.csv").string());
    cache.commit("eigs", eig_key);
    return pairs;
  });
  rep.n_eigs = static_cast<int>(eigs.size());
  if (upto == Stage::Eigs) return rep;

  // ---- stability constants (independent of nu and viscous form) -------
  const std::string const_key =
      mesh_key + "|constants|" + bc_canonical(bcs) + "|" +
      std::to_string(cfg.cont_restarts) + "|" + std::to_string(cfg.seed) +
      (cfg.has_constants_override
           ? "|override|" + to_g17(cfg.c_coer_override) + "|" +
                 to_g17(cfg.c_cont_override)
           : "");
  rep.constants = stage_guard("constants", [&] {
    ConstantsReport r;
    if (cfg.has_constants_override) {
      r.c_coer = cfg.c_coer_override;
      r.c_cont = cfg.c_cont_override;
      r.overridden = true;
      return r;
    }
    if (cache.fresh("constants", const_key, {"constants_cache.csv"})) {
      const auto rows = parse_csv(slurp(out / "constants_cache.csv"));
      if (rows.size() < 2 || rows[1].size() < 3)
        throw IoError("constants_cache.csv malformed");
      r.c_coer = std::stod(rows[1][0]);
      r.c_cont = std::stod(rows[1][1]);
      r.c_cont_restarts = std::stoi(rows[1][2]);
      return r;
    }
    r = compute_constants(dm, cfg.cont_restarts, cfg.seed);
    CsvWriter csv({"c_coer", "c_cont", "restarts"});
    csv.row({to_g17(r.c_coer), to_g17(r.c_cont),
             std::to_string(r.c_cont_restarts)});
    csv.save((out / "constants_cache.csv").string());
    cache.commit("constants", const_key);
    return r;
  });
  rep.threshold = rep.constants.threshold(cfg.nu);
  {
    CsvWriter csv({"c_coer", "c_cont", "nu", "threshold"});
    csv.row({to_g17(rep.constants.c_coer), to_g17(rep.constants.c_cont),
             to_g17(cfg.nu), to_g17(rep.threshold)});
    csv.save((out / "constants.csv").string());
    std::ostringstream txt;
    txt << "coercivity constant   " << to_g17(rep.constants.c_coer) << "\n"
        << "continuity constant   " << to_g17(rep.constants.c_cont)
        << (rep.constants.overridden ? "  (user override)"
                                     : "  (best of " +
                                           std::to_string(
                                               rep.constants.c_cont_restarts) +
                                           " restarts, lower bound)")
        << "\n"
        << "viscosity             " << to_g17(cfg.nu) << "\n"
        << "small-data threshold  " << to_g17(rep.threshold) << "\n";
    spit(out / "constants.txt", txt.str());
  }
  if (upto == Stage::Constants) return rep;

  // ---- snapshots -------------------------------------------------------
  const std::string snap_key =
      eig_key + "|" + const_key + "|snap|" + to_g17(cfg.nu) + "|" + form_name +
      "|" + to_g17(cfg.newton_tol) + "|" + std::to_string(cfg.newton_max_iters);
  SnapshotSet snaps = stage_guard("snapshots", [&] {
    SnapshotSet s;
    if (cache.fresh("snapshots", snap_key,
                    {"snapshots.pods", "solve_log.csv", "forcing.csv"})) {
      const auto store = read_store((out / "snapshots.pods").string());
      s.Mu = store_get(store, "Mu");
      s.Mp = store_get(store, "Mp");
      const auto& fi = store_get(store, "forcing_index");
      const auto& ni = store_get(store, "newton_iters");
      const auto& rs = store_get(store, "residuals");
      const auto& fl = store_get(store, "failed");
      for (int j = 0; j < fi.cols(); ++j) {
        s.forcing_index.push_back(static_cast<int>(fi(0, j)));
        s.newton_iters.push_back(static_cast<int>(ni(0, j)));
        s.residuals.push_back(rs(0, j));
      }
      for (int j = 0; j < fl.cols(); ++j)
        s.failed.push_back(static_cast<int>(fl(0, j)));
      s.Gu = assemble_h1_gram(dm, GramSpace::Velocity);
      s.Gp = assemble_l2_gram_pressure(dm);
      return s;
    }
    const ForcingSet forcing = build_forcing_set(eigs, dm, rep.threshold);
    {
      CsvWriter csv({"k", "lambda", "raw_norm", "scale", "final_norm"});
      for (const auto& it : forcing.items)
        csv.row({std::to_string(it.index + 1), to_g17(it.lambda),
                 to_g17(it.raw_norm), to_g17(it.scale),
                 to_g17(it.final_norm)});
      csv.save((out / "forcing.csv").string());
    }
    s = solve_snapshot_set(dm, cfg.nu, form, forcing, cfg.newton_tol,
                           cfg.newton_max_iters);
    {
      CsvWriter csv({"i", "iters", "residual"});
      for (std::size_t j = 0; j < s.forcing_index.size(); ++j)
        csv.row({std::to_string(s.forcing_index[j] + 1),
                 std::to_string(s.newton_iters[j]), to_g17(s.residuals[j])});
      csv.save((out / "solve_log.csv").string());
    }
    const int k = static_cast<int>(s.forcing_index.size());
    Eigen::MatrixXd fi(1, k), ni(1, k), rs(1, k);
    for (int j = 0; j < k; ++j) {
      fi(0, j) = s.forcing_index[j];
      ni(0, j) = s.newton_iters[j];
      rs(0, j) = s.residuals[j];
    }
    Eigen::MatrixXd fl(1, static_cast<int>(s.failed.size()));
    for (std::size_t j = 0; j < s.failed.size(); ++j) fl(0, j) = s.failed[j];
    write_store((out / "snapshots.pods").string(),
                {{"Mu", s.Mu},
                 {"Mp", s.Mp},
                 {"forcing_index", fi},
                 {"newton_iters", ni},
                 {"residuals", rs},
                 {"failed", fl}});
    cache.commit("snapshots", snap_key);
    return s;
  });
  rep.snapshots_total = cfg.N;
  rep.snapshots_converged = static_cast<int>(snaps.Mu.cols());
  for (int idx : snaps.failed)
    rep.notes.push_back("snapshot " + std::to_string(idx + 1) +
                        " failed to converge; excluded");
  if (upto == Stage::Snapshots) return rep;

  // ---- POD / knw curve -------------------------------------------------
  std::vector<int> ns;
  for (int n : cfg.effective_n_values())
    if (n <= rep.snapshots_converged) ns.push_back(n);
  if (ns.empty())
    throw NumericalError("stage pod: no n values within the " +
                         std::to_string(rep.snapshots_converged) +
                         " converged snapshots");
  const std::string curve_key = [&] {
    std::string k = snap_key + "|curve|" + (cfg.pod_euclidean ? "euclid" : "gram");
    for (int n : ns) k += "," + std::to_string(n);
    return k;
  }();
  rep.curve = stage_guard("pod", [&] {
    std::vector<KnwPoint> curve;
    if (cache.fresh("pod", curve_key, {"knw_curve.csv"})) {
      const auto rows = parse_csv(slurp(out / "knw_curve.csv"));
      for (std::size_t i = 1; i < rows.size(); ++i)
        curve.push_back({std::stoi(rows[i][0]), std::stod(rows[i][1]),
                         std::stod(rows[i][2])});
      return curve;
    }
    curve = knw_curve(snaps, ns, cfg.pod_euclidean);
    CsvWriter csv({"n", "eps_u", "eps_p"});
    for (const auto& pt : curve)
      csv.row({std::to_string(pt.n), to_g17(pt.eps_u), to_g17(pt.eps_p)});
    csv.save((out / "knw_curve.csv").string());
    cache.commit("pod", curve_key);
    return curve;
  });
  if (upto == Stage::Curve) return rep;

  // ---- decay fits --------------------------------------------------------
  const std::string fit_key = curve_key + "|fit|" + to_g17(cfg.fit_tau);
  stage_guard("fit", [&] {
    std::vector<std::pair<int, double>> pu, pp;
    for (const auto& pt : rep.curve) {
      pu.emplace_back(pt.n, pt.eps_u);
      pp.emplace_back(pt.n, pt.eps_p);
    }
    rep.fits_u = compare_models(pu, {1.0 / 3.0, 0.5, 1.0}, cfg.fit_tau);
    rep.fits_p = compare_models(pp, {1.0 / 3.0, 0.5, 1.0}, cfg.fit_tau);

    std::ostringstream txt;
    auto table = [&](const char* name, const std::vector<DecayFit>& fits) {
      txt << name << " fits, model eps(n) = C*exp(-b*n^a), ranked by R2\n";
      for (const auto& f : fits) {
        txt << "  a = " << to_g17(f.a) << "  C = " << to_g17(f.C)
            << "  b = " << to_g17(f.b) << "  R2 = ";
        if (f.r2_defined)
          txt << to_g17(f.r2);
        else
          txt << "undefined";
        txt << "  points = " << f.used.size() << "  n_cut = " << f.n_cut
            << "\n";
      }
    };
    table("eps_u", rep.fits_u);
    table("eps_p", rep.fits_p);
    spit(out / "fit_report.txt", txt.str());
    cache.commit("fit", fit_key);
    return 0;
  });
  if (upto == Stage::Fit) return rep;

  // ---- plot --------------------------------------------------------------
  stage_guard("plot", [&] {
    std::vector<std::pair<std::string, DecayFit>> labeled;
    for (const auto& f : rep.fits_u)
      labeled.emplace_back("eps_u fit", f);
    if (!rep.fits_p.empty()) labeled.emplace_back("eps_p fit", rep.fits_p[0]);
    spit(out / "decay.svg", emit_plot(rep.curve, labeled));
    return 0;
  });
  return rep;
}

std::string render_report(const ExperimentReport& rep) {
  std::ostringstream s;
  s << "geometry " << rep.cfg.geometry << ", h_target "
    << to_g17(rep.cfg.h_target) << ": " << rep.n_vertices << " vertices, "
    << rep.n_triangles << " triangles\n";
  s << "spaces: " << rep.n_velocity << " velocity dofs (" << rep.n_free_velocity
    << " free), " << rep.n_pressure << " pressure dofs\n";
  s << "bc preset " << rep.cfg.bc_preset << ", viscous form "
    << (rep.forced_sym_grad ? "sym_grad (forced)" : rep.cfg.viscous_form)
    << ", nu " << to_g17(rep.cfg.nu) << "\n";
  if (rep.n_eigs)
    s << "eigenbasis: " << rep.n_eigs << " modes\n";
  if (rep.constants.c_coer > 0) {
    s << "constants: c_coer " << to_g17(rep.constants.c_coer) << ", c_cont "
      << to_g17(rep.constants.c_cont)
      << (rep.constants.overridden ? " (override)" : "") << ", threshold "
      << to_g17(rep.threshold) << "\n";
  }
  if (rep.snapshots_total)
    s << "snapshots: " << rep.snapshots_converged << "/" << rep.snapshots_total
      << " converged\n";
  if (!rep.curve.empty()) {
    s << "knw curve: n in [" << rep.curve.front().n << ", "
      << rep.curve.back().n << "], eps_u from "
      << to_g17(rep.curve.front().eps_u) << " to "
      << to_g17(rep.curve.back().eps_u) << "\n";
  }
  auto fit_line = [&](const char* name, const std::vector<DecayFit>& fits) {
    if (fits.empty()) return;
    const DecayFit& f = fits.front();
    s << name << " best fit: a = " << to_g17(f.a) << ", b = " << to_g17(f.b)
      << ", R2 = " << (f.r2_defined ? to_g17(f.r2) : "undefined") << "\n";
  };
  fit_line("eps_u", rep.fits_u);
  fit_line("eps_p", rep.fits_p);
  for (const auto& n : rep.notes) s << "note: " << n << "\n";
  return s.str();
}

}  // namespace polyrom
