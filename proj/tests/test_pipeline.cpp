#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "polyrom/errors.hpp"
#include "polyrom/parallel.hpp"
#include "polyrom/pipeline.hpp"

using namespace polyrom;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(static_cast<bool>(f));
  return std::string((std::istreambuf_iterator<char>(f)),
                     std::istreambuf_iterator<char>());
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  REQUIRE(static_cast<bool>(f));
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
}

// Small all-Dirichlet square experiment over an imported mesh file; light
// enough for several full pipeline runs per test binary.
struct PipeFix {
  fs::path root;
  ExperimentConfig cfg;

  explicit PipeFix(const std::string& name) {
    root = fs::temp_directory_path() / "polyrom_pipe_test" / name;
    fs::remove_all(root);
    fs::create_directories(root);
    const fs::path mesh_path = root / "rect.polymesh";
    spit(mesh_path, write_polymesh(generate_rectangle(0, 0, 1, 1, 6, 6)));
    cfg.geometry = mesh_path.string();
    cfg.bc_preset = "explicit";
    cfg.bc_explicit = {{"left", "dirichlet"},
                       {"right", "dirichlet"},
                       {"bottom", "dirichlet"},
                       {"top", "dirichlet"}};
    cfg.N = 6;
    cfg.cont_restarts = 2;
    cfg.out_dir = (root / "out").string();
  }
};

bool same_curve(const std::vector<KnwPoint>& a, const std::vector<KnwPoint>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].n != b[i].n || a[i].eps_u != b[i].eps_u || a[i].eps_p != b[i].eps_p)
      return false;
  return true;
}

}  // namespace

TEST_CASE("full pipeline over an imported mesh writes every artifact") {
  PipeFix fx("full");
  const ExperimentReport rep = run_pipeline(fx.cfg);

  CHECK(rep.n_vertices == 49);
  CHECK(rep.n_triangles == 72);
  CHECK(rep.n_eigs == 6);
  CHECK(rep.constants.c_coer > 0);
  CHECK(rep.constants.c_cont > 0);
  CHECK(rep.threshold > 0);
  CHECK(rep.snapshots_converged == 6);
  REQUIRE(rep.curve.size() == 6);
  for (std::size_t i = 1; i < rep.curve.size(); ++i) {
    CHECK(rep.curve[i].eps_u <= rep.curve[i - 1].eps_u);
    CHECK(rep.curve[i].eps_p <= rep.curve[i - 1].eps_p);
  }
  REQUIRE(rep.fits_u.size() == 3);
  REQUIRE(rep.fits_p.size() == 3);
  CHECK(!rep.forced_sym_grad);

  const fs::path out(fx.cfg.out_dir);
  for (const char* name :
       {"config.txt", "mesh.polymesh", "basis.pods", "eigs.csv",
        "constants_cache.csv", "constants.csv", "constants.txt", "forcing.csv",
        "snapshots.pods", "solve_log.csv", "knw_curve.csv", "fit_report.txt",
        "decay.svg"})
    CHECK_MESSAGE(fs::exists(out / name), name);
  for (const char* key : {"mesh", "eigs", "constants", "snapshots", "pod", "fit"})
    CHECK_MESSAGE(fs::exists(out / "keys" / (std::string(key) + ".key")), key);

  const std::string report_text = render_report(rep);
  CHECK(report_text.find("snapshots: 6/6 converged") != std::string::npos);
  CHECK(report_text.find("best fit") != std::string::npos);
}

TEST_CASE("cached stages are reloaded, not recomputed") {
  PipeFix fx("cache");
  const ExperimentReport a = run_pipeline(fx.cfg);
  const ExperimentReport b = run_pipeline(fx.cfg);
  CHECK(b.constants.c_coer == a.constants.c_coer);
  CHECK(b.constants.c_cont == a.constants.c_cont);
  CHECK(b.threshold == a.threshold);
  CHECK(same_curve(a.curve, b.curve));

  // prove the constants really come from disk: doctor the cached file and
  // re-run; the doctored values must surface in the report
  const fs::path cache_file = fs::path(fx.cfg.out_dir) / "constants_cache.csv";
  spit(cache_file, "c_coer,c_cont,restarts\n0.5,2.0,2\n");
  const ExperimentReport c = run_pipeline(fx.cfg, Stage::Constants);
  CHECK(c.constants.c_coer == 0.5);
  CHECK(c.constants.c_cont == 2.0);

  // a changed seed invalidates the key and forces a recompute
  ExperimentConfig reseeded = fx.cfg;
  reseeded.seed = 777;
  const ExperimentReport d = run_pipeline(reseeded, Stage::Constants);
  CHECK(d.constants.c_coer == doctest::Approx(a.constants.c_coer).epsilon(1e-9));
  CHECK(d.constants.c_coer != 0.5);
}

TEST_CASE("a viscosity change reuses constants but refreshes snapshots") {
  PipeFix fx("nu");
  const ExperimentReport a = run_pipeline(fx.cfg);

  // marker byte: stays iff the constants stage is not rewritten
  const fs::path cache_file = fs::path(fx.cfg.out_dir) / "constants_cache.csv";
  spit(cache_file, slurp(cache_file) + "\n");
  const std::string marked = slurp(cache_file);

  ExperimentConfig half = fx.cfg;
  half.nu = 0.5;
  const ExperimentReport b = run_pipeline(half);
  CHECK(slurp(cache_file) == marked);
  CHECK(b.constants.c_coer == a.constants.c_coer);
  CHECK(b.constants.c_cont == a.constants.c_cont);
  CHECK(b.threshold == doctest::Approx(0.25 * a.threshold).epsilon(1e-14));
  CHECK(b.curve.front().eps_u != a.curve.front().eps_u);

  // returning to the original viscosity reproduces the original curve
  const ExperimentReport c = run_pipeline(fx.cfg);
  CHECK(same_curve(a.curve, c.curve));
}

TEST_CASE("constants override skips estimation") {
  PipeFix fx("override");
  fx.cfg.has_constants_override = true;
  fx.cfg.c_coer_override = 0.9;
  fx.cfg.c_cont_override = 3.0;
  const ExperimentReport rep = run_pipeline(fx.cfg, Stage::Constants);
  CHECK(rep.constants.overridden);
  CHECK(rep.constants.c_coer == 0.9);
  CHECK(rep.constants.c_cont == 3.0);
  CHECK(rep.threshold ==
        doctest::Approx(fx.cfg.nu * fx.cfg.nu * 0.81 / 12.0).epsilon(1e-14));
  CHECK(!fs::exists(fs::path(fx.cfg.out_dir) / "constants_cache.csv"));
  CHECK(fs::exists(fs::path(fx.cfg.out_dir) / "constants.txt"));
}

TEST_CASE("grad_grad demotes to sym_grad outside pure Dirichlet") {
  PipeFix fx("form");
  fx.cfg.geometry = "step";
  fx.cfg.h_target = 1.0;
  fx.cfg.bc_preset = "mixed_dn";
  fx.cfg.viscous_form = "grad_grad";
  const ExperimentReport rep = run_pipeline(fx.cfg, Stage::Mesh);
  CHECK(rep.forced_sym_grad);
  REQUIRE(!rep.notes.empty());
  CHECK(rep.notes.front().find("sym_grad") != std::string::npos);
  CHECK(render_report(rep).find("sym_grad (forced)") != std::string::npos);

  // pure Dirichlet keeps the requested form
  PipeFix fy("form_d");
  fy.cfg.viscous_form = "grad_grad";
  const ExperimentReport rd = run_pipeline(fy.cfg, Stage::Mesh);
  CHECK(!rd.forced_sym_grad);
}

TEST_CASE("pipeline failures carry the stage name") {
  PipeFix fx("errs");

  ExperimentConfig missing = fx.cfg;
  missing.geometry = (fx.root / "absent.polymesh").string();
  try {
    run_pipeline(missing, Stage::Mesh);
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("stage mesh:") != std::string::npos);
  }

  ExperimentConfig badext = fx.cfg;
  const fs::path txt = fx.root / "mesh.txt";
  spit(txt, "not a mesh");
  badext.geometry = txt.string();
  CHECK_THROWS_AS(run_pipeline(badext, Stage::Mesh), ConfigError);

  // preset without a rule for the rectangle's tags
  ExperimentConfig badpreset = fx.cfg;
  badpreset.bc_preset = "mixed_dn";
  badpreset.bc_explicit.clear();
  try {
    run_pipeline(badpreset, Stage::Mesh);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("stage mesh:") != std::string::npos);
  }
}

TEST_CASE("serial runs in fresh directories are byte-identical") {
  set_thread_count(1);
  PipeFix fa("det_a"), fb("det_b");
  run_pipeline(fa.cfg);
  run_pipeline(fb.cfg);
  set_thread_count(0);

  for (const char* name : {"eigs.csv", "constants_cache.csv", "forcing.csv",
                           "solve_log.csv", "knw_curve.csv", "fit_report.txt",
                           "snapshots.pods", "basis.pods"})
    CHECK_MESSAGE(slurp(fs::path(fa.cfg.out_dir) / name) ==
                      slurp(fs::path(fb.cfg.out_dir) / name),
                  name);
}
