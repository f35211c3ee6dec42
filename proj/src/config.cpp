#include "polyrom/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "polyrom/csv.hpp"
#include "polyrom/errors.hpp"

namespace polyrom {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config: bad number for " + key + ": '" + v + "'");
  }
}

long long parse_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw ConfigError("config: bad integer for " + key + ": '" + v + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config: bad boolean for " + key + ": '" + v + "'");
}

std::vector<int> parse_n_values(const std::string& v) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) continue;
    const auto dots = tok.find("..");
    if (dots != std::string::npos) {
      const long long a = parse_int("n_values", trim(tok.substr(0, dots)));
      const long long b = parse_int("n_values", trim(tok.substr(dots + 2)));
      if (b < a) throw ConfigError("config: descending range in n_values");
      for (long long n = a; n <= b; ++n) out.push_back(static_cast<int>(n));
    } else {
      out.push_back(static_cast<int>(parse_int("n_values", tok)));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

std::vector<int> ExperimentConfig::effective_n_values() const {
  if (!n_values.empty()) return n_values;
  std::vector<int> out(N);
  for (int i = 0; i < N; ++i) out[i] = i + 1;
  return out;
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::string section = "experiment";
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    const std::string qual = section + "." + key;

    if (qual == "experiment.geometry") {
      cfg.geometry = val;
    } else if (qual == "experiment.h_target") {
      cfg.h_target = parse_double(qual, val);
    } else if (qual == "experiment.bc_preset") {
      cfg.bc_preset = val;
    } else if (qual == "experiment.nu") {
      cfg.nu = parse_double(qual, val);
    } else if (qual == "experiment.N") {
      cfg.N = static_cast<int>(parse_int(qual, val));
    } else if (qual == "experiment.n_values") {
      cfg.n_values = parse_n_values(val);
    } else if (qual == "experiment.viscous_form") {
      cfg.viscous_form = val;
    } else if (qual == "experiment.seed") {
      cfg.seed = static_cast<std::uint64_t>(parse_int(qual, val));
    } else if (section == "bc") {
      cfg.bc_explicit[key] = val;
    } else if (qual == "solver.newton_tol") {
      cfg.newton_tol = parse_double(qual, val);
    } else if (qual == "solver.newton_max_iters") {
      cfg.newton_max_iters = static_cast<int>(parse_int(qual, val));
    } else if (qual == "solver.eig_tol") {
      cfg.eig_tol = parse_double(qual, val);
    } else if (qual == "solver.cont_restarts") {
      cfg.cont_restarts = static_cast<int>(parse_int(qual, val));
    } else if (qual == "solver.allow_above_threshold") {
      cfg.allow_above_threshold = parse_bool(qual, val);
    } else if (qual == "pod.euclidean") {
      cfg.pod_euclidean = parse_bool(qual, val);
    } else if (qual == "fit.tau") {
      cfg.fit_tau = parse_double(qual, val);
    } else if (qual == "constants.c_coer") {
      cfg.c_coer_override = parse_double(qual, val);
      cfg.has_constants_override = true;
    } else if (qual == "constants.c_cont") {
      cfg.c_cont_override = parse_double(qual, val);
      cfg.has_constants_override = true;
    } else if (qual == "output.dir") {
      cfg.out_dir = val;
    } else {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": unknown key '" + qual + "'");
    }
  }
  validate_config(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config: " + path);
  std::string text((std::istreambuf_iterator<char>(f)),
                   std::istreambuf_iterator<char>());
  return parse_config(text);
}

void validate_config(const ExperimentConfig& cfg) {
  if (!(cfg.h_target > 0)) throw ConfigError("config: h_target must be > 0");
  if (!(cfg.nu > 0)) throw ConfigError("config: nu must be > 0");
  if (cfg.N < 1) throw ConfigError("config: N must be >= 1");
  if (cfg.viscous_form != "sym_grad" && cfg.viscous_form != "grad_grad")
    throw ConfigError("config: viscous_form must be sym_grad or grad_grad");
  if (cfg.bc_preset != "dirichlet" && cfg.bc_preset != "mixed_dn" &&
      cfg.bc_preset != "mixed_slip" && cfg.bc_preset != "explicit")
    throw ConfigError("config: unknown bc_preset '" + cfg.bc_preset + "'");
  if (cfg.bc_preset == "explicit" && cfg.bc_explicit.empty())
    throw ConfigError("config: bc_preset = explicit needs a [bc] section");
  for (int n : cfg.n_values)
    if (n < 1 || n > cfg.N)
      throw ConfigError("config: n_values entry " + std::to_string(n) +
                        " outside [1, N]");
  if (cfg.has_constants_override &&
      (!(cfg.c_coer_override > 0) || !(cfg.c_cont_override > 0)))
    throw ConfigError("config: constants override needs both c_coer and "
                      "c_cont positive");
  if (cfg.newton_max_iters < 1 || cfg.cont_restarts < 1)
    throw ConfigError("config: iteration counts must be >= 1");
  if (!(cfg.newton_tol > 0) || !(cfg.eig_tol > 0) || !(cfg.fit_tau > 0))
    throw ConfigError("config: tolerances must be > 0");
}

std::string canonical_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "[experiment]\n";
  out << "geometry = " << cfg.geometry << "\n";
  out << "h_target = " << to_g17(cfg.h_target) << "\n";
  out << "bc_preset = " << cfg.bc_preset << "\n";
  out << "nu = " << to_g17(cfg.nu) << "\n";
  out << "N = " << cfg.N << "\n";
  out << "n_values =";
  {
    const auto ns = cfg.effective_n_values();
    for (std::size_t i = 0; i < ns.size(); ++i)
      out << (i ? "," : " ") << ns[i];
  }
  out << "\n";
  out << "viscous_form = " << cfg.viscous_form << "\n";
  out << "seed = " << cfg.seed << "\n";
  if (!cfg.bc_explicit.empty()) {
    out << "[bc]\n";
    for (const auto& [tag, kind] : cfg.bc_explicit)
      out << tag << " = " << kind << "\n";
  }
  out << "[solver]\n";
  out << "newton_tol = " << to_g17(cfg.newton_tol) << "\n";
  out << "newton_max_iters = " << cfg.newton_max_iters << "\n";
  out << "eig_tol = " << to_g17(cfg.eig_tol) << "\n";
  out << "cont_restarts = " << cfg.cont_restarts << "\n";
  out << "allow_above_threshold = "
      << (cfg.allow_above_threshold ? "true" : "false") << "\n";
  out << "[pod]\n";
  out << "euclidean = " << (cfg.pod_euclidean ? "true" : "false") << "\n";
  out << "[fit]\n";
  out << "tau = " << to_g17(cfg.fit_tau) << "\n";
  if (cfg.has_constants_override) {
    out << "[constants]\n";
    out << "c_coer = " << to_g17(cfg.c_coer_override) << "\n";
    out << "c_cont = " << to_g17(cfg.c_cont_override) << "\n";
  }
  out << "[output]\n";
  out << "dir = " << cfg.out_dir << "\n";
  return out.str();
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  return fnv1a64(canonical_config(cfg));
}

BoundarySpec expand_preset(const std::vector<std::string>& tags,
                           const std::string& preset,
                           const std::map<std::string, std::string>&
                               explicit_map) {
  BoundarySpec spec;
  auto kind_from_string = [](const std::string& s) {
    if (s == "dirichlet") return BcKind::Dirichlet;
    if (s == "neumann") return BcKind::Neumann;
    if (s == "slip") return BcKind::Slip;
    throw ConfigError("config: unknown bc kind '" + s + "'");
  };

  if (preset == "explicit") {
    for (const std::string& tag : tags) {
      const auto it = explicit_map.find(tag);
      if (it == explicit_map.end())
        throw ConfigError("config: no bc given for tag '" + tag + "'");
      spec.kinds[tag] = kind_from_string(it->second);
    }
    return spec;
  }

  for (const std::string& tag : tags) {
    BcKind kind;
    if (preset == "dirichlet") {
      kind = BcKind::Dirichlet;
    } else if (preset == "mixed_dn") {
      if (tag == "inlet" || tag == "outlet")
        kind = BcKind::Neumann;
      else if (tag == "wall" || tag == "obstacle" || tag == "step_vertical" ||
               tag == "step_horizontal")
        kind = BcKind::Dirichlet;
      else
        throw ConfigError("config: preset mixed_dn has no rule for tag '" +
                          tag + "'");
    } else if (preset == "mixed_slip") {
      if (tag == "inlet" || tag == "outlet")
        kind = BcKind::Neumann;
      else if (tag == "obstacle" || tag == "step_vertical")
        kind = BcKind::Dirichlet;
      else if (tag == "wall" || tag == "step_horizontal")
        kind = BcKind::Slip;
      else
        throw ConfigError("config: preset mixed_slip has no rule for tag '" +
                          tag + "'");
    } else {
      throw ConfigError("config: unknown bc_preset '" + preset + "'");
    }
    spec.kinds[tag] = kind;
  }
  return spec;
}

}  // namespace polyrom
