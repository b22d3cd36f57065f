#include "fpois/config.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace fpois {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(trim(tok));
  return out;
}

[[noreturn]] void fail(const std::string& name, int line, const std::string& msg) {
  throw std::invalid_argument(name + ":" + std::to_string(line) + ": " + msg);
}

double parse_double(const std::string& name, int line, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (...) {
    fail(name, line, "expected a number, got '" + v + "'");
  }
}

long long parse_int(const std::string& name, int line, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long d = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (...) {
    fail(name, line, "expected an integer, got '" + v + "'");
  }
}

}  // namespace

std::string config_key_help() {
  return
      "study        convergence | holder | kernel_rate | isometry\n"
      "k            spatial dimension\n"
      "h            Hurst entries, comma separated (single value broadcasts)\n"
      "resolutions  comma separated powers of two\n"
      "reference    reference resolution (convergence) / lattice (holder, isometry)\n"
      "replicates   Monte Carlo replicate count\n"
      "seed         64-bit RNG seed\n"
      "stream       noise stream id (sample/solve runs)\n"
      "n            grid resolution (sample/solve runs)\n"
      "f1           zero | tanh | arctan\n"
      "f1_bound     sup |f1| (M)\n"
      "f1_slope     max slope of f1\n"
      "f2           zero | linear | affine   (f2(u) = -L u + c)\n"
      "f2_lipschitz Lipschitz constant L of f2\n"
      "f2_offset    offset c of the affine f2\n"
      "g            zero | sinpi | poly | cospoly\n"
      "g_projection pointwise | cell_average\n"
      "scheme       plain | smoothed\n"
      "delta        smoothed-scheme kernel exponent (0 = derive from rates)\n"
      "mu           epsilon(n) = n^-mu (auto = derive from rates)\n"
      "safety_rho   interior-value safety factor in (0,1)\n"
      "tol          fixed-point tolerance\n"
      "max_iter     fixed-point iteration cap\n"
      "workers      worker pool size\n"
      "b_max        kernel_rate series truncation\n"
      "separations  holder separations, comma separated\n"
      "slope_target acceptance threshold on the fitted slope\n"
      "max_std_dev  isometry acceptance threshold (default 4)\n"
      "out          output directory (a fresh timestamped subdirectory per run)\n";
}

RunConfig parse_config(std::istream& in, const std::string& name) {
  RunConfig rc;
  StudyConfig& sc = rc.study;
  sc.workers = 1;
  std::string line;
  int lineno = 0;
  std::map<std::string, int> seen;
  std::string f1_kind = "zero", f2_kind = "zero", g_kind = "zero",
              g_projection = "pointwise";
  double f1_bound = 1.0, f1_slope = 1.0, f2_l = 0.0, f2_c = 0.0;

  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(name, lineno, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) fail(name, lineno, "expected 'key = value'");
    if (seen.count(key)) fail(name, lineno, "duplicate key '" + key + "'");
    seen[key] = lineno;

    if (key == "study") {
      if (value == "convergence") sc.kind = StudyKind::convergence;
      else if (value == "holder") sc.kind = StudyKind::holder;
      else if (value == "kernel_rate") sc.kind = StudyKind::kernel_rate;
      else if (value == "isometry") sc.kind = StudyKind::isometry;
      else fail(name, lineno, "unknown study kind '" + value + "'");
    } else if (key == "k") {
      sc.k = static_cast<int>(parse_int(name, lineno, value));
    } else if (key == "h") {
      sc.h.clear();
      for (const auto& t : split_list(value)) sc.h.push_back(parse_double(name, lineno, t));
    } else if (key == "resolutions") {
      sc.resolutions.clear();
      for (const auto& t : split_list(value))
        sc.resolutions.push_back(static_cast<int>(parse_int(name, lineno, t)));
    } else if (key == "reference") {
      sc.reference_resolution = static_cast<int>(parse_int(name, lineno, value));
    } else if (key == "replicates") {
      sc.replicates = static_cast<int>(parse_int(name, lineno, value));
    } else if (key == "seed") {
      sc.seed = static_cast<std::uint64_t>(parse_int(name, lineno, value));
    } else if (key == "stream") {
      rc.stream_id = static_cast<std::uint64_t>(parse_int(name, lineno, value));
    } else if (key == "n") {
      rc.n_single = static_cast<int>(parse_int(name, lineno, value));
    } else if (key == "f1") {
      f1_kind = value;
    } else if (key == "f1_bound") {
      f1_bound = parse_double(name, lineno, value);
    } else if (key == "f1_slope") {
      f1_slope = parse_double(name, lineno, value);
    } else if (key == "f2") {
      f2_kind = value;
    } else if (key == "f2_lipschitz") {
      f2_l = parse_double(name, lineno, value);
    } else if (key == "f2_offset") {
      f2_c = parse_double(name, lineno, value);
    } else if (key == "g") {
      g_kind = value;
    } else if (key == "g_projection") {
      g_projection = value;
    } else if (key == "scheme") {
      if (value == "plain") sc.scheme = Scheme::plain;
      else if (value == "smoothed") sc.scheme = Scheme::smoothed;
      else fail(name, lineno, "unknown scheme '" + value + "'");
    } else if (key == "delta") {
      sc.delta = parse_double(name, lineno, value);
    } else if (key == "mu") {
      sc.mu = value == "auto" ? 0.0 : parse_double(name, lineno, value);
    } else if (key == "safety_rho") {
      sc.safety_rho = parse_double(name, lineno, value);
    } else if (key == "tol") {
      sc.tol = parse_double(name, lineno, value);
    } else if (key == "max_iter") {
      sc.max_iter = static_cast<int>(parse_int(name, lineno, value));
    } else if (key == "workers") {
      sc.workers = static_cast<int>(parse_int(name, lineno, value));
    } else if (key == "b_max") {
      sc.b_max = static_cast<int>(parse_int(name, lineno, value));
    } else if (key == "separations") {
      sc.separations.clear();
      for (const auto& t : split_list(value))
        sc.separations.push_back(parse_double(name, lineno, t));
    } else if (key == "slope_target") {
      sc.slope_target = parse_double(name, lineno, value);
      sc.has_slope_target = true;
    } else if (key == "max_std_dev") {
      rc.isometry_max_dev = parse_double(name, lineno, value);
    } else if (key == "out") {
      rc.out_dir = value;
    } else {
      fail(name, lineno, "unknown key '" + key + "'");
    }
  }

  // single h broadcasts across k
  if (sc.h.size() == 1 && sc.k > 1) sc.h.assign(sc.k, sc.h[0]);
  if (sc.h.empty()) fail(name, lineno, "missing key 'h'");

  if (f1_kind == "zero" && f2_kind == "zero") {
    sc.f = NonlinearitySpec::zero();
  } else {
    const auto f1 = f1_kind == "zero"     ? NonlinearitySpec::F1::zero
                    : f1_kind == "tanh"   ? NonlinearitySpec::F1::scaled_tanh
                    : f1_kind == "arctan" ? NonlinearitySpec::F1::scaled_arctan
                                          : throw std::invalid_argument(
                                                name + ": unknown f1 '" + f1_kind + "'");
    const auto f2 = f2_kind == "zero"     ? NonlinearitySpec::F2::zero
                    : f2_kind == "linear" ? NonlinearitySpec::F2::linear
                    : f2_kind == "affine" ? NonlinearitySpec::F2::affine
                                          : throw std::invalid_argument(
                                                name + ": unknown f2 '" + f2_kind + "'");
    sc.f = NonlinearitySpec::make(f1, f1_bound, f1_slope, f2, f2_l, f2_c);
  }
  const auto proj = g_projection == "pointwise"      ? SourceSpec::Projection::pointwise
                    : g_projection == "cell_average" ? SourceSpec::Projection::cell_average
                                                     : throw std::invalid_argument(
                                                           name + ": unknown g_projection '" +
                                                           g_projection + "'");
  sc.g = g_kind == "zero" ? SourceSpec::zero() : SourceSpec::builtin(g_kind, proj);

  // optional environment override of the seed, recorded by the CLI
  if (const char* env = std::getenv("FPOIS_SEED")) {
    rc.seed_overridden = true;
    sc.seed = std::strtoull(env, nullptr, 10);
  }
  return rc;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  return parse_config(in, path);
}

}  // namespace fpois
