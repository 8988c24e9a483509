#include "mfgs/cli.hpp"

#include <CLI11.hpp>
#include <Eigen/Core>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <limits>
#include <optional>
#include <sstream>

#include "mfgs/error.hpp"
#include "mfgs/hj_halfspin.hpp"
#include "mfgs/lax_oleinik.hpp"
#include "mfgs/mc_sim.hpp"
#include "mfgs/model_file.hpp"
#include "mfgs/parallel.hpp"
#include "mfgs/spectral.hpp"

namespace mfgs::cli {

namespace fs = std::filesystem;
using OJ = nlohmann::ordered_json;

namespace {

struct RunConfig {
  std::string command;
  std::string model;
  std::vector<int> Ns;
  double T = -1.0;
  double dt = 1e-3;
  int mesh = 800;
  int stencil = 3;
  long paths = 10000;
  std::uint64_t seed = 12345;
  std::string lambda;
  std::string out = "runs";
  std::string format = "csv";
  double band = 1e-8;
  int samples = 4001;
  std::vector<int> start, end;
  std::string manifest;
  int entry = 0;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

class Context {
 public:
  Context(const RunConfig& cfg, std::ostream& out) : cfg_(cfg), out_(out) {
    fs::create_directories(cfg.out);
  }
  std::ostream& out() { return out_; }

  void write_table(const std::string& stem, const Table& t) {
    const std::string name = stem + (cfg_.format == "json" ? ".json" : ".csv");
    std::ofstream f(path(name), std::ios::binary);
    if (cfg_.format == "json") {
      OJ j;
      j["columns"] = t.columns;
      j["rows"] = t.rows;
      f << j.dump(2) << '\n';
    } else {
      for (std::size_t c = 0; c < t.columns.size(); ++c) f << (c ? "," : "") << t.columns[c];
      f << '\n';
      for (const auto& r : t.rows) {
        for (std::size_t c = 0; c < r.size(); ++c) f << (c ? "," : "") << fmt(r[c]);
        f << '\n';
      }
    }
    files_.push_back(name);
  }

  void write_json(const std::string& name, const OJ& j) {
    std::ofstream f(path(name), std::ios::binary);
    f << j.dump(2) << '\n';
    files_.push_back(name);
  }

  OJ summary;
  const std::vector<std::string>& files() const { return files_; }
  std::string path(const std::string& name) const { return (fs::path(cfg_.out) / name).string(); }

 private:
  const RunConfig& cfg_;
  std::ostream& out_;
  std::vector<std::string> files_;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw ModelError(what);
}

std::vector<std::string> label_columns(const ModelSpec& spec, const std::string& prefix) {
  std::vector<std::string> cols;
  for (const auto& l : spec.labels) cols.push_back(prefix + l);
  return cols;
}

Eigen::Index point_index(const SimplexGrid& grid, const std::vector<int>& counts) {
  if (counts.empty()) {
    Counts c(grid.d());
    for (int a = 0; a < grid.d(); ++a) c(a) = grid.N() / grid.d() + (a < grid.N() % grid.d());
    return grid.index(c);
  }
  if (static_cast<int>(counts.size()) != grid.d())
    throw ModelError("point needs " + std::to_string(grid.d()) + " counts");
  const Counts c = Eigen::Map<const Eigen::VectorXi>(counts.data(), grid.d());
  return grid.index(c);
}

OJ counts_json(const SimplexGrid& grid, Eigen::Index i) {
  OJ a = OJ::array();
  for (int k = 0; k < grid.d(); ++k) a.push_back(grid.counts(i)(k));
  return a;
}

int cmd_validate(const RunConfig& cfg, Context& ctx) {
  const ModelSpec spec = load_model(cfg.model);
  const ValidationReport rep = validate_spec(spec);
  OJ j;
  j["model"] = cfg.model;
  j["d"] = spec.d;
  j["valid"] = rep.ok();
  j["violations"] = rep.violations;
  if (rep.rates) {
    j["kappa_alpha"] = std::vector<double>(rep.rates->kappa_alpha.data(),
                                           rep.rates->kappa_alpha.data() + spec.d);
    j["kappa_total"] = rep.rates->kappa_total;
  }
  ctx.write_json("validate.json", j);
  ctx.summary = j;
  if (rep.ok()) {
    ctx.out() << "model valid: d=" << spec.d << " kappa_total=" << rep.rates->kappa_total << '\n';
    return kExitOk;
  }
  for (const auto& v : rep.violations) ctx.out() << "violation: " << v << '\n';
  return kExitValidation;
}

int cmd_spectrum(const RunConfig& cfg, Context& ctx) {
  const ModelSpec spec = require_valid(load_model(cfg.model));
  require(!cfg.Ns.empty(), "spectrum needs --N");
  OJ runs = OJ::array();
  for (int N : cfg.Ns) {
    const LumpedOperator op = assemble(spec, N);
    const GroundStateSolution gs = ground_state(op);
    Table t;
    t.columns = label_columns(spec, "m_");
    if (spec.d == 2) t.columns.push_back("magnetization");
    for (const char* c : {"h", "psi", "psi_normalized"}) t.columns.push_back(c);
    for (Eigen::Index i = 0; i < op.grid.size(); ++i) {
      std::vector<double> row;
      const Eigen::VectorXd m = op.grid.coords(i);
      row.assign(m.data(), m.data() + m.size());
      if (spec.d == 2) row.push_back(grid_magnetization(op.grid, i));
      row.push_back(gs.h(i));
      row.push_back(gs.psi(i));
      row.push_back(gs.psi_normalized(i));
      t.rows.push_back(std::move(row));
    }
    ctx.write_table("spectrum_N" + std::to_string(N), t);
    OJ r;
    r["N"] = N;
    r["grid_points"] = op.grid.size();
    r["R1"] = gs.R1;
    r["R1_per_N"] = gs.R1 / N;
    r["iterations"] = gs.iterations;
    r["residual"] = gs.residual;
    runs.push_back(r);
    ctx.out() << "N=" << N << " R_N^1=" << fmt(gs.R1) << " R_N^1/N=" << fmt(gs.R1 / N) << '\n';
  }
  ctx.summary["runs"] = runs;
  ctx.write_json("spectrum.json", ctx.summary);
  return kExitOk;
}

int cmd_oracle_check(const RunConfig& cfg, Context& ctx) {
  const ModelSpec spec = require_valid(load_model(cfg.model));
  require(!cfg.Ns.empty(), "oracle-check needs --N");
  const Eigen::VectorXd kappa = spec.kernel.rowwise().sum();
  const bool uniform = (kappa.array() == kappa(0)).all();
  constexpr double kTol = 1e-10;
  bool ok = true;
  OJ runs = OJ::array();
  Table t;
  t.columns = {"N", "R1_lumped", "E1_full", "delta"};
  for (int N : cfg.Ns) {
    const LumpedOperator op = assemble(spec, N);
    double R1;
    if (op.grid.size() <= 2000) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.S.dense(), Eigen::EigenvaluesOnly);
      R1 = -es.eigenvalues()(op.grid.size() - 1);
    } else {
      R1 = ground_state(op).R1;
    }
    const OracleResult full = full_hamiltonian_oracle(spec, N, !uniform);
    const double predicted = uniform ? N * kappa(0) + full.E1 : full.E1;
    const double delta = std::abs(R1 - predicted);
    ok = ok && delta <= kTol;
    OJ r;
    r["N"] = N;
    r["R1_lumped"] = R1;
    r["E1_full"] = full.E1;
    r["shifted_oracle"] = !uniform;
    r["delta"] = delta;
    runs.push_back(r);
    t.rows.push_back({double(N), R1, full.E1, delta});
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e", delta);
    ctx.out() << "N=" << N << " lumped vs full ground energy Δ = " << buf << '\n';
  }
  ctx.summary["tolerance"] = kTol;
  ctx.summary["pass"] = ok;
  ctx.summary["runs"] = runs;
  ctx.write_table("oracle_check", t);
  ctx.write_json("oracle_check.json", ctx.summary);
  return ok ? kExitOk : kExitValidation;
}

ProfileOptions profile_options(const RunConfig& cfg) {
  ProfileOptions opt;
  opt.samples = cfg.samples;
  opt.minima.band_rel = cfg.band;
  return opt;
}

int cmd_hj(const RunConfig& cfg, Context& ctx) {
  const ModelSpec spec = require_valid(load_model(cfg.model));
  require(spec.d == 2, "hj needs a two-label model");
  const HalfSpinModel model = HalfSpinModel::from_spec(spec);
  const HJProfile prof = admissible_psi(model, profile_options(cfg));
  const StructureReport rep = viscosity_structure_check(model, prof);

  Table t;
  t.columns = {"m", "V", "theta", "psi", "branch"};
  for (std::size_t k = 0; k < prof.m.size(); ++k)
    t.rows.push_back({prof.m[k], model.V(prof.m[k]), prof.theta[k], prof.psi[k],
                      double(prof.branch[k])});
  ctx.write_table("hj_profile", t);

  OJ& j = ctx.summary;
  j["lambda"] = prof.lambda_field;
  j["r1"] = prof.r1;
  j["minima"] = prof.minima;
  j["chi0"] = prof.chi0;
  j["selection"] = to_string(prof.selection);
  j["selected"] = prof.selected;
  j["shocks"] = prof.shocks;
  OJ cands = OJ::array();
  for (double m : prof.minima) {
    const CorrectionCandidates c = correction_candidates(model, m);
    OJ e;
    e["m"] = m;
    e["chi0"] = c.chi0;
    e["sqrt_v2_over_rate"] = c.sqrt_v2_over_rate;
    e["harmonic"] = c.harmonic;
    e["derived"] = c.derived;
    cands.push_back(e);
  }
  j["correction_candidates"] = cands;
  OJ issues = OJ::array();
  for (const auto& is : rep.issues)
    issues.push_back({{"check", is.check}, {"location", is.location}, {"detail", is.detail}});
  j["structure_ok"] = rep.ok();
  j["structure_issues"] = issues;
  ctx.write_json("hj.json", j);

  ctx.out() << "r1=" << fmt(prof.r1) << " minima=" << prof.minima.size()
            << " selection=" << to_string(prof.selection) << " shocks=" << prof.shocks.size()
            << " structure=" << (rep.ok() ? "ok" : "FAILED") << '\n';
  return rep.ok() ? kExitOk : kExitValidation;
}

int cmd_lax_oleinik(const RunConfig& cfg, Context& ctx) {
  const ModelSpec spec = require_valid(load_model(cfg.model));
  const double T = cfg.T > 0 ? cfg.T : 0.1;
  LaxOleinikOptions opt;
  opt.stencil = cfg.stencil;
  const LaxOleinikScheme scheme(spec, cfg.mesh, cfg.dt, opt);
  const SimplexGrid& grid = scheme.grid();

  Eigen::VectorXd u0 = Eigen::VectorXd::Zero(grid.size());
  std::optional<double> residual, r1;
  if (spec.d == 2) {
    const HalfSpinModel model = HalfSpinModel::from_spec(spec);
    const HJProfile prof = admissible_psi(model, profile_options(cfg));
    u0 = sample_on_grid(psi_function(model, prof), grid);
    r1 = prof.r1;
    residual = fixed_point_residual(scheme, u0, prof.r1, T);
  }
  const Eigen::VectorXd uT = scheme.evolve(u0, T);
  const ContainmentReport cont = minima_containment(spec, grid, uT);

  Table t;
  t.columns = label_columns(spec, "m_");
  t.columns.push_back("u0");
  t.columns.push_back("uT");
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const Eigen::VectorXd m = grid.coords(i);
    std::vector<double> row(m.data(), m.data() + m.size());
    row.push_back(u0(i));
    row.push_back(uT(i));
    t.rows.push_back(std::move(row));
  }
  ctx.write_table("lax_oleinik", t);

  OJ& j = ctx.summary;
  j["mesh"] = cfg.mesh;
  j["dt"] = cfg.dt;
  j["dt_max"] = scheme.dt_max();
  j["T"] = T;
  j["initial"] = spec.d == 2 ? "analytic_psi" : "zero";
  j["r1"] = r1 ? OJ(*r1) : OJ(nullptr);
  j["fixed_point_residual"] = residual ? OJ(*residual) : OJ(nullptr);
  OJ mins = OJ::array();
  for (std::size_t k = 0; k < cont.local_minima.size(); ++k)
    mins.push_back({{"counts", counts_json(grid, cont.local_minima[k])},
                    {"on_boundary", bool(cont.on_boundary[k])},
                    {"distance_to_argmin_V", cont.distance_to_argmin_V[k]}});
  j["local_minima"] = mins;
  j["minima_interior"] = cont.interior;
  j["minima_within_mesh"] = cont.within_mesh;
  ctx.write_json("lax_oleinik.json", j);

  ctx.out() << "mesh=" << cfg.mesh << " dt=" << cfg.dt << " T=" << T;
  if (residual) ctx.out() << " residual=" << fmt(*residual);
  ctx.out() << " minima=" << cont.local_minima.size() << '\n';
  return kExitOk;
}

int cmd_simulate(const RunConfig& cfg, Context& ctx) {
  const ModelSpec spec = require_valid(load_model(cfg.model));
  require(!cfg.Ns.empty(), "simulate needs --N");
  const int N = cfg.Ns.front();
  const double T = cfg.T > 0 ? cfg.T : 1.0;
  const LumpedOperator op = assemble(spec, N);
  const Eigen::Index start = point_index(op.grid, cfg.start);
  std::optional<Eigen::Index> target;
  if (!cfg.end.empty()) target = point_index(op.grid, cfg.end);
  const FeynmanKacEstimate est = estimate_Z(op, start, target, T, cfg.paths, cfg.seed);

  std::optional<double> oracle;
  if (op.grid.size() <= 20000) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(op.grid.size());
    e(start) = 1.0;
    const Eigen::VectorXd col = semigroup_apply(op.S, e, T);
    oracle = target ? col(*target) : blocked_sum(col);
  }

  Table t;
  t.columns = {"N", "T", "n_paths", "hits", "mean", "std_error", "log_z", "log_z_se", "oracle"};
  t.rows.push_back({double(N), T, double(est.n_paths), double(est.hits), est.mean, est.std_error,
                    est.log_z, est.log_z_se,
                    oracle ? *oracle : std::numeric_limits<double>::quiet_NaN()});
  ctx.write_table("simulate", t);

  OJ& j = ctx.summary;
  j["N"] = N;
  j["T"] = T;
  j["seed"] = cfg.seed;
  j["n_paths"] = est.n_paths;
  j["start"] = counts_json(op.grid, start);
  j["target"] = target ? counts_json(op.grid, *target) : OJ(nullptr);
  j["hits"] = est.hits;
  j["no_hit"] = est.no_hit;
  j["log_mean"] = est.log_mean;
  j["mean"] = est.mean;
  j["std_error"] = est.std_error;
  j["log_z"] = est.log_z;
  j["log_z_se"] = est.log_z_se;
  j["oracle"] = oracle ? OJ(*oracle) : OJ(nullptr);
  j["z_score"] =
      oracle && est.std_error > 0 ? OJ((est.mean - *oracle) / est.std_error) : OJ(nullptr);
  ctx.write_json("simulate.json", j);

  ctx.out() << "mean=" << fmt(est.mean) << " se=" << fmt(est.std_error);
  if (oracle) ctx.out() << " oracle=" << fmt(*oracle);
  ctx.out() << '\n';
  return kExitOk;
}

std::vector<double> parse_lambda_range(const std::string& s) {
  std::vector<double> parts;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw UsageError("--lambda expects A:B[:STEP], got '" + s + "'");
    }
  }
  if (parts.size() == 2) parts.push_back(0.01);
  if (parts.size() != 3) throw UsageError("--lambda expects A:B[:STEP], got '" + s + "'");
  const double a = parts[0], b = parts[1], step = parts[2];
  require(step > 0 && b >= a && a > 0, "--lambda needs 0 < A <= B and STEP > 0");
  std::vector<double> out;
  const long n = static_cast<long>(std::floor((b - a) / step + 1e-9));
  for (long k = 0; k <= n; ++k) out.push_back(a + k * step);
  return out;
}

int cmd_sweep(const RunConfig& cfg, Context& ctx) {
  const std::vector<double> lams = parse_lambda_range(cfg.lambda);
  const nlohmann::json base = load_model_json(cfg.model);
  require(model_from_json(base).d == 2, "sweep-lambda needs a two-label model");
  ProfileOptions popt = profile_options(cfg);
  popt.samples = 5;  // only minima, selection and shocks are reported

  Table t;
  t.columns = {"lambda", "r1", "n_minima", "max_abs_minimum", "n_shocks"};
  OJ rows = OJ::array();
  double prev_abs = std::numeric_limits<double>::quiet_NaN(), prev_lam = 0.0;
  OJ jumps = OJ::array();
  for (double lam : lams) {
    const ModelSpec spec = require_valid(model_from_json(with_field(base, lam)));
    const HJProfile prof = admissible_psi(HalfSpinModel::from_spec(spec), popt);
    double max_abs = 0.0;
    for (double m : prof.minima) max_abs = std::max(max_abs, std::abs(m));
    t.rows.push_back({lam, prof.r1, double(prof.minima.size()), max_abs,
                      double(prof.shocks.size())});
    rows.push_back({{"lambda", lam},
                    {"r1", prof.r1},
                    {"minima", prof.minima},
                    {"selection", to_string(prof.selection)},
                    {"shocks", prof.shocks}});
    if (std::abs(max_abs - prev_abs) > 0.1) {
      jumps.push_back({{"from", prev_lam}, {"to", lam}, {"jump", max_abs - prev_abs}});
      ctx.out() << "minimizer jump between lambda=" << prev_lam << " and " << lam << '\n';
    }
    prev_abs = max_abs;
    prev_lam = lam;
  }
  ctx.write_table("sweep_lambda", t);
  ctx.summary["band"] = cfg.band;
  ctx.summary["rows"] = rows;
  ctx.summary["jumps"] = jumps;
  ctx.write_json("sweep_lambda.json", ctx.summary);
  ctx.out() << "swept " << lams.size() << " values of lambda\n";
  return kExitOk;
}

void check_config(const RunConfig& c) {
  for (int N : c.Ns) require(N > 0, "--N must be positive");
  require(c.dt > 0, "--dt must be positive");
  require(c.mesh > 0, "--mesh must be positive");
  require(c.stencil > 0, "--stencil must be positive");
  require(c.paths > 0, "--paths must be positive");
  require(c.band > 0, "--band must be positive");
  require(c.samples >= 5, "--samples must be at least 5");
  if (!c.model.empty()) require(fs::exists(c.model), "model file '" + c.model + "' not found");
}

std::vector<std::string> replace_out(std::vector<std::string> argv, const std::string& dir) {
  for (std::size_t k = 0; k < argv.size(); ++k) {
    if (argv[k] == "--out" && k + 1 < argv.size()) {
      argv[k + 1] = dir;
      return argv;
    }
    if (argv[k].rfind("--out=", 0) == 0) {
      argv[k] = "--out=" + dir;
      return argv;
    }
  }
  argv.push_back("--out");
  argv.push_back(dir);
  return argv;
}

int cmd_replay(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  std::ifstream in(cfg.manifest);
  if (!in) throw ModelError("cannot open manifest '" + cfg.manifest + "'");
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) lines.push_back(line);
  if (lines.empty()) throw ModelError("manifest is empty");
  const int n = static_cast<int>(lines.size());
  const int k = cfg.entry > 0 ? cfg.entry : n + cfg.entry;  // 0 selects the last entry
  require(k >= 1 && k <= n, "manifest entry out of range");
  const auto rec = nlohmann::json::parse(lines[k - 1]);
  const auto argv = rec.at("argv").get<std::vector<std::string>>();
  if (!argv.empty() && argv.front() == "replay") throw ModelError("cannot replay a replay");
  const std::string dir =
      cfg.out != "runs" ? cfg.out : (fs::path(cfg.manifest).parent_path() / "replay").string();
  const int code = run(replace_out(argv, dir), out, err);

  int same = 0, total = 0;
  for (const auto& [name, digest] : rec.at("outputs").items()) {
    ++total;
    const std::string p = (fs::path(dir) / name).string();
    if (fs::exists(p) && file_digest(p) == digest.get<std::string>())
      ++same;
    else
      out << "replay mismatch: " << name << '\n';
  }
  out << "replay: " << same << "/" << total << " outputs bit-identical\n";
  const bool ok = same == total && code == rec.at("exit_code").get<int>();
  return ok ? kExitOk : kExitValidation;
}

void append_manifest(const RunConfig& cfg, const std::vector<std::string>& args,
                     const Context& ctx, int code, double wall) {
  OJ j;
  j["tool"] = "mfgs";
  j["versions"] = {{"mfgs", kVersion},
                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                 std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                 std::to_string(EIGEN_MINOR_VERSION)},
                   {"compiler", __VERSION__}};
  j["command"] = cfg.command;
  j["argv"] = args;
  j["threads"] = worker_threads();
  OJ inputs;
  inputs["model"] = cfg.model;
  inputs["model_digest"] = fs::exists(cfg.model) ? OJ(file_digest(cfg.model)) : OJ(nullptr);
  j["inputs"] = inputs;
  j["seed"] = cfg.seed;
  j["exit_code"] = code;
  j["wall_time_s"] = wall;
  OJ outputs = OJ::object();
  for (const auto& f : ctx.files()) outputs[f] = file_digest(ctx.path(f));
  j["outputs"] = outputs;
  j["summary"] = ctx.summary;
  std::ofstream f(ctx.path("manifest.jsonl"), std::ios::app | std::ios::binary);
  f << j.dump() << '\n';
}

}  // namespace

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Mean-field quantum spin ground states: lumped spectra, Hamilton-Jacobi limits "
               "and path-integral sampling",
               "mfgs"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1, 1);

  auto model_opt = [&](CLI::App* s) { s->add_option("--model", cfg.model, "model file (JSON)")->required(); };
  auto out_opts = [&](CLI::App* s) {
    s->add_option("--out", cfg.out, "output directory")->capture_default_str();
    s->add_option("--format", cfg.format, "table format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
  };
  auto n_opt = [&](CLI::App* s, bool req) {
    auto* o = s->add_option("--N", cfg.Ns, "number of spins (comma-separated list)")->delimiter(',');
    if (req) o->required();
  };
  auto band_opt = [&](CLI::App* s) {
    s->add_option("--band", cfg.band, "relative band for the global-minimum set")
        ->capture_default_str();
  };
  auto samples_opt = [&](CLI::App* s) {
    s->add_option("--samples", cfg.samples, "profile sample points")->capture_default_str();
  };

  auto* spectrum = app.add_subcommand("spectrum", "ground state of the lumped operator");
  model_opt(spectrum), n_opt(spectrum, true), out_opts(spectrum);

  auto* oracle = app.add_subcommand("oracle-check", "compare with full-space diagonalization");
  model_opt(oracle), n_opt(oracle, true), out_opts(oracle);

  auto* hj = app.add_subcommand("hj", "analytic Hamilton-Jacobi profile (two labels)");
  model_opt(hj), out_opts(hj), band_opt(hj), samples_opt(hj);

  auto* lo = app.add_subcommand("lax-oleinik", "Lax-Oleinik evolution on the simplex grid");
  model_opt(lo), out_opts(lo), band_opt(lo), samples_opt(lo);
  lo->add_option("--mesh", cfg.mesh, "grid resolution M")->capture_default_str();
  lo->add_option("--dt", cfg.dt, "time step")->capture_default_str();
  lo->add_option("--T", cfg.T, "evolution time (default 0.1)");
  lo->add_option("--stencil", cfg.stencil, "foot search radius in grid steps")->capture_default_str();

  auto* sim = app.add_subcommand("simulate", "Feynman-Kac Monte Carlo estimate");
  model_opt(sim), n_opt(sim, true), out_opts(sim);
  sim->add_option("--T", cfg.T, "time horizon (default 1)");
  sim->add_option("--paths", cfg.paths, "number of paths")->capture_default_str();
  sim->add_option("--seed", cfg.seed, "64-bit seed")->capture_default_str();
  sim->add_option("--start", cfg.start, "start counts, comma-separated")->delimiter(',');
  sim->add_option("--end", cfg.end, "target counts; omit for the unconstrained expectation")
      ->delimiter(',');

  auto* sweep = app.add_subcommand("sweep-lambda", "minima and shocks across transverse fields");
  model_opt(sweep), out_opts(sweep), band_opt(sweep);
  sweep->add_option("--lambda", cfg.lambda, "range A:B[:STEP], STEP defaults to 0.01")->required();

  auto* val = app.add_subcommand("validate", "check a model file");
  model_opt(val), out_opts(val);

  auto* replay = app.add_subcommand("replay", "re-run a manifest entry and compare outputs");
  replay->add_option("--manifest", cfg.manifest, "manifest.jsonl path")->required();
  replay->add_option("--entry", cfg.entry, "1-based entry; 0 or negative counts from the end");
  replay->add_option("--out", cfg.out, "output directory (default: replay/ next to the manifest)");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }
  cfg.command = app.get_subcommands().front()->get_name();

  if (cfg.command == "replay") {
    try {
      return cmd_replay(cfg, out, err);
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return kExitValidation;
    }
  }

  std::optional<Context> ctx;
  int code = kExitOk;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    ctx.emplace(cfg, out);
    check_config(cfg);
    if (cfg.command == "validate") code = cmd_validate(cfg, *ctx);
    else if (cfg.command == "spectrum") code = cmd_spectrum(cfg, *ctx);
    else if (cfg.command == "oracle-check") code = cmd_oracle_check(cfg, *ctx);
    else if (cfg.command == "hj") code = cmd_hj(cfg, *ctx);
    else if (cfg.command == "lax-oleinik") code = cmd_lax_oleinik(cfg, *ctx);
    else if (cfg.command == "simulate") code = cmd_simulate(cfg, *ctx);
    else code = cmd_sweep(cfg, *ctx);
  } catch (const UsageError& e) {
    err << e.what() << '\n';
    code = kExitUsage;
  } catch (const ConvergenceError& e) {
    err << "non-convergence: " << e.what() << " (residual " << e.residual << ")\n";
    code = kExitNonConvergence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    code = kExitValidation;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (ctx) append_manifest(cfg, args, *ctx, code, wall);
  return code;
}

}  // namespace mfgs::cli
