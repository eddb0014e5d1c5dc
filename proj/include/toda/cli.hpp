#pragma once

#include <openssl/evp.h>
#include <unistd.h>

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "toda/bigcell.hpp"
#include "toda/expr.hpp"
#include "toda/serialize.hpp"
#include "toda/solve.hpp"
#include "toda/verify.hpp"

namespace toda::cli {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kOutDirEnv = "TODA_FORGE_OUT_DIR";

enum ExitCode : int { kOk = 0, kVerifyFailed = 1, kUsage = 2, kDomain = 3 };

/// A usage problem detected after option parsing (bad type, rank, bound).
struct UsageError : Error {
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Formatting

/// 17 significant digits: lossless for doubles.
inline std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) throw Error("SHA-256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

/// ISO-8601 UTC; SOURCE_DATE_EPOCH pins it for reproducible manifests.
inline std::string timestamp_now() {
  std::time_t t = std::time(nullptr);
  if (const char* sde = std::getenv("SOURCE_DATE_EPOCH")) t = static_cast<std::time_t>(std::strtoll(sde, nullptr, 10));
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ---------------------------------------------------------------------------
// Artifacts

/// Relative paths land under $TODA_FORGE_OUT_DIR when it is set.
inline std::filesystem::path resolve_output(const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_relative())
    if (const char* dir = std::getenv(kOutDirEnv); dir && *dir) p = std::filesystem::path(dir) / p;
  return p;
}

/// Write-temp-then-rename in the target directory.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(static_cast<long>(::getpid()));
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open " + tmp.string() + " for writing");
    f << content;
    f.flush();
    if (!f) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

/// Files written by one command plus the manifest describing them.
class RunRecord {
 public:
  explicit RunRecord(std::string command) : command_(std::move(command)) {}

  void param(const std::string& k, const std::string& v) { params_[k] = v; }
  void param(const std::string& k, double v) { params_[k] = fmt_double(v); }
  void param(const std::string& k, int v) { params_[k] = std::to_string(v); }
  void version(const std::string& k, const Json& v) { versions_[k] = v; }

  std::string write(const std::string& path, const std::string& content) {
    auto p = resolve_output(path);
    write_atomic(p, content);
    outputs_.push_back({p.string(), sha256_hex(content), content.size()});
    return p.string();
  }

  Json manifest() const {
    Json j;
    j["schema"] = kSchema;
    j["command"] = command_;
    Json params = Json::object();
    for (const auto& [k, v] : params_) params[k] = v;
    j["parameters"] = std::move(params);
    Json vers = Json::object();
    vers["tool"] = kToolVersion;
    for (const auto& [k, v] : versions_) vers[k] = v;
    j["versions"] = std::move(vers);
    j["timestamp"] = timestamp_now();
    Json outs = Json::array();
    for (const auto& o : outputs_) outs.push_back({{"path", o.path}, {"sha256", o.digest}, {"bytes", o.bytes}});
    j["outputs"] = std::move(outs);
    return j;
  }

  /// One manifest per primary output: FILE.manifest.json next to it.
  void write_manifests() const {
    if (outputs_.empty()) return;
    std::string m = manifest().dump(2) + "\n";
    for (const auto& o : outputs_) write_atomic(o.path + ".manifest.json", m);
  }

 private:
  struct Output {
    std::string path, digest;
    std::size_t bytes;
  };
  std::string command_;
  std::map<std::string, std::string> params_;
  std::map<std::string, Json> versions_;
  std::vector<Output> outputs_;
};

// ---------------------------------------------------------------------------
// Validation

/// dim g from the classification, without building the root system.
inline long algebra_dimension(CartanType t, long l) {
  switch (t) {
    case CartanType::A: return l * (l + 2);
    case CartanType::B:
    case CartanType::C: return l * (2 * l + 1);
    case CartanType::D: return l * (2 * l - 1);
    case CartanType::E: return l == 6 ? 78 : l == 7 ? 133 : 248;
    case CartanType::F: return 52;
    case CartanType::G: return 14;
  }
  return 0;
}

inline CartanType checked_type(const std::string& type, int rank, long max_dim) {
  CartanType t;
  try {
    t = parse_cartan_type(type);
  } catch (const InvalidCartanType& e) {
    throw UsageError(e.what());
  }
  if (!valid_cartan(t, rank))
    throw UsageError("no simple Lie algebra of type " + type + " and rank " + std::to_string(rank));
  if (algebra_dimension(t, rank) > max_dim)
    throw UsageError("dim g = " + std::to_string(algebra_dimension(t, rank)) + " exceeds the bound " +
                     std::to_string(max_dim) + " (raise with --max-dim)");
  return t;
}

inline void require_type_a(CartanType t, const std::string& what) {
  if (t != CartanType::A) throw UsageError(what + " is implemented for type A only");
}

inline void algebra_versions(RunRecord& rec, const LieData& lie) {
  rec.version("sign_variant", lie.alg->sign_variant());
  rec.version("slice_rule", slice_rule_name(lie.slice.rule));
  rec.version("truncation", lie.slice.exponents.back() + 4);
  rec.version("repeated_exponents", lie.slice.repeated_exponents);
}

inline void emit(RunRecord& rec, const std::string& out_path, const std::string& content, std::ostream& out) {
  if (out_path.empty())
    out << content;
  else
    rec.write(out_path, content);
}

// ---------------------------------------------------------------------------
// Commands

struct CommonOpts {
  std::string type = "A";
  int rank = 2;
  long max_dim = 100;
  std::string out;
};

inline void add_common(CLI::App* sc, CommonOpts& o, bool type_required) {
  // Numeric commands default to A2; algebraic ones must name the algebra.
  auto* t = sc->add_option("--type", o.type, "Cartan type A..G");
  auto* r = sc->add_option("--rank", o.rank, "rank");
  if (type_required) {
    t->required();
    r->required();
  } else {
    t->capture_default_str();
    r->capture_default_str();
  }
  sc->add_option("--max-dim", o.max_dim, "upper bound on dim g")->capture_default_str();
  sc->add_option("--out", o.out, "output file (stdout when omitted)");
}

struct IntegralsOpts {
  CommonOpts c;
  bool json = false, text = false;
  std::string dump_algebra;
  std::string slice_rule = "root-vector-greedy";
};

inline int cmd_integrals(const IntegralsOpts& o, std::ostream& out) {
  CartanType t = checked_type(o.c.type, o.c.rank, o.c.max_dim);
  SliceRule rule = o.slice_rule == "lowest-weight" ? SliceRule::LowestWeight : SliceRule::RootVectorGreedy;
  LieData lie = make_lie_data(t, o.c.rank, rule);
  GaugeResult res = ds_gauge(lie);
  RunRecord rec("integrals");
  rec.param("type", o.c.type);
  rec.param("rank", o.c.rank);
  rec.param("format", o.json ? "json" : "text");
  rec.param("slice_rule", o.slice_rule);
  algebra_versions(rec, lie);
  std::string body = o.json ? integrals_json(lie, res).dump(2) + "\n" : integrals_text(res);
  emit(rec, o.c.out, body, out);
  if (!o.dump_algebra.empty()) rec.write(o.dump_algebra, algebra_document(lie).dump(2) + "\n");
  rec.write_manifests();
  return kOk;
}

struct AlgebraOpts {
  CommonOpts c;
};

inline int cmd_algebra(const AlgebraOpts& o, std::ostream& out) {
  CartanType t = checked_type(o.c.type, o.c.rank, o.c.max_dim);
  LieData lie = make_lie_data(t, o.c.rank);
  RunRecord rec("algebra");
  rec.param("type", o.c.type);
  rec.param("rank", o.c.rank);
  algebra_versions(rec, lie);
  emit(rec, o.c.out, algebra_document(lie).dump(2) + "\n", out);
  rec.write_manifests();
  return kOk;
}

struct VerifyOpts {
  CommonOpts c;
  std::string suite = "all";
  std::string fault;
};

inline int cmd_verify(const VerifyOpts& o, std::ostream& out) {
  CartanType t = checked_type(o.c.type, o.c.rank, o.c.max_dim);
  VerifyReport rep = run_verify(o.suite, t, o.c.rank, o.fault);
  RunRecord rec("verify");
  rec.param("type", o.c.type);
  rec.param("rank", o.c.rank);
  rec.param("suite", o.suite);
  if (!o.fault.empty()) rec.param("inject_fault", o.fault);
  rec.version("truncation", "m_top+4");
  emit(rec, o.c.out, report_json(rep).dump(2) + "\n", out);
  rec.write_manifests();
  return rep.pass() ? kOk : kVerifyFailed;
}

struct VectorFieldsOpts {
  CommonOpts c;
  bool json = false, text = false;
  int order = 1;
};

inline int cmd_vector_fields(const VectorFieldsOpts& o, std::ostream& out) {
  CartanType t = checked_type(o.c.type, o.c.rank, o.c.max_dim);
  require_type_a(t, "vector-fields");
  BigCell bc = make_bigcell(o.c.rank);
  PhiMap phi(bc);
  std::vector<PolyField> er;
  for (int j = 0; j < bc.rank; ++j) er.push_back(right_field(bc, j));
  const auto& names = bc.symbols;
  std::string body;
  if (o.json) {
    Json j;
    j["schema"] = kSchema;
    j["command"] = "vector-fields";
    j["type"] = "A";
    j["rank"] = bc.rank;
    Json coords = Json::array();
    auto hts = bc.heights();
    for (int c = 0; c < bc.num_coords(); ++c)
      coords.push_back({{"symbol", names[c]}, {"row", bc.entry[c].first + 1}, {"col", bc.entry[c].second + 1}, {"height", hts[c]}});
    j["coordinates"] = std::move(coords);
    auto field_json = [&](const PolyField& f) {
      Json m = Json::object();
      for (int c = 0; c < bc.num_coords(); ++c) m[names[c]] = f.get(c).to_text(names);
      return m;
    };
    j["Le"] = field_json(phi.le());
    Json ej = Json::array();
    for (const auto& f : er) ej.push_back(field_json(f));
    j["eR"] = std::move(ej);
    Json vj = Json::array();
    for (int i = 0; i < bc.rank; ++i)
      for (int n = 0; n <= o.order; ++n) vj.push_back({{"i", i + 1}, {"order", n}, {"poly", phi.v(i, n).to_text(names)}});
    j["v"] = std::move(vj);
    body = j.dump(2) + "\n";
  } else {
    std::ostringstream s;
    s << "Le = " << field_text(phi.le(), names) << "\n";
    for (int j = 0; j < bc.rank; ++j) s << "eR" << j + 1 << " = " << field_text(er[j], names) << "\n";
    for (int i = 0; i < bc.rank; ++i)
      for (int n = 0; n <= o.order; ++n) {
        s << "v" << i + 1;
        if (n > 0) s << "^(" << n << ")";
        s << " = " << phi.v(i, n).to_text(names) << "\n";
      }
    body = s.str();
  }
  RunRecord rec("vector-fields");
  rec.param("type", o.c.type);
  rec.param("rank", o.c.rank);
  rec.param("order", o.order);
  rec.param("format", o.json ? "json" : "text");
  emit(rec, o.c.out, body, out);
  rec.write_manifests();
  return kOk;
}

struct SolveOpts {
  CommonOpts c;
  std::string phi, psi;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1, h = 1e-3;
  int grid = 101;
  bool refine = false;
};

inline CurveSpec parse_curve(const std::string& text, char var, int rank, double t0, double t1) {
  CurveSpec s;
  s.rank = rank;
  s.side = var == 'x' ? CurveSide::X : CurveSide::Y;
  s.funcs = parse_polynomials(text, var);
  if (static_cast<int>(s.funcs.size()) != rank)
    throw UsageError(std::string(var == 'x' ? "--psi" : "--phi") + " needs " + std::to_string(rank) +
                     " comma-separated components");
  s.t0 = t0;
  s.t1 = t1;
  s.initial = RealMatrix::identity(rank + 1);
  return s;
}

inline std::string solution_csv(const SolutionGrid& g) {
  std::ostringstream s;
  s << "x,y";
  for (const char* col : {"xi", "u", "res"})
    for (int i = 1; i <= g.rank; ++i) s << ',' << col << '_' << i;
  s << '\n';
  for (std::size_t a = 0; a < g.xs.size(); ++a)
    for (std::size_t b = 0; b < g.ys.size(); ++b) {
      const std::size_t k = g.node(a, b);
      s << fmt_double(g.xs[a]) << ',' << fmt_double(g.ys[b]);
      for (double v : g.xi[k]) s << ',' << fmt_double(v);
      for (double v : g.u[k]) s << ',' << fmt_double(v);
      for (double v : g.residual[k]) {
        s << ',';
        if (!std::isnan(v)) s << fmt_double(v);
      }
      s << '\n';
    }
  return s.str();
}

inline int cmd_solve(const SolveOpts& o, std::ostream& out, std::ostream& err) {
  CartanType t = checked_type(o.c.type, o.c.rank, o.c.max_dim);
  require_type_a(t, "solve");
  if (!(o.h > 0)) throw UsageError("--h must be positive");
  if (o.grid < 3) throw UsageError("--grid must be at least 3");
  if (!(o.x1 > o.x0) || !(o.y1 > o.y0)) throw UsageError("need x0 < x1 and y0 < y1");
  CurveSpec psi, phi;
  try {
    psi = parse_curve(o.psi, 'x', o.c.rank, o.x0, o.x1);
    phi = parse_curve(o.phi, 'y', o.c.rank, o.y0, o.y1);
  } catch (const ParseError& e) {
    throw UsageError(e.what());
  }
  check_nonvanishing(psi);
  check_nonvanishing(phi);
  auto run = [&](int n) {
    SolutionGrid g = toda_solution(psi, phi, linspace(o.x0, o.x1, n), linspace(o.y0, o.y1, n), o.h);
    ResidualSummary r = pde_residual(g);
    return std::make_pair(std::move(g), r);
  };
  auto [grid, res] = run(o.grid);
  std::ostringstream summary;
  summary << "residual max " << fmt_double(res.max) << " mean " << fmt_double(res.mean) << " nodes " << res.nodes << "\n";
  if (o.refine) {
    auto fine = run(2 * o.grid - 1).second;
    summary << "refined residual max " << fmt_double(fine.max) << " mean " << fmt_double(fine.mean) << "\n";
    summary << "convergence ratio " << fmt_double(res.max / fine.max) << "\n";
  }
  RunRecord rec("solve");
  rec.param("type", o.c.type);
  rec.param("rank", o.c.rank);
  rec.param("phi", o.phi);
  rec.param("psi", o.psi);
  rec.param("x0", o.x0);
  rec.param("x1", o.x1);
  rec.param("y0", o.y0);
  rec.param("y1", o.y1);
  rec.param("h", o.h);
  rec.param("grid", o.grid);
  rec.param("refine", o.refine ? "true" : "false");
  rec.version("integrator", "rk4-fixed-step");
  emit(rec, o.c.out, solution_csv(grid), out);
  rec.write_manifests();
  // Keep stdout clean for the CSV when it goes there.
  (o.c.out.empty() ? err : out) << summary.str();
  return kOk;
}

struct InvarianceOpts {
  CommonOpts c;
  int samples = 24;
  double t = 0.1, h = 1e-3;
  std::string method = "analytic";
  std::uint64_t seed = 20240611;
};

inline Json invariance_json(const InvarianceReport& r, int rank, double t, std::uint64_t seed) {
  Json j;
  j["schema"] = kSchema;
  j["command"] = "invariance";
  j["type"] = "A";
  j["rank"] = rank;
  j["method"] = method_name(r.method);
  j["step"] = r.step;
  j["t"] = t;
  j["seed"] = seed;
  j["group_elements_sampled"] = r.group_elements_sampled;
  j["skipped"] = r.skipped;
  j["max_deviation"] = r.max_deviation;
  Json per = Json::array();
  for (const auto& s : r.per_element)
    per.push_back({{"basis_index", s.basis_index}, {"parameter", s.parameter}, {"deviation", s.deviation}, {"skipped", s.skipped}});
  j["per_element"] = std::move(per);
  return j;
}

inline int cmd_invariance(const InvarianceOpts& o, std::ostream& out) {
  CartanType t = checked_type(o.c.type, o.c.rank, o.c.max_dim);
  require_type_a(t, "invariance");
  if (o.samples < 1) throw UsageError("--samples must be positive");
  if (!(o.h > 0)) throw UsageError("--h must be positive");
  ProlongationMethod m =
      o.method == "curve-differentiation" ? ProlongationMethod::CurveDifferentiation : ProlongationMethod::Analytic;
  InvarianceReport rep = invariance_check(default_invariance_setup(o.c.rank, o.seed), o.samples, o.t, o.h, m);
  RunRecord rec("invariance");
  rec.param("type", o.c.type);
  rec.param("rank", o.c.rank);
  rec.param("samples", o.samples);
  rec.param("t", o.t);
  rec.param("h", o.h);
  rec.param("method", o.method);
  rec.param("seed", std::to_string(o.seed));
  rec.version("integrator", "rk4-fixed-step");
  emit(rec, o.c.out, invariance_json(rep, o.c.rank, o.t, o.seed).dump(2) + "\n", out);
  rec.write_manifests();
  return kOk;
}

// ---------------------------------------------------------------------------
// Entry point

/// Parses argv and runs one subcommand. Exit codes: 0 success, 1 failed
/// verification, 2 usage error, 3 domain or runtime error.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Toda field theory toolkit: characteristic integrals, big-cell identities and explicit solutions",
               "toda-forge"};
  // Long-only help: "--h" is the ODE step.
  app.set_help_flag("--help", "print help and exit");
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  IntegralsOpts io;
  auto* si = app.add_subcommand("integrals", "characteristic integrals from the gauge normal form");
  add_common(si, io.c, true);
  auto* fj = si->add_flag("--json", io.json, "JSON output");
  si->add_flag("--text", io.text, "text output (default)")->excludes(fj);
  si->add_option("--dump-algebra", io.dump_algebra, "also write the algebra and slice as JSON to this file");
  si->add_option("--slice-rule", io.slice_rule, "slice complement rule")
      ->check(CLI::IsMember({"root-vector-greedy", "lowest-weight"}))
      ->capture_default_str();

  AlgebraOpts ao;
  auto* sa = app.add_subcommand("algebra", "Chevalley basis, brackets and Kostant slice as JSON");
  add_common(sa, ao.c, true);

  VerifyOpts vo;
  auto* sv = app.add_subcommand("verify", "run identity suites, emit a JSON report");
  add_common(sv, vo.c, true);
  sv->add_option("--suite", vo.suite, "integrals|bigcell|brackets|character|all")
      ->check(CLI::IsMember(verify_suites()))
      ->capture_default_str();
  sv->add_option("--inject-fault", vo.fault, "negative control")->check(CLI::IsMember({"structure-constant"}));

  VectorFieldsOpts fo;
  auto* sf = app.add_subcommand("vector-fields", "Le, right fields and v_i^(n) on the type-A big cell");
  add_common(sf, fo.c, false);
  auto* ffj = sf->add_flag("--json", fo.json, "JSON output");
  sf->add_flag("--text", fo.text, "text output (default)")->excludes(ffj);
  sf->add_option("--order", fo.order, "highest n for v_i^(n)")->check(CLI::Range(0, 12))->capture_default_str();

  SolveOpts so;
  auto* ss = app.add_subcommand("solve", "explicit solution from two integral curves, sampled on a grid");
  add_common(ss, so.c, false);
  ss->add_option("--phi", so.phi, "y-side components, comma separated")->required();
  ss->add_option("--psi", so.psi, "x-side components, comma separated")->required();
  ss->add_option("--x0", so.x0)->capture_default_str();
  ss->add_option("--x1", so.x1)->capture_default_str();
  ss->add_option("--y0", so.y0)->capture_default_str();
  ss->add_option("--y1", so.y1)->capture_default_str();
  ss->add_option("--h", so.h, "ODE step")->capture_default_str();
  ss->add_option("--grid", so.grid, "points per axis")->capture_default_str();
  ss->add_flag("--refine", so.refine, "rerun on the halved grid and report the residual ratio");

  InvarianceOpts vi;
  auto* sn = app.add_subcommand("invariance", "group invariance of the jet invariants");
  add_common(sn, vi.c, false);
  sn->add_option("--samples", vi.samples)->capture_default_str();
  sn->add_option("--t", vi.t, "group parameter scale")->capture_default_str();
  sn->add_option("--h", vi.h, "ODE step")->capture_default_str();
  sn->add_option("--method", vi.method)
      ->check(CLI::IsMember({"analytic", "curve-differentiation"}))
      ->capture_default_str();
  sn->add_option("--seed", vi.seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (si->parsed()) return cmd_integrals(io, out);
    if (sa->parsed()) return cmd_algebra(ao, out);
    if (sv->parsed()) return cmd_verify(vo, out);
    if (sf->parsed()) return cmd_vector_fields(fo, out);
    if (ss->parsed()) return cmd_solve(so, out, err);
    if (sn->parsed()) return cmd_invariance(vi, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << "\n";
    return kDomain;
  } catch (const NotInBigCell& e) {
    err << "domain error: " << e.what() << "\n";
    return kDomain;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kDomain;
  }
  return kUsage;
}

}  // namespace toda::cli
