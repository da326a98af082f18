// conefract command-line front end: reduce, check, gen, bounds, analyze-infeasibility.

#include "conefract/fra.hpp"
#include "conefract/instances.hpp"
#include "conefract/intersect.hpp"
#include "conefract/io.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <sstream>

namespace fs = std::filesystem;
using namespace conefract;

namespace {

enum Exit { kOk = 0, kInput = 1, kInfeasible = 2, kNumeric = 3 };

struct NumericFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::vector<Index> parse_list(const std::string& s, const std::string& field) {
  std::vector<Index> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    try {
      std::size_t pos = 0;
      long v = std::stol(tok, &pos);
      if (pos != tok.size() || v < 1) throw std::invalid_argument(tok);
      out.push_back(Index(v));
    } catch (const std::exception&) {
      throw InputError(field, "expected a comma-separated list of positive integers, got '" + s + "'");
    }
  }
  return out;
}

void write_json(const fs::path& p, const Json& j) { write_text_file(p.string(), dump_json(j) + "\n"); }

bool infeasible(CertStatus s) { return s == CertStatus::InfeasibleStrong || s == CertStatus::InfeasibleWeak; }

std::string bounds_text(const BoundsReport& b) {
  std::ostringstream os;
  os << "bounds row: " << b.row << "\n";
  for (const BlockBound& bb : b.blocks)
    os << "  block " << to_string(bb.block) << ": chain " << bb.chain << ", distP " << bb.dist_poly << "\n";
  if (b.row == "dnn") os << "  dnn side n = " << b.dnn_side << "\n";
  os << "classic FRA bound: " << b.classic << "\n";
  os << "FRA-Poly bound: " << b.poly << "\n";
  if (b.steps) os << "steps taken: " << *b.steps << (b.within_poly() ? " (within FRA-Poly bound)" : " (EXCEEDS FRA-Poly bound)") << "\n";
  return os.str();
}

// ---- reduce ---------------------------------------------------------------

struct ReduceArgs {
  std::string input, mode = "poly", finder = "hsd", out = ".";
  double tol = -1;
};

std::unique_ptr<Finder> make_finder(const std::string& spec, Index n) {
  if (spec == "hsd") return std::make_unique<NumericFinder>();
  if (spec == "exact") return std::make_unique<ExactFinder>();
  if (spec.rfind("oracle:", 0) == 0) {
    const std::string path = spec.substr(7);
    if (path.empty()) throw InputError("--finder", "oracle needs a script file: oracle:FILE");
    return std::make_unique<OracleFinder>(oracle_script_from_json(read_json_file(path), n));
  }
  throw InputError("--finder", "expected hsd, exact or oracle:FILE, got '" + spec + "'");
}

Json embedding_json(const ReducedProblem& R) {
  Json e;
  e["face"] = face_to_json(R.emb.face);
  e["ambient_cone"] = cone_to_json(R.emb.face.cone);
  e["phi"] = matrix_to_json(R.emb.phi);
  e["y0"] = vector_to_json(R.y0);
  e["N"] = matrix_to_json(R.N);
  e["maps"] = "x = phi x_red, y = y0 + N y_red";
  return e;
}

int cmd_reduce(const ReduceArgs& a) {
  ConicLP prob = problem_from_json(read_json_file(a.input));
  if (a.mode != "poly" && a.mode != "classic") throw InputError("--mode", "expected poly or classic");
  const bool dup = prob.intersection.has_value();
  std::optional<DupMapping> m;
  if (dup) m = duplicate(prob);
  const ConicLP& work = dup ? m->dup : prob;

  std::unique_ptr<Finder> finder = make_finder(a.finder, work.cols());
  FraOptions opt;
  opt.tol = a.tol > 0 ? a.tol : (finder->exact() ? 1e-9 : 1e-6);

  fs::create_directories(a.out);
  std::ostringstream rep;
  rep << "input: " << a.input << "\n";
  rep << "mode: " << a.mode << ", finder: " << finder->name() << ", tol: " << fmt(opt.tol) << "\n";
  if (dup) rep << "intersection: duplicated onto " << work.cols() << " variables\n";

  FraRun run;
  try {
    run = a.mode == "poly" ? fra_poly(work, *finder, opt) : generic_fra(work, *finder, opt);
  } catch (const FraError& e) {
    rep << "numeric failure: " << e.what() << "\n";
    rep << "partial run: " << e.partial.cert.steps() << " direction(s)\n";
    write_text_file((fs::path(a.out) / "report.txt").string(), rep.str());
    write_json(fs::path(a.out) / "cert.json", cert_to_json(e.partial.cert));
    throw NumericFailure(e.what());
  } catch (const FinderError& e) {
    rep << "numeric failure: " << e.what() << "\n";
    write_text_file((fs::path(a.out) / "report.txt").string(), rep.str());
    throw NumericFailure(e.what());
  }
  const ReductionCertificate& cert = run.cert;
  write_json(fs::path(a.out) / "cert.json", cert_to_json(cert));

  double vtol = opt.tol;
  VerifyReport vr = verify_certificate(work, cert, vtol);
  std::optional<VerifyReport> pair_vr;
  if (dup) pair_vr = verify_intersection_certificate(prob, recombine(*m, cert), vtol);

  rep << "status: " << to_string(cert.status) << "\n";
  if (auto cls = classify(cert)) rep << "classification: " << to_string(*cls) << "\n";
  rep << "certificate mode: " << to_string(cert.mode) << "\n";
  rep << "steps: " << cert.steps();
  if (cert.mode != CertMode::Classic)
    rep << " (phase 1: " << cert.phase1_steps << ", phase 2: " << cert.steps() - cert.phase1_steps << ")";
  rep << "\n";
  for (std::size_t i = 0; i < run.log.size(); ++i) {
    const StepLog& l = run.log[i];
    rep << "  " << l.phase << " solve " << i + 1 << ": " << to_string(l.kind) << ", t = " << fmt(l.t) << ", <c,x> = " << fmt(l.cx)
        << ", face dim " << l.dim_before << " -> " << l.dim_after << (l.retried ? " (retried)" : "") << "\n";
  }
  rep << "face dimension: " << face_dimension(cert.faces.front()) << " -> " << face_dimension(cert.terminal()) << "\n";
  rep << bounds_text(bounds_report(prob, cert.steps()));
  rep << "verify: " << (vr.ok ? "ok" : "FAILED: " + vr.message) << ", terminal margin " << fmt(vr.terminal_margin) << "\n";
  if (pair_vr) rep << "verify (original problem, face pairs): " << (pair_vr->ok ? "ok" : "FAILED: " + pair_vr->message) << "\n";

  int code = kOk;
  if (!vr.ok || (pair_vr && !pair_vr->ok)) {
    code = kNumeric;
  } else if (infeasible(cert.status)) {
    code = kInfeasible;
    rep << "infeasibility certified by the last direction\n";
  } else {
    ReducedProblem R = reduce_problem(work, FaceEmbedding::of(cert.terminal()), std::max(opt.tol, 1e-9));
    if (R.infeasibility) {
      code = kNumeric;
      rep << "reduced view inconsistent at this tolerance\n";
    } else {
      Json j = problem_to_json(R.red);
      j["embedding"] = embedding_json(R);
      write_json(fs::path(a.out) / "reduced.json", j);
      rep << "reduced problem: " << R.red.rows() << " x " << R.red.cols() << " over " << R.red.cone.size() << " block(s)\n";
    }
  }
  write_text_file((fs::path(a.out) / "report.txt").string(), rep.str());
  std::cout << rep.str();
  return code;
}

// ---- check ----------------------------------------------------------------

int cmd_check(const std::string& input, const std::string& cert_path, double tol) {
  ConicLP prob = problem_from_json(read_json_file(input));
  std::optional<DupMapping> m;
  if (prob.intersection) m = duplicate(prob);
  const ConicLP& work = m ? m->dup : prob;
  ReductionCertificate cert = cert_from_json(read_json_file(cert_path), work.cone);
  VerifyReport vr = verify_certificate(work, cert, tol);
  for (const std::string& l : vr.log) std::cout << l << "\n";
  bool ok = vr.ok;
  if (!vr.ok) std::cout << "FAILED at step " << vr.failing_step << ": " << vr.message << "\n";
  if (ok && m) {
    VerifyReport pr = verify_intersection_certificate(prob, recombine(*m, cert), tol);
    if (!pr.ok) std::cout << "FAILED on the original problem: " << pr.message << "\n";
    ok = pr.ok;
  }
  std::cout << (ok ? "certificate ok" : "certificate rejected") << "\n";
  return ok ? kOk : kInput;
}

// ---- gen ------------------------------------------------------------------

void write_instance(const Instance& I, const std::string& out) {
  fs::create_directories(out);
  write_json(fs::path(out) / "problem.json", problem_to_json(I.prob));
  write_json(fs::path(out) / "meta.json", I.metadata());
  for (std::size_t k = 0; k < I.scripts.size(); ++k) {
    const std::string name = I.scripts.size() == 1 ? "script.json" : "script" + std::to_string(k) + ".json";
    write_json(fs::path(out) / name, oracle_script_to_json(I.scripts[k]));
  }
  std::cout << "wrote " << I.kind << " instance to " << out << "\n";
}

// ---- analyze-infeasibility --------------------------------------------------

int cmd_analyze(const std::string& input, const std::string& out) {
  ConicLP prob = problem_from_json(read_json_file(input));
  if (prob.intersection) throw InputError("intersection", "not supported by analyze-infeasibility");
  WeakInfeasibilityReport r = analyze_not_strongly_infeasible(prob);
  fs::create_directories(out);
  std::ostringstream rep;
  Json j;
  j["strongly_infeasible"] = r.strongly_infeasible;
  if (r.strongly_infeasible) {
    j["certificate"] = vector_to_json(*r.certificate);
    rep << "strongly infeasible: d in K* cap ker A with <c,d> = " << fmt(prob.c.dot(*r.certificate)) << "\n";
  } else {
    j["dim"] = r.dim;
    j["bound"] = r.bound;
    j["basis"] = matrix_to_json(r.basis.transpose());
    j["s_hat"] = vector_to_json(r.s_hat);
    j["y_hat"] = vector_to_json(r.y_hat);
    Json dirs = Json::array();
    for (const Vector& d : r.directions) dirs.push_back(vector_to_json(d));
    j["directions"] = dirs;
    j["terminal_face"] = face_to_json(r.terminal);
    rep << "not strongly infeasible\n";
    rep << "V' = s_hat + span of " << r.dim << " direction(s); bound " << r.bound
        << (r.dim <= r.bound ? " (within)" : " (EXCEEDED)") << "\n";
    rep << "s_hat in dual terminal face: " << (r.s_hat_in_dual_face ? "yes" : "no") << "\n";
    rep << "terminal face polyhedral: " << (r.terminal_polyhedral ? "yes" : "no") << "\n";
    if (r.terminal_polyhedral)
      rep << "exact check, no strict certificate on V': " << (r.no_certificate_exact ? "confirmed" : "NOT confirmed") << "\n";
    rep << "aux pair outcome on V': " << r.no_certificate_aux << "\n";
  }
  write_json(fs::path(out) / "vprime.json", j);
  write_text_file((fs::path(out) / "report.txt").string(), rep.str());
  std::cout << rep.str();
  return r.strongly_infeasible ? kInfeasible : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"conefract: facial reduction for conic linear programs"};
  app.require_subcommand(1);

  ReduceArgs ra;
  auto* reduce = app.add_subcommand("reduce", "Reduce a problem to its minimal face");
  reduce->add_option("--input", ra.input, "problem JSON")->required();
  reduce->add_option("--mode", ra.mode, "poly | classic")->check(CLI::IsMember({"poly", "classic"}));
  reduce->add_option("--finder", ra.finder, "hsd | exact | oracle:FILE");
  reduce->add_option("--tol", ra.tol, "classification tolerance (default 1e-6 hsd, 1e-9 exact/oracle)");
  reduce->add_option("--out", ra.out, "output directory");

  std::string ck_input, ck_cert;
  double ck_tol = 1e-6;
  auto* check = app.add_subcommand("check", "Verify a certificate against a problem");
  check->add_option("--input", ck_input, "problem JSON")->required();
  check->add_option("--cert", ck_cert, "certificate JSON")->required();
  check->add_option("--tol", ck_tol, "verification tolerance");

  auto* gen = app.add_subcommand("gen", "Generate instances");
  gen->require_subcommand(1);
  std::string g_out = ".", g_soc, g_psd, g_family = "mixed";
  std::uint64_t g_seed = 0;
  Index g_n = 3;
  auto* g_worst = gen->add_subcommand("worst-case", "SOC(t_1..) x PSD(n_1..) worst-case instance");
  g_worst->add_option("--soc", g_soc, "SOC dimensions, comma separated");
  g_worst->add_option("--psd", g_psd, "PSD sides, comma separated");
  g_worst->add_option("--out", g_out, "output directory");
  auto* g_example = gen->add_subcommand("example", "NonNeg(2) x PSD(2) worked example (two scripts)");
  g_example->add_option("--out", g_out, "output directory");
  auto* g_planted = gen->add_subcommand("planted", "Planted instance with known minimal face");
  g_planted->add_option("--family", g_family, "nonneg | soc | psd | mixed | orthant | dnn")
      ->check(CLI::IsMember({"nonneg", "soc", "psd", "mixed", "orthant", "dnn"}));
  g_planted->add_option("--seed", g_seed, "seed (CONEFRACT_SEED overrides)");
  g_planted->add_option("--n", g_n, "size for orthant / dnn");
  g_planted->add_option("--out", g_out, "output directory");

  std::string b_input;
  auto* bounds = app.add_subcommand("bounds", "Worst-case step bounds for the instance's cone");
  bounds->add_option("--input", b_input, "problem JSON")->required();

  std::string a_input, a_out = ".";
  auto* analyze = app.add_subcommand("analyze-infeasibility", "Weak-infeasibility subspace V'");
  analyze->add_option("--input", a_input, "problem JSON")->required();
  analyze->add_option("--out", a_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kInput;
  }

  try {
    if (*reduce) return cmd_reduce(ra);
    if (*check) return cmd_check(ck_input, ck_cert, ck_tol);
    if (*gen) {
      if (*g_worst) {
        write_instance(gen_worst_case(parse_list(g_soc, "--soc"), parse_list(g_psd, "--psd")), g_out);
      } else if (*g_example) {
        write_instance(gen_scripted_example(), g_out);
      } else {
        const std::uint64_t seed = seed_from_env(g_seed);
        if (g_family == "orthant") write_instance(gen_planted_orthant(g_n, seed), g_out);
        else if (g_family == "dnn") write_instance(gen_planted_dnn(g_n, seed), g_out);
        else write_instance(gen_planted_family(g_family, seed), g_out);
      }
      return kOk;
    }
    if (*bounds) {
      std::cout << bounds_text(bounds_report(problem_from_json(read_json_file(b_input))));
      return kOk;
    }
    if (*analyze) return cmd_analyze(a_input, a_out);
  } catch (const InputError& e) {
    std::cerr << "error: malformed input: " << e.what() << "\n";
    return kInput;
  } catch (const Json::exception& e) {
    std::cerr << "error: malformed input: " << e.what() << "\n";
    return kInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: malformed input: " << e.what() << "\n";
    return kInput;
  } catch (const NumericFailure& e) {
    std::cerr << "error: numeric failure: " << e.what() << "\n";
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: numeric failure: " << e.what() << "\n";
    return kNumeric;
  }
  return kInput;
}
