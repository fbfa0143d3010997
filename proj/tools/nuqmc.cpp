// nuqmc: point sets with certified star-discrepancy for box measures.
//
// Exit codes: 0 ok, 1 usage, 2 precondition violated, 3 budget exceeded,
// 4 internal error (a certificate check failed).

#include <openssl/evp.h>

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "nuqmc/io.hpp"
#include "nuqmc/verify.hpp"

namespace fs = std::filesystem;
using namespace nuqmc;

namespace {

std::string sha256_file(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return "";
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (f) {
    f.read(buf, sizeof(buf));
    if (f.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(f.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return out.str();
}

std::string format_value(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

std::vector<Index> parse_index_list(const std::string& text) {
  std::vector<Index> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      out.push_back(std::stoll(item));
    } catch (const std::exception&) {
      throw PreconditionError("not an integer list: '" + text + "'");
    }
  }
  detail::require(!out.empty(), "empty list");
  return out;
}

// Shared state of one invocation: options echoed into the manifest.
struct Run {
  std::string command;
  Json config = Json::object();
  std::uint64_t seed = 0;
  std::vector<fs::path> inputs;
  std::vector<fs::path> outputs;
  std::string manifest;
  int jobs = 1;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  void write_manifest() const {
    fs::path target = manifest;
    if (target.empty()) {
      if (outputs.empty()) return;
      target = outputs.front();
      target += ".manifest.json";
    }
    Json artifacts = Json::object();
    Json in = Json::object(), out = Json::object();
    for (const auto& p : inputs) in[p.string()] = sha256_file(p);
    for (const auto& p : outputs) out[p.string()] = sha256_file(p);
    artifacts["inputs"] = in;
    artifacts["outputs"] = out;
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_json(target, Json{{"command", command},
                            {"config", config},
                            {"seed", seed},
                            {"artifacts", artifacts},
                            {"wall_time_s", wall}});
  }
};

struct MeasureArg {
  std::string spec = "uniform";
  Index d = 1;
};

MeasurePtr resolve_measure(const MeasureArg& arg, Run& run) {
  if (arg.spec == "uniform") return make_uniform(arg.d);
  run.inputs.emplace_back(arg.spec);
  return load_measure(arg.spec);
}

const char* kMeasureHelp =
    "Measure: 'uniform' (with --d) or a JSON file\n"
    "  {\"type\":\"uniform\",\"dim\":d}\n"
    "  {\"type\":\"product\",\"cdfs\":[{\"type\":\"power\",\"theta\":2},{\"type\":\"piecewise\",\"knots\":[[0,0],[0.5,0.8],[1,1]]},{\"type\":\"uniform\"}]}\n"
    "  {\"type\":\"restriction\",\"boxes\":[[[lo_1,..,lo_d],[hi_1,..,hi_d]],...]}\n"
    "  {\"type\":\"discrete\",\"points\":\"atoms.csv\"}\n"
    "Coordinates are decimal numbers or decimal strings in [0,1].\n"
    "Point CSV: one point per line, d comma-separated decimals, no header unless --header.\n";

void add_construction_options(CLI::App* cmd, ConstructionConfig& cfg, std::string& engine, std::string& k_policy,
                              bool& skip_sampling) {
  cmd->add_option("--engine", engine, "Rounding engine: beck-fiala | partial")->capture_default_str();
  cmd->add_option("--k-policy", k_policy,
                  "Sample count K: scaled (K = ceil(16 N^2)), scaled:<c>, paper (K = 2^26 d N^2) or K=<int>")
      ->capture_default_str();
  cmd->add_option("--seed", cfg.seed, "Seed (unsigned 64-bit)")->capture_default_str();
  cmd->add_flag("--no-certify-sampling", skip_sampling,
                "Skip evaluating D*(z; mu); the certificate is then marked incomplete");
}

void finish_construction(ConstructionConfig& cfg, const std::string& engine, const std::string& k_policy,
                         bool skip_sampling) {
  cfg.engine = parse_engine(engine);
  cfg.k_policy = parse_k_policy(k_policy);
  cfg.certify_sampling = !skip_sampling;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nuqmc: low-discrepancy point sets for non-uniform box measures, with certified bounds"};
  app.require_subcommand(1);
  app.footer(
      "Exit codes: 0 ok, 1 usage error, 2 precondition violated, 3 budget exceeded, 4 internal error.\n"
      "NUQMC_BUDGET overrides the exact-scan step budget (default 1e8 elementary steps).\n"
      "Outputs that are written to a file get a manifest <output>.manifest.json (or --manifest).");

  Run run;
  app.add_option("--manifest", run.manifest, "Manifest JSON path (command, config, seed, SHA-256 of artifacts)");
  app.add_option("--jobs", run.jobs, "Worker threads for seeds/instances; results do not depend on it")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  bool header = false;
  app.add_flag("--header", header, "Point CSV files carry a header line");

  // gen
  auto* gen = app.add_subcommand("gen", "Construct an N-point set with a certificate bound on D*(points; mu)");
  MeasureArg gen_measure;
  ConstructionConfig gen_cfg;
  std::string gen_engine = "beck-fiala", gen_k = "scaled";
  bool gen_skip = false;
  Index gen_n = 0;
  std::string gen_out, gen_cert;
  gen->add_option("--measure", gen_measure.spec, "Target measure")->capture_default_str();
  gen->add_option("--d", gen_measure.d, "Dimension for --measure uniform")->capture_default_str();
  gen->add_option("--n", gen_n, "Number of points N")->required();
  add_construction_options(gen, gen_cfg, gen_engine, gen_k, gen_skip);
  gen->add_option("--out", gen_out, "Output point CSV")->required();
  gen->add_option("--certificate", gen_cert, "Output certificate JSON (bounds are on the discrepancy scale, in [0,1])");
  gen->footer(kMeasureHelp);

  // seq
  auto* seq = app.add_subcommand("seq", "First --count points of the infinite sequence for mu");
  MeasureArg seq_measure;
  ConstructionConfig seq_cfg;
  std::string seq_engine = "beck-fiala", seq_k = "scaled";
  bool seq_skip = false;
  Index seq_count = 0;
  std::string seq_out, seq_cert;
  seq->add_option("--measure", seq_measure.spec, "Target measure")->capture_default_str();
  seq->add_option("--d", seq_measure.d, "Dimension for --measure uniform")->capture_default_str();
  seq->add_option("--count", seq_count, "Prefix length")->required();
  add_construction_options(seq, seq_cfg, seq_engine, seq_k, seq_skip);
  seq->add_option("--out", seq_out, "Output point CSV (emission order)")->required();
  seq->add_option("--certificate", seq_cert, "Output JSON with block certificates and the prefix envelope");
  seq->footer(kMeasureHelp);

  // disc
  auto* disc = app.add_subcommand("disc", "Star discrepancy D*(points; mu)");
  MeasureArg disc_measure;
  std::string disc_points, disc_mode = "exact", disc_out;
  std::int64_t disc_trials = 100000;
  Index disc_resolution = 64;
  std::uint64_t disc_seed = 0;
  disc->add_option("--points", disc_points, "Point CSV")->required();
  disc->add_option("--measure", disc_measure.spec, "Target measure")->capture_default_str();
  disc->add_option("--d", disc_measure.d, "Dimension for --measure uniform")->capture_default_str();
  disc->add_option("--mode", disc_mode, "exact | estimate (lower bound) | upper (bracketing upper bound)")
      ->capture_default_str();
  disc->add_option("--trials", disc_trials, "Random corners for --mode estimate")->capture_default_str();
  disc->add_option("--resolution", disc_resolution, "Quantile grid per axis for --mode upper")->capture_default_str();
  disc->add_option("--seed", disc_seed, "Seed for --mode estimate")->capture_default_str();
  disc->add_option("--out", disc_out, "Report JSON {value, witness_corner, witness_closed, mode}");
  disc->footer(kMeasureHelp);

  // select
  auto* sel = app.add_subcommand("select", "Select N of the K input points with a certified discrete discrepancy");
  std::string sel_points, sel_out, sel_result, sel_engine = "beck-fiala";
  Index sel_n = 0;
  std::uint64_t sel_seed = 0;
  sel->add_option("--points", sel_points, "Input point CSV (K points, K >= N^2)")->required();
  sel->add_option("--n", sel_n, "Number of points to keep")->required();
  sel->add_option("--engine", sel_engine, "beck-fiala | partial")->capture_default_str();
  sel->add_option("--seed", sel_seed, "Seed")->capture_default_str();
  sel->add_option("--out", sel_out, "Selected points CSV");
  sel->add_option("--result", sel_result,
                  "Result JSON (indices into the input, certificate on the count scale: |#Q - (N/K)#z| per box)");

  // round
  auto* rnd = app.add_subcommand("round", "Round a fractional vector on a hypergraph, or an array over dyadic cells");
  std::string rnd_graph, rnd_beta, rnd_out, rnd_engine = "beck-fiala", rnd_array, rnd_shape, rnd_array_out;
  std::uint64_t rnd_seed = 0;
  rnd->add_option("--hypergraph", rnd_graph, "Hypergraph JSON {n, edges: [[v,...],...]} (0-based vertices)");
  rnd->add_option("--beta", rnd_beta, "JSON array of n values in [0,1]");
  rnd->add_option("--array", rnd_array, "Raw little-endian float64 array in [0,1] (row-major), rounded over dyadic cells");
  rnd->add_option("--shape", rnd_shape, "Array shape, e.g. 16,16");
  rnd->add_option("--array-out", rnd_array_out, "Rounded array output (raw float64 0/1)");
  rnd->add_option("--engine", rnd_engine, "beck-fiala | partial")->capture_default_str();
  rnd->add_option("--seed", rnd_seed, "Seed (partial engine)")->capture_default_str();
  rnd->add_option("--out", rnd_out, "Result JSON {b, achieved_error, guaranteed_bound, engine, fallback}");

  // integrate
  auto* integ = app.add_subcommand("integrate", "Estimate (1/lambda(Omega)) int_Omega g with a point set");
  std::string int_omega, int_g = "linear-sum", int_points, int_out;
  integ->add_option("--measure-omega", int_omega, "Region JSON {\"boxes\": [[[lo..],[hi..]],...]}")->required();
  integ->add_option("--g", int_g, "Integrand: const | linear-sum | product | sin-sum")->capture_default_str();
  integ->add_option("--points", int_points, "Point CSV")->required();
  integ->add_option("--out", int_out, "Report JSON");
  integ->footer(
      "const: g = 1; linear-sum: g = x_1+...+x_d; product: g = x_1*...*x_d; sin-sum: g = sum sin(pi x_s).\n"
      "The report also gives D_N^Omega (2^d times the anchored sup) for the given points.");

  // bench
  auto* bench = app.add_subcommand("bench", "Constructed sets vs i.i.d. samples on mu_Omega; CSV N,method,error,seed");
  std::string bench_omega, bench_g = "linear-sum", bench_ns = "16,32,64,128", bench_out, bench_engine = "beck-fiala",
                           bench_k = "scaled";
  Index bench_seeds = 20;
  ConstructionConfig bench_cfg;
  bool bench_skip = false;
  bench->add_option("--measure-omega", bench_omega, "Region JSON")->required();
  bench->add_option("--g", bench_g, "Integrand name")->capture_default_str();
  bench->add_option("--n-list", bench_ns, "Comma-separated N values")->capture_default_str();
  bench->add_option("--mc-seeds", bench_seeds, "Monte Carlo seeds 0..S-1 per N")->capture_default_str();
  add_construction_options(bench, bench_cfg, bench_engine, bench_k, bench_skip);
  bench->add_option("--out", bench_out, "CSV output (stdout if omitted); error is |estimate - reference|");

  // verify
  auto* ver = app.add_subcommand("verify", "Run an invariant suite and print measured vs bound");
  std::string ver_suite = "balancing";
  std::uint64_t ver_seed = 0;
  ver->add_option("--suite", ver_suite, "balancing | measures | discrepancy | dyadic | selection | all")
      ->capture_default_str();
  ver->add_option("--seed", ver_seed, "Seed")->capture_default_str();

  // inverse-size
  auto* inv = app.add_subcommand("inverse-size", "Number of points sufficient for D* <= eps");
  Index inv_d = 1;
  std::string inv_eps, inv_mode = "paper";
  MeasureArg inv_measure;
  std::uint64_t inv_seed = 0;
  inv->add_option("--d", inv_d, "Dimension")->required();
  inv->add_option("--eps", inv_eps, "Target discrepancy in (0,1], decimal")->required();
  inv->add_option("--mode", inv_mode, "paper: ceil(2^26 d / eps^2) exactly; empirical: i.i.d. doubling search (d <= 2)")
      ->capture_default_str();
  inv->add_option("--measure", inv_measure.spec, "Measure for empirical mode (default uniform in dimension --d)");
  inv->add_option("--seed", inv_seed, "Seed for empirical mode")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  for (const auto& o : app.get_options()) {
    if (o->count() > 0 && !o->get_lnames().empty() && o->get_lnames()[0] != "help") {
      run.config[o->get_lnames()[0]] = o->as<std::string>();
    }
  }
  CLI::App* active = app.get_subcommands().front();
  run.command = active->get_name();
  for (const auto& o : active->get_options()) {
    if (o->get_lnames().empty() || o->get_lnames()[0] == "help") continue;
    run.config[o->get_lnames()[0]] = o->count() > 0 ? Json(o->as<std::string>()) : Json(o->get_default_str());
  }

  try {
    if (*gen) {
      finish_construction(gen_cfg, gen_engine, gen_k, gen_skip);
      run.seed = gen_cfg.seed;
      const MeasurePtr mu = resolve_measure(gen_measure, run);
      const ConstructionResult res = construct_point_set(*mu, gen_n, gen_cfg);
      write_points_csv(gen_out, res.points, header);
      run.outputs.emplace_back(gen_out);
      if (!gen_cert.empty()) {
        Json cert = to_json(res.certificate);
        cert["k_policy"] = to_string(gen_cfg.k_policy);
        write_json(gen_cert, cert);
        run.outputs.emplace_back(gen_cert);
      }
      std::cout << "points " << res.points.size() << " K " << res.certificate.k << " bound "
                << format_value(res.certificate.bound) << " (" << res.certificate.sampling_kind << ")\n";
    } else if (*seq) {
      finish_construction(seq_cfg, seq_engine, seq_k, seq_skip);
      run.seed = seq_cfg.seed;
      SequenceState state(resolve_measure(seq_measure, run), seq_cfg);
      for (Index i = 0; i < seq_count; ++i) state.next_point();
      write_points_csv(seq_out, PointSet(state.emitted_points()), header);
      run.outputs.emplace_back(seq_out);
      if (!seq_cert.empty()) {
        Json blocks = Json::array();
        const Index last = seq_count >= 1 ? state.block_index() - (state.emitted() == block_offset(state.block_index())) : 0;
        for (Index i = 1; i <= last; ++i) {
          const auto& b = state.block(i);
          blocks.push_back({{"index", i},
                            {"size", block_size(i)},
                            {"offset", block_offset(i)},
                            {"tie_shift", b.tie_shift},
                            {"bound", b.bound},
                            {"certificate", to_json(b.certificate)}});
        }
        write_json(seq_cert, Json{{"count", seq_count}, {"envelope", state.envelope(seq_count)}, {"blocks", blocks}});
        run.outputs.emplace_back(seq_cert);
      }
      std::cout << "points " << seq_count << " envelope " << format_value(state.envelope(seq_count)) << '\n';
    } else if (*disc) {
      run.inputs.emplace_back(disc_points);
      run.seed = disc_seed;
      const PointSet ps = read_points_csv(disc_points, header);
      if (disc_measure.spec == "uniform" && disc->count("--d") == 0) disc_measure.d = ps.dim();
      const MeasurePtr mu = resolve_measure(disc_measure, run);
      DiscrepancyReport rep;
      if (disc_mode == "exact") {
        rep = exact_star_discrepancy(ps, *mu);
      } else if (disc_mode == "estimate") {
        rep = estimate_star_discrepancy(ps, *mu, disc_trials, disc_seed);
      } else if (disc_mode == "upper") {
        rep = upper_bound_star_discrepancy(ps, *mu, disc_resolution);
      } else {
        throw CLI::ValidationError("--mode", "expected exact, estimate or upper");
      }
      if (!disc_out.empty()) {
        write_json(disc_out, to_json(rep));
        run.outputs.emplace_back(disc_out);
      }
      std::cout << "value " << format_value(rep.value) << " mode " << to_string(rep.mode) << '\n';
    } else if (*sel) {
      run.inputs.emplace_back(sel_points);
      run.seed = sel_seed;
      const PointSet z = read_points_csv(sel_points, header);
      const SelectionResult res = select_subset(z, sel_n, parse_engine(sel_engine), sel_seed);
      if (!sel_out.empty()) {
        write_points_csv(sel_out, res.selected, header);
        run.outputs.emplace_back(sel_out);
      }
      if (!sel_result.empty()) {
        write_json(sel_result, to_json(res));
        run.outputs.emplace_back(sel_result);
      }
      std::cout << "selected " << res.indices.size() << " of " << z.size() << " box_bound "
                << format_value(res.certificate.measured_box_bound) << '\n';
    } else if (*rnd) {
      run.seed = rnd_seed;
      const BalancingEngine engine = parse_engine(rnd_engine);
      if (!rnd_array.empty()) {
        run.inputs.emplace_back(rnd_array);
        detail::require(!rnd_shape.empty(), "--array needs --shape");
        const GridArray beta = read_array(rnd_array, parse_index_list(rnd_shape));
        const RoundedArray r = round_array(beta, engine, rnd_seed);
        if (!rnd_array_out.empty()) {
          write_array(rnd_array_out, r.b);
          run.outputs.emplace_back(rnd_array_out);
        }
        if (!rnd_out.empty()) {
          write_json(rnd_out, to_json(r.certificate));
          run.outputs.emplace_back(rnd_out);
        }
        std::cout << "prefix_error " << format_value(r.certificate.measured_prefix_error) << " bound "
                  << format_value(r.certificate.prefix_bound) << '\n';
      } else {
        detail::require(!rnd_graph.empty() && !rnd_beta.empty(), "round needs --hypergraph and --beta, or --array");
        run.inputs.emplace_back(rnd_graph);
        run.inputs.emplace_back(rnd_beta);
        const Hypergraph h = hypergraph_from_json(read_json(rnd_graph));
        std::vector<double> beta;
        for (const auto& v : read_json(rnd_beta)) beta.push_back(parse_decimal(v));
        const RoundingResult r = round_with(engine, h, beta, rnd_seed);
        if (!rnd_out.empty()) {
          write_json(rnd_out, to_json(r));
          run.outputs.emplace_back(rnd_out);
        }
        std::cout << "achieved_error " << format_value(r.achieved_error) << " guaranteed_bound "
                  << format_value(r.guaranteed_bound) << (r.fallback ? " fallback" : "") << '\n';
      }
    } else if (*integ) {
      run.inputs.emplace_back(int_omega);
      run.inputs.emplace_back(int_points);
      const Integrand f = builtin_integrand(int_g, load_region(int_omega));
      const PointSet ps = read_points_csv(int_points, header);
      const IntegrationEstimate est = integrate(f, ps);
      const double ref = reference_integral(f);
      const double dom = omega_discrepancy(ps, f.omega);
      if (!int_out.empty()) {
        write_json(int_out, Json{{"estimate", est.value},
                                 {"reference", ref},
                                 {"abs_error", std::abs(est.value - ref)},
                                 {"outside", est.outside},
                                 {"omega_discrepancy", dom}});
        run.outputs.emplace_back(int_out);
      }
      std::cout << "estimate " << format_value(est.value) << " reference " << format_value(ref) << " error "
                << format_value(std::abs(est.value - ref)) << " omega_discrepancy " << format_value(dom) << '\n';
    } else if (*bench) {
      finish_construction(bench_cfg, bench_engine, bench_k, bench_skip);
      run.seed = bench_cfg.seed;
      run.inputs.emplace_back(bench_omega);
      const Integrand f = builtin_integrand(bench_g, load_region(bench_omega));
      const auto ns = parse_index_list(bench_ns);
      std::vector<std::uint64_t> seeds;
      for (Index s = 0; s < bench_seeds; ++s) seeds.push_back(static_cast<std::uint64_t>(s));
      std::vector<std::vector<IntegrationReport>> per_n(ns.size());
      parallel_for(static_cast<Index>(ns.size()), run.jobs, [&](Index i) {
        per_n[static_cast<std::size_t>(i)] = benchmark(f, {ns[static_cast<std::size_t>(i)]}, seeds, bench_cfg);
      });
      std::vector<IntegrationReport> rows;
      for (auto& r : per_n) rows.insert(rows.end(), r.begin(), r.end());
      const std::string csv = benchmark_csv(rows);
      if (bench_out.empty()) {
        std::cout << csv;
      } else {
        std::ofstream(bench_out, std::ios::binary) << csv;
        run.outputs.emplace_back(bench_out);
      }
    } else if (*ver) {
      run.seed = ver_seed;
      const auto names = ver_suite == "all" ? suite_names() : std::vector<std::string>{ver_suite};
      bool ok = true;
      for (const auto& name : names) {
        const SuiteReport rep = run_suite(name, ver_seed, run.jobs);
        std::cout << format_table(rep);
        ok = ok && rep.passed();
      }
      run.write_manifest();
      return ok ? 0 : 4;
    } else if (*inv) {
      run.seed = inv_seed;
      if (inv_mode == "paper") {
        std::cout << inverse_size_paper(inv_d, inv_eps) << '\n';
      } else if (inv_mode == "empirical") {
        if (inv_measure.spec.empty()) inv_measure.spec = "uniform";
        inv_measure.d = inv_d;
        const MeasurePtr mu = resolve_measure(inv_measure, run);
        detail::require(mu->dim() == inv_d, "--measure dimension does not match --d");
        const EmpiricalInverse r = inverse_size_empirical(*mu, parse_decimal(Json(inv_eps)), 50, 0.9, inv_seed);
        std::cout << r.n << '\n';
      } else {
        throw CLI::ValidationError("--mode", "expected paper or empirical");
      }
    }
    run.write_manifest();
  } catch (const CLI::Error& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << '\n';
    return 3;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition violated: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
  return 0;
}
