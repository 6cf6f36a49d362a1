#include "cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>

#include "cskit/datagen.hpp"
#include "cskit/decoders.hpp"
#include "cskit/experiment.hpp"
#include "cskit/io.hpp"
#include "cskit/metrics.hpp"
#include "cskit/sketch.hpp"

namespace cskit::cli {

namespace {

using nlohmann::json;

struct GenArgs {
  int k = 3;
  int d = 2;
  long n = 10000;
  std::uint64_t seed = 0;
  std::string spec_in;
  std::string out;
};

struct SketchArgs {
  std::string data;
  long m = 0;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  std::string out;
};

struct MergeArgs {
  std::vector<std::string> inputs;
  std::string out;
};

struct DecodeArgs {
  std::string sketch;
  std::string decoder = "proposed-meanshift";
  int k = 0;
  int T = 0;
  std::string model = "dirac";
  int restarts = 100;
  int grid_points = 101;
  std::optional<double> eta;
  std::optional<double> step;
  std::optional<double> tol;
  int max_iters = 300;
  std::uint64_t seed = 0;
  bool no_finetune = false;
  std::vector<double> box{-1.0, 1.0};
  std::string out;
};

struct EvalArgs {
  std::string result;
  std::string data;
  std::string sketch;
  int n_init = 5;
  std::uint64_t lloyd_seed = 0;
  int max_iters = 300;
};

struct SweepArgs {
  std::string config;
  std::string out;
  int threads = 0;
};

struct LloydArgs {
  std::string data;
  int k = 0;
  int n_init = 5;
  std::uint64_t seed = 0;
  int max_iters = 300;
  std::string out;
};

void write_centroids_csv(const Centroids& c, const std::string& path) {
  save_dataset(Dataset(c), path);
}

int cmd_gen(const GenArgs& a, std::ostream& out) {
  const GmmSpec spec = a.spec_in.empty() ? make_separated_spec(a.k, a.d, a.seed) : gmm_from_json(read_json(a.spec_in));
  const GeneratedData g = gen_gmm(spec, a.n, a.seed);
  save_dataset(g.data, a.out);
  save_labels(g.labels, labels_path(a.out));
  json meta = gmm_to_json(spec);
  meta["n"] = a.n;
  meta["seed"] = a.seed;
  write_json(meta, a.out + ".spec.json");
  out << "wrote " << g.data.size() << " x " << g.data.dim() << " to " << a.out << '\n';
  return kOk;
}

int cmd_sketch(const SketchArgs& a, std::ostream& out) {
  const Dataset data = load_dataset(a.data);
  if (data.empty()) throw EmptyDatasetError();
  const FrequencyMatrix freqs = sample_frequencies(data.dim(), a.m, a.sigma, a.seed);
  save_sketch(sketch_dataset(data, freqs), freqs, a.out);
  out << "wrote sketch (m=" << a.m << ", N=" << data.size() << ") to " << a.out << '\n';
  return kOk;
}

int cmd_merge(const MergeArgs& a, std::ostream& out) {
  SketchFile acc = load_sketch(a.inputs.front());
  for (std::size_t i = 1; i < a.inputs.size(); ++i) {
    const SketchFile next = load_sketch(a.inputs[i]);
    acc.sketch = merge_sketches(acc.sketch, next.sketch);
  }
  save_sketch(acc.sketch, acc.freqs, a.out);
  out << "merged " << a.inputs.size() << " sketches (N=" << acc.sketch.count << ") into " << a.out << '\n';
  return kOk;
}

int cmd_decode(const DecodeArgs& a, std::ostream& out) {
  const SketchFile sf = load_sketch(a.sketch);
  if (a.box.size() != 2) throw ConfigError("--box takes two values: LO HI");
  if (!(a.box[0] < a.box[1])) throw ConfigError("--box: LO must be below HI");
  const Box box = Box::cube(sf.freqs.d(), a.box[0], a.box[1]);

  DecoderConfig cfg;
  cfg.k = a.k;
  cfg.T = a.T;
  cfg.model = parse_model(a.model);
  cfg.seed = a.seed;
  cfg.finetune = !a.no_finetune;
  SearchConfig search = decoder_search(a.decoder, a.restarts, a.grid_points);
  if (auto* ms = std::get_if<MeanShiftSearch>(&search)) {
    ms->eta = a.eta;
    ms->tol = a.tol;
    ms->max_iters = a.max_iters;
  } else if (auto* ga = std::get_if<GradientAscentSearch>(&search)) {
    ga->step = a.step;
    ga->tol = a.tol;
    ga->max_iters = a.max_iters;
  }
  cfg.search = search;
  const DecoderResult r = run_decoder(a.decoder, sf.sketch, sf.freqs, cfg, box);
  save_result(r, a.out);
  out << "decoded " << r.components.size() << " components, residual norm " << r.residual_norm << '\n';
  return kOk;
}

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const DecoderResult r = load_result(a.result);
  json report;
  if (!a.data.empty()) {
    const Dataset data = load_dataset(a.data);
    const Centroids c = r.centers();
    report["mse"] = mse(c, data);
    LloydOptions lo;
    lo.k = static_cast<int>(c.rows());
    lo.n_init = a.n_init;
    lo.seed = a.lloyd_seed;
    lo.max_iters = a.max_iters;
    const LloydResult ref = lloyd(data, lo);
    report["lloyd_mse"] = ref.mse;
    report["rse"] = rse(c, data, ref.centroids);
  }
  if (!a.sketch.empty()) {
    const SketchFile sf = load_sketch(a.sketch);
    report["residual_norm"] = residual_update(sf.sketch.values, r.components, r.weights, sf.freqs).norm();
    report["stored_residual_norm"] = r.residual_norm;
  }
  if (report.empty()) throw ConfigError("eval needs --data and/or --sketch");
  out << report.dump(1) << '\n';
  return kOk;
}

int cmd_sweep(const SweepArgs& a, std::ostream& out) {
  const std::filesystem::path cfg_path(a.config);
  ExperimentConfig cfg = ExperimentConfig::from_json(read_json(cfg_path), cfg_path.parent_path());
  if (!a.out.empty()) cfg.output = a.out;
  const auto rows = run_sweep(cfg, a.threads);
  if (cfg.output.empty()) {
    write_sweep_csv(rows, out);
  } else {
    std::ofstream f(cfg.output);
    if (!f) throw Error("cannot open '" + cfg.output.string() + "' for writing");
    write_sweep_csv(rows, f);
    out << "wrote " << rows.size() << " rows to " << cfg.output.string() << '\n';
  }
  return kOk;
}

int cmd_lloyd(const LloydArgs& a, std::ostream& out) {
  const Dataset data = load_dataset(a.data);
  LloydOptions lo;
  lo.k = a.k;
  lo.n_init = a.n_init;
  lo.seed = a.seed;
  lo.max_iters = a.max_iters;
  const LloydResult r = lloyd(data, lo);
  if (!a.out.empty()) write_centroids_csv(r.centroids, a.out);
  out << json{{"mse", r.mse}, {"best_replica", r.best_replica}}.dump() << '\n';
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Compressive clustering toolkit"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate a separated Gaussian mixture dataset");
  g->add_option("--k", gen.k, "Number of components")->check(CLI::PositiveNumber);
  g->add_option("--d", gen.d, "Dimension")->check(CLI::PositiveNumber);
  g->add_option("--n", gen.n, "Number of points")->check(CLI::PositiveNumber);
  g->add_option("--seed", gen.seed);
  g->add_option("--spec", gen.spec_in, "Mixture spec JSON instead of a generated one")->check(CLI::ExistingFile);
  g->add_option("--out", gen.out, "Dataset path (.csv or binary)")->required();

  SketchArgs sk;
  auto* s = app.add_subcommand("sketch", "Sketch a dataset with random Fourier features");
  s->add_option("--data", sk.data)->required()->check(CLI::ExistingFile);
  s->add_option("--m", sk.m, "Sketch size")->required()->check(CLI::PositiveNumber);
  s->add_option("--sigma", sk.sigma, "Bandwidth")->required()->check(CLI::PositiveNumber);
  s->add_option("--seed", sk.seed);
  s->add_option("--out", sk.out)->required();

  MergeArgs mg;
  auto* me = app.add_subcommand("merge", "Merge sketches built with the same frequencies");
  me->add_option("inputs", mg.inputs)->required()->check(CLI::ExistingFile);
  me->add_option("--out", mg.out)->required();

  DecodeArgs dc;
  auto* d = app.add_subcommand("decode", "Decode a sketch into k centroids");
  d->add_option("--sketch", dc.sketch)->required()->check(CLI::ExistingFile);
  d->add_option("--decoder", dc.decoder)->check(CLI::IsMember(decoder_names()));
  d->add_option("--k", dc.k)->required();
  d->add_option("--T", dc.T, "Support candidates (default 2k)");
  d->add_option("--model", dc.model)->check(CLI::IsMember({"dirac", "gaussian"}));
  d->add_option("--restarts,-L", dc.restarts, "Mean-shift restarts");
  d->add_option("--grid-points", dc.grid_points, "Grid nodes per axis");
  d->add_option("--eta", dc.eta, "Mean-shift step (default sigma^2/2)");
  d->add_option("--step", dc.step, "Gradient-ascent step (default sigma^2)");
  d->add_option("--tol", dc.tol, "Ascent tolerance (default 1e-6 * box diameter)");
  d->add_option("--max-iters", dc.max_iters);
  d->add_option("--seed", dc.seed);
  d->add_flag("--no-finetune", dc.no_finetune, "Skip CL-OMPR joint refinement");
  d->add_option("--box", dc.box, "Search box bounds LO HI applied to every axis")->expected(2);
  d->add_option("--out", dc.out)->required();

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "Score a decoder result");
  e->add_option("--result", ev.result)->required()->check(CLI::ExistingFile);
  e->add_option("--data", ev.data, "Dataset for MSE/RSE")->check(CLI::ExistingFile);
  e->add_option("--sketch", ev.sketch, "Sketch for recomputing the residual norm")->check(CLI::ExistingFile);
  e->add_option("--n-init", ev.n_init);
  e->add_option("--lloyd-seed", ev.lloyd_seed);
  e->add_option("--max-iters", ev.max_iters);

  SweepArgs sw;
  auto* w = app.add_subcommand("sweep", "Run a parameter sweep from a JSON config");
  w->add_option("--config", sw.config)->required()->check(CLI::ExistingFile);
  w->add_option("--out", sw.out, "Results CSV (overrides the config)");
  w->add_option("--threads", sw.threads, "Worker count (default CSKIT_THREADS or all cores)");

  LloydArgs ll;
  auto* l = app.add_subcommand("lloyd", "Lloyd k-means baseline");
  l->add_option("--data", ll.data)->required()->check(CLI::ExistingFile);
  l->add_option("--k", ll.k)->required()->check(CLI::PositiveNumber);
  l->add_option("--n-init", ll.n_init)->check(CLI::PositiveNumber);
  l->add_option("--seed", ll.seed);
  l->add_option("--max-iters", ll.max_iters)->check(CLI::PositiveNumber);
  l->add_option("--out", ll.out, "Centroids file");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& ex) {
    err << "error: " << ex.what() << '\n';
    return kUsage;
  }

  try {
    if (g->parsed()) return cmd_gen(gen, out);
    if (s->parsed()) return cmd_sketch(sk, out);
    if (me->parsed()) return cmd_merge(mg, out);
    if (d->parsed()) return cmd_decode(dc, out);
    if (e->parsed()) return cmd_eval(ev, out);
    if (w->parsed()) return cmd_sweep(sw, out);
    if (l->parsed()) return cmd_lloyd(ll, out);
  } catch (const ConfigError& ex) {
    err << "error: " << ex.what() << '\n';
    return kUsage;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kRuntime;
  }
  return kUsage;
}

}  // namespace cskit::cli
