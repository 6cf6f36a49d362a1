#include "cskit/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

#include "cskit/io.hpp"

namespace cskit {

using nlohmann::json;
namespace fs = std::filesystem;

const std::vector<std::string>& decoder_names() {
  static const std::vector<std::string> names{"clompr", "clompr-meanshift", "proposed-grid", "proposed-meanshift"};
  return names;
}

namespace {

void check_decoder(const std::string& name) {
  const auto& names = decoder_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    std::string all;
    for (const auto& n : names) all += (all.empty() ? "" : ", ") + n;
    throw ConfigError("unknown decoder '" + name + "' (expected one of: " + all + ")");
  }
}

bool is_clompr(const std::string& decoder) { return decoder.rfind("clompr", 0) == 0; }

}  // namespace

bool uses_restarts(const std::string& decoder) {
  check_decoder(decoder);
  return decoder.size() > 9 && decoder.substr(decoder.size() - 9) == "meanshift";
}

SearchConfig decoder_search(const std::string& decoder, int restarts, int grid_points_per_axis) {
  check_decoder(decoder);
  if (decoder == "clompr") return GradientAscentSearch{};
  if (decoder == "proposed-grid") return GridSearch{grid_points_per_axis};
  MeanShiftSearch ms;
  ms.restarts = restarts;
  return ms;
}

DecoderResult run_decoder(const std::string& decoder, const Sketch& z, const FrequencyMatrix& freqs,
                          const DecoderConfig& cfg, const Box& box) {
  check_decoder(decoder);
  DecoderResult r = is_clompr(decoder) ? clompr(z, freqs, cfg, box) : proposed_decoder(z, freqs, cfg, box);
  r.decoder = decoder;
  return r;
}

// --- configuration ---

namespace {

fs::path resolve(const fs::path& p, const fs::path& base) {
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

template <class T>
std::vector<T> list_field(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_array()) return v.get<std::vector<T>>();
  return {v.get<T>()};
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j, const fs::path& base_dir) {
  ExperimentConfig cfg;
  try {
    const auto& ds = j.at("dataset");
    if (ds.contains("generate")) {
      const auto& g = ds.at("generate");
      cfg.dataset.kind = DatasetSource::Kind::Generate;
      cfg.dataset.k = g.value("k", 3);
      cfg.dataset.d = g.value("d", 2);
      cfg.dataset.n = g.value("n", 10000L);
      cfg.dataset.seed = g.value("seed", std::uint64_t{0});
    } else if (ds.contains("spec_file")) {
      cfg.dataset.kind = DatasetSource::Kind::SpecFile;
      cfg.dataset.path = resolve(ds.at("spec_file").get<std::string>(), base_dir);
      cfg.dataset.n = ds.value("n", 10000L);
      cfg.dataset.seed = ds.value("seed", std::uint64_t{0});
    } else if (ds.contains("path")) {
      cfg.dataset.kind = DatasetSource::Kind::Path;
      cfg.dataset.path = resolve(ds.at("path").get<std::string>(), base_dir);
    } else {
      throw ConfigError("dataset needs one of 'generate', 'spec_file' or 'path'");
    }
    cfg.m = list_field<long>(j, "m");
    cfg.sigma = list_field<double>(j, "sigma");
    if (j.contains("L")) cfg.L = list_field<int>(j, "L");
    cfg.decoders = list_field<std::string>(j, "decoders");
    if (j.contains("models")) cfg.models = list_field<std::string>(j, "models");
    cfg.k = j.at("k").get<int>();
    cfg.T = j.value("T", 0);
    cfg.repetitions = j.value("repetitions", 1);
    cfg.seed = j.value("seed", std::uint64_t{0});
    cfg.grid_points_per_axis = j.value("grid_points_per_axis", 101);
    cfg.finetune = j.value("finetune", true);
    cfg.lloyd.k = cfg.k;
    if (j.contains("lloyd")) {
      const auto& l = j.at("lloyd");
      cfg.lloyd.n_init = l.value("n_init", 5);
      cfg.lloyd.max_iters = l.value("max_iters", 300);
      cfg.lloyd.seed = l.value("seed", std::uint64_t{0});
    }
    if (j.contains("box")) {
      const auto b = j.at("box").get<std::vector<double>>();
      if (b.size() != 2) throw ConfigError("box must be [lower, upper]");
      cfg.box_lower = b[0];
      cfg.box_upper = b[1];
    }
    if (j.contains("output")) cfg.output = resolve(j.at("output").get<std::string>(), base_dir);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("experiment config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

void ExperimentConfig::validate() const {
  if (m.empty() || sigma.empty() || L.empty() || decoders.empty() || models.empty())
    throw ConfigError("experiment config: sweep lists m, sigma, L, decoders and models must be nonempty");
  if (repetitions < 1) throw ConfigError("experiment config: repetitions must be >= 1");
  for (long v : m)
    if (v < 1) throw ConfigError("experiment config: m must be >= 1");
  for (double s : sigma)
    if (!(s > 0) || !std::isfinite(s)) throw ConfigError("experiment config: sigma must be positive and finite");
  for (int l : L)
    if (l < 1) throw ConfigError("experiment config: L must be >= 1");
  for (const auto& d : decoders) check_decoder(d);
  for (const auto& mo : models) parse_model(mo);
  if (!(box_lower < box_upper)) throw ConfigError("experiment config: box lower must be below upper");
  if (grid_points_per_axis < 1) throw ConfigError("experiment config: grid_points_per_axis must be >= 1");
  DecoderConfig probe;
  probe.k = k;
  probe.T = T;
  probe.validate();
}

Dataset load_experiment_dataset(const ExperimentConfig& cfg) {
  switch (cfg.dataset.kind) {
    case DatasetSource::Kind::Generate:
      return gen_gmm(make_separated_spec(cfg.dataset.k, cfg.dataset.d, cfg.dataset.seed), cfg.dataset.n,
                     cfg.dataset.seed)
          .data;
    case DatasetSource::Kind::SpecFile:
      return gen_gmm(gmm_from_json(read_json(cfg.dataset.path)), cfg.dataset.n, cfg.dataset.seed).data;
    case DatasetSource::Kind::Path:
      break;
  }
  return load_dataset(cfg.dataset.path);
}

int default_threads() {
  if (const char* env = std::getenv("CSKIT_THREADS")) {
    int v = 0;
    const std::string_view s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && ptr == s.data() + s.size() && v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// --- sweep ---

namespace {

struct SketchJob {
  long m;
  double sigma;
  std::uint64_t seed;
};

const char* search_label(const SearchConfig& s) {
  if (std::holds_alternative<GridSearch>(s)) return "grid";
  if (std::holds_alternative<MeanShiftSearch>(s)) return "meanshift";
  return "gradient";
}

auto row_key(const SweepRow& r) {
  return std::tie(r.decoder, r.model, r.search, r.m, r.sigma, r.L, r.T, r.k, r.seed);
}

std::vector<SweepRow> rows_for_job(const ExperimentConfig& cfg, const SketchJob& job, const Dataset& data,
                                   const Centroids& lloyd_ref, const Box& box) {
  std::vector<SweepRow> rows;
  std::optional<FrequencyMatrix> freqs;
  Sketch z;
  std::string sketch_error;
  try {
    freqs = sample_frequencies(data.dim(), job.m, job.sigma, job.seed);
    z = sketch_dataset(data, *freqs);
  } catch (const std::exception& e) {
    sketch_error = e.what();
  }

  for (const auto& decoder : cfg.decoders) {
    for (const auto& model_name : cfg.models) {
      const ModelKind model = parse_model(model_name);
      if (is_clompr(decoder) && model != ModelKind::Dirac) continue;
      std::vector<int> ls = cfg.L;
      if (!uses_restarts(decoder)) ls = {decoder == "clompr" ? 1 : 0};
      for (int l : ls) {
        SweepRow row;
        row.decoder = decoder;
        row.model = model_name;
        row.m = job.m;
        row.sigma = job.sigma;
        row.L = l;
        row.k = cfg.k;
        row.seed = job.seed;
        DecoderConfig dc;
        dc.k = cfg.k;
        dc.T = cfg.T;
        dc.model = model;
        dc.seed = job.seed;
        dc.finetune = cfg.finetune;
        dc.search = decoder_search(decoder, std::max(l, 1), cfg.grid_points_per_axis);
        row.search = search_label(dc.search);
        row.T = dc.atoms();
        if (!sketch_error.empty()) {
          row.error = sketch_error;
          rows.push_back(std::move(row));
          continue;
        }
        try {
          const auto t0 = std::chrono::steady_clock::now();
          const DecoderResult res = run_decoder(decoder, z, *freqs, dc, box);
          const auto t1 = std::chrono::steady_clock::now();
          row.runtime_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
          row.residual_norm = res.residual_norm;
          const Centroids c = res.centers();
          row.mse = mse(c, data);
          row.rse = rse(c, data, lloyd_ref);
        } catch (const std::exception& e) {
          row.error = e.what();
        }
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

}  // namespace

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, const Dataset& data, const Centroids& lloyd_ref,
                                int threads) {
  cfg.validate();
  if (data.empty()) throw EmptyDatasetError();
  const Box box = Box::cube(data.dim(), cfg.box_lower, cfg.box_upper);

  std::vector<SketchJob> jobs;
  for (long m : cfg.m)
    for (double s : cfg.sigma)
      for (int rep = 0; rep < cfg.repetitions; ++rep) jobs.push_back({m, s, cfg.seed + static_cast<std::uint64_t>(rep)});

  std::vector<SweepRow> rows;
  std::mutex lock;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      auto part = rows_for_job(cfg, jobs[i], data, lloyd_ref, box);
      std::lock_guard<std::mutex> g(lock);
      for (auto& r : part) rows.push_back(std::move(r));
    }
  };
  const int n = std::min<int>(threads > 0 ? threads : default_threads(), static_cast<int>(jobs.size()));
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) { return row_key(a) < row_key(b); });
  return rows;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, int threads) {
  const Dataset data = load_experiment_dataset(cfg);
  LloydOptions lo = cfg.lloyd;
  lo.k = cfg.k;
  const LloydResult ref = lloyd(data, lo);
  return run_sweep(cfg, data, ref.centroids, threads);
}

// --- CSV ---

namespace {

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + '"';
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields(1);
  bool in_quotes = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_quotes) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        in_quotes = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  return fields;
}

template <class T>
T parse_num(const std::string& s) {
  T v{};
  if (s.empty()) return v;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw FormatError("sweep CSV: bad number '" + s + "'");
  return v;
}

}  // namespace

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << kSweepHeader << '\n';
  for (const auto& r : rows) {
    const bool ok = r.error.empty();
    out << r.decoder << ',' << r.model << ',' << r.search << ',' << r.m << ',' << fmt(r.sigma) << ',' << r.L << ','
        << r.T << ',' << r.k << ',' << r.seed << ',' << (ok ? fmt(r.mse) : "") << ',' << (ok ? fmt(r.rse) : "")
        << ',' << (ok ? fmt(r.residual_norm) : "") << ',' << (ok ? fmt(r.runtime_ms) : "") << ',' << quote(r.error)
        << '\n';
  }
}

std::vector<SweepRow> read_sweep_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("sweep CSV: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kSweepHeader) throw FormatError("sweep CSV: unexpected header");
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 14) throw FormatError("sweep CSV: expected 14 fields, got " + std::to_string(f.size()));
    SweepRow r;
    r.decoder = f[0];
    r.model = f[1];
    r.search = f[2];
    r.m = parse_num<long>(f[3]);
    r.sigma = parse_num<double>(f[4]);
    r.L = parse_num<int>(f[5]);
    r.T = parse_num<int>(f[6]);
    r.k = parse_num<int>(f[7]);
    r.seed = parse_num<std::uint64_t>(f[8]);
    r.mse = parse_num<double>(f[9]);
    r.rse = parse_num<double>(f[10]);
    r.residual_norm = parse_num<double>(f[11]);
    r.runtime_ms = parse_num<double>(f[12]);
    r.error = f[13];
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace cskit
