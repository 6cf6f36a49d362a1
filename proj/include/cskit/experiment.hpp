#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cskit/common.hpp"
#include "cskit/datagen.hpp"
#include "cskit/decoders.hpp"
#include "cskit/metrics.hpp"

namespace cskit {

// Decoder names accepted by the CLI and the sweep:
//   clompr              CL-OMPR, single-start plain gradient ascent
//   clompr-meanshift    CL-OMPR with the L-restart mean-shift search
//   proposed-grid       proposed decoder, exhaustive grid search
//   proposed-meanshift  proposed decoder, L-restart mean-shift search
const std::vector<std::string>& decoder_names();
bool uses_restarts(const std::string& decoder);

/// Search strategy a named decoder runs with.
SearchConfig decoder_search(const std::string& decoder, int restarts, int grid_points_per_axis);

/// Runs the named decoder; cfg.search is used as given.
DecoderResult run_decoder(const std::string& decoder, const Sketch& z, const FrequencyMatrix& freqs,
                          const DecoderConfig& cfg, const Box& box);

/// Where the sweep's data comes from: a generated separated mixture, a mixture
/// spec file, or a dataset file.
struct DatasetSource {
  enum class Kind { Generate, SpecFile, Path } kind = Kind::Generate;
  int k = 3;
  int d = 2;
  long n = 10000;
  std::uint64_t seed = 0;
  std::filesystem::path path;
};

struct ExperimentConfig {
  DatasetSource dataset;
  std::vector<long> m;
  std::vector<double> sigma;
  std::vector<int> L{100};
  std::vector<std::string> decoders;
  std::vector<std::string> models{"dirac"};
  int k = 3;
  int T = 0;
  int repetitions = 1;
  /// Row seeds are seed, seed + 1, ..., seed + repetitions - 1.
  std::uint64_t seed = 0;
  int grid_points_per_axis = 101;
  bool finetune = true;
  LloydOptions lloyd;
  double box_lower = -1.0;
  double box_upper = 1.0;
  std::filesystem::path output;

  /// Relative paths are resolved against base_dir.
  static ExperimentConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
  void validate() const;
};

Dataset load_experiment_dataset(const ExperimentConfig& cfg);

struct SweepRow {
  std::string decoder;
  std::string model;
  std::string search;
  long m = 0;
  double sigma = 0.0;
  /// Restart count; 1 for single-start search, 0 for grid search.
  int L = 0;
  int T = 0;
  int k = 0;
  std::uint64_t seed = 0;
  double mse = 0.0;
  double rse = 0.0;
  double residual_norm = 0.0;
  double runtime_ms = 0.0;
  std::string error;
};

/// Every (decoder, model, m, sigma, L, seed) combination; CL-OMPR only runs the
/// Dirac model and searches without restarts ignore L. One sketch per
/// (m, sigma, seed), shared by the rows that use it. Rows come back sorted by
/// key columns. threads = 0 reads CSKIT_THREADS (default: hardware concurrency).
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, const Dataset& data, const Centroids& lloyd_ref,
                                int threads = 0);

/// Loads the dataset, computes the Lloyd reference once and runs the sweep.
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, int threads = 0);

inline constexpr const char* kSweepHeader =
    "decoder,model,search,m,sigma,L,T,k,seed,mse,rse,residual_norm,runtime_ms,error";

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);
std::vector<SweepRow> read_sweep_csv(std::istream& in);

/// CSKIT_THREADS if set and positive, otherwise hardware concurrency (at least 1).
int default_threads();

}  // namespace cskit
