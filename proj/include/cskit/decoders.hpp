#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cskit/common.hpp"
#include "cskit/correlation.hpp"
#include "cskit/search.hpp"
#include "cskit/sketch.hpp"

namespace cskit {

enum class ModelKind { Dirac, Gaussian };

std::string to_string(ModelKind kind);
ModelKind parse_model(const std::string& name);

/// One mixture atom. Dirac components carry an all-zero covariance.
struct Component {
  ModelKind kind = ModelKind::Dirac;
  Vector center;
  Matrix covariance;

  static Component dirac(Vector center);
  static Component gaussian(Vector center, Matrix covariance);
};

/// A delta_c for Diracs, the Gaussian characteristic function otherwise.
ComplexVector sketch_component(const Component& c, const FrequencyMatrix& freqs);

struct DecoderConfig {
  int k = 1;
  /// Number of support candidates, T >= k. Zero means 2k.
  int T = 0;
  ModelKind model = ModelKind::Dirac;
  SearchConfig search = MeanShiftSearch{};
  std::uint64_t seed = 0;
  /// Joint gradient refinement of centers and weights (CL-OMPR only).
  bool finetune = true;

  int atoms() const { return T > 0 ? T : 2 * k; }
  void validate() const;
};

struct IterationTrace {
  int iteration = 0;
  Vector selected;
  double f_value = 0.0;
  int restart_winner = 0;
  long search_iterations = 0;
  /// Kind of the component added at this iteration.
  ModelKind kind = ModelKind::Dirac;
  /// |r| after the residual update of this iteration.
  double residual_norm = 0.0;
};

struct DecoderResult {
  std::string decoder;
  std::vector<Component> components;
  Vector weights;
  double residual_norm = 0.0;
  /// Configuration with search defaults filled in.
  DecoderConfig config;
  std::vector<IterationTrace> trace;

  RowMatrix centers() const;
};

// --- shared subroutines ---

/// Indices of the k largest weights (ties: lower index first), returned in
/// increasing index order.
std::vector<std::size_t> top_k_indices(const Vector& weights, int k);

template <class T>
std::pair<std::vector<T>, Vector> hard_threshold(const std::vector<T>& items, const Vector& weights, int k) {
  if (items.size() != static_cast<std::size_t>(weights.size()))
    throw ConfigError("hard_threshold: items and weights differ in length");
  const auto keep = top_k_indices(weights, k);
  std::vector<T> out_items;
  Vector out_weights(static_cast<long>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) {
    out_items.push_back(items[keep[i]]);
    out_weights[static_cast<long>(i)] = weights[static_cast<long>(keep[i])];
  }
  return {std::move(out_items), std::move(out_weights)};
}

struct CovarianceEstimateOptions {
  /// Below this correlation value the log-Hessian is not trusted.
  double value_floor = 1e-6;
  /// Largest accepted condition number of the log-Hessian.
  double max_condition = 1e12;
  /// Relative eigenvalue margin for positive definiteness of the estimate.
  double pd_relative_eps = 1e-10;
};

/// Local covariance from the Hessian H of -log f at a point:
/// returns H^{-1} - sigma^2 I when that matrix is positive definite, otherwise
/// the zero matrix (meaning: use a Dirac component).
Matrix estimate_sigma(const LocalExpansion& local, double sigma, const CovarianceEstimateOptions& opts = {});
Matrix estimate_sigma(const CorrelationFn& f, const Vector& c, const CovarianceEstimateOptions& opts = {});

/// z - sum_i w_i A pi_i.
ComplexVector residual_update(const ComplexVector& z, const std::vector<Component>& components,
                              const Vector& weights, const FrequencyMatrix& freqs);

struct FinetuneResult {
  std::vector<Vector> centers;
  Vector weights;
  double objective_before = 0.0;
  double objective_after = 0.0;
  int iterations = 0;
};

/// Jointly refines Dirac centers (kept in the box) and non-negative weights to
/// minimize |z - sum_i w_i A delta_{c_i}|^2 with projected L-BFGS.
FinetuneResult joint_finetune(const ComplexVector& z, const FrequencyMatrix& freqs, const std::vector<Vector>& centers,
                              const Vector& weights, const Box& box, int max_iterations = 200,
                              double gradient_tolerance = 1e-8);

// --- decoders ---

/// Greedy OMP-with-replacement decoder fitting k Diracs.
DecoderResult clompr(const Sketch& z, const FrequencyMatrix& freqs, const DecoderConfig& cfg, const Box& box);

/// Two-stage decoder: T greedy local-maximum selections with non-negative
/// re-projection after each (Dirac or Gaussian residual model), then pruning
/// to the k largest weights.
DecoderResult proposed_decoder(const Sketch& z, const FrequencyMatrix& freqs, const DecoderConfig& cfg, const Box& box);

}  // namespace cskit
