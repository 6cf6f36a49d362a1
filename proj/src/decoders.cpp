#include "cskit/decoders.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cskit/box_minimizer.hpp"
#include "cskit/nnls.hpp"

namespace cskit {

std::string to_string(ModelKind kind) { return kind == ModelKind::Dirac ? "dirac" : "gaussian"; }

ModelKind parse_model(const std::string& name) {
  if (name == "dirac") return ModelKind::Dirac;
  if (name == "gaussian") return ModelKind::Gaussian;
  throw ConfigError("unknown model '" + name + "' (expected dirac or gaussian)");
}

Component Component::dirac(Vector center) {
  const long d = center.size();
  return Component{ModelKind::Dirac, std::move(center), Matrix::Zero(d, d)};
}

Component Component::gaussian(Vector center, Matrix covariance) {
  return Component{ModelKind::Gaussian, std::move(center), std::move(covariance)};
}

ComplexVector sketch_component(const Component& c, const FrequencyMatrix& freqs) {
  return c.kind == ModelKind::Dirac ? sketch_dirac(c.center, freqs) : sketch_gaussian(c.center, c.covariance, freqs);
}

void DecoderConfig::validate() const {
  if (k < 1) throw ConfigError("k must be >= 1");
  if (atoms() < k) throw ConfigError("T must satisfy T >= k (got T=" + std::to_string(T) + ", k=" + std::to_string(k) + ")");
  validate_search(search);
}

RowMatrix DecoderResult::centers() const {
  if (components.empty()) return RowMatrix(0, 0);
  RowMatrix out(static_cast<long>(components.size()), components.front().center.size());
  for (std::size_t i = 0; i < components.size(); ++i) out.row(static_cast<long>(i)) = components[i].center.transpose();
  return out;
}

std::vector<std::size_t> top_k_indices(const Vector& weights, int k) {
  const auto n = static_cast<std::size_t>(weights.size());
  if (k < 0 || static_cast<std::size_t>(k) > n) throw ConfigError("hard_threshold: k exceeds the support size");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return weights[static_cast<long>(a)] > weights[static_cast<long>(b)];
  });
  order.resize(static_cast<std::size_t>(k));
  std::sort(order.begin(), order.end());
  return order;
}

Matrix estimate_sigma(const LocalExpansion& local, double sigma, const CovarianceEstimateOptions& opts) {
  const long d = local.gradient.size();
  const Matrix zero = Matrix::Zero(d, d);
  const double f = local.value;
  if (!(f > opts.value_floor) || !local.gradient.allFinite() || !local.hessian.allFinite()) return zero;

  // Hessian of -log f.
  Matrix h = -(local.hessian * f - local.gradient * local.gradient.transpose()) / (f * f);
  h = 0.5 * (h + h.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(h);
  if (eig.info() != Eigen::Success) return zero;
  const Vector& lambda = eig.eigenvalues();
  if (!(lambda.minCoeff() > 0)) return zero;
  if (lambda.maxCoeff() / lambda.minCoeff() > opts.max_condition) return zero;

  const Vector inv = lambda.cwiseInverse();
  const Vector mu = inv.array() - sigma * sigma;
  const double eps = opts.pd_relative_eps * inv.sum() / static_cast<double>(d);
  if (!(mu.minCoeff() > eps)) return zero;
  Matrix est = eig.eigenvectors() * mu.asDiagonal() * eig.eigenvectors().transpose();
  return 0.5 * (est + est.transpose());
}

Matrix estimate_sigma(const CorrelationFn& f, const Vector& c, const CovarianceEstimateOptions& opts) {
  return estimate_sigma(f.expand(c), f.freqs().sigma(), opts);
}

ComplexVector residual_update(const ComplexVector& z, const std::vector<Component>& components,
                              const Vector& weights, const FrequencyMatrix& freqs) {
  if (static_cast<long>(components.size()) != weights.size())
    throw ConfigError("residual_update: components and weights differ in length");
  ComplexVector r = z;
  for (std::size_t i = 0; i < components.size(); ++i)
    r -= weights[static_cast<long>(i)] * sketch_component(components[i], freqs);
  return r;
}

FinetuneResult joint_finetune(const ComplexVector& z, const FrequencyMatrix& freqs, const std::vector<Vector>& centers,
                              const Vector& weights, const Box& box, int max_iterations, double gradient_tolerance) {
  const long k = static_cast<long>(centers.size());
  const long d = freqs.d();
  if (weights.size() != k) throw ConfigError("joint_finetune: centers and weights differ in length");
  const long n = k * d + k;
  const auto& om = freqs.omegas();

  Vector x0(n), lower(n), upper(n);
  for (long i = 0; i < k; ++i) {
    x0.segment(i * d, d) = centers[static_cast<std::size_t>(i)];
    lower.segment(i * d, d) = box.lower();
    upper.segment(i * d, d) = box.upper();
  }
  x0.tail(k) = weights;
  lower.tail(k).setZero();
  upper.tail(k).setConstant(std::numeric_limits<double>::infinity());

  const Objective objective = [&](const Vector& x, Vector& grad) {
    std::vector<ComplexVector> atoms(static_cast<std::size_t>(k));
    ComplexVector r = z;
    for (long i = 0; i < k; ++i) {
      atoms[static_cast<std::size_t>(i)] = sketch_dirac(x.segment(i * d, d), freqs);
      r -= x[k * d + i] * atoms[static_cast<std::size_t>(i)];
    }
    grad.setZero(n);
    for (long i = 0; i < k; ++i) {
      const auto& a = atoms[static_cast<std::size_t>(i)];
      const double alpha = x[k * d + i];
      // p_j = conj(r_j) a_j
      const ComplexVector p = r.conjugate().cwiseProduct(a);
      grad[k * d + i] = -2.0 * p.real().sum();
      grad.segment(i * d, d) = 2.0 * alpha * (om.transpose() * p.imag());
    }
    return r.squaredNorm();
  };

  BoxMinimizerOptions opts;
  opts.max_iterations = max_iterations;
  opts.gradient_tolerance = gradient_tolerance;
  const BoxMinimizerResult res = minimize_box(objective, x0, lower, upper, opts);

  FinetuneResult out;
  out.objective_before = res.initial_value;
  out.objective_after = res.value;
  out.iterations = res.iterations;
  for (long i = 0; i < k; ++i) out.centers.push_back(res.x.segment(i * d, d));
  out.weights = res.x.tail(k);
  return out;
}

namespace {

void check_inputs(const Sketch& z, const FrequencyMatrix& freqs, const Box& box) {
  if (z.values.size() != freqs.m()) throw DimensionError("sketch length", freqs.m(), z.values.size());
  if (z.freq_id != freqs.id()) throw ConfigError("sketch was not built with the supplied frequencies");
  if (box.dim() != freqs.d()) throw DimensionError("decoder box", freqs.d(), box.dim());
}

DecoderConfig resolved(const DecoderConfig& cfg, const FrequencyMatrix& freqs, const Box& box) {
  DecoderConfig out = cfg;
  out.T = cfg.atoms();
  out.search = resolve_search(cfg.search, freqs.sigma(), box);
  return out;
}

}  // namespace

DecoderResult clompr(const Sketch& z, const FrequencyMatrix& freqs, const DecoderConfig& cfg_in, const Box& box) {
  cfg_in.validate();
  check_inputs(z, freqs, box);
  if (cfg_in.model != ModelKind::Dirac) throw ConfigError("CL-OMPR fits Dirac mixtures only");
  const DecoderConfig cfg = resolved(cfg_in, freqs, box);

  DecoderResult out;
  out.decoder = "clompr";
  out.config = cfg;
  ComplexVector r = z.values;
  std::vector<Vector> centers;
  Vector alpha;

  for (int t = 0; t < cfg.T; ++t) {
    const CorrelationFn f(r, freqs);
    SearchResult found = find_local_maximum(f, box, cfg.search, cfg.seed, t);
    centers.push_back(found.point);

    if (static_cast<int>(centers.size()) > cfg.k) {
      std::vector<ComplexVector> normalized;
      for (const auto& c : centers) {
        ComplexVector a = sketch_dirac(c, freqs);
        normalized.push_back(a / a.norm());
      }
      const Vector beta = nnls_weights(z.values, normalized).x;
      centers = hard_threshold(centers, beta, cfg.k).first;
    }

    std::vector<ComplexVector> atoms;
    for (const auto& c : centers) atoms.push_back(sketch_dirac(c, freqs));
    alpha = nnls_weights(z.values, atoms).x;

    if (cfg.finetune) {
      FinetuneResult ft = joint_finetune(z.values, freqs, centers, alpha, box);
      centers = std::move(ft.centers);
      alpha = std::move(ft.weights);
    }

    r = z.values;
    for (std::size_t i = 0; i < centers.size(); ++i) r -= alpha[static_cast<long>(i)] * sketch_dirac(centers[i], freqs);

    out.trace.push_back({t, found.point, found.value, found.winner, found.iterations, ModelKind::Dirac, r.norm()});
  }

  for (auto& c : centers) out.components.push_back(Component::dirac(std::move(c)));
  out.weights = alpha;
  out.residual_norm = residual_update(z.values, out.components, out.weights, freqs).norm();
  return out;
}

DecoderResult proposed_decoder(const Sketch& z, const FrequencyMatrix& freqs, const DecoderConfig& cfg_in,
                               const Box& box) {
  cfg_in.validate();
  check_inputs(z, freqs, box);
  const DecoderConfig cfg = resolved(cfg_in, freqs, box);

  DecoderResult out;
  out.decoder = "proposed";
  out.config = cfg;
  const CorrelationFn full(z.values, freqs);
  ComplexVector r = z.values;
  std::vector<Component> support;
  std::vector<ComplexVector> atoms;
  Vector alpha;

  for (int i = 0; i < cfg.T; ++i) {
    const CorrelationFn f(r, freqs);
    SearchResult found = find_local_maximum(f, box, cfg.search, cfg.seed, i);

    Component comp = Component::dirac(found.point);
    if (cfg.model == ModelKind::Gaussian) {
      Matrix cov = estimate_sigma(full, found.point);
      if (!cov.isZero(0.0)) comp = Component::gaussian(found.point, std::move(cov));
    }
    atoms.push_back(sketch_component(comp, freqs));
    support.push_back(std::move(comp));

    alpha = nnls_weights(z.values, atoms).x;
    r = z.values;
    for (std::size_t j = 0; j < atoms.size(); ++j) r -= alpha[static_cast<long>(j)] * atoms[j];

    out.trace.push_back({i, found.point, found.value, found.winner, found.iterations, support.back().kind, r.norm()});
  }

  if (static_cast<int>(support.size()) > cfg.k) {
    auto [kept, w] = hard_threshold(support, alpha, cfg.k);
    support = std::move(kept);
    alpha = std::move(w);
  }
  out.components = std::move(support);
  out.weights = alpha;
  out.residual_norm = residual_update(z.values, out.components, out.weights, freqs).norm();
  return out;
}

}  // namespace cskit
