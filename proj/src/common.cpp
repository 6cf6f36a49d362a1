#include "cskit/common.hpp"

#include <cmath>

namespace cskit {

Dataset::Dataset(RowMatrix points) : points_(std::move(points)) {
  if (points_.size() > 0 && !points_.allFinite()) throw Error("dataset contains non-finite values");
}

Box::Box(Vector lower, Vector upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size()) throw ConfigError("box bounds have different dimensions");
  if (lower_.size() == 0) throw ConfigError("box must have dimension >= 1");
  if (!lower_.allFinite() || !upper_.allFinite()) throw ConfigError("box bounds must be finite");
  if ((lower_.array() >= upper_.array()).any()) throw ConfigError("box requires lower < upper componentwise");
}

Box Box::cube(long d, double lo, double hi) {
  return Box(Vector::Constant(d, lo), Vector::Constant(d, hi));
}

bool Box::contains(const Vector& x) const {
  return x.size() == dim() && (x.array() >= lower_.array()).all() &&
         (x.array() <= upper_.array()).all();
}

}  // namespace cskit
