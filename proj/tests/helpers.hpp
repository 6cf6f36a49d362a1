#pragma once

#include <cmath>
#include <complex>
#include <filesystem>
#include <initializer_list>
#include <random>
#include <string>
#include <vector>

#include "cskit/common.hpp"
#include "cskit/sketch.hpp"

namespace test {

using cskit::ComplexVector;
using cskit::Dataset;
using cskit::FrequencyMatrix;
using cskit::Matrix;
using cskit::RowMatrix;
using cskit::Vector;

inline RowMatrix row_matrix(std::initializer_list<std::initializer_list<double>> rows) {
  const long n = static_cast<long>(rows.size());
  const long d = n ? static_cast<long>(rows.begin()->size()) : 0;
  RowMatrix m(n, d);
  long i = 0;
  for (const auto& r : rows) {
    long j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

inline Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<long>(v.size()));
  long i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

inline Dataset random_dataset(long n, long d, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  RowMatrix m(n, d);
  for (long i = 0; i < m.size(); ++i) m.data()[i] = u(gen);
  return Dataset(std::move(m));
}

inline Vector random_vector(long d, std::mt19937_64& gen, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Vector v(d);
  for (auto& x : v) x = u(gen);
  return v;
}

inline ComplexVector random_complex(long m, std::mt19937_64& gen) {
  std::normal_distribution<double> n(0.0, 1.0);
  ComplexVector v(m);
  for (auto& x : v) x = {n(gen), n(gen)};
  return v / v.norm();
}

/// Plain double loop over points and frequencies, no chunking.
inline ComplexVector direct_sketch(const Dataset& data, const FrequencyMatrix& f) {
  ComplexVector out = ComplexVector::Zero(f.m());
  for (long j = 0; j < f.m(); ++j) {
    std::complex<double> acc = 0.0;
    for (long i = 0; i < data.size(); ++i) {
      const double t = f.omegas().row(j).dot(data.points().row(i));
      acc += std::complex<double>(std::cos(t), std::sin(t));
    }
    out[j] = acc / (static_cast<double>(data.size()) * std::sqrt(static_cast<double>(f.m())));
  }
  return out;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("cskit_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace test
