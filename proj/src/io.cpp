#include "cskit/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

namespace cskit {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ifstream open_in(const fs::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw FormatError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  return out;
}

bool is_csv(const fs::path& path) {
  std::string ext = path.extension().string();
  for (auto& ch : ext) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return ext == ".csv";
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <class T>
void put_le(std::ostream& out, T v) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  const U u = std::bit_cast<U>(v);
  std::array<char, sizeof(U)> buf;
  for (std::size_t i = 0; i < sizeof(U); ++i) buf[i] = static_cast<char>((u >> (8 * i)) & 0xff);
  out.write(buf.data(), buf.size());
}

template <class T>
T get_le(std::istream& in) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  std::array<unsigned char, sizeof(U)> buf;
  if (!in.read(reinterpret_cast<char*>(buf.data()), buf.size())) throw FormatError("binary dataset: truncated file");
  U u = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) u |= static_cast<U>(buf[i]) << (8 * i);
  return std::bit_cast<T>(u);
}

json vector_json(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

Vector vector_from(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(v.data(), static_cast<long>(v.size()));
}

}  // namespace

// --- datasets ---

Dataset read_csv(std::istream& in) {
  std::vector<double> values;
  long cols = -1;
  long rows = 0;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view text = trim(line);
    if (text.empty()) continue;
    long count = 0;
    std::size_t pos = 0;
    while (true) {
      const std::size_t comma = text.find(',', pos);
      const std::string_view field = trim(text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc() || ptr != field.data() + field.size() || field.empty())
        throw FormatError("line " + std::to_string(lineno) + ": cannot parse '" + std::string(field) + "' as a number");
      if (!std::isfinite(v)) throw FormatError("line " + std::to_string(lineno) + ": non-finite value");
      values.push_back(v);
      ++count;
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    if (cols < 0) cols = count;
    if (count != cols)
      throw FormatError("line " + std::to_string(lineno) + ": expected " + std::to_string(cols) + " columns, got " +
                        std::to_string(count));
    ++rows;
  }
  if (rows == 0) return Dataset(RowMatrix(0, 0));
  return Dataset(Eigen::Map<const RowMatrix>(values.data(), rows, cols));
}

void write_csv(const Dataset& data, std::ostream& out) {
  std::array<char, 64> buf;
  for (long i = 0; i < data.size(); ++i) {
    for (long j = 0; j < data.dim(); ++j) {
      if (j) out.put(',');
      const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), data.points()(i, j));
      out.write(buf.data(), res.ptr - buf.data());
    }
    out.put('\n');
  }
}

Dataset read_binary(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "CSKD", 4) != 0) throw FormatError("binary dataset: bad magic");
  const auto version = get_le<std::uint32_t>(in);
  if (version != 1) throw FormatError("binary dataset: unsupported version " + std::to_string(version));
  const auto n = get_le<std::uint64_t>(in);
  const auto d = get_le<std::uint32_t>(in);
  if (n > 0 && d == 0) throw FormatError("binary dataset: zero dimension");
  RowMatrix pts(static_cast<long>(n), static_cast<long>(d));
  for (long i = 0; i < pts.size(); ++i) {
    const double v = get_le<double>(in);
    if (!std::isfinite(v)) throw FormatError("binary dataset: non-finite value at index " + std::to_string(i));
    pts.data()[i] = v;
  }
  return Dataset(std::move(pts));
}

void write_binary(const Dataset& data, std::ostream& out) {
  out.write("CSKD", 4);
  put_le<std::uint32_t>(out, 1);
  put_le<std::uint64_t>(out, static_cast<std::uint64_t>(data.size()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(data.dim()));
  for (long i = 0; i < data.points().size(); ++i) put_le<double>(out, data.points().data()[i]);
}

Dataset load_dataset(const fs::path& path) {
  if (is_csv(path)) {
    auto in = open_in(path);
    return read_csv(in);
  }
  auto in = open_in(path, std::ios::binary);
  return read_binary(in);
}

void save_dataset(const Dataset& data, const fs::path& path) {
  if (is_csv(path)) {
    auto out = open_out(path);
    write_csv(data, out);
  } else {
    auto out = open_out(path, std::ios::binary);
    write_binary(data, out);
  }
}

fs::path labels_path(const fs::path& dataset_path) { return fs::path(dataset_path.string() + ".labels.csv"); }

void save_labels(const std::vector<int>& labels, const fs::path& path) {
  auto out = open_out(path);
  for (int l : labels) out << l << '\n';
}

// --- json helpers ---

json read_json(const fs::path& path) {
  auto in = open_in(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError("'" + path.string() + "': " + e.what());
  }
}

void write_json(const json& j, const fs::path& path) {
  auto out = open_out(path);
  out << j.dump(1) << '\n';
}

// --- sketches ---

json sketch_to_json(const Sketch& s, const FrequencyMatrix& freqs) {
  json omegas = json::array();
  for (long j = 0; j < freqs.m(); ++j) omegas.push_back(vector_json(freqs.omegas().row(j).transpose()));
  return json{{"m", freqs.m()},
              {"d", freqs.d()},
              {"sigma", freqs.sigma()},
              {"count", s.count},
              {"values_re", vector_json(s.values.real())},
              {"values_im", vector_json(s.values.imag())},
              {"omegas", std::move(omegas)},
              {"seed", freqs.seed()}};
}

SketchFile sketch_from_json(const json& j) {
  try {
    const long m = j.at("m").get<long>();
    const long d = j.at("d").get<long>();
    const auto& om = j.at("omegas");
    if (m < 1 || d < 1 || static_cast<long>(om.size()) != m) throw FormatError("sketch file: omegas must have m rows");
    RowMatrix omegas(m, d);
    for (long r = 0; r < m; ++r) {
      const Vector row = vector_from(om.at(static_cast<std::size_t>(r)));
      if (row.size() != d) throw FormatError("sketch file: omega row " + std::to_string(r) + " has wrong length");
      omegas.row(r) = row.transpose();
    }
    FrequencyMatrix freqs(std::move(omegas), j.at("sigma").get<double>(), j.at("seed").get<std::uint64_t>());
    const Vector re = vector_from(j.at("values_re"));
    const Vector im = vector_from(j.at("values_im"));
    if (re.size() != m || im.size() != m) throw FormatError("sketch file: values must have length m");
    Sketch s;
    s.values.resize(m);
    s.values.real() = re;
    s.values.imag() = im;
    s.count = j.at("count").get<std::uint64_t>();
    s.freq_id = freqs.id();
    return {std::move(s), std::move(freqs)};
  } catch (const json::exception& e) {
    throw FormatError(std::string("sketch file: ") + e.what());
  }
}

void save_sketch(const Sketch& s, const FrequencyMatrix& freqs, const fs::path& path) {
  write_json(sketch_to_json(s, freqs), path);
}

SketchFile load_sketch(const fs::path& path) { return sketch_from_json(read_json(path)); }

// --- decoder results ---

json search_to_json(const SearchConfig& cfg) {
  return std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
        if constexpr (std::is_same_v<T, GridSearch>) {
          return json{{"type", "grid"}, {"points_per_axis", s.points_per_axis}, {"max_nodes", s.max_nodes}};
        } else if constexpr (std::is_same_v<T, MeanShiftSearch>) {
          return json{{"type", "meanshift"}, {"eta", opt(s.eta)}, {"restarts", s.restarts},
                      {"max_iters", s.max_iters}, {"tol", opt(s.tol)}};
        } else {
          return json{{"type", "gradient"}, {"step", opt(s.step)}, {"max_iters", s.max_iters}, {"tol", opt(s.tol)}};
        }
      },
      cfg);
}

namespace {

SearchConfig search_from_json(const json& j) {
  auto opt = [&](const char* key) -> std::optional<double> {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
  };
  const std::string type = j.at("type").get<std::string>();
  if (type == "grid") return GridSearch{j.at("points_per_axis").get<int>(), j.value("max_nodes", 1e7)};
  if (type == "meanshift") return MeanShiftSearch{opt("eta"), j.at("restarts").get<int>(), j.at("max_iters").get<int>(), opt("tol")};
  if (type == "gradient") return GradientAscentSearch{opt("step"), j.at("max_iters").get<int>(), opt("tol")};
  throw FormatError("unknown search type '" + type + "'");
}

json matrix_row_major(const Matrix& m) {
  std::vector<double> flat;
  for (long i = 0; i < m.rows(); ++i)
    for (long j = 0; j < m.cols(); ++j) flat.push_back(m(i, j));
  return json(flat);
}

}  // namespace

json result_to_json(const DecoderResult& r) {
  json comps = json::array();
  for (const auto& c : r.components) {
    comps.push_back({{"kind", to_string(c.kind)},
                     {"center", vector_json(c.center)},
                     {"covariance", c.kind == ModelKind::Gaussian ? matrix_row_major(c.covariance) : json(nullptr)}});
  }
  json trace = json::array();
  for (const auto& t : r.trace) {
    trace.push_back({{"iteration", t.iteration},
                     {"selected", vector_json(t.selected)},
                     {"f_value", t.f_value},
                     {"restart_winner", t.restart_winner},
                     {"search_iterations", t.search_iterations},
                     {"kind", to_string(t.kind)},
                     {"residual_norm", t.residual_norm}});
  }
  const auto& c = r.config;
  return json{{"decoder", r.decoder},
              {"components", std::move(comps)},
              {"weights", vector_json(r.weights)},
              {"residual_norm", r.residual_norm},
              {"seed", c.seed},
              {"config",
               {{"k", c.k},
                {"T", c.atoms()},
                {"model", to_string(c.model)},
                {"seed", c.seed},
                {"finetune", c.finetune},
                {"search", search_to_json(c.search)}}},
              {"trace", std::move(trace)}};
}

DecoderResult result_from_json(const json& j) {
  try {
    DecoderResult r;
    r.decoder = j.at("decoder").get<std::string>();
    for (const auto& jc : j.at("components")) {
      Vector center = vector_from(jc.at("center"));
      const long d = center.size();
      if (jc.at("kind").get<std::string>() == "gaussian") {
        const Vector flat = vector_from(jc.at("covariance"));
        if (flat.size() != d * d) throw FormatError("result file: covariance must have d*d entries");
        Matrix cov(d, d);
        for (long a = 0; a < d; ++a)
          for (long b = 0; b < d; ++b) cov(a, b) = flat[a * d + b];
        r.components.push_back(Component::gaussian(std::move(center), std::move(cov)));
      } else {
        r.components.push_back(Component::dirac(std::move(center)));
      }
    }
    r.weights = vector_from(j.at("weights"));
    r.residual_norm = j.at("residual_norm").get<double>();
    const auto& c = j.at("config");
    r.config.k = c.at("k").get<int>();
    r.config.T = c.at("T").get<int>();
    r.config.model = parse_model(c.at("model").get<std::string>());
    r.config.seed = c.at("seed").get<std::uint64_t>();
    r.config.finetune = c.at("finetune").get<bool>();
    r.config.search = search_from_json(c.at("search"));
    for (const auto& t : j.value("trace", json::array())) {
      r.trace.push_back({t.at("iteration").get<int>(), vector_from(t.at("selected")), t.at("f_value").get<double>(),
                         t.at("restart_winner").get<int>(), t.at("search_iterations").get<long>(),
                         parse_model(t.at("kind").get<std::string>()), t.at("residual_norm").get<double>()});
    }
    return r;
  } catch (const json::exception& e) {
    throw FormatError(std::string("result file: ") + e.what());
  }
}

void save_result(const DecoderResult& r, const fs::path& path) { write_json(result_to_json(r), path); }
DecoderResult load_result(const fs::path& path) { return result_from_json(read_json(path)); }

// --- mixture specs ---

json gmm_to_json(const GmmSpec& spec) {
  json means = json::array();
  for (long i = 0; i < spec.k(); ++i) means.push_back(vector_json(spec.means.row(i).transpose()));
  json covs = json::array();
  for (const auto& c : spec.covariances) {
    json rows = json::array();
    for (long i = 0; i < c.rows(); ++i) rows.push_back(vector_json(c.row(i).transpose()));
    covs.push_back(std::move(rows));
  }
  return json{{"weights", vector_json(spec.weights)}, {"means", std::move(means)}, {"covariances", std::move(covs)}};
}

GmmSpec gmm_from_json(const json& j) {
  try {
    GmmSpec spec;
    spec.weights = vector_from(j.at("weights"));
    const auto& means = j.at("means");
    const long k = static_cast<long>(means.size());
    if (k == 0) throw FormatError("GMM spec: no means");
    const long d = static_cast<long>(means.at(0).size());
    spec.means.resize(k, d);
    for (long i = 0; i < k; ++i) {
      const Vector row = vector_from(means.at(static_cast<std::size_t>(i)));
      if (row.size() != d) throw FormatError("GMM spec: ragged means");
      spec.means.row(i) = row.transpose();
    }
    for (const auto& jc : j.at("covariances")) {
      Matrix c(d, d);
      if (static_cast<long>(jc.size()) != d) throw FormatError("GMM spec: covariance must be d x d");
      for (long a = 0; a < d; ++a) {
        const Vector row = vector_from(jc.at(static_cast<std::size_t>(a)));
        if (row.size() != d) throw FormatError("GMM spec: covariance must be d x d");
        c.row(a) = row.transpose();
      }
      spec.covariances.push_back(std::move(c));
    }
    spec.validate();
    return spec;
  } catch (const json::exception& e) {
    throw FormatError(std::string("GMM spec: ") + e.what());
  }
}

}  // namespace cskit
