#include <doctest.h>

#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "cskit/experiment.hpp"
#include "cskit/io.hpp"
#include "helpers.hpp"

using namespace cskit;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cskit_run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("cli sketch, merge and decode") {
  const auto dir = test::temp_dir("cli");
  const auto p = [&](const char* name) { return (dir / name).string(); };

  REQUIRE(cskit_run({"gen", "--k", "3", "--d", "2", "--n", "2000", "--seed", "4", "--out", p("data.csv")}).code == 0);
  CHECK(std::filesystem::exists(dir / "data.csv.labels.csv"));
  CHECK(std::filesystem::exists(dir / "data.csv.spec.json"));
  const Dataset data = load_dataset(dir / "data.csv");
  CHECK(data.size() == 2000);

  SUBCASE("single point sketch equals its feature") {
    save_dataset(Dataset(test::row_matrix({{0.2, -0.3}})), dir / "one.csv");
    REQUIRE(cskit_run({"sketch", "--data", p("one.csv"), "--m", "4", "--sigma", "0.5", "--seed", "1", "--out",
                       p("one.json")}).code == 0);
    const SketchFile sf = load_sketch(dir / "one.json");
    CHECK(sf.sketch.values == feature_map(test::vec({0.2, -0.3}), sf.freqs));
  }
  SUBCASE("sketching is deterministic") {
    for (const char* out : {"a.json", "b.json"})
      REQUIRE(cskit_run({"sketch", "--data", p("data.csv"), "--m", "50", "--sigma", "0.1", "--seed", "3", "--out",
                         p(out)}).code == 0);
    CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
  }
  SUBCASE("merged halves equal the full sketch") {
    save_dataset(Dataset(data.points().topRows(700)), dir / "h1.bin");
    save_dataset(Dataset(data.points().bottomRows(1300)), dir / "h2.bin");
    for (const char* name : {"data.csv", "h1.bin", "h2.bin"})
      REQUIRE(cskit_run({"sketch", "--data", p(name), "--m", "64", "--sigma", "0.2", "--seed", "9", "--out",
                         p((std::string(name) + ".sk.json").c_str())}).code == 0);
    REQUIRE(cskit_run({"merge", p("h1.bin.sk.json"), p("h2.bin.sk.json"), "--out", p("merged.json")}).code == 0);
    const SketchFile full = load_sketch(dir / "data.csv.sk.json");
    const SketchFile merged = load_sketch(dir / "merged.json");
    CHECK(merged.sketch.count == 2000);
    CHECK((merged.sketch.values - full.sketch.values).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("decode and re-evaluate") {
    REQUIRE(cskit_run({"sketch", "--data", p("data.csv"), "--m", "300", "--sigma", "0.1", "--seed", "2", "--out",
                       p("s.json")}).code == 0);
    for (const char* dec : {"proposed-meanshift", "clompr", "proposed-grid", "clompr-meanshift"}) {
      const Run r = cskit_run({"decode", "--sketch", p("s.json"), "--decoder", dec, "--k", "3", "-L", "10",
                               "--grid-points", "31", "--seed", "2", "--out", p("r.json")});
      REQUIRE(r.code == 0);
      const DecoderResult res = load_result(dir / "r.json");
      CHECK(res.decoder == dec);
      CHECK(res.components.size() == 3);
      const Run e = cskit_run({"eval", "--result", p("r.json"), "--sketch", p("s.json"), "--data", p("data.csv")});
      REQUIRE(e.code == 0);
      const auto report = nlohmann::json::parse(e.out);
      CHECK(std::abs(report.at("residual_norm").get<double>() - res.residual_norm) <= 1e-10);
      CHECK(report.at("rse").get<double>() > 0.0);
    }
    const Run gauss = cskit_run({"decode", "--sketch", p("s.json"), "--k", "3", "--model", "gaussian", "-L", "10",
                                 "--out", p("g.json")});
    CHECK(gauss.code == 0);
  }
  SUBCASE("usage and validation errors") {
    REQUIRE(cskit_run({"sketch", "--data", p("data.csv"), "--m", "20", "--sigma", "0.1", "--out", p("s.json")}).code ==
            0);
    const Run unknown = cskit_run({"decode", "--sketch", p("s.json"), "--decoder", "kmeans", "--k", "3", "--out",
                                   p("x.json")});
    CHECK(unknown.code == 1);
    CHECK(unknown.err.find("kmeans") != std::string::npos);
    const Run small_t = cskit_run({"decode", "--sketch", p("s.json"), "--k", "3", "--T", "2", "--out", p("x.json")});
    CHECK(small_t.code == 1);
    CHECK(small_t.err.find("T >= k") != std::string::npos);
    CHECK(cskit_run({"decode", "--sketch", p("s.json"), "--k", "3", "--model", "dirac", "--decoder", "clompr",
                     "--box", "1", "-1", "--out", p("x.json")}).code == 1);
    CHECK(cskit_run({}).code == 1);
    CHECK(cskit_run({"frobnicate"}).code == 1);
    CHECK(cskit_run({"sketch", "--data", p("data.csv"), "--m", "0", "--sigma", "0.1", "--out", p("x.json")}).code == 1);
    CHECK(cskit_run({"--help"}).code == 0);

    std::ofstream(dir / "broken.json") << "{ not json";
    CHECK(cskit_run({"decode", "--sketch", p("broken.json"), "--k", "3", "--out", p("x.json")}).code == 2);
    std::ofstream(dir / "empty.csv") << "";
    CHECK(cskit_run({"sketch", "--data", p("empty.csv"), "--m", "4", "--sigma", "1", "--out", p("x.json")}).code == 2);
  }
  SUBCASE("lloyd") {
    const Run r = cskit_run({"lloyd", "--data", p("data.csv"), "--k", "3", "--out", p("centroids.csv")});
    REQUIRE(r.code == 0);
    CHECK(load_dataset(dir / "centroids.csv").size() == 3);
    CHECK(nlohmann::json::parse(r.out).at("mse").get<double>() > 0.0);
  }
}

TEST_CASE("sweep") {
  const auto dir = test::temp_dir("sweep");
  nlohmann::json cfg = {{"dataset", {{"generate", {{"k", 3}, {"d", 2}, {"n", 1500}, {"seed", 1}}}}},
                        {"m", {100}},
                        {"sigma", {0.1}},
                        {"L", {5}},
                        {"decoders", {"proposed-meanshift"}},
                        {"k", 3},
                        {"repetitions", 1},
                        {"seed", 7},
                        {"output", "out.csv"}};
  write_json(cfg, dir / "one.json");

  SUBCASE("one cell gives one row") {
    REQUIRE(cskit_run({"sweep", "--config", (dir / "one.json").string()}).code == 0);
    std::ifstream in(dir / "out.csv");
    const auto rows = read_sweep_csv(in);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].error.empty());
    CHECK(rows[0].T == 6);
    CHECK(rows[0].L == 5);
    CHECK(rows[0].search == "meanshift");
    std::string header;
    std::ifstream again(dir / "out.csv");
    std::getline(again, header);
    CHECK(header == kSweepHeader);
  }
  SUBCASE("rows are reproducible and sorted") {
    cfg["m"] = {40, 100};
    cfg["sigma"] = {0.2, 0.1};
    cfg["L"] = {3, 5};
    cfg["decoders"] = {"proposed-meanshift", "clompr", "proposed-grid"};
    cfg["models"] = {"dirac", "gaussian"};
    cfg["grid_points_per_axis"] = 21;
    cfg["repetitions"] = 2;
    const ExperimentConfig ec = ExperimentConfig::from_json(cfg, dir);
    const auto a = run_sweep(ec, 1);
    const auto b = run_sweep(ec, 3);
    // clompr: 1 model x 1 L; grid: 2 models x 1 L; meanshift: 2 models x 2 L.
    CHECK(a.size() == 2 * 2 * 2 * (1 + 2 + 4));
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].decoder == b[i].decoder);
      CHECK(a[i].seed == b[i].seed);
      CHECK(a[i].mse == b[i].mse);
      CHECK(a[i].rse == b[i].rse);
      CHECK(a[i].error.empty());
    }
    CHECK(std::is_sorted(a.begin(), a.end(), [](const SweepRow& x, const SweepRow& y) {
      return std::tie(x.decoder, x.model, x.search, x.m, x.sigma, x.L, x.seed) <
             std::tie(y.decoder, y.model, y.search, y.m, y.sigma, y.L, y.seed);
    }));

    // Any row can be rebuilt from its recorded seed with sketch + decode.
    const Dataset data = load_experiment_dataset(ec);
    save_dataset(data, dir / "data.bin");
    const auto& row = a.back();
    REQUIRE(cskit_run({"sketch", "--data", (dir / "data.bin").string(), "--m", std::to_string(row.m), "--sigma",
                       std::to_string(row.sigma), "--seed", std::to_string(row.seed), "--out",
                       (dir / "s.json").string()}).code == 0);
    REQUIRE(cskit_run({"decode", "--sketch", (dir / "s.json").string(), "--decoder", row.decoder, "--model", row.model,
                       "--k", "3", "-L", std::to_string(row.L), "--seed", std::to_string(row.seed), "--out",
                       (dir / "r.json").string()}).code == 0);
    CHECK(load_result(dir / "r.json").residual_norm == doctest::Approx(row.residual_norm).epsilon(1e-12));
  }
  SUBCASE("row failures are recorded") {
    cfg["dataset"]["generate"]["d"] = 6;
    cfg["decoders"] = {"proposed-grid", "proposed-meanshift"};
    cfg["grid_points_per_axis"] = 101;
    const auto rows = run_sweep(ExperimentConfig::from_json(cfg, dir), 1);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].decoder == "proposed-grid");
    CHECK(rows[0].error.find("node cap") != std::string::npos);
    CHECK(rows[1].error.empty());
  }
  SUBCASE("invalid configs") {
    cfg["m"] = nlohmann::json::array();
    CHECK_THROWS_AS(ExperimentConfig::from_json(cfg, dir), ConfigError);
    cfg["m"] = {10};
    cfg["repetitions"] = 0;
    CHECK_THROWS_AS(ExperimentConfig::from_json(cfg, dir), ConfigError);
    cfg["repetitions"] = 1;
    cfg["decoders"] = {"nope"};
    CHECK_THROWS_AS(ExperimentConfig::from_json(cfg, dir), ConfigError);
    write_json(cfg, dir / "bad.json");
    CHECK(cskit_run({"sweep", "--config", (dir / "bad.json").string()}).code == 1);
  }
}

TEST_CASE("sweep CSV quoting") {
  SweepRow r;
  r.decoder = "clompr";
  r.model = "dirac";
  r.search = "gradient";
  r.error = "bad, \"quoted\" thing";
  std::stringstream s;
  write_sweep_csv({r}, s);
  const auto back = read_sweep_csv(s);
  REQUIRE(back.size() == 1);
  CHECK(back[0].error == r.error);
}
