#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <sstream>

#include "nullitylab/io.hpp"
#include "support/corpus.hpp"

using namespace nullitylab;

namespace {

// Scratch files land in the test binary's working directory.
std::string temp_path(const std::string& stem) { return "./" + stem; }

}  // namespace

TEST_CASE("model round trip is bitwise exact") {
  const auto& ex = corpus::example(5, 1);
  ModelFile mf;
  mf.name = "roundtrip";
  mf.model = ex.model;
  mf.generator = "construct";
  mf.parameters = {{"n", 5}, {"v0_dim", 1}, {"a", 0.1}, {"b", 0.05}};
  std::string path = temp_path("roundtrip_model.json");
  write_model(path, mf);
  ModelFile back = read_model(path);
  REQUIRE(back.name == mf.name);
  REQUIRE(back.generator == "construct");
  REQUIRE(back.model.algebra.dim == mf.model.algebra.dim);
  for (size_t t = 0; t < mf.model.algebra.c.flat().size(); ++t)
    REQUIRE(back.model.algebra.c.flat()[t] == mf.model.algebra.c.flat()[t]);
  for (int i = 0; i < mf.model.metric.rows(); ++i)
    for (int j = 0; j < mf.model.metric.cols(); ++j)
      REQUIRE(back.model.metric(i, j) == mf.model.metric(i, j));
  // Provenance restores the translation split.
  REQUIRE(back.model.translation_dim == 5);
  std::remove(path.c_str());
}

TEST_CASE("field-level diagnostics") {
  REQUIRE_THROWS_WITH(model_from_json(json{{"name", "x"}}),
                      Catch::Matchers::ContainsSubstring("algebra"));
  json doc = model_to_json([] {
    ModelFile mf;
    mf.name = "bad";
    mf.model = so3_biinvariant_model();
    return mf;
  }());
  doc["metric"][0][0] = -5.0;  // break positive definiteness
  REQUIRE_THROWS_WITH(model_from_json(doc),
                      Catch::Matchers::ContainsSubstring("positive definite"));
  doc["metric"][0][0] = "oops";
  REQUIRE_THROWS_WITH(model_from_json(doc),
                      Catch::Matchers::ContainsSubstring("metric"));
}

TEST_CASE("missing files raise io errors") {
  REQUIRE_THROWS_AS(read_model("/nonexistent/dir/model.json"), io_error);
  ModelFile mf;
  mf.name = "x";
  mf.model = so3_biinvariant_model();
  REQUIRE_THROWS_AS(write_model("/nonexistent/dir/model.json", mf), io_error);
}

TEST_CASE("report invariant: every flag has a residual entry") {
  NullityReport rep = verify_structure(flat_abelian_model(3));
  json doc = report_to_json("flat3", rep);
  for (auto& [key, val] : doc.at("flags").items())
    REQUIRE(doc.at("residuals").contains(key));
  REQUIRE(doc.at("tool_version") == tool_version);
  REQUIRE(doc.at("tolerances").contains("rank_tol"));
}

TEST_CASE("sweep CSV layout") {
  auto rows = sweep({5}, {1, 2}, {0.1}, {0.05});
  std::ostringstream out;
  write_sweep_csv(out, rows);
  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  REQUIRE(header ==
          "n,v0_dim,a,b,d,dim_nu,dim_nu1,dim_nu2,dim_U,genericity,structure_pass");
  std::string row1, row2;
  std::getline(in, row1);
  std::getline(in, row2);
  REQUIRE(row1.substr(0, 4) == "5,1,");
  REQUIRE(row2.find("na") != std::string::npos);  // inadmissible cell
}

TEST_CASE("trajectory CSV") {
  HomogeneousModel model = flat_abelian_model(2);
  Vec v0(2);
  v0 << 1, 2;
  Trajectory traj = geodesic(model, v0, 0.1, 0.05);
  std::string path = temp_path("traj.csv");
  write_trajectory_csv(path, traj);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  REQUIRE(header == "t,v1,v2");
  std::remove(path.c_str());
}
