#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "json.hpp"
#include "vcs/cli.hpp"
#include "vcs/io/mesh_io.hpp"
#include "vcs/io/tables.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result vcs_run(std::vector<std::string> args) {
  args.insert(args.begin(), "vcs");
  std::ostringstream out, err;
  const int code = vcs::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliPipeline : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / "vcs_test_cli";
    fs::remove_all(dir_);
    fs::create_directories(dir_ / "models");
    std::ofstream(dir_ / "spec.json") << R"({
      "centerline": {"kind": "aorta", "ascending": 30, "arch_radius": 25, "descending": 40},
      "radius": {"base": 8, "terms": [{"kind": "sinusoidal", "amplitude": 1.5, "m_tau": 1, "m_theta": 1}]},
      "tessellation": {"n_tau": 120, "n_theta": 32}
    })";
  }
  static std::string p(const std::string& name) { return (dir_ / name).string(); }
  static fs::path dir_;
};

fs::path CliPipeline::dir_;

}  // namespace

TEST(CliParsing, Helpers) {
  EXPECT_EQ(vcs::cli::parse_int_range("5..9:2"), (std::vector<int>{5, 7, 9}));
  EXPECT_EQ(vcs::cli::parse_int_range("5,9,15"), (std::vector<int>{5, 9, 15}));
  EXPECT_EQ(vcs::cli::parse_int_range("7"), (std::vector<int>{7}));
  EXPECT_EQ(vcs::cli::parse_point("1,-2,3.5"), vcs::Vec3(1, -2, 3.5));
  EXPECT_EQ(vcs::cli::parse_dims("64x32", 2), (std::vector<int>{64, 32}));
  EXPECT_THROW((void)vcs::cli::parse_dims("64x32", 3), std::exception);
  EXPECT_THROW((void)vcs::cli::parse_point("1,2"), std::exception);
  EXPECT_EQ(vcs::cli::exit_code_for(vcs::ErrorCode::parse), 2);
  EXPECT_EQ(vcs::cli::exit_code_for(vcs::ErrorCode::validity), 3);
}

TEST(CliUsage, HelpAndBadArguments) {
  EXPECT_EQ(vcs_run({"--help"}).code, 0);
  EXPECT_EQ(vcs_run({}).code, 1);
  EXPECT_EQ(vcs_run({"frobnicate"}).code, 1);
  EXPECT_EQ(vcs_run({"fit", "--mesh", "a.stl"}).code, 1);
}

TEST(CliUsage, ErrorJsonOnMissingInput) {
  const auto r = vcs_run({"--error-json", "residuals", "--mesh", "/nonexistent/a.stl", "--model",
                          "/nonexistent/m.json", "--report", "/tmp/r.json"});
  EXPECT_EQ(r.code, 2);
  const auto j = json::parse(r.err);
  EXPECT_EQ(j["error"]["exit_code"], 2);
  EXPECT_TRUE(j["error"]["message"].is_string());
}

TEST_F(CliPipeline, EndToEnd) {
  auto r = vcs_run({"synth", "--spec", p("spec.json"), "--out", p("a.stl"), "--oracle", p("oracle.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  r = vcs_run({"synth", "--spec", p("spec.json"), "--out", p("b.stl"), "--noise", "0.1", "--seed", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto oracle = json::parse(vcs::io::read_file(p("oracle.json")));
  EXPECT_EQ(oracle["vertex_coordinates"].size(), 120u * 32);

  r = vcs_run({"centerline", "--mesh", p("a.stl"), "--voxel", "1.0", "--out", p("a_cl.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  r = vcs_run({"fit", "--mesh", p("a.stl"), "--centerline", p("a_cl.json"), "--out", p("models/a.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  r = vcs_run({"fit", "--mesh", p("a.stl"), "--centerline", p("a_cl.json"), "--out", p("a_again.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(vcs::io::read_file(p("models/a.json")), vcs::io::read_file(p("a_again.json")));

  r = vcs_run({"fit", "--mesh", p("a.stl"), "--centerline", p("a_cl.json"), "--K", "3", "--out", p("x.json")});
  EXPECT_EQ(r.code, 1);

  r = vcs_run({"centerline", "--mesh", p("b.stl"), "--voxel", "1.0", "--out", p("b_cl.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  r = vcs_run({"fit", "--mesh", p("b.stl"), "--centerline", p("b_cl.json"), "--out", p("models/b.json")});
  ASSERT_EQ(r.code, 0) << r.err;

  r = vcs_run({"residuals", "--mesh", p("a.stl"), "--model", p("models/a.json"), "--report", p("res.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = json::parse(vcs::io::read_file(p("res.json")));
  EXPECT_LT(report["mean"].get<double>(), 0.08);

  // coordinates forward and back
  std::ofstream(p("pts.csv")) << "x,y,z\n1,0.5,20\n5,-2,40\n";
  r = vcs_run({"coords", "--model", p("models/a.json"), "--points", p("pts.csv"), "--out", p("vcs.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  r = vcs_run({"coords", "--model", p("models/a.json"), "--points", p("vcs.csv"), "--inverse", "--out", p("back.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto src = vcs::io::read_csv(p("pts.csv"));
  const auto back = vcs::io::read_csv(p("back.csv"));
  const auto bx = back.require("x"), by = back.require("y"), bz = back.require("z");
  ASSERT_EQ(back.rows.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_NEAR(back.rows[i][bx], src.rows[i][0], 1e-9);
    EXPECT_NEAR(back.rows[i][by], src.rows[i][1], 1e-9);
    EXPECT_NEAR(back.rows[i][bz], src.rows[i][2], 1e-9);
  }

  r = vcs_run({"tessellate", "--model", p("models/a.json"), "--ntau", "50", "--ntheta", "24", "--out", p("t.obj")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(vcs::io::read_mesh(p("t.obj")).faces.size(), 2u * 49 * 24);

  r = vcs_run({"sweep", "--mesh", p("a.stl"), "--centerline", p("a_cl.json"), "--L", "9", "--K", "5,9",
               "--R", "8", "--out", p("sweep.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto sweep = vcs::io::read_csv(p("sweep.csv"));
  ASSERT_EQ(sweep.rows.size(), 2u);
  EXPECT_GT(sweep.rows[0][sweep.require("mean")], sweep.rows[1][sweep.require("mean")]);

  r = vcs_run({"coregister", "--models", p("models"), "--grid", "32x16", "--out", p("aligned")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir_ / "aligned" / "transforms.json"));
  fs::remove(dir_ / "aligned" / "transforms.json");
  r = vcs_run({"pca", "--models", p("aligned"), "--out", p("cohort.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ofstream(p("alphas.csv")) << "alpha\n1.0\n";
  r = vcs_run({"synth-shape", "--cohort", p("cohort.json"), "--alphas", p("alphas.csv"), "--sigma-units",
               "--out", p("synth.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  r = vcs_run({"modes", "--cohort", p("cohort.json"), "--mode", "0", "--out", p("mode_cl.csv"), "--radius-out",
               p("mode_r.csv")});
  ASSERT_EQ(r.code, 0) << r.err;

  // field sampling and atlas
  fs::create_directories(dir_ / "sampled");
  for (const std::string name : {"a", "b"}) {
    {
      std::ofstream f(p("field_" + name + ".csv"));
      f << "x,y,z,p\n";
      for (int i = 0; i < 20; ++i)
        for (int k = 0; k < 20; ++k) f << (i * 4.0 - 10) << ",0," << (k * 8.0) << "," << (name == "a" ? i : k) << "\n";
    }
    r = vcs_run({"sample-field", "--model", p("models/" + name + ".json"), "--field", p("field_" + name + ".csv"),
                 "--grid", "10x8x3", "--out", p("sampled/" + name + ".csv")});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  r = vcs_run({"atlas", "--sampled", p("sampled"), "--csv", p("atlas.csv"), "--out", p("atlas.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  r = vcs_run({"threshold", "--atlas", p("atlas.json"), "--fraction", "0.8", "--out", p("region.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_FALSE(vcs::io::read_csv(p("region.csv")).rows.empty());
  r = vcs_run({"threshold", "--atlas", p("atlas.json"), "--fraction", "1.0", "--out", p("region.csv")});
  EXPECT_EQ(r.code, 1);
}
