#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "opscale/errors.hpp"
#include "opscale/instances.hpp"
#include "opscale/problem_io.hpp"

using namespace opscale;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "opscale_test_problem_io";
  fs::create_directories(dir);
  return dir / name;
}

void write_text(const fs::path& path, const std::string& text) { std::ofstream(path) << text; }

std::string format_error(const json& doc) {
  try {
    problem_from_json(doc, "doc.json");
  } catch (const FormatError& e) {
    return e.what();
  }
  return "";
}

json small_doc() {
  return json::parse(R"({"m": 1, "n": 2, "k": 2, "matrices": [[1, 0], [0, 1]]})");
}

}  // namespace

TEST(ProblemIo, RoundTripIsBitExact) {
  const ScalingProblem p = hilbert_instance(5, 7, Seed{1});
  const fs::path path = scratch("hilbert.json");
  ProblemMeta meta;
  meta.family = "hilbert";
  meta.seed = 18446744073709551615ULL;
  meta.spec = {{"n", 5}, {"k", 7}};
  save_problem(p, path, meta);
  const ProblemFile back = read_problem_file(path);
  ASSERT_EQ(back.problem.k(), 7);
  for (Index i = 0; i < p.k(); ++i) EXPECT_EQ(back.problem[i], p[i]);
  EXPECT_EQ(back.meta.family, "hilbert");
  EXPECT_EQ(back.meta.seed, meta.seed);
  EXPECT_EQ(back.meta.spec, meta.spec);

  const json doc = json::parse(std::ifstream(path));
  EXPECT_EQ(doc["meta"]["seed"], "18446744073709551615");
  EXPECT_EQ(doc["m"], 5);
  EXPECT_EQ(doc["matrices"].size(), 7u);
  EXPECT_EQ(doc["matrices"][0].size(), 25u);
}

TEST(ProblemIo, RowMajorLayout) {
  Matrix a(2, 3);
  a << 1, 2, 3, 4, 5, 6;
  Matrix b = Matrix::Identity(2, 3);
  const json doc = problem_to_json(ScalingProblem({a, b}));
  EXPECT_EQ(doc["matrices"][0], json::parse("[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]"));
  const ProblemFile back = problem_from_json(doc, "x");
  EXPECT_EQ(back.problem[0], a);
  EXPECT_FALSE(back.meta.seed.has_value());
}

TEST(ProblemIo, ShapeErrorsNameTheField) {
  json doc = small_doc();
  doc["k"] = 0;
  EXPECT_NE(format_error(doc).find("k"), std::string::npos);

  doc = small_doc();
  doc["matrices"][1] = json::array({1.0});
  const std::string msg = format_error(doc);
  EXPECT_NE(msg.find("doc.json"), std::string::npos) << msg;
  EXPECT_NE(msg.find("matrices[1]"), std::string::npos) << msg;

  doc = small_doc();
  doc.erase("m");
  EXPECT_NE(format_error(doc).find("'m'"), std::string::npos);

  doc = small_doc();
  doc["matrices"][0][0] = "one";
  EXPECT_FALSE(format_error(doc).empty());

  doc = small_doc();
  doc["k"] = 3;
  EXPECT_FALSE(format_error(doc).empty());

  doc = small_doc();
  doc["meta"] = {{"seed", "not a number"}};
  EXPECT_FALSE(format_error(doc).empty());
}

TEST(ProblemIo, DegenerateProblemIsAFormatError) {
  json doc = small_doc();
  doc["matrices"] = json::array({json::array({0.0, 0.0}), json::array({0.0, 0.0})});
  const std::string msg = format_error(doc);
  EXPECT_NE(msg.find("degenerate"), std::string::npos) << msg;
}

TEST(ProblemIo, FileErrors) {
  EXPECT_THROW(read_problem_file(scratch("does-not-exist.json")), IoError);
  const fs::path bad = scratch("bad.json");
  write_text(bad, "{\"m\": 1,\n \"n\": }");
  try {
    read_problem_file(bad);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(save_problem(hilbert_instance(2, 2, Seed{1}), scratch("no/such/dir/p.json")), IoError);
}
