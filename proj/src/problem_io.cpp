#include "opscale/problem_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "opscale/errors.hpp"

namespace opscale {
namespace {

using nlohmann::json;

[[noreturn]] void fail(std::string_view source, const std::string& field, const std::string& what) {
  throw FormatError(std::string(source) + ": field '" + field + "': " + what);
}

Index positive_field(const json& doc, std::string_view source, const char* name) {
  const auto it = doc.find(name);
  if (it == doc.end()) fail(source, name, "missing");
  if (!it->is_number_integer()) fail(source, name, "expected an integer");
  const auto value = it->get<std::int64_t>();
  if (value < 1) fail(source, name, "must be positive, got " + std::to_string(value));
  return static_cast<Index>(value);
}

}  // namespace

json problem_to_json(const ScalingProblem& p, const ProblemMeta& meta) {
  json matrices = json::array();
  for (const Matrix& a : p.matrices()) {
    json flat = json::array();
    for (Index i = 0; i < a.rows(); ++i) {
      for (Index j = 0; j < a.cols(); ++j) flat.push_back(a(i, j));
    }
    matrices.push_back(std::move(flat));
  }
  json meta_doc = {{"family", meta.family}, {"spec", meta.spec}};
  if (meta.seed) meta_doc["seed"] = std::to_string(*meta.seed);
  return {{"m", p.m()}, {"n", p.n()}, {"k", p.k()}, {"matrices", std::move(matrices)},
          {"meta", std::move(meta_doc)}};
}

ProblemFile problem_from_json(const json& doc, std::string_view source) {
  if (!doc.is_object()) fail(source, "<root>", "expected an object");
  const Index m = positive_field(doc, source, "m");
  const Index n = positive_field(doc, source, "n");
  const Index k = positive_field(doc, source, "k");

  const auto list = doc.find("matrices");
  if (list == doc.end()) fail(source, "matrices", "missing");
  if (!list->is_array()) fail(source, "matrices", "expected an array");
  if (static_cast<Index>(list->size()) != k) {
    fail(source, "matrices", "expected " + std::to_string(k) + " matrices, got " +
                                 std::to_string(list->size()));
  }

  std::vector<Matrix> matrices;
  matrices.reserve(static_cast<std::size_t>(k));
  for (std::size_t idx = 0; idx < list->size(); ++idx) {
    const json& flat = (*list)[idx];
    const std::string field = "matrices[" + std::to_string(idx) + "]";
    if (!flat.is_array()) fail(source, field, "expected an array");
    if (static_cast<Index>(flat.size()) != m * n) {
      fail(source, field, "expected " + std::to_string(m * n) + " entries, got " +
                              std::to_string(flat.size()));
    }
    Matrix a(m, n);
    for (Index e = 0; e < m * n; ++e) {
      const json& v = flat[static_cast<std::size_t>(e)];
      if (!v.is_number()) fail(source, field + "[" + std::to_string(e) + "]", "expected a number");
      a(e / n, e % n) = v.get<double>();
    }
    matrices.push_back(std::move(a));
  }

  ProblemMeta meta;
  if (const auto it = doc.find("meta"); it != doc.end()) {
    if (!it->is_object()) fail(source, "meta", "expected an object");
    if (const auto f = it->find("family"); f != it->end()) {
      if (!f->is_string()) fail(source, "meta.family", "expected a string");
      meta.family = f->get<std::string>();
    }
    if (const auto s = it->find("seed"); s != it->end()) {
      if (!s->is_string()) fail(source, "meta.seed", "expected a decimal string");
      const std::string text = s->get<std::string>();
      std::uint64_t value = 0;
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
      if (ec != std::errc() || ptr != text.data() + text.size()) {
        fail(source, "meta.seed", "not an unsigned 64-bit integer: '" + text + "'");
      }
      meta.seed = value;
    }
    if (const auto sp = it->find("spec"); sp != it->end()) meta.spec = *sp;
  }

  try {
    return {ScalingProblem(std::move(matrices)), std::move(meta)};
  } catch (const Error& e) {
    fail(source, "matrices", std::string("degenerate problem: ") + e.what());
  }
}

void save_problem(const ScalingProblem& p, const std::filesystem::path& path,
                  const ProblemMeta& meta) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << problem_to_json(p, meta).dump() << '\n';
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

ProblemFile read_problem_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::stringstream buffer;
  buffer << in.rdbuf();
  json doc;
  try {
    doc = json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    // nlohmann reports "at line L, column C".
    throw FormatError(path.string() + ": " + e.what());
  }
  return problem_from_json(doc, path.string());
}

ScalingProblem load_problem(const std::filesystem::path& path) {
  return read_problem_file(path).problem;
}

}  // namespace opscale
