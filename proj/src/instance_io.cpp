#include "matchlab/instance_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "matchlab/error.hpp"

namespace matchlab {
namespace {

using nlohmann::json;

const json& require(const json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) {
    throw Error(ErrorKind::malformed_input,
                std::string("missing field \"") + key + "\"");
  }
  return doc.at(key);
}

std::int32_t as_int(const json& value, const std::string& where) {
  if (!value.is_number_integer()) {
    throw Error(ErrorKind::malformed_input, where + " must be an integer");
  }
  const auto v = value.get<std::int64_t>();
  if (v < INT32_MIN || v > INT32_MAX) {
    throw Error(ErrorKind::malformed_input, where + " out of range");
  }
  return static_cast<std::int32_t>(v);
}

std::vector<std::vector<std::int32_t>> as_lists(const json& value,
                                                const std::string& where) {
  if (!value.is_array()) {
    throw Error(ErrorKind::malformed_input, where + " must be an array");
  }
  std::vector<std::vector<std::int32_t>> lists;
  lists.reserve(value.size());
  for (std::size_t k = 0; k < value.size(); ++k) {
    const auto& row = value[k];
    const std::string row_where = where + "[" + std::to_string(k) + "]";
    if (!row.is_array()) {
      throw Error(ErrorKind::malformed_input, row_where + " must be an array");
    }
    auto& list = lists.emplace_back();
    list.reserve(row.size());
    for (const auto& entry : row) list.push_back(as_int(entry, row_where));
  }
  return lists;
}

}  // namespace

Problem problem_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::malformed_input, e.what());
  }
  Problem problem;
  problem.student_count = as_int(require(doc, "students"), "students");
  const auto& schools = require(doc, "schools");
  if (!schools.is_array()) {
    throw Error(ErrorKind::malformed_input, "schools must be an array");
  }
  for (std::size_t s = 0; s < schools.size(); ++s) {
    const std::string where = "schools[" + std::to_string(s) + "]";
    const auto id = as_int(require(schools[s], "id"), where + ".id");
    if (std::cmp_not_equal(id, s)) {
      throw Error(ErrorKind::malformed_input,
                  where + ".id must equal its position " + std::to_string(s));
    }
    problem.quotas.push_back(as_int(require(schools[s], "quota"), where + ".quota"));
  }
  problem.preferences = as_lists(require(doc, "preferences"), "preferences");
  problem.priorities = as_lists(require(doc, "priorities"), "priorities");
  return problem;
}

std::string problem_to_json(const Problem& problem) {
  nlohmann::ordered_json doc;
  doc["students"] = problem.student_count;
  auto schools = nlohmann::ordered_json::array();
  for (SchoolId s = 0; s < problem.school_count(); ++s) {
    nlohmann::ordered_json entry;
    entry["id"] = s;
    entry["quota"] = problem.quotas[s];
    schools.push_back(std::move(entry));
  }
  doc["schools"] = std::move(schools);
  doc["preferences"] = problem.preferences;
  doc["priorities"] = problem.priorities;
  return doc.dump() + "\n";
}

Problem read_problem_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return problem_from_json(buffer.str());
}

void write_problem_file(const std::filesystem::path& path,
                        const Problem& problem) {
  write_file_atomically(path, problem_to_json(problem));
}

void write_file_atomically(const std::filesystem::path& path,
                           std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::io, "cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(ErrorKind::io, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorKind::io, "cannot rename into " + path.string());
  }
}

}  // namespace matchlab
