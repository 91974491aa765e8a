#include <doctest.h>

#include <filesystem>

#include "matchlab/error.hpp"
#include "matchlab/instance_io.hpp"
#include "support.hpp"

using namespace matchlab;

TEST_CASE("the K3 file parses to the fixture") {
  const auto p = read_problem_file(matchlab::testing::data_path("k3.json"));
  CHECK(p == matchlab::testing::k3());
}

TEST_CASE("JSON round trip keeps field order") {
  const auto text = problem_to_json(matchlab::testing::k3());
  CHECK(text ==
        "{\"students\":3,\"schools\":[{\"id\":0,\"quota\":1},{\"id\":1,\"quota\":1},"
        "{\"id\":2,\"quota\":1}],\"preferences\":[[1,0,2],[0,1,2],[0,1,2]],"
        "\"priorities\":[[0,2,1],[1,0,2],[0,1,2]]}\n");
  CHECK(problem_from_json(text) == matchlab::testing::k3());

  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = matchlab::testing::random_problem(rng, {9, 9, 3, true, true});
    CHECK(problem_from_json(problem_to_json(p)) == p);
  }
}

TEST_CASE("malformed documents") {
  auto kind_of = [](std::string_view text) {
    try {
      problem_from_json(text);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::index;
  };
  CHECK(kind_of("{") == ErrorKind::malformed_input);
  CHECK(kind_of("[]") == ErrorKind::malformed_input);
  CHECK(kind_of(R"({"students":1,"schools":[],"preferences":[[]]})") ==
        ErrorKind::malformed_input);
  CHECK(kind_of(R"({"students":1.5,"schools":[],"preferences":[],"priorities":[]})") ==
        ErrorKind::malformed_input);
  CHECK(kind_of(R"({"students":1,"schools":[{"id":1,"quota":1}],"preferences":[[0]],"priorities":[[0]]})") ==
        ErrorKind::malformed_input);
  CHECK(kind_of(R"({"students":1,"schools":[{"id":0,"quota":1}],"preferences":[["a"]],"priorities":[[0]]})") ==
        ErrorKind::malformed_input);
}

TEST_CASE("parsing does not validate the problem") {
  const auto p = problem_from_json(
      R"({"students":0,"schools":[],"preferences":[],"priorities":[]})");
  CHECK(p.student_count == 0);
  CHECK_FALSE(validate_problem(p).empty());
}

TEST_CASE("file helpers") {
  const auto dir = std::filesystem::temp_directory_path() / "matchlab_io_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "k3.json";
  write_problem_file(path, matchlab::testing::k3());
  CHECK(read_problem_file(path) == matchlab::testing::k3());
  CHECK_FALSE(std::filesystem::exists(path.string() + ".tmp"));
  CHECK_THROWS_AS(read_problem_file(dir / "missing.json"), Error);
  CHECK_THROWS_AS(write_file_atomically(dir / "no" / "such" / "dir.txt", "x"), Error);
  std::filesystem::remove_all(dir);
}
