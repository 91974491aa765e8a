#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "matchlab/market.hpp"

namespace matchlab {

/// Instance documents look like
///
///   {"students": N,
///    "schools": [{"id": 0, "quota": q0}, ...],
///    "preferences": [[schoolId, ...] per student],
///    "priorities": [[studentId, ...] per school]}
///
/// School ids must be 0, 1, 2, ... in order. Parsing checks the document's
/// shape only (Error(malformed_input)); run validate_problem for the rest.
Problem problem_from_json(std::string_view text);
std::string problem_to_json(const Problem& problem);

Problem read_problem_file(const std::filesystem::path& path);

/// Writes through a temporary sibling file and renames it into place.
void write_problem_file(const std::filesystem::path& path,
                        const Problem& problem);

/// Atomic text write shared by every file the library produces.
void write_file_atomically(const std::filesystem::path& path,
                           std::string_view contents);

}  // namespace matchlab
