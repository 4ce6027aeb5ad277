#pragma once

#include <string>
#include <vector>

#include "hjj/problem_io.hpp"

namespace hjj {

/// Named problems shipped with the library; fixtures/<name>.json holds the
/// same content.
std::vector<std::string> fixture_names();
ProblemFile builtin_fixture(std::string const& name);

/// The state-constraint junction fixtures (abs_shift mixtures, quadratic,
/// double_well, x-dependent).
std::vector<std::string> state_constraint_fixture_names();
std::vector<std::string> flux_limited_fixture_names();

}  // namespace hjj
