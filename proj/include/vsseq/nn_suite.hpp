#pragma once

#include <string>
#include <utility>
#include <vector>

#include "vsseq/gradcheck.hpp"

namespace vsseq::nn {

// Gradient checks for every differentiable op plus the assembled model.
// Shared by the CLI `gradcheck` subcommand and the test suites.
std::vector<std::pair<std::string, GradCheckReport>> run_gradient_suite(
    double step = 1e-5, double tol = 1e-4, std::uint64_t seed = 42);

}  // namespace vsseq::nn
