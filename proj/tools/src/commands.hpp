#pragma once

#include <cstdint>
#include <filesystem>

#include "corf/config.hpp"
#include "corf/synthetic.hpp"

namespace corf::cli {

int run_fit(const RunConfig& config);
int run_tune(const RunConfig& config);
int run_cv(const RunConfig& config);
int run_predict(const RunConfig& config);
int run_simulate(const SyntheticSpec& spec, const std::filesystem::path& out);
int run_report(const RunConfig& config);

}  // namespace corf::cli
