#pragma once

#include "config.hpp"

#include <filesystem>

namespace robin::cli {

int cmd_forward(const RunConfig& rc, const std::filesystem::path& out);
int cmd_sensitivity(const RunConfig& rc, const std::filesystem::path& out);
int cmd_reconstruct(const RunConfig& rc, const std::filesystem::path& out);
int cmd_probe(const RunConfig& rc, const std::filesystem::path& out, unsigned jobs);
int cmd_compare_bc(const RunConfig& rc, const std::filesystem::path& out);

/// rc may be null: the checks then run on their default desk-scale grids.
/// corrupt_oracle deliberately breaks one closed-form target; the run must
/// notice and exit nonzero.
int cmd_oracle_check(const RunConfig* rc, const std::filesystem::path& out, bool corrupt_oracle);

}  // namespace robin::cli
