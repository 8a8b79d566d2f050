#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "towerplex/chain.hpp"

namespace towerplex {

/// Textual stage snapshot. Header line `stage n b h eps d kappa`, then
/// interval-set sections X Y E I Istar D, partition sections Pprime Q, and
/// map sections R S tau. Rationals use the canonical "p/q" form.
std::string serialize_stage(const StageState& st, const Rat& kappa);

struct ParsedStage {
  StageState state;
  Rat kappa;
};

ParsedStage parse_stage(const std::string& text, const std::string& origin);

std::filesystem::path stage_file_path(const std::filesystem::path& dir, int n);

/// Write-temp-then-rename; partial files never become visible.
void atomic_write(const std::filesystem::path& path, const std::string& content);

/// Per-stage schedule record `n M delta j eps h search_value`, one line each.
std::string serialize_schedule(const std::vector<StageState>& stages);
void apply_schedule_record(const std::string& text, std::vector<StageState>& stages);

}  // namespace towerplex
