#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "towerplex/chain.hpp"

namespace towerplex {

enum class StarterKind { Odometer, Chacon, Custom };

/// Whole-run configuration parsed from the flat `key = value` file.
struct RunConfig {
  StarterKind starter_kind = StarterKind::Odometer;
  std::size_t starter_depth = 8;
  RankOneSpec custom_spec;  // custom starter only

  int stages = 1;
  TransferMode mode = TransferMode::Uniform;
  PieceBudget budget;
  std::filesystem::path out_dir = "out";

  ChainSchedule schedule;

  // Diagnostics selection for the stats command.
  std::size_t weights_k = 10;
  std::size_t rwm_n = 20;
  std::optional<IntervalSet> diag_f, diag_a, diag_b;  // defaults to X_1
  std::vector<std::uint64_t> rho;
  std::vector<std::vector<int>> power_vectors;
  std::size_t power_n = 13;
  std::uint64_t sweep_n = 40;

  RankOneSpec starter_spec() const;
};

RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace towerplex
