#pragma once

#include <filesystem>

#include "towerplex/config.hpp"

namespace towerplex {

/// Builds the chain to cfg.stages and writes stage snapshots plus the
/// schedule record into cfg.out_dir. Deterministic: identical configs yield
/// byte-identical outputs.
void cmd_build(const RunConfig& cfg);

/// Continues from the deepest snapshot in cfg.out_dir up to cfg.stages.
void cmd_resume(const RunConfig& cfg);

/// Computes the configured diagnostics on the deepest snapshot and writes
/// weights.csv, rwm.csv, rigidity.csv, power.csv and sweep.csv.
void cmd_stats(const RunConfig& cfg);

/// Emits plot_<name>.txt (x y) pairs from the CSV files in the directory.
void cmd_export(const std::filesystem::path& out_dir);

/// Loads a chain back from the snapshots in `dir` (shared by resume/stats).
Chain load_chain(const RunConfig& cfg, const std::filesystem::path& dir);

}  // namespace towerplex
