#include <CLI11.hpp>
#include <iostream>

#include "towerplex/cli.hpp"
#include "towerplex/errors.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  int stages = 0;
  std::uint64_t piece_budget = 0;
  std::string mode;
};

towerplex::RunConfig resolve(const CommonArgs& args, bool need_config) {
  towerplex::RunConfig cfg;
  if (!args.config_path.empty()) {
    cfg = towerplex::load_config(args.config_path);
  } else if (need_config) {
    throw towerplex::Error(towerplex::ErrorCode::ConfigInvalid, "--config is required");
  }
  if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
  if (args.stages > 0) cfg.stages = args.stages;
  if (args.piece_budget > 0) cfg.budget.max_pieces = args.piece_budget;
  if (args.mode == "uniform") cfg.mode = towerplex::TransferMode::Uniform;
  else if (args.mode == "literal") cfg.mode = towerplex::TransferMode::Literal;
  else if (!args.mode.empty())
    throw towerplex::Error(towerplex::ErrorCode::ConfigInvalid, "--mode must be uniform|literal");
  return cfg;
}

void add_common(CLI::App* sub, CommonArgs& args, bool with_config = true) {
  if (with_config) sub->add_option("--config", args.config_path, "configuration file");
  sub->add_option("--out", args.out_dir, "output directory");
  sub->add_option("--stages", args.stages, "number of stages");
  sub->add_option("--piece-budget", args.piece_budget, "piece budget");
  sub->add_option("--mode", args.mode, "transfer formula: uniform|literal");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact multiplexed interval-map chains and their mixing diagnostics"};
  app.require_subcommand(1);

  CommonArgs args;
  CLI::App* build = app.add_subcommand("build", "build the chain and write stage snapshots");
  add_common(build, args);
  CLI::App* resume = app.add_subcommand("resume", "continue from existing snapshots");
  add_common(resume, args);
  CLI::App* stats = app.add_subcommand("stats", "compute diagnostics CSVs from snapshots");
  add_common(stats, args);
  CLI::App* exp = app.add_subcommand("export", "emit (x, y) plot data from the CSVs");
  exp->add_option("--out", args.out_dir, "directory holding the CSVs")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (build->parsed()) towerplex::cmd_build(resolve(args, true));
    else if (resume->parsed()) towerplex::cmd_resume(resolve(args, true));
    else if (stats->parsed()) towerplex::cmd_stats(resolve(args, true));
    else if (exp->parsed()) towerplex::cmd_export(args.out_dir);
  } catch (const towerplex::Error& e) {
    std::cout << "ERROR " << towerplex::error_code_name(e.code()) << " "
              << (e.stage() >= 0 ? std::to_string(e.stage()) : std::string("-")) << " "
              << e.detail() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cout << "ERROR Internal - " << e.what() << "\n";
    return 1;
  }
  return 0;
}
