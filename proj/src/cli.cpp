#include "towerplex/cli.hpp"

#include <fstream>
#include <sstream>

#include "towerplex/errors.hpp"
#include "towerplex/snapshot.hpp"
#include "towerplex/stats.hpp"

namespace towerplex {

namespace {

// Each stage file is written exactly once, right after its multiplex, with
// the running kappa of that moment; the final activated stage follows. A
// failure keeps everything written so far.
void build_and_snapshot(Chain& chain, int target, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  try {
    while (chain.built_stages() < target) {
      int n = chain.built_stages();
      chain.activate(n);
      chain.multiplex_last();
      atomic_write(stage_file_path(dir, n), serialize_stage(chain.stage(n), chain.kappa()));
    }
    chain.activate(target);
    atomic_write(stage_file_path(dir, target),
                 serialize_stage(chain.stage(target), chain.kappa()));
    atomic_write(dir / "schedule.txt", serialize_schedule(chain.stages()));
  } catch (...) {
    atomic_write(dir / "schedule.txt", serialize_schedule(chain.stages()));
    throw;
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingSnapshot, "cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string csv_cell(const Rat& r) { return r.str() + "," + r.decimal(); }

void write_vector_header(std::ostream& out, const std::vector<int>& v) {
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? " " : "") << v[i];
}

}  // namespace

void cmd_build(const RunConfig& cfg) {
  RankOneSystem starter = build_rank_one(cfg.starter_spec(), cfg.starter_depth, cfg.budget);
  Chain chain(std::move(starter), cfg.mode, cfg.schedule, cfg.budget);
  build_and_snapshot(chain, cfg.stages, cfg.out_dir);
}

Chain load_chain(const RunConfig& cfg, const std::filesystem::path& dir) {
  std::vector<StageState> stages;
  Rat kappa(0);
  for (int n = 1;; ++n) {
    auto path = stage_file_path(dir, n);
    if (!std::filesystem::exists(path)) break;
    ParsedStage parsed = parse_stage(read_file(path), path.string());
    if (parsed.state.n != n)
      throw Error(ErrorCode::CorruptSnapshot, path.string() + ": stage index mismatch");
    kappa = parsed.kappa;
    stages.push_back(std::move(parsed.state));
  }
  if (stages.empty())
    throw Error(ErrorCode::MissingSnapshot, "no stage snapshots in " + dir.string());

  // Conjugacies and scheduling context are rebuilt from the stored stages.
  stages[0].psi = PiecewiseAffineMap::identity(stages[0].x);
  RankOneSystem starter = build_rank_one(cfg.starter_spec(), cfg.starter_depth, cfg.budget);
  if (!(starter.space == stages[0].x))
    throw Error(ErrorCode::CorruptSnapshot, "snapshots do not match the configured starter");
  if (cfg.schedule.stage1_tower_partition)
    stages[0].approx = {IntervalSet(starter.tower_base)};
  else
    stages[0].approx = {stages[0].x};
  stages[0].b_prev = stages[0].x.upper();
  for (std::size_t i = 1; i < stages.size(); ++i) {
    stages[i].psi = compose(stages[i - 1].psi, stages[i - 1].tau, cfg.budget);
    stages[i].approx = stages[i - 1].p_prime;
    stages[i].b_prev = stages[i - 1].b;
  }
  auto schedule_path = dir / "schedule.txt";
  if (std::filesystem::exists(schedule_path))
    apply_schedule_record(read_file(schedule_path), stages);

  Chain chain(std::move(starter), cfg.mode, cfg.schedule, cfg.budget);
  chain.adopt_stages(std::move(stages), std::move(kappa));
  return chain;
}

void cmd_resume(const RunConfig& cfg) {
  Chain chain = load_chain(cfg, cfg.out_dir);
  if (chain.built_stages() > cfg.stages)
    throw Error(ErrorCode::ConfigInvalid, "chain already deeper than requested stage count");
  build_and_snapshot(chain, cfg.stages, cfg.out_dir);
}

void cmd_stats(const RunConfig& cfg) {
  Chain chain = load_chain(cfg, cfg.out_dir);
  int depth = chain.built_stages();
  PiecewiseAffineMap t = chain.assemble_t(depth);
  IntervalSet x1 = chain.stage(1).x;
  IntervalSet f = cfg.diag_f.value_or(x1);
  IntervalSet a = cfg.diag_a.value_or(f);
  IntervalSet b = cfg.diag_b.value_or(f);
  Rat mu_xn = chain.stage(depth).x.measure();

  {
    WeightSequence w = weight_sequence(t, f, cfg.weights_k, cfg.budget);
    std::ostringstream out;
    out << "k,u_k,u_k_approx,a_k,a_k_approx\n";
    for (std::size_t k = 0; k < w.u.size(); ++k)
      out << k << "," << csv_cell(w.u[k]) << "," << csv_cell(w.a[k]) << "\n";
    atomic_write(cfg.out_dir / "weights.csv", out.str());
  }
  {
    SumReport rep = rwm_sum(t, f, a, b, cfg.rwm_n, cfg.budget);
    std::ostringstream out;
    out << "i,term,term_approx,partial_sum,partial_sum_approx,normalizer,normalizer_approx\n";
    for (const auto& row : rep.rows)
      out << row.index << "," << csv_cell(row.term) << "," << csv_cell(row.partial) << ","
          << csv_cell(rep.normalizer) << "\n";
    atomic_write(cfg.out_dir / "rwm.csv", out.str());
  }
  {
    std::ostringstream out;
    out << "rho,deviation,deviation_approx\n";
    for (std::uint64_t rho : cfg.rho)
      out << rho << "," << csv_cell(rigidity_deviation(t, a, rho, cfg.budget)) << "\n";
    atomic_write(cfg.out_dir / "rigidity.csv", out.str());
  }
  {
    std::ostringstream out;
    out << "vector,i,term,term_approx,partial_sum,partial_sum_approx,normalizer,normalizer_approx\n";
    for (const auto& v : cfg.power_vectors) {
      ProductSpec spec{v};
      std::vector<IntervalSet> box(v.size(), a);
      SumReport rep = product_scaled_sum(spec, t, box, cfg.power_n, mu_xn, cfg.budget);
      for (const auto& row : rep.rows) {
        write_vector_header(out, v);
        out << "," << row.index << "," << csv_cell(row.term) << "," << csv_cell(row.partial)
            << "," << csv_cell(rep.normalizer) << "\n";
      }
    }
    atomic_write(cfg.out_dir / "power.csv", out.str());
  }
  {
    SumReport rep = sweep_out_report(t, f, cfg.sweep_n, cfg.budget);
    std::ostringstream out;
    out << "N,unswept,unswept_approx\n";
    for (const auto& row : rep.rows) out << row.index << "," << csv_cell(row.term) << "\n";
    atomic_write(cfg.out_dir / "sweep.csv", out.str());
  }
}

void cmd_export(const std::filesystem::path& out_dir) {
  // (x, y) pairs: index column against the decimal approximation of the
  // relevant cumulative column.
  struct Source {
    const char* csv;
    const char* plot;
    int x_col;
    int y_col;  // the *_approx column to plot
  };
  const Source sources[] = {
      {"weights.csv", "plot_weights.txt", 0, 4},
      {"rwm.csv", "plot_rwm.txt", 0, 4},
      {"rigidity.csv", "plot_rigidity.txt", 0, 2},
      {"power.csv", "plot_power.txt", 1, 5},
      {"sweep.csv", "plot_sweep.txt", 0, 2},
  };
  for (const auto& src : sources) {
    auto path = out_dir / src.csv;
    if (!std::filesystem::exists(path)) continue;
    std::istringstream in(read_file(path));
    std::ostringstream out;
    out << "# x y\n";
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::vector<std::string> cols;
      std::istringstream ls(line);
      std::string cell;
      while (std::getline(ls, cell, ',')) cols.push_back(cell);
      if (static_cast<int>(cols.size()) <= std::max(src.x_col, src.y_col))
        throw Error(ErrorCode::CorruptSnapshot, path.string() + ": short CSV row");
      out << cols[src.x_col] << " " << cols[src.y_col] << "\n";
    }
    atomic_write(out_dir / src.plot, out.str());
  }
}

}  // namespace towerplex
