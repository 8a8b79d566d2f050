#include "towerplex/config.hpp"

#include <fstream>
#include <sstream>

#include "towerplex/errors.hpp"

namespace towerplex {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::ConfigInvalid, what); }

Rat parse_rat(const std::string& s) {
  try {
    return Rat::from_string(s);
  } catch (const std::invalid_argument& e) {
    bad(e.what());
  }
}

std::uint64_t parse_nat(const std::string& s) {
  try {
    std::size_t pos = 0;
    unsigned long long v = std::stoull(s, &pos);
    if (pos != s.size()) bad("trailing characters in '" + s + "'");
    return v;
  } catch (const std::exception&) {
    bad("malformed number '" + s + "'");
  }
}

long parse_int(const std::string& s) {
  try {
    std::size_t pos = 0;
    long v = std::stol(s, &pos);
    if (pos != s.size()) bad("trailing characters in '" + s + "'");
    return v;
  } catch (const std::exception&) {
    bad("malformed integer '" + s + "'");
  }
}

std::vector<Rat> parse_rat_list(const std::string& s) {
  std::vector<Rat> out;
  for (const auto& tok : split(s, ',')) out.push_back(parse_rat(tok));
  return out;
}

std::vector<std::uint64_t> parse_nat_list(const std::string& s) {
  std::vector<std::uint64_t> out;
  for (const auto& tok : split(s, ',')) out.push_back(parse_nat(tok));
  return out;
}

IntervalSet parse_set(const std::string& s) {
  std::vector<Interval> ivs;
  for (const auto& part : split(s, ',')) {
    auto ends = split(part, ' ');
    if (ends.size() != 2) bad("interval needs two endpoints: '" + part + "'");
    ivs.emplace_back(parse_rat(ends[0]), parse_rat(ends[1]));
  }
  return IntervalSet::from_intervals(std::move(ivs));
}

}  // namespace

RankOneSpec RunConfig::starter_spec() const {
  switch (starter_kind) {
    case StarterKind::Odometer: return RankOneSpec::odometer(starter_depth);
    case StarterKind::Chacon: return RankOneSpec::chacon(starter_depth);
    case StarterKind::Custom: return custom_spec;
  }
  bad("unknown starter kind");
}

RunConfig parse_config_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) bad("config line without '=': " + line);
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) bad("config line with empty key");
    if (!kv.emplace(key, value).second) bad("duplicate config key " + key);
  }

  RunConfig cfg;
  for (const auto& [key, value] : kv) {
    if (key == "starter.kind") {
      if (value == "odometer") cfg.starter_kind = StarterKind::Odometer;
      else if (value == "chacon") cfg.starter_kind = StarterKind::Chacon;
      else if (value == "custom") cfg.starter_kind = StarterKind::Custom;
      else bad("starter.kind must be odometer|chacon|custom");
    } else if (key == "starter.depth") {
      cfg.starter_depth = parse_nat(value);
    } else if (key == "starter.cuts") {
      cfg.custom_spec.cuts.clear();
      for (auto v : parse_nat_list(value)) cfg.custom_spec.cuts.push_back(static_cast<std::uint32_t>(v));
    } else if (key == "starter.spacers") {
      cfg.custom_spec.spacers.clear();
      for (const auto& group : split(value, ';')) {
        std::vector<std::uint32_t> counts;
        for (const auto& tok : split(group, ' ')) counts.push_back(static_cast<std::uint32_t>(parse_nat(tok)));
        cfg.custom_spec.spacers.push_back(std::move(counts));
      }
    } else if (key == "starter.base") {
      auto ends = split(value, ' ');
      if (ends.size() != 2) bad("starter.base needs two endpoints");
      cfg.custom_spec.initial_base = Interval(parse_rat(ends[0]), parse_rat(ends[1]));
    } else if (key == "stages") {
      cfg.stages = static_cast<int>(parse_nat(value));
    } else if (key == "mode") {
      if (value == "uniform") cfg.mode = TransferMode::Uniform;
      else if (value == "literal") cfg.mode = TransferMode::Literal;
      else bad("mode must be uniform|literal");
    } else if (key == "piece_budget") {
      cfg.budget.max_pieces = parse_nat(value);
    } else if (key == "out") {
      cfg.out_dir = value;
    } else if (key == "schedule.delta") {
      cfg.schedule.delta = parse_rat_list(value);
    } else if (key == "schedule.M") {
      cfg.schedule.m_over = parse_nat_list(value);
    } else if (key == "schedule.eps") {
      cfg.schedule.eps_over = parse_rat_list(value);
    } else if (key == "schedule.h") {
      cfg.schedule.h_over = parse_nat_list(value);
    } else if (key == "schedule.search_cap") {
      cfg.schedule.search_cap = parse_nat(value);
    } else if (key == "schedule.vector_budget") {
      cfg.schedule.vector_budget = parse_nat(value);
    } else if (key == "schedule.vector_max_len") {
      cfg.schedule.vector_max_len = parse_nat(value);
    } else if (key == "schedule.vector_max_abs") {
      cfg.schedule.vector_max_abs = parse_nat(value);
    } else if (key == "schedule.check_rigidity") {
      if (value == "true") cfg.schedule.check_rigidity = true;
      else if (value == "false") cfg.schedule.check_rigidity = false;
      else bad("schedule.check_rigidity must be true|false");
    } else if (key == "schedule.stage1_partition") {
      if (value == "space") cfg.schedule.stage1_tower_partition = false;
      else if (value == "tower") cfg.schedule.stage1_tower_partition = true;
      else bad("schedule.stage1_partition must be space|tower");
    } else if (key == "rigidity.terms") {
      RigiditySequence seq{parse_nat_list(value)};
      seq.validate();
      cfg.schedule.rho = seq;
      cfg.rho = cfg.schedule.rho->terms;
    } else if (key == "rigidity.cf") {
      auto cf = parse_nat_list(value);
      cfg.schedule.rho = convergent_denominators(cf, cf.size());
      cfg.rho = cfg.schedule.rho->terms;
    } else if (key == "diag.weights_K") {
      cfg.weights_k = parse_nat(value);
    } else if (key == "diag.rwm_N") {
      cfg.rwm_n = parse_nat(value);
    } else if (key == "diag.F") {
      if (value != "X1") cfg.diag_f = parse_set(value);
    } else if (key == "diag.A") {
      if (value != "X1") cfg.diag_a = parse_set(value);
    } else if (key == "diag.B") {
      if (value != "X1") cfg.diag_b = parse_set(value);
    } else if (key == "diag.rho") {
      cfg.rho = parse_nat_list(value);
    } else if (key == "diag.vectors") {
      cfg.power_vectors.clear();
      for (const auto& group : split(value, ';')) {
        std::vector<int> v;
        for (const auto& tok : split(group, ' ')) v.push_back(static_cast<int>(parse_int(tok)));
        if (v.empty()) bad("empty vector in diag.vectors");
        cfg.power_vectors.push_back(std::move(v));
      }
    } else if (key == "diag.power_N") {
      cfg.power_n = parse_nat(value);
    } else if (key == "diag.sweep_N") {
      cfg.sweep_n = parse_nat(value);
    } else {
      bad("unknown config key " + key);
    }
  }

  if (cfg.stages < 1) bad("stages must be >= 1");
  if (cfg.starter_kind == StarterKind::Custom) cfg.custom_spec.validate();
  if (cfg.rho.empty()) cfg.rho = {2, 4, 8};
  if (cfg.power_vectors.empty()) cfg.power_vectors = {{1, -1}, {2}};
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ConfigInvalid, "cannot read config " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

}  // namespace towerplex
