#include "towerplex/snapshot.hpp"

#include <fstream>
#include <sstream>

#include "towerplex/errors.hpp"

namespace towerplex {

namespace {

void write_set(std::ostringstream& out, const char* name, const IntervalSet& s) {
  out << name << " " << s.size() << "\n";
  for (const auto& iv : s.intervals()) out << iv.lo.str() << " " << iv.hi.str() << "\n";
}

void write_partition(std::ostringstream& out, const char* name, const Partition& p) {
  out << name << " " << p.size() << "\n";
  for (const auto& elem : p) {
    out << "p " << elem.size() << "\n";
    for (const auto& iv : elem.intervals()) out << iv.lo.str() << " " << iv.hi.str() << "\n";
  }
}

void write_map(std::ostringstream& out, const char* name, const PiecewiseAffineMap& f) {
  out << name << " " << f.piece_count() << "\n";
  for (const auto& piece : f.pieces())
    out << piece.source.lo.str() << " " << piece.source.hi.str() << " " << piece.slope.str()
        << " " << piece.offset.str() << "\n";
}

class LineReader {
 public:
  LineReader(const std::string& text, std::string origin)
      : in_(text), origin_(std::move(origin)) {}

  std::string next() {
    std::string line;
    if (!std::getline(in_, line)) fail("unexpected end of file");
    return line;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::CorruptSnapshot, origin_ + ": " + what);
  }

 private:
  std::istringstream in_;
  std::string origin_;
};

std::vector<std::string> tokens(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

Rat parse_rat(const std::string& text, LineReader& reader) {
  try {
    return Rat::from_string(text);
  } catch (const std::invalid_argument& e) {
    reader.fail(e.what());
  }
}

std::uint64_t parse_count(const std::string& text, LineReader& reader) {
  try {
    std::size_t pos = 0;
    unsigned long long v = std::stoull(text, &pos);
    if (pos != text.size()) reader.fail("trailing characters in count '" + text + "'");
    return v;
  } catch (const std::exception&) {
    reader.fail("malformed count '" + text + "'");
  }
}

IntervalSet read_set(LineReader& reader, const std::string& name) {
  auto header = tokens(reader.next());
  if (header.size() != 2 || header[0] != name) reader.fail("expected section " + name);
  std::uint64_t count = parse_count(header[1], reader);
  std::vector<Interval> ivs;
  ivs.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    auto line = tokens(reader.next());
    if (line.size() != 2) reader.fail("interval line needs two endpoints");
    ivs.emplace_back(parse_rat(line[0], reader), parse_rat(line[1], reader));
  }
  IntervalSet set = IntervalSet::from_intervals(ivs);
  if (set.size() != count) reader.fail("section " + name + " is not normalized");
  return set;
}

Partition read_partition(LineReader& reader, const std::string& name) {
  auto header = tokens(reader.next());
  if (header.size() != 2 || header[0] != name) reader.fail("expected section " + name);
  std::uint64_t count = parse_count(header[1], reader);
  Partition out;
  out.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) out.push_back(read_set(reader, "p"));
  return out;
}

PiecewiseAffineMap read_map(LineReader& reader, const std::string& name) {
  auto header = tokens(reader.next());
  if (header.size() != 2 || header[0] != name) reader.fail("expected section " + name);
  std::uint64_t count = parse_count(header[1], reader);
  std::vector<AffinePiece> pieces;
  pieces.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    auto line = tokens(reader.next());
    if (line.size() != 4) reader.fail("map line needs src_lo src_hi slope offset");
    pieces.push_back({Interval(parse_rat(line[0], reader), parse_rat(line[1], reader)),
                      parse_rat(line[2], reader), parse_rat(line[3], reader)});
  }
  if (count == 0) return {};
  return PiecewiseAffineMap::from_pieces(std::move(pieces));
}

}  // namespace

std::string serialize_stage(const StageState& st, const Rat& kappa) {
  std::ostringstream out;
  out << "stage " << st.n << " " << st.b.str() << " " << st.h << " " << st.eps.str() << " "
      << st.d.str() << " " << kappa.str() << "\n";
  write_set(out, "X", st.x);
  IntervalSet y_set = st.y ? IntervalSet(*st.y) : IntervalSet{};
  write_set(out, "Y", y_set);
  write_set(out, "E", st.residual);
  write_set(out, "I", st.tower_base);
  write_set(out, "Istar", st.istar);
  write_set(out, "D", st.change_set);
  write_partition(out, "Pprime", st.p_prime);
  write_partition(out, "Q", st.q);
  write_map(out, "R", st.r);
  write_map(out, "S", st.s);
  write_map(out, "tau", st.tau);
  return out.str();
}

ParsedStage parse_stage(const std::string& text, const std::string& origin) {
  LineReader reader(text, origin);
  auto header = tokens(reader.next());
  if (header.size() != 7 || header[0] != "stage") reader.fail("malformed stage header");

  ParsedStage out;
  StageState& st = out.state;
  st.n = static_cast<int>(parse_count(header[1], reader));
  st.b = parse_rat(header[2], reader);
  st.h = parse_count(header[3], reader);
  st.eps = parse_rat(header[4], reader);
  st.d = parse_rat(header[5], reader);
  out.kappa = parse_rat(header[6], reader);

  st.x = read_set(reader, "X");
  IntervalSet y_set = read_set(reader, "Y");
  st.residual = read_set(reader, "E");
  st.tower_base = read_set(reader, "I");
  st.istar = read_set(reader, "Istar");
  st.change_set = read_set(reader, "D");
  st.p_prime = read_partition(reader, "Pprime");
  st.q = read_partition(reader, "Q");
  st.r = read_map(reader, "R");
  st.s = read_map(reader, "S");
  st.tau = read_map(reader, "tau");

  if (!y_set.empty()) {
    if (y_set.size() != 1) reader.fail("Y must be a single interval");
    st.y = y_set.intervals().front();
    st.j_base = st.h > 0 ? std::optional<Interval>(Interval(
                               st.y->lo, st.y->lo + st.y->length() / Rat(static_cast<long>(st.h))))
                         : std::nullopt;
    st.b_prev = st.y->lo;
    st.activated = true;
  }
  st.multiplexed = !st.tau.empty();
  return out;
}

std::filesystem::path stage_file_path(const std::filesystem::path& dir, int n) {
  char name[32];
  std::snprintf(name, sizeof(name), "stage_%03d.txt", n);
  return dir / name;
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::ConfigInvalid, "cannot write " + tmp.string());
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

std::string serialize_schedule(const std::vector<StageState>& stages) {
  std::ostringstream out;
  out << "stage M delta j eps h search_value\n";
  for (const auto& st : stages) {
    if (!st.activated) continue;
    out << st.n << " " << st.big_m << " " << st.delta.str() << " " << st.j_count << " "
        << st.eps.str() << " " << st.h << " " << st.search_value.str() << "\n";
  }
  return out.str();
}

void apply_schedule_record(const std::string& text, std::vector<StageState>& stages) {
  LineReader reader(text, "schedule.txt");
  reader.next();  // column header
  for (auto& st : stages) {
    if (!st.activated) continue;
    auto line = tokens(reader.next());
    if (line.size() != 7) reader.fail("schedule line needs 7 fields");
    if (parse_count(line[0], reader) != static_cast<std::uint64_t>(st.n))
      reader.fail("schedule stage index mismatch");
    st.big_m = parse_count(line[1], reader);
    st.delta = parse_rat(line[2], reader);
    st.j_count = parse_count(line[3], reader);
    st.search_value = parse_rat(line[6], reader);
  }
}

}  // namespace towerplex
