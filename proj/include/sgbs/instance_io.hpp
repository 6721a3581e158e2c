#ifndef SGBS_INSTANCE_IO_HPP
#define SGBS_INSTANCE_IO_HPP

#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "sgbs/generator.hpp"

namespace sgbs {

/// Parse failure with the 1-based line number of the offending input.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_ = 0;
};

namespace detail {

struct LineReader {
  std::vector<std::string> lines;
  std::size_t pos = 0;

  explicit LineReader(std::istream& in) {
    std::string l;
    while (std::getline(in, l)) {
      if (!l.empty() && l.back() == '\r') l.pop_back();
      lines.push_back(l);
    }
  }

  bool eof() const { return pos >= lines.size(); }
  int line_no() const { return static_cast<int>(pos) + 1; }

  /// Next line, skipping blank lines. Returns false at end of input.
  bool next(std::vector<std::string>& tokens, bool skip_blank = true) {
    while (pos < lines.size()) {
      const std::string& l = lines[pos];
      std::istringstream ss(l);
      tokens.clear();
      std::string t;
      while (ss >> t) tokens.push_back(t);
      if (tokens.empty() && skip_blank) {
        ++pos;
        continue;
      }
      ++pos;
      return true;
    }
    return false;
  }

  void skip_blanks() {
    while (pos < lines.size()) {
      std::istringstream ss(lines[pos]);
      std::string t;
      if (ss >> t) return;
      ++pos;
    }
  }
};

inline double parse_num(const std::string& tok, int line) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0') throw ParseError(line, "expected a number, got '" + tok + "'");
  return v;
}

inline int parse_int(const std::string& tok, int line) {
  char* end = nullptr;
  const long v = std::strtol(tok.c_str(), &end, 10);
  if (end == tok.c_str() || *end != '\0') throw ParseError(line, "expected an integer, got '" + tok + "'");
  return static_cast<int>(v);
}

inline Vec2 parse_point(const std::vector<std::string>& toks, int line) {
  if (toks.size() < 2) throw ParseError(line, "expected 'x y'");
  return {parse_num(toks[0], line), parse_num(toks[1], line)};
}

}  // namespace detail

inline void serialize_instance(std::ostream& out, const TspInstance& inst) {
  out << "PROBLEM TSP\n";
  out << "N " << inst.size() << "\n";
  for (const Vec2& p : inst.coords)
    out << format_double(p.x) << " " << format_double(p.y) << "\n";
}

inline void serialize_instance(std::ostream& out, const CvrpInstance& inst) {
  out << "PROBLEM CVRP\n";
  out << "N " << inst.num_customers() << " CAP " << inst.capacity << "\n";
  out << "DEPOT " << format_double(inst.depot.x) << " " << format_double(inst.depot.y) << "\n";
  for (int i = 0; i < inst.num_customers(); ++i)
    out << format_double(inst.coords[i].x) << " " << format_double(inst.coords[i].y) << " "
        << inst.demands[i] << "\n";
}

inline void serialize_instance(std::ostream& out, const FfspInstance& inst) {
  out << "PROBLEM FFSP\n";
  out << "JOBS " << inst.num_jobs << " STAGES " << inst.num_stages() << "\n";
  for (int k = 0; k < inst.num_stages(); ++k) {
    out << "MACHINES " << inst.machines_at(k) << "\n";
    for (int m = 0; m < inst.machines_at(k); ++m) {
      for (int j = 0; j < inst.num_jobs; ++j) {
        if (j > 0) out << " ";
        out << inst.proc_time(k, m, j);
      }
      out << "\n";
    }
  }
}

inline void serialize_instance(std::ostream& out, const InstanceVariant& inst) {
  std::visit([&](const auto& i) { serialize_instance(out, i); }, inst);
}

namespace detail {

inline InstanceVariant parse_one(LineReader& rd) {
  std::vector<std::string> toks;
  int header_line = rd.line_no();
  if (!rd.next(toks)) throw ParseError(header_line, "expected 'PROBLEM <TSP|CVRP|FFSP>'");
  header_line = rd.line_no() - 1;
  if (toks.size() != 2 || toks[0] != "PROBLEM")
    throw ParseError(header_line, "expected 'PROBLEM <TSP|CVRP|FFSP>'");
  const std::string kind = toks[1];

  if (kind == "TSP") {
    int line = rd.line_no();
    if (!rd.next(toks, false) || toks.size() != 2 || toks[0] != "N")
      throw ParseError(line, "expected 'N <count>'");
    const int n = parse_int(toks[1], line);
    if (n < 3) throw ParseError(line, "TSP needs at least 3 nodes");
    std::vector<Vec2> pts;
    pts.reserve(n);
    for (int i = 0; i < n; ++i) {
      line = rd.line_no();
      if (!rd.next(toks, false) || toks.empty())
        throw ParseError(line, "expected coordinate line " + std::to_string(i + 1) + " of " + std::to_string(n));
      if (toks.size() != 2) throw ParseError(line, "expected 'x y'");
      pts.push_back(parse_point(toks, line));
    }
    try {
      return TspInstance(std::move(pts));
    } catch (const std::invalid_argument& e) {
      throw ParseError(header_line, e.what());
    }
  }

  if (kind == "CVRP") {
    int line = rd.line_no();
    if (!rd.next(toks, false) || toks.size() != 4 || toks[0] != "N" || toks[2] != "CAP")
      throw ParseError(line, "expected 'N <count> CAP <capacity>'");
    const int n = parse_int(toks[1], line);
    const int cap = parse_int(toks[3], line);
    line = rd.line_no();
    if (!rd.next(toks, false) || toks.size() != 3 || toks[0] != "DEPOT")
      throw ParseError(line, "expected 'DEPOT x y'");
    const Vec2 depot{parse_num(toks[1], line), parse_num(toks[2], line)};
    std::vector<Vec2> pts;
    std::vector<int> dem;
    for (int i = 0; i < n; ++i) {
      line = rd.line_no();
      if (!rd.next(toks, false) || toks.empty())
        throw ParseError(line, "expected customer line " + std::to_string(i + 1) + " of " + std::to_string(n));
      if (toks.size() != 3) throw ParseError(line, "expected 'x y demand'");
      pts.push_back(parse_point(toks, line));
      const int d = parse_int(toks[2], line);
      if (d <= 0) throw ParseError(line, "demand must be positive");
      if (d > cap) throw ParseError(line, "demand exceeds capacity");
      dem.push_back(d);
    }
    try {
      return CvrpInstance(depot, std::move(pts), std::move(dem), cap);
    } catch (const std::invalid_argument& e) {
      throw ParseError(header_line, e.what());
    }
  }

  if (kind == "FFSP") {
    int line = rd.line_no();
    if (!rd.next(toks, false) || toks.size() != 4 || toks[0] != "JOBS" || toks[2] != "STAGES")
      throw ParseError(line, "expected 'JOBS <count> STAGES <count>'");
    const int jobs = parse_int(toks[1], line);
    const int n_stages = parse_int(toks[3], line);
    if (jobs < 1) throw ParseError(line, "JOBS must be positive");
    if (n_stages < 1) throw ParseError(line, "STAGES must be positive");
    std::vector<FfspStage> stages;
    for (int k = 0; k < n_stages; ++k) {
      line = rd.line_no();
      if (!rd.next(toks, false) || toks.size() != 2 || toks[0] != "MACHINES")
        throw ParseError(line, "expected 'MACHINES <count>' for stage " + std::to_string(k + 1));
      const int machines = parse_int(toks[1], line);
      if (machines < 1) throw ParseError(line, "MACHINES must be positive");
      FfspStage st;
      for (int m = 0; m < machines; ++m) {
        line = rd.line_no();
        if (!rd.next(toks, false) || toks.empty())
          throw ParseError(line, "expected processing-time row " + std::to_string(m + 1));
        if (static_cast<int>(toks.size()) != jobs)
          throw ParseError(line, "expected " + std::to_string(jobs) + " processing times, got " +
                                     std::to_string(toks.size()));
        std::vector<int> row;
        for (const std::string& t : toks) {
          const int p = parse_int(t, line);
          if (p <= 0) throw ParseError(line, "processing time must be positive");
          row.push_back(p);
        }
        st.proc.push_back(std::move(row));
      }
      stages.push_back(std::move(st));
    }
    try {
      return FfspInstance(jobs, std::move(stages));
    } catch (const std::invalid_argument& e) {
      throw ParseError(header_line, e.what());
    }
  }

  throw ParseError(header_line, "unknown problem kind '" + kind + "'");
}

}  // namespace detail

inline InstanceVariant parse_instance(std::istream& in) {
  detail::LineReader rd(in);
  return detail::parse_one(rd);
}

/// Batch files: instances separated by one or more blank lines.
inline std::vector<InstanceVariant> parse_batch(std::istream& in) {
  detail::LineReader rd(in);
  std::vector<InstanceVariant> out;
  rd.skip_blanks();
  while (!rd.eof()) {
    out.push_back(detail::parse_one(rd));
    rd.skip_blanks();
  }
  return out;
}

inline std::vector<InstanceVariant> parse_batch_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file: " + path);
  return parse_batch(in);
}

inline InstanceVariant parse_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file: " + path);
  return parse_instance(in);
}

inline void serialize_instance_file(const std::string& path, const InstanceVariant& inst) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write instance file: " + path);
  serialize_instance(out, inst);
}

inline void write_batch(std::ostream& out, const std::vector<InstanceVariant>& instances) {
  for (std::size_t i = 0; i < instances.size(); ++i) {
    if (i > 0) out << "\n";
    serialize_instance(out, instances[i]);
  }
}

}  // namespace sgbs

#endif  // SGBS_INSTANCE_IO_HPP
