#include "dynmed/harness/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "dynmed/error.hpp"

namespace dynmed {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  for (auto& f : out) {
    const auto b = f.find_first_not_of(" \t");
    const auto e = f.find_last_not_of(" \t");
    f = b == std::string::npos ? std::string() : f.substr(b, e - b + 1);
  }
  return out;
}

double parse_double(const std::string& s, std::size_t line, const std::string& field) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (s.empty() || ec != std::errc() || ptr != last) {
    throw ParseError(line, "cannot parse " + field + " value '" + s + "'");
  }
  return v;
}

long long parse_int(const std::string& s, std::size_t line, const std::string& field) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(line, "cannot parse " + field + " value '" + s + "' as an integer");
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Panel read_panel_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  // skip blank lines before the header
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") != std::string::npos) break;
  }
  if (lineno == 0 || line.find_first_not_of(" \t\r") == std::string::npos) {
    throw ParseError(lineno, "empty panel file");
  }
  const std::vector<std::string> header = split(line);
  if (header.size() < 5 || header[0] != "id" || header[1] != "t" || header[2] != "A" ||
      header.back() != "R") {
    throw ParseError(lineno, "header must be id,t,A,M1,...,Md,R");
  }
  const int d = static_cast<int>(header.size()) - 4;
  for (int j = 0; j < d; ++j) {
    if (header[3 + j] != "M" + std::to_string(j + 1)) {
      throw ParseError(lineno, "expected column M" + std::to_string(j + 1) + ", got '" +
                                   header[3 + j] + "'");
    }
  }

  struct Row {
    double a;
    std::vector<double> m;
    double r;
  };
  std::map<long long, std::map<long long, Row>> rows;
  long long max_t = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::vector<std::string> f = split(line);
    if (f.size() != header.size()) {
      throw ParseError(lineno, "expected " + std::to_string(header.size()) + " fields, got " +
                                   std::to_string(f.size()));
    }
    const long long id = parse_int(f[0], lineno, "id");
    const long long t = parse_int(f[1], lineno, "t");
    if (t < 1) throw ParseError(lineno, "stage index must be >= 1");
    Row row{parse_double(f[2], lineno, "A"), std::vector<double>(d),
            parse_double(f.back(), lineno, "R")};
    for (int j = 0; j < d; ++j) row.m[j] = parse_double(f[3 + j], lineno, header[3 + j]);
    auto& stages = rows[id];
    if (!stages.emplace(t, std::move(row)).second) {
      throw DuplicateRow(id, static_cast<int>(t));
    }
    max_t = std::max(max_t, t);
  }
  if (rows.empty()) throw ParseError(lineno, "panel file has no data rows");

  const int n = static_cast<int>(rows.size());
  const int T = static_cast<int>(max_t);
  std::vector<double> a(static_cast<std::size_t>(n) * T), r(a.size()), m(a.size() * d);
  int i = 0;
  for (const auto& [id, stages] : rows) {
    for (int t = 1; t <= T; ++t) {
      auto it = stages.find(t);
      if (it == stages.end()) throw RaggedPanel(id, t);
      const std::size_t c = static_cast<std::size_t>(t - 1) * n + i;
      a[c] = it->second.a;
      r[c] = it->second.r;
      for (int j = 0; j < d; ++j) m[c * d + j] = it->second.m[j];
    }
    ++i;
  }
  return Panel(n, T, d, std::move(a), std::move(m), std::move(r));
}

Panel read_panel_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open panel file '" + path + "'");
  return read_panel_csv(in);
}

void write_panel_csv(std::ostream& out, const Panel& panel) {
  out << "id,t,A";
  for (int j = 0; j < panel.d(); ++j) out << ",M" << j + 1;
  out << ",R\n";
  for (int i = 0; i < panel.n(); ++i) {
    for (int t = 0; t < panel.T(); ++t) {
      out << i + 1 << ',' << t + 1 << ',' << format_double(panel.treatment(i, t));
      for (int j = 0; j < panel.d(); ++j) out << ',' << format_double(panel.mediator(i, t, j));
      out << ',' << format_double(panel.outcome(i, t)) << '\n';
    }
  }
}

void write_panel_csv(const std::string& path, const Panel& panel) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  write_panel_csv(out, panel);
}

}  // namespace dynmed
