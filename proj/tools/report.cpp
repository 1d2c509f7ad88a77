#include "report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "hyfleet/errors.hpp"

namespace hyfleet::cli {

namespace {

using Table = std::vector<std::map<std::string, std::string>>;

Table read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();  // getline drops a trailing empty cell
    return cells;
  };
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + ": empty file");
  const std::vector<std::string> header = split(line);
  Table rows;
  for (std::size_t n = 2; std::getline(in, line); ++n) {
    if (line.empty()) continue;
    const std::vector<std::string> cells = split(line);
    if (cells.size() != header.size()) {
      throw ParseError(path.string() + ": line " + std::to_string(n) + " has " + std::to_string(cells.size()) +
                       " fields, expected " + std::to_string(header.size()));
    }
    auto& row = rows.emplace_back();
    for (std::size_t i = 0; i < cells.size(); ++i) row[header[i]] = cells[i];
  }
  return rows;
}

double num(const std::map<std::string, std::string>& row, const std::string& key) {
  auto it = row.find(key);
  if (it == row.end()) throw ParseError("missing column " + key);
  if (it->second.empty()) return std::nan("");
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw ParseError("column " + key + ": not a number: " + it->second);
  }
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace

void write_report(const std::filesystem::path& dir, std::ostream& out) {
  const Table summary = read_csv(dir / "summary.csv");

  // (drones, prioritized, category) -> mean minutes
  std::map<std::tuple<int, int, std::string>, double> mean;
  out << "waiting time (minutes)\n";
  out << "drones  prio  category   mean  median  <=20min\n";
  for (const auto& row : summary) {
    const int d = static_cast<int>(num(row, "drones"));
    const int p = static_cast<int>(num(row, "prioritized"));
    const std::string& cat = row.at("category");
    mean[{d, p, cat}] = num(row, "mean_s") / 60.0;
    char line[128];
    std::snprintf(line, sizeof line, "%6d  %4s  %-8s %6.1f  %6.1f  %6.1f%%\n", d, p ? "yes" : "no", cat.c_str(),
                  num(row, "mean_s") / 60.0, num(row, "median_s") / 60.0, 100.0 * num(row, "capacity_20min"));
    out << line;
  }

  bool header = false;
  for (const auto& [key, prio] : mean) {
    const auto [d, p, cat] = key;
    if (p != 1 || cat == "all") continue;
    auto base = mean.find({d, 0, cat});
    if (base == mean.end() || base->second == 0.0) continue;
    if (!header) {
      out << "\nprioritization effect (change of mean vs unprioritized)\n";
      header = true;
    }
    out << "  drones " << d << ' ' << cat << ": " << fmt("%+.1f%%", 100.0 * (prio - base->second) / base->second)
        << '\n';
  }

  if (std::filesystem::exists(dir / "net_summary.csv")) {
    out << "\nnetwork\nmodel         sent  delivered     pdr   p50 ms   p95 ms\n";
    for (const auto& row : read_csv(dir / "net_summary.csv")) {
      char line[160];
      std::snprintf(line, sizeof line, "%-11s %6.0f  %9.0f  %6.4f  %7.3f  %7.3f\n", row.at("model").c_str(),
                    num(row, "sent"), num(row, "delivered"), num(row, "pdr"), num(row, "lat_p50_ms"),
                    num(row, "lat_p95_ms"));
      out << line;
    }
  }
}

}  // namespace hyfleet::cli
