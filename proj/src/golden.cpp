#include "binci/golden.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace binci {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(field);
  return out;
}

struct raw_fixture {
  std::vector<std::string> data_lines;  // header row + data rows
  std::uint64_t stored_checksum = 0;
  bool has_checksum = false;
};

raw_fixture read_fixture(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("golden fixture not readable: " + path);
  raw_fixture fx;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("# fnv1a64:", 0) == 0) {
      const std::string hex = line.substr(line.find(':') + 1);
      fx.stored_checksum = std::stoull(hex, nullptr, 16);
      fx.has_checksum = true;
      continue;
    }
    if (line.empty() || line[0] == '#') continue;
    fx.data_lines.push_back(line);
  }
  if (fx.data_lines.empty()) throw std::runtime_error("golden fixture empty: " + path);
  return fx;
}

}  // namespace

std::uint64_t fnv1a64(const std::vector<std::string>& lines) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](unsigned char b) {
    h ^= b;
    h *= 0x100000001b3ull;
  };
  for (const auto& line : lines) {
    for (unsigned char b : line) mix(b);
    mix('\n');
  }
  return h;
}

golden_intervals load_golden_intervals(const std::string& path) {
  const raw_fixture fx = read_fixture(path);
  golden_intervals g;
  g.file = path;
  g.stored_checksum = fx.stored_checksum;
  g.computed_checksum = fnv1a64(fx.data_lines);
  g.checksum_ok = fx.has_checksum && g.computed_checksum == fx.stored_checksum;
  for (size_t k = 1; k < fx.data_lines.size(); ++k) {  // skip header row
    const auto f = split_csv(fx.data_lines[k]);
    if (f.size() != 4) throw std::runtime_error("bad row in " + path);
    golden_interval_row row;
    row.n = std::stoi(f[0]);
    row.x = std::stoi(f[1]);
    row.lower = std::stod(f[2]);
    row.upper = std::stod(f[3]);
    g.rows.push_back(row);
  }
  return g;
}

golden_metrics load_golden_metrics(const std::string& path, int value_count) {
  const raw_fixture fx = read_fixture(path);
  golden_metrics g;
  g.file = path;
  g.stored_checksum = fx.stored_checksum;
  g.computed_checksum = fnv1a64(fx.data_lines);
  g.checksum_ok = fx.has_checksum && g.computed_checksum == fx.stored_checksum;
  for (size_t k = 1; k < fx.data_lines.size(); ++k) {
    const auto f = split_csv(fx.data_lines[k]);
    if (static_cast<int>(f.size()) != 3 + value_count)
      throw std::runtime_error("bad row in " + path);
    golden_metric_row row;
    row.alpha = std::stod(f[0]);
    row.n = std::stoi(f[1]);
    const auto m = parse_method(f[2]);
    if (!m) throw std::runtime_error("unknown method in " + path + ": " + f[2]);
    row.method = *m;
    for (int v = 0; v < value_count; ++v) row.values.push_back(std::stod(f[3 + v]));
    g.rows.push_back(row);
  }
  return g;
}

}  // namespace binci
