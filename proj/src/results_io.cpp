#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include "schedrl/experiment.hpp"

namespace schedrl {

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw std::runtime_error("could not format a double");
  std::string out(buf, ptr);
  if (out.find_first_of(".eEni") == std::string::npos) out += ".0";
  return out;
}

std::string format_results_csv(std::vector<CurvePoint> curves) {
  std::stable_sort(curves.begin(), curves.end(), [](const CurvePoint& a, const CurvePoint& b) {
    return a.strategy != b.strategy ? a.strategy < b.strategy : a.epoch < b.epoch;
  });
  std::string out = "epoch,strategy,mean_mistakes,ci_low,ci_high\n";
  for (const auto& p : curves) {
    out += std::to_string(p.epoch);
    out += ',';
    out += p.strategy;
    out += ',';
    out += format_double(p.mean_mistakes);
    out += ',';
    out += format_double(p.mean_mistakes - p.half_width);
    out += ',';
    out += format_double(p.mean_mistakes + p.half_width);
    out += '\n';
  }
  return out;
}

std::filesystem::path metadata_path(const std::filesystem::path& csv_path) {
  std::filesystem::path meta = csv_path;
  meta.replace_extension(".meta.json");
  return meta;
}

void emit_results(const std::vector<CurvePoint>& curves, const std::filesystem::path& path,
                  const nlohmann::json& metadata) {
  if (curves.empty()) throw std::invalid_argument("no curve points to write");
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << format_results_csv(curves);
    if (!out) throw std::runtime_error("write to " + path.string() + " failed");
  }
  if (!metadata.is_null()) {
    const auto meta = metadata_path(path);
    std::ofstream out(meta, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + meta.string() + " for writing");
    out << metadata.dump(2) << '\n';
    if (!out) throw std::runtime_error("write to " + meta.string() + " failed");
  }
}

namespace {

double parse_double(const std::string& field, std::size_t line) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw std::invalid_argument("bad number \"" + field + "\" on line " + std::to_string(line));
  }
  return value;
}

}  // namespace

std::vector<CurvePoint> parse_results_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "epoch,strategy,mean_mistakes,ci_low,ci_high") {
    throw std::invalid_argument("missing results header");
  }
  std::vector<CurvePoint> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream row(line);
    std::string field;
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (fields.size() != 5) throw std::invalid_argument("expected 5 fields on line " + std::to_string(line_no));
    CurvePoint p;
    p.epoch = static_cast<std::int64_t>(parse_double(fields[0], line_no));
    p.strategy = fields[1];
    p.mean_mistakes = parse_double(fields[2], line_no);
    const double low = parse_double(fields[3], line_no);
    const double high = parse_double(fields[4], line_no);
    p.half_width = (high - low) / 2.0;
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace schedrl
