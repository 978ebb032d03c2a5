#include <filesystem>
#include <fstream>
#include <sstream>

#include "pemi/bench/experiment.hpp"

namespace pemi::bench {

using nlohmann::json;

std::string events_csv(const std::vector<Event>& events) {
  std::string out = "replication,t,method,covered,size\n";
  for (const auto& e : events)
    out += std::to_string(e.replication) + "," + std::to_string(e.t) + "," + to_string(e.method) + "," +
           (e.covered ? "1" : "0") + "," + format_double(e.size.value()) + "\n";
  return out;
}

std::string metrics_csv(const std::vector<MetricsRow>& rows) {
  std::string out = "method,t,selected,covered,coverage,median_size,infinite_fraction\n";
  for (const auto& r : rows)
    out += to_string(r.method) + "," + std::to_string(r.t) + "," + std::to_string(r.selection_count) + "," +
           std::to_string(r.covered_count) + "," + format_double(r.coverage_estimate) + "," +
           format_double(r.median_size.value()) + "," + format_double(r.infinite_fraction) + "\n";
  return out;
}

std::string fcr_csv(const std::vector<FcrReport>& rows) {
  std::string out = "method,T,N,fcr\n";
  for (const auto& r : rows)
    out += to_string(r.method) + "," + std::to_string(r.T) + "," + std::to_string(r.N) + "," +
           format_double(r.fcr_estimate) + "\n";
  return out;
}

namespace {

// JSON has no infinities or NaN: +inf becomes the string "inf", NaN null.
json number(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return format_double(v);
  return v;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path.string() + ": cannot write");
  out << text;
}

}  // namespace

json summary_json(const ExperimentResult& result, const ExperimentConfig& config) {
  json metrics = json::array(), fcr = json::array();
  for (const auto& r : result.metrics)
    metrics.push_back({{"method", to_string(r.method)},
                       {"t", r.t},
                       {"selection_count", r.selection_count},
                       {"covered_count", r.covered_count},
                       {"coverage_estimate", number(r.coverage_estimate)},
                       {"median_size", number(r.median_size.value())},
                       {"infinite_fraction", number(r.infinite_fraction)}});
  for (const auto& r : result.fcr)
    fcr.push_back({{"method", to_string(r.method)}, {"T", r.T}, {"N", r.N}, {"fcr_estimate", number(r.fcr_estimate)}});
  return {{"config", to_json(config)}, {"metrics", metrics}, {"fcr", fcr}};
}

void write_outputs(const ExperimentResult& result, const ExperimentConfig& config, const std::string& dir) {
  const std::filesystem::path root(dir);
  std::error_code ec;
  std::filesystem::create_directories(root, ec);
  if (ec) throw DataError(dir + ": cannot create output directory");
  write_file(root / "events.csv", events_csv(result.events));
  write_file(root / "metrics.csv", metrics_csv(result.metrics));
  write_file(root / "fcr.csv", fcr_csv(result.fcr));
  write_file(root / "config.json", to_json(config).dump(2) + "\n");
  write_file(root / "summary.json", summary_json(result, config).dump(2) + "\n");
}

std::vector<Event> parse_events(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "replication,t,method,covered,size")
    throw DataError(origin + ": expected the events.csv header");
  std::vector<Event> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string rep, t, method, covered, size, extra;
    const auto where = origin + ":" + std::to_string(line_no);
    if (!std::getline(row, rep, ',') || !std::getline(row, t, ',') || !std::getline(row, method, ',') ||
        !std::getline(row, covered, ',') || !std::getline(row, size, ',') || std::getline(row, extra, ','))
      throw DataError(where + ": expected 5 fields");
    try {
      Event e;
      e.replication = std::stoul(rep);
      e.t = std::stoul(t);
      e.method = method_from_string(method);
      if (covered != "0" && covered != "1") throw std::invalid_argument("covered must be 0 or 1");
      e.covered = covered == "1";
      e.size = parse_double(size);
      out.push_back(e);
    } catch (const std::exception& e) {
      throw DataError(where + ": " + e.what());
    }
  }
  return out;
}

}  // namespace pemi::bench
