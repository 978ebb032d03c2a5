#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pemi/bench/data.hpp"

namespace pemi::bench {

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double parse_double(const std::string& s) {
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0;
  const char* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, v);
  if (s.empty() || r.ec != std::errc() || r.ptr != end) throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

std::size_t Dataset::column(const std::string& name) const {
  const auto it = std::find(feature_columns.begin(), feature_columns.end(), name);
  return it == feature_columns.end() ? npos : static_cast<std::size_t>(it - feature_columns.begin());
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    cell.erase(0, cell.find_first_not_of(" \t"));
    cell.erase(cell.find_last_not_of(" \t\r") + 1);
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool is_feature(const std::string& name) {
  if (name == "mu_hat" || name == "q_lo" || name == "q_hi") return true;
  const auto numbered = [&](const char* prefix) {
    const std::size_t k = std::char_traits<char>::length(prefix);
    return name.size() > k && name.compare(0, k, prefix) == 0 &&
           std::all_of(name.begin() + static_cast<long>(k), name.end(), [](char c) { return c >= '0' && c <= '9'; });
  };
  return numbered("x_") || numbered("f");
}

}  // namespace

Dataset parse_dataset(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw DataError(origin + ": missing header row");
  const auto header = split(line);

  Dataset out;
  std::vector<std::size_t> feature_at;
  std::size_t y_at = Dataset::npos, c_at = Dataset::npos;
  for (std::size_t k = 0; k < header.size(); ++k) {
    const auto& h = header[k];
    if (h == "y") y_at = k;
    else if (h == "c") c_at = k;
    else if (is_feature(h)) {
      feature_at.push_back(k);
      out.feature_columns.push_back(h);
    } else throw DataError(origin + ": unknown column '" + h + "'");
  }
  if (y_at == Dataset::npos) throw DataError(origin + ": missing required column 'y'");
  if (feature_at.empty()) throw DataError(origin + ": needs feature columns x_0.. or a mu_hat column");
  const bool raw = out.feature_columns.front().rfind("x_", 0) == 0;
  const bool mixed = std::any_of(out.feature_columns.begin(), out.feature_columns.end(), [&](const auto& h) {
    return (h.rfind("x_", 0) == 0) != raw;
  });
  if (mixed) throw DataError(origin + ": raw feature columns cannot be mixed with prediction columns");
  if (!raw && out.feature_columns.front() != "mu_hat")
    throw DataError(origin + ": mu_hat must be the first prediction column");
  out.has_cutoff = c_at != Dataset::npos;

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split(line);
    const auto where = origin + ":" + std::to_string(line_no);
    if (cells.size() != header.size())
      throw DataError(where + ": expected " + std::to_string(header.size()) + " fields, found " +
                      std::to_string(cells.size()));
    LabeledPoint p;
    try {
      for (std::size_t k : feature_at) p.x.push_back(parse_double(cells[k]));
      p.y = parse_double(cells[y_at]);
      if (out.has_cutoff) p.cutoff = parse_double(cells[c_at]);
    } catch (const std::invalid_argument& e) {
      throw DataError(where + ": " + e.what());
    }
    if (!std::isfinite(p.y)) throw DataError(where + ": label must be finite");
    out.rows.push_back(std::move(p));
  }
  return out;
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path + ": cannot open");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_dataset(text.str(), path);
}

std::string format_dataset(const Dataset& data) {
  std::string out;
  for (const auto& h : data.feature_columns) out += h + ",";
  out += data.has_cutoff ? "y,c\n" : "y\n";
  for (const auto& p : data.rows) {
    for (double v : p.x) out += format_double(v) + ",";
    out += format_double(p.y);
    if (data.has_cutoff) out += "," + format_double(p.cutoff.value_or(std::nan("")));
    out += "\n";
  }
  return out;
}

void write_dataset(const std::string& path, const Dataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path + ": cannot write");
  out << format_dataset(data);
}

}  // namespace pemi::bench
