#include "rsb/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "rsb/errors.hpp"

namespace rsb {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path);
  return os;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ConfigMap read_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path);
  ConfigMap out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

CountDataset read_count_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open data file " + path);
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("data file " + path + " is empty");
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);  // UTF-8 BOM
  const auto header = split_csv(line);
  int ycol = -1, ocol = -1, loncol = -1, latcol = -1;
  std::vector<std::pair<int, int>> xcols;  // (index in x-numbering, column)
  for (int c = 0; c < static_cast<int>(header.size()); ++c) {
    const std::string& h = header[static_cast<std::size_t>(c)];
    if (h == "y")
      ycol = c;
    else if (h == "offset")
      ocol = c;
    else if (h == "lon")
      loncol = c;
    else if (h == "lat")
      latcol = c;
    else if (h.size() > 1 && h[0] == 'x' && std::all_of(h.begin() + 1, h.end(), ::isdigit))
      xcols.emplace_back(std::stoi(h.substr(1)), c);
    else
      throw ConfigError("unknown column '" + h + "' in " + path);
  }
  if (ycol < 0) throw ConfigError("data file " + path + " has no y column");
  if ((loncol < 0) != (latcol < 0)) throw ConfigError("lon and lat must appear together");
  std::sort(xcols.begin(), xcols.end());
  for (std::size_t k = 0; k < xcols.size(); ++k)
    if (xcols[k].first != static_cast<int>(k) + 1) throw ConfigError("covariate columns must be x1..xp");

  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) throw ConfigError(path + ":" + std::to_string(lineno) + ": wrong number of fields");
    std::vector<double> r;
    for (const auto& c : cells) {
      try {
        std::size_t used = 0;
        r.push_back(std::stod(c, &used));
        if (used != c.size()) throw std::invalid_argument(c);
      } catch (const std::exception&) {
        throw ConfigError(path + ":" + std::to_string(lineno) + ": cannot parse '" + c + "'");
      }
    }
    rows.push_back(std::move(r));
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  CountDataset d;
  d.y.resize(n);
  d.X.resize(n, static_cast<Eigen::Index>(xcols.size()));
  if (ocol >= 0) d.offset.resize(n);
  if (loncol >= 0) d.coords.resize(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    d.y[i] = r[static_cast<std::size_t>(ycol)];
    for (std::size_t k = 0; k < xcols.size(); ++k) d.X(i, static_cast<Eigen::Index>(k)) = r[static_cast<std::size_t>(xcols[k].second)];
    if (ocol >= 0) d.offset[i] = r[static_cast<std::size_t>(ocol)];
    if (loncol >= 0) {
      d.coords(i, 0) = r[static_cast<std::size_t>(loncol)];
      d.coords(i, 1) = r[static_cast<std::size_t>(latcol)];
    }
  }
  d.validate();
  return d;
}

void write_count_csv(const std::string& path, const CountDataset& data) {
  auto os = open_out(path);
  os << "y";
  for (Eigen::Index k = 0; k < data.p(); ++k) os << ",x" << k + 1;
  if (data.has_offset()) os << ",offset";
  if (data.has_coords()) os << ",lon,lat";
  os << '\n';
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    os << format_double(data.y[i]);
    for (Eigen::Index k = 0; k < data.p(); ++k) os << ',' << format_double(data.X(i, k));
    if (data.has_offset()) os << ',' << format_double(data.offset[i]);
    if (data.has_coords()) os << ',' << format_double(data.coords(i, 0)) << ',' << format_double(data.coords(i, 1));
    os << '\n';
  }
}

void write_draws_csv(const std::string& path, const PosteriorDraws& draws) {
  auto os = open_out(path);
  const auto& names = draws.names();
  for (std::size_t j = 0; j < names.size(); ++j) os << (j ? "," : "") << names[j];
  os << '\n';
  const auto& v = draws.values();
  for (Eigen::Index r = 0; r < v.rows(); ++r) {
    for (Eigen::Index c = 0; c < v.cols(); ++c) os << (c ? "," : "") << format_double(v(r, c));
    os << '\n';
  }
}

void write_summary(const std::string& path, const PosteriorDraws& draws) {
  auto os = open_out(path);
  os << "draws = " << draws.rows() << '\n';
  for (const auto& [k, v] : draws.diagnostics) os << k << " = " << format_double(v) << '\n';
  for (const auto& s : draws.summary()) {
    os << s.name << ".mean = " << format_double(s.mean) << '\n';
    os << s.name << ".median = " << format_double(s.median) << '\n';
    os << s.name << ".q2.5 = " << format_double(s.q025) << '\n';
    os << s.name << ".q97.5 = " << format_double(s.q975) << '\n';
  }
}

}  // namespace rsb
