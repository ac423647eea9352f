#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

#include "ecdiv/error.hpp"
#include "ecdiv/experiment.hpp"

namespace ecdiv {

namespace {

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

double parse_num(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw Error(ErrorKind::invalid_input, "csv: bad number '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

std::string to_csv(const std::vector<ResultRow>& rows, const std::string& preamble) {
  std::ostringstream os;
  if (!preamble.empty()) os << "# " << preamble << "\n";
  os << "experiment,method,x,value,status,wall_ms,probe\n";
  for (const auto& r : rows) {
    os << r.experiment << ',' << r.method << ',' << num(r.x) << ',' << num(r.value) << ',' << r.status << ',';
    if (r.wall_ms) os << num(*r.wall_ms);
    os << ',';
    if (r.probe)
      for (std::size_t i = 0; i < r.probe->size(); ++i) os << (i ? ";" : "") << num((*r.probe)[i]);
    os << '\n';
  }
  return os.str();
}

std::vector<ResultRow> parse_csv(const std::string& text) {
  std::vector<ResultRow> rows;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 7) throw Error(ErrorKind::invalid_input, "csv: expected 7 fields in '" + line + "'");
    ResultRow r;
    r.experiment = f[0];
    r.method = f[1];
    r.x = parse_num(f[2]);
    r.value = parse_num(f[3]);
    r.status = f[4];
    if (!f[5].empty()) r.wall_ms = parse_num(f[5]);
    if (!f[6].empty()) {
      r.probe.emplace();
      for (const auto& p : split(f[6], ';')) r.probe->push_back(parse_num(p));
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string plot_svg(const std::vector<ResultRow>& rows, const std::string& title) {
  constexpr double w = 640, h = 420, left = 70, right = 150, top = 40, bottom = 50;
  static const char* colors[] = {"#1b5e9e", "#c2410c", "#15803d", "#7e22ce", "#b91c1c", "#0f766e", "#a16207", "#374151"};

  std::map<std::string, std::vector<std::pair<double, double>>> series;
  std::vector<std::string> order;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& r : rows) {
    if (!std::isfinite(r.value) || !std::isfinite(r.x)) continue;
    if (!series.count(r.method)) order.push_back(r.method);
    series[r.method].emplace_back(r.x, r.value);
    x0 = std::min(x0, r.x), x1 = std::max(x1, r.x);
    y0 = std::min(y0, r.value), y1 = std::max(y1, r.value);
  }
  if (order.empty()) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  const auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * (w - left - right); };
  const auto py = [&](double y) { return h - bottom - (y - y0) / (y1 - y0) * (h - top - bottom); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << w / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n"
     << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << w - left - right << "\" height=\""
     << h - top - bottom << "\" fill=\"none\" stroke=\"#555\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4, yv = y0 + (y1 - y0) * i / 4;
    os << "<text x=\"" << px(xv) << "\" y=\"" << h - bottom + 18 << "\" text-anchor=\"middle\">" << num(xv)
       << "</text>\n<text x=\"" << left - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">"
       << num(std::round(yv * 1e4) / 1e4) << "</text>\n";
  }
  for (std::size_t s = 0; s < order.size(); ++s) {
    auto pts = series[order[s]];
    std::sort(pts.begin(), pts.end());
    const char* col = colors[s % std::size(colors)];
    os << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : pts) os << px(x) << ',' << py(y) << ' ';
    os << "\"/>\n<text x=\"" << w - right + 10 << "\" y=\"" << top + 16 * (s + 1) << "\" fill=\"" << col << "\">"
       << order[s] << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace ecdiv
