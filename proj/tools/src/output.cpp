#include "fpflow/cli/output.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fpflow::cli {

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw std::runtime_error("cannot format number");
  return std::string(buf.data(), ptr);
}

std::string trace_csv(const EnergyTrace& trace) {
  std::string out(kTraceHeader);
  out += '\n';
  for (const auto& r : trace.rows) {
    for (double v : {r.t, r.mass, r.F, r.F_rel, r.D_dis, r.f_min, r.f_max}) {
      out += format_double(v);
      out += ',';
    }
    out.back() = '\n';
  }
  return out;
}

namespace {

double parse_number(std::string_view field, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw std::runtime_error("trace line " + std::to_string(line) + ": bad number '" +
                             std::string(field) + "'");
  }
  return v;
}

}  // namespace

EnergyTrace parse_trace_csv(std::string_view text) {
  EnergyTrace trace;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    if (nl == std::string_view::npos) throw std::runtime_error("trace must end with a newline");
    const std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl + 1);
    ++line_no;
    if (line_no == 1) {
      if (line != kTraceHeader) throw std::runtime_error("unexpected trace header");
      continue;
    }
    std::array<double, 7> v{};
    std::string_view rest = line;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const auto comma = rest.find(',');
      const bool last = i + 1 == v.size();
      if (last != (comma == std::string_view::npos)) {
        throw std::runtime_error("trace line " + std::to_string(line_no) + ": expected 7 fields");
      }
      v[i] = parse_number(rest.substr(0, comma), line_no);
      if (!last) rest.remove_prefix(comma + 1);
    }
    trace.rows.push_back(TraceRow{v[0], v[1], v[2], v[3], v[4], v[5], v[6]});
  }
  if (line_no == 0) throw std::runtime_error("empty trace");
  return trace;
}

std::string equilibrium_csv(const EquilibriumState& eq) {
  const TensorGrid& g = eq.density.grid();
  static constexpr std::array<std::string_view, 3> kAxes{"x", "y", "z"};
  std::string out;
  for (int d = 0; d < g.dim(); ++d) {
    out += kAxes[d];
    out += ',';
  }
  out += "f_eq\n";
  for (std::size_t c = 0; c < g.size(); ++c) {
    const Point x = g.center(c);
    for (int d = 0; d < g.dim(); ++d) {
      out += format_double(x[d]);
      out += ',';
    }
    out += format_double(eq.density[c]);
    out += '\n';
  }
  out += "# C1=" + format_double(eq.constant) + " F_eq=" + format_double(eq.free_energy) + "\n";
  return out;
}

std::string compare_csv(const std::vector<CompareRow>& rows) {
  std::string out = "name,rate,r2\n";
  for (const auto& r : rows) {
    out += r.name + "," + format_double(r.rate) + "," + format_double(r.r_squared) + "\n";
  }
  return out;
}

namespace {

constexpr std::array<std::string_view, 8> kPalette{"#000000", "#d62728", "#1f77b4", "#2ca02c",
                                                   "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

// Fixed notation keeps the SVG text identical across platforms.
std::string fmt(double v) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << v;
  return os.str();
}

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

double nice_step(double span, int target) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0}) {
    if (m * mag >= raw) return m * mag;
  }
  return 10.0 * mag;
}

}  // namespace

std::string semilog_svg(const std::vector<PlotSeries>& series, std::string_view title,
                        std::string_view x_label, std::string_view y_label) {
  constexpr double W = 640, H = 420, left = 80, right = 20, top = 40, bottom = 60;
  const double pw = W - left - right, ph = H - top - bottom;

  double x0 = 0.0, x1 = 1.0, ly0 = -1.0, ly1 = 0.0;
  bool any = false;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!(s.y[i] > 0.0) || !std::isfinite(s.y[i])) continue;
      const double ly = std::log10(s.y[i]);
      if (!any) {
        x0 = x1 = s.x[i];
        ly0 = ly1 = ly;
        any = true;
      }
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      ly0 = std::min(ly0, ly);
      ly1 = std::max(ly1, ly);
    }
  }
  if (x1 <= x0) x1 = x0 + 1.0;
  ly0 = std::floor(ly0);
  ly1 = std::ceil(ly1);
  if (ly1 <= ly0) ly1 = ly0 + 1.0;

  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double ly) { return top + (ly1 - ly) / (ly1 - ly0) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" viewBox=\"0 0 " << W << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << fmt(W / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
     << escape(title) << "</text>\n";
  os << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\"" << fmt(pw)
     << "\" height=\"" << fmt(ph) << "\" fill=\"none\" stroke=\"#444\"/>\n";

  // Decade ticks, thinned to at most ~10 labels.
  const int decades = static_cast<int>(ly1 - ly0);
  const int every = std::max(1, (decades + 9) / 10);
  for (int k = static_cast<int>(ly0); k <= static_cast<int>(ly1); ++k) {
    if ((k - static_cast<int>(ly0)) % every != 0) continue;
    const double y = py(k);
    os << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(left + pw)
       << "\" y2=\"" << fmt(y) << "\" stroke=\"#ddd\"/>\n";
    os << "<text x=\"" << fmt(left - 6) << "\" y=\"" << fmt(y + 4)
       << "\" text-anchor=\"end\">1e" << k << "</text>\n";
  }
  const double step = nice_step(x1 - x0, 6);
  for (double x = std::ceil(x0 / step) * step; x <= x1 + 1e-9 * step; x += step) {
    const double X = px(x);
    os << "<line x1=\"" << fmt(X) << "\" y1=\"" << fmt(top + ph) << "\" x2=\"" << fmt(X)
       << "\" y2=\"" << fmt(top + ph + 5) << "\" stroke=\"#444\"/>\n";
    os << "<text x=\"" << fmt(X) << "\" y=\"" << fmt(top + ph + 18)
       << "\" text-anchor=\"middle\">" << format_double(std::round(x / step) * step) << "</text>\n";
  }
  os << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"" << fmt(H - 16)
     << "\" text-anchor=\"middle\">" << escape(x_label) << "</text>\n";
  os << "<text transform=\"translate(18 " << fmt(top + ph / 2)
     << ") rotate(-90)\" text-anchor=\"middle\">" << escape(y_label) << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const std::string_view color = kPalette[k % kPalette.size()];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!(s.y[i] > 0.0) || !std::isfinite(s.y[i])) continue;
      if (!first) os << ' ';
      os << fmt(px(s.x[i])) << ',' << fmt(py(std::log10(s.y[i])));
      first = false;
    }
    os << "\"/>\n";
    const double ly = top + 16 + 16 * static_cast<double>(k);
    os << "<line x1=\"" << fmt(left + pw - 150) << "\" y1=\"" << fmt(ly - 4) << "\" x2=\""
       << fmt(left + pw - 130) << "\" y2=\"" << fmt(ly - 4) << "\" stroke=\"" << color
       << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << fmt(left + pw - 125) << "\" y=\"" << fmt(ly) << "\">"
       << escape(s.label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

PlotSeries free_energy_series(const EnergyTrace& trace, std::string label) {
  PlotSeries s{std::move(label), {}, {}};
  for (const auto& r : trace.rows) {
    s.x.push_back(r.t);
    s.y.push_back(r.F_rel);
  }
  return s;
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw std::runtime_error("cannot write " + path.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw std::runtime_error("cannot write " + path.string());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace fpflow::cli
