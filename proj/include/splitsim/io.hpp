#pragma once

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "splitsim/analysis.hpp"
#include "splitsim/ca.hpp"
#include "splitsim/conformance.hpp"
#include "splitsim/engine.hpp"

namespace splitsim {

struct ParseError : std::runtime_error {
  int line = 0;
  ParseError(const std::string& what, int line_)
      : std::runtime_error("line " + std::to_string(line_) + ": " + what),
        line(line_) {}
};

namespace io_detail {

// Compact affine form used in headers: "3/1+0/1*h", "5/1-5/1*h".
inline std::string compact_affine(const AffineMass& m) {
  std::string b = m.b.str();
  if (b[0] == '-') return m.a.str() + "-" + b.substr(1) + "*h";
  return m.a.str() + "+" + b + "*h";
}

}  // namespace io_detail

// Exact, human-diffable run snapshot. Header then one line per explicit
// site; loading and saving round-trips byte for byte.
struct Snapshot {
  int version = 1;
  int d = 1;
  long long t = 0;
  SplittingOrder order;
  HInterval h = HInterval::point(Rational(0));
  AffineMass n;
  SparseConfiguration config;

  static Snapshot of_state(const EvolutionState& st) {
    Snapshot s;
    s.d = st.dim();
    s.t = st.t();
    s.order = st.order();
    s.h = st.interval();
    s.n = st.initial_mass();
    s.config = st.config();
    return s;
  }
};

inline void save_snapshot(const Snapshot& s, std::ostream& out) {
  out << "SPLITSIM " << s.version << "\n";
  out << "d=" << s.d << " t=" << s.t << " order=" << s.order.str() << "\n";
  out << "h=" << (s.h.is_point() ? s.h.lo.str() : s.h.str()) << "\n";
  out << "n=" << io_detail::compact_affine(s.n) << "\n";
  std::vector<Site> sites;
  for (const auto& [site, mass] : s.config.cells()) sites.push_back(site);
  std::sort(sites.begin(), sites.end());
  for (const Site& site : sites) {
    const AffineMass& m = s.config.at(site);
    for (int i = 0; i < s.d; ++i) out << site[i] << " ";
    out << "| " << m.a.str() << " | " << m.b.str() << "\n";
  }
}

inline void save_snapshot(const Snapshot& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  save_snapshot(s, out);
}

inline Snapshot load_snapshot(std::istream& in) {
  Snapshot s;
  std::string line;
  int lineno = 0;
  auto next_line = [&]() {
    if (!std::getline(in, line)) throw ParseError("unexpected end of file", lineno);
    ++lineno;
  };
  next_line();
  {
    std::istringstream ls(line);
    std::string magic;
    ls >> magic >> s.version;
    if (magic != "SPLITSIM" || s.version != 1)
      throw ParseError("not a SPLITSIM 1 snapshot", lineno);
  }
  next_line();
  {
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) {
      auto eq = tok.find('=');
      if (eq == std::string::npos) throw ParseError("bad header field", lineno);
      std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
      try {
        if (key == "d")
          s.d = std::stoi(val);
        else if (key == "t")
          s.t = std::stoll(val);
        else if (key == "order")
          s.order = SplittingOrder::parse(val);
        else
          throw ParseError("unknown header field '" + key + "'", lineno);
      } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), lineno);
      }
    }
  }
  next_line();
  if (line.rfind("h=", 0) != 0) throw ParseError("expected h=", lineno);
  try {
    std::string val = line.substr(2);
    if (!val.empty() && val[0] == '[') {
      auto comma = val.find(',');
      auto close = val.find(')');
      if (comma == std::string::npos || close == std::string::npos)
        throw ParseError("bad h interval", lineno);
      s.h = HInterval::half_open(
          Rational::parse(val.substr(1, comma - 1)),
          Rational::parse(val.substr(comma + 1, close - comma - 1)));
    } else {
      s.h = HInterval::point(Rational::parse(val));
    }
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), lineno);
  }
  next_line();
  if (line.rfind("n=", 0) != 0) throw ParseError("expected n=", lineno);
  try {
    s.n = AffineMass::parse(line.substr(2));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), lineno);
  }

  AffineMass background = s.h.is_point() ? AffineMass::constant(s.h.lo)
                                         : AffineMass::background_unit();
  s.config = SparseConfiguration(s.d, background);
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    Site site = Site::origin(s.d);
    for (int i = 0; i < s.d; ++i)
      if (!(ls >> site.c[i])) throw ParseError("bad site coordinates", lineno);
    std::string bar, a, bar2, b;
    if (!(ls >> bar >> a >> bar2 >> b) || bar != "|" || bar2 != "|")
      throw ParseError("bad mass fields", lineno);
    try {
      s.config.set(site, AffineMass(Rational::parse(a), Rational::parse(b)));
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), lineno);
    } catch (const std::domain_error& e) {
      throw ParseError(e.what(), lineno);
    }
  }
  return s;
}

inline Snapshot load_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  return load_snapshot(in);
}

// ---------------------------------------------------------------------------
// CSV exports. Exact values are printed as canonical fractions; only the
// inherently approximate ball-bound diagnostics use decimals.

inline void write_trace_csv(const EvolutionState& st, std::ostream& out) {
  out << "t,unstable,toppled,window_mass\n";
  for (const StepStats& row : st.series()) {
    out << row.t << "," << row.unstable << "," << row.toppled << ",";
    if (row.window_mass) out << io_detail::compact_affine(*row.window_mass);
    out << "\n";
  }
}

inline void write_scan_csv(const std::vector<ScanRow>& rows, std::ostream& out) {
  out << "d,h,n,order,verdict,toppled,steps,growth_rate\n";
  for (const ScanRow& r : rows) {
    out << r.d << "," << r.h.str() << "," << r.n.str() << "," << r.order.str()
        << "," << r.verdict << "," << r.toppled << "," << r.steps << ","
        << std::setprecision(6) << r.growth_rate << "\n";
  }
}

inline void write_ball_bounds_csv(const std::vector<BallBoundsReport>& rows,
                                  const std::vector<std::pair<Rational, Rational>>& nh,
                                  std::ostream& out) {
  out << "d,h,n,r,c1,c2_obs,c1p,c2p_obs\n";
  out << std::setprecision(12);
  for (size_t i = 0; i < rows.size(); ++i) {
    out << rows[i].d << "," << nh[i].second.str() << "," << nh[i].first.str()
        << "," << rows[i].r << "," << rows[i].c1 << "," << rows[i].c2_obs
        << "," << rows[i].c1p << "," << rows[i].c2p_obs << "\n";
  }
}

// ---------------------------------------------------------------------------
// Plain (ASCII) portable pixmap rendering.

struct Rgb {
  int r = 0, g = 0, b = 0;
};

// Warm colors mean heavier piles; exact thresholds, no floating point.
inline Rgb mass_color(const AffineMass& m, const AffineMass& background,
                      const Rational& h) {
  if (m == background) return {0, 0, 139};  // background: dark blue
  Rational v = m.eval(h);
  if (v.is_zero()) return {0, 0, 0};   // just split: black
  if (v < Rational(0)) return {25, 25, 112};
  if (v < Rational(1)) {
    // cool-to-warm ramp on [0, 1)
    long long k = (v * Rational(255)).floor().convert_to<long long>();
    return {(int)(60 + (190 * k) / 255), (int)(120 + (110 * k) / 255),
            (int)(200 - (80 * k) / 255)};
  }
  if (v < Rational(2)) return {184, 134, 11};  // dark yellow
  if (v < Rational(4)) return {255, 140, 0};   // orange
  return {200, 30, 30};                        // red
}

inline Rgb label_color(const std::string& name) {
  if (name == "e") return {0, 0, 0};
  if (name == "c") return {255, 255, 0};
  if (name == "cp") return {184, 134, 11};
  if (name == "p") return {135, 206, 250};
  if (name == "h") return {0, 0, 139};
  if (name == "m") return {144, 238, 144};
  if (name == "dp") return {255, 140, 0};
  if (name == "dx") return {255, 0, 0};
  if (name == "qp") return {139, 0, 0};
  if (name == "d") return {0, 128, 0};
  if (name == "q") return {160, 32, 240};
  if (name == "u") return {255, 0, 0};
  if (name == "mp") return {0, 128, 128};
  return {128, 128, 128};
}

struct UnsupportedDimension : std::invalid_argument {
  explicit UnsupportedDimension(const std::string& what)
      : std::invalid_argument(what) {}
};

namespace io_detail {

template <typename ColorAt>
void write_ppm(long long x_lo, long long x_hi, long long y_lo, long long y_hi,
               int pixel, ColorAt&& color_at, std::ostream& out) {
  long long w = (x_hi - x_lo + 1) * pixel;
  long long hgt = (y_hi - y_lo + 1) * pixel;
  out << "P3\n" << w << " " << hgt << "\n255\n";
  for (long long y = y_hi; y >= y_lo; --y) {
    for (int py = 0; py < pixel; ++py) {
      for (long long x = x_lo; x <= x_hi; ++x) {
        Rgb c = color_at(x, y);
        for (int px = 0; px < pixel; ++px)
          out << c.r << " " << c.g << " " << c.b << " ";
      }
      out << "\n";
    }
  }
}

}  // namespace io_detail

// Renders a mass snapshot evaluated at a specific background value h. One
// pixel block per site; 1D snapshots render as a strip.
inline void render_mass(const SparseConfiguration& config, const Rational& h,
                        std::ostream& out, int pixel = 1, int margin = 1) {
  int d = config.dim();
  if (d != 1 && d != 2)
    throw UnsupportedDimension("rendering supports d = 1 and d = 2");
  long long x_lo = 0, x_hi = 0, y_lo = 0, y_hi = 0;
  for (const auto& [site, mass] : config.cells()) {
    x_lo = std::min<long long>(x_lo, site[0]);
    x_hi = std::max<long long>(x_hi, site[0]);
    if (d == 2) {
      y_lo = std::min<long long>(y_lo, site[1]);
      y_hi = std::max<long long>(y_hi, site[1]);
    }
  }
  x_lo -= margin;
  x_hi += margin;
  if (d == 2) {
    y_lo -= margin;
    y_hi += margin;
  }
  io_detail::write_ppm(
      x_lo, x_hi, y_lo, y_hi, pixel,
      [&](long long x, long long y) {
        Site s = d == 1 ? Site::of({(int32_t)x})
                        : Site::of({(int32_t)x, (int32_t)y});
        return mass_color(config.at(s), config.background(), h);
      },
      out);
}

inline void render_ca(const CAState& state, const AutomatonSpec& spec,
                      std::ostream& out, int pixel = 1, int margin = 1) {
  if (state.d != 2) throw UnsupportedDimension("label rendering needs d = 2");
  long long x_lo = 0, x_hi = 0, y_lo = 0, y_hi = 0;
  for (const auto& [site, lab] : state.cells) {
    x_lo = std::min<long long>(x_lo, site[0]);
    x_hi = std::max<long long>(x_hi, site[0]);
    y_lo = std::min<long long>(y_lo, site[1]);
    y_hi = std::max<long long>(y_hi, site[1]);
  }
  x_lo -= margin;
  x_hi += margin;
  y_lo -= margin;
  y_hi += margin;
  io_detail::write_ppm(
      x_lo, x_hi, y_lo, y_hi, pixel,
      [&](long long x, long long y) {
        Label l = state.at(Site::of({(int32_t)x, (int32_t)y}));
        return label_color(spec.label_name(l));
      },
      out);
}

// Exact polygon geometry companion to a rendering: edge coefficients and
// vertices of the target shape, plus the scale and tolerance used.
inline void write_polygon_overlay(const Polygon& poly, const Rational& scale,
                                  const Rational& eps, std::ostream& out) {
  out << "polygon " << poly.name << "\n";
  out << "scale " << scale.str() << "\n";
  out << "eps " << eps.str() << "\n";
  for (const auto& [x, y] : poly.vertices)
    out << "vertex " << x.str() << " " << y.str() << "\n";
  for (const auto& e : poly.edges)
    out << "edge " << e.a.str() << " " << e.b.str() << " " << e.c.str() << "\n";
}

// ---------------------------------------------------------------------------
// JSON serialization of verification reports.

inline nlohmann::json to_json(const IntervalVerdict& v) {
  nlohmann::json j;
  j["interval"] = v.interval.str();
  switch (v.status) {
    case IntervalVerdict::Status::Success: j["status"] = "success"; break;
    case IntervalVerdict::Status::Violation: j["status"] = "violation"; break;
    case IntervalVerdict::Status::Inconclusive:
      j["status"] = "inconclusive";
      break;
  }
  j["steps_checked"] = v.steps_checked;
  if (!v.detail.empty()) j["detail"] = v.detail;
  if (v.violation) {
    nlohmann::json vio;
    vio["site"] = detail::site_str(v.violation->site);
    vio["mass"] = v.violation->mass.str();
    vio["window"] = v.violation->window;
    j["violation"] = vio;
  }
  return j;
}

inline nlohmann::json to_json(const ConformanceReport& r) {
  nlohmann::json j;
  j["automaton"] = r.automaton;
  j["t_max"] = r.t_max;
  j["time_offset"] = r.time_offset;
  j["bisections"] = r.bisections;
  j["success"] = r.success();
  j["verdicts"] = nlohmann::json::array();
  for (const auto& v : r.verdicts) j["verdicts"].push_back(to_json(v));
  return j;
}

inline nlohmann::json to_json(const RuleLedgerEntry& e) {
  nlohmann::json j;
  j["rule"] = e.rule_index + 1;
  j["text"] = e.rule_text;
  switch (e.kind) {
    case RuleCheckKind::Arithmetic: j["kind"] = "arithmetic"; break;
    case RuleCheckKind::Structural: j["kind"] = "structural"; break;
    case RuleCheckKind::MultiStep: j["kind"] = "multi-step"; break;
  }
  j["computed_validity"] = e.computed.validity.str();
  j["reference_validity"] = e.reference.str();
  j["sum_lo"] = e.computed.sum_lo.str();
  if (e.computed.sum_hi) j["sum_hi"] = e.computed.sum_hi->str();
  j["matches_reference"] = e.matches;
  j["covers_theorem_interval"] = e.covers_theorem_interval;
  if (e.erratum) j["erratum"] = "reference range is inconsistent as printed";
  return j;
}

}  // namespace splitsim
