#include "frontweave/io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace frontweave {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  for (;;) {
    const auto k = line.find(sep, pos);
    out.push_back(line.substr(pos, k == std::string_view::npos ? std::string_view::npos : k - pos));
    if (k == std::string_view::npos) break;
    pos = k + 1;
  }
  return out;
}

bool parse_bool(std::string_view s) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ParseError("not a boolean: '" + std::string(s) + "'");
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  s = trim(s);
  if (s == "inf" || s == "+inf") return kInf;
  if (s == "-inf") return -kInf;
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ParseError("not a number: '" + std::string(s) + "'");
  }
  return v;
}

int parse_int(std::string_view s) {
  s = trim(s);
  int v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ParseError("not an integer: '" + std::string(s) + "'");
  }
  return v;
}

void write_cloud_csv(std::ostream& os, const std::vector<SurfacePoint>& cloud) {
  os << kCloudHeader << '\n';
  for (const auto& p : cloud) {
    os << p.i << ',' << p.j << ',' << format_double(p.x) << ',' << format_double(p.y) << ',' << format_double(p.psi)
       << ',' << format_double(p.normal3.x()) << ',' << format_double(p.normal3.y()) << ','
       << format_double(p.normal3.z()) << ',' << p.orient << ',' << to_string(p.source) << ',' << p.attempts
       << '\n';
  }
}

std::vector<SurfacePoint> read_cloud_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || trim(line) != kCloudHeader) throw ParseError("cloud CSV: bad header");
  std::vector<SurfacePoint> out;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = split(trim(line), ',');
    if (f.size() != 11) throw ParseError("cloud CSV line " + std::to_string(lineno) + ": expected 11 fields");
    SurfacePoint p;
    p.i = parse_int(f[0]);
    p.j = parse_int(f[1]);
    p.x = parse_double(f[2]);
    p.y = parse_double(f[3]);
    p.psi = parse_double(f[4]);
    p.normal3 = Eigen::Vector3d(parse_double(f[5]), parse_double(f[6]), parse_double(f[7]));
    const double len2 = p.normal3.head<2>().norm();
    p.normal2 = len2 > 0.0 ? Eigen::Vector2d(p.normal3.head<2>() / len2) : Eigen::Vector2d::Zero();
    p.orient = parse_int(f[8]);
    p.source = source_from_string(trim(f[9]));
    p.attempts = parse_int(f[10]);
    out.push_back(p);
  }
  return out;
}

void write_xyt_csv(std::ostream& os, const std::vector<Eigen::Vector3d>& pts) {
  os << "x,y,t\n";
  for (const auto& p : pts) {
    os << format_double(p.x()) << ',' << format_double(p.y()) << ',' << format_double(p.z()) << '\n';
  }
}

std::vector<Eigen::Vector3d> read_xyt_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || trim(line) != "x,y,t") throw ParseError("x,y,t CSV: bad header");
  std::vector<Eigen::Vector3d> out;
  while (std::getline(is, line)) {
    if (trim(line).empty()) continue;
    const auto f = split(trim(line), ',');
    if (f.size() != 3) throw ParseError("x,y,t CSV: expected 3 fields");
    out.emplace_back(parse_double(f[0]), parse_double(f[1]), parse_double(f[2]));
  }
  return out;
}

std::map<std::string, std::string> parse_key_values(std::istream& is) {
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string_view v = line;
    if (const auto c = v.find('#'); c != std::string_view::npos) v = v.substr(0, c);
    v = trim(v);
    if (v.empty()) continue;
    const auto eq = v.find('=');
    if (eq == std::string_view::npos) throw ParseError("config line " + std::to_string(lineno) + ": missing '='");
    const auto key = trim(v.substr(0, eq));
    if (key.empty()) throw ParseError("config line " + std::to_string(lineno) + ": empty key");
    kv[std::string(key)] = std::string(trim(v.substr(eq + 1)));
  }
  return kv;
}

void apply_config(EngineConfig& c, const std::map<std::string, std::string>& kv) {
  for (const auto& [key, value] : kv) {
    try {
      if (key == "s_fraction") {
        c.s_fraction = parse_double(value);
      } else if (key == "r1") {
        c.r1 = parse_double(value);
      } else if (key == "r2") {
        c.r2 = parse_double(value);
      } else if (key == "r1_skew") {
        c.r1_skew = parse_double(value);
      } else if (key == "r2_skew") {
        c.r2_skew = parse_double(value);
      } else if (key == "sign_test_samples") {
        c.sign_test_samples = parse_int(value);
      } else if (key == "time_dependent") {
        c.time_dependent = parse_bool(value);
      } else if (key == "record_sideways") {
        c.record_sideways = parse_bool(value);
      } else if (key == "R_max") {
        c.R_max = parse_int(value);
      } else if (key == "use_cfl") {
        c.use_cfl = parse_bool(value);
      } else if (key == "delta") {
        c.delta = parse_double(value);
      } else if (key == "local_lipschitz") {
        c.local_lipschitz = parse_bool(value);
      } else if (key == "zero_speed") {
        c.zero_speed = parse_double(value);
      } else if (key == "slow_factor") {
        c.slow_factor = parse_double(value);
      } else if (key == "first_crossing_guard") {
        c.first_crossing_guard = parse_bool(value);
      } else if (key == "on_refine") {
        if (value == "error") {
          c.on_refine = RefinePolicy::error;
        } else if (value == "rescue") {
          c.on_refine = RefinePolicy::rescue;
        } else {
          throw ParseError("expected error or rescue");
        }
      } else {
        throw ConfigError("unknown config key '" + key + "'");
      }
    } catch (const ParseError& e) {
      throw ConfigError("config key '" + key + "': " + e.what());
    }
  }
}

}  // namespace frontweave
