#pragma once

#include "frontweave/engine.hpp"
#include "frontweave/grid.hpp"

#include <Eigen/Core>

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace frontweave {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Shortest decimal that reads back to the same double; inf as `inf`.
std::string format_double(double v);
double parse_double(std::string_view s);
int parse_int(std::string_view s);

inline constexpr std::string_view kCloudHeader = "i,j,x,y,psi,nx,ny,nt,orient,source,attempts";

void write_cloud_csv(std::ostream& os, const std::vector<SurfacePoint>& cloud);
std::vector<SurfacePoint> read_cloud_csv(std::istream& is);

/// Rows `x,y,t`.
void write_xyt_csv(std::ostream& os, const std::vector<Eigen::Vector3d>& pts);
std::vector<Eigen::Vector3d> read_xyt_csv(std::istream& is);

/// Flat `key = value` lines; `#` starts a comment. Later keys win.
std::map<std::string, std::string> parse_key_values(std::istream& is);

/// Applies keys named after EngineConfig fields. Unknown keys and bad
/// values throw ConfigError.
void apply_config(EngineConfig& config, const std::map<std::string, std::string>& kv);

}  // namespace frontweave
