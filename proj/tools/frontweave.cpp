#include "frontweave/engine.hpp"
#include "frontweave/examples.hpp"
#include "frontweave/io.hpp"
#include "frontweave/reference.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#ifndef FRONTWEAVE_VERSION
#define FRONTWEAVE_VERSION "dev"
#endif

namespace fw = frontweave;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitUnknownExample = 2;

struct Options {
  std::string example;
  int n = 80;
  std::vector<int> grids;
  int method = 1;
  std::string region = "global";
  std::string out;
  std::string config_path;
  std::string oracle_path;
  bool record_sideways = false;
  unsigned seed = 1;
};

std::map<std::string, std::string> load_overrides(const Options& o) {
  std::map<std::string, std::string> kv;
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    if (!in) throw fw::ConfigError("cannot read config file '" + o.config_path + "'");
    kv = fw::parse_key_values(in);
  }
  if (o.record_sideways) kv["record_sideways"] = "true";
  return kv;
}

fw::EngineConfig make_config(const fw::ExampleSpec& ex, int n, const std::map<std::string, std::string>& kv) {
  fw::EngineConfig c = ex.config(n);
  fw::apply_config(c, kv);
  c.validate();
  return c;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write '" + path + "'");
  return os;
}

std::string stem(const std::string& path) {
  const auto dot = path.rfind('.');
  const auto slash = path.rfind('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path;
  return path.substr(0, dot);
}

void write_manifest(const std::string& path, const std::string& command, const Options& o,
                    const std::map<std::string, std::string>& kv, const std::vector<std::string>& outputs,
                    json extra = json::object()) {
  json m;
  m["tool"] = "frontweave";
  m["version"] = FRONTWEAVE_VERSION;
  m["command"] = command;
  m["example"] = o.example;
  if (command == "converge") {
    m["grids"] = o.grids;
    m["method"] = o.method;
    m["region"] = o.region;
  } else {
    m["n"] = o.n;
  }
  m["config_overrides"] = kv;
  m["outputs"] = outputs;
  m["seed"] = o.seed;
  for (auto& [k, v] : extra.items()) m[k] = v;
  auto os = open_out(path);
  os << m.dump(2) << '\n';
}

int threads_cap() {
  int cap = static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("FRONTWEAVE_THREADS")) {
    try {
      cap = std::max(1, fw::parse_int(env));
    } catch (const fw::ParseError&) {
      throw fw::ConfigError("FRONTWEAVE_THREADS must be an integer");
    }
  }
  return cap;
}

/// Runs `job(k)` for k in [0, count) on at most `cap` threads.
template <class Job>
void parallel_for(int count, int cap, const Job& job) {
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  auto worker = [&] {
    for (int k = next++; k < count; k = next++) {
      try {
        job(k);
      } catch (...) {
        errors[static_cast<std::size_t>(k)] = std::current_exception();
      }
    }
  };
  std::vector<std::jthread> pool;
  for (int w = 1; w < std::min(cap, count); ++w) pool.emplace_back(worker);
  worker();
  pool.clear();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

int cmd_run(const Options& o) {
  const fw::ExampleSpec ex = fw::get_example(o.example);
  const auto kv = load_overrides(o);
  const fw::EngineConfig cfg = make_config(ex, o.n, kv);
  fw::Engine engine(ex.F, cfg);
  engine.initialize(ex.initial);
  const auto& cloud = engine.run();

  const std::string out = o.out.empty() ? o.example + "_n" + std::to_string(o.n) + ".csv" : o.out;
  std::vector<std::string> outputs{out};
  {
    auto os = open_out(out);
    fw::write_cloud_csv(os, cloud);
  }
  if (cfg.record_sideways) {
    const std::string side = stem(out) + ".sideways.csv";
    auto os = open_out(side);
    fw::write_xyt_csv(os, engine.sideways_cloud());
    outputs.push_back(side);
  }
  const auto& st = engine.stats();
  json stats;
  stats["accepted"] = cloud.size();
  stats["rescues"] = st.rescues;
  stats["assigned_on_attempt"] = st.assigned_on_attempt;
  stats["assigned_origin"] = st.assigned_origin;
  stats["failures"] = st.failures;
  stats["insufficient_data"] = st.insufficient_data;
  stats["dropped_after_T"] = st.dropped_after_T;
  write_manifest(stem(out) + ".manifest.json", "run", o, kv, outputs, json{{"stats", stats}});
  std::cerr << "accepted " << cloud.size() << " points, " << st.failures << " rescue failures -> " << out << '\n';
  return 0;
}

struct GridResult {
  int n = 0;
  double h = 0.0;
  fw::Aggregate agg;
  std::vector<fw::SurfacePoint> points;  // those in the region, same order as agg.relative
};

GridResult measure_grid(const fw::ExampleSpec& ex, int n, const Options& o, const std::map<std::string, std::string>& kv,
                        fw::Region region, const fw::NearestIndex* oracle) {
  const fw::EngineConfig cfg = make_config(ex, n, kv);
  const auto cloud = fw::run(ex.initial, ex.F, cfg);
  GridResult r;
  r.n = n;
  r.h = cfg.grid.h;
  std::vector<double> errors;
  for (const auto& p : cloud) {
    if (!fw::in_region(p, region, ex.F, cfg.T())) continue;
    double e = 0.0;
    if (o.method == 1) {
      if (!ex.exact || !ex.exact->valid(p.psi)) continue;
      e = fw::error_method1(p, *ex.exact);
    } else {
      e = fw::error_method2(p, *oracle);
    }
    errors.push_back(e);
    r.points.push_back(p);
  }
  r.agg = fw::aggregate(errors, region == fw::Region::sideways ? 1 : 2, r.h);
  return r;
}

int cmd_converge(Options o) {
  const fw::ExampleSpec ex = fw::get_example(o.example);
  const auto kv = load_overrides(o);
  if (o.grids.empty()) throw fw::ConfigError("--grids is empty");
  std::sort(o.grids.begin(), o.grids.end());
  if (o.method != 1 && o.method != 2) throw fw::ConfigError("--method must be 1 or 2");
  const std::string out = o.out.empty() ? o.example + "_" + o.region + "_m" + std::to_string(o.method) + ".csv" : o.out;
  std::vector<std::string> outputs{out};
  const int cap = threads_cap();

  std::vector<double> hs;
  std::vector<double> l1;
  std::ostringstream table;
  table << "n,h,L1,Linf,slope\n";
  const auto add_row = [&](int n, double h, double L1, double Linf) {
    hs.push_back(h);
    l1.push_back(L1);
    const double slope = hs.size() > 1 ? fw::loglog_slope(hs, l1) : std::nan("");
    table << n << ',' << fw::format_double(h) << ',' << fw::format_double(L1) << ',' << fw::format_double(Linf) << ','
          << fw::format_double(slope) << '\n';
  };

  if (o.region == "patch") {
    std::vector<fw::SidewaysSweep> sweeps(o.grids.size());
    parallel_for(static_cast<int>(o.grids.size()), cap, [&](int k) {
      sweeps[static_cast<std::size_t>(k)] = fw::sideways_sweep(ex, o.grids[static_cast<std::size_t>(k)]);
    });
    for (std::size_t k = 0; k < sweeps.size(); ++k) add_row(o.grids[k], sweeps[k].h, sweeps[k].L1, sweeps[k].Linf);
  } else {
    const fw::Region region = fw::region_from_string(o.region);
    std::optional<fw::NearestIndex> oracle;
    if (o.method == 2) {
      std::vector<Eigen::Vector3d> pts;
      if (!o.oracle_path.empty()) {
        std::ifstream in(o.oracle_path);
        if (!in) throw fw::ConfigError("cannot read oracle '" + o.oracle_path + "'");
        pts = fw::read_xyt_csv(in);
      } else {
        const auto setup = fw::oracle_setup(ex, 4 * o.grids.back());
        pts = fw::build_oracle(ex.F, ex.initial.phi0, setup.grid, ex.T_F, setup.dt).points;
        const std::string oracle_out = stem(out) + ".oracle.csv";
        auto os = open_out(oracle_out);
        fw::write_xyt_csv(os, pts);
        outputs.push_back(oracle_out);
      }
      oracle.emplace(std::move(pts));
    }
    std::vector<GridResult> results(o.grids.size());
    parallel_for(static_cast<int>(o.grids.size()), cap, [&](int k) {
      results[static_cast<std::size_t>(k)] =
          measure_grid(ex, o.grids[static_cast<std::size_t>(k)], o, kv, region, oracle ? &*oracle : nullptr);
    });
    const std::string points_out = stem(out) + ".points.csv";
    auto ps = open_out(points_out);
    ps << "n,x,y,psi,source,relative\n";
    for (const auto& r : results) {
      add_row(r.n, r.h, r.agg.L1, r.agg.Linf);
      for (std::size_t k = 0; k < r.points.size(); ++k) {
        const auto& p = r.points[k];
        ps << r.n << ',' << fw::format_double(p.x) << ',' << fw::format_double(p.y) << ',' << fw::format_double(p.psi)
           << ',' << fw::to_string(p.source) << ',' << fw::format_double(r.agg.relative[k]) << '\n';
      }
    }
    outputs.push_back(points_out);
  }
  {
    auto os = open_out(out);
    os << table.str();
  }
  write_manifest(stem(out) + ".manifest.json", "converge", o, kv, outputs);
  std::cout << table.str();
  return 0;
}

int cmd_oracle(const Options& o) {
  const fw::ExampleSpec ex = fw::get_example(o.example);
  const auto setup = fw::oracle_setup(ex, o.n);
  const auto cloud = fw::build_oracle(ex.F, ex.initial.phi0, setup.grid, ex.T_F, setup.dt);
  const std::string out = o.out.empty() ? o.example + "_oracle_n" + std::to_string(o.n) + ".csv" : o.out;
  {
    auto os = open_out(out);
    fw::write_xyt_csv(os, cloud.points);
  }
  write_manifest(stem(out) + ".manifest.json", "oracle", o, {}, {out},
                 json{{"h", cloud.h}, {"dt", cloud.dt}, {"points", cloud.points.size()}});
  std::cerr << cloud.points.size() << " oracle points -> " << out << '\n';
  return 0;
}

int cmd_selftest(const Options& o) {
  std::mt19937_64 rng(o.seed);
  int failed = 0;
  const auto report = [&](const char* name, bool ok) {
    std::cout << (ok ? "ok   " : "FAIL ") << name << '\n';
    if (!ok) ++failed;
  };

  const auto unit_speed = fw::SpeedField::constant(1.0);
  fw::InitialCurve circle;
  circle.phi0 = [](double x, double y) { return std::hypot(x, y) - 0.25; };
  circle.phi = [](double x, double y, double t) { return std::hypot(x, y) - 0.25 - t; };
  // T past the corners, so the time guard never cuts the march short
  const auto grid = fw::GridSpec::square(-0.5, 1.0, 40, 10.0);
  fw::EngineConfig cfg;
  cfg.grid = grid;
  const auto cloud = fw::run(circle, unit_speed, cfg);
  const auto classical = fw::classical_fmm(circle, unit_speed, grid);
  bool same = cloud.size() == classical.size();
  for (std::size_t k = 0; same && k < cloud.size(); ++k) {
    same = cloud[k].i == classical[k].i && cloud[k].j == classical[k].j && cloud[k].psi == classical[k].psi;
  }
  report("constant speed reduces to classical fast marching", same);

  std::stringstream ss;
  fw::write_cloud_csv(ss, cloud);
  const auto back = fw::read_cloud_csv(ss);
  bool round = back.size() == cloud.size();
  for (std::size_t k = 0; round && k < cloud.size(); ++k) {
    round = back[k].psi == cloud[k].psi && back[k].normal3 == cloud[k].normal3 && back[k].source == cloud[k].source;
  }
  report("cloud CSV round trip", round);

  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Eigen::Vector3d> pts(500);
  for (auto& p : pts) p = Eigen::Vector3d(u(rng), u(rng), u(rng));
  const fw::NearestIndex index(pts);
  bool nearest = true;
  for (int k = 0; k < 200; ++k) {
    const Eigen::Vector3d q(u(rng), u(rng), u(rng));
    nearest = nearest && index.distance(q) == index.brute_force(q);
  }
  report("nearest index matches brute force", nearest);
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fast marching with sideways rescues for sign-changing speeds"};
  app.set_version_flag("--version", FRONTWEAVE_VERSION);
  app.require_subcommand(1);
  Options o;

  auto* run = app.add_subcommand("run", "March an example and write the accepted cloud");
  run->add_option("--example", o.example, "Example name")->required();
  run->add_option("--n", o.n, "Intervals per axis")->check(CLI::PositiveNumber);
  run->add_option("--out", o.out, "Cloud CSV path");
  run->add_option("--config", o.config_path, "key = value file of EngineConfig fields");
  run->add_flag("--record-sideways", o.record_sideways, "Also write interior patch points");

  auto* conv = app.add_subcommand("converge", "Error table over a list of grids");
  conv->add_option("--example", o.example, "Example name")->required();
  conv->add_option("--grids", o.grids, "Grid sizes, e.g. 40,80,160")->delimiter(',')->required();
  conv->add_option("--method", o.method, "1: exact level set, 2: oracle cloud");
  conv->add_option("--region", o.region, "bottom, top, sideways, global, or patch (sideways scheme alone)");
  conv->add_option("--oracle", o.oracle_path, "x,y,t oracle CSV for method 2");
  conv->add_option("--out", o.out, "Table CSV path");
  conv->add_option("--config", o.config_path, "key = value file of EngineConfig fields");

  auto* orc = app.add_subcommand("oracle", "Level-set reference cloud");
  orc->add_option("--example", o.example, "Example name")->required();
  orc->add_option("--n", o.n, "Fine grid intervals per axis")->check(CLI::PositiveNumber);
  orc->add_option("--out", o.out, "x,y,t CSV path");

  auto* self = app.add_subcommand("selftest", "Quick internal consistency checks");
  self->add_option("--seed", o.seed, "Random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*run) return cmd_run(o);
    if (*conv) return cmd_converge(o);
    if (*orc) return cmd_oracle(o);
    return cmd_selftest(o);
  } catch (const fw::UnknownExampleError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUnknownExample;
  } catch (const fw::RefineRequired& e) {
    std::cerr << "refine required: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
