#include "tdqmc/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include "tdqmc/errors.hpp"

namespace tdqmc {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

long long parse_integer(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  long long v = 0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty())
    throw ConfigError(key + ": expected an integer, got '" + text + "'");
  return v;
}

std::size_t parse_count(const std::string& text, const std::string& key) {
  const long long v = parse_integer(text, key);
  if (v < 0) throw ConfigError(key + ": must be non-negative");
  return static_cast<std::size_t>(v);
}

std::vector<double> parse_list(const std::string& text, const std::string& key) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  for (const std::string& item : split(text, ',')) out.push_back(parse_number(item, key));
  return out;
}

std::string format_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t n = 0; n < v.size(); ++n) out += (n ? ", " : "") + format_number(v[n]);
  return out;
}

// range "a..b" or a single integer
std::vector<int> parse_range(const std::string& text, const std::string& key) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) return {static_cast<int>(parse_integer(text, key))};
  const long long lo = parse_integer(text.substr(0, dots), key);
  const long long hi = parse_integer(text.substr(dots + 2), key);
  if (hi < lo) throw ConfigError(key + ": empty range '" + text + "'");
  if (hi - lo > 100000) throw ConfigError(key + ": range '" + text + "' is too large");
  std::vector<int> out;
  for (long long v = lo; v <= hi; ++v) out.push_back(static_cast<int>(v));
  return out;
}

std::string view_name(const ViewSpec& v) {
  switch (v.view) {
    case EnsembleView::pooled:
      return "pooled";
    case EnsembleView::electron_mean:
      return "electron_mean";
    case EnsembleView::electron:
      return "electron:" + std::to_string(v.electron);
  }
  return "pooled";
}

ViewSpec parse_view(const std::string& text) {
  const std::string t = trim(text);
  if (t == "pooled") return {EnsembleView::pooled, 0};
  if (t == "electron_mean") return {EnsembleView::electron_mean, 0};
  if (t.rfind("electron:", 0) == 0)
    return {EnsembleView::electron, parse_count(t.substr(9), "partition.view")};
  throw ConfigError("partition.view: expected pooled, electron_mean or electron:<i>, got '" + t + "'");
}

std::string mode_name(ZoneMode m) {
  switch (m) {
    case ZoneMode::cells:
      return "cells";
    case ZoneMode::strip_x:
      return "strip_x";
    case ZoneMode::strip_y:
      return "strip_y";
  }
  return "cells";
}

ZoneMode parse_mode(const std::string& text) {
  const std::string t = trim(text);
  if (t == "cells") return ZoneMode::cells;
  if (t == "strip_x") return ZoneMode::strip_x;
  if (t == "strip_y") return ZoneMode::strip_y;
  throw ConfigError("partition.mode: expected cells, strip_x or strip_y, got '" + t + "'");
}

const std::vector<std::string> kArtifacts{"potential",     "density",      "entropy_map",
                                          "coherence_map", "energy_trace", "sigma_scan",
                                          "summary"};

struct Entry {
  std::string section;
  std::string key;
  std::function<void(RunConfig&, const std::string&, const std::string&)> read;
  std::function<std::string(const RunConfig&)> write;
};

// Order matters: lattice.dim precedes the site lists.
const std::vector<Entry>& schema() {
  static const std::vector<Entry> entries{
      {"lattice", "dim",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.lattice.dim = static_cast<int>(parse_integer(v, k));
         if (c.lattice.dim != 1 && c.lattice.dim != 2) throw ConfigError(k + ": must be 1 or 2");
       },
       [](const RunConfig& c) { return std::to_string(c.lattice.dim); }},
      {"lattice", "sites",
       [](RunConfig& c, const std::string& v, const std::string&) {
         c.lattice.sites = parse_sites(v, c.lattice.dim);
       },
       [](const RunConfig& c) { return format_sites(c.lattice.sites, c.lattice.dim); }},
      {"lattice", "vacancies",
       [](RunConfig& c, const std::string& v, const std::string&) {
         c.lattice.vacancies = trim(v).empty() ? std::vector<Site>{} : parse_sites(v, c.lattice.dim);
       },
       [](const RunConfig& c) { return format_sites(c.lattice.vacancies, c.lattice.dim); }},
      {"lattice", "d",
       [](RunConfig& c, const std::string& v, const std::string& k) { c.lattice.d = parse_number(v, k); },
       [](const RunConfig& c) { return format_number(c.lattice.d); }},
      {"lattice", "V0",
       [](RunConfig& c, const std::string& v, const std::string& k) { c.lattice.V0 = parse_number(v, k); },
       [](const RunConfig& c) { return format_number(c.lattice.V0); }},
      {"lattice", "a",
       [](RunConfig& c, const std::string& v, const std::string& k) { c.lattice.a = parse_number(v, k); },
       [](const RunConfig& c) { return format_number(c.lattice.a); }},
      {"lattice", "lambda",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.lattice.lambda = parse_number(v, k);
       },
       [](const RunConfig& c) { return format_number(c.lattice.lambda); }},

      {"grid", "extent",
       [](RunConfig& c, const std::string& v, const std::string& k) { c.extent = parse_number(v, k); },
       [](const RunConfig& c) { return format_number(c.extent); }},
      {"grid", "points",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.points = static_cast<int>(parse_integer(v, k));
       },
       [](const RunConfig& c) { return std::to_string(c.points); }},

      {"ensemble", "N",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.ensemble.N = parse_count(v, k);
         c.n_from_sites = false;
       },
       [](const RunConfig& c) { return std::to_string(c.ensemble.N); }},
      {"ensemble", "M",
       [](RunConfig& c, const std::string& v, const std::string& k) { c.ensemble.M = parse_count(v, k); },
       [](const RunConfig& c) { return std::to_string(c.ensemble.M); }},
      {"ensemble", "seed",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.ensemble.seed = static_cast<std::uint64_t>(parse_count(v, k));
       },
       [](const RunConfig& c) { return std::to_string(c.ensemble.seed); }},
      {"ensemble", "init_width",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.ensemble.init_width = parse_number(v, k);
       },
       [](const RunConfig& c) { return format_number(c.ensemble.init_width); }},

      {"stepping", "dtau",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.relax.step.dtau = parse_number(v, k);
       },
       [](const RunConfig& c) { return format_number(c.relax.step.dtau); }},
      {"stepping", "max_steps",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.relax.max_steps = parse_count(v, k);
       },
       [](const RunConfig& c) { return std::to_string(c.relax.max_steps); }},
      {"stepping", "min_steps",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.relax.min_steps = parse_count(v, k);
       },
       [](const RunConfig& c) { return std::to_string(c.relax.min_steps); }},
      {"stepping", "energy_tol",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.relax.energy_tol = parse_number(v, k);
       },
       [](const RunConfig& c) { return format_number(c.relax.energy_tol); }},
      {"stepping", "window",
       [](RunConfig& c, const std::string& v, const std::string& k) { c.relax.window = parse_count(v, k); },
       [](const RunConfig& c) { return std::to_string(c.relax.window); }},
      {"stepping", "record_every",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.relax.record_every = parse_count(v, k);
       },
       [](const RunConfig& c) { return std::to_string(c.relax.record_every); }},
      {"stepping", "drift_epsilon",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.relax.step.drift_epsilon = parse_number(v, k);
       },
       [](const RunConfig& c) { return format_number(c.relax.step.drift_epsilon); }},
      {"stepping", "drift_cap",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.relax.step.drift_cap = parse_number(v, k);
       },
       [](const RunConfig& c) { return format_number(c.relax.step.drift_cap); }},
      {"stepping", "vee_strength",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.relax.vee_strength = parse_number(v, k);
       },
       [](const RunConfig& c) { return format_number(c.relax.vee_strength); }},
      {"stepping", "route",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         const std::string t = trim(v);
         if (t == "gridded")
           c.relax.route = KernelRoute::gridded;
         else if (t == "direct")
           c.relax.route = KernelRoute::direct;
         else
           throw ConfigError(k + ": expected gridded or direct, got '" + t + "'");
       },
       [](const RunConfig& c) {
         return std::string(c.relax.route == KernelRoute::gridded ? "gridded" : "direct");
       }},

      {"sigma", "value",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.ensemble.sigma = parse_number(v, k);
       },
       [](const RunConfig& c) { return format_number(c.ensemble.sigma); }},
      {"sigma", "candidates",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.sigma_candidates = parse_list(v, k);
       },
       [](const RunConfig& c) { return format_list(c.sigma_candidates); }},

      {"partition", "zones",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.zones = static_cast<int>(parse_integer(v, k));
       },
       [](const RunConfig& c) { return std::to_string(c.zones); }},
      {"partition", "mode",
       [](RunConfig& c, const std::string& v, const std::string&) { c.zone_mode = parse_mode(v); },
       [](const RunConfig& c) { return mode_name(c.zone_mode); }},
      {"partition", "view",
       [](RunConfig& c, const std::string& v, const std::string&) { c.view = parse_view(v); },
       [](const RunConfig& c) { return view_name(c.view); }},

      {"oracle", "samples",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.oracle.samples = parse_count(v, k);
       },
       [](const RunConfig& c) { return std::to_string(c.oracle.samples); }},
      {"oracle", "maps",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         const std::string t = trim(v);
         if (t == "sampled")
           c.oracle.expected_maps = false;
         else if (t == "expected")
           c.oracle.expected_maps = true;
         else
           throw ConfigError(k + ": expected sampled or expected, got '" + t + "'");
       },
       [](const RunConfig& c) { return std::string(c.oracle.expected_maps ? "expected" : "sampled"); }},
      {"oracle", "seed",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.oracle.seed = static_cast<std::uint64_t>(parse_count(v, k));
       },
       [](const RunConfig& c) { return std::to_string(c.oracle.seed); }},
      {"oracle", "dtau_schedule",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.oracle.params.dtau_schedule = parse_list(v, k);
       },
       [](const RunConfig& c) { return format_list(c.oracle.params.dtau_schedule); }},
      {"oracle", "energy_tol",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.oracle.params.energy_tol = parse_number(v, k);
       },
       [](const RunConfig& c) { return format_number(c.oracle.params.energy_tol); }},
      {"oracle", "max_steps_per_stage",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.oracle.params.max_steps_per_stage = parse_count(v, k);
       },
       [](const RunConfig& c) { return std::to_string(c.oracle.params.max_steps_per_stage); }},
      {"oracle", "budget",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.oracle.params.budget = parse_count(v, k);
       },
       [](const RunConfig& c) { return std::to_string(c.oracle.params.budget); }},
      {"oracle", "hartree_tol",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.oracle.hartree.density_tol = parse_number(v, k);
       },
       [](const RunConfig& c) { return format_number(c.oracle.hartree.density_tol); }},
      {"oracle", "hartree_max_steps",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.oracle.hartree.max_steps = parse_count(v, k);
       },
       [](const RunConfig& c) { return std::to_string(c.oracle.hartree.max_steps); }},

      {"output", "directory",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.output_directory = trim(v);
         if (c.output_directory.empty()) throw ConfigError(k + ": must not be empty");
       },
       [](const RunConfig& c) { return c.output_directory; }},
      {"output", "artifacts",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.artifacts.clear();
         if (trim(v).empty()) return;
         for (const std::string& a : split(v, ',')) {
           if (std::find(kArtifacts.begin(), kArtifacts.end(), a) == kArtifacts.end()) {
             const std::string hint = closest_key(a, kArtifacts);
             throw ConfigError(k + ": unknown artifact '" + a + "'" +
                               (hint.empty() ? "" : "; did you mean '" + hint + "'?"));
           }
           c.artifacts.push_back(a);
         }
       },
       [](const RunConfig& c) {
         std::string out;
         for (std::size_t n = 0; n < c.artifacts.size(); ++n) out += (n ? ", " : "") + c.artifacts[n];
         return out;
       }},
  };
  return entries;
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace

std::string closest_key(const std::string& key, const std::vector<std::string>& known) {
  std::string best;
  std::size_t best_d = std::numeric_limits<std::size_t>::max();
  for (const std::string& k : known) {
    const std::size_t d = edit_distance(key, k);
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return best_d <= std::max<std::size_t>(2, key.size() / 3) ? best : "";
}

double parse_number(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  if (t == "inf" || t == "+inf" || t == "infinity") return std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty() || !std::isfinite(v))
    throw ConfigError(key + ": expected a number, got '" + text + "'");
  return v;
}

std::string format_number(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "NaN";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::vector<Site> parse_sites(const std::string& text, int dim) {
  std::vector<Site> out;
  if (trim(text).empty()) throw ConfigError("lattice.sites: no sites given");
  for (const std::string& item : split(text, ',')) {
    if (item.empty()) throw ConfigError("lattice.sites: empty entry in '" + text + "'");
    const auto colon = item.find(':');
    if (dim == 1) {
      if (colon != std::string::npos)
        throw ConfigError("lattice.sites: '" + item + "' has two coordinates in a 1D lattice");
      for (int n : parse_range(item, "lattice.sites")) out.push_back({n, 0});
    } else {
      if (colon == std::string::npos)
        throw ConfigError("lattice.sites: 2D sites are written n:m, got '" + item + "'");
      const auto ns = parse_range(item.substr(0, colon), "lattice.sites");
      const auto ms = parse_range(item.substr(colon + 1), "lattice.sites");
      for (int n : ns)
        for (int m : ms) out.push_back({n, m});
    }
  }
  return out;
}

std::string format_sites(const std::vector<Site>& sites, int dim) {
  std::string out;
  for (std::size_t n = 0; n < sites.size(); ++n) {
    if (n) out += ", ";
    out += std::to_string(sites[n].n);
    if (dim == 2) out += ":" + std::to_string(sites[n].m);
  }
  return out;
}

bool RunConfig::wants(const std::string& artifact) const {
  return artifacts.empty() || std::find(artifacts.begin(), artifacts.end(), artifact) != artifacts.end();
}

void RunConfig::validate() const {
  if (lattice.sites.empty()) throw ConfigError("lattice.sites: no sites given");
  if (!(lattice.d > 0.0)) throw ConfigError("lattice.d: must be positive");
  if (!(lattice.a > 0.0)) throw ConfigError("lattice.a: must be positive");
  if (!(lattice.lambda > 0.0)) throw ConfigError("lattice.lambda: must be positive");
  for (const Site& v : lattice.vacancies)
    if (std::find(lattice.sites.begin(), lattice.sites.end(), v) == lattice.sites.end())
      throw ConfigError("lattice.vacancies: " + format_sites({v}, lattice.dim) + " is not a site");
  if (lattice.effective_sites().empty()) throw ConfigError("lattice.vacancies: every site is vacant");
  if (!(extent > 0.0)) throw ConfigError("grid.extent: must be positive");
  if (points < 8) throw ConfigError("grid.points: must be at least 8");
  if (ensemble.N < 1) throw ConfigError("ensemble.N: must be at least 1");
  if (ensemble.N > lattice.effective_sites().size())
    throw ConfigError("ensemble.N: exceeds the number of non-vacant sites");
  if (ensemble.M < 1) throw ConfigError("ensemble.M: must be at least 1");
  if (!(ensemble.init_width > 0.0)) throw ConfigError("ensemble.init_width: must be positive");
  if (!(relax.step.dtau > 0.0)) throw ConfigError("stepping.dtau: must be positive");
  if (!(relax.step.drift_epsilon > 0.0)) throw ConfigError("stepping.drift_epsilon: must be positive");
  if (relax.step.drift_cap < 0.0)
    throw ConfigError("stepping.drift_cap: must be positive (0 selects one grid spacing)");
  if (relax.max_steps < 1) throw ConfigError("stepping.max_steps: must be at least 1");
  if (!(relax.energy_tol > 0.0)) throw ConfigError("stepping.energy_tol: must be positive");
  if (relax.window < 1) throw ConfigError("stepping.window: must be at least 1");
  if (relax.record_every < 1) throw ConfigError("stepping.record_every: must be at least 1");
  if (!(relax.vee_strength >= 0.0)) throw ConfigError("stepping.vee_strength: must be non-negative");
  if (!(ensemble.sigma > 0.0)) throw ConfigError("sigma.value: must be positive or inf");
  for (double s : sigma_candidates)
    if (!(s > 0.0)) throw ConfigError("sigma.candidates: every candidate must be positive or inf");
  if (zones < 1) throw ConfigError("partition.zones: must be at least 1");
  if (zone_mode == ZoneMode::strip_y && lattice.dim == 1)
    throw ConfigError("partition.mode: strip_y needs a 2D lattice");
  if (view.view == EnsembleView::electron && view.electron >= ensemble.N)
    throw ConfigError("partition.view: electron index out of range");
  if (oracle.samples < 1) throw ConfigError("oracle.samples: must be at least 1");
  if (oracle.params.dtau_schedule.empty()) throw ConfigError("oracle.dtau_schedule: must not be empty");
  for (double d : oracle.params.dtau_schedule)
    if (!(d > 0.0)) throw ConfigError("oracle.dtau_schedule: every step must be positive");
  if (!(oracle.params.energy_tol > 0.0)) throw ConfigError("oracle.energy_tol: must be positive");
  if (!(oracle.hartree.density_tol > 0.0)) throw ConfigError("oracle.hartree_tol: must be positive");
}

RunConfig parse_config(const std::string& text, const std::string& source) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(source + ":" + std::to_string(e.line()) + ": " + e.message());
  }

  std::vector<std::string> sections;
  for (const Entry& e : schema())
    if (std::find(sections.begin(), sections.end(), e.section) == sections.end())
      sections.push_back(e.section);

  std::map<std::string, std::string> raw;  // "section.key" -> value
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ConfigError(source + ": key '" + section + "' must sit inside a [section]");
    if (std::find(sections.begin(), sections.end(), section) == sections.end()) {
      const std::string hint = closest_key(section, sections);
      throw ConfigError(source + ": unknown section [" + section + "]" +
                        (hint.empty() ? "" : "; did you mean [" + hint + "]?"));
    }
    std::vector<std::string> keys;
    for (const Entry& e : schema())
      if (e.section == section) keys.push_back(e.key);
    for (const auto& [key, value] : body) {
      if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
        const std::string hint = closest_key(key, keys);
        throw ConfigError(source + ": unknown key '" + key + "' in [" + section + "]" +
                          (hint.empty() ? "" : "; did you mean '" + hint + "'?"));
      }
      raw[section + "." + key] = value.data();
    }
  }

  RunConfig c;
  for (const Entry& e : schema()) {
    const std::string name = e.section + "." + e.key;
    if (auto it = raw.find(name); it != raw.end()) e.read(c, it->second, name);
  }
  if (!raw.count("lattice.sites")) throw ConfigError(source + ": lattice.sites is required");
  if (c.n_from_sites) c.ensemble.N = c.lattice.effective_sites().size();
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << f.rdbuf();
  return parse_config(buf.str(), path);
}

std::string to_ini(const RunConfig& c) {
  std::string out;
  std::string section;
  for (const Entry& e : schema()) {
    if (e.section != section) {
      out += (section.empty() ? "[" : "\n[") + e.section + "]\n";
      section = e.section;
    }
    out += e.key + " = " + e.write(c) + "\n";
  }
  return out;
}

}  // namespace tdqmc
