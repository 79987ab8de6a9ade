#include "lfsim/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>

#include <fmt/format.h>

namespace lfsim {

namespace {

constexpr std::pair<Scheme, std::string_view> kSchemeNames[] = {
    {Scheme::kZfbfSus, "zfbf_sus"},
    {Scheme::kFullInr, "full_inr"},
    {Scheme::kFullInrGreedy, "full_inr_greedy"},
    {Scheme::kPartialInr, "partial_inr"},
    {Scheme::kPartialInrImproved, "partial_inr_improved"},
    {Scheme::kOneBitInr, "one_bit_inr"},
    {Scheme::kDftSinr, "dft_sinr"},
    {Scheme::kRbf, "rbf"},
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) {
      break;
    }
    start = pos + 1;
  }
  return out;
}

double parse_double(std::string_view key, std::string_view text) {
  // strtod accepts forms from_chars rejects in older libstdc++ ("+1", "inf").
  const std::string buf(text);
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (buf.empty() || end != buf.c_str() + buf.size()) {
    throw ConfigError(fmt::format("{}: '{}' is not a number", key, text));
  }
  return v;
}

long long parse_int(std::string_view key, std::string_view text) {
  long long v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ConfigError(fmt::format("{}: '{}' is not an integer", key, text));
  }
  return v;
}

std::uint64_t parse_u64(std::string_view key, std::string_view text) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ConfigError(fmt::format("{}: '{}' is not an unsigned integer", key, text));
  }
  return v;
}

Range parse_range(std::string_view key, std::string_view text) {
  const auto parts = split(text, ',');
  if (parts.size() != 2) {
    throw ConfigError(fmt::format("{}: expected 'lo, hi', got '{}'", key, text));
  }
  return {parse_double(key, parts[0]), parse_double(key, parts[1])};
}

std::vector<double> parse_doubles(std::string_view key, std::string_view text) {
  std::vector<double> out;
  for (auto part : split(text, ',')) {
    out.push_back(parse_double(key, part));
  }
  return out;
}

std::string fmt_double(double v) { return fmt::format("{:.17g}", v); }

std::string fmt_range(const Range& r) {
  return fmt::format("{}, {}", fmt_double(r.lo), fmt_double(r.hi));
}

}  // namespace

std::string_view to_string(Fading fading) {
  return fading == Fading::kIid ? "iid" : "one_ring";
}

std::string_view to_string(Scheme scheme) {
  for (const auto& [s, name] : kSchemeNames) {
    if (s == scheme) {
      return name;
    }
  }
  return "?";
}

std::string_view to_string(OverheadMode mode) {
  return mode == OverheadMode::kFixed ? "fixed" : "grouping";
}

std::string_view to_string(SpreadMode mode) {
  return mode == SpreadMode::kPerDrop ? "per_drop" : "fixed";
}

Scheme parse_scheme(std::string_view name) {
  for (const auto& [s, n] : kSchemeNames) {
    if (n == name) {
      return s;
    }
  }
  throw ConfigError(fmt::format("unknown scheme '{}'", name));
}

bool uses_inr_feedback(Scheme scheme) {
  switch (scheme) {
    case Scheme::kFullInr:
    case Scheme::kFullInrGreedy:
    case Scheme::kPartialInr:
    case Scheme::kPartialInrImproved:
    case Scheme::kOneBitInr:
      return true;
    default:
      return false;
  }
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  return to_text(a) == to_text(b);
}

void validate(const ExperimentConfig& c) {
  if (c.antennas < 1) {
    throw ConfigError("M must be >= 1");
  }
  if (c.subsets < 1) {
    throw ConfigError("T must be >= 1");
  }
  if (c.drops < 1) {
    throw ConfigError("drops must be >= 1");
  }
  if (c.users.empty() || c.snr_db.empty() || c.fading.empty() || c.spread_deg.empty() ||
      c.err_var.empty()) {
    throw ConfigError("grid axes must be non-empty");
  }
  if (c.schemes.empty()) {
    throw ConfigError("at least one scheme is required");
  }
  for (int k : c.users) {
    if (k < 1) {
      throw ConfigError("K must be >= 1");
    }
  }
  for (double e : c.err_var) {
    if (!(e >= 0.0 && e < 1.0)) {
      throw ConfigError(fmt::format("err_var {} outside [0, 1)", e));
    }
  }
  if (c.azimuth_deg.empty() || c.azimuth_deg.lo < -90.0 || c.azimuth_deg.hi > 90.0) {
    throw ConfigError("azimuth_deg must be a non-empty range inside [-90, 90]");
  }
  for (const auto& r : c.spread_deg) {
    if (r.empty() || r.lo <= 0.0) {
      throw ConfigError("spread_deg ranges must be non-empty and positive");
    }
  }
  if (c.snr_spread_db && c.snr_spread_db->empty()) {
    throw ConfigError("snr_spread_db range is empty");
  }
  if (!(c.antenna_spacing > 0.0)) {
    throw ConfigError("spacing must be positive");
  }
  if (c.cqi_bits && (*c.cqi_bits < 1 || *c.cqi_bits > 30)) {
    throw ConfigError("cqi_bits must be 'off' or in [1, 30]");
  }
  if (c.cqi_bits && !(c.cqi_range_db.hi > c.cqi_range_db.lo)) {
    throw ConfigError("cqi_range_db is empty");
  }
  if (!(c.gamma_threshold > 0.0)) {
    throw ConfigError("gamma must be positive");
  }
  if (!(c.sus_epsilon > 0.0)) {
    throw ConfigError("sus_epsilon must be positive");
  }
  if (c.threads < 0) {
    throw ConfigError("threads must be >= 0");
  }
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig c;
  std::map<std::string, bool> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    view = trim(view);
    if (view.empty()) {
      continue;
    }
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(fmt::format("line {}: expected 'key = value'", line_no));
    }
    const std::string key(trim(view.substr(0, eq)));
    const std::string_view value = trim(view.substr(eq + 1));
    if (seen[key]) {
      throw ConfigError(fmt::format("line {}: duplicate key '{}'", line_no, key));
    }
    seen[key] = true;

    if (key == "name") {
      c.name = std::string(value);
    } else if (key == "M") {
      c.antennas = static_cast<int>(parse_int(key, value));
    } else if (key == "K") {
      c.users.clear();
      for (auto part : split(value, ',')) {
        c.users.push_back(static_cast<int>(parse_int(key, part)));
      }
    } else if (key == "T") {
      c.subsets = static_cast<int>(parse_int(key, value));
    } else if (key == "snr_db") {
      c.snr_db = parse_doubles(key, value);
    } else if (key == "drops") {
      c.drops = static_cast<int>(parse_int(key, value));
    } else if (key == "fading") {
      c.fading.clear();
      for (auto part : split(value, ',')) {
        if (part == "iid") {
          c.fading.push_back(Fading::kIid);
        } else if (part == "one_ring") {
          c.fading.push_back(Fading::kOneRing);
        } else {
          throw ConfigError(fmt::format("fading: unknown model '{}'", part));
        }
      }
    } else if (key == "azimuth_deg") {
      c.azimuth_deg = parse_range(key, value);
    } else if (key == "spread_deg") {
      c.spread_deg.clear();
      for (auto part : split(value, ';')) {
        c.spread_deg.push_back(parse_range(key, part));
      }
    } else if (key == "spacing") {
      c.antenna_spacing = parse_double(key, value);
    } else if (key == "spread_mode") {
      if (value == "per_drop") {
        c.spread_mode = SpreadMode::kPerDrop;
      } else if (value == "fixed") {
        c.spread_mode = SpreadMode::kFixed;
      } else {
        throw ConfigError(fmt::format("spread_mode: unknown mode '{}'", value));
      }
    } else if (key == "snr_spread_db") {
      if (value == "none") {
        c.snr_spread_db.reset();
      } else {
        c.snr_spread_db = parse_range(key, value);
      }
    } else if (key == "err_var") {
      c.err_var = parse_doubles(key, value);
    } else if (key == "schemes") {
      c.schemes.clear();
      for (auto part : split(value, ',')) {
        c.schemes.push_back(parse_scheme(part));
      }
    } else if (key == "cqi_bits") {
      if (value == "off") {
        c.cqi_bits.reset();
      } else {
        c.cqi_bits = static_cast<int>(parse_int(key, value));
      }
    } else if (key == "cqi_range_db") {
      c.cqi_range_db = parse_range(key, value);
    } else if (key == "gamma") {
      c.gamma_threshold = parse_double(key, value);
    } else if (key == "sus_epsilon") {
      c.sus_epsilon = parse_double(key, value);
    } else if (key == "overhead") {
      if (value == "fixed") {
        c.overhead = OverheadMode::kFixed;
      } else if (value == "grouping") {
        c.overhead = OverheadMode::kGrouping;
      } else {
        throw ConfigError(fmt::format("overhead: unknown mode '{}'", value));
      }
    } else if (key == "pilot_threshold_db") {
      c.pilot_threshold_db = parse_double(key, value);
    } else if (key == "seed") {
      c.base_seed = parse_u64(key, value);
    } else if (key == "output") {
      c.output = std::string(value);
    } else if (key == "threads") {
      c.threads = static_cast<int>(parse_int(key, value));
    } else {
      throw ConfigError(fmt::format("line {}: unknown key '{}'", line_no, key));
    }
  }
  validate(c);
  return c;
}

ExperimentConfig parse_config_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_config(in);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(fmt::format("cannot open config file '{}'", path));
  }
  return parse_config(in);
}

namespace {

std::string to_text_impl(const ExperimentConfig& c, bool with_runtime) {
  std::vector<std::string> fading;
  for (auto f : c.fading) {
    fading.emplace_back(to_string(f));
  }
  std::vector<std::string> spreads;
  for (const auto& r : c.spread_deg) {
    spreads.push_back(fmt_range(r));
  }
  std::vector<std::string> schemes;
  for (auto s : c.schemes) {
    schemes.emplace_back(to_string(s));
  }
  std::vector<std::string> snr;
  for (double v : c.snr_db) {
    snr.push_back(fmt_double(v));
  }
  std::vector<std::string> err;
  for (double v : c.err_var) {
    err.push_back(fmt_double(v));
  }

  std::string out;
  auto line = [&](std::string_view key, const std::string& value) {
    out += fmt::format("{} = {}\n", key, value);
  };
  line("name", c.name);
  line("M", std::to_string(c.antennas));
  line("K", fmt::format("{}", fmt::join(c.users, ", ")));
  line("T", std::to_string(c.subsets));
  line("snr_db", fmt::format("{}", fmt::join(snr, ", ")));
  line("drops", std::to_string(c.drops));
  line("fading", fmt::format("{}", fmt::join(fading, ", ")));
  line("azimuth_deg", fmt_range(c.azimuth_deg));
  line("spread_deg", fmt::format("{}", fmt::join(spreads, "; ")));
  line("spacing", fmt_double(c.antenna_spacing));
  line("spread_mode", std::string(to_string(c.spread_mode)));
  line("snr_spread_db", c.snr_spread_db ? fmt_range(*c.snr_spread_db) : "none");
  line("err_var", fmt::format("{}", fmt::join(err, ", ")));
  line("schemes", fmt::format("{}", fmt::join(schemes, ", ")));
  line("cqi_bits", c.cqi_bits ? std::to_string(*c.cqi_bits) : "off");
  line("cqi_range_db", fmt_range(c.cqi_range_db));
  line("gamma", fmt_double(c.gamma_threshold));
  line("sus_epsilon", fmt_double(c.sus_epsilon));
  line("overhead", std::string(to_string(c.overhead)));
  line("pilot_threshold_db", fmt_double(c.pilot_threshold_db));
  line("seed", std::to_string(c.base_seed));
  if (with_runtime) {
    if (!c.output.empty()) {
      line("output", c.output);
    }
    line("threads", std::to_string(c.threads));
  }
  return out;
}

}  // namespace

std::string to_text(const ExperimentConfig& config) { return to_text_impl(config, true); }

std::uint64_t config_hash(const ExperimentConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : to_text_impl(config, false)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace lfsim
