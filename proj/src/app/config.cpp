#include "wavinv/app/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "wavinv/format.hpp"

namespace wavinv::app {
namespace {

std::string trim(std::string s) {
  auto not_space = [](unsigned char ch) { return !std::isspace(ch); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::string unquote(std::string s) {
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                        (s.front() == '\'' && s.back() == '\''))) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, sep)) parts.push_back(trim(item));
  return parts;
}

struct Context {
  std::string source;
  std::size_t line = 0;
  [[noreturn]] void fail(const std::string& message) const {
    throw ConfigError(source + ":" + std::to_string(line) + ": " + message);
  }
};

// Accepts plain numbers and the forms "pi", "<x>*pi", "pi/<x>".
double number(const std::string& text, const Context& ctx) {
  double value = 0.0;
  if (parse_double(text, value)) return value;
  const std::string t = trim(text);
  if (t == "pi") return std::numbers::pi;
  if (t.size() > 3 && t.ends_with("*pi") && parse_double(t.substr(0, t.size() - 3), value)) {
    return value * std::numbers::pi;
  }
  if (t.size() > 3 && t.starts_with("pi/") && parse_double(t.substr(3), value) && value != 0.0) {
    return std::numbers::pi / value;
  }
  ctx.fail("expected a number, got '" + text + "'");
}

std::size_t count(const std::string& text, const Context& ctx) {
  const double value = number(text, ctx);
  if (!(value >= 0.0) || value != std::floor(value) || value > 1e9) {
    ctx.fail("expected a non-negative integer, got '" + text + "'");
  }
  return static_cast<std::size_t>(value);
}

std::vector<PhantomTerm> phantom(const std::string& text, const Context& ctx) {
  std::vector<PhantomTerm> terms;
  if (trim(text).empty()) return terms;
  for (const auto& item : split(text, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) ctx.fail("phantom term must be <mode>:<amplitude>, got '" + item + "'");
    PhantomTerm term{count(trim(item.substr(0, colon)), ctx), number(trim(item.substr(colon + 1)), ctx)};
    if (term.mode == 0) ctx.fail("phantom mode indices are 1-based");
    terms.push_back(term);
  }
  return terms;
}

std::string format_phantom(const std::vector<PhantomTerm>& terms) {
  std::string out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i > 0) out += ", ";
    out += std::to_string(terms[i].mode) + ":" + format_double(terms[i].amplitude);
  }
  return out;
}

}  // namespace

bool RunConfig::operator==(const RunConfig& o) const {
  return domain == o.domain && speed == o.speed && alpha == o.alpha && num_modes == o.num_modes &&
         precision == o.precision && robin_phantom == o.robin_phantom &&
         dirichlet_phantom == o.dirichlet_phantom && samples_per_period == o.samples_per_period &&
         horizon == o.horizon && damping.eps == o.damping.eps &&
         damping.tail_cut == o.damping.tail_cut && damping.degree == o.damping.degree &&
         k_max == o.k_max && output_dir == o.output_dir && max_error == o.max_error;
}

void validate(const RunConfig& c) {
  auto fail = [](const std::string& m) { throw ConfigError("config: " + m); };
  if (!(c.domain.lx > 0.0) || (c.domain.kind == DomainKind::Rectangle && !(c.domain.ly > 0.0))) {
    fail("domain extents must be positive");
  }
  if (c.domain.nx < 8 || (c.domain.kind == DomainKind::Rectangle && c.domain.ny < 8)) {
    fail("domain needs at least 8 cells per axis");
  }
  if (!(c.alpha > 0.0) || !std::isfinite(c.alpha)) {
    fail("alpha must be > 0, got " + format_double(c.alpha));
  }
  if (c.num_modes < 1) fail("num_modes must be >= 1");
  if (!(c.samples_per_period >= 20.0)) fail("samples_per_period must be >= 20");
  if (c.horizon && !(*c.horizon > 0.0)) fail("horizon must be > 0");
  if (c.k_max && *c.k_max < 1) fail("k_max must be >= 1");
  if (!(c.max_error >= 0.0)) fail("max_error must be >= 0");
  try {
    c.damping.validate();
    parse_speed_spec(c.speed);
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

RunConfig parse_config(const std::string& text, const std::string& source) {
  RunConfig config;
  bool have_length = false;
  std::string section;
  Context ctx{source, 0};
  std::istringstream in(text);
  std::string raw;
  while (std::getline(in, raw)) {
    ++ctx.line;
    std::string line = trim(raw);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') ctx.fail("unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      static const std::vector<std::string> known{"domain", "speed", "bc", "phantom",
                                                  "time", "damping", "output"};
      if (std::find(known.begin(), known.end(), section) == known.end()) {
        ctx.fail("unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) ctx.fail("expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = unquote(trim(line.substr(eq + 1)));
    const std::string where = "[" + section + "] " + key;

    if (section == "domain") {
      if (key == "kind") {
        if (value == "interval") config.domain.kind = DomainKind::Interval;
        else if (value == "rectangle") config.domain.kind = DomainKind::Rectangle;
        else ctx.fail("domain kind must be interval or rectangle");
      } else if (key == "length" || key == "lx") {
        config.domain.lx = number(value, ctx);
        have_length = true;
      } else if (key == "ly") {
        config.domain.ly = number(value, ctx);
      } else if (key == "cells" || key == "nx") {
        config.domain.nx = count(value, ctx);
      } else if (key == "ny") {
        config.domain.ny = count(value, ctx);
      } else if (key == "corner_normal") {
        if (value == "x") config.domain.corner = CornerNormal::XFacing;
        else if (value == "y") config.domain.corner = CornerNormal::YFacing;
        else ctx.fail("corner_normal must be x or y");
      } else {
        ctx.fail("unknown key " + where);
      }
    } else if (section == "speed") {
      if (key != "speed") ctx.fail("unknown key " + where);
      config.speed = value;
    } else if (section == "bc") {
      if (key == "alpha") config.alpha = number(value, ctx);
      else if (key == "num_modes") config.num_modes = count(value, ctx);
      else if (key == "precision") {
        if (value == "extended") config.precision = EigenPrecision::Extended;
        else if (value == "double") config.precision = EigenPrecision::Double;
        else ctx.fail("precision must be extended or double");
      } else ctx.fail("unknown key " + where);
    } else if (section == "phantom") {
      if (key == "robin") config.robin_phantom = phantom(value, ctx);
      else if (key == "dirichlet") config.dirichlet_phantom = phantom(value, ctx);
      else ctx.fail("unknown key " + where);
    } else if (section == "time") {
      if (key == "samples_per_period") config.samples_per_period = number(value, ctx);
      else if (key == "horizon") {
        if (value == "auto") config.horizon.reset();
        else config.horizon = number(value, ctx);
      } else ctx.fail("unknown key " + where);
    } else if (section == "damping") {
      if (key == "eps") {
        config.damping.eps.clear();
        for (const auto& item : split(value, ',')) config.damping.eps.push_back(number(item, ctx));
      } else if (key == "tail_cut") {
        config.damping.tail_cut = number(value, ctx);
      } else if (key == "degree") {
        config.damping.degree = count(value, ctx);
      } else if (key == "k_max") {
        config.k_max = count(value, ctx);
      } else {
        ctx.fail("unknown key " + where);
      }
    } else if (section == "output") {
      if (key == "dir") config.output_dir = value;
      else if (key == "max_error") config.max_error = number(value, ctx);
      else ctx.fail("unknown key " + where);
    } else {
      ctx.fail("key '" + key + "' outside of any section");
    }
  }
  if (!have_length) throw ConfigError(source + ": [domain] needs length (or lx)");
  validate(config);
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.string());
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream out;
  const bool rect = c.domain.kind == DomainKind::Rectangle;
  out << "[domain]\n";
  out << "kind = " << (rect ? "rectangle" : "interval") << '\n';
  if (rect) {
    out << "lx = " << format_double(c.domain.lx) << '\n';
    out << "ly = " << format_double(c.domain.ly) << '\n';
    out << "nx = " << c.domain.nx << '\n';
    out << "ny = " << c.domain.ny << '\n';
    out << "corner_normal = " << (c.domain.corner == CornerNormal::XFacing ? "x" : "y") << '\n';
  } else {
    out << "length = " << format_double(c.domain.lx) << '\n';
    out << "cells = " << c.domain.nx << '\n';
  }
  out << "\n[speed]\nspeed = \"" << c.speed << "\"\n";
  out << "\n[bc]\nalpha = " << format_double(c.alpha) << '\n';
  out << "num_modes = " << c.num_modes << '\n';
  out << "precision = " << (c.precision == EigenPrecision::Extended ? "extended" : "double") << '\n';
  out << "\n[phantom]\n";
  if (!c.robin_phantom.empty()) out << "robin = " << format_phantom(c.robin_phantom) << '\n';
  if (!c.dirichlet_phantom.empty()) out << "dirichlet = " << format_phantom(c.dirichlet_phantom) << '\n';
  out << "\n[time]\nsamples_per_period = " << format_double(c.samples_per_period) << '\n';
  out << "horizon = " << (c.horizon ? format_double(*c.horizon) : std::string("auto")) << '\n';
  out << "\n[damping]\neps = ";
  for (std::size_t i = 0; i < c.damping.eps.size(); ++i) {
    out << (i ? ", " : "") << format_double(c.damping.eps[i]);
  }
  out << "\ntail_cut = " << format_double(c.damping.tail_cut) << '\n';
  out << "degree = " << c.damping.degree << '\n';
  if (c.k_max) out << "k_max = " << *c.k_max << '\n';
  out << "\n[output]\ndir = " << c.output_dir << '\n';
  out << "max_error = " << format_double(c.max_error) << '\n';
  return out.str();
}

}  // namespace wavinv::app
