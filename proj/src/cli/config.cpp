#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "superatom/cli.hpp"

namespace superatom::cli {

namespace {

// Walks text that nlohmann already accepted and records the line of every
// value, keyed by its path. Duplicate keys are rejected here since the
// parser silently keeps the last one.
class PositionIndex {
 public:
  PositionIndex(const std::string& text, const std::string& source, std::map<std::string, int>& lines)
      : t_(text), source_(source), lines_(lines) {}

  void run() { value(""); }

 private:
  void ws() {
    while (i_ < t_.size() && (t_[i_] == ' ' || t_[i_] == '\t' || t_[i_] == '\r' || t_[i_] == '\n')) {
      if (t_[i_] == '\n') ++line_;
      ++i_;
    }
  }

  std::string string() {
    std::string out;
    ++i_;  // opening quote
    while (i_ < t_.size() && t_[i_] != '"') {
      if (t_[i_] == '\\') {
        out += t_[i_++];
      }
      out += t_[i_++];
    }
    ++i_;
    return out;
  }

  void value(const std::string& path) {
    ws();
    if (lines_.count(path) && !path.empty())
      throw ConfigError(source_ + ":" + std::to_string(line_) + ": field '" + path + "': duplicate key");
    lines_[path] = line_;
    if (i_ >= t_.size()) return;
    const char c = t_[i_];
    if (c == '{') {
      ++i_;
      ws();
      if (t_[i_] == '}') {
        ++i_;
        return;
      }
      while (true) {
        ws();
        const std::string key = string();
        ws();
        ++i_;  // ':'
        value(path.empty() ? key : path + "." + key);
        ws();
        if (t_[i_++] == '}') return;
      }
    } else if (c == '[') {
      ++i_;
      ws();
      if (t_[i_] == ']') {
        ++i_;
        return;
      }
      for (long k = 0;; ++k) {
        value(path + "[" + std::to_string(k) + "]");
        ws();
        if (t_[i_++] == ']') return;
      }
    } else if (c == '"') {
      string();
    } else {
      while (i_ < t_.size() && std::string_view(",]} \t\r\n").find(t_[i_]) == std::string_view::npos) ++i_;
    }
  }

  const std::string& t_;
  const std::string& source_;
  std::map<std::string, int>& lines_;
  std::size_t i_ = 0;
  int line_ = 1;
};

std::string type_name(const Json& j) { return j.type_name(); }

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::optional<Command> parse_command(std::string_view name) {
  if (name == "superatom") return Command::superatom;
  if (name == "sweep") return Command::sweep;
  if (name == "subtract") return Command::subtract;
  if (name == "cascade") return Command::cascade;
  if (name == "params") return Command::params;
  return std::nullopt;
}

std::string to_string(Command c) {
  switch (c) {
    case Command::superatom: return "superatom";
    case Command::sweep: return "sweep";
    case Command::subtract: return "subtract";
    case Command::cascade: return "cascade";
    case Command::params: return "params";
  }
  return "?";
}

ConfigDocument ConfigDocument::parse(const std::string& text, std::string source) {
  ConfigDocument doc;
  doc.source_ = std::move(source);
  doc.hash_ = fnv1a64(text);
  try {
    doc.root_ = Json::parse(text);
  } catch (const Json::parse_error& e) {
    const std::size_t at = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    const long line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(at), '\n');
    throw ConfigError(doc.source_ + ":" + std::to_string(line) + ": malformed config: " + e.what());
  }
  if (!doc.root_.is_object()) throw ConfigError(doc.source_ + ":1: config must be an object");
  PositionIndex(text, doc.source_, doc.lines_).run();
  return doc;
}

ConfigDocument ConfigDocument::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

int ConfigDocument::line_of(const std::string& path) const {
  auto it = lines_.find(path);
  return it == lines_.end() ? 0 : it->second;
}

void ConfigDocument::fail(const std::string& path, const std::string& message) const {
  std::string where = source_;
  // Missing keys have no line of their own; point at the enclosing object.
  std::string probe = path;
  int line = line_of(probe);
  while (line == 0 && !probe.empty()) {
    const auto cut = probe.find_last_of(".[");
    probe = cut == std::string::npos ? "" : probe.substr(0, cut);
    line = line_of(probe);
  }
  if (line > 0) where += ":" + std::to_string(line);
  throw ConfigError(where + ": field '" + path + "': " + message);
}

Fields::Fields(const ConfigDocument& doc, const Json& object, std::string path)
    : doc_(&doc), object_(&object), path_(std::move(path)) {
  if (!object.is_object()) doc.fail(path_, "expected an object, got " + type_name(object));
}

bool Fields::has(const std::string& key) const { return object_->contains(key); }

const Json& Fields::take(const std::string& key) {
  if (!has(key)) fail(key, "required field is missing");
  used_.push_back(key);
  return object_->at(key);
}

void Fields::fail(const std::string& key, const std::string& message) const { doc_->fail(sub(key), message); }

double Fields::number(const std::string& key) {
  const Json& j = take(key);
  if (!j.is_number()) fail(key, "expected a number, got " + type_name(j));
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(key, "must be finite");
  return v;
}

double Fields::number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

long Fields::integer(const std::string& key) {
  const Json& j = take(key);
  if (!j.is_number_integer()) fail(key, "expected an integer, got " + type_name(j));
  if (j.is_number_unsigned() && j.get<std::uint64_t>() > static_cast<std::uint64_t>(std::numeric_limits<long>::max()))
    fail(key, "integer out of range");
  return j.get<long>();
}

long Fields::integer(const std::string& key, long fallback) { return has(key) ? integer(key) : fallback; }

std::uint64_t Fields::unsigned_integer(const std::string& key, std::uint64_t fallback) {
  if (!has(key)) return fallback;
  const Json& j = take(key);
  if (!j.is_number_unsigned()) fail(key, "expected a non-negative integer, got " + type_name(j));
  return j.get<std::uint64_t>();
}

bool Fields::boolean(const std::string& key, bool fallback) {
  if (!has(key)) return fallback;
  const Json& j = take(key);
  if (!j.is_boolean()) fail(key, "expected true or false, got " + type_name(j));
  return j.get<bool>();
}

std::string Fields::text(const std::string& key) {
  const Json& j = take(key);
  if (!j.is_string()) fail(key, "expected a string, got " + type_name(j));
  return j.get<std::string>();
}

std::string Fields::text(const std::string& key, const std::string& fallback) {
  return has(key) ? text(key) : fallback;
}

std::vector<double> Fields::numbers(const std::string& key) {
  const Json& j = take(key);
  if (!j.is_array()) fail(key, "expected a list of numbers, got " + type_name(j));
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string at = key + "[" + std::to_string(i) + "]";
    if (!j[i].is_number()) fail(at, "expected a number, got " + type_name(j[i]));
    out.push_back(j[i].get<double>());
    if (!std::isfinite(out.back())) fail(at, "must be finite");
  }
  return out;
}

std::vector<long> Fields::integers(const std::string& key) {
  const Json& j = take(key);
  if (j.is_number_integer()) return {j.get<long>()};
  if (!j.is_array()) fail(key, "expected an integer or a list of integers, got " + type_name(j));
  std::vector<long> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number_integer())
      fail(key + "[" + std::to_string(i) + "]", "expected an integer, got " + type_name(j[i]));
    out.push_back(j[i].get<long>());
  }
  return out;
}

Complex Fields::complex(const std::string& key, Complex fallback) {
  if (!has(key)) return fallback;
  const Json& j = take(key);
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  fail(key, "expected a number or [re, im], got " + j.dump());
}

std::optional<Fields> Fields::child(const std::string& key) {
  if (!has(key)) return std::nullopt;
  const Json& j = take(key);
  return Fields(*doc_, j, sub(key));
}

void Fields::finish() const {
  for (auto it = object_->begin(); it != object_->end(); ++it)
    if (std::find(used_.begin(), used_.end(), it.key()) == used_.end()) fail(it.key(), "unknown key");
}

}  // namespace superatom::cli
