#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "superatom/density_matrix.hpp"
#include "superatom/wigner.hpp"

namespace superatom::cli {

using Json = nlohmann::json;

enum class Command { superatom, sweep, subtract, cascade, params };
std::optional<Command> parse_command(std::string_view name);
std::string to_string(Command c);

// Config problems; message carries "source:line: field 'path': ...".
class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// JSON config with the source line of every value, for diagnostics.
class ConfigDocument {
 public:
  static ConfigDocument parse(const std::string& text, std::string source = "<config>");
  static ConfigDocument load(const std::filesystem::path& path);

  const Json& root() const { return root_; }
  const std::string& source() const { return source_; }
  // FNV-1a 64 over the exact bytes of the document.
  std::uint64_t hash() const { return hash_; }
  // 1-based line of the value at `path` ("a.b[2]"), 0 if unknown.
  int line_of(const std::string& path) const;

  [[noreturn]] void fail(const std::string& path, const std::string& message) const;

 private:
  Json root_;
  std::string source_;
  std::uint64_t hash_ = 0;
  std::map<std::string, int> lines_;
};

// Typed view of one JSON object. Every key must be read before finish(),
// which rejects anything left over.
class Fields {
 public:
  Fields(const ConfigDocument& doc, const Json& object, std::string path);

  bool has(const std::string& key) const;
  double number(const std::string& key);
  double number(const std::string& key, double fallback);
  long integer(const std::string& key);
  long integer(const std::string& key, long fallback);
  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback);
  bool boolean(const std::string& key, bool fallback);
  std::string text(const std::string& key);
  std::string text(const std::string& key, const std::string& fallback);
  std::vector<double> numbers(const std::string& key);
  // Scalar or list of integers.
  std::vector<long> integers(const std::string& key);
  Complex complex(const std::string& key, Complex fallback);
  std::optional<Fields> child(const std::string& key);

  [[noreturn]] void fail(const std::string& key, const std::string& message) const;
  void finish() const;
  const std::string& path() const { return path_; }

 private:
  const Json& take(const std::string& key);
  std::string sub(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const ConfigDocument* doc_;
  const Json* object_;
  std::string path_;
  std::vector<std::string> used_;
};

std::uint64_t fnv1a64(std::string_view bytes);

// ---- writers ----

struct Header {
  std::string command;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::string version;
  std::vector<std::pair<std::string, std::string>> extra;
};

// 17 significant digits, round-trips exactly.
std::string format_double(double v);
std::string header_block(const Header& h);

struct Column {
  std::string name;
  std::vector<double> values;
};
std::string series_csv(const Header& h, const std::vector<Column>& columns);

// Dimension line, then the real block, then the imaginary block.
std::string density_matrix_text(const Header& h, const Matrix& rho);
Matrix parse_density_matrix(const std::string& text);

// x axis, p axis, then values row-major with rows over x.
std::string wigner_grid_text(const Header& h, const phase_space::WignerGrid& grid);
phase_space::WignerGrid parse_wigner_grid(const std::string& text);

// ---- runners ----

struct RunOptions {
  Command command = Command::params;
  std::filesystem::path config_path;
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  bool quiet = false;
};

struct OutputFile {
  std::string name;
  std::string contents;
};

struct RunResult {
  std::vector<OutputFile> files;
  std::string report;  // goes to stdout
  std::vector<std::string> log;  // progress notes, suppressed by --quiet
};

// Validates everything and computes all outputs in memory; touches no files.
RunResult run(const RunOptions& options, const ConfigDocument& config);

// Creates out_dir if needed and writes the files.
void write_outputs(const std::filesystem::path& out_dir, const std::vector<OutputFile>& files);

// Full command line entry point; returns the process exit code.
int main(int argc, char** argv);

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

}  // namespace superatom::cli
