#include <cstdio>
#include <fstream>
#include <sstream>

#include "superatom/cli.hpp"

namespace superatom::cli {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  return out;
}

std::vector<double> parse_row(const std::string& line) {
  std::vector<double> out;
  for (const auto& cell : split(line, ',')) out.push_back(std::stod(cell));
  return out;
}

// Data lines, comments and blank lines dropped.
std::vector<std::string> data_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream ss(text);
  std::string line;
  while (std::getline(ss, line))
    if (!line.empty() && line[0] != '#') out.push_back(line);
  return out;
}

void append_row(std::string& out, const double* v, std::size_t n, std::size_t stride) {
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += ',';
    out += format_double(v[i * stride]);
  }
  out += '\n';
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string header_block(const Header& h) {
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(h.config_hash));
  std::string out = "# superatom " + h.version + "\n";
  out += "# command: " + h.command + "\n";
  out += "# config_hash: fnv1a64:" + std::string(hash) + "\n";
  out += "# seed: " + std::to_string(h.seed) + "\n";
  for (const auto& [k, v] : h.extra) out += "# " + k + ": " + v + "\n";
  return out;
}

std::string series_csv(const Header& h, const std::vector<Column>& columns) {
  std::string out = header_block(h);
  std::size_t rows = 0;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (c) out += ',';
    out += columns[c].name;
    if (c == 0) rows = columns[c].values.size();
    if (columns[c].values.size() != rows) throw DimensionError("column " + columns[c].name, rows, columns[c].values.size());
  }
  out += '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) out += ',';
      out += format_double(columns[c].values[r]);
    }
    out += '\n';
  }
  return out;
}

std::string density_matrix_text(const Header& h, const Matrix& rho) {
  std::string out = header_block(h);
  const long d = rho.rows();
  out += "dim," + std::to_string(d) + "\n";
  const RealMatrix re = rho.real(), im = rho.imag();
  out += "# real\n";
  for (long i = 0; i < d; ++i) append_row(out, re.data() + i, static_cast<std::size_t>(d), static_cast<std::size_t>(d));
  out += "# imag\n";
  for (long i = 0; i < d; ++i) append_row(out, im.data() + i, static_cast<std::size_t>(d), static_cast<std::size_t>(d));
  return out;
}

Matrix parse_density_matrix(const std::string& text) {
  const auto lines = data_lines(text);
  if (lines.empty() || lines[0].rfind("dim,", 0) != 0) throw ValidationError("density matrix text lacks a dim line");
  const long d = std::stol(lines[0].substr(4));
  if (static_cast<long>(lines.size()) != 1 + 2 * d) throw ValidationError("density matrix text has the wrong row count");
  Matrix m(d, d);
  for (long i = 0; i < d; ++i) {
    const auto re = parse_row(lines[1 + i]), im = parse_row(lines[1 + d + i]);
    if (static_cast<long>(re.size()) != d || static_cast<long>(im.size()) != d)
      throw ValidationError("density matrix row has the wrong length");
    for (long j = 0; j < d; ++j) m(i, j) = Complex(re[j], im[j]);
  }
  return m;
}

std::string wigner_grid_text(const Header& h, const phase_space::WignerGrid& grid) {
  Header hh = h;
  hh.extra.emplace_back("integral", format_double(grid.integral));
  hh.extra.emplace_back("eps_grid", format_double(grid.eps_grid));
  hh.extra.emplace_back("layout", "x axis, p axis, then W(x_i, p_j) with one row per x_i");
  std::string out = header_block(hh);
  out += "# x\n";
  append_row(out, grid.x_axis.data(), grid.x_axis.size(), 1);
  out += "# p\n";
  append_row(out, grid.p_axis.data(), grid.p_axis.size(), 1);
  out += "# W\n";
  const long cols = grid.values.cols();
  for (long i = 0; i < grid.values.rows(); ++i) {
    // values is column-major; stride across a row is the row count
    append_row(out, grid.values.data() + i, static_cast<std::size_t>(cols), static_cast<std::size_t>(grid.values.rows()));
  }
  return out;
}

phase_space::WignerGrid parse_wigner_grid(const std::string& text) {
  const auto lines = data_lines(text);
  if (lines.size() < 3) throw ValidationError("Wigner grid text is truncated");
  phase_space::WignerGrid g;
  g.x_axis = parse_row(lines[0]);
  g.p_axis = parse_row(lines[1]);
  if (lines.size() != 2 + g.x_axis.size()) throw ValidationError("Wigner grid text has the wrong row count");
  g.values.resize(static_cast<long>(g.x_axis.size()), static_cast<long>(g.p_axis.size()));
  for (std::size_t i = 0; i < g.x_axis.size(); ++i) {
    const auto row = parse_row(lines[2 + i]);
    if (row.size() != g.p_axis.size()) throw ValidationError("Wigner grid row has the wrong length");
    for (std::size_t j = 0; j < row.size(); ++j) g.values(static_cast<long>(i), static_cast<long>(j)) = row[j];
  }
  std::istringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    if (line.rfind("# integral: ", 0) == 0) g.integral = std::stod(line.substr(12));
    if (line.rfind("# eps_grid: ", 0) == 0) g.eps_grid = std::stod(line.substr(12));
  }
  return g;
}

void write_outputs(const std::filesystem::path& out_dir, const std::vector<OutputFile>& files) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw ValidationError("cannot create output directory " + out_dir.string() + ": " + ec.message());
  for (const auto& f : files) {
    const auto path = out_dir / f.name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << f.contents;
    if (!out) throw ValidationError("failed writing " + path.string());
  }
}

}  // namespace superatom::cli
