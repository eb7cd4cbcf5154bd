#include "fishschool/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <system_error>

#include "fishschool/diagnostics.hpp"
#include "fishschool/forces.hpp"

namespace fishschool {

namespace {

double parse_double(std::string_view text, const std::filesystem::path& path) {
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec == std::errc() && res.ptr == last) return value;
  // non-finite values only show up in diverged runs
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  if (text == "nan" || text == "-nan") return std::numeric_limits<double>::quiet_NaN();
  throw IoError(path, "malformed number '" + std::string(text) + "'");
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

}  // namespace

IoError::IoError(const std::filesystem::path& path, const std::string& what)
    : std::runtime_error(path.string() + ": " + what), path_(path) {}

std::ofstream open_output_file(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError(path.parent_path(), "cannot create directory: " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path, "cannot open for writing");
  return out;
}

void finish_output_file(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError(path, "write failed");
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_trajectory_csv(std::span<const SwarmState> samples, std::ostream& out) {
  const std::size_t d = samples.empty() ? 0 : samples.front().dim;
  out << "t,particle";
  for (std::size_t k = 0; k < d; ++k) out << ",x" << k;
  for (std::size_t k = 0; k < d; ++k) out << ",v" << k;
  out << '\n';
  for (const auto& s : samples) {
    const std::string t = format_double(s.t);
    for (std::size_t i = 0; i < s.n; ++i) {
      out << t << ',' << i;
      for (double c : s.pos(i)) out << ',' << format_double(c);
      for (double c : s.vel(i)) out << ',' << format_double(c);
      out << '\n';
    }
  }
}

void emit_trajectory_csv(const Trajectory& trajectory, const std::filesystem::path& path) {
  auto out = open_output_file(path);
  write_trajectory_csv(trajectory.samples, out);
  finish_output_file(out, path);
}

std::vector<SwarmState> read_trajectory_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open for reading");
  std::string line;
  if (!std::getline(in, line)) throw IoError(path, "empty file");
  const auto header = split_commas(line);
  if (header.size() < 2 || header[0] != "t" || header[1] != "particle" ||
      (header.size() - 2) % 2 != 0) {
    throw IoError(path, "unexpected header '" + line + "'");
  }
  const std::size_t d = (header.size() - 2) / 2;

  std::vector<SwarmState> samples;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_commas(line);
    if (fields.size() != 2 + 2 * d) {
      throw IoError(path, "line " + std::to_string(line_no) + ": expected " +
                              std::to_string(2 + 2 * d) + " fields");
    }
    const double t = parse_double(fields[0], path);
    std::size_t particle = 0;
    const auto res =
        std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), particle);
    if (res.ec != std::errc()) throw IoError(path, "bad particle index on line " + std::to_string(line_no));

    if (particle == 0) {
      samples.emplace_back(0, d, t);
    }
    if (samples.empty() || samples.back().n != particle) {
      throw IoError(path, "rows out of order on line " + std::to_string(line_no));
    }
    auto& s = samples.back();
    s.n += 1;
    for (std::size_t k = 0; k < d; ++k) s.x.push_back(parse_double(fields[2 + k], path));
    for (std::size_t k = 0; k < d; ++k) s.v.push_back(parse_double(fields[2 + d + k], path));
  }
  return samples;
}

void emit_diagnostics_csv(const Trajectory& trajectory, const std::filesystem::path& path,
                          const std::optional<LyapunovConfig>& lyapunov) {
  const auto& params = trajectory.params;
  const bool pair = params.n_particles() == 2;
  const bool with_h = pair && lyapunov.has_value();
  const bool with_v = with_h && check_theta(params.dim(), params.q(), lyapunov->theta);

  auto out = open_output_file(path);
  out << "t,total_velocity_norm,min_pair_distance,max_pair_distance,mean_nn_distance,"
         "polarization,mean_speed";
  if (pair) out << ",X,Y,Z";
  if (with_h) out << ",H";
  if (with_v) out << ",V";
  out << '\n';

  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& s : trajectory.samples) {
    const auto diag = diagnose(s);
    double norm = 0.0;
    for (double c : diag.total_velocity) norm += c * c;
    out << format_double(s.t) << ',' << format_double(std::sqrt(norm)) << ','
        << format_double(diag.min_pair_distance) << ',' << format_double(diag.max_pair_distance)
        << ',' << format_double(diag.mean_nn_distance) << ',' << format_double(diag.polarization)
        << ',' << format_double(diag.mean_speed);
    if (pair) {
      ReducedState red{nan, nan, nan};
      try {
        red = reduce(s);
      } catch (const SingularForce&) {
      }
      out << ',' << format_double(red.X) << ',' << format_double(red.Y) << ','
          << format_double(red.Z);
      if (with_h) out << ',' << format_double(lyapunov_H(red, lyapunov->M, params.q()));
      if (with_v) {
        out << ','
            << format_double(lyapunov_V(red, lyapunov->M, lyapunov->theta, params.dim(), params.q()));
      }
    }
    out << '\n';
  }
  finish_output_file(out, path);
}

void emit_snapshots(std::span<const SwarmState> samples, std::span<const double> times,
                    const std::filesystem::path& path) {
  auto out = open_output_file(path);
  bool first_block = true;
  for (double t : times) {
    if (samples.empty()) break;
    const SwarmState* best = &samples.front();
    for (const auto& s : samples) {
      if (std::abs(s.t - t) < std::abs(best->t - t)) best = &s;
    }
    if (!first_block) out << "\n\n";
    first_block = false;
    out << "# t=" << format_double(best->t) << " requested=" << format_double(t) << '\n';
    for (std::size_t i = 0; i < best->n; ++i) {
      bool lead = true;
      for (double c : best->pos(i)) {
        out << (lead ? "" : " ") << format_double(c);
        lead = false;
      }
      for (double c : best->vel(i)) out << ' ' << format_double(c);
      out << '\n';
    }
  }
  finish_output_file(out, path);
}

}  // namespace fishschool
