#include "vtube/export.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <system_error>

#include "vtube/error.hpp"

namespace vtube {

namespace fs = std::filesystem;

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

namespace {

class CsvFile {
 public:
  explicit CsvFile(const fs::path& path) : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  }

  void header(const std::vector<std::string>& cols) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (i) line_ += ',';
      line_ += cols[i];
    }
    end_row();
  }

  CsvFile& operator<<(double v) {
    if (!line_.empty()) line_ += ',';
    line_ += format_number(v);
    return *this;
  }

  CsvFile& operator<<(const Vec3& v) { return *this << v.x << v.y << v.z; }
  CsvFile& operator<<(const Vec2& v) { return *this << v.x << v.y; }

  void end_row() {
    line_ += '\n';
    out_ << line_;
    line_.clear();
  }

  void close() {
    out_.close();
    if (!out_) throw Error(ErrorKind::IoError, "failed writing " + path_.string());
  }

 private:
  fs::path path_;
  std::ofstream out_;
  std::string line_;
};

void for_samples(const RunRecord& r, std::size_t stride, const std::function<void(std::size_t)>& f) {
  const std::size_t n = r.steps();
  for (std::size_t k = 0; k < n; k += stride) f(k);
  if (n > 0 && (n - 1) % stride != 0) f(n - 1);
}

std::string idx(const char* prefix, std::size_t i, const char* suffix) {
  return prefix + std::to_string(i) + suffix;
}

}  // namespace

std::vector<fs::path> export_csv(const RunRecord& r, const fs::path& out_dir, std::size_t stride) {
  require(stride >= 1, ErrorKind::PreconditionViolation, "stride must be at least 1");
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create " + out_dir.string() + ": " + ec.message());

  const std::size_t n = r.uav_count;
  const std::size_t m = r.node_count;
  std::vector<fs::path> written;

  {
    CsvFile f(out_dir / "states.csv");
    std::vector<std::string> cols{"time"};
    for (std::size_t i = 0; i < n; ++i) {
      for (const char* c : {"px", "py", "pz", "vx", "vy", "vz"}) cols.push_back(idx("uav", i, "_") + c);
    }
    for (const char* c : {"load_px", "load_py", "load_pz", "load_vx", "load_vy", "load_vz"}) cols.push_back(c);
    f.header(cols);
    for_samples(r, stride, [&](std::size_t k) {
      f << r.time[k];
      for (std::size_t i = 0; i < n; ++i) f << r.uav_position[k * n + i] << r.uav_velocity[k * n + i];
      f << r.load_position[k] << r.load_velocity[k];
      f.end_row();
    });
    f.close();
    written.push_back(out_dir / "states.csv");
  }
  {
    CsvFile f(out_dir / "tensions.csv");
    std::vector<std::string> cols{"time"};
    for (std::size_t i = 0; i < n; ++i) cols.push_back(idx("tension", i, ""));
    f.header(cols);
    for_samples(r, stride, [&](std::size_t k) {
      f << r.time[k];
      for (std::size_t i = 0; i < n; ++i) f << r.tension[k * n + i];
      f.end_row();
    });
    f.close();
    written.push_back(out_dir / "tensions.csv");
  }
  {
    CsvFile f(out_dir / "distances.csv");
    f.header({"time", "min_inter_uav", "min_uav_boundary", "min_node_boundary", "tray_l"});
    for_samples(r, stride, [&](std::size_t k) {
      f << r.time[k] << r.min_inter_uav[k] << r.min_uav_boundary[k] << r.min_node_boundary[k]
        << r.tray_l[k];
      f.end_row();
    });
    f.close();
    written.push_back(out_dir / "distances.csv");
  }
  {
    CsvFile f(out_dir / "lyapunov.csv");
    f.header({"time", "approach", "spring", "barrier", "total", "load_vertical_force"});
    for_samples(r, stride, [&](std::size_t k) {
      f << r.time[k] << r.approach_energy[k] << r.spring_energy[k] << r.barrier_energy[k]
        << r.total_energy[k] << r.load_vertical_force[k];
      f.end_row();
    });
    f.close();
    written.push_back(out_dir / "lyapunov.csv");
  }
  {
    CsvFile f(out_dir / "nodes.csv");
    std::vector<std::string> cols{"time"};
    for (std::size_t i = 0; i < m; ++i) {
      for (const char* c : {"qx", "qy", "vx", "vy"}) cols.push_back(idx("node", i, "_") + c);
    }
    f.header(cols);
    for_samples(r, stride, [&](std::size_t k) {
      f << r.time[k];
      for (std::size_t i = 0; i < m; ++i) f << r.node_position[k * m + i] << r.node_command[k * m + i];
      f.end_row();
    });
    f.close();
    written.push_back(out_dir / "nodes.csv");
  }
  return written;
}

std::string format_summary(const RunSummary& s, const RunRecord& r) {
  std::string out;
  auto line = [&](const std::string& key, const std::string& value) {
    out += key + " = " + value + "\n";
  };
  line("status", std::string(to_string(s.status)));
  if (!r.status_detail.empty()) line("status_detail", r.status_detail);
  line("safety_violation", s.safety_violation ? "true" : "false");
  line("steps", std::to_string(r.steps()));
  line("final_time", format_number(r.time.empty() ? 0.0 : r.time.back()));
  line("arrival_time", format_number(s.arrival_time));
  line("min_uav_boundary", format_number(s.min_uav_boundary));
  line("min_node_boundary", format_number(s.min_node_boundary));
  line("min_inter_uav", format_number(s.min_inter_uav));
  line("max_tension", format_number(s.max_tension));
  line("tension_spread", format_number(s.tension_spread));
  line("formation_error", format_number(s.formation_error));
  line("formation_error_ratio", format_number(s.formation_error_ratio));
  line("max_energy_increase", format_number(s.max_energy_increase));
  return out;
}

fs::path write_summary(const RunSummary& s, const RunRecord& r, const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create " + out_dir.string() + ": " + ec.message());
  const fs::path path = out_dir / "summary.txt";
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out << format_summary(s, r);
  out.close();
  if (!out) throw Error(ErrorKind::IoError, "failed writing " + path.string());
  return path;
}

}  // namespace vtube
