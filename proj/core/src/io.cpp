#include "patchdyn/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace patchdyn {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_orbit_csv(std::ostream& os, const OrbitSegment& orbit) {
  os << "t,x,y\n";
  for (std::size_t k = 0; k < orbit.states.size(); ++k) {
    const PatchState& s = orbit.states[k];
    os << orbit.start_index + static_cast<long>(k) << ','
       << format_double(s.x) << ',' << format_double(s.y) << '\n';
  }
}

void write_census_csv(std::ostream& os,
                      std::span<const AttractorRecord> records) {
  os << "attractor,category,period,phase,spectral_radius,point,x,y\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    const AttractorRecord& rec = records[i];
    const std::string stability =
        rec.stability ? format_double(*rec.stability) : std::string();
    if (rec.orbit_points.empty()) {
      os << i << ',' << to_string(rec.category) << ',' << rec.period << ','
         << to_string(rec.phase) << ',' << stability << ",,,\n";
      continue;
    }
    for (std::size_t k = 0; k < rec.orbit_points.size(); ++k) {
      const PatchState& s = rec.orbit_points[k];
      os << i << ',' << to_string(rec.category) << ',' << rec.period << ','
         << to_string(rec.phase) << ',' << stability << ',' << k << ','
         << format_double(s.x) << ',' << format_double(s.y) << '\n';
    }
  }
}

void write_grid_csv(std::ostream& os, const ClassifiedGrid& grid,
                    const std::string& axis1_name, const std::string& axis2_name,
                    const std::string& value_name, const std::string& aux_name) {
  const bool with_aux = !aux_name.empty() && !grid.aux.empty();
  os << axis1_name << ',' << axis2_name << ',' << value_name;
  if (with_aux) os << ',' << aux_name;
  os << '\n';
  const Axis& a1 = grid.spec.axis1;
  const Axis& a2 = grid.spec.axis2 ? *grid.spec.axis2 : grid.spec.axis1;
  for (long i = 0; i < grid.rows; ++i) {
    for (long j = 0; j < grid.cols; ++j) {
      os << format_double(a1.at(i)) << ',' << format_double(a2.at(j)) << ','
         << grid.at(i, j);
      if (with_aux) os << ',' << grid.aux[static_cast<std::size_t>(i * grid.cols + j)];
      os << '\n';
    }
  }
}

void write_bifurcation_csv(std::ostream& os, const BifurcationResult& result) {
  os << "r,ic,x0,y0,t,x,y\n";
  for (const BifurcationSample& s : result.samples) {
    const PatchState& ic =
        result.initial_conditions[static_cast<std::size_t>(s.ic_index)];
    os << format_double(result.r_axis.at(s.r_index)) << ',' << s.ic_index
       << ',' << format_double(ic.x) << ',' << format_double(ic.y) << ','
       << s.t << ',' << format_double(s.x) << ',' << format_double(s.y)
       << '\n';
  }
}

void write_nullclines_csv(std::ostream& os, const NullclineSet& set) {
  os << "family,iterate,curve,vertex,x,y\n";
  for (const CurveSet* family : {&set.x_family, &set.y_family}) {
    for (std::size_t c = 0; c < family->curves.size(); ++c) {
      const Polyline& line = family->curves[c];
      for (std::size_t v = 0; v < line.vertices.size(); ++v) {
        os << to_string(family->family) << ',' << family->iterate << ',' << c
           << ',' << v << ',' << format_double(line.vertices[v].x) << ','
           << format_double(line.vertices[v].y) << '\n';
      }
    }
  }
}

void write_fixed_points_csv(std::ostream& os,
                            std::span<const FixedPointRecord> points) {
  os << "x,y,residual,spectral_radius,stable\n";
  for (const FixedPointRecord& fp : points) {
    os << format_double(fp.point.x) << ',' << format_double(fp.point.y) << ','
       << format_double(fp.residual) << ','
       << format_double(fp.spectral_radius) << ',' << (fp.stable ? 1 : 0)
       << '\n';
  }
}

void write_transient_csv(std::ostream& os, const TransientTrace& trace) {
  os << "t,x,y,label\n";
  for (std::size_t k = 0; k < trace.orbit.states.size(); ++k) {
    const PatchState& s = trace.orbit.states[k];
    os << trace.orbit.start_index + static_cast<long>(k) << ','
       << format_double(s.x) << ',' << format_double(s.y) << ','
       << to_string(trace.labels[k]) << '\n';
  }
}

void write_segments_csv(std::ostream& os, const TransientTrace& trace) {
  os << "label,first,last\n";
  for (const TransientSegment& seg : trace.segments) {
    os << to_string(seg.label) << ',' << seg.first << ',' << seg.last << '\n';
  }
}

void write_pgm(std::ostream& os, long width, long height,
               std::span<const int> pixels, bool binary) {
  if (static_cast<long>(pixels.size()) != width * height) {
    throw std::invalid_argument("write_pgm: pixel count mismatch");
  }
  os << (binary ? "P5" : "P2") << '\n' << width << ' ' << height << "\n255\n";
  if (binary) {
    std::string row;
    row.reserve(static_cast<std::size_t>(width));
    for (long y = 0; y < height; ++y) {
      row.clear();
      for (long x = 0; x < width; ++x) {
        int v = pixels[static_cast<std::size_t>(y * width + x)];
        v = std::max(0, std::min(255, v));
        row.push_back(static_cast<char>(static_cast<unsigned char>(v)));
      }
      os.write(row.data(), static_cast<std::streamsize>(row.size()));
    }
  } else {
    for (long y = 0; y < height; ++y) {
      for (long x = 0; x < width; ++x) {
        int v = pixels[static_cast<std::size_t>(y * width + x)];
        v = std::max(0, std::min(255, v));
        os << v << (x + 1 == width ? '\n' : ' ');
      }
    }
  }
}

int basin_gray(std::int32_t code) {
  switch (code) {
    case codes::kBasinExtinction:
      return 0;
    case codes::kBasinAsymmetricXHigh:
      return 85;
    case codes::kBasinAsymmetricYHigh:
      return 170;
    case codes::kBasinSymmetric:
      return 255;
    case codes::kBasinUnresolved:
      return 32;
    default:
      return 16;
  }
}

int plane_gray(std::int32_t code, int max_period) {
  if (code == codes::kPlaneExtinction) return 0;
  if (code == codes::kPlaneAperiodic) return 255;
  if (code >= 1 && code <= max_period) return 24 * code;
  return 16;
}

int probe_gray(std::int32_t code) {
  if (code == 0) return 0;
  if (code == 1) return 255;
  return 16;
}

int extinction_time_gray(std::int32_t t, long cap) {
  if (t < 0) return 16;
  const double clamped = std::min<double>(t, static_cast<double>(cap));
  return static_cast<int>(
      std::lround(255.0 * (1.0 - clamped / static_cast<double>(cap))));
}

void write_manifest(const std::filesystem::path& path,
                    const ManifestEntries& entries) {
  std::ofstream os(path);
  if (!os) {
    throw std::runtime_error("cannot open manifest for writing: " +
                             path.string());
  }
  for (const auto& [key, value] : entries) {
    os << key << '=' << value << '\n';
  }
  if (!os) {
    throw std::runtime_error("failed writing manifest: " + path.string());
  }
}

ManifestEntries read_manifest(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) {
    throw std::runtime_error("cannot open manifest: " + path.string());
  }
  ManifestEntries entries;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) continue;
    entries.emplace_back(line.substr(0, eq), line.substr(eq + 1));
  }
  return entries;
}

}  // namespace patchdyn
