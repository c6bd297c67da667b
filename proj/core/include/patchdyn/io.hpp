#pragma once

#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "patchdyn/attractor.hpp"
#include "patchdyn/nullclines.hpp"
#include "patchdyn/sweep.hpp"

namespace patchdyn {

// 17 significant digits: the shortest fixed precision that round-trips every
// double exactly.
std::string format_double(double v);

// --- CSV -------------------------------------------------------------------
// All writers emit a header row and one record per line, LF-terminated.

void write_orbit_csv(std::ostream& os, const OrbitSegment& orbit);
void write_census_csv(std::ostream& os,
                      std::span<const AttractorRecord> records);
void write_grid_csv(std::ostream& os, const ClassifiedGrid& grid,
                    const std::string& axis1_name, const std::string& axis2_name,
                    const std::string& value_name,
                    const std::string& aux_name = "");
void write_bifurcation_csv(std::ostream& os, const BifurcationResult& result);
void write_nullclines_csv(std::ostream& os, const NullclineSet& set);
void write_fixed_points_csv(std::ostream& os,
                            std::span<const FixedPointRecord> points);
void write_transient_csv(std::ostream& os, const TransientTrace& trace);
void write_segments_csv(std::ostream& os, const TransientTrace& trace);

// --- portable graymap --------------------------------------------------------
// Plain ("P2", ASCII) or raw ("P5", binary) graymap with maxval 255. Pixels
// are row-major with `width` values per row.

void write_pgm(std::ostream& os, long width, long height,
               std::span<const int> pixels, bool binary);

// Documented gray levels for the grid products (maxval 255):
//   basin:   Extinction 0, AsymmetricXHigh 85, AsymmetricYHigh 170,
//            Symmetric 255, Unresolved 32, error 16
//   plane:   extinction 0, aperiodic/chaos 255, period p in 1..8 -> 24*p,
//            error 16
//   probe:   false 0, true 255, error 16
//   ext-time: 255 * (1 - min(t, cap)/cap); fast extinction is white, survival
//            past the cap is black; error 16
int basin_gray(std::int32_t code);
int plane_gray(std::int32_t code, int max_period);
int probe_gray(std::int32_t code);
int extinction_time_gray(std::int32_t t, long cap);

// --- run manifests ------------------------------------------------------------
// Flat key=value text file, one entry per line, written in insertion order.

using ManifestEntries = std::vector<std::pair<std::string, std::string>>;

void write_manifest(const std::filesystem::path& path,
                    const ManifestEntries& entries);
ManifestEntries read_manifest(const std::filesystem::path& path);

}  // namespace patchdyn
