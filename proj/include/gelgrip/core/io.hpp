#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "gelgrip/core/types.hpp"

namespace gelgrip::io {

// Binary portable pixmap (P6, maxval 255). The scale and timestamp travel in
// header comments; `default_px_per_mm` applies when a file carries none.
void write_ppm(std::ostream& out, const TactileFrame& frame);
TactileFrame read_ppm(std::istream& in, double default_px_per_mm = 1.0);
void save_ppm(const std::filesystem::path& path, const TactileFrame& frame);
TactileFrame load_ppm(const std::filesystem::path& path, double default_px_per_mm = 1.0);

// Heightmap CSV: one `# heightmap width=W height=H px_per_mm=S` line, then H
// rows of W comma-separated millimetre values with 6 decimals.
void write_heightmap_csv(std::ostream& out, const Grid& mm, double px_per_mm);
void write_heightmap_csv(std::ostream& out, const HeightMap& h);
HeightMap read_heightmap_csv(std::istream& in);
void save_heightmap_csv(const std::filesystem::path& path, const HeightMap& h);
HeightMap load_heightmap_csv(const std::filesystem::path& path);

// Marker tracks CSV: optional `# grid_rows=R grid_cols=C`, header
// `frame,id,x,y`, one row per marker per frame. Frames are numbered from 0.
void write_markers_csv(std::ostream& out, const std::vector<MarkerSet>& frames);
std::vector<MarkerSet> read_markers_csv(std::istream& in);
void save_markers_csv(const std::filesystem::path& path, const std::vector<MarkerSet>& frames);
std::vector<MarkerSet> load_markers_csv(const std::filesystem::path& path);

}  // namespace gelgrip::io
