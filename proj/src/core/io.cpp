#include "gelgrip/core/io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "gelgrip/core/error.hpp"

namespace gelgrip::io {

namespace {

std::ifstream open_in(const std::filesystem::path& path, bool binary) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path, bool binary) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

bool parse_double(std::string_view s, double& v) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.empty()) return false;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

bool parse_int(std::string_view s, int& v) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.empty()) return false;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

// Reads `key=value` pairs out of a comment line such as "# heightmap width=4".
std::map<std::string, std::string> comment_fields(const std::string& line) {
  std::map<std::string, std::string> out;
  std::istringstream ss(line.substr(1));
  std::string tok;
  while (ss >> tok) {
    const auto eq = tok.find('=');
    if (eq != std::string::npos) out[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  return out;
}

// Whitespace/comment-aware token reader for the pixmap header.
class PnmHeader {
 public:
  explicit PnmHeader(std::istream& in) : in_(in) {}

  std::string token() {
    std::string tok;
    while (true) {
      const int ch = in_.get();
      if (ch == EOF) break;
      if (ch == '#') {
        std::string comment;
        std::getline(in_, comment);
        parse_comment(comment);
        ++line_;
        if (!tok.empty()) break;
        continue;
      }
      if (std::isspace(ch)) {
        if (ch == '\n') ++line_;
        if (!tok.empty()) break;
        continue;
      }
      tok.push_back(static_cast<char>(ch));
    }
    return tok;
  }

  int line() const { return line_; }
  double px_per_mm = 0.0;
  double timestamp = 0.0;

 private:
  void parse_comment(const std::string& c) {
    std::istringstream ss(c);
    std::string key;
    double v = 0.0;
    if (ss >> key >> v) {
      if (key == "px_per_mm") px_per_mm = v;
      if (key == "timestamp") timestamp = v;
    }
  }

  std::istream& in_;
  int line_ = 1;
};

}  // namespace

void write_ppm(std::ostream& out, const TactileFrame& frame) {
  out << "P6\n"
      << std::setprecision(17) << "# px_per_mm " << frame.px_per_mm() << "\n"
      << "# timestamp " << frame.timestamp() << "\n"
      << frame.width() << " " << frame.height() << "\n255\n";
  std::vector<unsigned char> row(static_cast<std::size_t>(frame.width()) * 3);
  for (int y = 0; y < frame.height(); ++y) {
    for (int x = 0; x < frame.width(); ++x) {
      for (int c = 0; c < 3; ++c) {
        row[static_cast<std::size_t>(x) * 3 + c] =
            static_cast<unsigned char>(std::lround(frame.at(y, x, c) * 255.0));
      }
    }
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
  if (!out) throw Error("failed writing pixmap");
}

TactileFrame read_ppm(std::istream& in, double default_px_per_mm) {
  PnmHeader hdr(in);
  const std::string magic = hdr.token();
  if (magic != "P6") throw ParseError(1, "expected P6 pixmap magic, got '" + magic + "'");
  int w = 0, h = 0, maxval = 0;
  if (!parse_int(hdr.token(), w) || !parse_int(hdr.token(), h) || w <= 0 || h <= 0) {
    throw ParseError(hdr.line(), "bad pixmap dimensions");
  }
  if (!parse_int(hdr.token(), maxval) || maxval != 255) {
    throw ParseError(hdr.line(), "only 8-bit pixmaps (maxval 255) are supported");
  }
  std::vector<unsigned char> data(static_cast<std::size_t>(w) * h * 3);
  in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (in.gcount() != static_cast<std::streamsize>(data.size())) {
    throw ParseError(hdr.line(), "pixmap data truncated");
  }
  RgbImage img(w, h);
  std::size_t k = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) img.at(y, x, c) = data[k++] / 255.0;
    }
  }
  const double scale = hdr.px_per_mm > 0.0 ? hdr.px_per_mm : default_px_per_mm;
  return TactileFrame(std::move(img), scale, hdr.timestamp);
}

void save_ppm(const std::filesystem::path& path, const TactileFrame& frame) {
  auto out = open_out(path, true);
  write_ppm(out, frame);
}

TactileFrame load_ppm(const std::filesystem::path& path, double default_px_per_mm) {
  auto in = open_in(path, true);
  return read_ppm(in, default_px_per_mm);
}

void write_heightmap_csv(std::ostream& out, const Grid& mm, double px_per_mm) {
  if (!mm.allFinite()) throw Error("refusing to save heightmap with non-finite values");
  out << "# heightmap width=" << mm.cols() << " height=" << mm.rows() << " px_per_mm="
      << std::setprecision(17) << px_per_mm << "\n";
  out << std::fixed << std::setprecision(6);
  for (Eigen::Index y = 0; y < mm.rows(); ++y) {
    for (Eigen::Index x = 0; x < mm.cols(); ++x) {
      if (x) out << ',';
      out << mm(y, x);
    }
    out << '\n';
  }
  out << std::defaultfloat;
}

void write_heightmap_csv(std::ostream& out, const HeightMap& h) {
  write_heightmap_csv(out, h.values(), h.px_per_mm());
}

HeightMap read_heightmap_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.empty() || line[0] != '#') {
    throw ParseError(1, "missing '# heightmap' header");
  }
  const auto f = comment_fields(line);
  int w = 0, h = 0;
  double scale = 0.0;
  if (!f.count("width") || !f.count("height") || !f.count("px_per_mm") ||
      !parse_int(f.at("width"), w) || !parse_int(f.at("height"), h) ||
      !parse_double(f.at("px_per_mm"), scale) || w <= 0 || h <= 0) {
    throw ParseError(1, "malformed heightmap header");
  }
  Grid mm(h, w);
  int lineno = 1;
  for (int y = 0; y < h; ++y) {
    ++lineno;
    if (!std::getline(in, line)) {
      throw ParseError(lineno, "expected " + std::to_string(h) + " rows, found " +
                                   std::to_string(y));
    }
    const auto cells = split(line, ',');
    if (static_cast<int>(cells.size()) != w) {
      throw ParseError(lineno, "expected " + std::to_string(w) + " values, found " +
                                   std::to_string(cells.size()));
    }
    for (int x = 0; x < w; ++x) {
      double v = 0.0;
      if (!parse_double(cells[x], v) || !std::isfinite(v)) {
        throw ParseError(lineno, "bad value '" + std::string(cells[x]) + "'");
      }
      mm(y, x) = v;
    }
  }
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line != "\r") throw ParseError(lineno, "unexpected extra row");
  }
  return HeightMap(std::move(mm), scale);
}

void save_heightmap_csv(const std::filesystem::path& path, const HeightMap& h) {
  auto out = open_out(path, false);
  write_heightmap_csv(out, h);
}

HeightMap load_heightmap_csv(const std::filesystem::path& path) {
  auto in = open_in(path, false);
  return read_heightmap_csv(in);
}

void write_markers_csv(std::ostream& out, const std::vector<MarkerSet>& frames) {
  if (!frames.empty() && frames.front().grid_rows() > 0) {
    out << "# grid_rows=" << frames.front().grid_rows()
        << " grid_cols=" << frames.front().grid_cols() << "\n";
  }
  out << "frame,id,x,y\n" << std::fixed << std::setprecision(6);
  for (std::size_t f = 0; f < frames.size(); ++f) {
    for (const Marker& m : frames[f].markers()) {
      out << f << ',' << m.id << ',' << m.x << ',' << m.y << '\n';
    }
  }
  out << std::defaultfloat;
}

std::vector<MarkerSet> read_markers_csv(std::istream& in) {
  std::map<int, std::vector<Marker>> by_frame;
  int grid_rows = 0, grid_cols = 0;
  bool header_seen = false;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto f = comment_fields(line);
      if (f.count("grid_rows")) parse_int(f.at("grid_rows"), grid_rows);
      if (f.count("grid_cols")) parse_int(f.at("grid_cols"), grid_cols);
      continue;
    }
    if (!header_seen) {
      if (line != "frame,id,x,y") throw ParseError(lineno, "expected header 'frame,id,x,y'");
      header_seen = true;
      continue;
    }
    const auto cells = split(line, ',');
    int frame = 0;
    Marker m;
    if (cells.size() != 4 || !parse_int(cells[0], frame) || frame < 0 ||
        !parse_int(cells[1], m.id) || !parse_double(cells[2], m.x) ||
        !parse_double(cells[3], m.y)) {
      throw ParseError(lineno, "malformed marker row '" + line + "'");
    }
    by_frame[frame].push_back(m);
  }
  std::vector<MarkerSet> frames;
  if (by_frame.empty()) return frames;
  frames.resize(static_cast<std::size_t>(by_frame.rbegin()->first) + 1,
                MarkerSet({}, grid_rows, grid_cols));
  for (auto& [f, markers] : by_frame) {
    frames[static_cast<std::size_t>(f)] = MarkerSet(std::move(markers), grid_rows, grid_cols);
  }
  return frames;
}

void save_markers_csv(const std::filesystem::path& path, const std::vector<MarkerSet>& frames) {
  auto out = open_out(path, false);
  write_markers_csv(out, frames);
}

std::vector<MarkerSet> load_markers_csv(const std::filesystem::path& path) {
  auto in = open_in(path, false);
  return read_markers_csv(in);
}

}  // namespace gelgrip::io
