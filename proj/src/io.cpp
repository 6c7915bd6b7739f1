#include "regscale/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "regscale/error.hpp"
#include "regscale/metrics.hpp"

namespace regscale {

namespace {

constexpr std::uint64_t kMaxPixels = std::uint64_t{1} << 28;

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  return out;
}

// Rethrows library errors with the offending path prepended.
template <class F>
auto with_path(const std::filesystem::path& path, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

std::size_t checked_pixels(std::uint64_t height, std::uint64_t width) {
  if (height == 0 || width == 0) throw Error(ErrorCode::CorruptHeader, "zero image dimension");
  if (height > kMaxPixels || width > kMaxPixels || height * width > kMaxPixels) {
    throw Error(ErrorCode::DimensionOverflow, std::to_string(height) + "x" + std::to_string(width) +
                                                  " exceeds the supported size");
  }
  return static_cast<std::size_t>(height * width);
}

// Whitespace-separated header token of a netpbm-style file; skips '#' comments.
std::string header_token(std::istream& in) {
  std::string token;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#' && token.empty()) {
      while ((ch = in.get()) != EOF && ch != '\n') {}
      continue;
    }
    if (std::isspace(ch)) {
      if (!token.empty()) return token;
      continue;
    }
    token.push_back(static_cast<char>(ch));
  }
  if (token.empty()) throw Error(ErrorCode::CorruptHeader, "truncated header");
  return token;
}

template <class T>
T parse_number(const std::string& token, const char* what) {
  T value{};
  const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
    throw Error(ErrorCode::CorruptHeader, std::string("bad ") + what + " '" + token + "'");
  }
  return value;
}

void read_exact(std::istream& in, char* dst, std::size_t n) {
  in.read(dst, static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) {
    throw Error(ErrorCode::CorruptHeader, "file ends before the pixel data does");
  }
}

std::uint32_t load_u32_le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint64_t load_u64_le(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

void store_u32_le(unsigned char* p, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) p[i] = static_cast<unsigned char>(v >> (8 * i));
}

void store_u64_le(unsigned char* p, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) p[i] = static_cast<unsigned char>(v >> (8 * i));
}

std::string peek_magic(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::array<char, 4> buf{};
  in.read(buf.data(), buf.size());
  return std::string(buf.data(), static_cast<std::size_t>(in.gcount()));
}

struct PgmHeader {
  std::size_t height = 0;
  std::size_t width = 0;
  std::uint32_t maxval = 0;
};

PgmHeader read_pgm_header(std::istream& in) {
  if (header_token(in) != "P5") throw Error(ErrorCode::UnknownFormat, "not a binary PGM (P5)");
  PgmHeader h;
  h.width = parse_number<std::size_t>(header_token(in), "width");
  h.height = parse_number<std::size_t>(header_token(in), "height");
  h.maxval = parse_number<std::uint32_t>(header_token(in), "maxval");
  if (h.maxval == 0 || h.maxval > 65535) throw Error(ErrorCode::CorruptHeader, "PGM maxval out of range");
  checked_pixels(h.height, h.width);
  return h;
}

std::vector<std::uint32_t> read_pgm_pixels(std::istream& in, const PgmHeader& h) {
  const std::size_t n = h.height * h.width;
  const std::size_t bytes = h.maxval > 255 ? 2 : 1;
  std::vector<unsigned char> raw(n * bytes);
  read_exact(in, reinterpret_cast<char*>(raw.data()), raw.size());
  std::vector<std::uint32_t> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Netpbm stores 16-bit samples most significant byte first.
    out[i] = bytes == 2 ? (static_cast<std::uint32_t>(raw[2 * i]) << 8) | raw[2 * i + 1] : raw[i];
  }
  return out;
}

void write_pgm16(std::ostream& out, std::size_t height, std::size_t width,
                 const std::vector<std::uint16_t>& pixels) {
  out << "P5\n" << width << ' ' << height << "\n65535\n";
  std::vector<unsigned char> raw(pixels.size() * 2);
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    raw[2 * i] = static_cast<unsigned char>(pixels[i] >> 8);
    raw[2 * i + 1] = static_cast<unsigned char>(pixels[i] & 0xFF);
  }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
}

double sidecar_scale(const std::filesystem::path& path) {
  std::filesystem::path sidecar = path;
  sidecar += ".scale";
  if (!std::filesystem::exists(sidecar)) return kDefaultPgmScale;
  std::istringstream in(read_text_file(sidecar));
  double scale = 0.0;
  if (!(in >> scale) || !(scale > 0.0)) {
    throw Error(ErrorCode::ParseError, sidecar.string() + ": expected a positive scale factor");
  }
  return scale;
}

}  // namespace

std::optional<DepthFormat> format_from_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == ".pfm") return DepthFormat::Pfm;
  if (ext == ".pgm") return DepthFormat::Pgm16;
  if (ext == ".dpg") return DepthFormat::Dpg1;
  return std::nullopt;
}

DepthGrid read_pfm(std::istream& in) {
  const std::string magic = header_token(in);
  std::size_t channels = 0;
  if (magic == "Pf") {
    channels = 1;
  } else if (magic == "PF") {
    channels = 3;
  } else {
    throw Error(ErrorCode::UnknownFormat, "not a PFM file");
  }
  const auto width = parse_number<std::size_t>(header_token(in), "width");
  const auto height = parse_number<std::size_t>(header_token(in), "height");
  const std::string scale_token = header_token(in);
  double scale = 0.0;
  {
    std::istringstream s(scale_token);
    if (!(s >> scale) || scale == 0.0) throw Error(ErrorCode::CorruptHeader, "bad PFM scale");
  }
  const bool little = scale < 0.0;
  const std::size_t n = checked_pixels(height, width);

  std::vector<unsigned char> raw(n * channels * 4);
  read_exact(in, reinterpret_cast<char*>(raw.data()), raw.size());
  std::vector<double> values(n);
  for (std::size_t r = 0; r < height; ++r) {
    // PFM rows run bottom to top.
    const std::size_t src_row = height - 1 - r;
    for (std::size_t c = 0; c < width; ++c) {
      const unsigned char* p = raw.data() + ((src_row * width + c) * channels) * 4;
      std::uint32_t bits = little ? load_u32_le(p)
                                  : (static_cast<std::uint32_t>(p[0]) << 24) |
                                        (static_cast<std::uint32_t>(p[1]) << 16) |
                                        (static_cast<std::uint32_t>(p[2]) << 8) | p[3];
      values[r * width + c] = static_cast<double>(std::bit_cast<float>(bits));
    }
  }
  return DepthGrid::from_values_zero_invalid(height, width, std::move(values));
}

void write_pfm(std::ostream& out, const DepthGrid& grid) {
  out << "Pf\n" << grid.width() << ' ' << grid.height() << "\n-1.0\n";
  std::vector<unsigned char> raw(grid.size() * 4);
  for (std::size_t r = 0; r < grid.height(); ++r) {
    const std::size_t dst_row = grid.height() - 1 - r;
    for (std::size_t c = 0; c < grid.width(); ++c) {
      const float v = grid.valid(r, c) ? static_cast<float>(grid.value(r, c)) : 0.0f;
      store_u32_le(raw.data() + (dst_row * grid.width() + c) * 4, std::bit_cast<std::uint32_t>(v));
    }
  }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
}

DepthGrid read_dpg1(std::istream& in) {
  std::array<unsigned char, 12> header{};
  in.read(reinterpret_cast<char*>(header.data()), 4);
  if (in.gcount() != 4 || std::memcmp(header.data(), "DPG1", 4) != 0) {
    throw Error(ErrorCode::UnknownFormat, "missing DPG1 magic");
  }
  in.read(reinterpret_cast<char*>(header.data() + 4), 8);
  if (in.gcount() != 8) throw Error(ErrorCode::CorruptHeader, "truncated DPG1 header");
  const std::uint32_t height = load_u32_le(header.data() + 4);
  const std::uint32_t width = load_u32_le(header.data() + 8);
  const std::size_t n = checked_pixels(height, width);

  std::vector<unsigned char> raw(n * 8);
  read_exact(in, reinterpret_cast<char*>(raw.data()), raw.size());
  DepthGrid grid(height, width);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = std::bit_cast<double>(load_u64_le(raw.data() + 8 * i));
    if (std::isfinite(v)) grid.set(i, v);
  }
  return grid;
}

void write_dpg1(std::ostream& out, const DepthGrid& grid) {
  if (grid.height() > std::numeric_limits<std::uint32_t>::max() ||
      grid.width() > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorCode::DimensionOverflow, "grid too large for DPG1");
  }
  std::vector<unsigned char> raw(12 + grid.size() * 8);
  std::memcpy(raw.data(), "DPG1", 4);
  store_u32_le(raw.data() + 4, static_cast<std::uint32_t>(grid.height()));
  store_u32_le(raw.data() + 8, static_cast<std::uint32_t>(grid.width()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = grid.valid(i) ? grid.value(i) : std::numeric_limits<double>::quiet_NaN();
    store_u64_le(raw.data() + 12 + 8 * i, std::bit_cast<std::uint64_t>(v));
  }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
}

DepthGrid read_pgm_depth(std::istream& in, double scale) {
  if (!(scale > 0.0)) throw Error(ErrorCode::ParseError, "PGM depth scale must be positive");
  const PgmHeader h = read_pgm_header(in);
  const std::vector<std::uint32_t> pixels = read_pgm_pixels(in, h);
  std::vector<double> values(pixels.size());
  for (std::size_t i = 0; i < pixels.size(); ++i) values[i] = static_cast<double>(pixels[i]) / scale;
  return DepthGrid::from_values_zero_invalid(h.height, h.width, std::move(values));
}

void write_pgm_depth(std::ostream& out, const DepthGrid& grid, double scale) {
  std::vector<std::uint16_t> pixels(grid.size(), 0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!grid.valid(i)) continue;
    const double v = std::round(grid.value(i) * scale);
    pixels[i] = static_cast<std::uint16_t>(std::clamp(v, 0.0, 65535.0));
  }
  write_pgm16(out, grid.height(), grid.width(), pixels);
}

DepthGrid load_depth(const std::filesystem::path& path, const DepthLoadOptions& options) {
  return with_path(path, [&] {
    const std::string magic = peek_magic(path);
    std::ifstream in = open_input(path);
    if (magic.starts_with("DPG1")) return read_dpg1(in);
    if (magic.starts_with("Pf") || magic.starts_with("PF")) return read_pfm(in);
    if (magic.starts_with("P5")) {
      return read_pgm_depth(in, options.pgm_scale ? *options.pgm_scale : sidecar_scale(path));
    }
    throw Error(ErrorCode::UnknownFormat, "unrecognized depth file");
  });
}

void save_depth(const std::filesystem::path& path, const DepthGrid& grid,
                std::optional<DepthFormat> format, double pgm_scale) {
  with_path(path, [&] {
    const auto chosen = format ? format : format_from_extension(path);
    if (!chosen) throw Error(ErrorCode::UnknownFormat, "use a .pfm, .pgm or .dpg extension");
    std::ofstream out = open_output(path);
    switch (*chosen) {
      case DepthFormat::Pfm: write_pfm(out, grid); break;
      case DepthFormat::Pgm16: write_pgm_depth(out, grid, pgm_scale); break;
      case DepthFormat::Dpg1: write_dpg1(out, grid); break;
    }
    if (!out) throw Error(ErrorCode::Io, "write failed");
  });
}

LabelGrid read_pgm_labels(std::istream& in) {
  const PgmHeader h = read_pgm_header(in);
  return LabelGrid(h.height, h.width, read_pgm_pixels(in, h));
}

void write_pgm_labels(std::ostream& out, const LabelGrid& mask) {
  if (mask.max_label() > 65535) throw Error(ErrorCode::DimensionOverflow, "label exceeds 16 bits");
  std::vector<std::uint16_t> pixels(mask.labels().begin(), mask.labels().end());
  write_pgm16(out, mask.height(), mask.width(), pixels);
}

LabelGrid load_mask(const std::filesystem::path& path) {
  return with_path(path, [&] {
    std::ifstream in = open_input(path);
    return read_pgm_labels(in);
  });
}

void save_mask(const std::filesystem::path& path, const LabelGrid& mask) {
  with_path(path, [&] {
    std::ofstream out = open_output(path);
    write_pgm_labels(out, mask);
  });
}

SparseSamples parse_samples(std::istream& in, const std::string& source, std::ostream* warnings) {
  std::vector<Sample> points;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (line_no == 1 && line.rfind("row", 0) == 0) continue;

    const std::string where = source + ":" + std::to_string(line_no);
    std::array<std::string, 3> fields;
    std::size_t start = 0;
    for (std::size_t f = 0; f < 3; ++f) {
      const std::size_t comma = line.find(',', start);
      if ((f < 2) == (comma == std::string::npos)) {
        throw Error(ErrorCode::ParseError, where + ": expected row,col,depth_m");
      }
      fields[f] = line.substr(start, f < 2 ? comma - start : std::string::npos);
      start = comma + 1;
    }
    for (auto& field : fields) {
      const auto b = field.find_first_not_of(" \t");
      const auto e = field.find_last_not_of(" \t");
      field = b == std::string::npos ? std::string() : field.substr(b, e - b + 1);
    }
    std::size_t row = 0, col = 0;
    double depth = 0.0;
    auto parse = [&](const std::string& s, auto& value) {
      const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
      if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw Error(ErrorCode::ParseError, where + ": cannot parse '" + s + "'");
      }
    };
    parse(fields[0], row);
    parse(fields[1], col);
    parse(fields[2], depth);
    if (!std::isfinite(depth) || !(depth > 0.0)) {
      if (warnings) *warnings << "warning: " << where << ": skipping non-positive depth " << fields[2] << '\n';
      continue;
    }
    points.push_back({row, col, depth});
  }
  try {
    return SparseSamples(std::move(points));
  } catch (const Error& e) {
    throw Error(e.code(), source + ": " + e.detail());
  }
}

SparseSamples load_samples(const std::filesystem::path& path, std::ostream* warnings) {
  std::ifstream in = open_input(path);
  return parse_samples(in, path.string(), warnings);
}

void write_samples(std::ostream& out, const SparseSamples& samples) {
  out << "row,col,depth_m\n";
  for (const Sample& s : samples.points()) {
    out << s.row << ',' << s.col << ',' << format_double(s.depth) << '\n';
  }
}

void save_samples(const std::filesystem::path& path, const SparseSamples& samples) {
  std::ofstream out = open_output(path);
  write_samples(out, samples);
}

void write_region_report(std::ostream& out, const std::vector<RegionReport>& reports) {
  out << kRegionReportHeader << '\n';
  for (const RegionReport& r : reports) {
    const FitParams& p = r.params;
    out << r.region << ',' << r.label << ',' << r.pixel_count << ',' << r.own_samples << ','
        << to_string(r.method) << ',' << to_string(p.kind) << ',' << to_string(p.provenance) << ','
        << p.hop << ',' << p.support << ',' << format_double(p.alpha) << ','
        << format_double(p.beta) << ',' << format_double(p.gamma) << ','
        << format_double(p.delta) << ',' << format_double(p.condition) << ','
        << (r.residual_rmse ? format_double(*r.residual_rmse) : std::string()) << '\n';
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out = open_output(path);
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

}  // namespace regscale
