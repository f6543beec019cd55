#include "riskplan/io.hpp"

#include <png.h>

#include <cstring>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>

namespace riskplan::io {

Bytes read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::string read_text(const fs::path& path) {
  const Bytes b = read_file(path);
  return std::string(b.begin(), b.end());
}

void write_file_atomic(const fs::path& path, const Bytes& data) {
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  std::random_device rd;
  const fs::path tmp =
      dir / ("." + path.filename().string() + ".tmp" + std::to_string(rd()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size()));
    if (!out) throw IoError("short write to '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot rename into '" + path.string() + "'");
  }
}

void write_text_atomic(const fs::path& path, const std::string& text) {
  write_file_atomic(path, Bytes(text.begin(), text.end()));
}

namespace {

struct PngErrorState {
  std::string message;
};

void png_fail(png_structp png, png_const_charp msg) {
  static_cast<PngErrorState*>(png_get_error_ptr(png))->message = msg;
  png_longjmp(png, 1);
}
void png_warn(png_structp, png_const_charp) {}

// libpng reports errors by longjmp. Every libpng call goes through guarded(),
// and the callables passed in hold no objects with destructors.
template <typename F>
void guarded(png_structp png, const PngErrorState& err, F&& f) {
  if (setjmp(png_jmpbuf(png))) throw IoError("png: " + err.message);
  f();
}

class PngWriter {
 public:
  PngWriter() {
    png_ = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err_, png_fail, png_warn);
    if (!png_) throw IoError("png: out of memory");
    info_ = png_create_info_struct(png_);
    if (!info_) {
      png_destroy_write_struct(&png_, nullptr);
      throw IoError("png: out of memory");
    }
    png_set_write_fn(png_, &out_, &PngWriter::Write, nullptr);
  }
  ~PngWriter() { png_destroy_write_struct(&png_, &info_); }
  PngWriter(const PngWriter&) = delete;
  PngWriter& operator=(const PngWriter&) = delete;

  void header(int width, int height, int color_type) {
    guarded(png_, err_, [&] {
      png_set_IHDR(png_, info_, width, height, 8, color_type, PNG_INTERLACE_NONE,
                   PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    });
  }
  void palette(std::vector<png_color>& colors) {
    guarded(png_, err_, [&] {
      png_set_PLTE(png_, info_, colors.data(), static_cast<int>(colors.size()));
    });
  }

  Bytes finish(std::vector<png_bytep>& rows) {
    guarded(png_, err_, [&] {
      png_write_info(png_, info_);
      png_write_image(png_, rows.data());
      png_write_end(png_, nullptr);
    });
    return std::move(out_);
  }

 private:
  static void Write(png_structp png, png_bytep data, png_size_t len) {
    auto* out = static_cast<Bytes*>(png_get_io_ptr(png));
    out->insert(out->end(), data, data + len);
  }

  PngErrorState err_;
  png_structp png_ = nullptr;
  png_infop info_ = nullptr;
  Bytes out_;
};

struct ReadCursor {
  const Bytes* data;
  std::size_t pos;
};

class PngReader {
 public:
  explicit PngReader(const Bytes& data) : cursor_{&data, 0} {
    if (data.size() < 8 || png_sig_cmp(data.data(), 0, 8) != 0) {
      throw IoError("not a PNG file");
    }
    png_ = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err_, png_fail, png_warn);
    if (!png_) throw IoError("png: out of memory");
    info_ = png_create_info_struct(png_);
    if (!info_) {
      png_destroy_read_struct(&png_, nullptr, nullptr);
      throw IoError("png: out of memory");
    }
    png_set_read_fn(png_, &cursor_, &PngReader::Read);
    guarded(png_, err_, [&] {
      png_read_info(png_, info_);
      width_ = static_cast<int>(png_get_image_width(png_, info_));
      height_ = static_cast<int>(png_get_image_height(png_, info_));
      color_type_ = png_get_color_type(png_, info_);
      bit_depth_ = png_get_bit_depth(png_, info_);
    });
  }
  ~PngReader() { png_destroy_read_struct(&png_, &info_, nullptr); }
  PngReader(const PngReader&) = delete;
  PngReader& operator=(const PngReader&) = delete;

  int width() const { return width_; }
  int height() const { return height_; }
  int color_type() const { return color_type_; }
  int bit_depth() const { return bit_depth_; }

  /// Applies libpng input transformations before reading.
  template <typename F>
  void transform(F&& f) {
    guarded(png_, err_, [&] { f(png_); });
  }

  std::vector<std::uint8_t> read_rows() {
    std::size_t stride = 0;
    guarded(png_, err_, [&] {
      png_read_update_info(png_, info_);
      stride = png_get_rowbytes(png_, info_);
    });
    std::vector<std::uint8_t> buf(stride * height_);
    std::vector<png_bytep> rows(height_);
    for (int y = 0; y < height_; ++y) rows[y] = buf.data() + y * stride;
    guarded(png_, err_, [&] {
      png_read_image(png_, rows.data());
      png_read_end(png_, nullptr);
    });
    return buf;
  }

 private:
  static void Read(png_structp png, png_bytep out, png_size_t len) {
    auto* c = static_cast<ReadCursor*>(png_get_io_ptr(png));
    if (c->pos + len > c->data->size()) png_error(png, "truncated PNG data");
    std::memcpy(out, c->data->data() + c->pos, len);
    c->pos += len;
  }

  PngErrorState err_;
  ReadCursor cursor_;
  png_structp png_ = nullptr;
  png_infop info_ = nullptr;
  int width_ = 0;
  int height_ = 0;
  int color_type_ = 0;
  int bit_depth_ = 0;
};

void require_nonempty(int w, int h, const char* what) {
  if (w <= 0 || h <= 0) {
    throw ValidationError(std::string("cannot encode empty ") + what);
  }
}

}  // namespace

Bytes encode_rgb_png(const ColorImage& image) {
  require_nonempty(image.width(), image.height(), "image");
  PngWriter w;
  w.header(image.width(), image.height(), PNG_COLOR_TYPE_RGB);
  static_assert(sizeof(Rgb) == 3);
  std::vector<png_bytep> rows(image.height());
  auto* base = reinterpret_cast<png_bytep>(const_cast<Rgb*>(image.values().data()));
  for (int y = 0; y < image.height(); ++y) rows[y] = base + y * 3 * image.width();
  return w.finish(rows);
}

ColorImage decode_rgb_png(const Bytes& png) {
  PngReader r(png);
  const int ct = r.color_type();
  r.transform([ct](png_structp p) {
    png_set_expand(p);
    png_set_strip_16(p);
    png_set_strip_alpha(p);
    if (ct == PNG_COLOR_TYPE_GRAY || ct == PNG_COLOR_TYPE_GRAY_ALPHA) {
      png_set_gray_to_rgb(p);
    }
  });
  const auto buf = r.read_rows();
  ColorImage img(r.width(), r.height());
  std::memcpy(img.values().data(), buf.data(), img.size() * 3);
  return img;
}

Bytes encode_mask_png(const BinaryMask& mask) {
  require_nonempty(mask.width(), mask.height(), "mask");
  PngWriter w;
  w.header(mask.width(), mask.height(), PNG_COLOR_TYPE_GRAY);
  std::vector<std::uint8_t> buf(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) buf[i] = mask[i] ? 255 : 0;
  std::vector<png_bytep> rows(mask.height());
  for (int y = 0; y < mask.height(); ++y) rows[y] = buf.data() + y * mask.width();
  return w.finish(rows);
}

BinaryMask decode_mask_png(const Bytes& png) {
  PngReader r(png);
  const int ct = r.color_type();
  r.transform([ct](png_structp p) {
    png_set_expand(p);
    png_set_strip_16(p);
    png_set_strip_alpha(p);
    if (ct == PNG_COLOR_TYPE_RGB || ct == PNG_COLOR_TYPE_RGB_ALPHA ||
        ct == PNG_COLOR_TYPE_PALETTE) {
      png_set_rgb_to_gray_fixed(p, 1, -1, -1);
    }
  });
  const auto buf = r.read_rows();
  BinaryMask mask(r.width(), r.height());
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = buf[i] >= 128 ? 1 : 0;
  return mask;
}

Bytes encode_label_png(const LabelGrid& grid) {
  require_nonempty(grid.width(), grid.height(), "label grid");
  require_valid(validate(grid), "label grid");
  PngWriter w;
  w.header(grid.width(), grid.height(), PNG_COLOR_TYPE_PALETTE);
  std::vector<png_color> palette;
  for (const auto& c : grid.taxonomy().classes()) {
    palette.push_back({c.color.r, c.color.g, c.color.b});
  }
  w.palette(palette);
  std::vector<png_bytep> rows(grid.height());
  auto* base = const_cast<png_bytep>(grid.values().data());
  for (int y = 0; y < grid.height(); ++y) rows[y] = base + y * grid.width();
  return w.finish(rows);
}

LabelGrid decode_label_png(const Bytes& png, std::shared_ptr<const ClassTaxonomy> taxonomy) {
  PngReader r(png);
  if (r.color_type() != PNG_COLOR_TYPE_PALETTE) {
    throw IoError("label map must be an indexed-color PNG");
  }
  if (r.bit_depth() < 8) r.transform([](png_structp p) { png_set_packing(p); });
  const auto buf = r.read_rows();
  LabelGrid grid(r.width(), r.height(), std::move(taxonomy));
  std::memcpy(grid.values().data(), buf.data(), grid.size());
  const auto report = validate(grid);
  if (!report.empty()) throw IoError("label map: " + report.front());
  return grid;
}

void write_rgb_png(const fs::path& path, const ColorImage& image) {
  write_file_atomic(path, encode_rgb_png(image));
}
ColorImage read_rgb_png(const fs::path& path) { return decode_rgb_png(read_file(path)); }
void write_mask_png(const fs::path& path, const BinaryMask& mask) {
  write_file_atomic(path, encode_mask_png(mask));
}
BinaryMask read_mask_png(const fs::path& path) { return decode_mask_png(read_file(path)); }
void write_label_png(const fs::path& path, const LabelGrid& grid) {
  write_file_atomic(path, encode_label_png(grid));
}
LabelGrid read_label_png(const fs::path& path,
                         std::shared_ptr<const ClassTaxonomy> taxonomy) {
  return decode_label_png(read_file(path), std::move(taxonomy));
}

}  // namespace riskplan::io
