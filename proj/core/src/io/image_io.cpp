#include "odibench/io/image_io.hpp"

#include <jpeglib.h>
#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>

#include "odibench/errors.hpp"

namespace odibench::io {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::string& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw IoError("cannot open " + path);
  return f;
}

struct MemReader {
  const std::vector<std::uint8_t>* bytes;
  std::size_t pos = 0;
};

void png_mem_read(png_structp png, png_bytep out, png_size_t len) {
  auto* r = static_cast<MemReader*>(png_get_io_ptr(png));
  if (r->pos + len > r->bytes->size()) {
    png_error(png, "png read past end of buffer");
  }
  std::memcpy(out, r->bytes->data() + r->pos, len);
  r->pos += len;
}

void png_mem_write(png_structp png, png_bytep data, png_size_t len) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + len);
}

void png_mem_flush(png_structp) {}

geom::Image read_png_struct(png_structp png, png_infop info) {
  png_read_info(png, info);

  png_uint_32 w = png_get_image_width(png, info);
  png_uint_32 h = png_get_image_height(png, info);
  int bit_depth = png_get_bit_depth(png, info);
  int color_type = png_get_color_type(png, info);

  if (bit_depth == 16) png_set_strip_16(png);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color_type == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png);
  png_read_update_info(png, info);

  int channels = png_get_channels(png, info);
  if (channels == 2) channels = 4;  // gray+alpha was promoted above

  geom::Image img(static_cast<int>(w), static_cast<int>(h), channels);
  std::vector<png_bytep> rows(h);
  for (png_uint_32 y = 0; y < h; ++y) {
    rows[y] = img.pixels.data() + static_cast<std::size_t>(y) * w * channels;
  }
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  return img;
}

geom::Image load_png_file(const std::string& path) {
  FilePtr f = open_file(path, "rb");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("not a valid PNG: " + path);
  }
  png_init_io(png, f.get());
  geom::Image img = read_png_struct(png, info);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

struct JpegErrorJmp {
  jpeg_error_mgr pub;
  jmp_buf env;
  char message[JMSG_LENGTH_MAX] = {};
};

void jpeg_error_exit_jmp(j_common_ptr c) {
  auto* err = reinterpret_cast<JpegErrorJmp*>(c->err);
  (*c->err->format_message)(c, err->message);
  longjmp(err->env, 1);
}

geom::Image load_jpeg_file(const std::string& path) {
  FilePtr f = open_file(path, "rb");
  jpeg_decompress_struct cinfo{};
  JpegErrorJmp jerr{};
  cinfo.err = jpeg_std_error(&jerr.pub);
  jerr.pub.error_exit = jpeg_error_exit_jmp;

  geom::Image img;
  if (setjmp(jerr.env)) {
    jpeg_destroy_decompress(&cinfo);
    throw IoError("jpeg decode (" + path + "): " + jerr.message);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_stdio_src(&cinfo, f.get());
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);

  img = geom::Image(static_cast<int>(cinfo.output_width), static_cast<int>(cinfo.output_height),
                    3);
  std::size_t stride = static_cast<std::size_t>(img.width) * 3;
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = img.pixels.data() + cinfo.output_scanline * stride;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return img;
}

int png_color_type_for(int channels) {
  switch (channels) {
    case 1: return PNG_COLOR_TYPE_GRAY;
    case 3: return PNG_COLOR_TYPE_RGB;
    case 4: return PNG_COLOR_TYPE_RGBA;
    default: throw ValidationError("unsupported channel count for PNG");
  }
}

void write_png_struct(png_structp png, png_infop info, const geom::Image& img,
                      const std::vector<PngText>& text) {
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width),
               static_cast<png_uint_32>(img.height), 8, png_color_type_for(img.channels),
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);

  std::vector<png_text> chunks(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    chunks[i] = png_text{};
    chunks[i].compression = PNG_TEXT_COMPRESSION_NONE;
    chunks[i].key = const_cast<char*>(text[i].first.c_str());
    chunks[i].text = const_cast<char*>(text[i].second.c_str());
    chunks[i].text_length = text[i].second.size();
  }
  if (!chunks.empty()) png_set_text(png, info, chunks.data(), static_cast<int>(chunks.size()));

  png_write_info(png, info);
  std::size_t stride = static_cast<std::size_t>(img.width) * img.channels;
  for (int y = 0; y < img.height; ++y) {
    png_write_row(png, const_cast<png_bytep>(img.pixels.data() + y * stride));
  }
  png_write_end(png, nullptr);
}

bool has_png_magic(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  unsigned char magic[8] = {};
  in.read(reinterpret_cast<char*>(magic), 8);
  static const unsigned char kPng[8] = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
  return in.gcount() == 8 && std::memcmp(magic, kPng, 8) == 0;
}

}  // namespace

geom::Image load_image(const std::string& path) {
  if (has_png_magic(path)) return load_png_file(path);
  return load_jpeg_file(path);
}

geom::ErpImage load_erp(const std::string& path) { return geom::ErpImage(load_image(path)); }

void save_png(const std::string& path, const geom::Image& img, const std::vector<PngText>& text) {
  if (img.empty()) throw ValidationError("refusing to write an empty image");
  FilePtr f = open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("PNG write failed: " + path);
  }
  png_init_io(png, f.get());
  write_png_struct(png, info, img, text);
  png_destroy_write_struct(&png, &info);
}

void save_jpeg(const std::string& path, const geom::Image& img, int quality) {
  if (img.channels != 3) throw ValidationError("JPEG output expects a 3-channel image");
  FilePtr f = open_file(path, "wb");
  jpeg_compress_struct cinfo{};
  JpegErrorJmp jerr{};
  cinfo.err = jpeg_std_error(&jerr.pub);
  jerr.pub.error_exit = jpeg_error_exit_jmp;

  if (setjmp(jerr.env)) {
    jpeg_destroy_compress(&cinfo);
    throw IoError("jpeg encode (" + path + "): " + jerr.message);
  }
  jpeg_create_compress(&cinfo);
  jpeg_stdio_dest(&cinfo, f.get());
  cinfo.image_width = static_cast<JDIMENSION>(img.width);
  cinfo.image_height = static_cast<JDIMENSION>(img.height);
  cinfo.input_components = 3;
  cinfo.in_color_space = JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE);
  jpeg_start_compress(&cinfo, TRUE);
  std::size_t stride = static_cast<std::size_t>(img.width) * 3;
  while (cinfo.next_scanline < cinfo.image_height) {
    JSAMPROW row = const_cast<JSAMPROW>(img.pixels.data() + cinfo.next_scanline * stride);
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);
}

std::vector<PngText> read_png_text(const std::string& path) {
  FilePtr f = open_file(path, "rb");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("not a valid PNG: " + path);
  }
  png_init_io(png, f.get());
  png_read_info(png, info);

  png_textp chunks = nullptr;
  int count = 0;
  png_get_text(png, info, &chunks, &count);
  std::vector<PngText> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    out.emplace_back(chunks[i].key ? chunks[i].key : "",
                     chunks[i].text ? std::string(chunks[i].text, chunks[i].text_length) : "");
  }
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

std::vector<std::uint8_t> encode_png(const geom::Image& img) {
  if (img.empty()) throw ValidationError("refusing to encode an empty image");
  std::vector<std::uint8_t> out;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("in-memory PNG encode failed");
  }
  png_set_write_fn(png, &out, png_mem_write, png_mem_flush);
  write_png_struct(png, info, img, {});
  png_destroy_write_struct(&png, &info);
  return out;
}

geom::Image decode_png(const std::vector<std::uint8_t>& bytes) {
  MemReader reader{&bytes};
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("in-memory PNG decode failed");
  }
  png_set_read_fn(png, &reader, png_mem_read);
  geom::Image img = read_png_struct(png, info);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

}  // namespace odibench::io
