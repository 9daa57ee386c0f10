// Copyright 2026 The drforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "drforge/image_io.hpp"

#include <OpenEXR/ImfAttribute.h>
#include <OpenEXR/ImfChannelList.h>
#include <OpenEXR/ImfDoubleAttribute.h>
#include <OpenEXR/ImfFrameBuffer.h>
#include <OpenEXR/ImfHeader.h>
#include <OpenEXR/ImfInputFile.h>
#include <OpenEXR/ImfInputPart.h>
#include <OpenEXR/ImfMultiPartInputFile.h>
#include <OpenEXR/ImfMultiPartOutputFile.h>
#include <OpenEXR/ImfOutputFile.h>
#include <OpenEXR/ImfOutputPart.h>
#include <OpenEXR/ImfPartType.h>
#include <OpenEXR/ImfStandardAttributes.h>
#include <png.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <tuple>

#include "drforge/error.hpp"

namespace drforge {

namespace {

std::atomic<unsigned> temp_counter{0};

fs::path temp_sibling(const fs::path& path) {
  auto name = path.filename().string() + ".tmp." + std::to_string(::getpid()) + "." +
              std::to_string(temp_counter.fetch_add(1));
  return path.parent_path() / name;
}

Imf::Header make_header(const Image& image, const std::vector<std::string>& channels,
                        const std::map<std::string, double>& attributes) {
  if (image.channels != static_cast<int>(channels.size()))
    throw FormatError("exr: channel name count does not match image channels");
  if (image.width <= 0 || image.height <= 0) throw FormatError("exr: empty image");
  Imf::Header header(image.width, image.height);
  header.compression() = Imf::ZIP_COMPRESSION;
  for (const auto& name : channels) header.channels().insert(name, Imf::Channel(Imf::FLOAT));
  for (const auto& [name, value] : attributes) header.insert(name, Imf::DoubleAttribute(value));
  return header;
}

Imf::FrameBuffer output_framebuffer(const Image& image, const std::vector<std::string>& channels) {
  Imf::FrameBuffer fb;
  const std::size_t xstride = sizeof(float) * image.channels;
  const std::size_t ystride = xstride * image.width;
  for (int c = 0; c < image.channels; ++c) {
    // OpenEXR takes a non-const base pointer even for output.
    char* base = reinterpret_cast<char*>(const_cast<float*>(image.data.data() + c));
    fb.insert(channels[c], Imf::Slice(Imf::FLOAT, base, xstride, ystride));
  }
  return fb;
}

std::map<std::string, double> double_attributes(const Imf::Header& header) {
  std::map<std::string, double> out;
  for (auto it = header.begin(); it != header.end(); ++it) {
    if (const auto* attr = dynamic_cast<const Imf::DoubleAttribute*>(&it.attribute()))
      out[it.name()] = attr->value();
  }
  return out;
}

// Position of a channel suffix in conventional component order; unknown
// suffixes sort after the known ones.
int component_rank(const std::string& suffix) {
  static const char* const kOrder[] = {"R", "G", "B", "A", "r", "g", "b", "a", "X", "Y", "Z", "x", "y", "z"};
  for (int i = 0; i < static_cast<int>(std::size(kOrder)); ++i)
    if (suffix == kOrder[i]) return i;
  return static_cast<int>(std::size(kOrder));
}

// Channel names grouped by layer, components in R, G, B, A or x, y, z order
// rather than the alphabetical order the file stores.
std::vector<std::string> channel_names(const Imf::Header& header) {
  std::vector<std::string> names;
  for (auto it = header.channels().begin(); it != header.channels().end(); ++it)
    names.emplace_back(it.name());
  auto split = [](const std::string& name) {
    auto dot = name.rfind('.');
    std::string layer = dot == std::string::npos ? "" : name.substr(0, dot);
    std::string suffix = dot == std::string::npos ? name : name.substr(dot + 1);
    return std::make_tuple(layer, component_rank(suffix), suffix);
  };
  std::stable_sort(names.begin(), names.end(),
                   [&](const std::string& a, const std::string& b) { return split(a) < split(b); });
  return names;
}

template <typename Reader>
ExrImage read_with(Reader& reader, const Imf::Header& header, std::vector<std::string> wanted) {
  const Imath::Box2i dw = header.dataWindow();
  const int width = dw.max.x - dw.min.x + 1;
  const int height = dw.max.y - dw.min.y + 1;
  if (wanted.empty()) wanted = channel_names(header);
  for (const auto& name : wanted)
    if (!header.channels().findChannel(name))
      throw FormatError("exr: missing channel '" + name + "'");

  ExrImage out;
  out.image = Image(width, height, static_cast<int>(wanted.size()));
  out.channels = wanted;
  out.attributes = double_attributes(header);

  const std::size_t xstride = sizeof(float) * out.image.channels;
  const std::size_t ystride = xstride * width;
  // The frame buffer is addressed in data-window coordinates.
  char* origin = reinterpret_cast<char*>(out.image.data.data()) -
                 static_cast<std::ptrdiff_t>(dw.min.x) * xstride -
                 static_cast<std::ptrdiff_t>(dw.min.y) * ystride;
  Imf::FrameBuffer fb;
  for (std::size_t c = 0; c < wanted.size(); ++c)
    fb.insert(wanted[c], Imf::Slice(Imf::FLOAT, origin + c * sizeof(float), xstride, ystride));
  reader.setFrameBuffer(fb);
  reader.readPixels(dw.min.y, dw.max.y);
  return out;
}

}  // namespace

void write_atomically(const fs::path& path, const std::function<void(const fs::path&)>& writer) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = temp_sibling(path);
  try {
    writer(tmp);
    fs::rename(tmp, path);
  } catch (...) {
    std::error_code ec;
    fs::remove(tmp, ec);
    throw;
  }
}

void write_text_atomically(const fs::path& path, const std::string& text) {
  write_atomically(path, [&](const fs::path& tmp) {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << text;
    out.close();
    if (!out) throw IoError("failed writing " + tmp.string());
  });
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_exr(const fs::path& path, const Image& image, const std::vector<std::string>& channels,
               const std::map<std::string, double>& attributes) {
  Imf::Header header = make_header(image, channels, attributes);
  write_atomically(path, [&](const fs::path& tmp) {
    try {
      Imf::OutputFile file(tmp.c_str(), header);
      file.setFrameBuffer(output_framebuffer(image, channels));
      file.writePixels(image.height);
    } catch (const std::exception& e) {
      throw IoError("exr write failed for " + path.string() + ": " + e.what());
    }
  });
}

ExrImage read_exr_channels(const fs::path& path, const std::vector<std::string>& channels) {
  if (!fs::exists(path)) throw IoError("missing file " + path.string());
  try {
    Imf::InputFile file(path.c_str());
    return read_with(file, file.header(), channels);
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw FormatError("exr read failed for " + path.string() + ": " + e.what());
  }
}

ExrImage read_exr(const fs::path& path) { return read_exr_channels(path, {}); }

void write_exr_rgb(const fs::path& path, const Image& image) {
  write_exr(path, image, {"R", "G", "B"});
}

Image read_exr_rgb(const fs::path& path) {
  ExrImage all = read_exr(path);
  auto has = [&](const char* n) {
    return std::find(all.channels.begin(), all.channels.end(), n) != all.channels.end();
  };
  if (has("R") && has("G") && has("B")) return read_exr_channels(path, {"R", "G", "B"}).image;
  if (has("r") && has("g") && has("b")) return read_exr_channels(path, {"r", "g", "b"}).image;
  if (all.image.channels == 1) {
    Image rgb(all.image.width, all.image.height, 3);
    for (std::size_t i = 0; i < all.image.pixel_count(); ++i)
      rgb.data[3 * i] = rgb.data[3 * i + 1] = rgb.data[3 * i + 2] = all.image.data[i];
    return rgb;
  }
  throw FormatError("exr: " + path.string() + " has no RGB channels");
}

void write_exr_multipart(const fs::path& path, const std::vector<ExrPart>& parts) {
  if (parts.empty()) throw FormatError("exr: no parts to write");
  std::vector<Imf::Header> headers;
  for (const auto& part : parts) {
    Imf::Header h = make_header(part.content.image, part.content.channels, part.content.attributes);
    h.setName(part.name);
    h.setType(Imf::SCANLINEIMAGE);
    // Parts may differ in size, but they must agree on the display window.
    if (!headers.empty()) h.displayWindow() = headers.front().displayWindow();
    headers.push_back(std::move(h));
  }
  write_atomically(path, [&](const fs::path& tmp) {
    try {
      Imf::MultiPartOutputFile file(tmp.c_str(), headers.data(), static_cast<int>(headers.size()));
      for (std::size_t i = 0; i < parts.size(); ++i) {
        Imf::OutputPart out(file, static_cast<int>(i));
        const auto& content = parts[i].content;
        out.setFrameBuffer(output_framebuffer(content.image, content.channels));
        out.writePixels(content.image.height);
      }
    } catch (const std::exception& e) {
      throw IoError("exr write failed for " + path.string() + ": " + e.what());
    }
  });
}

std::vector<ExrPart> read_exr_multipart(const fs::path& path) {
  if (!fs::exists(path)) throw IoError("missing file " + path.string());
  try {
    Imf::MultiPartInputFile file(path.c_str());
    std::vector<ExrPart> parts;
    for (int i = 0; i < file.parts(); ++i) {
      Imf::InputPart in(file, i);
      const Imf::Header& header = file.header(i);
      ExrPart part;
      part.name = header.hasName() ? header.name() : std::to_string(i);
      part.content = read_with(in, header, {});
      parts.push_back(std::move(part));
    }
    return parts;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw FormatError("exr read failed for " + path.string() + ": " + e.what());
  }
}

void write_png(const fs::path& path, const Image& image) {
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.width);
  png.height = static_cast<png_uint_32>(image.height);
  switch (image.channels) {
    case 1: png.format = PNG_FORMAT_GRAY; break;
    case 3: png.format = PNG_FORMAT_RGB; break;
    case 4: png.format = PNG_FORMAT_RGBA; break;
    default: throw FormatError("png: unsupported channel count " + std::to_string(image.channels));
  }
  std::vector<png_byte> bytes(image.data.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    float v = image.data[i];
    v = std::isfinite(v) ? std::clamp(v, 0.0f, 1.0f) : 0.0f;
    bytes[i] = static_cast<png_byte>(std::lround(v * 255.0f));
  }
  write_atomically(path, [&](const fs::path& tmp) {
    if (!png_image_write_to_file(&png, tmp.c_str(), 0, bytes.data(), 0, nullptr))
      throw IoError("png write failed for " + path.string() + ": " + png.message);
  });
}

Image read_png(const fs::path& path) {
  if (!fs::exists(path)) throw IoError("missing file " + path.string());
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.c_str()))
    throw FormatError("png read failed for " + path.string() + ": " + png.message);
  int channels = 3;
  if (png.format & PNG_FORMAT_FLAG_ALPHA) {
    channels = (png.format & PNG_FORMAT_FLAG_COLOR) ? 4 : 3;
    png.format = channels == 4 ? PNG_FORMAT_RGBA : PNG_FORMAT_RGB;
  } else if (png.format & PNG_FORMAT_FLAG_COLOR) {
    png.format = PNG_FORMAT_RGB;
  } else {
    channels = 1;
    png.format = PNG_FORMAT_GRAY;
  }
  std::vector<png_byte> bytes(PNG_IMAGE_SIZE(png));
  if (!png_image_finish_read(&png, nullptr, bytes.data(), 0, nullptr)) {
    png_image_free(&png);
    throw FormatError("png decode failed for " + path.string() + ": " + png.message);
  }
  Image image(static_cast<int>(png.width), static_cast<int>(png.height), channels);
  for (std::size_t i = 0; i < image.data.size(); ++i) image.data[i] = bytes[i] / 255.0f;
  return image;
}

}  // namespace drforge
