// Copyright 2026 The drforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "drforge/image.hpp"

namespace drforge {

namespace fs = std::filesystem;

// Runs `writer` against a sibling temporary path and renames it over `path`
// on success, so readers never observe a partially written artifact.
void write_atomically(const fs::path& path, const std::function<void(const fs::path&)>& writer);
void write_text_atomically(const fs::path& path, const std::string& text);
std::string read_text(const fs::path& path);

struct ExrImage {
  Image image;
  std::vector<std::string> channels;         // one name per image channel
  std::map<std::string, double> attributes;  // extra double header attributes
};

// Scanline EXR, 32-bit float channels, ZIP compression.
void write_exr(const fs::path& path, const Image& image, const std::vector<std::string>& channels,
               const std::map<std::string, double>& attributes = {});
ExrImage read_exr(const fs::path& path);
// Reads the named channels (in the given order); missing channels are a format error.
ExrImage read_exr_channels(const fs::path& path, const std::vector<std::string>& channels);

// RGB helpers using the conventional "R", "G", "B" channel names.
void write_exr_rgb(const fs::path& path, const Image& image);
Image read_exr_rgb(const fs::path& path);

struct ExrPart {
  std::string name;
  ExrImage content;
};
void write_exr_multipart(const fs::path& path, const std::vector<ExrPart>& parts);
std::vector<ExrPart> read_exr_multipart(const fs::path& path);

// 8-bit PNG with 1, 3 or 4 channels. Values are written as-is (clamped to
// [0,1] and quantized); any transfer curve is the caller's business.
void write_png(const fs::path& path, const Image& image);
Image read_png(const fs::path& path);

}  // namespace drforge
