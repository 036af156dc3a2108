// Copyright (c) the jfactor authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef JFACTOR_IMAGE_IO_HPP_
#define JFACTOR_IMAGE_IO_HPP_

#include <filesystem>
#include <vector>

#include "jfactor/image.hpp"

namespace jfactor {

// Decodes PNG, BMP (8/24/32-bit uncompressed) and binary or ASCII PGM/PPM.
// The container is detected from the file's magic bytes. Alpha is dropped.
// Palette and 8-bit BMPs whose palette is gray decode as gray.
// Throws IoError on unreadable or malformed files.
PixelImage read_image(const std::filesystem::path& path);

// Writes an 8-bit PNG. Output bytes are a deterministic function of the image.
void write_png(const std::filesystem::path& path, const PixelImage& image);

// Readable image files (by extension) directly inside `dir`, sorted by path.
std::vector<std::filesystem::path> list_images(
    const std::filesystem::path& dir);

bool has_image_extension(const std::filesystem::path& path);

}  // namespace jfactor

#endif  // JFACTOR_IMAGE_IO_HPP_
