/*
 * Copyright 2026 The cxrcl Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "cxrcl/imaging/image.hpp"

namespace cxrcl {

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

// Decodes 8/16-bit PNG (gray, gray+alpha, RGB, RGBA) and binary/ASCII PGM.
// Colour inputs are reduced to the mean of their channels. Failures raise
// kValidation so that service callers can report a bad upload.
Image decode_image(std::span<const std::uint8_t> bytes);
Image load_image(const std::filesystem::path& path);

// 8-bit encoders; pixels are quantised with round(p * 255).
std::vector<std::uint8_t> encode_png(const Image& img);
std::vector<std::uint8_t> encode_pgm(const Image& img);

/// Picks the encoder from the extension (.png or .pgm).
void save_image(const Image& img, const std::filesystem::path& path);

}  // namespace cxrcl
