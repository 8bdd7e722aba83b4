#pragma once

// Sample file I/O. Two formats: binary portable graymap (magic "P5",
// maxval <= 255, values scaled by maxval on read) and plain numeric text
// (one value per line, read verbatim).

#include <agedict/types.hpp>

#include <filesystem>

namespace agedict {

struct SampleImage {
  Index width = 0;   // 0 when the source was a numeric text file
  Index height = 0;
  Vector values;

  bool is_image() const { return width > 0; }
};

SampleImage read_sample(const std::filesystem::path& path);

void write_pgm(const std::filesystem::path& path, const Vector& values, Index width, Index height);
void write_numeric_text(const std::filesystem::path& path, const Vector& values);

}  // namespace agedict
