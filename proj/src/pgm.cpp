#include <agedict/pgm.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

namespace agedict {

namespace {

// Next character after whitespace and '#' comments, -1 on EOF.
int next_token_char(std::istream& in) {
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (!std::isspace(c)) {
      return c;
    }
    c = in.get();
  }
  return -1;
}

long read_pnm_number(std::istream& in, const std::string& path) {
  int c = next_token_char(in);
  if (c < 0 || !std::isdigit(c)) throw Error("graymap header parse failure: " + path);
  long value = 0;
  while (c != EOF && std::isdigit(c)) {
    value = value * 10 + (c - '0');
    if (value > 1'000'000'000L) throw Error("graymap header value out of range: " + path);
    c = in.get();
  }
  if (c != EOF) in.unget();
  return value;
}

SampleImage read_pgm(std::istream& in, const std::string& path) {
  const long width = read_pnm_number(in, path);
  const long height = read_pnm_number(in, path);
  const long maxval = read_pnm_number(in, path);
  if (width < 1 || height < 1) throw Error("graymap with empty raster: " + path);
  if (maxval < 1 || maxval > 255) throw Error("unsupported graymap maxval: " + path);
  in.get();  // single whitespace byte separating header and raster

  const Index count = static_cast<Index>(width) * static_cast<Index>(height);
  std::vector<unsigned char> raw(static_cast<std::size_t>(count));
  in.read(reinterpret_cast<char*>(raw.data()), count);
  if (in.gcount() != count) throw Error("unexpected end of file: " + path);

  SampleImage out;
  out.width = width;
  out.height = height;
  out.values.resize(count);
  const double scale = 1.0 / static_cast<double>(maxval);
  for (Index i = 0; i < count; ++i) out.values(i) = raw[static_cast<std::size_t>(i)] * scale;
  return out;
}

SampleImage read_numeric_text(std::istream& in, const std::string& path) {
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    const auto begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos) continue;
    const auto end = line.find_last_not_of(" \t\r");
    const std::string token = line.substr(begin, end - begin + 1);
    char* parsed_end = nullptr;
    const double v = std::strtod(token.c_str(), &parsed_end);
    if (parsed_end == token.c_str() || *parsed_end != '\0')
      throw Error("malformed numeric sample line in " + path + ": '" + token + "'");
    if (!std::isfinite(v)) throw Error("non-finite value in " + path);
    values.push_back(v);
  }
  if (values.empty()) throw Error("empty numeric sample file: " + path);
  SampleImage out;
  out.values = Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
  return out;
}

}  // namespace

SampleImage read_sample(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("missing sample file: " + path.string());
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (in.gcount() == 2 && magic[0] == 'P' && magic[1] == '5') {
    return read_pgm(in, path.string());
  }
  in.clear();
  in.seekg(0);
  return read_numeric_text(in, path.string());
}

void write_pgm(const std::filesystem::path& path, const Vector& values, Index width,
               Index height) {
  if (width < 1 || height < 1 || width * height != values.size())
    throw Error("graymap shape mismatch for " + path.string());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path.string());
  out << "P5\n" << width << " " << height << "\n255\n";
  std::vector<unsigned char> raw(static_cast<std::size_t>(values.size()));
  for (Index i = 0; i < values.size(); ++i) {
    raw[static_cast<std::size_t>(i)] =
        static_cast<unsigned char>(std::lround(clamp01(values(i)) * 255.0));
  }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!out) throw Error("write failure: " + path.string());
}

void write_numeric_text(const std::filesystem::path& path, const Vector& values) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path.string());
  char buf[64];
  for (Index i = 0; i < values.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g\n", values(i));
    out << buf;
  }
  if (!out) throw Error("write failure: " + path.string());
}

}  // namespace agedict
