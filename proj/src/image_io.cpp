#include "forge/image_io.hpp"

#include <cctype>
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace forge {

namespace {

void put_u32le(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32le(const std::string& in, std::size_t at) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[at + i])) << (8 * i);
    return v;
}

// Parses "P?\n<w> <h>\n<maxval>\n" (any whitespace, '#' comments) and returns the data offset.
std::size_t parse_netpbm_header(const std::string& bytes, const char* magic, int& w, int& h, int& maxval) {
    if (bytes.size() < 2 || bytes.compare(0, 2, magic) != 0)
        throw std::runtime_error(std::string("not a ") + magic + " image");
    std::size_t pos = 2;
    int fields[3];
    for (int& f : fields) {
        for (;;) {
            while (pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
            if (pos < bytes.size() && bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
                continue;
            }
            break;
        }
        std::size_t start = pos;
        while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) ++pos;
        if (start == pos) throw std::runtime_error("malformed netpbm header");
        f = std::stoi(bytes.substr(start, pos - start));
    }
    if (pos >= bytes.size()) throw std::runtime_error("truncated netpbm header");
    w = fields[0];
    h = fields[1];
    maxval = fields[2];
    return pos + 1;  // single whitespace byte after maxval
}

}  // namespace

std::string encode_ppm(int width, int height, const std::vector<float>& rgb) {
    std::string out = "P6\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
    out.reserve(out.size() + rgb.size());
    for (float v : rgb) {
        const double c = std::clamp(static_cast<double>(v), 0.0, 1.0);
        out.push_back(static_cast<char>(static_cast<std::uint8_t>(std::lround(c * 255.0))));
    }
    return out;
}

std::string encode_pgm16(int width, int height, const std::vector<std::uint16_t>& values) {
    std::string out = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n65535\n";
    out.reserve(out.size() + 2 * values.size());
    for (std::uint16_t v : values) {
        out.push_back(static_cast<char>(v >> 8));
        out.push_back(static_cast<char>(v & 0xFF));
    }
    return out;
}

std::string encode_depth(int width, int height, const std::vector<float>& depth) {
    std::string out = "DEPTHF32";
    put_u32le(out, static_cast<std::uint32_t>(width));
    put_u32le(out, static_cast<std::uint32_t>(height));
    out.reserve(out.size() + 4 * depth.size());
    for (float v : depth) put_u32le(out, std::bit_cast<std::uint32_t>(v));
    return out;
}

Mask16 decode_pgm16(const std::string& bytes) {
    Mask16 m;
    int maxval = 0;
    std::size_t pos = parse_netpbm_header(bytes, "P5", m.width, m.height, maxval);
    if (maxval != 65535) throw std::runtime_error("expected a 16-bit PGM");
    const std::size_t n = static_cast<std::size_t>(m.width) * m.height;
    if (bytes.size() < pos + 2 * n) throw std::runtime_error("truncated PGM data");
    m.values.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        m.values[i] = static_cast<std::uint16_t>((static_cast<unsigned char>(bytes[pos + 2 * i]) << 8) |
                                                 static_cast<unsigned char>(bytes[pos + 2 * i + 1]));
    return m;
}

Rgb8Image decode_ppm(const std::string& bytes) {
    Rgb8Image img;
    int maxval = 0;
    std::size_t pos = parse_netpbm_header(bytes, "P6", img.width, img.height, maxval);
    if (maxval != 255) throw std::runtime_error("expected an 8-bit PPM");
    const std::size_t n = static_cast<std::size_t>(img.width) * img.height * 3;
    if (bytes.size() < pos + n) throw std::runtime_error("truncated PPM data");
    img.values.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.begin() + static_cast<std::ptrdiff_t>(pos + n));
    return img;
}

DepthImage decode_depth(const std::string& bytes) {
    if (bytes.size() < 16 || bytes.compare(0, 8, "DEPTHF32") != 0) throw std::runtime_error("not a DEPTHF32 file");
    DepthImage d;
    d.width = static_cast<int>(get_u32le(bytes, 8));
    d.height = static_cast<int>(get_u32le(bytes, 12));
    const std::size_t n = static_cast<std::size_t>(d.width) * d.height;
    if (bytes.size() != 16 + 4 * n) throw std::runtime_error("DEPTHF32 size mismatch");
    d.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) d.values[i] = std::bit_cast<float>(get_u32le(bytes, 16 + 4 * i));
    return d;
}

void write_bytes(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("short write to " + path.string());
}

}  // namespace forge
