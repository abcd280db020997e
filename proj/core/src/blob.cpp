#include "psa/blob.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace psa::blob {

namespace {

constexpr std::array<char, 4> kMagic = {'P', 'S', 'A', 'G'};

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

std::uint16_t get_u16(const std::uint8_t* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t get_u32(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_header(std::vector<std::uint8_t>& out, std::uint16_t dtype, std::uint32_t h, std::uint32_t w) {
    out.insert(out.end(), kMagic.begin(), kMagic.end());
    put_u16(out, kVersion);
    put_u16(out, dtype);
    put_u32(out, h);
    put_u32(out, w);
}

struct Header {
    std::uint16_t dtype;
    std::uint32_t height;
    std::uint32_t width;
};

Header parse_header(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 16) throw std::runtime_error("blob: truncated header");
    if (std::memcmp(bytes.data(), kMagic.data(), 4) != 0) throw std::runtime_error("blob: bad magic");
    if (get_u16(bytes.data() + 4) != kVersion) throw std::runtime_error("blob: unsupported version");
    Header h;
    h.dtype = get_u16(bytes.data() + 6);
    h.height = get_u32(bytes.data() + 8);
    h.width = get_u32(bytes.data() + 12);
    return h;
}

}  // namespace

std::uint32_t crc32(const void* data, std::size_t n, std::uint32_t crc) {
    static const auto table = [] {
        std::array<std::uint32_t, 256> t{};
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int k = 0; k < 8; ++k) c = (c & 1) ? (0xEDB88320u ^ (c >> 1)) : (c >> 1);
            t[i] = c;
        }
        return t;
    }();
    const auto* p = static_cast<const std::uint8_t*>(data);
    std::uint32_t c = crc ^ 0xFFFFFFFFu;
    for (std::size_t i = 0; i < n; ++i) c = table[(c ^ p[i]) & 0xFF] ^ (c >> 8);
    return c ^ 0xFFFFFFFFu;
}

std::vector<std::uint8_t> encode_grid(const Grid& g) {
    g.validate();
    std::vector<std::uint8_t> out;
    out.reserve(16 + g.size() * 4);
    put_header(out, kDtypeF32, static_cast<std::uint32_t>(g.height()),
               static_cast<std::uint32_t>(g.width()));
    for (float v : g.values()) {
        std::uint32_t bits;
        std::memcpy(&bits, &v, 4);
        put_u32(out, bits);
    }
    return out;
}

Grid decode_grid(const std::vector<std::uint8_t>& bytes) {
    const Header h = parse_header(bytes);
    if (h.dtype != kDtypeF32) throw std::runtime_error("blob: expected f32 dtype");
    const std::size_t n = static_cast<std::size_t>(h.height) * h.width;
    if (bytes.size() != 16 + n * 4) throw std::runtime_error("blob: truncated payload");
    std::vector<float> values(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint32_t bits = get_u32(bytes.data() + 16 + i * 4);
        std::memcpy(&values[i], &bits, 4);
    }
    return Grid(static_cast<int>(h.height), static_cast<int>(h.width), std::move(values));
}

std::vector<std::uint8_t> encode_f64(const std::vector<double>& values) {
    std::vector<std::uint8_t> out;
    out.reserve(16 + values.size() * 8);
    put_header(out, kDtypeF64, 1, static_cast<std::uint32_t>(values.size()));
    for (double v : values) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, 8);
        for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>((bits >> (8 * i)) & 0xFF));
    }
    return out;
}

std::vector<double> decode_f64(const std::vector<std::uint8_t>& bytes) {
    const Header h = parse_header(bytes);
    if (h.dtype != kDtypeF64) throw std::runtime_error("blob: expected f64 dtype");
    const std::size_t n = static_cast<std::size_t>(h.height) * h.width;
    if (bytes.size() != 16 + n * 8) throw std::runtime_error("blob: truncated payload");
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t bits = 0;
        for (int k = 7; k >= 0; --k) bits = (bits << 8) | bytes[16 + i * 8 + k];
        std::memcpy(&values[i], &bits, 8);
    }
    return values;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + file.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return bytes;
}

void write_file(const std::filesystem::path& file, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + file.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed: " + file.string());
}

std::uint32_t write_grid(const std::filesystem::path& file, const Grid& g) {
    const auto bytes = encode_grid(g);
    write_file(file, bytes);
    return crc32(bytes.data(), bytes.size());
}

std::uint32_t write_f64(const std::filesystem::path& file, const std::vector<double>& values) {
    const auto bytes = encode_f64(values);
    write_file(file, bytes);
    return crc32(bytes.data(), bytes.size());
}

namespace {

std::vector<std::uint8_t> read_checked(const std::filesystem::path& file, std::uint32_t expected_crc) {
    auto bytes = read_file(file);
    if (crc32(bytes.data(), bytes.size()) != expected_crc) {
        throw std::runtime_error("blob: checksum mismatch: " + file.string());
    }
    return bytes;
}

}  // namespace

Grid read_grid(const std::filesystem::path& file) {
    return decode_grid(read_file(file));
}

Grid read_grid(const std::filesystem::path& file, std::uint32_t expected_crc) {
    return decode_grid(read_checked(file, expected_crc));
}

std::vector<double> read_f64(const std::filesystem::path& file) {
    return decode_f64(read_file(file));
}

std::vector<double> read_f64(const std::filesystem::path& file, std::uint32_t expected_crc) {
    return decode_f64(read_checked(file, expected_crc));
}

}  // namespace psa::blob
