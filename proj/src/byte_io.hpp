#pragma once

// Little-endian byte buffer writer / bounds-checked reader.

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>
#include <vector>

#include "embcomp/error.hpp"

namespace embcomp::detail {

class ByteWriter {
public:
    void bytes(const void* p, std::size_t n) {
        const auto* b = static_cast<const std::uint8_t*>(p);
        buf_.insert(buf_.end(), b, b + n);
    }
    void text(std::string_view s) { bytes(s.data(), s.size()); }
    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u16(std::uint16_t v) { le(v, 2); }
    void u32(std::uint32_t v) { le(v, 4); }
    void u64(std::uint64_t v) { le(v, 8); }
    void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

    std::vector<std::uint8_t>& buffer() { return buf_; }

private:
    void le(std::uint64_t v, int n) {
        for (int i = 0; i < n; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    std::vector<std::uint8_t> buf_;
};

class ByteReader {
public:
    ByteReader(const std::vector<std::uint8_t>& b, std::string what) : b_(b), what_(std::move(what)) {}

    std::size_t remaining() const { return b_.size() - pos_; }
    std::size_t position() const { return pos_; }

    const std::uint8_t* take(std::size_t n, std::string_view field) {
        if (remaining() < n) {
            throw FormatError(what_ + ": truncated " + std::string(field) + " (expected " + std::to_string(n) +
                              " bytes, " + std::to_string(remaining()) + " available)");
        }
        const std::uint8_t* p = b_.data() + pos_;
        pos_ += n;
        return p;
    }
    std::uint8_t u8(std::string_view f) { return *take(1, f); }
    std::uint16_t u16(std::string_view f) { return static_cast<std::uint16_t>(le(2, f)); }
    std::uint32_t u32(std::string_view f) { return static_cast<std::uint32_t>(le(4, f)); }
    std::uint64_t u64(std::string_view f) { return le(8, f); }
    float f32(std::string_view f) { return std::bit_cast<float>(u32(f)); }
    double f64(std::string_view f) { return std::bit_cast<double>(u64(f)); }

private:
    std::uint64_t le(int n, std::string_view f) {
        const std::uint8_t* p = take(static_cast<std::size_t>(n), f);
        std::uint64_t v = 0;
        for (int i = 0; i < n; ++i) v |= std::uint64_t{p[i]} << (8 * i);
        return v;
    }
    const std::vector<std::uint8_t>& b_;
    std::size_t pos_ = 0;
    std::string what_;
};

std::vector<std::uint8_t> read_binary_file(const std::string& path);
void write_binary_file(const std::string& path, const std::vector<std::uint8_t>& bytes);

}  // namespace embcomp::detail
