#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

// Little-endian binary file helpers for the checkpoint and index containers.
namespace ctsr::binio {

class Writer {
public:
    explicit Writer(const std::string& path) : path_(path), out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot write '" + path + "'");
    }

    void bytes(const void* p, std::size_t n) {
        out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
    }
    void u8(std::uint8_t v) { bytes(&v, 1); }
    void u32(std::uint32_t v) {
        std::uint8_t b[4] = {static_cast<std::uint8_t>(v), static_cast<std::uint8_t>(v >> 8),
                             static_cast<std::uint8_t>(v >> 16), static_cast<std::uint8_t>(v >> 24)};
        bytes(b, 4);
    }
    void u64(std::uint64_t v) {
        std::uint8_t b[8];
        for (int i = 0; i < 8; ++i) b[i] = static_cast<std::uint8_t>(v >> (8 * i));
        bytes(b, 8);
    }
    void f32(float v) {
        std::uint32_t bits;
        std::memcpy(&bits, &v, 4);
        u32(bits);
    }
    void f32_array(const float* p, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) f32(p[i]);
    }
    void str(const std::string& s) {
        u32(static_cast<std::uint32_t>(s.size()));
        bytes(s.data(), s.size());
    }
    void close() {
        out_.close();
        if (!out_) throw std::runtime_error("write failed for '" + path_ + "'");
    }

private:
    std::string path_;
    std::ofstream out_;
};

class Reader {
public:
    explicit Reader(const std::string& path) : path_(path), in_(path, std::ios::binary) {
        if (!in_) throw std::runtime_error("cannot open '" + path + "'");
    }

    void bytes(void* p, std::size_t n) {
        in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in_.gcount()) != n)
            throw std::runtime_error("truncated file '" + path_ + "'");
    }
    std::uint8_t u8() {
        std::uint8_t v;
        bytes(&v, 1);
        return v;
    }
    std::uint32_t u32() {
        std::uint8_t b[4];
        bytes(b, 4);
        return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
               (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
    }
    std::uint64_t u64() {
        std::uint64_t v = 0;
        std::uint8_t b[8];
        bytes(b, 8);
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
        return v;
    }
    float f32() {
        const std::uint32_t bits = u32();
        float v;
        std::memcpy(&v, &bits, 4);
        return v;
    }
    void f32_array(float* p, std::size_t n) {
        std::vector<std::uint8_t> buf(n * 4);
        bytes(buf.data(), buf.size());
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint32_t bits = static_cast<std::uint32_t>(buf[4 * i]) |
                                       (static_cast<std::uint32_t>(buf[4 * i + 1]) << 8) |
                                       (static_cast<std::uint32_t>(buf[4 * i + 2]) << 16) |
                                       (static_cast<std::uint32_t>(buf[4 * i + 3]) << 24);
            std::memcpy(&p[i], &bits, 4);
        }
    }
    std::string str(std::uint32_t max_len = 1u << 20) {
        const std::uint32_t n = u32();
        if (n > max_len) throw std::runtime_error("implausible string length in '" + path_ + "'");
        std::string s(n, '\0');
        if (n) bytes(s.data(), n);
        return s;
    }
    bool at_eof() {
        in_.peek();
        return in_.eof();
    }
    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::ifstream in_;
};

}  // namespace ctsr::binio
