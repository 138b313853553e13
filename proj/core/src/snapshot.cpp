#include "kgnr/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "kgnr/errors.hpp"

namespace kgnr {

namespace {

constexpr char kMagic[6] = {'K', 'G', 'N', 'R', '1', '\0'};
constexpr std::uint16_t kVersion = 1;

void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(char(v & 0xff));
    out.push_back(char((v >> 8) & 0xff));
}

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(char((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double d) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(d);
    for (int i = 0; i < 8; ++i) out.push_back(char((bits >> (8 * i)) & 0xff));
}

class Reader {
public:
    Reader(const std::string& data, const std::string& path) : data_(data), path_(path) {}

    void bytes(char* dst, std::size_t count) {
        if (pos_ + count > data_.size())
            throw ValidationError(path_ + ": truncated snapshot");
        std::memcpy(dst, data_.data() + pos_, count);
        pos_ += count;
    }
    std::uint16_t u16() {
        unsigned char b[2];
        bytes(reinterpret_cast<char*>(b), 2);
        return std::uint16_t(b[0] | (b[1] << 8));
    }
    std::uint32_t u32() {
        unsigned char b[4];
        bytes(reinterpret_cast<char*>(b), 4);
        return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) |
               (std::uint32_t(b[2]) << 16) | (std::uint32_t(b[3]) << 24);
    }
    double f64() {
        unsigned char b[8];
        bytes(reinterpret_cast<char*>(b), 8);
        std::uint64_t bits = 0;
        for (int i = 0; i < 8; ++i) bits |= std::uint64_t(b[i]) << (8 * i);
        return std::bit_cast<double>(bits);
    }
    std::uint8_t u8() {
        unsigned char b;
        bytes(reinterpret_cast<char*>(&b), 1);
        return b;
    }
    bool exhausted() const { return pos_ == data_.size(); }

private:
    const std::string& data_;
    std::string path_;
    std::size_t pos_ = 0;
};

} // namespace

void write_snapshot(const std::string& path, const Field& field, double time, double epsilon) {
    std::string out;
    const int n = field.n();
    out.reserve(6 + 2 + 4 + 3 * 8 + 1 + field.size() * (field.is_real() ? 8 : 16));
    out.append(kMagic, 6);
    put_u16(out, kVersion);
    put_u32(out, std::uint32_t(n));
    put_f64(out, field.grid()->length());
    put_f64(out, time);
    put_f64(out, epsilon);
    out.push_back(field.is_real() ? char(0) : char(1));
    for (const Complex& s : field.samples()) {
        put_f64(out, s.real());
        if (!field.is_real()) put_f64(out, s.imag());
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw ValidationError("cannot open " + path + " for writing");
    f.write(out.data(), std::streamsize(out.size()));
    if (!f) throw ValidationError("failed writing " + path);
}

Snapshot read_snapshot(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ValidationError("cannot open " + path);
    std::string data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    Reader r(data, path);

    char magic[6];
    r.bytes(magic, 6);
    if (std::memcmp(magic, kMagic, 6) != 0)
        throw ValidationError(path + ": not a KGNR1 snapshot");
    std::uint16_t version = r.u16();
    if (version != kVersion)
        throw ValidationError(path + ": unsupported snapshot version");
    std::uint32_t n = r.u32();
    double length = r.f64();
    double time = r.f64();
    double epsilon = r.f64();
    std::uint8_t kind_byte = r.u8();
    if (kind_byte > 1) throw ValidationError(path + ": invalid field kind");
    const bool real = kind_byte == 0;

    GridPtr grid = make_grid(int(n), length);
    std::vector<Complex> samples(grid->size());
    for (Complex& s : samples) {
        double re = r.f64();
        double im = real ? 0.0 : r.f64();
        s = Complex(re, im);
    }
    if (!r.exhausted()) throw ValidationError(path + ": trailing bytes in snapshot");
    Field field(grid, real ? Field::Kind::Real : Field::Kind::Complex, std::move(samples));
    return Snapshot{std::move(field), time, epsilon};
}

} // namespace kgnr
