#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "kgnr/errors.hpp"
#include "kgnr/field.hpp"
#include "kgnr/grid.hpp"
#include "kgnr/snapshot.hpp"

using namespace kgnr;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("kgnr_snap_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

Field random_field(GridPtr grid, Field::Kind kind, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Complex> s(grid->size());
    for (Complex& v : s)
        v = kind == Field::Kind::Real ? Complex(u(rng), 0.0) : Complex(u(rng), u(rng));
    return Field(grid, kind, std::move(s));
}

} // namespace

TEST_CASE("snapshot round trip preserves every byte of the payload") {
    TempDir tmp;
    GridPtr g = make_grid(16, 3.75);

    for (Field::Kind kind : {Field::Kind::Real, Field::Kind::Complex}) {
        Field f = random_field(g, kind, kind == Field::Kind::Real ? 1u : 2u);
        fs::path file = tmp.path / (kind == Field::Kind::Real ? "r.kgnr" : "c.kgnr");
        write_snapshot(file.string(), f, 0.625, 0.05);

        Snapshot back = read_snapshot(file.string());
        CHECK(back.time == 0.625);
        CHECK(back.epsilon == 0.05);
        CHECK(back.field.kind() == kind);
        CHECK(back.field.grid()->n() == g->n());
        CHECK(back.field.grid()->length() == g->length());
        for (std::size_t i = 0; i < f.size(); ++i) {
            CHECK(back.field.samples()[i].real() == f.samples()[i].real());
            CHECK(back.field.samples()[i].imag() == f.samples()[i].imag());
        }
    }
}

TEST_CASE("snapshot rejects malformed files") {
    TempDir tmp;
    GridPtr g = make_grid(8, 1.0);
    Field f = random_field(g, Field::Kind::Real, 3);
    fs::path good = tmp.path / "good.kgnr";
    write_snapshot(good.string(), f, 0.0, 0.1);

    SUBCASE("missing file") {
        CHECK_THROWS_AS(read_snapshot((tmp.path / "absent.kgnr").string()), ValidationError);
    }

    SUBCASE("bad magic") {
        fs::path bad = tmp.path / "magic.kgnr";
        std::ifstream in(good, std::ios::binary);
        std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        bytes[0] = 'X';
        std::ofstream(bad, std::ios::binary).write(bytes.data(), std::streamsize(bytes.size()));
        CHECK_THROWS_AS(read_snapshot(bad.string()), ValidationError);
    }

    SUBCASE("unsupported version") {
        fs::path bad = tmp.path / "version.kgnr";
        std::ifstream in(good, std::ios::binary);
        std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        bytes[6] = 9; // version u16 little-endian low byte
        std::ofstream(bad, std::ios::binary).write(bytes.data(), std::streamsize(bytes.size()));
        CHECK_THROWS_AS(read_snapshot(bad.string()), ValidationError);
    }

    SUBCASE("truncated payload") {
        fs::path bad = tmp.path / "short.kgnr";
        std::ifstream in(good, std::ios::binary);
        std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        bytes.resize(bytes.size() - 5);
        std::ofstream(bad, std::ios::binary).write(bytes.data(), std::streamsize(bytes.size()));
        CHECK_THROWS_AS(read_snapshot(bad.string()), ValidationError);
    }

    SUBCASE("trailing garbage") {
        fs::path bad = tmp.path / "long.kgnr";
        std::ifstream in(good, std::ios::binary);
        std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        bytes += "extra";
        std::ofstream(bad, std::ios::binary).write(bytes.data(), std::streamsize(bytes.size()));
        CHECK_THROWS_AS(read_snapshot(bad.string()), ValidationError);
    }
}

TEST_CASE("snapshot stores non-trivial metadata exactly") {
    TempDir tmp;
    GridPtr g = make_grid(8, 16.0 * 3.141592653589793);
    Field f = random_field(g, Field::Kind::Complex, 4);
    double t = 0.1 + 0.2; // not exactly representable sum
    double eps = 1.0 / 3.0;
    fs::path file = tmp.path / "meta.kgnr";
    write_snapshot(file.string(), f, t, eps);
    Snapshot back = read_snapshot(file.string());
    CHECK(back.time == t);
    CHECK(back.epsilon == eps);
    CHECK(back.field.grid()->length() == g->length());
}
