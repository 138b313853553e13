#pragma once

#include <string>

#include "kgnr/field.hpp"

namespace kgnr {

// KGNR1 binary snapshot, little-endian:
//   magic   6 bytes  "KGNR1\0"
//   version u16      = 1
//   n       u32      samples per dimension
//   length  f64      torus side length
//   time    f64
//   epsilon f64      0 when not applicable
//   kind    u8       0 = real, 1 = complex
//   payload n*n f64 (real) or n*n (f64, f64) pairs (complex), row-major
struct Snapshot {
    Field field;
    double time = 0.0;
    double epsilon = 0.0;
};

void write_snapshot(const std::string& path, const Field& field, double time, double epsilon);
Snapshot read_snapshot(const std::string& path);

} // namespace kgnr
