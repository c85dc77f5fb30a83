#pragma once

#include <string>

#include "fracrit/grid.hpp"

namespace fracrit {

// Binary field snapshot, all integers and floats little-endian:
//
//   offset  size  content
//   0       4     magic "FRCF"
//   4       4     uint32 format version (1)
//   8       4     int32  N
//   12      4     int32  M
//   16      8     float64 L
//   24      8     float64 s
//   32      8*M^N float64 values, row-major (last axis fastest)
//
// A sidecar "<path>.json" carries the same header fields plus summary
// statistics and free-form metadata.
struct Snapshot {
    Field field;
    double s = 0.0;
};

void write_snapshot(const std::string& path, const Field& u, double s,
                    const std::string& metadata_json = "{}");
Snapshot read_snapshot(const std::string& path);

// Writes via a temporary file in the same directory and renames it into place.
void atomic_write(const std::string& path, const std::string& bytes);

} // namespace fracrit
