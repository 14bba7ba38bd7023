#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "qnsk/spectral_field.hpp"

namespace qnsk {

constexpr std::uint32_t kSnapshotVersion = 1;

class SnapshotError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Snapshot {
    ScalarField field;
    double t = 0.0;
};

/// `<dir>/<stem>.<field_name>.isof`
std::filesystem::path snapshot_path(const std::filesystem::path& dir, const std::string& stem,
                                    const std::string& field_name);

/// Layout: "ISOF", u32 version, u32 d, u32 n, f64 ell, f64 t, n^d f64 samples (little-endian).
void write_snapshot(const std::filesystem::path& path, const ScalarField& f, double t);
Snapshot read_snapshot(const std::filesystem::path& path);

}  // namespace qnsk
