#include "qnsk/snapshot.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

namespace qnsk {

namespace {

template <class T>
void put_le(std::vector<unsigned char>& buf, T value) {
    using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
    U u;
    std::memcpy(&u, &value, sizeof(T));
    for (size_t i = 0; i < sizeof(T); ++i) buf.push_back(static_cast<unsigned char>((u >> (8 * i)) & 0xff));
}

template <class T>
T get_le(const unsigned char* p) {
    using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
    U u = 0;
    for (size_t i = 0; i < sizeof(T); ++i) u |= static_cast<U>(p[i]) << (8 * i);
    T value;
    std::memcpy(&value, &u, sizeof(T));
    return value;
}

constexpr std::array<char, 4> kMagic = {'I', 'S', 'O', 'F'};
constexpr size_t kHeaderBytes = 4 + 4 * 3 + 8 * 2;

}  // namespace

std::filesystem::path snapshot_path(const std::filesystem::path& dir, const std::string& stem,
                                    const std::string& field_name) {
    return dir / (stem + "." + field_name + ".isof");
}

void write_snapshot(const std::filesystem::path& path, const ScalarField& f, double t) {
    const Grid& g = f.grid;
    std::vector<unsigned char> buf;
    buf.reserve(kHeaderBytes + 8 * f.size());
    buf.insert(buf.end(), kMagic.begin(), kMagic.end());
    put_le<std::uint32_t>(buf, kSnapshotVersion);
    put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(g.dim()));
    put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(g.n()));
    put_le<double>(buf, g.ell());
    put_le<double>(buf, t);
    for (double x : f.v) put_le<double>(buf, x);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw SnapshotError("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) throw SnapshotError("short write to " + path.string());
}

Snapshot read_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SnapshotError("cannot open " + path.string());
    std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (buf.size() < kHeaderBytes || std::memcmp(buf.data(), kMagic.data(), 4) != 0)
        throw SnapshotError(path.string() + ": not a snapshot file");
    const auto version = get_le<std::uint32_t>(&buf[4]);
    if (version != kSnapshotVersion) throw SnapshotError(path.string() + ": unsupported version");
    const auto d = get_le<std::uint32_t>(&buf[8]);
    const auto n = get_le<std::uint32_t>(&buf[12]);
    const double ell = get_le<double>(&buf[16]);
    const double t = get_le<double>(&buf[24]);
    Grid g(static_cast<int>(d), ell, static_cast<int>(n));
    if (buf.size() != kHeaderBytes + 8 * g.size()) throw SnapshotError(path.string() + ": truncated payload");
    ScalarField f(g);
    for (size_t i = 0; i < g.size(); ++i) f[i] = get_le<double>(&buf[kHeaderBytes + 8 * i]);
    return {std::move(f), t};
}

}  // namespace qnsk
