#include "fracrit/snapshot.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <stdexcept>

#include <json.hpp>

namespace fracrit {

namespace {

constexpr char kMagic[4] = {'F', 'R', 'C', 'F'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kHeaderBytes = 32;

template <class T>
void put_le(std::string& out, T value) {
    static_assert(sizeof(T) == 4 || sizeof(T) == 8);
    using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
    const U bits = std::bit_cast<U>(value);
    for (std::size_t b = 0; b < sizeof(T); ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xffu));
}

template <class T>
T get_le(const std::string& in, std::size_t offset) {
    using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
    U bits = 0;
    for (std::size_t b = 0; b < sizeof(T); ++b)
        bits |= static_cast<U>(static_cast<unsigned char>(in[offset + b])) << (8 * b);
    return std::bit_cast<T>(bits);
}

} // namespace

void atomic_write(const std::string& path, const std::string& bytes) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!os) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, target);
}

void write_snapshot(const std::string& path, const Field& u, double s, const std::string& metadata_json) {
    const GridSpec& g = u.grid();
    std::string bin;
    bin.reserve(kHeaderBytes + 8 * u.size());
    bin.append(kMagic, 4);
    put_le<std::uint32_t>(bin, kVersion);
    put_le<std::int32_t>(bin, g.N);
    put_le<std::int32_t>(bin, g.M);
    put_le<double>(bin, g.L);
    put_le<double>(bin, s);
    for (double x : u.values()) put_le<double>(bin, x);
    atomic_write(path, bin);

    nlohmann::ordered_json side;
    side["format"] = "fracrit-field";
    side["version"] = kVersion;
    side["N"] = g.N;
    side["M"] = g.M;
    side["L"] = g.L;
    side["s"] = s;
    side["min"] = u.min();
    side["max"] = u.max();
    double l2 = 0.0;
    for (double x : u.values()) l2 += x * x;
    side["l2_norm"] = std::sqrt(l2 * g.cell_volume());
    side["metadata"] = nlohmann::ordered_json::parse(metadata_json);
    atomic_write(path + ".json", side.dump(2) + "\n");
}

Snapshot read_snapshot(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open snapshot " + path);
    const std::string bin((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    if (bin.size() < kHeaderBytes || std::memcmp(bin.data(), kMagic, 4) != 0)
        throw std::runtime_error("not a field snapshot: " + path);
    if (get_le<std::uint32_t>(bin, 4) != kVersion) throw std::runtime_error("unsupported snapshot version: " + path);
    GridSpec g;
    g.N = get_le<std::int32_t>(bin, 8);
    g.M = get_le<std::int32_t>(bin, 12);
    g.L = get_le<double>(bin, 16);
    const double s = get_le<double>(bin, 24);
    g.validate();
    if (bin.size() != kHeaderBytes + 8 * g.size()) throw std::runtime_error("truncated snapshot: " + path);
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = get_le<double>(bin, kHeaderBytes + 8 * i);
    return Snapshot{Field(g, std::move(v)), s};
}

} // namespace fracrit
