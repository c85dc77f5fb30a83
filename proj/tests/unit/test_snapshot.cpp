#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>

#include <json.hpp>

#include "fracrit/random_field.hpp"
#include "fracrit/snapshot.hpp"

using namespace fracrit;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("fracrit_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

} // namespace

TEST_CASE("snapshot round trip") {
    const fs::path dir = scratch_dir("snap");
    const GridSpec g{2, 3.5, 16};
    Rng rng = derived_rng(1, 1);
    const Field u = random_smooth_field(g, 0.3, rng);
    const std::string path = (dir / "u.bin").string();
    write_snapshot(path, u, 0.3, R"({"role":"test"})");
    const Snapshot back = read_snapshot(path);
    CHECK(back.s == 0.3);
    CHECK(back.field.grid() == g);
    CHECK(back.field.values() == u.values());

    SUBCASE("header layout") {
        const std::string bytes = slurp(path);
        REQUIRE(bytes.size() == 32 + 8 * g.size());
        CHECK(bytes.substr(0, 4) == "FRCF");
        const auto byte = [&](std::size_t i) { return static_cast<unsigned char>(bytes[i]); };
        CHECK(byte(4) == 1);
        CHECK(byte(8) == 2);
        CHECK(byte(12) == 16);
        double L = 0.0;
        std::memcpy(&L, bytes.data() + 16, 8);  // host is little-endian here
        CHECK(L == 3.5);
        double v0 = 0.0;
        std::memcpy(&v0, bytes.data() + 32, 8);
        CHECK(v0 == u[0]);
    }
    SUBCASE("sidecar") {
        std::ifstream in(path + ".json");
        const auto j = nlohmann::json::parse(in);
        CHECK(j["format"] == "fracrit-field");
        CHECK(j["N"] == 2);
        CHECK(j["M"] == 16);
        CHECK(j["max"].get<double>() == u.max());
        CHECK(j["metadata"]["role"] == "test");
    }
    SUBCASE("no temporary files left behind") {
        int n = 0;
        for (const auto& e : fs::directory_iterator(dir)) {
            (void)e;
            ++n;
        }
        CHECK(n == 2);
    }
}

TEST_CASE("corrupt snapshots are rejected") {
    const fs::path dir = scratch_dir("corrupt");
    const GridSpec g{1, 1.0, 8};
    const std::string path = (dir / "u.bin").string();
    write_snapshot(path, Field(g, 1.0), 0.25);
    std::string bytes = slurp(path);

    atomic_write(path, bytes.substr(0, bytes.size() - 3));
    CHECK_THROWS(read_snapshot(path));
    std::string bad = bytes;
    bad[0] = 'X';
    atomic_write(path, bad);
    CHECK_THROWS(read_snapshot(path));
    bad = bytes;
    bad[4] = 9;
    atomic_write(path, bad);
    CHECK_THROWS(read_snapshot(path));
    CHECK_THROWS(read_snapshot((dir / "missing.bin").string()));
    CHECK_THROWS(write_snapshot(path, Field(g, 1.0), 0.25, "{not json"));
}
