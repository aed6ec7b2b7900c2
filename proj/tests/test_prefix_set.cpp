#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <stdexcept>

#include "densitylab/prefix_set.hpp"

using namespace densitylab;

TEST_CASE("membership, counting, and the range contract") {
    PrefixSet s(100, "demo");
    s.insert(0);
    s.insert(1);
    s.insert(64);
    s.insert(100);
    CHECK(s.contains(0));
    CHECK(s.contains(64));
    CHECK(!s.contains(63));
    CHECK(s.cardinality() == 4);
    CHECK(s.count_prefix(100) == 3);  // 0 is never part of the density numerator
    CHECK(s.count_prefix(63) == 1);
    CHECK(s.count_prefix(64) == 2);

    // Beyond the materialized prefix the set has no answer, so asking is a bug.
    CHECK_THROWS_AS(s.contains(101), std::out_of_range);
    CHECK_THROWS_AS(s.insert(101), std::out_of_range);
    CHECK_THROWS_AS(s.count_prefix(101), std::out_of_range);

    s.erase(64);
    CHECK(!s.contains(64));
    s.erase_range(0, 100);
    CHECK(s.cardinality() == 0);
}

TEST_CASE("erase_range hits exactly the closed interval") {
    PrefixSet s(300);
    for (std::uint64_t n = 0; n <= 300; ++n) s.insert(n);
    s.erase_range(65, 191);
    for (std::uint64_t n = 0; n <= 300; ++n) CHECK(s.contains(n) == (n < 65 || n > 191));
    s.erase_range(290, 400);  // hi clamps to the limit
    CHECK(!s.contains(300));
    CHECK(s.contains(289));
}

TEST_CASE("iteration is ascending and bounded") {
    PrefixSet s(500);
    for (std::uint64_t n : {3ull, 64ull, 65ull, 127ull, 128ull, 500ull}) s.insert(n);
    std::vector<std::uint64_t> seen;
    s.for_each([&](std::uint64_t v) { seen.push_back(v); });
    CHECK(seen == std::vector<std::uint64_t>{3, 64, 65, 127, 128, 500});
    seen.clear();
    s.for_each_up_to(127, [&](std::uint64_t v) { seen.push_back(v); });
    CHECK(seen == std::vector<std::uint64_t>{3, 64, 65, 127});
    CHECK(s.to_vector().size() == 6);
}

TEST_CASE("is_full respects the tail mask") {
    PrefixSet s(70);
    for (std::uint64_t n = 0; n <= 70; ++n) s.insert(n);
    CHECK(s.is_full());
    s.erase(70);
    CHECK(!s.is_full());
}

TEST_CASE("equality ignores the label, subset check works") {
    PrefixSet a(64, "a"), b(64, "b");
    a.insert(10);
    b.insert(10);
    CHECK(a == b);
    b.insert(20);
    CHECK(a != b);
    CHECK(a.is_subset_of(b));
    CHECK(!b.is_subset_of(a));
}

TEST_CASE("snapshot round-trips through disk") {
    namespace fs = std::filesystem;
    const fs::path path = fs::temp_directory_path() / "densitylab_test_snapshot.dlps";
    PrefixSet s(1000, "roundtrip label");
    for (std::uint64_t n = 0; n <= 1000; n += 7) s.insert(n);
    save_prefix_set(s, path);
    PrefixSet loaded = load_prefix_set(path);
    CHECK(loaded == s);
    CHECK(loaded.label() == "roundtrip label");
    CHECK(loaded.limit() == 1000);

    // A corrupt header must be rejected, never half-read.
    {
        std::FILE* f = std::fopen(path.string().c_str(), "r+b");
        REQUIRE(f);
        std::fputc('X', f);
        std::fclose(f);
    }
    CHECK_THROWS(load_prefix_set(path));
    fs::remove(path);
}
