#include <doctest/doctest.h>

#include <set>

#include "hilbench/detail/digest.hpp"

using namespace hilbench::detail;

TEST_CASE("fnv1a64 matches the published test vectors") {
    // Reference values for the 64-bit FNV-1a offset basis and prime.
    CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("fnv1a64 is sensitive to every byte") {
    CHECK(fnv1a64("abc") != fnv1a64("abd"));
    CHECK(fnv1a64("abc") != fnv1a64("abc "));
    CHECK(fnv1a64(std::string("a\0b", 3)) != fnv1a64(std::string("ab", 2)));
}

TEST_CASE("hex16 is 16 lowercase hex digits") {
    CHECK(hex16(0) == "0000000000000000");
    CHECK(hex16(0xabcdef0123456789ull) == "abcdef0123456789");
    CHECK(hex16(0xffffffffffffffffull) == "ffffffffffffffff");
}

TEST_CASE("derive_seed is deterministic and collision-averse") {
    CHECK(derive_seed(1, std::uint64_t{2}) == derive_seed(1, std::uint64_t{2}));
    CHECK(derive_seed(1, "x") == derive_seed(1, "x"));

    std::set<std::uint64_t> seen;
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        for (std::uint64_t salt = 0; salt < 64; ++salt) {
            seen.insert(derive_seed(seed, salt));
        }
    }
    CHECK(seen.size() == 8 * 64);

    CHECK(derive_seed(0, "a/b") != derive_seed(0, "a/c"));
    CHECK(derive_seed(7, "stream") != derive_seed(8, "stream"));
}
