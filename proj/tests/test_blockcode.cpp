#include <doctest.h>

#include <sstream>

#include "umc/blockcode.hpp"

#include "helpers.hpp"

using namespace umc;

namespace {

SystemSpec bsc_side_spec(double p) {
    SystemSpec spec;
    spec.J = 1;
    spec.alphabet_x = 2;
    spec.alphabet_y = {2};
    spec.alphabet_z = {2};
    spec.alphabet_zt = {2};
    spec.w.assign(2, std::vector<double>(4, 0.0));
    for (Symbol x = 0; x < 2; ++x)
        for (Symbol y = 0; y < 2; ++y)
            spec.w[x][static_cast<std::size_t>(y) * 2 + x] = (y == x ? 1.0 - p : p);
    spec.d1 = {{0.0, 1.0, 1.0, 0.0}};
    finalize_spec(spec);
    return spec;
}

// side information useless (singleton), Z = X
SystemSpec no_side_spec() {
    SystemSpec spec;
    spec.J = 1;
    spec.alphabet_x = 2;
    spec.alphabet_y = {1};
    spec.alphabet_z = {2};
    spec.alphabet_zt = {2};
    spec.w = {{1.0, 0.0}, {0.0, 1.0}};  // row over (y=0, z)
    spec.d1 = {{0.0, 1.0, 1.0, 0.0}};
    finalize_spec(spec);
    return spec;
}

// complementary delivery over pair symbols (x1, x2)
SystemSpec pair_cd_spec() {
    SystemSpec spec;
    spec.J = 2;
    spec.alphabet_x = 4;
    spec.alphabet_y = {2, 2};
    spec.alphabet_z = {2, 2};
    spec.alphabet_zt = {2, 2};
    spec.w.assign(4, std::vector<double>(16, 0.0));
    for (Symbol x = 0; x < 4; ++x) {
        const Symbol x1 = x >> 1, x2 = x & 1;
        spec.w[x][(static_cast<std::size_t>(x2) * 2 + x1) * 4 + (x1 * 2 + x2)] = 1.0;
    }
    spec.d1 = {{0.0, 1.0, 1.0, 0.0}, {0.0, 1.0, 1.0, 0.0}};
    finalize_spec(spec);
    return spec;
}

BlockCode xor_code() {
    BlockCode c;
    c.l = 1;
    c.M = 2;
    c.nx = 4;
    c.ny = {2, 2};
    c.nzt = {2, 2};
    c.enc = {0, 1, 1, 0};
    c.dec = {{0, 1, 1, 0}, {0, 1, 1, 0}};
    return c;
}

BlockCode identity_code(const SystemSpec& spec) {
    BlockCode c;
    c.l = 1;
    c.M = 2;
    c.nx = 2;
    c.ny = spec.alphabet_y;
    c.nzt = spec.alphabet_zt;
    c.enc = {0, 1};
    c.dec.resize(spec.J);
    for (int j = 0; j < spec.J; ++j) {
        c.dec[j].resize(2 * static_cast<std::size_t>(spec.alphabet_y[j]));
        for (std::uint32_t m = 0; m < 2; ++m)
            for (int y = 0; y < spec.alphabet_y[j]; ++y)
                c.dec[j][m * spec.alphabet_y[j] + y] = m;
    }
    return c;
}

BlockCode constant_code(const SystemSpec& spec) {
    BlockCode c;
    c.l = 1;
    c.M = 1;
    c.nx = spec.alphabet_x;
    c.ny = spec.alphabet_y;
    c.nzt = spec.alphabet_zt;
    c.enc.assign(spec.alphabet_x, 0);
    c.dec.resize(spec.J);
    for (int j = 0; j < spec.J; ++j) c.dec[j].assign(spec.alphabet_y[j], 0);
    return c;
}

} // namespace

TEST_CASE("encode_block lookups") {
    SystemSpec spec = bsc_side_spec(0.1);
    BlockCode id = identity_code(spec);
    std::vector<Symbol> a{1};
    CHECK(encode_block(id, a) == 1);

    BlockCode parity = xor_code();
    std::vector<Symbol> pair{2};  // (1,0)
    CHECK(encode_block(parity, pair) == 1);

    BlockCode constant = constant_code(spec);
    for (Symbol s = 0; s < 2; ++s) {
        std::vector<Symbol> in{s};
        CHECK(encode_block(constant, in) == 0);
    }
    std::vector<Symbol> wrong{0, 1};
    CHECK_THROWS_AS(encode_block(id, wrong), std::invalid_argument);
}

TEST_CASE("decode_block lookups") {
    SystemSpec spec = bsc_side_spec(0.1);
    BlockCode id = identity_code(spec);
    std::vector<Symbol> y{0};
    CHECK(decode_block(id, 0, 1, y) == std::vector<Symbol>{1});

    // parity code inverts through the side symbol: m xor y recovers x1
    BlockCode parity = xor_code();
    for (Symbol x1 = 0; x1 < 2; ++x1)
        for (Symbol x2 = 0; x2 < 2; ++x2) {
            const std::uint32_t m = static_cast<std::uint32_t>(x1 ^ x2);
            std::vector<Symbol> y1{x2};
            CHECK(decode_block(parity, 0, m, y1) == std::vector<Symbol>{x1});
            std::vector<Symbol> y2{x1};
            CHECK(decode_block(parity, 1, m, y2) == std::vector<Symbol>{x2});
        }

    BlockCode constant = constant_code(spec);
    CHECK(decode_block(constant, 0, 0, y) == std::vector<Symbol>{0});
    CHECK_THROWS_AS(decode_block(id, 0, 2, y), std::invalid_argument);
    CHECK_THROWS_AS(decode_block(id, 1, 0, y), std::invalid_argument);
}

TEST_CASE("expected distortion of the identity code is zero") {
    SystemSpec spec = bsc_side_spec(0.1);
    BlockCode id = identity_code(spec);
    for (Symbol a = 0; a < 2; ++a) {
        std::vector<Symbol> word{a};
        CHECK(expected_block_distortion(spec, id, 0, word) == doctest::Approx(0.0).epsilon(1e-15));
    }
}

TEST_CASE("side-only decoder under BSC(0.1) has expected distortion 0.1") {
    SystemSpec spec = bsc_side_spec(0.1);
    BlockCode c = constant_code(spec);
    c.dec[0] = {0, 1};  // emit the side symbol
    for (Symbol a = 0; a < 2; ++a) {
        std::vector<Symbol> word{a};
        CHECK(expected_block_distortion(spec, c, 0, word) ==
              doctest::Approx(0.1).epsilon(1e-12));
    }
}

TEST_CASE("constant-zero decoder distortion is the indicator of a=1") {
    SystemSpec spec = no_side_spec();
    BlockCode c = constant_code(spec);
    std::vector<Symbol> zero{0}, one{1};
    CHECK(expected_block_distortion(spec, c, 0, zero) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(expected_block_distortion(spec, c, 0, one) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("expected_code_distortion worked cases") {
    // parity code: zero everywhere, both decoders
    SystemSpec cd = pair_cd_spec();
    BlockCode parity = xor_code();
    std::vector<double> uniform(4, 0.25);
    CHECK(expected_code_distortion(cd, parity, 0, uniform) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(expected_code_distortion(cd, parity, 1, uniform) == doctest::Approx(0.0).epsilon(1e-15));

    // constant-zero decoder, Bernoulli(0.3): 0.7*0 + 0.3*1
    SystemSpec ns = no_side_spec();
    BlockCode c = constant_code(ns);
    std::vector<double> bern{0.7, 0.3};
    CHECK(expected_code_distortion(ns, c, 0, bern) == doctest::Approx(0.3).epsilon(1e-14));

    // identity code: zero under any pmf
    SystemSpec bs = bsc_side_spec(0.1);
    BlockCode id = identity_code(bs);
    std::vector<double> skew{0.9, 0.1};
    CHECK(expected_code_distortion(bs, id, 0, skew) == doctest::Approx(0.0).epsilon(1e-15));

    std::vector<double> bad{0.5, 0.4};
    CHECK_THROWS_AS(expected_code_distortion(ns, c, 0, bad), std::invalid_argument);
}

TEST_CASE("expected_code_distortion is affine in the pmf") {
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        SystemSpec spec = test::random_tiny_spec(rng);
        const int l = 1 + static_cast<int>(rng.below(2));
        const std::uint32_t M = 1 + static_cast<std::uint32_t>(rng.below(3));
        BlockCode code = test::random_code(rng, spec, l, M);
        const int j = static_cast<int>(rng.below(spec.J));
        const std::uint64_t words = checked_pow(spec.alphabet_x, l);
        auto p1 = test::random_stochastic_row(rng, words);
        auto p2 = test::random_stochastic_row(rng, words);
        const double lambda = rng.uniform01();
        std::vector<double> mix(words);
        for (std::uint64_t a = 0; a < words; ++a)
            mix[a] = lambda * p1[a] + (1.0 - lambda) * p2[a];
        const double direct = expected_code_distortion(spec, code, j, mix);
        const double combo = lambda * expected_code_distortion(spec, code, j, p1) +
                             (1.0 - lambda) * expected_code_distortion(spec, code, j, p2);
        CHECK(direct == doctest::Approx(combo).epsilon(1e-12));
    }
}

TEST_CASE("expected block distortion stays in [0, d_max]") {
    Rng rng(32);
    for (int trial = 0; trial < 30; ++trial) {
        SystemSpec spec = test::random_tiny_spec(rng);
        const int l = 1 + static_cast<int>(rng.below(2));
        BlockCode code = test::random_code(rng, spec, l, 2);
        ChannelTables tables = channel_tables(spec);
        const std::uint64_t words = checked_pow(spec.alphabet_x, l);
        for (int j = 0; j < spec.J; ++j)
            for (std::uint64_t a = 0; a < words; ++a) {
                const double v = expected_block_distortion(tables, code, j, a);
                CHECK(v >= 0.0);
                CHECK(v <= spec.d_max[j] + 1e-12);
            }
    }
}

// sampled channel draws against the exact enumeration (the full 50-spec run
// lives in the acceptance suite)
TEST_CASE("Monte Carlo agrees with the exact expectation") {
    Rng rng(33);
    for (int trial = 0; trial < 5; ++trial) {
        SystemSpec spec = test::random_tiny_spec(rng);
        const int l = 1 + static_cast<int>(rng.below(2));
        BlockCode code = test::random_code(rng, spec, l, 2);
        const int j = static_cast<int>(rng.below(spec.J));
        auto a = test::random_sequence(rng, spec.alphabet_x, l);
        const double exact = expected_block_distortion(spec, code, j, a);
        auto mc = test::mc_block_distortion(spec, code, j, a, 20000, 1000 + trial);
        if (mc.sigma_mean == 0.0)
            CHECK(exact == doctest::Approx(mc.mean).epsilon(1e-12));
        else
            CHECK(std::abs(exact - mc.mean) <= 4.0 * mc.sigma_mean);
    }
}

TEST_CASE("distortion table matches pointwise evaluation") {
    Rng rng(34);
    SystemSpec spec = test::random_tiny_spec(rng);
    BlockCode code = test::random_code(rng, spec, 2, 2);
    ChannelTables tables = channel_tables(spec);
    DistortionTable table = distortion_table(tables, code);
    const std::uint64_t words = checked_pow(spec.alphabet_x, 2);
    for (int j = 0; j < spec.J; ++j)
        for (std::uint64_t a = 0; a < words; ++a)
            CHECK(table.value[j][a] == expected_block_distortion(tables, code, j, a));
}

TEST_CASE("budget membership check") {
    SystemSpec spec = bsc_side_spec(0.1);
    BlockCode id = identity_code(spec);
    CHECK(within_budget(id, 1.0, 0.05));   // M=2 <= 2^1.05
    CHECK(!within_budget(id, 0.5, 0.05));  // M=2 > 2^0.55
}

TEST_CASE("text serialization round trips") {
    SystemSpec cd = pair_cd_spec();
    BlockCode parity = xor_code();
    BlockCode constant = constant_code(cd);
    std::vector<BlockCode> codes{parity, constant};

    std::stringstream ss;
    write_codes(ss, codes);
    auto back = read_codes(ss);
    REQUIRE(back.size() == 2);
    CHECK(back[0] == parity);
    CHECK(back[1] == constant);

    // comments are ignored
    std::stringstream with_comment;
    with_comment << "# parity code for complementary delivery\n";
    write_codes(with_comment, std::span<const BlockCode>(&parity, 1));
    CHECK(read_codes(with_comment).at(0) == parity);
}

TEST_CASE("multi-position codes serialize losslessly") {
    Rng rng(35);
    for (int trial = 0; trial < 10; ++trial) {
        SystemSpec spec = test::random_tiny_spec(rng);
        BlockCode code = test::random_code(rng, spec, 2, 3);
        std::stringstream ss;
        write_codes(ss, std::span<const BlockCode>(&code, 1));
        auto back = read_codes(ss);
        REQUIRE(back.size() == 1);
        CHECK(back[0] == code);
    }
}

TEST_CASE("malformed code text is rejected") {
    auto expect_fail = [](const std::string& text) {
        std::stringstream ss(text);
        CHECK_THROWS_AS(read_codes(ss), std::runtime_error);
    };
    expect_fail("blockcode v2\n");
    expect_fail("blockcode v1\nl 1\nM 2\n");  // truncated
    expect_fail("blockcode v1\nl 1\nM 2\nJ 1\nx 2\ny 2\nzt 2\nenc\n0 7\ndec 1\n0 0 0 0\n");
    expect_fail("blockcode v1\nl 1\nM 2\nJ 1\nx 2\ny 2\nzt 2\nenc\n0 1\ndec 2\n0 0 0 0\n");
    expect_fail("notacode v1\n");
}

TEST_CASE("validate_code catches mismatches") {
    SystemSpec spec = bsc_side_spec(0.1);
    BlockCode id = identity_code(spec);
    CHECK_NOTHROW(validate_code(spec, id));
    BlockCode bad = id;
    bad.enc[0] = 5;
    CHECK_THROWS_AS(validate_code(spec, bad), std::invalid_argument);
    bad = id;
    bad.nx = 3;
    CHECK_THROWS_AS(validate_code(spec, bad), std::invalid_argument);
    bad = id;
    bad.dec[0].pop_back();
    CHECK_THROWS_AS(validate_code(spec, bad), std::invalid_argument);
}
