#include "umc/blockcode.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace umc {

namespace {

std::uint64_t words_over(int base, int l) {
    return checked_pow(static_cast<std::uint64_t>(base), static_cast<std::uint64_t>(l));
}

} // namespace

void validate_code(const SystemSpec& spec, const BlockCode& code) {
    if (code.l < 1) throw std::invalid_argument("BlockCode: block length must be >= 1");
    if (code.M < 1) throw std::invalid_argument("BlockCode: M must be >= 1");
    if (code.nx != spec.alphabet_x || code.decoders() != spec.J ||
        code.nzt.size() != static_cast<std::size_t>(spec.J))
        throw std::invalid_argument("BlockCode: alphabet mismatch with spec");
    for (int j = 0; j < spec.J; ++j)
        if (code.ny[j] != spec.alphabet_y[j] || code.nzt[j] != spec.alphabet_zt[j])
            throw std::invalid_argument("BlockCode: decoder alphabet mismatch with spec");

    if (code.enc.size() != words_over(code.nx, code.l))
        throw std::invalid_argument("BlockCode: encoder table size mismatch");
    for (std::uint32_t m : code.enc)
        if (m >= code.M) throw std::invalid_argument("BlockCode: codeword index out of range");

    if (code.dec.size() != static_cast<std::size_t>(spec.J))
        throw std::invalid_argument("BlockCode: one decoder table per decoder required");
    for (int j = 0; j < spec.J; ++j) {
        const std::uint64_t zwords = words_over(code.nzt[j], code.l);
        if (code.dec[j].size() != code.M * words_over(code.ny[j], code.l))
            throw std::invalid_argument("BlockCode: decoder table size mismatch");
        for (std::uint32_t w : code.dec[j])
            if (w >= zwords)
                throw std::invalid_argument("BlockCode: reconstruction word out of range");
    }
}

bool within_budget(const BlockCode& code, double R, double eps) {
    long double cap = std::exp2l(static_cast<long double>(code.l) * (R + eps));
    return static_cast<long double>(code.M) <= cap;
}

std::uint32_t encode_block(const BlockCode& code, std::span<const Symbol> a) {
    if (a.size() != static_cast<std::size_t>(code.l))
        throw std::invalid_argument("encode_block: wrong block length");
    return code.enc[pack_word(a, code.nx)];
}

std::vector<Symbol> decode_block(const BlockCode& code, int j, std::uint32_t m,
                                 std::span<const Symbol> y) {
    if (j < 0 || j >= code.decoders())
        throw std::invalid_argument("decode_block: decoder index out of range");
    if (m >= code.M) throw std::invalid_argument("decode_block: codeword index out of range");
    if (y.size() != static_cast<std::size_t>(code.l))
        throw std::invalid_argument("decode_block: wrong block length");
    const std::uint64_t yw = words_over(code.ny[j], code.l);
    std::uint32_t packed = code.dec[j][m * yw + pack_word(y, code.ny[j])];
    return unpacked_word(packed, code.nzt[j], code.l);
}

ChannelTables channel_tables(const SystemSpec& spec) {
    ChannelTables t;
    t.nx = spec.alphabet_x;
    t.ny = spec.alphabet_y;
    t.nz = spec.alphabet_z;
    t.nzt = spec.alphabet_zt;
    t.marginal.reserve(spec.J);
    t.side.resize(spec.J);
    t.cond.resize(spec.J);
    t.joint.resize(spec.J);
    t.tail.resize(spec.J);
    for (int j = 0; j < spec.J; ++j) {
        t.marginal.push_back(marginal_channel(spec, j));
        const MarginalChannel& m = t.marginal.back();
        const int nx = t.nx, ny = t.ny[j], nz = t.nz[j], nzt = t.nzt[j];
        t.side[j].assign(static_cast<std::size_t>(nx) * ny, 0.0);
        t.joint[j].assign(static_cast<std::size_t>(nzt) * nx * ny, 0.0);
        t.cond[j].assign(static_cast<std::size_t>(nzt) * nx * ny, 0.0);
        t.tail[j].assign(static_cast<std::size_t>(nzt) * nx, 0.0);
        for (int x = 0; x < nx; ++x)
            for (int y = 0; y < ny; ++y) {
                double py = 0.0;
                for (int z = 0; z < nz; ++z) py += m.p(x, y, z);
                t.side[j][static_cast<std::size_t>(x) * ny + y] = py;
                for (int zt = 0; zt < nzt; ++zt) {
                    double g = 0.0;
                    for (int z = 0; z < nz; ++z) g += m.p(x, y, z) * spec.distortion(j, zt, z);
                    const std::size_t idx = (static_cast<std::size_t>(zt) * nx + x) * ny + y;
                    t.joint[j][idx] = g;
                    t.cond[j][idx] = py > 0.0 ? g / py : 0.0;
                    t.tail[j][static_cast<std::size_t>(zt) * nx + x] += g;
                }
            }
    }
    return t;
}

double expected_block_distortion(const ChannelTables& tables, const BlockCode& code,
                                 int j, std::uint64_t a_packed) {
    const int l = code.l;
    const int ny = code.ny[j], nzt = code.nzt[j];
    const std::vector<Symbol> a = unpacked_word(a_packed, code.nx, l);
    const std::uint32_t m = code.enc[a_packed];
    const std::uint64_t yw = words_over(ny, l);
    const std::uint32_t* dec_row = code.dec[j].data() + m * yw;

    std::vector<Symbol> y(l), zt(l);
    double acc = 0.0;
    for (std::uint64_t yp = 0; yp < yw; ++yp) {
        unpack_word(yp, ny, l, y);
        double prod = 1.0;
        for (int i = 0; i < l; ++i) prod *= tables.side_p(j, a[i], y[i]);
        if (prod == 0.0) continue;
        unpack_word(dec_row[yp], nzt, l, zt);
        double inner = 0.0;
        for (int i = 0; i < l; ++i) inner += tables.cond_e(j, zt[i], a[i], y[i]);
        acc += prod * inner;
    }
    return acc / static_cast<double>(l);
}

double expected_block_distortion(const SystemSpec& spec, const BlockCode& code,
                                 int j, std::span<const Symbol> a) {
    if (j < 0 || j >= spec.J)
        throw std::invalid_argument("expected_block_distortion: decoder index out of range");
    if (a.size() != static_cast<std::size_t>(code.l))
        throw std::invalid_argument("expected_block_distortion: wrong block length");
    return expected_block_distortion(channel_tables(spec), code, j, pack_word(a, code.nx));
}

double expected_code_distortion(const SystemSpec& spec, const BlockCode& code,
                                int j, std::span<const double> pmf) {
    const std::uint64_t words = words_over(code.nx, code.l);
    if (pmf.size() != words)
        throw std::invalid_argument("expected_code_distortion: pmf size mismatch");
    double sum = 0.0;
    for (double p : pmf) {
        if (!(p >= 0.0)) throw std::invalid_argument("expected_code_distortion: negative mass");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-10)
        throw std::invalid_argument("expected_code_distortion: pmf does not sum to 1");
    ChannelTables tables = channel_tables(spec);
    double acc = 0.0;
    for (std::uint64_t a = 0; a < words; ++a)
        if (pmf[a] > 0.0) acc += pmf[a] * expected_block_distortion(tables, code, j, a);
    return acc;
}

DistortionTable distortion_table(const ChannelTables& tables, const BlockCode& code) {
    const std::uint64_t words = words_over(code.nx, code.l);
    DistortionTable table;
    table.value.resize(code.decoders());
    for (int j = 0; j < code.decoders(); ++j) {
        table.value[j].resize(words);
        for (std::uint64_t a = 0; a < words; ++a)
            table.value[j][a] = expected_block_distortion(tables, code, j, a);
    }
    return table;
}

DistortionTable distortion_table(const SystemSpec& spec, const BlockCode& code) {
    return distortion_table(channel_tables(spec), code);
}

void write_codes(std::ostream& os, std::span<const BlockCode> codes) {
    for (const BlockCode& c : codes) {
        os << "blockcode v1\n";
        os << "l " << c.l << "\n";
        os << "M " << c.M << "\n";
        os << "J " << c.decoders() << "\n";
        os << "x " << c.nx << "\n";
        os << "y";
        for (int v : c.ny) os << " " << v;
        os << "\nzt";
        for (int v : c.nzt) os << " " << v;
        os << "\nenc\n";
        for (std::size_t i = 0; i < c.enc.size(); ++i)
            os << c.enc[i] << (i + 1 == c.enc.size() ? "\n" : " ");
        for (int j = 0; j < c.decoders(); ++j) {
            os << "dec " << (j + 1) << "\n";
            const std::uint64_t yw = words_over(c.ny[j], c.l);
            for (std::uint32_t m = 0; m < c.M; ++m) {
                for (std::uint64_t yp = 0; yp < yw; ++yp)
                    os << c.dec[j][m * yw + yp] << (yp + 1 == yw ? "\n" : " ");
            }
        }
    }
}

namespace {

// token stream that drops '#' comments
class TokenReader {
public:
    explicit TokenReader(std::istream& is) : is_(is) {}

    bool next(std::string& tok) {
        while (true) {
            if (!(is_ >> tok)) return false;
            if (tok[0] == '#') {
                std::string rest;
                std::getline(is_, rest);
                continue;
            }
            return true;
        }
    }

    std::string expect() {
        std::string tok;
        if (!next(tok)) throw std::runtime_error("blockcode parse: unexpected end of input");
        return tok;
    }

    std::int64_t expect_int() {
        std::string tok = expect();
        std::size_t used = 0;
        std::int64_t v = 0;
        try {
            v = std::stoll(tok, &used);
        } catch (const std::exception&) {
            throw std::runtime_error("blockcode parse: expected integer, got '" + tok + "'");
        }
        if (used != tok.size())
            throw std::runtime_error("blockcode parse: expected integer, got '" + tok + "'");
        return v;
    }

    void expect_keyword(const std::string& kw) {
        std::string tok = expect();
        if (tok != kw)
            throw std::runtime_error("blockcode parse: expected '" + kw + "', got '" + tok + "'");
    }

private:
    std::istream& is_;
};

} // namespace

std::vector<BlockCode> read_codes(std::istream& is) {
    TokenReader in(is);
    std::vector<BlockCode> codes;
    std::string tok;
    while (in.next(tok)) {
        if (tok != "blockcode")
            throw std::runtime_error("blockcode parse: expected 'blockcode', got '" + tok + "'");
        if (in.expect() != "v1") throw std::runtime_error("blockcode parse: unsupported version");
        BlockCode c;
        in.expect_keyword("l");
        c.l = static_cast<int>(in.expect_int());
        in.expect_keyword("M");
        c.M = static_cast<std::uint32_t>(in.expect_int());
        in.expect_keyword("J");
        int J = static_cast<int>(in.expect_int());
        if (c.l < 1 || c.M < 1 || J < 1)
            throw std::runtime_error("blockcode parse: bad dimensions");
        in.expect_keyword("x");
        c.nx = static_cast<int>(in.expect_int());
        in.expect_keyword("y");
        for (int j = 0; j < J; ++j) c.ny.push_back(static_cast<int>(in.expect_int()));
        in.expect_keyword("zt");
        for (int j = 0; j < J; ++j) c.nzt.push_back(static_cast<int>(in.expect_int()));
        if (c.nx < 1) throw std::runtime_error("blockcode parse: bad alphabet");
        for (int j = 0; j < J; ++j)
            if (c.ny[j] < 1 || c.nzt[j] < 1)
                throw std::runtime_error("blockcode parse: bad alphabet");

        in.expect_keyword("enc");
        const std::uint64_t xw = words_over(c.nx, c.l);
        c.enc.resize(xw);
        for (std::uint64_t i = 0; i < xw; ++i) {
            std::int64_t v = in.expect_int();
            if (v < 0 || v >= static_cast<std::int64_t>(c.M))
                throw std::runtime_error("blockcode parse: encoder entry out of range");
            c.enc[i] = static_cast<std::uint32_t>(v);
        }
        c.dec.resize(J);
        for (int j = 0; j < J; ++j) {
            in.expect_keyword("dec");
            if (in.expect_int() != j + 1)
                throw std::runtime_error("blockcode parse: decoder tables out of order");
            const std::uint64_t yw = words_over(c.ny[j], c.l);
            const std::uint64_t zwords = words_over(c.nzt[j], c.l);
            c.dec[j].resize(c.M * yw);
            for (std::uint64_t i = 0; i < c.M * yw; ++i) {
                std::int64_t v = in.expect_int();
                if (v < 0 || v >= static_cast<std::int64_t>(zwords))
                    throw std::runtime_error("blockcode parse: reconstruction word out of range");
                c.dec[j][i] = static_cast<std::uint32_t>(v);
            }
        }
        codes.push_back(std::move(c));
    }
    return codes;
}

} // namespace umc
