#include "umc/empirical.hpp"

#include <ostream>
#include <stdexcept>

namespace umc {

namespace {

constexpr std::uint64_t kMaxTableEntries = std::uint64_t{1} << 26;

std::uint64_t table_size(int alphabet, int l) {
    if (alphabet < 1) throw std::invalid_argument("empirical: empty alphabet");
    std::uint64_t size = checked_pow(static_cast<std::uint64_t>(alphabet), static_cast<std::uint64_t>(l));
    if (size > kMaxTableEntries)
        throw std::invalid_argument("empirical: alphabet^l too large for a dense table");
    return size;
}

void check_symbols(std::span<const Symbol> x, int alphabet) {
    for (Symbol s : x)
        if (s < 0 || s >= alphabet)
            throw std::invalid_argument("empirical: symbol out of alphabet");
}

} // namespace

std::vector<double> EmpiricalDistribution::pmf() const {
    if (total == 0) throw std::logic_error("EmpiricalDistribution: empty");
    std::vector<double> p(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i)
        p[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
    return p;
}

std::ostream& operator<<(std::ostream& os, const EmpiricalDistribution& d) {
    os << (d.shift == EmpiricalDistribution::kOverlapping
               ? "overlapping"
               : "nonoverlapping(s=" + std::to_string(d.shift) + ")")
       << " l=" << d.l << " total=" << d.total << " {";
    bool first = true;
    for (std::size_t a = 0; a < d.counts.size(); ++a) {
        if (d.counts[a] == 0) continue;
        if (!first) os << ", ";
        os << a << ":" << d.counts[a];
        first = false;
    }
    return os << "}";
}

EmpiricalDistribution nonoverlapping_empirical(std::span<const Symbol> x, int alphabet,
                                               int l, int s) {
    const std::uint64_t n = x.size();
    if (l < 1 || static_cast<std::uint64_t>(l) > n)
        throw std::invalid_argument("nonoverlapping_empirical: need 1 <= l <= n");
    if (s < 0 || s >= l)
        throw std::invalid_argument("nonoverlapping_empirical: need 0 <= s < l");
    check_symbols(x, alphabet);

    EmpiricalDistribution dist;
    dist.l = l;
    dist.shift = s;
    dist.counts.assign(table_size(alphabet, l), 0);
    dist.total = (n - static_cast<std::uint64_t>(s)) / static_cast<std::uint64_t>(l);
    if (dist.total == 0)
        throw std::invalid_argument("nonoverlapping_empirical: no complete block at this offset");

    for (std::uint64_t i = 0; i < dist.total; ++i) {
        auto block = x.subspan(s + i * static_cast<std::uint64_t>(l), l);
        ++dist.counts[pack_word(block, alphabet)];
    }
    return dist;
}

EmpiricalDistribution overlapping_empirical(std::span<const Symbol> x, int alphabet, int l) {
    const std::uint64_t n = x.size();
    if (l < 1 || static_cast<std::uint64_t>(l) > n)
        throw std::invalid_argument("overlapping_empirical: need 1 <= l <= n");
    check_symbols(x, alphabet);

    EmpiricalDistribution dist;
    dist.l = l;
    dist.shift = EmpiricalDistribution::kOverlapping;
    dist.counts.assign(table_size(alphabet, l), 0);
    dist.total = n - static_cast<std::uint64_t>(l) + 1;

    // incremental window update: drop the leading digit, shift, append
    const std::uint64_t msd = checked_pow(alphabet, static_cast<std::uint64_t>(l - 1));
    std::uint64_t window = pack_word(x.first(l), alphabet);
    ++dist.counts[window];
    for (std::uint64_t i = 1; i < dist.total; ++i) {
        window = (window % msd) * static_cast<std::uint64_t>(alphabet) +
                 static_cast<std::uint64_t>(x[i + l - 1]);
        ++dist.counts[window];
    }
    return dist;
}

double weighted_block_average(const EmpiricalDistribution& dist,
                              std::span<const double> values) {
    if (values.size() != dist.counts.size())
        throw std::invalid_argument("weighted_block_average: table size mismatch");
    if (dist.total == 0) throw std::logic_error("weighted_block_average: empty distribution");
    double acc = 0.0;
    for (std::size_t a = 0; a < values.size(); ++a)
        if (dist.counts[a] != 0)
            acc += static_cast<double>(dist.counts[a]) * values[a];
    return acc / static_cast<double>(dist.total);
}

} // namespace umc
