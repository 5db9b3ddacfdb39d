#include "umc/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace umc {

namespace {

constexpr double kRowSumTol = 1e-12;

void check_stochastic_row(std::span<const double> row, const char* what) {
    double sum = 0.0;
    for (double p : row) {
        if (!(p >= 0.0) || p > 1.0 + kRowSumTol)
            throw std::invalid_argument(std::string(what) + ": probability out of [0,1]");
        sum += p;
    }
    if (std::abs(sum - 1.0) > kRowSumTol)
        throw std::invalid_argument(std::string(what) + ": row does not sum to 1");
}

// Strong connectivity of the positive-entry graph, then aperiodicity via the
// gcd of (d(u) + 1 - d(v)) over edges, d = BFS distance from state 0.
void check_ergodic(const std::vector<std::vector<double>>& T) {
    const std::size_t H = T.size();
    auto bfs = [&](bool forward) {
        std::vector<int> dist(H, -1);
        std::vector<std::size_t> queue{0};
        dist[0] = 0;
        for (std::size_t qi = 0; qi < queue.size(); ++qi) {
            std::size_t u = queue[qi];
            for (std::size_t v = 0; v < H; ++v) {
                double p = forward ? T[u][v] : T[v][u];
                if (p > 0.0 && dist[v] < 0) {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        return dist;
    };
    auto fwd = bfs(true);
    auto bwd = bfs(false);
    for (std::size_t v = 0; v < H; ++v)
        if (fwd[v] < 0 || bwd[v] < 0)
            throw std::invalid_argument("source chain is reducible (not ergodic)");
    std::int64_t period = 0;
    for (std::size_t u = 0; u < H; ++u)
        for (std::size_t v = 0; v < H; ++v)
            if (T[u][v] > 0.0)
                period = std::gcd(period, static_cast<std::int64_t>(fwd[u]) + 1 - fwd[v]);
    if (period != 1)
        throw std::invalid_argument("source chain is periodic (not ergodic)");
}

} // namespace

std::uint64_t SystemSpec::y_product() const {
    std::uint64_t p = 1;
    for (int s : alphabet_y) p *= static_cast<std::uint64_t>(s);
    return p;
}

std::uint64_t SystemSpec::z_product() const {
    std::uint64_t p = 1;
    for (int s : alphabet_z) p *= static_cast<std::uint64_t>(s);
    return p;
}

std::uint64_t SystemSpec::pack_tuple(std::span<const Symbol> comps,
                                     std::span<const int> sizes) const {
    std::uint64_t v = 0;
    for (std::size_t j = 0; j < sizes.size(); ++j) {
        if (comps[j] < 0 || comps[j] >= sizes[j])
            throw std::invalid_argument("pack_tuple: component out of alphabet");
        v = v * static_cast<std::uint64_t>(sizes[j]) + static_cast<std::uint64_t>(comps[j]);
    }
    return v;
}

void SystemSpec::unpack_y(std::uint64_t packed, std::span<Symbol> out) const {
    for (std::size_t j = alphabet_y.size(); j-- > 0;) {
        out[j] = static_cast<Symbol>(packed % alphabet_y[j]);
        packed /= alphabet_y[j];
    }
}

void SystemSpec::unpack_z(std::uint64_t packed, std::span<Symbol> out) const {
    for (std::size_t j = alphabet_z.size(); j-- > 0;) {
        out[j] = static_cast<Symbol>(packed % alphabet_z[j]);
        packed /= alphabet_z[j];
    }
}

void SystemSpec::validate() const {
    if (J < 1) throw std::invalid_argument("SystemSpec: J must be >= 1");
    if (alphabet_x < 1) throw std::invalid_argument("SystemSpec: empty encoder alphabet");
    auto need_j = [&](const auto& v, const char* name) {
        if (static_cast<int>(v.size()) != J)
            throw std::invalid_argument(std::string("SystemSpec: ") + name +
                                        " must have one entry per decoder");
    };
    need_j(alphabet_y, "alphabet_y");
    need_j(alphabet_z, "alphabet_z");
    need_j(alphabet_zt, "alphabet_zt");
    need_j(d1, "d1");
    need_j(d_max, "d_max");
    for (int j = 0; j < J; ++j)
        if (alphabet_y[j] < 1 || alphabet_z[j] < 1 || alphabet_zt[j] < 1)
            throw std::invalid_argument("SystemSpec: empty decoder alphabet");

    const std::uint64_t row_len = y_product() * z_product();
    if (w.size() != static_cast<std::size_t>(alphabet_x))
        throw std::invalid_argument("SystemSpec: w needs one row per encoder symbol");
    for (const auto& row : w) {
        if (row.size() != row_len)
            throw std::invalid_argument("SystemSpec: w row length mismatch");
        check_stochastic_row(row, "SystemSpec w");
    }

    double global = 0.0;
    for (int j = 0; j < J; ++j) {
        if (d1[j].size() != static_cast<std::size_t>(alphabet_zt[j]) * alphabet_z[j])
            throw std::invalid_argument("SystemSpec: d1 table size mismatch");
        if (!(d_max[j] >= 0.0))
            throw std::invalid_argument("SystemSpec: negative distortion ceiling");
        for (double d : d1[j])
            if (!(d >= 0.0) || d > d_max[j])
                throw std::invalid_argument("SystemSpec: distortion entry outside [0, d_max]");
        global = std::max(global, d_max[j]);
    }
    if (d_max_global != global)
        throw std::invalid_argument("SystemSpec: d_max_global != max_j d_max[j]");
}

void finalize_spec(SystemSpec& spec) {
    if (spec.d_max.empty()) {
        spec.d_max.resize(spec.d1.size());
        for (std::size_t j = 0; j < spec.d1.size(); ++j) {
            double m = 0.0;
            for (double d : spec.d1[j]) m = std::max(m, d);
            spec.d_max[j] = m;
        }
    }
    spec.d_max_global = 0.0;
    for (double m : spec.d_max) spec.d_max_global = std::max(spec.d_max_global, m);
    spec.validate();
}

MarginalChannel marginal_channel(const SystemSpec& spec, int j) {
    if (j < 0 || j >= spec.J)
        throw std::invalid_argument("marginal_channel: decoder index out of range");
    MarginalChannel m;
    m.j = j;
    m.nx = spec.alphabet_x;
    m.ny = spec.alphabet_y[j];
    m.nz = spec.alphabet_z[j];
    m.table.assign(static_cast<std::size_t>(m.nx) * m.ny * m.nz, 0.0);

    const std::uint64_t zp = spec.z_product();
    std::vector<Symbol> ys(spec.J), zs(spec.J);
    for (int x = 0; x < m.nx; ++x) {
        const auto& row = spec.w[x];
        for (std::uint64_t yz = 0; yz < row.size(); ++yz) {
            if (row[yz] == 0.0) continue;
            spec.unpack_y(yz / zp, ys);
            spec.unpack_z(yz % zp, zs);
            m.table[(static_cast<std::size_t>(x) * m.ny + ys[j]) * m.nz + zs[j]] += row[yz];
        }
    }
    return m;
}

double MarginalChannel::side_prob(Symbol x, Symbol y) const {
    double s = 0.0;
    for (int z = 0; z < nz; ++z) s += p(x, y, z);
    return s;
}

std::vector<double> target_marginal(const SystemSpec& spec, int j) {
    MarginalChannel m = marginal_channel(spec, j);
    std::vector<double> t(static_cast<std::size_t>(m.nx) * m.nz, 0.0);
    for (int x = 0; x < m.nx; ++x)
        for (int y = 0; y < m.ny; ++y)
            for (int z = 0; z < m.nz; ++z)
                t[static_cast<std::size_t>(x) * m.nz + z] += m.p(x, y, z);
    return t;
}

std::vector<double> stationary_distribution(const std::vector<std::vector<double>>& T) {
    const std::size_t H = T.size();
    // (T^t - I) pi = 0 with the normalization sum(pi) = 1 replacing one row
    std::vector<std::vector<double>> A(H, std::vector<double>(H + 1, 0.0));
    for (std::size_t r = 0; r + 1 < H; ++r) {
        for (std::size_t c = 0; c < H; ++c) A[r][c] = T[c][r] - (r == c ? 1.0 : 0.0);
        A[r][H] = 0.0;
    }
    for (std::size_t c = 0; c < H; ++c) A[H - 1][c] = 1.0;
    A[H - 1][H] = 1.0;

    for (std::size_t col = 0; col < H; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < H; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        std::swap(A[col], A[piv]);
        if (std::abs(A[col][col]) < 1e-300)
            throw std::invalid_argument("stationary_distribution: singular system");
        for (std::size_t r = 0; r < H; ++r) {
            if (r == col) continue;
            double f = A[r][col] / A[col][col];
            if (f == 0.0) continue;
            for (std::size_t c = col; c <= H; ++c) A[r][c] -= f * A[col][c];
        }
    }
    std::vector<double> pi(H);
    for (std::size_t r = 0; r < H; ++r) pi[r] = A[r][H] / A[r][r];

    for (double p : pi)
        if (!(p >= -1e-12))
            throw std::invalid_argument("stationary_distribution: negative mass");
    double resid = 0.0;
    for (std::size_t c = 0; c < H; ++c) {
        double col = 0.0;
        for (std::size_t r = 0; r < H; ++r) col += pi[r] * T[r][c];
        resid = std::max(resid, std::abs(col - pi[c]));
    }
    if (resid > 1e-12)
        throw std::runtime_error("stationary_distribution: solve residual above 1e-12");
    return pi;
}

SourceModel iid_source(std::vector<double> pmf) {
    check_stochastic_row(pmf, "iid_source pmf");
    SourceModel s;
    s.kind = SourceModel::Kind::iid;
    s.nx = static_cast<int>(pmf.size());
    s.pmf = std::move(pmf);
    return s;
}

SourceModel markov_source(std::vector<std::vector<double>> transition) {
    const std::size_t H = transition.size();
    if (H < 1) throw std::invalid_argument("markov_source: empty chain");
    for (const auto& row : transition) {
        if (row.size() != H) throw std::invalid_argument("markov_source: non-square matrix");
        check_stochastic_row(row, "markov_source transition");
    }
    check_ergodic(transition);
    SourceModel s;
    s.kind = SourceModel::Kind::markov;
    s.nx = static_cast<int>(H);
    s.start = stationary_distribution(transition);
    s.transition = std::move(transition);
    return s;
}

SourceModel function_of_markov_source(std::vector<std::vector<double>> transition,
                                      std::vector<Symbol> emit, int nx) {
    const std::size_t H = transition.size();
    if (H < 1) throw std::invalid_argument("function_of_markov_source: empty chain");
    if (emit.size() != H)
        throw std::invalid_argument("function_of_markov_source: one emission per state");
    for (Symbol e : emit)
        if (e < 0 || e >= nx)
            throw std::invalid_argument("function_of_markov_source: emission out of alphabet");
    for (const auto& row : transition) {
        if (row.size() != H)
            throw std::invalid_argument("function_of_markov_source: non-square matrix");
        check_stochastic_row(row, "function_of_markov_source transition");
    }
    check_ergodic(transition);
    SourceModel s;
    s.kind = SourceModel::Kind::function_of_markov;
    s.nx = nx;
    s.start = stationary_distribution(transition);
    s.transition = std::move(transition);
    s.emit = std::move(emit);
    return s;
}

std::vector<Symbol> sample_source(const SourceModel& source, std::size_t n, Rng& rng) {
    if (n < 1) throw std::invalid_argument("sample_source: n must be positive");
    std::vector<Symbol> x(n);
    switch (source.kind) {
        case SourceModel::Kind::iid:
            for (auto& s : x) s = rng.sample_pmf(source.pmf);
            break;
        case SourceModel::Kind::markov: {
            Symbol cur = rng.sample_pmf(source.start);
            x[0] = cur;
            for (std::size_t i = 1; i < n; ++i) {
                cur = rng.sample_pmf(source.transition[cur]);
                x[i] = cur;
            }
            break;
        }
        case SourceModel::Kind::function_of_markov: {
            Symbol h = rng.sample_pmf(source.start);
            x[0] = source.emit[h];
            for (std::size_t i = 1; i < n; ++i) {
                h = rng.sample_pmf(source.transition[h]);
                x[i] = source.emit[h];
            }
            break;
        }
    }
    return x;
}

std::vector<double> block_pmf(const SourceModel& source, int l) {
    if (l < 1) throw std::invalid_argument("block_pmf: l must be positive");
    const std::uint64_t words = checked_pow(source.nx, static_cast<std::uint64_t>(l));
    std::vector<double> pmf(words, 0.0);
    std::vector<Symbol> a(l);
    for (std::uint64_t idx = 0; idx < words; ++idx) {
        unpack_word(idx, source.nx, l, a);
        double p = 0.0;
        switch (source.kind) {
            case SourceModel::Kind::iid: {
                p = 1.0;
                for (Symbol s : a) p *= source.pmf[s];
                break;
            }
            case SourceModel::Kind::markov: {
                p = source.start[a[0]];
                for (int i = 1; i < l; ++i) p *= source.transition[a[i - 1]][a[i]];
                break;
            }
            case SourceModel::Kind::function_of_markov: {
                const std::size_t H = source.transition.size();
                std::vector<double> alpha(H, 0.0);
                for (std::size_t h = 0; h < H; ++h)
                    if (source.emit[h] == a[0]) alpha[h] = source.start[h];
                for (int i = 1; i < l; ++i) {
                    std::vector<double> next(H, 0.0);
                    for (std::size_t h = 0; h < H; ++h) {
                        if (alpha[h] == 0.0) continue;
                        for (std::size_t g = 0; g < H; ++g)
                            if (source.emit[g] == a[i])
                                next[g] += alpha[h] * source.transition[h][g];
                    }
                    alpha = std::move(next);
                }
                for (double v : alpha) p += v;
                break;
            }
        }
        pmf[idx] = p;
    }
    return pmf;
}

ChannelDraw sample_channel(const SystemSpec& spec, std::span<const Symbol> x, Rng& rng) {
    const std::uint64_t zp = spec.z_product();
    const std::size_t row_len = spec.w.empty() ? 0 : spec.w[0].size();

    // per-symbol inclusive CDF rows, built on first use
    std::vector<std::vector<double>> cdf(spec.alphabet_x);
    auto row_cdf = [&](Symbol s) -> const std::vector<double>& {
        auto& c = cdf[s];
        if (c.empty()) {
            c.resize(row_len);
            double acc = 0.0;
            for (std::size_t i = 0; i < row_len; ++i) {
                acc += spec.w[s][i];
                c[i] = acc;
            }
            c.back() = 1.0;
        }
        return c;
    };

    ChannelDraw draw;
    draw.y.assign(spec.J, std::vector<Symbol>(x.size()));
    draw.z.assign(spec.J, std::vector<Symbol>(x.size()));
    std::vector<Symbol> ys(spec.J), zs(spec.J);
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] < 0 || x[i] >= spec.alphabet_x)
            throw std::invalid_argument("sample_channel: symbol out of alphabet");
        std::uint64_t yz = static_cast<std::uint64_t>(rng.sample_cdf(row_cdf(x[i])));
        spec.unpack_y(yz / zp, ys);
        spec.unpack_z(yz % zp, zs);
        for (int j = 0; j < spec.J; ++j) {
            draw.y[j][i] = ys[j];
            draw.z[j][i] = zs[j];
        }
    }
    return draw;
}

double block_distortion(const SystemSpec& spec, int j,
                        std::span<const Symbol> zt, std::span<const Symbol> z) {
    if (j < 0 || j >= spec.J)
        throw std::invalid_argument("block_distortion: decoder index out of range");
    if (zt.size() != z.size() || zt.empty())
        throw std::invalid_argument("block_distortion: length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < zt.size(); ++i) {
        if (zt[i] < 0 || zt[i] >= spec.alphabet_zt[j] || z[i] < 0 || z[i] >= spec.alphabet_z[j])
            throw std::invalid_argument("block_distortion: symbol out of alphabet");
        acc += spec.distortion(j, zt[i], z[i]);
    }
    return acc / static_cast<double>(zt.size());
}

} // namespace umc
