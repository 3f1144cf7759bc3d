#include "twistlab/theta.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <numeric>

#include <Eigen/Dense>

#include "twistlab/errors.hpp"

namespace twistlab {

Rational parse_rational(const std::string& text) {
    auto trim = [](std::string s) {
        s.erase(0, s.find_first_not_of(" \t"));
        s.erase(s.find_last_not_of(" \t") + 1);
        return s;
    };
    const std::string s = trim(text);
    if (s.empty()) throw DataError("empty rational");
    try {
        std::size_t used = 0;
        const auto slash = s.find('/');
        if (slash == std::string::npos) {
            const std::int64_t num = std::stoll(s, &used);
            if (used != s.size()) throw DataError("bad rational '" + text + "'");
            return Rational(num);
        }
        const std::string ns = trim(s.substr(0, slash));
        const std::string ds = trim(s.substr(slash + 1));
        const std::int64_t num = std::stoll(ns, &used);
        if (used != ns.size()) throw DataError("bad rational '" + text + "'");
        const std::int64_t den = std::stoll(ds, &used);
        if (used != ds.size() || den == 0) throw DataError("bad rational '" + text + "'");
        return Rational(num, den);
    } catch (const std::logic_error&) {
        throw DataError("bad rational '" + text + "'");
    }
}

std::int64_t TernaryForm::gram_determinant() const {
    const auto [b1, b2, b3, b4, b5, b6] = beta;
    return 2 * b1 * (4 * b2 * b3 - b4 * b4) - b6 * (2 * b3 * b6 - b4 * b5) + b5 * (b6 * b4 - 2 * b2 * b5);
}

bool TernaryForm::positive_definite() const {
    const auto [b1, b2, b3, b4, b5, b6] = beta;
    (void)b3;
    (void)b4;
    (void)b5;
    return b1 > 0 && 4 * b1 * b2 - b6 * b6 > 0 && gram_determinant() > 0;
}

double TernaryForm::min_eigenvalue() const {
    const auto [b1, b2, b3, b4, b5, b6] = beta;
    Eigen::Matrix3d a;
    a << double(b1), b6 / 2.0, b5 / 2.0, b6 / 2.0, double(b2), b4 / 2.0, b5 / 2.0, b4 / 2.0, double(b3);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(a, Eigen::EigenvaluesOnly);
    return solver.eigenvalues()(0);
}

std::int64_t HalfIntegralForm::denominator() const {
    std::int64_t den = 1;
    for (const Rational& a : alphas) den = std::lcm(den, a.denominator());
    return den;
}

std::int64_t CoefficientTable::at(std::int64_t n) const {
    if (n < 2 || n > bound) throw DomainError("coefficient index " + std::to_string(n) + " outside [2, " +
                                              std::to_string(bound) + "]");
    const std::int64_t v = values[static_cast<std::size_t>(n)];
    if (v == kNonIntegral) throw DataError("c(" + std::to_string(n) + ") of " + curve + " is not integral");
    return v;
}

namespace {

using i128 = __int128;

// Closed interval of integers t with a t^2 + b t + c <= 0, widened by one on
// each side; empty (lo > hi) when the discriminant is clearly negative.
std::pair<std::int64_t, std::int64_t> widened_roots(double a, double b, double c) {
    double disc = b * b - 4.0 * a * c;
    const double scale = b * b + std::abs(4.0 * a * c);
    if (disc < -1e-9 * scale) return {1, 0};
    disc = std::max(disc, 0.0);
    const double s = std::sqrt(disc);
    const double lo = (-b - s) / (2.0 * a);
    const double hi = (-b + s) / (2.0 * a);
    return {static_cast<std::int64_t>(std::floor(lo)) - 1, static_cast<std::int64_t>(std::ceil(hi)) + 1};
}

}  // namespace

std::vector<std::int64_t> representation_numbers(const TernaryForm& form, std::int64_t bound) {
    if (!form.positive_definite()) throw DomainError("ternary form is not positive definite");
    if (bound < 0) throw DomainError("negative bound");
    if (bound > (std::int64_t{1} << 40)) throw DomainError("bound too large for 64-bit enumeration");
    for (std::int64_t b : form.beta)
        if (std::llabs(b) > (std::int64_t{1} << 20)) throw DomainError("form coefficient too large");

    const auto [b1, b2, b3, b4, b5, b6] = form.beta;
    const double X = static_cast<double>(bound);
    const double det = static_cast<double>(form.gram_determinant());

    std::vector<std::int64_t> r(static_cast<std::size_t>(bound) + 1, 0);
    std::int64_t* counts = r.data();

    const double cof_x = static_cast<double>(4 * b2 * b3 - b4 * b4);
    const auto x_max = static_cast<std::int64_t>(std::floor(std::sqrt(2.0 * X * cof_x / det))) + 1;

    // y-projection of the slice at fixed x, scaled by 4 b3.
    const double ay = static_cast<double>(4 * b2 * b3 - b4 * b4);
    const double by_per_x = static_cast<double>(4 * b3 * b6 - 2 * b4 * b5);
    const double cy_per_x2 = static_cast<double>(4 * b1 * b3 - b5 * b5);

    for (std::int64_t x = 0; x <= x_max; ++x) {
        const std::int64_t weight = x == 0 ? 1 : 2;
        const double xd = static_cast<double>(x);
        const auto [y_lo, y_hi] = widened_roots(ay, by_per_x * xd, cy_per_x2 * xd * xd - 4.0 * b3 * X);
        for (std::int64_t y = y_lo; y <= y_hi; ++y) {
            const std::int64_t lin = b4 * y + b5 * x;
            const std::int64_t con = b1 * x * x + b2 * y * y + b6 * x * y;
            const i128 disc = i128(lin) * lin - i128(4) * b3 * (i128(con) - bound);
            if (disc < 0) continue;
            const double s = std::sqrt(static_cast<double>(disc));
            auto value = [&](std::int64_t z) { return b3 * z * z + lin * z + con; };
            auto zlo = static_cast<std::int64_t>(std::ceil((-static_cast<double>(lin) - s) / (2.0 * b3)));
            auto zhi = static_cast<std::int64_t>(std::floor((-static_cast<double>(lin) + s) / (2.0 * b3)));
            while (value(zlo - 1) <= bound) --zlo;
            while (zlo <= zhi && value(zlo) > bound) ++zlo;
            while (value(zhi + 1) <= bound) ++zhi;
            while (zhi >= zlo && value(zhi) > bound) --zhi;
            if (zlo > zhi) continue;

            std::int64_t v = value(zlo);
            std::int64_t step = b3 * (2 * zlo + 1) + lin;
            const std::int64_t step2 = 2 * b3;
            for (std::int64_t z = zlo; z <= zhi; ++z) {
                counts[v] += weight;
                v += step;
                step += step2;
            }
        }
    }
    return r;
}

CoefficientTable combine(const std::string& curve, const HalfIntegralForm& half, std::int64_t bound,
                         const std::function<bool(std::int64_t)>& required) {
    if (half.forms.size() != half.alphas.size() || half.forms.empty())
        throw DataError("form/alpha count mismatch for " + curve);
    if (bound < 2) throw DomainError("coefficient bound must be at least 2");
    const std::int64_t den = half.denominator();

    std::vector<std::int64_t> sum(static_cast<std::size_t>(bound) + 1, 0);
    for (std::size_t j = 0; j < half.forms.size(); ++j) {
        const Rational scaled = half.alphas[j] * den;
        const std::int64_t w = scaled.numerator();
        const std::vector<std::int64_t> r = representation_numbers(half.forms[j], bound);
        for (std::size_t n = 0; n < r.size(); ++n) sum[n] += w * r[n];
    }

    CoefficientTable table;
    table.curve = curve;
    table.bound = bound;
    table.values.assign(static_cast<std::size_t>(bound) + 1, 0);
    for (std::int64_t n = 2; n <= bound; ++n) {
        if (sum[n] % den == 0) {
            table.values[n] = sum[n] / den;
        } else if (!required || required(n)) {
            throw DataError("non-integral coefficient c(" + std::to_string(n) + ") for " + curve);
        } else {
            table.values[n] = kNonIntegral;
        }
    }
    return table;
}

double lvalue_from_coefficient(double kappa, std::int64_t c, std::int64_t d) {
    if (c == 0) return 0.0;
    const double cd = static_cast<double>(c);
    return kappa * cd * cd / std::sqrt(static_cast<double>(std::llabs(d)));
}

// ---------------------------------------------------------------------------
// cache
// ---------------------------------------------------------------------------

std::uint64_t fnv1a64(std::span<const unsigned char> bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace {

constexpr unsigned char kMagic[4] = {'T', 'L', 'C', 'C'};
constexpr std::size_t kHeaderSize = 32;

void put_u64(std::vector<unsigned char>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

std::uint64_t get_u64(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(p[i]) << (8 * i);
    return v;
}

std::uint64_t name_digest(const std::string& name) {
    return fnv1a64({reinterpret_cast<const unsigned char*>(name.data()), name.size()});
}

}  // namespace

void cache_store(const CoefficientTable& table, const std::filesystem::path& path) {
    if (table.bound < 2 || table.values.size() != static_cast<std::size_t>(table.bound) + 1)
        throw DataError("malformed coefficient table");
    const std::uint64_t count = static_cast<std::uint64_t>(table.bound - 1);

    std::vector<unsigned char> buf;
    buf.reserve(kHeaderSize + 8 * count + 8);
    buf.insert(buf.end(), std::begin(kMagic), std::end(kMagic));
    buf.push_back(static_cast<unsigned char>(kCacheVersion & 0xff));
    buf.push_back(static_cast<unsigned char>(kCacheVersion >> 8));
    buf.push_back(0);
    buf.push_back(0);
    put_u64(buf, name_digest(table.curve));
    put_u64(buf, static_cast<std::uint64_t>(table.bound));
    put_u64(buf, count);
    for (std::int64_t n = 2; n <= table.bound; ++n) put_u64(buf, static_cast<std::uint64_t>(table.values[n]));
    put_u64(buf, fnv1a64({buf.data() + kHeaderSize, 8 * count}));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write cache " + path.string());
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) throw DataError("short write to cache " + path.string());
}

CoefficientTable cache_load(const std::filesystem::path& path, const std::string& curve) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open cache " + path.string());
    const std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    if (buf.size() < kHeaderSize + 8) throw DataError("cache truncated: " + path.string());
    if (!std::equal(std::begin(kMagic), std::end(kMagic), buf.begin())) throw DataError("bad cache magic");
    const unsigned version = buf[4] | (unsigned(buf[5]) << 8);
    if (version != kCacheVersion) throw DataError("unsupported cache version " + std::to_string(version));
    if (get_u64(&buf[8]) != name_digest(curve)) throw DataError("cache belongs to a different curve");
    const auto bound = static_cast<std::int64_t>(get_u64(&buf[16]));
    const std::uint64_t count = get_u64(&buf[24]);
    if (bound < 2 || count != static_cast<std::uint64_t>(bound - 1)) throw DataError("inconsistent cache header");
    if (buf.size() != kHeaderSize + 8 * count + 8) throw DataError("cache truncated: " + path.string());
    if (get_u64(&buf[kHeaderSize + 8 * count]) != fnv1a64({buf.data() + kHeaderSize, 8 * count}))
        throw DataError("cache checksum mismatch");

    CoefficientTable table;
    table.curve = curve;
    table.bound = bound;
    table.values.assign(static_cast<std::size_t>(bound) + 1, 0);
    for (std::uint64_t i = 0; i < count; ++i)
        table.values[i + 2] = static_cast<std::int64_t>(get_u64(&buf[kHeaderSize + 8 * i]));
    return table;
}

CoefficientTable cache_load(const std::filesystem::path& path, const std::string& curve, std::int64_t bound) {
    CoefficientTable table = cache_load(path, curve);
    if (table.bound != bound)
        throw DataError("cache bound " + std::to_string(table.bound) + " != requested " + std::to_string(bound));
    return table;
}

}  // namespace twistlab
