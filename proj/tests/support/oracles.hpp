#pragma once

// Independent reference implementations used only by tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "epc/core/matrix.hpp"
#include "epc/dataset/lst.hpp"

namespace oracle {

// Exact rational with int64 parts, always normalised (den > 0).
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational(std::int64_t n = 0, std::int64_t d = 1) : num(n), den(d) {
        if (den == 0) throw std::domain_error("zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        const auto g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }
    friend Rational operator+(Rational a, Rational b) { return {a.num * b.den + b.num * a.den, a.den * b.den}; }
    friend Rational operator*(Rational a, Rational b) { return {a.num * b.num, a.den * b.den}; }
    friend Rational operator/(Rational a, Rational b) { return {a.num * b.den, a.den * b.num}; }
    bool is_zero() const { return num == 0; }
    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
};

struct RationalScores {
    Rational precision, recall, f1;
    bool precision_undefined = false;
    bool recall_undefined = false;
};

struct RationalMacro {
    RationalScores per_class[2];
    Rational precision, recall, f1;
};

// counts[true][pred]
inline RationalMacro macro_rational(const std::int64_t counts[2][2]) {
    RationalMacro out;
    for (int c = 0; c < 2; ++c) {
        const std::int64_t tp = counts[c][c];
        const std::int64_t predicted = counts[0][c] + counts[1][c];
        const std::int64_t actual = counts[c][0] + counts[c][1];
        auto& s = out.per_class[c];
        s.precision_undefined = predicted == 0;
        s.recall_undefined = actual == 0;
        s.precision = predicted == 0 ? Rational(0) : Rational(tp, predicted);
        s.recall = actual == 0 ? Rational(0) : Rational(tp, actual);
        const Rational sum = s.precision + s.recall;
        s.f1 = sum.is_zero() ? Rational(0) : Rational(2) * s.precision * s.recall / sum;
    }
    const Rational half(1, 2);
    out.precision = (out.per_class[0].precision + out.per_class[1].precision) * half;
    out.recall = (out.per_class[0].recall + out.per_class[1].recall) * half;
    out.f1 = (out.per_class[0].f1 + out.per_class[1].f1) * half;
    return out;
}

// Winding-number point-in-polygon (non-zero rule; equals even-odd for simple rings).
inline bool inside_winding(std::span<const epc::dataset::Point2> ring, epc::dataset::Point2 p) {
    int winding = 0;
    const std::size_t n = ring.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& a = ring[i];
        const auto& b = ring[(i + 1) % n];
        const double cross = (b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y);
        if (a.y <= p.y) {
            if (b.y > p.y && cross > 0) ++winding;
        } else if (b.y <= p.y && cross < 0) {
            --winding;
        }
    }
    return winding != 0;
}

inline epc::dataset::Point2 area_centroid(std::span<const epc::dataset::Point2> ring) {
    double a = 0.0, cx = 0.0, cy = 0.0;
    for (std::size_t i = 0; i < ring.size(); ++i) {
        const auto& p = ring[i];
        const auto& q = ring[(i + 1) % ring.size()];
        const double w = p.x * q.y - q.x * p.y;
        a += w;
        cx += (p.x + q.x) * w;
        cy += (p.y + q.y) * w;
    }
    return {cx / (3.0 * a), cy / (3.0 * a)};
}

// Values of every (pixel, date) pair that the zonal rule admits, by exhaustive
// enumeration of every pixel of every grid.
inline std::vector<double> zonal_values(std::span<const epc::dataset::LstObservation> obs,
                                        std::span<const epc::dataset::Point2> ring, double threshold) {
    std::vector<double> out;
    const auto centroid = area_centroid(ring);
    for (const auto& o : obs) {
        if (!(o.ground_temp < threshold)) continue;
        const auto& g = o.grid;
        bool any = false;
        for (int r = 0; r < g.nrows; ++r) {
            for (int c = 0; c < g.ncols; ++c) {
                const double x = g.xll + (c + 0.5) * g.cellsize;
                const double y = g.yll + (g.nrows - r - 0.5) * g.cellsize;
                if (!inside_winding(ring, {x, y})) continue;
                any = true;
                if (std::isfinite(g.at(r, c))) out.push_back(g.at(r, c));
            }
        }
        const bool covered = centroid.x >= g.xll && centroid.x <= g.xll + g.ncols * g.cellsize &&
                             centroid.y >= g.yll && centroid.y <= g.yll + g.nrows * g.cellsize;
        if (any || !covered) continue;
        double best = std::numeric_limits<double>::infinity();
        double value = 0.0;
        for (int r = 0; r < g.nrows; ++r) {
            for (int c = 0; c < g.ncols; ++c) {
                const double dx = g.xll + (c + 0.5) * g.cellsize - centroid.x;
                const double dy = g.yll + (g.nrows - r - 0.5) * g.cellsize - centroid.y;
                if (dx * dx + dy * dy < best) {
                    best = dx * dx + dy * dy;
                    value = g.at(r, c);
                }
            }
        }
        if (std::isfinite(value)) out.push_back(value);
    }
    return out;
}

// Central finite differences of f at x, step h.
inline std::vector<double> numeric_gradient(const std::function<double(std::span<const double>)>& f,
                                            std::vector<double> x, double h) {
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double saved = x[i];
        x[i] = saved + h;
        const double up = f(x);
        x[i] = saved - h;
        const double down = f(x);
        x[i] = saved;
        g[i] = (up - down) / (2.0 * h);
    }
    return g;
}

// max_i |a_i - n_i| / max(|a_i|, |n_i|, 1e-6)
inline double max_relative_error(std::span<const double> analytic, std::span<const double> numeric) {
    double worst = 0.0;
    for (std::size_t i = 0; i < analytic.size(); ++i) {
        const double denom = std::max({std::abs(analytic[i]), std::abs(numeric[i]), 1e-6});
        worst = std::max(worst, std::abs(analytic[i] - numeric[i]) / denom);
    }
    return worst;
}

// Brute-force k nearest rows: full sort of (distance, index).
inline std::vector<std::size_t> knn_scan(std::span<const double> q, const epc::Matrix& x, std::size_t k) {
    std::vector<std::pair<double, std::size_t>> all;
    for (std::size_t r = 0; r < x.rows(); ++r) {
        double d = 0.0;
        for (std::size_t j = 0; j < q.size(); ++j) d += (x(r, j) - q[j]) * (x(r, j) - q[j]);
        all.emplace_back(d, r);
    }
    std::sort(all.begin(), all.end());
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < k; ++i) out.push_back(all[i].second);
    return out;
}

// Minimum within-cluster sum of squares of 1-D points over every 2-partition.
inline double best_two_partition(std::span<const double> xs) {
    const std::size_t n = xs.size();
    double best = std::numeric_limits<double>::infinity();
    for (std::uint32_t mask = 1; mask + 1 < (1u << n); ++mask) {
        double sum[2] = {0, 0};
        int cnt[2] = {0, 0};
        for (std::size_t i = 0; i < n; ++i) {
            const int g = (mask >> i) & 1u;
            sum[g] += xs[i];
            ++cnt[g];
        }
        double sse = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const int g = (mask >> i) & 1u;
            const double m = sum[g] / cnt[g];
            sse += (xs[i] - m) * (xs[i] - m);
        }
        best = std::min(best, sse);
    }
    return best;
}

} // namespace oracle
