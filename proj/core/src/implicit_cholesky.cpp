#include "lmcma/implicit_cholesky.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lmcma/error.hpp"

namespace lmcma {

namespace {

double dot(std::span<const double> x, std::span<const double> y) {
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) sum += x[i] * y[i];
    return sum;
}

}  // namespace

PairCoefficients pair_coefficients(double v_norm_sq, double c1) {
    detail::require(std::isfinite(v_norm_sq) && v_norm_sq >= 0.0,
                    "pair_coefficients: squared norm must be finite and non-negative");
    detail::require(c1 > 0.0 && c1 < 1.0, "pair_coefficients: c1 must lie in (0, 1)");

    const double a = std::sqrt(1.0 - c1);
    const double gamma = c1 / (1.0 - c1);
    if (v_norm_sq < kDegenerateNormSq) {
        return {a * gamma / 2.0, gamma / (2.0 * a)};
    }
    const double root = std::sqrt(1.0 + gamma * v_norm_sq);
    // (root - 1) / s rewritten as gamma / (root + 1) to avoid cancellation for small s.
    const double ratio = gamma / (root + 1.0);
    return {a * ratio, ratio / (a * root)};
}

std::size_t select_eviction(std::span<const std::int64_t> stamps, std::int64_t spacing) {
    detail::require(!stamps.empty(), "select_eviction: no entries");
    std::size_t victim = 0;
    auto smallest_gap = std::numeric_limits<std::int64_t>::max();
    for (std::size_t i = 1; i < stamps.size(); ++i) {
        const auto gap = stamps[i] - stamps[i - 1];
        if (gap < spacing && gap < smallest_gap) {
            smallest_gap = gap;
            victim = i;
        }
    }
    return victim;
}

PairArchive::PairArchive(std::size_t dimension, std::size_t capacity, double c1)
    : dimension_(dimension), capacity_(capacity), c1_(c1), a_(std::sqrt(1.0 - c1)) {
    detail::require(dimension >= 1, "PairArchive: dimension must be positive");
    detail::require(capacity >= 1, "PairArchive: capacity must be positive");
    detail::require(c1 > 0.0 && c1 < 1.0, "PairArchive: c1 must lie in (0, 1)");
    entries_.reserve(capacity + 1);
}

Vector PairArchive::multiply(std::span<const double> z, OpCounts* counts) const {
    detail::require(z.size() == dimension_, "PairArchive::multiply: dimension mismatch");
    Vector x(z.begin(), z.end());
    for (const auto& entry : entries_) {
        const double scale = entry.b * dot(entry.v, z);
        for (std::size_t i = 0; i < dimension_; ++i) x[i] = a_ * x[i] + scale * entry.p[i];
        if (counts) {
            ++counts->dot_products;
            ++counts->scaled_additions;
        }
    }
    return x;
}

Vector PairArchive::multiply_inverse(std::span<const double> z,
                                     std::optional<std::size_t> prefix_len,
                                     OpCounts* counts) const {
    detail::require(z.size() == dimension_,
                    "PairArchive::multiply_inverse: dimension mismatch");
    const std::size_t used = prefix_len.value_or(entries_.size());
    detail::require(used <= entries_.size(),
                    "PairArchive::multiply_inverse: prefix length out of range");

    const double inv_a = 1.0 / a_;
    Vector y(z.begin(), z.end());
    for (std::size_t j = 0; j < used; ++j) {
        const auto& entry = entries_[j];
        const double scale = entry.d * dot(entry.v, y);
        for (std::size_t i = 0; i < dimension_; ++i) y[i] = inv_a * y[i] - scale * entry.v[i];
        if (counts) {
            ++counts->dot_products;
            ++counts->scaled_additions;
        }
    }
    return y;
}

void PairArchive::insert(std::span<const double> p, std::int64_t stamp, std::int64_t spacing) {
    detail::require(p.size() == dimension_, "PairArchive::insert: dimension mismatch");
    if (!std::all_of(p.begin(), p.end(), [](double value) { return std::isfinite(value); })) {
        throw InputError("PairArchive::insert: direction has non-finite components");
    }
    detail::require(entries_.empty() || stamp > entries_.back().stamp,
                    "PairArchive::insert: stamps must strictly increase");

    PairEntry entry;
    entry.stamp = stamp;
    entry.p.assign(p.begin(), p.end());
    entries_.push_back(std::move(entry));
    refresh_entry(entries_.size() - 1);

    if (entries_.size() > capacity_) {
        std::vector<std::int64_t> stamps;
        stamps.reserve(entries_.size());
        for (const auto& e : entries_) stamps.push_back(e.stamp);
        remove(select_eviction(stamps, spacing));
    }
}

void PairArchive::remove(std::size_t index) {
    detail::require(index < entries_.size(), "PairArchive::remove: index out of range");
    entries_.erase(entries_.begin() + static_cast<std::ptrdiff_t>(index));
    rebuild_suffix(index);
}

void PairArchive::rebuild_suffix(std::size_t from_index) {
    detail::require(from_index <= entries_.size(),
                    "PairArchive::rebuild_suffix: index out of range");
    for (std::size_t j = from_index; j < entries_.size(); ++j) refresh_entry(j);
}

void PairArchive::refresh_entry(std::size_t index) {
    auto& entry = entries_[index];
    entry.v = multiply_inverse(entry.p, index);
    entry.v_norm_sq = dot(entry.v, entry.v);
    const auto coefficients = pair_coefficients(entry.v_norm_sq, c1_);
    entry.b = coefficients.b;
    entry.d = coefficients.d;
}

DenseMatrix PairArchive::explicit_factor() const {
    if (dimension_ > kMaxExplicitDimension) {
        throw ContractError("PairArchive::explicit_factor: dimension " +
                            std::to_string(dimension_) + " exceeds the explicit limit");
    }
    const std::size_t n = dimension_;
    DenseMatrix factor{n, std::vector<double>(n * n, 0.0)};
    for (std::size_t i = 0; i < n; ++i) factor(i, i) = 1.0;
    for (const auto& entry : entries_) {
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < n; ++c) {
                factor(r, c) = a_ * factor(r, c) + entry.b * entry.p[r] * entry.v[c];
            }
        }
    }
    return factor;
}

}  // namespace lmcma
