#pragma once

// Limited-memory representation of a Cholesky factor A (C = A * A^T).
//
// A is never stored. It is the product of the identity with m rank-one
// updates A_j = a * A_{j-1} + b_j * p_j * v_j^T, where p_j is a saved
// evolution path and v_j = A_{j-1}^{-1} * p_j. Products with A and A^{-1}
// then cost O(n * m).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace lmcma {

using Vector = std::vector<double>;

/// Counts the vector kernels executed by the factor products.
struct OpCounts {
    std::size_t dot_products = 0;
    std::size_t scaled_additions = 0;
};

struct PairCoefficients {
    double b = 0.0;  ///< forward rank-one coefficient
    double d = 0.0;  ///< inverse rank-one coefficient
};

/// Squared norms below this use the analytic small-norm limits.
inline constexpr double kDegenerateNormSq = 1e-30;

/// Coefficients for one rank-one step of the factor and its inverse, such
/// that (a*I + b*v*v^T)^2 = a^2*I + c1*v*v^T and (a*I + b*v*v^T)^{-1} =
/// (1/a)*I - d*v*v^T with a = sqrt(1 - c1).
PairCoefficients pair_coefficients(double v_norm_sq, double c1);

struct PairEntry {
    std::int64_t stamp = 0;
    Vector p;
    Vector v;
    double v_norm_sq = 0.0;
    double b = 0.0;
    double d = 0.0;
};

/// Index of the entry to drop from an over-full, chronologically ordered
/// stamp list. The entry ending the smallest gap shorter than `spacing`
/// goes first (earliest on ties); with no short gap, the oldest goes.
std::size_t select_eviction(std::span<const std::int64_t> stamps, std::int64_t spacing);

/// Row-major dense square matrix; only produced for small test sizes.
struct DenseMatrix {
    std::size_t n = 0;
    std::vector<double> data;

    double& operator()(std::size_t row, std::size_t col) { return data[row * n + col]; }
    double operator()(std::size_t row, std::size_t col) const { return data[row * n + col]; }
};

class PairArchive {
public:
    /// Largest dimension accepted by explicit_factor().
    static constexpr std::size_t kMaxExplicitDimension = 64;

    PairArchive(std::size_t dimension, std::size_t capacity, double c1);

    std::size_t dimension() const noexcept { return dimension_; }
    std::size_t capacity() const noexcept { return capacity_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    double c1() const noexcept { return c1_; }
    double a() const noexcept { return a_; }
    std::span<const PairEntry> entries() const noexcept { return entries_; }

    /// A * z. Every rank-one term is projected on the original z.
    Vector multiply(std::span<const double> z, OpCounts* counts = nullptr) const;

    /// A^{-1} * z using only the first `prefix_len` entries (all by default).
    Vector multiply_inverse(std::span<const double> z,
                            std::optional<std::size_t> prefix_len = std::nullopt,
                            OpCounts* counts = nullptr) const;

    /// Appends the pair for direction p at `stamp`. When the archive
    /// overflows, one entry is evicted (see select_eviction) and every later
    /// entry is rebuilt. Throws InputError on non-finite p, ContractError on
    /// a non-increasing stamp or wrong length.
    void insert(std::span<const double> p, std::int64_t stamp, std::int64_t spacing);

    /// Drops entry `index` and rebuilds the entries that followed it.
    void remove(std::size_t index);

    /// Recomputes v, |v|^2, b and d for entries [from_index, size()).
    void rebuild_suffix(std::size_t from_index);

    /// Materialises A (dimension <= kMaxExplicitDimension).
    DenseMatrix explicit_factor() const;

private:
    void refresh_entry(std::size_t index);

    std::size_t dimension_;
    std::size_t capacity_;
    double c1_;
    double a_;
    std::vector<PairEntry> entries_;
};

}  // namespace lmcma
