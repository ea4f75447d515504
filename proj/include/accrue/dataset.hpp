#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace accrue {

/// One observation-prediction pair. The error is derived, never stored, so
/// the two views cannot drift apart.
struct PairRecord {
  std::vector<double> x;
  double m = 0.0;
  double y = 0.0;

  double eps() const { return y - m; }
};

enum class Split { Train, Validation, Test };

/// Ordered pair collection with an optional partition label per record.
/// `splits` is either empty (unpartitioned) or exactly records.size() long.
struct Dataset {
  std::vector<PairRecord> records;
  std::vector<Split> splits;

  std::size_t size() const { return records.size(); }
  std::size_t dim() const { return records.empty() ? 0 : records[0].x.size(); }

  /// Copies of the records labeled with the given split, in stored order.
  std::vector<PairRecord> partition(Split s) const;
  std::size_t partition_size(Split s) const;
};

/// Assigns split labels by a seeded permutation with contiguous blocks.
/// `fractions` maps onto Train, Validation, Test in order (2 or 3 entries,
/// positive, summing to 1 within 1e-9). Block sizes are floors of f_i * n;
/// leftover rows join the training block.
Dataset split_dataset(const Dataset& data, const std::vector<double>& fractions,
                      std::uint64_t seed);

}  // namespace accrue
