#include "accrue/dataset.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "accrue/rng.hpp"

namespace accrue {

std::vector<PairRecord> Dataset::partition(Split s) const {
  if (splits.size() != records.size()) {
    throw std::logic_error("Dataset::partition: dataset has no split labels");
  }
  std::vector<PairRecord> out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (splits[i] == s) out.push_back(records[i]);
  }
  return out;
}

std::size_t Dataset::partition_size(Split s) const {
  if (splits.size() != records.size()) {
    throw std::logic_error("Dataset::partition_size: dataset has no split labels");
  }
  std::size_t n = 0;
  for (Split label : splits) {
    if (label == s) ++n;
  }
  return n;
}

Dataset split_dataset(const Dataset& data, const std::vector<double>& fractions,
                      std::uint64_t seed) {
  const std::size_t n = data.size();
  const std::size_t k = fractions.size();
  if (k < 2 || k > 3) {
    throw std::invalid_argument("split_dataset: need 2 or 3 fractions");
  }
  if (n < k) {
    throw std::invalid_argument("split_dataset: fewer records than partitions");
  }
  double total = 0.0;
  for (double f : fractions) {
    if (!(f > 0.0)) {
      throw std::invalid_argument("split_dataset: fractions must be positive");
    }
    total += f;
  }
  if (std::fabs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("split_dataset: fractions must sum to 1, got " +
                                std::to_string(total));
  }

  std::vector<std::size_t> sizes(k);
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < k; ++i) {
    sizes[i] = static_cast<std::size_t>(std::floor(fractions[i] * static_cast<double>(n)));
    assigned += sizes[i];
  }
  sizes[0] += n - assigned;  // leftover rows train

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  shuffle(order, rng);

  static constexpr Split kLabels[3] = {Split::Train, Split::Validation, Split::Test};
  Dataset out = data;
  out.splits.assign(n, Split::Train);
  std::size_t pos = 0;
  for (std::size_t block = 0; block < k; ++block) {
    for (std::size_t j = 0; j < sizes[block]; ++j) {
      out.splits[order[pos++]] = kLabels[block];
    }
  }
  return out;
}

}  // namespace accrue
