#include "protopal/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "protopal/errors.hpp"

namespace protopal {

double auc(const Eigen::VectorXd& scores, const Eigen::VectorXi& labels) {
  if (scores.size() != labels.size()) throw DimensionError("auc: scores and labels differ in length");
  const auto n = static_cast<std::size_t>(scores.size());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[static_cast<Eigen::Index>(a)] < scores[static_cast<Eigen::Index>(b)];
  });
  // Mid-ranks (1-based) over tie groups.
  double rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[static_cast<Eigen::Index>(order[j])] == scores[static_cast<Eigen::Index>(order[i])]) ++j;
    double mid = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k)
      if (labels[static_cast<Eigen::Index>(order[k])] != 0) {
        rank_sum += mid;
        ++positives;
      }
    i = j;
  }
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) throw MetricError("auc undefined: labels contain a single class");
  double p = static_cast<double>(positives), q = static_cast<double>(negatives);
  return (rank_sum - p * (p + 1.0) / 2.0) / (p * q);
}

namespace {

class Fenwick {
 public:
  explicit Fenwick(std::size_t n) : tree_(n + 1, 0) {}
  void add(std::size_t i) {
    for (++i; i < tree_.size(); i += i & (~i + 1)) ++tree_[i];
  }
  // Count of inserted positions < i.
  long long prefix(std::size_t i) const {
    long long s = 0;
    for (; i > 0; i -= i & (~i + 1)) s += tree_[i];
    return s;
  }

 private:
  std::vector<long long> tree_;
};

}  // namespace

double c_index(const Eigen::VectorXd& scores, const Eigen::VectorXd& event_times, const Eigen::VectorXi& censored) {
  if (scores.size() != event_times.size() || scores.size() != censored.size())
    throw DimensionError("c_index: input lengths differ");
  const auto n = static_cast<std::size_t>(scores.size());

  // Dense ranks of scores for the Fenwick tree.
  std::vector<double> distinct(scores.data(), scores.data() + n);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  auto rank_of = [&](double s) {
    return static_cast<std::size_t>(std::lower_bound(distinct.begin(), distinct.end(), s) - distinct.begin());
  };

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return event_times[static_cast<Eigen::Index>(a)] > event_times[static_cast<Eigen::Index>(b)];
  });

  Fenwick later(distinct.size());
  long long inserted = 0;
  double concordant = 0.0;
  long long comparable = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    const double t = event_times[static_cast<Eigen::Index>(order[i])];
    while (j < n && event_times[static_cast<Eigen::Index>(order[j])] == t) ++j;
    for (std::size_t k = i; k < j; ++k) {
      const auto s = static_cast<Eigen::Index>(order[k]);
      if (censored[s] != 0) continue;
      std::size_t r = rank_of(scores[s]);
      long long below = later.prefix(r);
      long long equal = later.prefix(r + 1) - below;
      concordant += static_cast<double>(below) + 0.5 * static_cast<double>(equal);
      comparable += inserted;
    }
    for (std::size_t k = i; k < j; ++k) {
      later.add(rank_of(scores[static_cast<Eigen::Index>(order[k])]));
      ++inserted;
    }
    i = j;
  }
  if (comparable == 0) throw MetricError("c-index undefined: no comparable pairs");
  return concordant / static_cast<double>(comparable);
}

}  // namespace protopal
