#include "stlrank/analytics.hpp"

#include "stlrank/errors.hpp"
#include "stlrank/parser.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <random>

namespace stlrank::analytics {

Eigen::MatrixXd imputed_positions(const ingest::Dataset& ds, std::vector<std::size_t>& kept) {
  kept.clear();
  const auto& recs = ds.records();
  const auto days = static_cast<Eigen::Index>(ds.days());
  for (std::size_t r = 0; r < recs.size(); ++r)
    if ((recs[r].positions.array() != -1.0).any()) kept.push_back(r);

  Eigen::MatrixXd data(static_cast<Eigen::Index>(kept.size()), days);
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const Eigen::VectorXd& x = recs[kept[i]].positions;
    const auto observed = (x.array() != -1.0).cast<double>();
    const double mean = (x.array() * observed).sum() / observed.sum();
    data.row(static_cast<Eigen::Index>(i)) = (observed > 0).select(x.array(), mean).matrix().transpose();
  }
  return data;
}

KMeansResult cluster_kmeans(const ingest::Dataset& ds, const KMeansOptions& opts) {
  std::vector<std::size_t> kept;
  const Eigen::MatrixXd data = imputed_positions(ds, kept);
  const auto n = static_cast<std::size_t>(data.rows());
  if (opts.k == 0 || opts.k > n)
    throw ParameterError("k", "must be between 1 and the number of clusterable records (" + std::to_string(n) + ")");

  // k distinct records as initial centroids.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(opts.seed);
  std::shuffle(order.begin(), order.end(), rng);

  KMeansResult res;
  res.k = opts.k;
  res.centroids.resize(static_cast<Eigen::Index>(opts.k), data.cols());
  for (std::size_t c = 0; c < opts.k; ++c)
    res.centroids.row(static_cast<Eigen::Index>(c)) = data.row(static_cast<Eigen::Index>(order[c]));

  std::vector<std::size_t> label(n, opts.k);
  for (std::size_t iter = 0; iter < opts.max_iters; ++iter) {
    bool changed = false;
    double distortion = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      Eigen::Index best = 0;
      const double d = (res.centroids.rowwise() - data.row(static_cast<Eigen::Index>(i)))
                           .rowwise()
                           .squaredNorm()
                           .minCoeff(&best);
      distortion += d;
      if (label[i] != static_cast<std::size_t>(best)) {
        label[i] = static_cast<std::size_t>(best);
        changed = true;
      }
    }
    res.distortion.push_back(distortion);
    res.iterations = iter + 1;
    if (!changed) {
      res.converged = true;
      break;
    }
    // Update; an emptied cluster keeps its previous centroid.
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(res.centroids.rows(), res.centroids.cols());
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(res.centroids.rows());
    for (std::size_t i = 0; i < n; ++i) {
      sums.row(static_cast<Eigen::Index>(label[i])) += data.row(static_cast<Eigen::Index>(i));
      counts[static_cast<Eigen::Index>(label[i])] += 1.0;
    }
    for (Eigen::Index c = 0; c < sums.rows(); ++c)
      if (counts[c] > 0) res.centroids.row(c) = sums.row(c) / counts[c];
  }

  res.assignments.assign(ds.size(), -1);
  for (std::size_t i = 0; i < n; ++i) res.assignments[kept[i]] = static_cast<std::ptrdiff_t>(label[i]);
  return res;
}

void KMeansResult::write_centroids_csv(std::ostream& out) const {
  out << "cluster";
  for (Eigen::Index d = 0; d < centroids.cols(); ++d) out << ",pos_" << d;
  out << '\n';
  for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
    out << c;
    for (Eigen::Index d = 0; d < centroids.cols(); ++d) out << ',' << format_number(centroids(c, d));
    out << '\n';
  }
}

void KMeansResult::write_assignments_csv(const ingest::Dataset& ds, std::ostream& out) const {
  out << "product_id,cluster\n";
  for (std::size_t r = 0; r < ds.size(); ++r) {
    out << ds.records()[r].product_id << ',';
    if (assignments[r] >= 0) out << assignments[r];
    else out << "NA";
    out << '\n';
  }
}

}  // namespace stlrank::analytics
