#include "minklab/linalg.hpp"

#include <Eigen/SVD>

namespace minklab {

double pairwise_sum(const std::vector<double>& terms) {
  // Recursive halving keeps the rounding order fixed for any chunking above.
  struct Rec {
    static double sum(const double* a, std::size_t n) {
      if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += a[i];
        return s;
      }
      std::size_t half = n / 2;
      return sum(a, half) + sum(a + half, n - half);
    }
  };
  if (terms.empty()) return 0.0;
  return Rec::sum(terms.data(), terms.size());
}

int lex_compare(const Vec& a, const Vec& b, double tol) {
  for (int i = 0; i < a.size(); ++i) {
    if (a[i] < b[i] - tol) return -1;
    if (a[i] > b[i] + tol) return 1;
  }
  return 0;
}

int affine_rank(const std::vector<Vec>& pts, double tol) {
  if (pts.size() <= 1) return 0;
  Mat diff(static_cast<int>(pts.size()) - 1, pts[0].size());
  for (std::size_t i = 1; i < pts.size(); ++i) diff.row(static_cast<int>(i) - 1) = (pts[i] - pts[0]).transpose();
  Eigen::JacobiSVD<Mat> svd(diff);
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] > tol) ++rank;
  return rank;
}

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) {
  // splitmix64 step on master ^ golden-ratio-scaled index
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double halton(std::uint64_t index, std::uint64_t base) {
  double f = 1.0, r = 0.0;
  std::uint64_t i = index;
  while (i > 0) {
    f /= static_cast<double>(base);
    r += f * static_cast<double>(i % base);
    i /= base;
  }
  return r;
}

}  // namespace minklab
