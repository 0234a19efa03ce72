#include "slice_ops.hpp"

#include <cmath>

namespace grushin::detail {

std::vector<double> mode_product_all(const RowMat& A, int d, const std::vector<double>& x) {
  const long m = A.rows(), n = A.cols();
  std::vector<double> cur = x, next;
  for (int ax = 0; ax < d; ++ax) {
    long pre = 1, post = 1;
    for (int i = 0; i < ax; ++i) pre *= m;
    for (int i = ax + 1; i < d; ++i) post *= n;
    next.assign(std::size_t(pre * m * post), 0.0);
    if (post == 1) {
      Eigen::Map<const RowMat> X(cur.data(), pre, n);
      Eigen::Map<RowMat> Y(next.data(), pre, m);
      Y.noalias() = X * A.transpose();
    } else {
      for (long p = 0; p < pre; ++p) {
        Eigen::Map<const RowMat> X(cur.data() + p * n * post, n, post);
        Eigen::Map<RowMat> Y(next.data() + p * m * post, m, post);
        Y.noalias() = A * X;
      }
    }
    cur.swap(next);
  }
  return cur;
}

RowMat slice_basis(const PrimeGrid& g, double xi, int K) {
  RowMat B(g.n, K + 1);
  double s = std::sqrt(xi), amp = std::pow(xi, 0.25);
  std::vector<double> tab(K + 1);
  for (int i = 0; i < g.n; ++i) {
    hermite_table(K, s * g.point(i), tab.data());
    for (int a = 0; a <= K; ++a) B(i, a) = amp * tab[a];
  }
  return B;
}

int first_unresolved_level(const RowMat& B, double h, double tol) {
  Eigen::MatrixXd G = h * (B.transpose() * B);
  const int K1 = int(G.rows());
  for (int a = 0; a < K1; ++a) {
    for (int b = 0; b <= a; ++b) {
      double target = a == b ? 1.0 : 0.0;
      if (std::fabs(G(a, b) - target) > tol) return a;
    }
  }
  return K1;
}

std::vector<int> level_of_index(int K, int d) {
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= std::size_t(K + 1);
  std::vector<int> lev(total, 0);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t r = idx;
    int s = 0;
    for (int i = 0; i < d; ++i) {
      s += int(r % (K + 1));
      r /= (K + 1);
    }
    lev[idx] = s;
  }
  return lev;
}

void apply_levels(const RowMat& B, double h, int d, const std::vector<std::complex<double>>& mult,
                  std::vector<std::complex<double>>& f) {
  const int K = int(B.cols()) - 1;
  RowMat At = h * B.transpose();
  std::vector<double> re(f.size()), im(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    re[i] = f[i].real();
    im[i] = f[i].imag();
  }
  auto cre = mode_product_all(At, d, re);
  auto cim = mode_product_all(At, d, im);
  auto lev = level_of_index(K, d);
  for (std::size_t i = 0; i < cre.size(); ++i) {
    std::complex<double> m = lev[i] <= K ? mult[lev[i]] : 0.0;
    std::complex<double> c = std::complex<double>(cre[i], cim[i]) * m;
    cre[i] = c.real();
    cim[i] = c.imag();
  }
  auto ore = mode_product_all(B, d, cre);
  auto oim = mode_product_all(B, d, cim);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = {ore[i], oim[i]};
}

}  // namespace grushin::detail
