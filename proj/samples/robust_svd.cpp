// Compare plain SVD and L1-cSVD singular values on a low-rank matrix with a
// few grossly corrupted columns.

#include <iostream>

#include "l1csvd/l1csvd.hpp"

int main() {
  using namespace l1csvd;
  Rng rng(2024);
  Matrix left(8, 2), right(2, 60);
  for (Index i = 0; i < left.size(); ++i) left(i) = rng.normal();
  for (Index i = 0; i < right.size(); ++i) right(i) = rng.normal();
  const Matrix clean = left * right;
  Matrix x = clean;
  for (Index c : {3, 17, 41})
    for (Index r = 0; r < x.rows(); ++r) x(r, c) += 15.0 * rng.normal();

  const Vector truth = compact_svd(clean, 2).sigma;
  const Vector plain = compact_svd(x, 2).sigma;
  L1cSvdOptions opts;
  opts.seed = 1;
  const L1cSvdResult robust = l1_csvd(x, 2, opts);

  std::cout << "clean sigma:   " << truth.transpose() << '\n'
            << "SVD sigma:     " << plain.transpose() << '\n'
            << "L1-cSVD sigma: " << robust.sigma.transpose() << '\n'
            << "L1-cSVD sweeps: " << robust.iterations << ", final M_P " << robust.final_mp() << '\n';
}
