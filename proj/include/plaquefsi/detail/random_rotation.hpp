#pragma once

#include <random>

namespace plaquefsi {

template <int D, class Rng>
Mat<D> random_rotation(Rng& rng)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    Mat<D> G;
    for (int i = 0; i < D; ++i) {
        for (int j = 0; j < D; ++j) {
            G(i, j) = normal(rng);
        }
    }
    Eigen::HouseholderQR<Mat<D>> qr(G);
    Mat<D> Q = qr.householderQ();
    const Mat<D> R = qr.matrixQR().template triangularView<Eigen::Upper>();
    for (int j = 0; j < D; ++j) {
        if (R(j, j) < 0.0) {
            Q.col(j) *= -1.0;
        }
    }
    if (Q.determinant() < 0.0) {
        Q.col(0) *= -1.0;
    }
    return Q;
}

}  // namespace plaquefsi
