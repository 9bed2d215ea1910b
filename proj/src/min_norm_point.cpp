#include "risklab/detail/min_norm_point.hpp"

#include "risklab/error.hpp"

#include <algorithm>
#include <vector>

namespace risklab::detail {

namespace {

// Minimum-norm point of the affine hull of the selected columns.
Eigen::VectorXd affine_weights(const Eigen::MatrixXd& points, const std::vector<Eigen::Index>& support) {
    const auto k = static_cast<Eigen::Index>(support.size());
    Eigen::MatrixXd sub(points.rows(), k);
    for (Eigen::Index i = 0; i < k; ++i)
        sub.col(i) = points.col(support[static_cast<std::size_t>(i)]);
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(k + 1, k + 1);
    kkt.topLeftCorner(k, k) = sub.transpose() * sub;
    kkt.block(0, k, k, 1).setOnes();
    kkt.block(k, 0, 1, k).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k + 1);
    rhs(k) = 1.0;
    Eigen::VectorXd sol = kkt.completeOrthogonalDecomposition().solve(rhs);
    return sol.head(k);
}

} // namespace

MinNormResult min_norm_point(const Eigen::MatrixXd& points, double tol) {
    const Eigen::Index m = points.cols();
    if (m == 0)
        throw Error("empty set");

    const Eigen::VectorXd sq = points.colwise().squaredNorm().transpose();
    const double scale = std::max(1.0, sq.maxCoeff());
    Eigen::Index start = 0;
    sq.minCoeff(&start);

    std::vector<Eigen::Index> support{start};
    std::vector<double> lambda{1.0};
    Eigen::VectorXd x = points.col(start);

    auto rebuild = [&] {
        x.setZero(points.rows());
        for (std::size_t i = 0; i < support.size(); ++i)
            x += lambda[i] * points.col(support[i]);
    };

    const int max_major = 50 * static_cast<int>(m) + 1000;
    int iterations = 0;
    for (; iterations < max_major; ++iterations) {
        const Eigen::VectorXd dots = points.transpose() * x;
        Eigen::Index entering = 0;
        const double best = dots.minCoeff(&entering);
        if (best >= x.squaredNorm() - tol * scale)
            break;
        if (std::find(support.begin(), support.end(), entering) != support.end())
            break; // numerical stall: the optimal corral is already active
        support.push_back(entering);
        lambda.push_back(0.0);

        for (int minor = 0; minor < 10 * static_cast<int>(m) + 100; ++minor) {
            const Eigen::VectorXd alpha = affine_weights(points, support);
            if ((alpha.array() > 1e-14).all()) {
                for (std::size_t i = 0; i < support.size(); ++i)
                    lambda[i] = alpha(static_cast<Eigen::Index>(i));
                rebuild();
                break;
            }
            double theta = 1.0;
            std::size_t blocking = 0;
            for (std::size_t i = 0; i < support.size(); ++i) {
                const double a = alpha(static_cast<Eigen::Index>(i));
                if (a <= 1e-14) {
                    const double denom = lambda[i] - a;
                    const double t = denom > 0.0 ? lambda[i] / denom : 0.0;
                    if (t < theta) {
                        theta = t;
                        blocking = i;
                    }
                }
            }
            for (std::size_t i = 0; i < support.size(); ++i)
                lambda[i] += theta * (alpha(static_cast<Eigen::Index>(i)) - lambda[i]);
            lambda[blocking] = 0.0;
            std::vector<Eigen::Index> kept;
            std::vector<double> kept_lambda;
            for (std::size_t i = 0; i < support.size(); ++i) {
                if (lambda[i] > 1e-15) {
                    kept.push_back(support[i]);
                    kept_lambda.push_back(lambda[i]);
                }
            }
            double total = 0.0;
            for (double l : kept_lambda)
                total += l;
            for (double& l : kept_lambda)
                l /= total;
            support = std::move(kept);
            lambda = std::move(kept_lambda);
            rebuild();
        }
    }

    MinNormResult result;
    result.point = x;
    result.weights = Eigen::VectorXd::Zero(m);
    for (std::size_t i = 0; i < support.size(); ++i)
        result.weights(support[i]) = lambda[i];
    result.iterations = iterations;
    return result;
}

} // namespace risklab::detail
