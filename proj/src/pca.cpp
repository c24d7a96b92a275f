#include "dhypr/pca.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace dhypr {

ad::Matrix pca_project(const ad::Matrix& x, std::size_t components) {
  const auto n = static_cast<Eigen::Index>(x.rows());
  const auto d = static_cast<Eigen::Index>(x.cols());
  ad::Matrix out(x.rows(), components);
  if (n == 0 || d == 0) return out;

  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Map<const RowMajor> data(x.data().data(), n, d);
  const Eigen::MatrixXd centered = data.rowwise() - data.colwise().mean();
  const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(std::max<Eigen::Index>(n - 1, 1));
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);

  // Eigenvalues come in ascending order.
  const auto usable = std::min<Eigen::Index>(static_cast<Eigen::Index>(components), d);
  for (Eigen::Index a = 0; a < usable; ++a) {
    Eigen::VectorXd axis = eig.eigenvectors().col(d - 1 - a);
    Eigen::Index pivot = 0;
    axis.cwiseAbs().maxCoeff(&pivot);
    if (axis(pivot) < 0.0) axis = -axis;
    const Eigen::VectorXd coords = centered * axis;
    for (Eigen::Index i = 0; i < n; ++i) out.row(static_cast<std::size_t>(i))[static_cast<std::size_t>(a)] = coords(i);
  }
  return out;
}

}  // namespace dhypr
