#pragma once

#include <Eigen/Dense>
#include <random>
#include <string>

#include "sdgm/mesh.hpp"

namespace sdgm::test {

inline std::string data_path(const std::string& rel)
{
    return std::string(SDGM_SOURCE_DIR) + "/" + rel;
}

inline QuadMesh shipped_periodic_mesh()
{
    return apply_periodic(load_mesh(data_path("data/meshes/periodic_unstructured.mesh")), true, true);
}

inline QuadMesh periodic_square(int n)
{
    return apply_periodic(cartesian_mesh(n, n, {-1, -1, 1, 1}), true, true);
}

inline QuadMesh dirichlet_unit_square(int n)
{
    return cartesian_mesh(n, n, {}, BoundaryTag::Dirichlet);
}

// Independent of the library generator on purpose.
inline Eigen::MatrixXd random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c)
{
    std::normal_distribution<double> g;
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index j = 0; j < c; ++j) {
        for (Eigen::Index i = 0; i < r; ++i) {
            m(i, j) = g(rng);
        }
    }
    return m;
}

inline Eigen::MatrixXd random_spd(std::mt19937_64& rng, Eigen::Index n, double shift = 0.5)
{
    const Eigen::MatrixXd a = random_matrix(rng, n, n);
    return a * a.transpose() / static_cast<double>(n) + shift * Eigen::MatrixXd::Identity(n, n);
}

inline double rel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b)
{
    return (a - b).norm() / b.norm();
}

} // namespace sdgm::test
