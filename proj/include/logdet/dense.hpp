#pragma once

#include <span>

#include <Eigen/Core>

namespace logdet::dense {

// Upper-triangular R with positive diagonal such that V = R R^T. Only the
// lower triangle of V is read. Returns false when V is not positive definite.
bool upper_factor(const Eigen::Ref<const Eigen::MatrixXd>& v,
                  Eigen::Ref<Eigen::MatrixXd> r);

// Given upper-triangular R (N x N), forms C from the rows listed in `kept`
// (strictly increasing) and reduces it to C = R' Q^T with R' upper triangular
// (m x m, positive diagonal) and Q having orthonormal columns, using
// Householder reflections applied from the right, last kept row first.
// Returns the number of nontrivial reflections.
int retriangularize_rows(const Eigen::Ref<const Eigen::MatrixXd>& r,
                         std::span<const int> kept,
                         Eigen::Ref<Eigen::MatrixXd> out);

}  // namespace logdet::dense
