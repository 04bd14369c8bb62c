#pragma once

#include <vector>

#include <Eigen/Core>

#include "cqm/fock/operators.hpp"

namespace cqm::fock {

/// Eigendecomposition of a real symmetric operator, split into the
/// connected components of its sparsity graph. Components that form a
/// path (tridiagonal after reordering) use LAPACK dstemr; the rest use dsyevd.
class Spectrum {
public:
    struct Block {
        std::vector<int> indices;  ///< global basis indices, in block order
        Eigen::VectorXd energies;  ///< ascending
        Eigen::MatrixXd vectors;   ///< columns are eigenvectors in block order
        bool tridiagonal = false;
    };

    explicit Spectrum(const HermitianOperator& h);

    [[nodiscard]] const FockLayout& layout() const noexcept { return layout_; }
    [[nodiscard]] const std::vector<Block>& blocks() const noexcept { return blocks_; }
    /// All eigenvalues, ascending.
    [[nodiscard]] Eigen::VectorXd eigenvalues() const;

    /// Per-block eigenbasis coefficients V_b^T psi_b.
    [[nodiscard]] std::vector<Eigen::VectorXcd> coefficients(const Eigen::VectorXcd& psi) const;
    /// Inverse of coefficients().
    [[nodiscard]] Eigen::VectorXcd synthesize(const std::vector<Eigen::VectorXcd>& coeffs) const;

    /// exp(-i H t) psi.
    [[nodiscard]] Eigen::VectorXcd evolve(const Eigen::VectorXcd& psi, double t) const;

    /// V_b^T O_b V_b for each block. Throws InvalidParams if O couples blocks.
    [[nodiscard]] std::vector<Eigen::MatrixXd> project(const HermitianOperator& op) const;

private:
    FockLayout layout_;
    std::vector<Block> blocks_;
    std::vector<int> block_of_;  ///< global index -> block id
    std::vector<int> slot_of_;   ///< global index -> position inside its block
};

}  // namespace cqm::fock
