#include "cqm/fock/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <lapacke.h>

#include "cqm/errors.hpp"

namespace cqm::fock {

namespace {

struct Components {
    std::vector<std::vector<int>> members;
    std::vector<std::vector<int>> adjacency;  // per global index, neighbours != self
};

int find_root(std::vector<int>& parent, int i) {
    while (parent[i] != i) {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    return i;
}

Components connected_components(const SparseReal& m) {
    const int dim = static_cast<int>(m.rows());
    std::vector<int> parent(static_cast<std::size_t>(dim));
    std::iota(parent.begin(), parent.end(), 0);
    Components c;
    c.adjacency.resize(static_cast<std::size_t>(dim));
    for (int k = 0; k < m.outerSize(); ++k) {
        for (SparseReal::InnerIterator it(m, k); it; ++it) {
            const int r = static_cast<int>(it.row());
            const int col = static_cast<int>(it.col());
            if (r == col || it.value() == 0.0) {
                continue;
            }
            c.adjacency[static_cast<std::size_t>(r)].push_back(col);
            const int a = find_root(parent, r);
            const int b = find_root(parent, col);
            if (a != b) {
                parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
            }
        }
    }
    std::vector<int> slot(static_cast<std::size_t>(dim), -1);
    for (int i = 0; i < dim; ++i) {
        const int root = find_root(parent, i);
        if (slot[static_cast<std::size_t>(root)] < 0) {
            slot[static_cast<std::size_t>(root)] = static_cast<int>(c.members.size());
            c.members.emplace_back();
        }
        c.members[static_cast<std::size_t>(slot[static_cast<std::size_t>(root)])].push_back(i);
    }
    for (auto& adj : c.adjacency) {
        std::sort(adj.begin(), adj.end());
        adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
    }
    return c;
}

// Orders a component along its path if the graph is a simple path.
bool order_as_path(std::vector<int>& members, const std::vector<std::vector<int>>& adjacency) {
    if (members.size() <= 2) {
        return true;
    }
    int start = -1;
    for (int v : members) {
        const auto deg = adjacency[static_cast<std::size_t>(v)].size();
        if (deg > 2) {
            return false;
        }
        if (deg == 1 && start < 0) {
            start = v;
        }
    }
    if (start < 0) {
        return false;  // cycle
    }
    std::vector<int> path;
    path.reserve(members.size());
    int prev = -1;
    int cur = start;
    while (cur >= 0) {
        path.push_back(cur);
        int next = -1;
        for (int nb : adjacency[static_cast<std::size_t>(cur)]) {
            if (nb != prev) {
                next = nb;
            }
        }
        prev = cur;
        cur = next;
        if (path.size() > members.size()) {
            return false;
        }
    }
    if (path.size() != members.size()) {
        return false;
    }
    members = std::move(path);
    return true;
}

void solve_tridiagonal(Spectrum::Block& b, const Eigen::MatrixXd& block) {
    const auto n = static_cast<lapack_int>(block.rows());
    std::vector<double> d(static_cast<std::size_t>(n));
    std::vector<double> e(static_cast<std::size_t>(n), 0.0);
    for (lapack_int i = 0; i < n; ++i) {
        d[static_cast<std::size_t>(i)] = block(i, i);
        if (i + 1 < n) {
            e[static_cast<std::size_t>(i)] = block(i, i + 1);
        }
    }
    b.energies.resize(n);
    b.vectors.resize(n, n);
    std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(n));
    lapack_int found = 0;
    lapack_logical tryrac = 1;
    const lapack_int info = LAPACKE_dstemr(LAPACK_COL_MAJOR, 'V', 'A', n, d.data(), e.data(), 0.0,
                                           0.0, 0, 0, &found, b.energies.data(), b.vectors.data(), n,
                                           n, isuppz.data(), &tryrac);
    if (info != 0 || found != n) {
        throw Error("LAPACK dstemr failed (info " + std::to_string(info) + ")");
    }
}

void solve_dense(Spectrum::Block& b, Eigen::MatrixXd block) {
    const auto n = static_cast<lapack_int>(block.rows());
    b.energies.resize(n);
    const lapack_int info =
        LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, block.data(), n, b.energies.data());
    if (info != 0) {
        throw Error("LAPACK dsyevd failed (info " + std::to_string(info) + ")");
    }
    b.vectors = std::move(block);
}

}  // namespace

Spectrum::Spectrum(const HermitianOperator& h) : layout_(h.layout()) {
    const auto& m = h.matrix();
    auto comps = connected_components(m);
    const int dim = h.dim();
    block_of_.assign(static_cast<std::size_t>(dim), -1);
    slot_of_.assign(static_cast<std::size_t>(dim), -1);

    for (auto& members : comps.members) {
        Block b;
        b.tridiagonal = order_as_path(members, comps.adjacency);
        b.indices = std::move(members);
        const int id = static_cast<int>(blocks_.size());
        for (std::size_t s = 0; s < b.indices.size(); ++s) {
            block_of_[static_cast<std::size_t>(b.indices[s])] = id;
            slot_of_[static_cast<std::size_t>(b.indices[s])] = static_cast<int>(s);
        }
        blocks_.push_back(std::move(b));
    }

    std::vector<Eigen::MatrixXd> dense(blocks_.size());
    for (std::size_t id = 0; id < blocks_.size(); ++id) {
        const auto n = static_cast<Eigen::Index>(blocks_[id].indices.size());
        dense[id] = Eigen::MatrixXd::Zero(n, n);
    }
    for (int k = 0; k < m.outerSize(); ++k) {
        for (SparseReal::InnerIterator it(m, k); it; ++it) {
            const auto r = static_cast<std::size_t>(it.row());
            const auto c = static_cast<std::size_t>(it.col());
            dense[static_cast<std::size_t>(block_of_[r])](slot_of_[r], slot_of_[c]) = it.value();
        }
    }
    for (std::size_t id = 0; id < blocks_.size(); ++id) {
        if (blocks_[id].tridiagonal) {
            solve_tridiagonal(blocks_[id], dense[id]);
        } else {
            solve_dense(blocks_[id], std::move(dense[id]));
        }
    }
}

Eigen::VectorXd Spectrum::eigenvalues() const {
    std::vector<double> all;
    for (const auto& b : blocks_) {
        all.insert(all.end(), b.energies.data(), b.energies.data() + b.energies.size());
    }
    std::sort(all.begin(), all.end());
    return Eigen::Map<Eigen::VectorXd>(all.data(), static_cast<Eigen::Index>(all.size()));
}

std::vector<Eigen::VectorXcd> Spectrum::coefficients(const Eigen::VectorXcd& psi) const {
    if (psi.size() != layout_.dim()) {
        throw InvalidParams("psi", "dimension does not match the spectrum");
    }
    std::vector<Eigen::VectorXcd> out;
    out.reserve(blocks_.size());
    for (const auto& b : blocks_) {
        const auto n = static_cast<Eigen::Index>(b.indices.size());
        Eigen::VectorXd re(n);
        Eigen::VectorXd im(n);
        for (Eigen::Index s = 0; s < n; ++s) {
            const auto& z = psi(b.indices[static_cast<std::size_t>(s)]);
            re(s) = z.real();
            im(s) = z.imag();
        }
        Eigen::VectorXcd c(n);
        c.real() = b.vectors.transpose() * re;
        c.imag() = b.vectors.transpose() * im;
        out.push_back(std::move(c));
    }
    return out;
}

Eigen::VectorXcd Spectrum::synthesize(const std::vector<Eigen::VectorXcd>& coeffs) const {
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(layout_.dim());
    for (std::size_t id = 0; id < blocks_.size(); ++id) {
        const auto& b = blocks_[id];
        const Eigen::VectorXd re = b.vectors * coeffs[id].real();
        const Eigen::VectorXd im = b.vectors * coeffs[id].imag();
        for (std::size_t s = 0; s < b.indices.size(); ++s) {
            const auto si = static_cast<Eigen::Index>(s);
            psi(b.indices[s]) = {re(si), im(si)};
        }
    }
    return psi;
}

Eigen::VectorXcd Spectrum::evolve(const Eigen::VectorXcd& psi, double t) const {
    auto coeffs = coefficients(psi);
    for (std::size_t id = 0; id < blocks_.size(); ++id) {
        const auto& e = blocks_[id].energies;
        for (Eigen::Index k = 0; k < e.size(); ++k) {
            coeffs[id](k) *= std::polar(1.0, -e(k) * t);
        }
    }
    return synthesize(coeffs);
}

std::vector<Eigen::MatrixXd> Spectrum::project(const HermitianOperator& op) const {
    if (!(op.layout() == layout_)) {
        throw InvalidParams("operator", "layout does not match the spectrum");
    }
    std::vector<Eigen::MatrixXd> local(blocks_.size());
    for (std::size_t id = 0; id < blocks_.size(); ++id) {
        const auto n = static_cast<Eigen::Index>(blocks_[id].indices.size());
        local[id] = Eigen::MatrixXd::Zero(n, n);
    }
    const auto& m = op.matrix();
    for (int k = 0; k < m.outerSize(); ++k) {
        for (SparseReal::InnerIterator it(m, k); it; ++it) {
            if (it.value() == 0.0) {
                continue;
            }
            const auto r = static_cast<std::size_t>(it.row());
            const auto c = static_cast<std::size_t>(it.col());
            if (block_of_[r] != block_of_[c]) {
                throw InvalidParams("operator", "couples distinct symmetry blocks");
            }
            local[static_cast<std::size_t>(block_of_[r])](slot_of_[r], slot_of_[c]) = it.value();
        }
    }
    std::vector<Eigen::MatrixXd> out;
    out.reserve(blocks_.size());
    for (std::size_t id = 0; id < blocks_.size(); ++id) {
        const auto& v = blocks_[id].vectors;
        Eigen::MatrixXd tmp = local[id] * v;
        out.emplace_back(v.transpose() * tmp);
    }
    return out;
}

}  // namespace cqm::fock
