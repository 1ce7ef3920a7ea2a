#pragma once

#include <algorithm>
#include <cstddef>
#include <queue>
#include <string>
#include <vector>

#include "ed/error.hpp"

namespace ed {

/// Undirected neighbourhood structure over n areas (0-based indices).
class AdjacencyGraph {
public:
    AdjacencyGraph() = default;

    explicit AdjacencyGraph(std::vector<std::vector<std::size_t>> neighbors)
        : neighbors_(std::move(neighbors)) {
        const std::size_t n = neighbors_.size();
        for (std::size_t i = 0; i < n; ++i) {
            auto& nb = neighbors_[i];
            std::sort(nb.begin(), nb.end());
            require(std::adjacent_find(nb.begin(), nb.end()) == nb.end(), ErrorKind::validation,
                    "duplicate neighbour listed for area " + std::to_string(i + 1));
            for (std::size_t j : nb) {
                require(j < n, ErrorKind::validation,
                        "neighbour index out of range for area " + std::to_string(i + 1));
                require(j != i, ErrorKind::validation,
                        "self-loop at area " + std::to_string(i + 1));
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j : neighbors_[i]) {
                if (!std::binary_search(neighbors_[j].begin(), neighbors_[j].end(), i)) {
                    fail(ErrorKind::validation, "asymmetric adjacency: " + std::to_string(i + 1) +
                                                    " lists " + std::to_string(j + 1) +
                                                    " but not vice versa");
                }
            }
        }
    }

    [[nodiscard]] std::size_t size() const noexcept { return neighbors_.size(); }
    [[nodiscard]] const std::vector<std::size_t>& neighbors(std::size_t i) const {
        return neighbors_[i];
    }
    [[nodiscard]] std::size_t degree(std::size_t i) const { return neighbors_[i].size(); }
    [[nodiscard]] bool adjacent(std::size_t i, std::size_t j) const {
        return std::binary_search(neighbors_[i].begin(), neighbors_[i].end(), j);
    }

    [[nodiscard]] std::size_t edge_count() const {
        std::size_t total = 0;
        for (const auto& nb : neighbors_) total += nb.size();
        return total / 2;
    }

    [[nodiscard]] std::size_t component_count() const {
        std::vector<char> seen(size(), 0);
        std::size_t count = 0;
        for (std::size_t start = 0; start < size(); ++start) {
            if (seen[start]) continue;
            ++count;
            std::queue<std::size_t> q;
            q.push(start);
            seen[start] = 1;
            while (!q.empty()) {
                const auto i = q.front();
                q.pop();
                for (std::size_t j : neighbors_[i]) {
                    if (!seen[j]) {
                        seen[j] = 1;
                        q.push(j);
                    }
                }
            }
        }
        return count;
    }

    /// Hop distances from `source`; unreachable areas get size().
    [[nodiscard]] std::vector<std::size_t> hops_from(std::size_t source) const {
        std::vector<std::size_t> dist(size(), size());
        std::queue<std::size_t> q;
        dist[source] = 0;
        q.push(source);
        while (!q.empty()) {
            const auto i = q.front();
            q.pop();
            for (std::size_t j : neighbors_[i]) {
                if (dist[j] == size()) {
                    dist[j] = dist[i] + 1;
                    q.push(j);
                }
            }
        }
        return dist;
    }

private:
    std::vector<std::vector<std::size_t>> neighbors_;
};

struct Point2 {
    double x;
    double y;
};

/// k-by-k rook lattice over the unit square with cell-centre centroids.
struct Lattice {
    AdjacencyGraph graph;
    std::vector<Point2> centroids;
};

inline Lattice make_lattice(std::size_t k) {
    require(k >= 1, ErrorKind::validation, "lattice side must be >= 1");
    std::vector<std::vector<std::size_t>> nb(k * k);
    std::vector<Point2> c(k * k);
    const double h = 1.0 / static_cast<double>(k);
    for (std::size_t r = 0; r < k; ++r) {
        for (std::size_t col = 0; col < k; ++col) {
            const std::size_t i = r * k + col;
            c[i] = {(static_cast<double>(col) + 0.5) * h, (static_cast<double>(r) + 0.5) * h};
            if (r > 0) nb[i].push_back(i - k);
            if (r + 1 < k) nb[i].push_back(i + k);
            if (col > 0) nb[i].push_back(i - 1);
            if (col + 1 < k) nb[i].push_back(i + 1);
        }
    }
    return {AdjacencyGraph(std::move(nb)), std::move(c)};
}

}  // namespace ed
