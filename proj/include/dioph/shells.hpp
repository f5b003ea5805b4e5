#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace dioph {

/// Visits every integer vector of sup-norm exactly `norm` in dimension `dim`.
///
/// Face k holds the vectors whose first coordinate of absolute value `norm`
/// sits at index k. With `half` set only v_k = +norm is visited, which covers
/// each pair {v, -v} exactly once. norm == 0 visits the zero vector.
template <class Visit>
void for_each_in_shell(int dim, std::int64_t norm, bool half, Visit&& visit) {
    std::vector<std::int64_t> v(static_cast<std::size_t>(dim), 0);
    if (norm == 0) {
        visit(std::span<const std::int64_t>(v));
        return;
    }
    for (int k = 0; k < dim; ++k) {
        for (int sign : {1, -1}) {
            if (half && sign < 0) continue;
            // coordinates j < k in [-(norm-1), norm-1], j > k in [-norm, norm]
            std::vector<std::int64_t> lo(static_cast<std::size_t>(dim)), hi(static_cast<std::size_t>(dim));
            for (int j = 0; j < dim; ++j) {
                std::int64_t r = j < k ? norm - 1 : norm;
                lo[static_cast<std::size_t>(j)] = -r;
                hi[static_cast<std::size_t>(j)] = r;
            }
            lo[static_cast<std::size_t>(k)] = hi[static_cast<std::size_t>(k)] = sign * norm;
            v = lo;
            for (;;) {
                visit(std::span<const std::int64_t>(v));
                int j = dim - 1;
                for (; j >= 0; --j) {
                    auto idx = static_cast<std::size_t>(j);
                    if (v[idx] < hi[idx]) {
                        ++v[idx];
                        break;
                    }
                    v[idx] = lo[idx];
                }
                if (j < 0) break;
            }
        }
    }
}

/// Visits every vector with sup-norm in [from, to], shell by shell.
template <class Visit>
void for_each_in_ball(int dim, std::int64_t from, std::int64_t to, bool half, Visit&& visit) {
    for (std::int64_t r = from; r <= to; ++r) for_each_in_shell(dim, r, half, visit);
}

}  // namespace dioph
