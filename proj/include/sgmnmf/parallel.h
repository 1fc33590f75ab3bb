// Copyright 2026 The sgmnmf Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef SGMNMF_PARALLEL_H_
#define SGMNMF_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace sgmnmf {

/// Process-wide worker count used by parallel_for. Defaults to 1.
std::size_t worker_count();
void set_worker_count(std::size_t n);

/// Calls body(k) for k in [0, n), split into contiguous blocks across the
/// configured workers. Each index is visited exactly once; callers must not
/// share mutable state between indices.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace sgmnmf

#endif  // SGMNMF_PARALLEL_H_
