#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace tracerank {

// Deterministic hashed bag-of-words embedding: lowercase, split on
// non-alphanumeric bytes, FNV-1a 64-bit each token into a bucket in [0, dim),
// accumulate counts, L2-normalize. Empty text yields the zero vector.
std::vector<double> embed_text(std::string_view text, unsigned dim);

// Standard cosine similarity in [-1, 1]; 0 when either vector has zero norm.
// Throws Error(DimensionMismatch) on unequal lengths.
double cosine(std::span<const double> a, std::span<const double> b);

}  // namespace tracerank
