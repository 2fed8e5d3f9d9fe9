#include "core/embedding.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>

#include "core/errors.hpp"
#include "core/numeric.hpp"

namespace tracerank {
namespace {

uint64_t fnv1a64(std::string_view token) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : token) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

std::vector<double> embed_text(std::string_view text, unsigned dim) {
  if (dim == 0) fail(ErrorCode::InvalidArgument, "embedding dimension must be > 0");
  std::vector<double> v(dim, 0.0);
  std::string token;
  auto flush = [&] {
    if (!token.empty()) {
      v[fnv1a64(token) % dim] += 1.0;
      token.clear();
    }
  };
  for (unsigned char c : text) {
    if (std::isalnum(c)) token.push_back(static_cast<char>(std::tolower(c)));
    else flush();
  }
  flush();

  KahanSum sq;
  for (double x : v) sq.add(x * x);
  double norm = std::sqrt(sq.value());
  if (norm > 0.0)
    for (double& x : v) x /= norm;
  return v;
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    fail(ErrorCode::DimensionMismatch, "cosine: dimensions differ (" + std::to_string(a.size()) +
                                           " vs " + std::to_string(b.size()) + ")");
  KahanSum dot, na, nb;
  for (size_t i = 0; i < a.size(); ++i) {
    dot.add(a[i] * b[i]);
    na.add(a[i] * a[i]);
    nb.add(b[i] * b[i]);
  }
  double denom = std::sqrt(na.value()) * std::sqrt(nb.value());
  if (denom == 0.0) return 0.0;
  return dot.value() / denom;
}

}  // namespace tracerank
