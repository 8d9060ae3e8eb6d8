#include "dlr/abelian.hpp"

namespace dlr {

std::vector<std::pair<uint64_t, int>> factorize_u64(uint64_t n) {
  std::vector<std::pair<uint64_t, int>> f;
  for (uint64_t d = 2; d * d <= n; ++d) {
    if (n % d) continue;
    int m = 0;
    while (n % d == 0) {
      n /= d;
      ++m;
    }
    f.push_back({d, m});
  }
  if (n > 1) f.push_back({n, 1});
  return f;
}

}  // namespace dlr
