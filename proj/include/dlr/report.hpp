#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dlr/dlchar.hpp"

namespace dlr {

// Batch configuration. Parsed from line-oriented key=value text or JSON.
struct InstanceConfig {
  std::string ring = "mixed:p3:e1:r3:a1";
  int n = 2;
  std::vector<int> torus = {1, 1};
  // all | sg | sample:<count> | index:<i0,i1,...>
  std::string theta = "sg";
  std::vector<std::string> experiments = {"classify"};
  uint64_t seed = 1;
  int threads = 1;
  uint64_t guard = (1u << 24);
  std::string out = "";
  int density_mmax = 3;

  static InstanceConfig parse_kv(const std::string& text);
  static InstanceConfig parse_json(const std::string& text);
  std::string kv() const;
};

// deterministic RNG for seeded samples (splitmix64)
struct DetRng {
  uint64_t state;
  explicit DetRng(uint64_t seed) : state(seed) {}
  uint64_t next();
  uint64_t below(uint64_t n);
};

std::vector<uint64_t> sample_indices(uint64_t total, uint64_t count, uint64_t seed);

// instance commitment recorded in every report: modulus and basis orders
std::string generator_commitment(const GL& gl);

// resolve the theta selector into a list of indices (sg filtering included)
std::vector<uint64_t> resolve_theta_selector(const GL& gl, const GenericityClassifier& cls,
                                             const std::string& selector, uint64_t seed);

// self-contained record of a built extension, keyed by instance and theta
std::string extended_rep_record(const ExtendedRep& rep);

void write_file(const std::string& path, const std::string& content);

}  // namespace dlr
