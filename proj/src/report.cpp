#include "dlr/report.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace dlr {

namespace {

std::vector<int> parse_partition(const std::string& s) {
  std::vector<int> out;
  std::istringstream is(s);
  std::string tok;
  while (std::getline(is, tok, ',')) out.push_back(std::stoi(tok));
  return out;
}

std::string partition_str(const std::vector<int>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(v[i]);
  }
  return s;
}

}  // namespace

InstanceConfig InstanceConfig::parse_kv(const std::string& text) {
  InstanceConfig c;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw std::runtime_error("config: bad line: " + line);
    std::string key = line.substr(0, eq), val = line.substr(eq + 1);
    if (key == "ring") c.ring = val;
    else if (key == "n") c.n = std::stoi(val);
    else if (key == "torus") c.torus = parse_partition(val);
    else if (key == "theta") c.theta = val;
    else if (key == "experiments") {
      c.experiments.clear();
      std::istringstream es(val);
      std::string e;
      while (std::getline(es, e, ',')) c.experiments.push_back(e);
    } else if (key == "seed") c.seed = std::stoull(val);
    else if (key == "threads") c.threads = std::stoi(val);
    else if (key == "guard") c.guard = std::stoull(val);
    else if (key == "out") c.out = val;
    else if (key == "density_mmax") c.density_mmax = std::stoi(val);
    else throw std::runtime_error("config: unknown key " + key);
  }
  return c;
}

InstanceConfig InstanceConfig::parse_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  InstanceConfig c;
  if (j.contains("ring")) c.ring = j["ring"].get<std::string>();
  if (j.contains("n")) c.n = j["n"].get<int>();
  if (j.contains("torus")) c.torus = j["torus"].get<std::vector<int>>();
  if (j.contains("theta")) c.theta = j["theta"].get<std::string>();
  if (j.contains("experiments"))
    c.experiments = j["experiments"].get<std::vector<std::string>>();
  if (j.contains("seed")) c.seed = j["seed"].get<uint64_t>();
  if (j.contains("threads")) c.threads = j["threads"].get<int>();
  if (j.contains("guard")) c.guard = j["guard"].get<uint64_t>();
  if (j.contains("out")) c.out = j["out"].get<std::string>();
  if (j.contains("density_mmax")) c.density_mmax = j["density_mmax"].get<int>();
  return c;
}

std::string InstanceConfig::kv() const {
  std::ostringstream os;
  os << "ring=" << ring << "\n";
  os << "n=" << n << "\n";
  os << "torus=" << partition_str(torus) << "\n";
  os << "theta=" << theta << "\n";
  os << "experiments=";
  for (size_t i = 0; i < experiments.size(); ++i) os << (i ? "," : "") << experiments[i];
  os << "\n";
  os << "seed=" << seed << "\n";
  os << "threads=" << threads << "\n";
  os << "guard=" << guard << "\n";
  if (!out.empty()) os << "out=" << out << "\n";
  os << "density_mmax=" << density_mmax << "\n";
  return os.str();
}

uint64_t DetRng::next() {
  state += 0x9e3779b97f4a7c15ULL;
  uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

uint64_t DetRng::below(uint64_t n) {
  // rejection sampling, platform independent
  uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t v = next();
  while (v >= limit) v = next();
  return v % n;
}

std::vector<uint64_t> sample_indices(uint64_t total, uint64_t count, uint64_t seed) {
  DetRng rng(seed);
  std::vector<uint64_t> out;
  std::set<uint64_t> seen;
  if (count >= total) {
    for (uint64_t i = 0; i < total; ++i) out.push_back(i);
    return out;
  }
  while (out.size() < count) {
    uint64_t v = rng.below(total);
    if (seen.insert(v).second) out.push_back(v);
  }
  return out;
}

std::string generator_commitment(const GL& gl) {
  std::ostringstream os;
  os << "h=[";
  const auto& h = gl.amb().modulus();
  for (size_t i = 0; i < h.size(); ++i) os << (i ? "," : "") << h[i];
  os << "];orders=[";
  for (int b = 0; b < gl.blocks(); ++b) {
    const auto& st = gl.block_unit_structure(b);
    os << (b ? ";" : "");
    for (size_t i = 0; i < st.orders.size(); ++i) os << (i ? "," : "") << st.orders[i];
  }
  os << "]";
  return os.str();
}

std::vector<uint64_t> resolve_theta_selector(const GL& gl, const GenericityClassifier& cls,
                                             const std::string& selector, uint64_t seed) {
  uint64_t total = theta_count(gl);
  std::vector<uint64_t> out;
  if (selector == "all") {
    for (uint64_t i = 0; i < total; ++i) out.push_back(i);
  } else if (selector == "sg") {
    for (uint64_t i = 0; i < total; ++i)
      if (cls.classify(theta_from_index(gl, i)).strongly_generic) out.push_back(i);
  } else if (selector.rfind("sample:", 0) == 0) {
    uint64_t want = std::stoull(selector.substr(7));
    // seeded sample from the strongly generic characters
    std::vector<uint64_t> sg;
    for (uint64_t i = 0; i < total; ++i)
      if (cls.classify(theta_from_index(gl, i)).strongly_generic) sg.push_back(i);
    for (uint64_t ix : sample_indices(sg.size(), want, seed)) out.push_back(sg[ix]);
  } else if (selector.rfind("index:", 0) == 0) {
    std::istringstream is(selector.substr(6));
    std::string tok;
    while (std::getline(is, tok, ',')) out.push_back(std::stoull(tok));
  } else {
    throw std::runtime_error("unknown theta selector: " + selector);
  }
  return out;
}

std::string extended_rep_record(const ExtendedRep& rep) {
  nlohmann::json j;
  const GL& gl = *rep.gl;
  j["ring"] = gl.tower().spec().key();
  j["instance"] = gl.key();
  j["theta"] = rep.theta.key();
  j["commitment"] = generator_commitment(gl);
  j["dim"] = rep.dim;
  j["even_path"] = rep.even_path;
  if (!rep.even_path) {
    nlohmann::json lifts = nlohmann::json::array();
    for (const Mat& h : rep.rho.space.basis_lifts) lifts.push_back(mat_str(h));
    j["basis_lifts"] = lifts;
    j["pairing"] = rep.rho.space.pairing;
    j["lagrangian"] = rep.rho.lagr;
    nlohmann::json chi = nlohmann::json::array();
    for (const CycloNum& c : rep.rho.chi_gen) chi.push_back(c.str());
    j["chi_generators"] = chi;
    nlohmann::json mats = nlohmann::json::array();
    for (const CMat& m : rep.gen_mats) {
      nlohmann::json rows = nlohmann::json::array();
      for (int i = 0; i < m.n; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int k = 0; k < m.n; ++k) row.push_back(m.at(i, k).str());
        rows.push_back(row);
      }
      mats.push_back(rows);
    }
    j["intertwiners"] = mats;
  }
  j["lambda_exponents"] = rep.lambda_exp;
  return j.dump(2);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << content;
}

}  // namespace dlr
