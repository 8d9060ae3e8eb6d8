// Batch driver for the exact Deligne-Lusztig engine over chain rings:
// classification of torus characters, construction of the algebraised
// characters, verification experiments, and report emission.
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "dlr/oracles.hpp"
#include "dlr/parallel.hpp"
#include "dlr/report.hpp"

using namespace dlr;

namespace {

struct Session {
  InstanceConfig cfg;
  std::shared_ptr<RingTower> tower;
  std::unique_ptr<GL> gl;
  std::unique_ptr<GenericityClassifier> cls;

  explicit Session(const InstanceConfig& c) : cfg(c) {
    RingSpec spec = RingSpec::parse(cfg.ring);
    tower = std::make_shared<RingTower>(spec);
    gl = std::make_unique<GL>(tower, cfg.n, spec.r, cfg.torus, cfg.guard);
    cls = std::make_unique<GenericityClassifier>(*gl);
  }

  void emit(const std::string& name, const std::string& content) const {
    if (cfg.out.empty()) {
      std::cout << content;
      return;
    }
    std::string path = cfg.out + "/" + name;
    write_file(path, content);
    std::cout << "wrote " << path << "\n";
  }
};

int cmd_classify(Session& s) {
  const GL& gl = *s.gl;
  uint64_t total = theta_count(gl);
  auto rows = parallel_map<std::string>(total, s.cfg.threads, [&](uint64_t i) {
    TorusChar th = theta_from_index(gl, i);
    GenericityReport rep = s.cls->classify(th);
    std::ostringstream os;
    os << gl.key() << "," << th.key() << "," << rep.regular_normmap << ","
       << rep.regular_beta << "," << rep.general_position << ","
       << rep.stabilizer_condition << "," << rep.strongly_generic << ","
       << rep.beta_charpoly;
    return os.str();
  });
  uint64_t sg = 0, flag_mismatch = 0;
  for (uint64_t i = 0; i < total; ++i) {
    GenericityReport rep = s.cls->classify(theta_from_index(gl, i));
    if (rep.strongly_generic) ++sg;
    if (rep.regular_normmap != rep.regular_beta ||
        rep.regular_normmap != rep.strongly_generic)
      ++flag_mismatch;
  }
  std::ostringstream csv;
  csv << "# " << gl.key() << " commitment " << generator_commitment(gl) << "\n";
  csv << "instance,theta,regular_normmap,regular_beta,general_position,"
         "stabilizer_condition,strongly_generic,beta\n";
  for (const auto& r : rows) csv << r << "\n";
  s.emit("classify_" + gl.key() + ".csv", csv.str());
  std::cout << "classified " << total << " characters, " << sg
            << " strongly generic, flag mismatches " << flag_mismatch << "\n";
  return flag_mismatch == 0 ? 0 : 1;
}

int cmd_build(Session& s) {
  const GL& gl = *s.gl;
  auto idx = resolve_theta_selector(gl, *s.cls, s.cfg.theta, s.cfg.seed);
  for (uint64_t i : idx) {
    TorusChar th = theta_from_index(gl, i);
    ExtendedRep rep = build_extended(th, *s.cls);
    s.emit("rep_" + gl.key() + "_" + std::to_string(i) + ".json",
           extended_rep_record(rep));
  }
  std::cout << "built " << idx.size() << " extensions\n";
  return 0;
}

int cmd_verify(Session& s) {
  const GL& gl = *s.gl;
  auto idx = resolve_theta_selector(gl, *s.cls, s.cfg.theta, s.cfg.seed);
  bool all_ok = true;
  std::ostringstream report;
  report << "# verify " << gl.key() << " commitment " << generator_commitment(gl) << "\n";
  report << "theta,dim,dim_ok,rss_ok,mackey,orbit_ok\n";
  for (uint64_t i : idx) {
    TorusChar th = theta_from_index(gl, i);
    AlgebraisedDL dl = build_dl(th, *s.cls);
    bool dim_ok = dim_check(dl);
    bool rss_ok = true;
    for (const auto& coords : gl.t1_list()) {
      if (!gl.is_regular_semisimple(coords)) continue;
      if (!rss_character_check(dl, coords)) rss_ok = false;
    }
    Rat ip = mackey_inner_product(dl);
    OrbitDescriptor orb = omega(dl);
    bool orbit_ok = orb.single_orbit && orb.semisimple && orb.regular &&
                    orb.matches_beta_orbit && orb.multiplicities_constant;
    report << th.key() << "," << dl.chi_dim() << "," << dim_ok << "," << rss_ok << ","
           << ip.str() << "," << orbit_ok << "\n";
    if (!dim_ok || !rss_ok || !(ip == Rat(1)) || !orbit_ok) all_ok = false;
  }
  s.emit("verify_" + gl.key() + ".csv", report.str());
  std::cout << (all_ok ? "verify: all checks passed\n" : "verify: FAILURES\n");
  return all_ok ? 0 : 1;
}

int cmd_density(Session& s) {
  RingSpec spec = RingSpec::parse(s.cfg.ring);
  auto rows =
      density_experiment(spec, s.cfg.n, s.cfg.torus, spec.r, s.cfg.density_mmax, s.cfg.guard);
  std::ostringstream csv;
  csv << "m,theta_regular,theta_total,fraction,beta_regular,beta_total,beta_fraction\n";
  bool ok = true;
  Rat prev(0);
  for (const auto& row : rows) {
    csv << row.m << "," << row.theta_regular << "," << row.theta_total << ","
        << row.theta_fraction.str() << "," << row.beta_regular << "," << row.beta_total
        << "," << row.beta_fraction.str() << "\n";
    if (!(row.theta_fraction == row.beta_fraction)) ok = false;
    if (row.theta_fraction < prev) ok = false;
    prev = row.theta_fraction;
  }
  s.emit("density_" + s.cfg.ring + ".csv", csv.str());
  std::cout << (ok ? "density: fractions agree and are monotone\n" : "density: FAILURES\n");
  return ok ? 0 : 1;
}

int cmd_orbit(Session& s) {
  const GL& gl = *s.gl;
  auto idx = resolve_theta_selector(gl, *s.cls, s.cfg.theta, s.cfg.seed);
  bool all_ok = true;
  std::ostringstream csv;
  csv << "theta,support,multiplicity,single_orbit,semisimple,regular,matches_beta\n";
  for (uint64_t i : idx) {
    TorusChar th = theta_from_index(gl, i);
    AlgebraisedDL dl = build_dl(th, *s.cls);
    OrbitDescriptor orb = omega(dl);
    csv << th.key() << "," << orb.support_keys.size() << "," << orb.multiplicity << ","
        << orb.single_orbit << "," << orb.semisimple << "," << orb.regular << ","
        << orb.matches_beta_orbit << "\n";
    if (!(orb.single_orbit && orb.semisimple && orb.regular && orb.matches_beta_orbit))
      all_ok = false;
  }
  s.emit("orbit_" + gl.key() + ".csv", csv.str());
  return all_ok ? 0 : 1;
}

int cmd_hill(Session& s) {
  const GL& gl = *s.gl;
  if (gl.r() != 2) {
    std::cerr << "hill counting runs at level r=2\n";
    return 1;
  }
  // collect the regular orbits hit by strongly generic characters
  std::map<std::vector<uint64_t>, std::vector<RElem>> orbits;
  for_all_theta(gl, [&](const TorusChar& th) {
    GenericityReport rep = s.cls->classify(th);
    if (!rep.strongly_generic) return;
    // canonical orbit key: sorted orbit of the residue avatar
    Mat avatar = gl.block_linear_matrix(rep.beta_res);
    std::set<std::vector<uint64_t>> orbit{mat_key(avatar)};
    std::vector<Mat> stack{avatar};
    while (!stack.empty()) {
      Mat y = stack.back();
      stack.pop_back();
      gl.for_G1F([&](const Mat& g) {
        Mat c = mat_mul(mat_mul(mat_inverse(g), y), g);
        if (orbit.insert(mat_key(c)).second) stack.push_back(c);
      });
    }
    orbits.emplace(*orbit.begin(), rep.beta_res);
  });
  bool ok = true;
  std::ostringstream csv;
  csv << "orbit,theta_matching,distinct_chi,expected\n";
  int orbit_ix = 0;
  for (auto& [key, res] : orbits) {
    (void)key;
    HillCount hc = hill_count(gl, *s.cls, res);
    csv << orbit_ix++ << "," << hc.theta_matching << "," << hc.distinct_chi << ","
        << hc.expected << "\n";
    if (hc.distinct_chi != hc.expected) ok = false;
  }
  s.emit("hill_" + gl.key() + ".csv", csv.str());
  std::cout << (ok ? "hill: counts match\n" : "hill: FAILURES\n");
  return ok ? 0 : 1;
}

int cmd_oracle(Session& s, const std::string& name) {
  const GL& gl = *s.gl;
  auto idx = resolve_theta_selector(gl, *s.cls, s.cfg.theta, s.cfg.seed);
  if (idx.empty()) {
    std::cerr << "oracle: no characters selected\n";
    return 1;
  }
  TorusChar th = theta_from_index(gl, idx[0]);
  bool ok = true;
  if (name == "induction") {
    HeisenbergRep rho = build_rho(th, *s.cls);
    Rat scale(1, 1);
    for (int i = 0; i < gl.phi_plus(); ++i) scale = scale * Rat(1, gl.q());
    DetRng rng(s.cfg.seed);
    std::vector<Mat> elems;
    gl.for_T1GjF(gl.lp(), [&](const Mat& h) { elems.push_back(h); });
    for (int k = 0; k < 50; ++k) {
      const Mat& h = elems[rng.below(elems.size())];
      if (!(rho.trace(h) == oracles::induced_full_sum(th, h).scaled(scale))) ok = false;
    }
    std::cout << "induction oracle on 50 seeded elements: " << (ok ? "equal" : "MISMATCH")
              << "\n";
  } else if (name == "lagrangian") {
    SymplecticSpace V = build_symplectic(th, *s.cls);
    HeisenbergRep base = build_rho(th, *s.cls);
    for (const auto& L : oracles::all_lagrangians(V)) {
      HeisenbergRep other = build_rho(th, *s.cls, &L);
      for (size_t v = 0; v < base.class_mats.size(); ++v)
        if (!(cmat_trace(base.class_mats[v]) == cmat_trace(other.class_mats[v]))) ok = false;
    }
    std::cout << "lagrangian oracle: " << (ok ? "all traces equal" : "MISMATCH") << "\n";
  } else if (name == "innerproduct") {
    AlgebraisedDL dl = build_dl(th, *s.cls);
    Rat full = oracles::full_group_inner_product(gl, [&](const Mat& g) { return dl.chi(g); });
    Rat mackey = mackey_inner_product(dl);
    ok = full == mackey;
    std::cout << "inner product: full-group " << full.str() << " vs mackey "
              << mackey.str() << (ok ? " (equal)" : " MISMATCH") << "\n";
  } else if (name == "stabilizer") {
    uint64_t brute = oracles::stabilizer_order_bruteforce(th);
    bool cond = s.cls->stabilizer_condition(th);
    ok = cond == (brute == gl.size_TGjF(gl.lp()));
    std::cout << "stabilizer order " << brute << ", centralizer criterion "
              << (cond ? "holds" : "fails") << (ok ? " (consistent)" : " MISMATCH") << "\n";
  } else {
    std::cerr << "unknown oracle: " << name << "\n";
    return 1;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact Deligne-Lusztig character engine over finite chain rings"};
  app.require_subcommand(1);

  InstanceConfig cfg;
  std::string torus_flag = "1,1";
  std::string config_file, oracle_name = "induction";

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--ring", cfg.ring, "ring spec key, e.g. mixed:p3:e1:r3:a1");
    sub->add_option("--n", cfg.n, "matrix size");
    sub->add_option("--torus", torus_flag, "torus partition, e.g. 2 or 1,1");
    sub->add_option("--theta", cfg.theta, "all | sg | sample:<k> | index:<i,...>");
    sub->add_option("--seed", cfg.seed, "seed for sampled selections");
    sub->add_option("--threads", cfg.threads, "worker threads for sweeps");
    sub->add_option("--guard", cfg.guard, "enumeration guard");
    sub->add_option("--out", cfg.out, "output directory for reports");
  };

  CLI::App* c_classify = app.add_subcommand("classify", "classify all torus characters");
  CLI::App* c_build = app.add_subcommand("build", "build and persist extensions");
  CLI::App* c_verify = app.add_subcommand("verify", "dimension, character, orbit checks");
  CLI::App* c_density = app.add_subcommand("density", "regular-character density table");
  CLI::App* c_orbit = app.add_subcommand("orbit", "orbit decomposition of the restriction");
  CLI::App* c_hill = app.add_subcommand("hill", "count induced characters per orbit");
  CLI::App* c_oracle = app.add_subcommand("oracle", "brute-force cross checks");
  CLI::App* c_run = app.add_subcommand("run", "run experiments from a config file");
  for (CLI::App* sub : {c_classify, c_build, c_verify, c_density, c_orbit, c_hill, c_oracle})
    add_common(sub);
  c_density->add_option("--mmax", cfg.density_mmax, "largest tower power");
  c_oracle->add_option("--name", oracle_name, "induction|lagrangian|innerproduct|stabilizer");
  c_run->add_option("--config", config_file, "key=value or .json config")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_run->parsed()) {
      std::ifstream is(config_file);
      if (!is) throw std::runtime_error("cannot read " + config_file);
      std::stringstream buf;
      buf << is.rdbuf();
      cfg = config_file.size() > 5 && config_file.substr(config_file.size() - 5) == ".json"
                ? InstanceConfig::parse_json(buf.str())
                : InstanceConfig::parse_kv(buf.str());
      Session s(cfg);
      int rc = 0;
      for (const std::string& e : cfg.experiments) {
        if (e == "classify") rc |= cmd_classify(s);
        else if (e == "build") rc |= cmd_build(s);
        else if (e == "verify") rc |= cmd_verify(s);
        else if (e == "density") rc |= cmd_density(s);
        else if (e == "orbit") rc |= cmd_orbit(s);
        else if (e == "hill") rc |= cmd_hill(s);
        else throw std::runtime_error("unknown experiment " + e);
      }
      return rc;
    }
    // parse the torus flag
    {
      cfg.torus.clear();
      std::istringstream is(torus_flag);
      std::string tok;
      while (std::getline(is, tok, ',')) cfg.torus.push_back(std::stoi(tok));
    }
    Session s(cfg);
    if (c_classify->parsed()) return cmd_classify(s);
    if (c_build->parsed()) return cmd_build(s);
    if (c_verify->parsed()) return cmd_verify(s);
    if (c_density->parsed()) return cmd_density(s);
    if (c_orbit->parsed()) return cmd_orbit(s);
    if (c_hill->parsed()) return cmd_hill(s);
    if (c_oracle->parsed()) return cmd_oracle(s, oracle_name);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
