#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hrl/experiments.hpp"
#include "hrl/haar.hpp"
#include "hrl/random.hpp"
#include "hrl/semiconvexity.hpp"
#include "hrl/sharpness.hpp"
#include "json.hpp"
#include "selftest.hpp"

namespace fs = std::filesystem;
using namespace hrl;

namespace {

constexpr const char* kVersion = "0.3.0";

enum Exit { ok = 0, failure = 1, validation = 2, assertion = 3, resource = 4 };

struct AssertionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- parsing

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

int to_int(const std::string& s) {
  std::size_t pos = 0;
  int v = 0;
  try {
    v = std::stoi(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || s.empty()) throw std::invalid_argument("'" + s + "' is not an integer");
  return v;
}

double to_double(const std::string& s) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || s.empty()) throw std::invalid_argument("'" + s + "' is not a number");
  return v;
}

// "a..b" or "a,b,c".
std::vector<int> int_list(const std::string& s) {
  std::vector<int> out;
  if (const auto dots = s.find(".."); dots != std::string::npos) {
    const int a = to_int(s.substr(0, dots)), b = to_int(s.substr(dots + 2));
    if (a > b) throw std::invalid_argument("empty range '" + s + "'");
    for (int v = a; v <= b; ++v) out.push_back(v);
    return out;
  }
  for (const auto& t : split(s, ',')) out.push_back(to_int(t));
  if (out.empty()) throw std::invalid_argument("empty list '" + s + "'");
  return out;
}

std::vector<double> double_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& t : split(s, ',')) out.push_back(to_double(t));
  if (out.empty()) throw std::invalid_argument("empty list '" + s + "'");
  return out;
}

std::vector<DyadicEps> eps_list(const std::string& s) {
  std::vector<DyadicEps> out;
  for (const auto& t : split(s, ',')) out.push_back(DyadicEps::parse(t));
  if (out.empty()) throw std::invalid_argument("empty epsilon list");
  return out;
}

Direction parse_direction(const std::string& bits, int n) {
  if (static_cast<int>(bits.size()) != n) throw std::invalid_argument("--dir needs " + std::to_string(n) + " digits");
  unsigned b = 0;
  for (int i = 0; i < n; ++i) {
    if (bits[i] != '0' && bits[i] != '1') throw std::invalid_argument("--dir digits must be 0 or 1");
    if (bits[i] == '1') b |= 1U << i;
  }
  return Direction(n, b);
}

// --------------------------------------------------------------- output

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string csv() const {
    std::string s;
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) s += (i ? "," : "") + cells[i];
      s += "\n";
    };
    line(header);
    for (const auto& r : rows) line(r);
    return s;
  }
};

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr))
    throw std::runtime_error("digest failed");
  std::string hex;
  char b[3];
  for (unsigned i = 0; i < len; ++i) {
    std::snprintf(b, sizeof b, "%02x", md[i]);
    hex += b;
  }
  return hex;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ------------------------------------------------------------ options

struct Options {
  int n = 2;
  std::optional<int> J;
  std::optional<std::string> p;
  std::optional<std::string> ell;
  std::optional<std::string> lambda;
  std::optional<std::string> eps;
  std::optional<double> eta;
  std::optional<int> trials;
  std::uint64_t seed = 0;
  std::string out = "results";
  std::optional<double> slack;
  double cap_bytes = 4.0 * (1ULL << 30);
  std::optional<int> sample;
  std::optional<int> i0;
  std::optional<std::string> dir;
  std::string regime = "pge2";
  std::optional<std::string> f;
  std::optional<std::string> r;
};

using Params = std::map<std::string, std::string>;

void require_cap(double bytes, const Options& o) {
  if (bytes > o.cap_bytes) {
    std::ostringstream os;
    os << "estimated memory " << bytes << " bytes exceeds --cap-bytes " << o.cap_bytes;
    throw ResourceError(os.str());
  }
}

// Working set of grid experiments: a few dozen real and complex fields.
double grid_bytes(int n, int J, double fields = 48.0) { return std::ldexp(fields * 8.0, n * J); }

double single_p(const Options& o, double def) {
  if (!o.p) return def;
  const auto ps = double_list(*o.p);
  if (ps.size() != 1) throw std::invalid_argument("--p takes a single value here");
  return ps[0];
}

void require_p2(const Options& o, const char* what) {
  if (single_p(o, 2.0) != 2.0)
    throw std::invalid_argument(std::string(what) + " measures L2 operator norms; only --p 2 is supported");
}

Direction default_direction(const Options& o, int n) {
  if (o.dir) return parse_direction(*o.dir, n);
  return Direction::unit(n, o.i0 ? *o.i0 - 1 : 0);
}

int axis_from(const Options& o, int n) {
  const int i0 = o.i0.value_or(1);
  if (i0 < 1 || i0 > n) throw std::invalid_argument("--i0 must be in 1.." + std::to_string(n));
  return i0 - 1;
}

// --------------------------------------------------------- subcommands

const std::vector<std::string> kMultiscaleHeader{"experiment", "n",     "J",    "p",        "ell_or_lambda",
                                                 "epsilon_bits", "i0", "trials", "seed",   "measured",
                                                 "bound_model",  "slack"};

std::vector<std::string> multiscale_cells(const MultiscaleRow& r) {
  return {r.experiment,         std::to_string(r.n),  std::to_string(r.J),      num(r.p),
          std::to_string(r.ell_or_lambda), r.epsilon_bits, std::to_string(r.i0), std::to_string(r.trials),
          std::to_string(r.seed), num(r.measured),     num(r.bound_model),      num(r.slack)};
}

std::string row_label(const MultiscaleRow& r) {
  return r.experiment + " ell_or_lambda=" + std::to_string(r.ell_or_lambda) + " p=" + num(r.p);
}

struct Outcome {
  Table table;
  std::vector<std::string> failures;
};

Outcome cmd_tl_decay(const Options& o, Params& prm) {
  require_p2(o, "tl-decay");
  TlDecayConfig c;
  c.n = o.n;
  c.J = o.J.value_or(7);
  c.e = default_direction(o, c.n);
  c.ells = int_list(o.ell.value_or("-4..4"));
  c.levels = {1, c.J - 2};
  c.seed = o.seed;
  if (o.trials) c.iters = *o.trials;
  if (o.i0) c.i0 = axis_from(o, c.n);
  const double sigma = o.slack.value_or(2.0);
  require_cap(grid_bytes(c.n, c.J), o);
  prm["J"] = std::to_string(c.J);
  prm["ell"] = o.ell.value_or("-4..4");
  prm["dir"] = c.e.str();
  prm["levels"] = "1.." + std::to_string(c.J - 2);
  prm["iters"] = std::to_string(c.iters);
  prm["slack"] = num(sigma);
  Outcome out{{kMultiscaleHeader, {}}, {}};
  for (const auto& r : tl_decay(c)) {
    out.table.rows.push_back(multiscale_cells(r));
    if (!(r.slack <= sigma)) out.failures.push_back(row_label(r) + ": slack " + num(r.slack) + " > " + num(sigma));
  }
  return out;
}

Outcome cmd_ring_decay(const Options& o, Params& prm) {
  require_p2(o, "ring-decay");
  RingDecayConfig c;
  c.n = o.n;
  c.J = o.J.value_or(7);
  c.e = default_direction(o, c.n);
  c.lambdas = int_list(o.lambda.value_or("3..5"));
  c.seed = o.seed;
  if (o.trials) c.iters = *o.trials;
  const double sigma = o.slack.value_or(1.5);
  require_cap(grid_bytes(c.n, c.J), o);
  prm["J"] = std::to_string(c.J);
  prm["lambda"] = o.lambda.value_or("3..5");
  prm["dir"] = c.e.str();
  prm["C"] = num(c.C);
  prm["family_levels"] = std::to_string(c.j0) + ".." + std::to_string(c.j1);
  prm["iters"] = std::to_string(c.iters);
  prm["slack"] = num(sigma);
  Outcome out{{kMultiscaleHeader, {}}, {}};
  for (const auto& r : ring_decay(c)) {
    out.table.rows.push_back(multiscale_cells(r));
    if (!(r.slack <= sigma)) out.failures.push_back(row_label(r) + ": slack " + num(r.slack) + " > " + num(sigma));
  }
  return out;
}

Outcome cmd_rearrange(const Options& o, Params& prm) {
  require_p2(o, "rearrange-scaling");
  RearrangeConfig c;
  c.n = o.n;
  c.J = o.J.value_or(7);
  c.e = default_direction(o, c.n);
  c.lambdas = int_list(o.lambda.value_or("1..3"));
  c.seed = o.seed;
  if (o.trials) c.iters = *o.trials;
  const double sigma = o.slack.value_or(1.5);
  require_cap(grid_bytes(c.n, c.J), o);
  prm["J"] = std::to_string(c.J);
  prm["lambda"] = o.lambda.value_or("1..3");
  prm["dir"] = c.e.str();
  prm["w_levels"] = std::to_string(c.wmin) + ".." + std::to_string(c.wmax);
  prm["iters"] = std::to_string(c.iters);
  prm["slack"] = num(sigma);
  Outcome out{{kMultiscaleHeader, {}}, {}};
  for (const auto& r : rearrange_scaling(c)) {
    out.table.rows.push_back(multiscale_cells(r));
    if (!(r.slack <= sigma)) out.failures.push_back(row_label(r) + ": slack " + num(r.slack) + " > " + num(sigma));
  }
  return out;
}

Outcome cmd_interp(const Options& o, Params& prm) {
  InterpConfig c;
  c.n = o.n;
  c.J = o.J.value_or(6);
  c.i0 = axis_from(o, c.n);
  c.e = default_direction(o, c.n);
  if (o.p) c.ps = double_list(*o.p);
  if (o.trials) c.trials = *o.trials;
  c.seed = o.seed;
  const double tol = o.slack.value_or(0.2);
  require_cap(grid_bytes(c.n, c.J + 1), o);
  prm["J"] = std::to_string(c.J);
  prm["p"] = o.p.value_or("2,3,1.5");
  prm["i0"] = std::to_string(c.i0 + 1);
  prm["dir"] = c.e.str();
  prm["trials"] = std::to_string(c.trials);
  prm["slack"] = num(tol);
  Outcome out{{kMultiscaleHeader, {}}, {}};
  for (const auto& r : interp_ratio_experiment(c)) {
    out.table.rows.push_back(multiscale_cells(r));
    if (r.experiment != "interp-ratio:all") continue;
    if (!std::isfinite(r.measured) || !(std::abs(r.slack - 1.0) <= tol))
      out.failures.push_back(row_label(r) + ": sup " + num(r.measured) + " vs " + num(r.bound_model) +
                             " at J-1, outside +-" + num(tol));
  }
  return out;
}

Outcome cmd_sharpness(const Options& o, Params& prm) {
  const auto eps = eps_list(o.eps.value_or("1/2,1/4,1/8"));
  const double eta = o.eta.value_or(0.1);
  const double factor = o.slack.value_or(0.7);
  prm["regime"] = o.regime;
  prm["eps"] = o.eps.value_or("1/2,1/4,1/8");
  prm["eta"] = num(eta);
  prm["slack"] = num(factor);
  std::vector<SharpnessRow> rows;
  if (o.regime == "pge2") {
    require_p2(o, "sharpness --regime pge2");
    const int m = o.sample.value_or(2000);
    if (m < 0) throw std::invalid_argument("--sample must be >= 0");
    prm["sample"] = std::to_string(m);
    require_cap(64.0 * std::max(m, 1) * 1024, o);
    rows = sharpness_experiment_pge2(eps, eta, SampleMode{m == 0, m, o.seed});
  } else if (o.regime == "ple2") {
    const double p = single_p(o, 1.5);
    if (!(p > 1.0 && p <= 2.0)) throw std::invalid_argument("ple2 needs 1 < p <= 2");
    prm["p"] = num(p);
    for (const auto& e : eps) require_cap(grid_bytes(2, e.n0 + 6), o);
    rows = single_block_experiment_ple2(eps, p, eta);
  } else {
    throw std::invalid_argument("--regime must be pge2 or ple2");
  }
  Outcome out{{{"epsilon", "p", "eta", "norm_f", "norm_Rf", "lower_P", "ratio", "mode", "J_or_sample_size", "seed",
                "growth"},
               {}},
              {}};
  const double need = std::pow(2.0, eta) * factor;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    out.table.rows.push_back({r.epsilon, num(r.p), num(r.eta), num(r.norm_f), num(r.norm_Rf), num(r.lower_P),
                              num(r.ratio), r.mode, std::to_string(r.size), std::to_string(r.seed),
                              i ? num(r.growth) : ""});
    if (i && !(r.growth >= need))
      out.failures.push_back("sharpness epsilon=" + r.epsilon + ": growth " + num(r.growth) + " < " + num(need));
  }
  return out;
}

const std::vector<std::string> kSemiHeader{"experiment", "f_name", "r", "I_r", "I_limit", "defect_min",
                                           "compliant_flag"};

std::vector<Integrand> chosen_integrands(const Options& o, int n) {
  const auto reg = integrand_registry(n);
  if (!o.f) return reg;
  std::vector<Integrand> out;
  for (const auto& name : split(*o.f, ',')) out.push_back(find_integrand(reg, name));
  return out;
}

Outcome cmd_jensen(const Options& o, Params& prm) {
  const int n = o.n;
  const int J = o.J.value_or(4);
  const int trials = o.trials.value_or(200);
  const auto Ms = int_list(o.lambda.value_or("0.." + std::to_string(std::min(3, J))));
  require_cap(grid_bytes(n, J, 16.0 * n), o);
  prm["J"] = std::to_string(J);
  prm["trials"] = std::to_string(trials);
  prm["M"] = o.lambda.value_or("0.." + std::to_string(std::min(3, J)));
  prm["f"] = o.f.value_or("all");
  Outcome out{{kSemiHeader, {}}, {}};
  const auto fs_ = chosen_integrands(o, n);
  std::vector<std::vector<double>> worst(fs_.size(), std::vector<double>(Ms.size(), 1e300));
  for (int t = 0; t < trials; ++t) {
    VectorField v;
    for (int j = 0; j < n; ++j) {
      const Direction e = Direction::unit(n, j);
      v.push_back(random_haar_field(n, J, 0, J - 1, o.seed, 1000 + t * n + j, std::span<const Direction>(&e, 1)));
    }
    for (std::size_t a = 0; a < fs_.size(); ++a)
      for (std::size_t b = 0; b < Ms.size(); ++b)
        worst[a][b] = std::min(worst[a][b], jensen_range_check(v, fs_[a], Ms[b]));
  }
  for (std::size_t a = 0; a < fs_.size(); ++a) {
    for (std::size_t b = 0; b < Ms.size(); ++b) {
      const bool good = worst[a][b] >= -1e-9;
      out.table.rows.push_back({"jensen", fs_[a].name, std::to_string(Ms[b]), "", "", num(worst[a][b]), "1"});
      if (!good)
        out.failures.push_back("jensen f=" + fs_[a].name + " M=" + std::to_string(Ms[b]) + ": defect " +
                               num(worst[a][b]));
    }
  }
  return out;
}

Outcome cmd_semicontinuity(const Options& o, Params& prm) {
  const int n = o.n;
  const int J = o.J.value_or(7);
  const auto rs = int_list(o.r.value_or("2,4,8,16"));
  require_cap(grid_bytes(n, J, 16.0 * n), o);
  prm["J"] = std::to_string(J);
  prm["r"] = o.r.value_or("2,4,8,16");
  prm["f"] = o.f.value_or("all");
  prm["phi"] = "1";
  const FieldFn one = [](std::span<const double>) { return 1.0; };
  Outcome out{{kSemiHeader, {}}, {}};
  for (const auto& f : chosen_integrands(o, n)) {
    for (const auto& seq : {compliant_sequence(n), contrast_sequence(n)}) {
      for (const auto& row : semicontinuity_experiment(f, one, seq, rs, J)) {
        out.table.rows.push_back({row.experiment, row.f_name, std::to_string(row.r), num(row.I_r), num(row.I_limit),
                                  "", row.compliant ? "1" : "0"});
        const std::string label = row.experiment + " f=" + f.name + " r=" + std::to_string(row.r);
        if (row.compliant && !(row.I_r >= row.I_limit - 1e-8))
          out.failures.push_back(label + ": I_r " + num(row.I_r) + " below I_limit " + num(row.I_limit));
        if (!row.compliant && f.name == "ab" && !(row.I_r - row.I_limit >= 0.4))
          out.failures.push_back(label + ": contrast gap " + num(row.I_r - row.I_limit) + " < 0.4");
      }
    }
  }
  return out;
}

Outcome cmd_selftest(const Options& o, Params& prm) {
  const int J = o.J.value_or(5);
  require_cap(grid_bytes(std::max(o.n, 2), std::max(J, 8)), o);
  prm["J"] = std::to_string(J);
  Outcome out{{{"check", "measured", "expected", "tolerance", "kind", "pass"}, {}}, {}};
  const auto rows = tool::run_selftest(o.n, J, o.seed);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const char* kind = r.kind == tool::CheckKind::near ? "near" : r.kind == tool::CheckKind::at_most ? "<=" : ">=";
    out.table.rows.push_back({"\"" + r.name + "\"", num(r.measured), num(r.expected), num(r.tolerance), kind,
                              r.pass ? "1" : "0"});
    if (!r.pass) out.failures.push_back("row " + std::to_string(i + 1) + " (" + r.name + "): " + num(r.measured));
  }
  return out;
}

// ------------------------------------------------------------------ run

int run(const std::string& sub, const Options& o, const std::vector<std::string>& argv) {
  const std::string started = utc_now();
  Params prm;
  prm["n"] = std::to_string(o.n);
  prm["seed"] = std::to_string(o.seed);
  prm["cap_bytes"] = num(o.cap_bytes);
  if (o.n < 1 || o.n > kMaxDim) throw std::invalid_argument("--n must be 1..3");

  Outcome out;
  if (sub == "tl-decay") out = cmd_tl_decay(o, prm);
  else if (sub == "ring-decay") out = cmd_ring_decay(o, prm);
  else if (sub == "rearrange-scaling") out = cmd_rearrange(o, prm);
  else if (sub == "interp-ratio") out = cmd_interp(o, prm);
  else if (sub == "sharpness") out = cmd_sharpness(o, prm);
  else if (sub == "jensen") out = cmd_jensen(o, prm);
  else if (sub == "semicontinuity") out = cmd_semicontinuity(o, prm);
  else if (sub == "selftest") out = cmd_selftest(o, prm);
  else throw std::invalid_argument("unknown subcommand " + sub);

  fs::create_directories(o.out);
  const std::string csv = out.table.csv();
  std::ofstream(fs::path(o.out) / "results.csv", std::ios::binary) << csv;

  const int code = out.failures.empty() ? Exit::ok : Exit::assertion;
  nlohmann::ordered_json m;
  m["subcommand"] = sub;
  for (const auto& [k, v] : prm) m["param." + k] = v;
  std::string args;
  for (const auto& a : argv) args += (args.empty() ? "" : " ") + a;
  m["argv"] = args;
  m["version"] = kVersion;
  m["started_at"] = started;
  m["finished_at"] = utc_now();
  m["rows"] = out.table.rows.size();
  m["assertions_failed"] = out.failures.size();
  m["results_sha256"] = sha256_hex(csv);
  m["exit_code"] = code;
  std::ofstream(fs::path(o.out) / "manifest.json") << m.dump(2) << "\n";

  std::cout << sub << ": " << out.table.rows.size() << " rows -> " << (fs::path(o.out) / "results.csv").string()
            << "\n";
  for (const auto& f : out.failures) std::cerr << "assertion failed: " << f << "\n";
  return code;
}

void add_common(CLI::App* s, Options& o) {
  s->add_option("--n", o.n, "dimension (1..3)");
  s->add_option("--J", o.J, "grid level");
  s->add_option("--p", o.p, "exponent, or comma list for interp-ratio");
  s->add_option("--ell", o.ell, "ell range a..b or list");
  s->add_option("--lambda", o.lambda, "lambda range (M range for jensen)");
  s->add_option("--eps", o.eps, "dyadic epsilons, e.g. 1/2,1/4,1/8");
  s->add_option("--eta", o.eta, "exponent perturbation");
  s->add_option("--trials", o.trials, "trials or power iterations");
  s->add_option("--seed", o.seed, "random seed");
  s->add_option("--out", o.out, "output directory");
  s->add_option("--slack", o.slack, "slack factor or tolerance of the assertions");
  s->add_option("--cap-bytes", o.cap_bytes, "memory cap in bytes");
  s->add_option("--sample", o.sample, "sample size per layer (0 = exact)");
  s->add_option("--i0", o.i0, "Riesz axis, 1-based");
  s->add_option("--dir", o.dir, "Haar direction as digits, axis 1 first (e.g. 10)");
  s->add_option("--regime", o.regime, "sharpness regime: pge2 or ple2");
  s->add_option("--f", o.f, "integrand names, comma separated");
  s->add_option("--r", o.r, "oscillation frequencies for semicontinuity");
}

std::vector<std::string> replay_argv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open manifest " + path);
  nlohmann::json m;
  try {
    in >> m;
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!m.contains("argv")) throw std::invalid_argument("manifest has no argv entry");
  return split(m["argv"].get<std::string>(), ' ');
}

int main_impl(std::vector<std::string> args) {
  CLI::App app{"Dyadic Haar / Riesz transform experiment runner"};
  app.require_subcommand(1);
  Options o;
  const std::vector<std::pair<const char*, const char*>> subs{
      {"interp-ratio", "interpolatory ratio sup over test families, stability under J -> J+1"},
      {"tl-decay", "power-iteration norms of T_ell against the 2^(-|ell|/2) model"},
      {"ring-decay", "ring projection norms across lambda"},
      {"rearrange-scaling", "rearrangement operator norms across lambda"},
      {"sharpness", "block construction ratios (--regime pge2|ple2)"},
      {"jensen", "Jensen defect on the range of P"},
      {"semicontinuity", "compliant vs contrast oscillating sequences"},
      {"selftest", "built-in example checks"}};
  std::map<std::string, CLI::App*> cmds;
  for (const auto& [name, help] : subs) {
    cmds[name] = app.add_subcommand(name, help);
    add_common(cmds[name], o);
  }
  std::string manifest, replay_out;
  auto* replay = app.add_subcommand("replay", "re-run the command recorded in a manifest");
  replay->add_option("manifest", manifest, "manifest.json")->required();
  replay->add_option("--out", replay_out, "output directory override");

  std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? Exit::ok : Exit::validation;
  }
  if (replay->parsed()) {
    std::vector<std::string> again{args[0]};
    const auto recorded = replay_argv(manifest);
    for (std::size_t i = 0; i < recorded.size(); ++i) {
      if (!replay_out.empty() && recorded[i] == "--out") {
        ++i;
        continue;
      }
      again.push_back(recorded[i]);
    }
    if (!replay_out.empty()) {
      again.push_back("--out");
      again.push_back(replay_out);
    }
    return main_impl(again);
  }
  for (const auto& [name, sc] : cmds)
    if (sc->parsed()) return run(name, o, std::vector<std::string>(args.begin() + 1, args.end()));
  return Exit::validation;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return main_impl(std::vector<std::string>(argv, argv + argc));
  } catch (const ResourceError& e) {
    std::cerr << "resource cap: " << e.what() << "\n";
    return Exit::resource;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return Exit::validation;
  } catch (const std::out_of_range& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return Exit::validation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return Exit::failure;
  }
}
