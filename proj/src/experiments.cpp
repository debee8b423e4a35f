#include "hrl/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

#include "hrl/fourier.hpp"
#include "hrl/haar.hpp"
#include "hrl/random.hpp"
#include "hrl/sharpness.hpp"

namespace hrl {

namespace {

MultiscaleRow base_row(const std::string& name, int n, int J, Direction e, std::uint64_t seed) {
  MultiscaleRow r;
  r.experiment = name;
  r.n = n;
  r.J = J;
  r.epsilon_bits = e.str();
  r.seed = seed;
  return r;
}

}  // namespace

// ---------------------------------------------------------------- T_ell

std::vector<MultiscaleRow> tl_decay(const TlDecayConfig& cfg) {
  if (cfg.ells.empty()) throw std::invalid_argument("empty ell range");
  const bool riesz = cfg.i0 >= 0;
  std::map<int, double> m;
  auto measure = [&](int ell) {
    if (auto it = m.find(ell); it != m.end()) return it->second;
    const LinearFieldOp op = riesz ? t_ell_riesz_inverse_op(cfg.n, cfg.J, cfg.e, cfg.i0, ell, cfg.levels)
                                   : t_ell_op(cfg.n, cfg.J, cfg.e, ell, cfg.levels);
    return m[ell] = op_norm2_estimate(op, cfg.iters, cfg.seed).value;
  };
  std::vector<MultiscaleRow> rows;
  for (int ell : cfg.ells) {
    MultiscaleRow r = base_row(riesz ? "tl-riesz-decay" : "tl-decay", cfg.n, cfg.J, cfg.e, cfg.seed);
    r.ell_or_lambda = ell;
    r.i0 = riesz ? cfg.i0 + 1 : 0;
    r.trials = cfg.iters;
    r.measured = measure(ell);
    if (ell >= 0) {
      r.bound_model = measure(0) * std::pow(2.0, (riesz ? 0.5 : -0.5) * ell);
    } else {
      r.bound_model = measure(-1) * std::pow(2.0, -0.5 * (-ell - 1));
    }
    r.slack = r.measured / r.bound_model;
    rows.push_back(r);
  }
  return rows;
}

// ------------------------------------------------------------------ rings

std::vector<MultiscaleRow> ring_decay(const RingDecayConfig& cfg) {
  if (cfg.lambdas.empty()) throw std::invalid_argument("empty lambda range");
  const std::vector<DyadicCube> cubes = default_sparse_family(cfg.n, cfg.j0, cfg.j1);
  std::vector<MultiscaleRow> rows;
  for (int lambda : cfg.lambdas) {
    const RingFamily fam = build_ring_family(cubes, cfg.e, lambda, cfg.C, cfg.J);
    MultiscaleRow r = base_row("ring-decay", cfg.n, cfg.J, cfg.e, cfg.seed);
    r.ell_or_lambda = lambda;
    r.trials = cfg.iters;
    r.measured = op_norm2_estimate(ring_projection_op(fam), cfg.iters, cfg.seed).value;
    r.bound_model = rows.empty() ? r.measured
                                 : rows.back().measured *
                                       std::pow(2.0, -0.5 * (lambda - rows.back().ell_or_lambda));
    r.slack = r.measured / r.bound_model;
    rows.push_back(r);
  }
  return rows;
}

std::vector<MultiscaleRow> rearrange_scaling(const RearrangeConfig& cfg) {
  if (cfg.lambdas.empty()) throw std::invalid_argument("empty lambda range");
  std::vector<MultiscaleRow> rows;
  for (int lambda : cfg.lambdas) {
    RearrangementSpec spec;
    spec.n = cfg.n;
    spec.J = cfg.J;
    spec.e = cfg.e;
    spec.lambda = lambda;
    spec.wmin = cfg.wmin;
    spec.wmax = cfg.wmax;
    MultiscaleRow r = base_row("rearrange-scaling", cfg.n, cfg.J, cfg.e, cfg.seed);
    r.ell_or_lambda = lambda;
    r.trials = cfg.iters;
    r.measured = op_norm2_estimate(rearrangement_linear_op(spec), cfg.iters, cfg.seed).value;
    r.bound_model = rows.empty() ? r.measured
                                 : rows.back().measured *
                                       std::ldexp(1.0, cfg.n * (lambda - rows.back().ell_or_lambda));
    r.slack = r.measured / r.bound_model;
    rows.push_back(r);
  }
  return rows;
}

// ---------------------------------------------------------- interpolation

double interp_ratio(const GridFunction& u, Direction e, int i0, double p) {
  if (!(p > 1.0)) throw std::invalid_argument("p must exceed 1");
  const double a = p >= 2.0 ? 0.5 : 1.0 / p;
  const double pu = lp_norm(directional_project(u, e), p);
  const double nu = lp_norm(u, p);
  const double ru = lp_norm(riesz(u, i0), p);
  if (pu == 0.0) return 0.0;
  if (ru == 0.0 || nu == 0.0) return std::numeric_limits<double>::infinity();
  return pu / (std::pow(nu, a) * std::pow(ru, 1.0 - a));
}

std::vector<std::string> interp_family_names(int n) {
  std::vector<std::string> out{"haar_poly", "single_block", "cone"};
  if (n == 2) out.push_back("f_eps");
  return out;
}

int interp_family_size(const std::string& family, int trials) { return family == "f_eps" ? 1 : trials; }

GridFunction interp_family_member(const std::string& family, int n, int J, Direction e, int i0, int trial,
                                  std::uint64_t seed) {
  if (family == "haar_poly") return random_haar_field(n, J, 0, std::min(3, J - 1), seed, 100 + trial);
  if (family == "single_block") {
    CounterRng rng(seed, 200 + trial);
    const int level = std::min(trial % 4, J - 1);
    std::array<std::int64_t, kMaxDim> k{};
    for (int i = 0; i < n; ++i) k[i] = static_cast<std::int64_t>(rng.below(std::uint64_t{1} << level));
    return haar_function(DyadicCube(n, level, k), e, J);
  }
  if (family == "cone") {
    constexpr int kModes = 6, kMax = 4;
    if ((1 << J) / 2 <= kMax) throw std::invalid_argument("cone family needs J >= 4");
    CounterRng rng(seed, 300 + trial);
    struct Wave {
      std::array<int, kMaxDim> k;
      double a, b;
    };
    std::vector<Wave> waves;
    for (int w = 0; w < kModes; ++w) {
      Wave wv{};
      const int ki0 = 1 + static_cast<int>(rng.below(kMax));
      for (int i = 0; i < n; ++i) {
        const int reach = std::min(kMax, 2 * ki0);
        wv.k[i] = i == i0 ? ki0 : static_cast<int>(rng.below(2 * reach + 1)) - reach;
      }
      wv.a = rng.normal();
      wv.b = rng.normal();
      waves.push_back(wv);
    }
    return embed(
        [&](std::span<const double> x) {
          double s = 0.0;
          for (const Wave& wv : waves) {
            double ph = 0.0;
            for (int i = 0; i < n; ++i) ph += wv.k[i] * x[i];
            ph *= 2 * std::numbers::pi;
            s += wv.a * std::cos(ph) + wv.b * std::sin(ph);
          }
          return s;
        },
        n, J, 5);
  }
  if (family == "f_eps") {
    if (n != 2) throw std::invalid_argument("f_eps family lives in dimension 2");
    if (J < 5) throw std::invalid_argument("f_eps family needs J >= 5");
    return dense_collection_field(build_collection(DyadicEps{1}), J);
  }
  throw std::invalid_argument("unknown test family '" + family + "'");
}

std::vector<MultiscaleRow> interp_ratio_experiment(const InterpConfig& cfg) {
  if (cfg.trials < 1) throw std::invalid_argument("trials must be positive");
  if (!cfg.e.oscillates(cfg.i0))
    throw std::invalid_argument("direction " + cfg.e.str() + " does not oscillate along axis " +
                                std::to_string(cfg.i0 + 1));
  std::vector<MultiscaleRow> rows;
  for (double p : cfg.ps) {
    double all_lo = 0.0, all_hi = 0.0;
    int all_trials = 0;
    for (const std::string& fam : interp_family_names(cfg.n)) {
      const int size = interp_family_size(fam, cfg.trials);
      double lo = 0.0, hi = 0.0;
      for (int t = 0; t < size; ++t) {
        lo = std::max(lo, interp_ratio(interp_family_member(fam, cfg.n, cfg.J, cfg.e, cfg.i0, t, cfg.seed), cfg.e,
                                       cfg.i0, p));
        hi = std::max(hi, interp_ratio(interp_family_member(fam, cfg.n, cfg.J + 1, cfg.e, cfg.i0, t, cfg.seed),
                                       cfg.e, cfg.i0, p));
      }
      MultiscaleRow r = base_row("interp-ratio:" + fam, cfg.n, cfg.J + 1, cfg.e, cfg.seed);
      r.p = p;
      r.i0 = cfg.i0 + 1;
      r.trials = size;
      r.measured = hi;
      r.bound_model = lo;
      r.slack = lo > 0.0 ? hi / lo : 0.0;
      rows.push_back(r);
      all_lo = std::max(all_lo, lo);
      all_hi = std::max(all_hi, hi);
      all_trials += size;
    }
    MultiscaleRow r = base_row("interp-ratio:all", cfg.n, cfg.J + 1, cfg.e, cfg.seed);
    r.p = p;
    r.i0 = cfg.i0 + 1;
    r.trials = all_trials;
    r.measured = all_hi;
    r.bound_model = all_lo;
    r.slack = all_lo > 0.0 ? all_hi / all_lo : 0.0;
    rows.push_back(r);
  }
  return rows;
}

}  // namespace hrl
