#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "jscc/channel.hpp"
#include "jscc/conv_code.hpp"
#include "jscc/decode.hpp"
#include "jscc/joint.hpp"
#include "jscc/pep.hpp"
#include "jscc/rng.hpp"

namespace jscc {

enum class Scheme { joint_recursive, joint_nonrecursive, unjoint, sw_baseline, genie };

inline const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::joint_recursive: return "joint_recursive";
    case Scheme::joint_nonrecursive: return "joint_nonrecursive";
    case Scheme::unjoint: return "unjoint";
    case Scheme::sw_baseline: return "sw_baseline";
    case Scheme::genie: return "genie";
  }
  return "?";
}

inline Scheme parse_scheme(const std::string& name) {
  for (Scheme s : {Scheme::joint_recursive, Scheme::joint_nonrecursive, Scheme::unjoint,
                   Scheme::sw_baseline, Scheme::genie})
    if (name == scheme_name(s)) return s;
  throw std::invalid_argument("unknown scheme: " + name);
}

/// Fixed baseline channel code: non-recursive rate-1/3, nu = 3, used by the
/// ideal distributed-compression reference scheme.
inline const std::uint32_t kSwGenerators[3] = {0b1011u, 0b1101u, 0b1111u};
inline constexpr double kSwRate = 1.0 / 3.0;

/// Winners of the built-in packet-bound search at gamma_b = 3 dB, nu = 3
/// (reproducible with `search --nu 3 --gamma-db 3 --rho <rho>`).
inline CodeSpec optimum_code_rho80() { return CodeSpec::make(0b1101u, 0b1111u, 0b1011u, 3); }
inline CodeSpec optimum_code_rho90() { return CodeSpec::make(0b1011u, 0b1111u, 0b1101u, 3); }
inline CodeSpec optimum_code_rho95() { return CodeSpec::make(0b1011u, 0b1101u, 0b1111u, 3); }
/// Classical best non-recursive rate-1/2 code for nu = 3 (uncorrelated case).
inline CodeSpec classical_nonrecursive_code() { return CodeSpec::make(0b1101u, 0b1111u, 0u, 3); }

struct StopRule {
  std::uint64_t max_packets = 100000;
  std::uint64_t max_errors = 200;   // stop once (err_x + err_y) / 2 reaches this
  double ci_half_width = 0.0;       // optional absolute target; 0 disables

  void validate() const {
    if (max_packets == 0 || max_errors == 0) throw std::invalid_argument("stop rule bounds must be positive");
  }
};

struct SimConfig {
  Scheme scheme = Scheme::joint_recursive;
  CodeSpec code = optimum_code_rho90();  // ignored by sw_baseline
  double rho = 0.9;
  int l_pkt = 100;
  Fading fading = Fading::awgn;
  double rice_k = 0.0;
  std::vector<double> snr_db = {3.0};  // gamma_b grid, dB
  StopRule stop;
  std::uint64_t seed = 1;
  int threads = 1;
  int iterations = 5;
  bool early_stop = true;

  void validate() const {
    stop.validate();
    if (snr_db.empty()) throw std::invalid_argument("empty SNR grid");
    if (rho < 0.5 || rho > 1.0) throw std::invalid_argument("correlation must lie in [0.5, 1]");
    if (l_pkt < 1) throw std::invalid_argument("packet length must be positive");
    if (threads < 1) throw std::invalid_argument("need at least one worker");
    if (iterations < 1) throw std::invalid_argument("need at least one iteration");
  }
};

/// 95% score confidence interval for k successes out of n trials.
struct Interval {
  double lo = 0.0, hi = 1.0;
};

inline Interval wilson_interval(std::uint64_t k, std::uint64_t n, double z = 1.959963985) {
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

struct TrialOutcome {
  bool err_x = false;
  bool err_y = false;
  int iterations = 1;
};

namespace detail {

struct SimContext {
  Trellis trellis;
  Trellis sw_trellis;
  std::size_t sw_lpkt = 0;

  explicit SimContext(const SimConfig& cfg)
      : trellis(build_trellis(cfg.code)),
        sw_trellis(build_trellis(std::span<const std::uint32_t>(kSwGenerators, 3), 0u, 3)),
        sw_lpkt(static_cast<std::size_t>(
            std::llround(2.0 * static_cast<double>(cfg.l_pkt) / 3.0))) {}
};

inline bool any_bit_differs(const Bits& a, const Bits& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return true;
  return false;
}

inline TrialOutcome run_trial_impl(const SimConfig& cfg, const SimContext& ctx,
                                   std::size_t snr_index, std::uint64_t trial) {
  const double gamma_db = cfg.snr_db[snr_index];
  Rng rng = Rng::stream(cfg.seed, snr_index, trial);
  TrialOutcome out;

  if (cfg.scheme == Scheme::sw_baseline) {
    // two independent links, shorter packets, deeper code; correlation is
    // fully removed by the ideal compressor
    const ChannelParams params = ChannelParams::make(cfg.fading, cfg.rice_k, gamma_db, kSwRate);
    Bits info_x(ctx.sw_lpkt), info_y(ctx.sw_lpkt);
    for (auto& b : info_x) b = static_cast<std::uint8_t>(rng.bit());
    for (auto& b : info_y) b = static_cast<std::uint8_t>(rng.bit());
    const auto alpha_x = draw_gain(params, rng);
    const auto alpha_y = draw_gain(params, rng);
    const auto obs_x = transmit(encode(ctx.sw_trellis, info_x, true), params, alpha_x, rng);
    const auto obs_y = transmit(encode(ctx.sw_trellis, info_y, true), params, alpha_y, rng);
    out.err_x = any_bit_differs(viterbi_hard(ctx.sw_trellis, channel_llr(obs_x, params), true), info_x);
    out.err_y = any_bit_differs(viterbi_hard(ctx.sw_trellis, channel_llr(obs_y, params), true), info_y);
    return out;
  }

  const ChannelParams params =
      ChannelParams::make(cfg.fading, cfg.rice_k, gamma_db, CodeSpec::rate());
  const CorrelatedPair pair = draw_sources(static_cast<std::size_t>(cfg.l_pkt), cfg.rho, rng);
  const auto alpha_x = draw_gain(params, rng);
  const auto alpha_y = draw_gain(params, rng);
  const auto obs_x = transmit(encode(ctx.trellis, pair.x, true), params, alpha_x, rng);
  const auto obs_y = transmit(encode(ctx.trellis, pair.y, true), params, alpha_y, rng);

  switch (cfg.scheme) {
    case Scheme::joint_recursive:
    case Scheme::joint_nonrecursive: {
      JointConfig jc{cfg.rho, cfg.iterations, cfg.early_stop, false};
      const JointResult jr = decode_joint(ctx.trellis, obs_x, obs_y, params, params, jc, true);
      out.err_x = any_bit_differs(jr.x_hat, pair.x);
      out.err_y = any_bit_differs(jr.y_hat, pair.y);
      out.iterations = jr.iterations_run;
      break;
    }
    case Scheme::unjoint: {
      out.err_x =
          any_bit_differs(viterbi_hard(ctx.trellis, channel_llr(obs_x, params), true), pair.x);
      out.err_y =
          any_bit_differs(viterbi_hard(ctx.trellis, channel_llr(obs_y, params), true), pair.y);
      break;
    }
    case Scheme::genie: {
      out.err_x =
          any_bit_differs(decode_genie(ctx.trellis, obs_x, params, pair.y, cfg.rho, true), pair.x);
      out.err_y =
          any_bit_differs(decode_genie(ctx.trellis, obs_y, params, pair.x, cfg.rho, true), pair.y);
      break;
    }
    default: break;
  }
  return out;
}

struct BatchTotals {
  std::uint64_t err_x = 0, err_y = 0, iter_sum = 0;
};

inline BatchTotals run_batch(const SimConfig& cfg, const SimContext& ctx, std::size_t snr_index,
                             std::uint64_t begin, std::uint64_t end) {
  const std::uint64_t count = end - begin;
  const int workers =
      static_cast<int>(std::min<std::uint64_t>(static_cast<std::uint64_t>(cfg.threads), count));
  std::vector<BatchTotals> parts(static_cast<std::size_t>(std::max(workers, 1)));
  auto work = [&](int w) {
    const std::uint64_t lo = begin + count * static_cast<std::uint64_t>(w) /
                                         static_cast<std::uint64_t>(workers);
    const std::uint64_t hi = begin + count * static_cast<std::uint64_t>(w + 1) /
                                         static_cast<std::uint64_t>(workers);
    BatchTotals t;
    for (std::uint64_t i = lo; i < hi; ++i) {
      const TrialOutcome o = run_trial_impl(cfg, ctx, snr_index, i);
      t.err_x += o.err_x;
      t.err_y += o.err_y;
      t.iter_sum += static_cast<std::uint64_t>(o.iterations);
    }
    parts[static_cast<std::size_t>(w)] = t;
  };
  if (workers <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }
  BatchTotals total;
  for (const auto& t : parts) {
    total.err_x += t.err_x;
    total.err_y += t.err_y;
    total.iter_sum += t.iter_sum;
  }
  return total;
}

constexpr std::uint64_t kBatchSize = 256;

}  // namespace detail

/// One packet of the configured scheme; outcomes depend only on
/// (seed, snr_index, trial), never on scheduling.
inline TrialOutcome run_trial(const SimConfig& cfg, std::size_t snr_index, std::uint64_t trial) {
  cfg.validate();
  detail::SimContext ctx(cfg);
  return detail::run_trial_impl(cfg, ctx, snr_index, trial);
}

struct SnrPointResult {
  double snr_db = 0.0;
  std::uint64_t packets = 0, err_x = 0, err_y = 0;
  double per_avg = 0.0, ci_lo = 0.0, ci_hi = 1.0, mean_iters = 0.0;
};

struct SimResult {
  std::vector<SnrPointResult> points;
};

/// Run trials per SNR point until a stop-rule condition fires. Stop checks
/// happen only at fixed batch boundaries, so the set of trials evaluated --
/// and every reported number -- is identical for any worker count.
inline SimResult estimate_per(const SimConfig& cfg) {
  cfg.validate();
  detail::SimContext ctx(cfg);
  SimResult result;
  for (std::size_t si = 0; si < cfg.snr_db.size(); ++si) {
    std::uint64_t packets = 0;
    detail::BatchTotals totals;
    while (packets < cfg.stop.max_packets) {
      const std::uint64_t end =
          std::min<std::uint64_t>(packets + detail::kBatchSize, cfg.stop.max_packets);
      const detail::BatchTotals bt = detail::run_batch(cfg, ctx, si, packets, end);
      totals.err_x += bt.err_x;
      totals.err_y += bt.err_y;
      totals.iter_sum += bt.iter_sum;
      packets = end;
      if (totals.err_x + totals.err_y >= 2 * cfg.stop.max_errors) break;
      if (cfg.stop.ci_half_width > 0.0 && totals.err_x + totals.err_y > 0) {
        const Interval ci = wilson_interval(totals.err_x + totals.err_y, 2 * packets);
        if (0.5 * (ci.hi - ci.lo) <= cfg.stop.ci_half_width) break;
      }
    }
    SnrPointResult point;
    point.snr_db = cfg.snr_db[si];
    point.packets = packets;
    point.err_x = totals.err_x;
    point.err_y = totals.err_y;
    point.per_avg =
        static_cast<double>(totals.err_x + totals.err_y) / (2.0 * static_cast<double>(packets));
    const Interval ci = wilson_interval(totals.err_x + totals.err_y, 2 * packets);
    point.ci_lo = ci.lo;
    point.ci_hi = ci.hi;
    point.mean_iters = static_cast<double>(totals.iter_sum) / static_cast<double>(packets);
    result.points.push_back(point);
  }
  return result;
}

// ---------------------------------------------------------------------------
// scheme comparison at equal airtime and per-sample energy

struct CompareRow {
  Scheme scheme = Scheme::joint_recursive;
  double xi_rx_db = 0.0;    // average received energy per coded sample, dB
  double gamma_b_db = 0.0;  // the scheme's resulting info-bit SNR, dB
  SnrPointResult point;
};

struct CompareResult {
  std::vector<CompareRow> rows;
  int symbols_rate12 = 0;    // coded samples per packet, rate-1/2 schemes
  int symbols_sw = 0;        // coded samples per packet, baseline scheme
  int rounding_residual = 0; // symbols_sw - symbols_rate12 (packet-length rounding)
};

/// Average-received-energy comparison of the joint schemes against the
/// ideal distributed-compression baseline. All schemes see the same energy
/// per coded sample and the same airtime; gamma_b = xi_rx / (2 r) maps the
/// shared axis onto each scheme's own info-bit SNR.
inline CompareResult compare_sw(double rho, int l_pkt, Fading fading, double rice_k,
                                const std::vector<double>& xi_rx_db_grid, const StopRule& stop,
                                std::uint64_t seed, int threads,
                                const CodeSpec& recursive_code = optimum_code_rho95(),
                                const CodeSpec& nonrecursive_code = classical_nonrecursive_code()) {
  CompareResult result;
  const int sw_lpkt = static_cast<int>(std::llround(2.0 * l_pkt / 3.0));
  result.symbols_rate12 = 2 * l_pkt;
  result.symbols_sw = 3 * sw_lpkt;
  result.rounding_residual = result.symbols_sw - result.symbols_rate12;

  const double sw_shift = linear_to_db(CodeSpec::rate() / kSwRate);  // +10 log10(1.5)
  for (Scheme scheme :
       {Scheme::joint_recursive, Scheme::joint_nonrecursive, Scheme::sw_baseline}) {
    SimConfig cfg;
    cfg.scheme = scheme;
    cfg.code = scheme == Scheme::joint_nonrecursive ? nonrecursive_code : recursive_code;
    cfg.rho = rho;
    cfg.l_pkt = l_pkt;
    cfg.fading = fading;
    cfg.rice_k = rice_k;
    cfg.stop = stop;
    cfg.seed = seed;
    cfg.threads = threads;
    cfg.snr_db.clear();
    for (double xi : xi_rx_db_grid)
      cfg.snr_db.push_back(scheme == Scheme::sw_baseline ? xi + sw_shift : xi);
    const SimResult r = estimate_per(cfg);
    for (std::size_t i = 0; i < r.points.size(); ++i)
      result.rows.push_back(CompareRow{scheme, xi_rx_db_grid[i], cfg.snr_db[i], r.points[i]});
  }
  return result;
}

// ---------------------------------------------------------------------------
// bound-vs-simulation overlay

struct OverlayRow {
  double snr_db = 0.0;
  SnrPointResult point;      // ideal-side-information simulation
  double packet_bound = 0.0; // analytical union bound at the same parameters
  double boundary_term = 0.0;
};

inline std::vector<OverlayRow> bound_overlay(const CodeSpec& code, double rho, int l_pkt,
                                             const std::vector<double>& snr_db_grid,
                                             const StopRule& stop, std::uint64_t seed, int threads,
                                             int d_max_offset = 10) {
  const Trellis trellis = build_trellis(code);
  if (is_catastrophic(trellis))
    throw CatastrophicCodeError("analysis requires a non-catastrophic code");
  const WeightSpectrum spectrum = spectrum_by_offset(trellis, d_max_offset);

  SimConfig cfg;
  cfg.scheme = Scheme::genie;
  cfg.code = code;
  cfg.rho = rho;
  cfg.l_pkt = l_pkt;
  cfg.snr_db = snr_db_grid;
  cfg.stop = stop;
  cfg.seed = seed;
  cfg.threads = threads;
  const SimResult sim = estimate_per(cfg);

  std::vector<OverlayRow> rows;
  for (std::size_t i = 0; i < snr_db_grid.size(); ++i) {
    PepParams p{CodeSpec::rate(), rho, db_to_linear(snr_db_grid[i])};
    const UnionBound ub = packet_error_bound(spectrum, p, l_pkt);
    rows.push_back(OverlayRow{snr_db_grid[i], sim.points[i], ub.value, ub.boundary_term});
  }
  return rows;
}

// ---------------------------------------------------------------------------
// CSV emission (byte-stable for a given config and seed)

namespace detail {

inline std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace detail

inline std::string simulate_csv(const SimConfig& cfg, const SimResult& result) {
  std::string out = "scheme,rho,lpkt,fading,snr_db,packets,err_x,err_y,per_avg,ci_lo,ci_hi,mean_iters\n";
  const std::string fading = fading_name(cfg.fading, cfg.rice_k);
  for (const auto& p : result.points) {
    out += scheme_name(cfg.scheme);
    out += ',' + detail::fmt("%g", cfg.rho);
    out += ',' + std::to_string(cfg.l_pkt);
    out += ',' + fading;
    out += ',' + detail::fmt("%.6g", p.snr_db);
    out += ',' + std::to_string(p.packets);
    out += ',' + std::to_string(p.err_x);
    out += ',' + std::to_string(p.err_y);
    out += ',' + detail::fmt("%.8g", p.per_avg);
    out += ',' + detail::fmt("%.8g", p.ci_lo);
    out += ',' + detail::fmt("%.8g", p.ci_hi);
    out += ',' + detail::fmt("%.6g", p.mean_iters);
    out += '\n';
  }
  return out;
}

inline std::string compare_csv(Fading fading, double rice_k, const CompareResult& result) {
  std::string out =
      "scheme,fading,xi_rx_db,gamma_b_db,packets,err_x,err_y,per_avg,ci_lo,ci_hi,mean_iters\n";
  const std::string fname = fading_name(fading, rice_k);
  for (const auto& row : result.rows) {
    out += scheme_name(row.scheme);
    out += ',' + fname;
    out += ',' + detail::fmt("%.6g", row.xi_rx_db);
    out += ',' + detail::fmt("%.6g", row.gamma_b_db);
    out += ',' + std::to_string(row.point.packets);
    out += ',' + std::to_string(row.point.err_x);
    out += ',' + std::to_string(row.point.err_y);
    out += ',' + detail::fmt("%.8g", row.point.per_avg);
    out += ',' + detail::fmt("%.8g", row.point.ci_lo);
    out += ',' + detail::fmt("%.8g", row.point.ci_hi);
    out += ',' + detail::fmt("%.6g", row.point.mean_iters);
    out += '\n';
  }
  return out;
}

inline std::string overlay_csv(const std::vector<OverlayRow>& rows) {
  std::string out = "snr_db,packets,per_genie,ci_lo,ci_hi,packet_bound,truncation_tail\n";
  for (const auto& row : rows) {
    out += detail::fmt("%.6g", row.snr_db);
    out += ',' + std::to_string(row.point.packets);
    out += ',' + detail::fmt("%.8g", row.point.per_avg);
    out += ',' + detail::fmt("%.8g", row.point.ci_lo);
    out += ',' + detail::fmt("%.8g", row.point.ci_hi);
    out += ',' + detail::fmt("%.8g", row.packet_bound);
    out += ',' + detail::fmt("%.8g", row.boundary_term);
    out += '\n';
  }
  return out;
}

}  // namespace jscc
