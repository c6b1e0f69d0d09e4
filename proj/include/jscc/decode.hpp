#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "jscc/conv_code.hpp"

namespace jscc {

/// Per-bit probability-of-one values, the quantity exchanged between the
/// two decoders. Entries are clipped into [clip_eps, 1 - clip_eps] before
/// any logarithm is taken.
struct ProbSequence {
  std::vector<double> p;

  static constexpr double clip_eps = 1e-12;

  static double clipped(double v) {
    if (v < clip_eps) return clip_eps;
    if (v > 1.0 - clip_eps) return 1.0 - clip_eps;
    return v;
  }

  void clip() {
    for (double& v : p) v = clipped(v);
  }

  static ProbSequence uniform(std::size_t k) {
    ProbSequence s;
    s.p.assign(k, 0.5);
    return s;
  }
};

struct DecodeResult {
  Bits hard;
  ProbSequence posterior;
  double path_metric = 0.0;
};

namespace detail {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kPosInf = std::numeric_limits<double>::infinity();

/// Metric of the branch's coded bits against the channel LLRs: each output
/// bit contributes +llr/2 for a 0 (symbol +1) and -llr/2 for a 1.
inline double branch_channel_metric(const Trellis& t, std::uint8_t out, const double* llr) {
  double m = 0.0;
  for (int j = 0; j < t.n_out; ++j) m += ((out >> j) & 1u) ? -0.5 * llr[j] : 0.5 * llr[j];
  return m;
}

struct ForwardPass {
  // arrays over time points 1..T, index [t * n_states + state]
  std::vector<std::uint8_t> surv_in;    // input bit of the surviving branch
  std::vector<std::uint8_t> surv_prev;  // predecessor state of the survivor
  std::vector<double> delta;            // survivor-vs-loser metric difference
  std::vector<double> metric;           // final metrics only
  int final_state = 0;
};

/// Add-compare-select over the whole packet. `apriori_llr` holds
/// ln(p/(1-p)) per information step (empty for plain Viterbi); tail steps
/// carry no a-priori term. Ties prefer the branch with input 0, then the
/// smaller predecessor state.
inline ForwardPass forward_pass(const Trellis& t, const std::vector<double>& llr,
                                const std::vector<double>& apriori_llr, std::size_t n_steps,
                                bool terminated) {
  const int S = t.n_states;
  ForwardPass fp;
  fp.surv_in.resize(n_steps * static_cast<std::size_t>(S));
  fp.surv_prev.resize(n_steps * static_cast<std::size_t>(S));
  fp.delta.resize(n_steps * static_cast<std::size_t>(S));
  std::vector<double> prev(static_cast<std::size_t>(S), kNegInf);
  std::vector<double> next(static_cast<std::size_t>(S));
  prev[0] = 0.0;
  for (std::size_t i = 0; i < n_steps; ++i) {
    const double* step_llr = llr.data() + i * static_cast<std::size_t>(t.n_out);
    const double ap = i < apriori_llr.size() ? apriori_llr[i] : 0.0;
    const std::size_t base = i * static_cast<std::size_t>(S);
    for (int s = 0; s < S; ++s) {
      const auto in0 = t.incoming[static_cast<std::size_t>(s)][0];
      const auto in1 = t.incoming[static_cast<std::size_t>(s)][1];
      double m0 = prev[in0.prev];
      double m1 = prev[in1.prev];
      if (m0 > kNegInf)
        m0 += branch_channel_metric(t, t.branch[in0.prev][in0.input].out, step_llr) +
              (in0.input ? ap : 0.0);
      if (m1 > kNegInf)
        m1 += branch_channel_metric(t, t.branch[in1.prev][in1.input].out, step_llr) +
              (in1.input ? ap : 0.0);
      // pick the survivor; exact ties prefer input 0, then lower predecessor
      bool pick0;
      if (m0 != m1) {
        pick0 = m0 > m1;
      } else if (in0.input != in1.input) {
        pick0 = in0.input == 0;
      } else {
        pick0 = in0.prev <= in1.prev;
      }
      const auto& win = pick0 ? in0 : in1;
      const double wm = pick0 ? m0 : m1;
      const double lm = pick0 ? m1 : m0;
      next[static_cast<std::size_t>(s)] = wm;
      fp.surv_in[base + static_cast<std::size_t>(s)] = win.input;
      fp.surv_prev[base + static_cast<std::size_t>(s)] = static_cast<std::uint8_t>(win.prev);
      fp.delta[base + static_cast<std::size_t>(s)] =
          (wm > kNegInf && lm > kNegInf) ? wm - lm : kPosInf;
    }
    prev.swap(next);
  }
  fp.metric = prev;
  if (terminated) {
    fp.final_state = 0;
  } else {
    int best = 0;
    for (int s = 1; s < S; ++s)
      if (fp.metric[static_cast<std::size_t>(s)] > fp.metric[static_cast<std::size_t>(best)])
        best = s;
    fp.final_state = best;
  }
  return fp;
}

inline void traceback(const ForwardPass& fp, int n_states, std::size_t n_steps,
                      std::vector<int>& path_state, Bits& path_in) {
  path_state.resize(n_steps + 1);
  path_in.resize(n_steps);
  path_state[n_steps] = fp.final_state;
  for (std::size_t i = n_steps; i-- > 0;) {
    const std::size_t idx =
        i * static_cast<std::size_t>(n_states) + static_cast<std::size_t>(path_state[i + 1]);
    path_in[i] = fp.surv_in[idx];
    path_state[i] = fp.surv_prev[idx];
  }
}

inline std::size_t checked_steps(const Trellis& t, const std::vector<double>& llr,
                                 bool terminated) {
  if (llr.size() % static_cast<std::size_t>(t.n_out) != 0)
    throw std::invalid_argument("LLR length not a multiple of the code's output count");
  const std::size_t steps = llr.size() / static_cast<std::size_t>(t.n_out);
  if (terminated && steps <= static_cast<std::size_t>(t.nu))
    throw std::invalid_argument("terminated packet shorter than the tail");
  return steps;
}

}  // namespace detail

/// Maximum-metric path under the channel metric alone; returns the path's
/// information bits (tail steps stripped when terminated).
inline Bits viterbi_hard(const Trellis& trellis, const std::vector<double>& llr, bool terminated) {
  const std::size_t steps = detail::checked_steps(trellis, llr, terminated);
  const std::size_t k = terminated ? steps - static_cast<std::size_t>(trellis.nu) : steps;
  auto fp = detail::forward_pass(trellis, llr, {}, steps, terminated);
  std::vector<int> path_state;
  Bits path_in;
  detail::traceback(fp, trellis.n_states, steps, path_state, path_in);
  path_in.resize(k);
  return path_in;
}

/// Soft-output Viterbi decoding. Survivor selection combines the channel
/// metric with the a-priori term ln(p/(1-p)) on each hypothesized
/// information bit. Reliabilities follow the Hagenauer-Hoeher update: for
/// every merge along the best path, the metric difference to the competing
/// path caps the reliability of each information bit on which the two
/// disagree, with the competitor traced over the whole packet. posterior_i
/// is the logistic of the signed decision LLR, and hard_i = 1 exactly when
/// posterior_i > 0.5 (a zero-reliability tie resolves to 0).
inline DecodeResult sova(const Trellis& trellis, const std::vector<double>& llr,
                         const ProbSequence& apriori, bool terminated) {
  const std::size_t steps = detail::checked_steps(trellis, llr, terminated);
  const std::size_t k = terminated ? steps - static_cast<std::size_t>(trellis.nu) : steps;
  if (apriori.p.size() != k)
    throw std::invalid_argument("a-priori length must equal the information length");

  std::vector<double> ap_llr(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double p = ProbSequence::clipped(apriori.p[i]);
    ap_llr[i] = std::log(p / (1.0 - p));
  }

  auto fp = detail::forward_pass(trellis, llr, ap_llr, steps, terminated);
  std::vector<int> path_state;
  Bits path_in;
  detail::traceback(fp, trellis.n_states, steps, path_state, path_in);

  std::vector<double> rel(k, detail::kPosInf);
  const int S = trellis.n_states;
  for (std::size_t i = 1; i <= steps; ++i) {
    const int s = path_state[i];
    const std::size_t idx =
        (i - 1) * static_cast<std::size_t>(S) + static_cast<std::size_t>(s);
    const double d = fp.delta[idx];
    if (!(d < detail::kPosInf)) continue;  // competitor unreachable
    // identify the losing incoming branch at this merge
    const auto& inc = trellis.incoming[static_cast<std::size_t>(s)];
    const bool surv_is_0 = inc[0].prev == fp.surv_prev[idx] && inc[0].input == fp.surv_in[idx];
    const auto& lose = surv_is_0 ? inc[1] : inc[0];
    if (i - 1 < k && lose.input != path_in[i - 1])
      rel[i - 1] = std::min(rel[i - 1], d);
    // walk the competitor's own survivors back to the packet start
    int cs = lose.prev;
    for (std::size_t t = i - 1; t-- > 0;) {
      const std::size_t cidx = t * static_cast<std::size_t>(S) + static_cast<std::size_t>(cs);
      const std::uint8_t cin = fp.surv_in[cidx];
      if (t < k && cin != path_in[t]) rel[t] = std::min(rel[t], d);
      cs = fp.surv_prev[cidx];
    }
  }

  DecodeResult result;
  result.path_metric = fp.metric[static_cast<std::size_t>(fp.final_state)];
  result.posterior.p.resize(k);
  result.hard.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double lam = path_in[i] ? rel[i] : -rel[i];
    const double post = ProbSequence::clipped(1.0 / (1.0 + std::exp(-lam)));
    result.posterior.p[i] = post;
    result.hard[i] = post > 0.5 ? 1 : 0;
  }
  return result;
}

}  // namespace jscc
