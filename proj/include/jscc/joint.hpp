#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "jscc/channel.hpp"
#include "jscc/conv_code.hpp"
#include "jscc/decode.hpp"

namespace jscc {

struct JointConfig {
  double rho = 0.9;
  int iterations = 5;
  bool early_stop = true;
  /// Extension, off by default: subtract the incoming prior from the
  /// posterior (in LLR) before mixing, as a turbo decoder would. The plain
  /// scheme feeds full posteriors through the mixer.
  bool extrinsic = false;

  void validate() const {
    if (rho < 0.5 || rho > 1.0) throw std::invalid_argument("correlation must lie in [0.5, 1]");
    if (iterations < 1) throw std::invalid_argument("need at least one iteration");
  }
};

struct IterationDiag {
  int changed_x = 0;
  int changed_y = 0;
};

struct JointResult {
  Bits x_hat, y_hat;
  int iterations_run = 0;
  std::vector<IterationDiag> diags;
};

/// Convert one stream's posterior into the partner stream's prior through
/// the correlation model: out_i = p_i * rho + (1 - p_i) * (1 - rho).
/// Written as (1-rho) + p*(2rho-1) so rho = 0.5 yields exactly 0.5.
inline ProbSequence mix_apriori(const ProbSequence& posterior, double rho) {
  ProbSequence out;
  out.p.resize(posterior.p.size());
  const double base = 1.0 - rho;
  const double slope = 2.0 * rho - 1.0;
  for (std::size_t i = 0; i < posterior.p.size(); ++i)
    out.p[i] = ProbSequence::clipped(base + posterior.p[i] * slope);
  return out;
}

/// Correlation seen through a decoder with bit error probability p_b.
inline double effective_correlation(double rho, double p_b) {
  if (p_b < 0.0 || p_b > 0.5) throw std::invalid_argument("bit error probability out of range");
  return rho * (1.0 - p_b) + (1.0 - rho) * p_b;
}

namespace detail {

inline int hamming(const Bits& a, const Bits& b) {
  int d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
  return d;
}

inline ProbSequence extrinsic_of(const DecodeResult& dec, const ProbSequence& prior) {
  ProbSequence out;
  out.p.resize(dec.posterior.p.size());
  for (std::size_t i = 0; i < out.p.size(); ++i) {
    const double lp = std::log(dec.posterior.p[i] / (1.0 - dec.posterior.p[i]));
    const double pr = ProbSequence::clipped(prior.p[i]);
    const double le = lp - std::log(pr / (1.0 - pr));
    out.p[i] = ProbSequence::clipped(1.0 / (1.0 + std::exp(-le)));
  }
  return out;
}

}  // namespace detail

/// Iterative joint decoding: alternate SOVA passes on the two streams,
/// mixing each a-posteriori output into the other stream's a-priori input.
/// Priors start uniform; with early_stop the loop exits once both
/// hard-decision vectors are unchanged between consecutive iterations.
inline JointResult decode_joint(const Trellis& trellis, const std::vector<double>& llr_x,
                                const std::vector<double>& llr_y, const JointConfig& cfg,
                                bool terminated) {
  cfg.validate();
  const std::size_t steps = llr_x.size() / static_cast<std::size_t>(trellis.n_out);
  const std::size_t k = terminated ? steps - static_cast<std::size_t>(trellis.nu) : steps;

  JointResult result;
  ProbSequence prior_x = ProbSequence::uniform(k);
  Bits prev_x, prev_y;
  for (int j = 1; j <= cfg.iterations; ++j) {
    const DecodeResult dec_x = sova(trellis, llr_x, prior_x, terminated);
    const ProbSequence prior_y =
        mix_apriori(cfg.extrinsic ? detail::extrinsic_of(dec_x, prior_x) : dec_x.posterior,
                    cfg.rho);
    const DecodeResult dec_y = sova(trellis, llr_y, prior_y, terminated);
    prior_x =
        mix_apriori(cfg.extrinsic ? detail::extrinsic_of(dec_y, prior_y) : dec_y.posterior,
                    cfg.rho);

    IterationDiag diag;
    diag.changed_x = j == 1 ? static_cast<int>(k) : detail::hamming(dec_x.hard, prev_x);
    diag.changed_y = j == 1 ? static_cast<int>(k) : detail::hamming(dec_y.hard, prev_y);
    result.diags.push_back(diag);
    result.iterations_run = j;

    const bool stable = j > 1 && diag.changed_x == 0 && diag.changed_y == 0;
    prev_x = dec_x.hard;
    prev_y = dec_y.hard;
    result.x_hat = dec_x.hard;
    result.y_hat = dec_y.hard;
    if (cfg.early_stop && stable) break;
  }
  return result;
}

inline JointResult decode_joint(const Trellis& trellis, const ObservationSeq& obs_x,
                                const ObservationSeq& obs_y, const ChannelParams& params_x,
                                const ChannelParams& params_y, const JointConfig& cfg,
                                bool terminated) {
  return decode_joint(trellis, channel_llr(obs_x, params_x), channel_llr(obs_y, params_y), cfg,
                      terminated);
}

/// Single SOVA pass with the partner's true information sequence as prior:
/// apriori_i = rho when partner_truth_i = 1, else 1 - rho. This is the
/// decoder the closed-form error analysis models.
inline Bits decode_genie(const Trellis& trellis, const ObservationSeq& obs,
                         const ChannelParams& params, const Bits& partner_truth, double rho,
                         bool terminated) {
  if (rho < 0.5 || rho > 1.0) throw std::invalid_argument("correlation must lie in [0.5, 1]");
  ProbSequence prior;
  prior.p.resize(partner_truth.size());
  for (std::size_t i = 0; i < partner_truth.size(); ++i)
    prior.p[i] = partner_truth[i] ? rho : 1.0 - rho;
  prior.clip();
  return sova(trellis, channel_llr(obs, params), prior, terminated).hard;
}

}  // namespace jscc
