#pragma once

// Shared test oracles. These deliberately avoid the library's Trellis tables
// and spectrum/bound code paths: the register walk and the exhaustive
// enumerations below are the independent references the implementation is
// checked against.

#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "jscc/jscc.hpp"

namespace testutil {

// ---------------------------------------------------------------------------
// first-error-event enumeration straight from the shift-register equations

using BetaMap = std::map<std::pair<int, int>, std::uint64_t>;

inline void brute_walk(std::uint32_t g1, std::uint32_t g2, std::uint32_t h, int nu, int state,
                       int w, int d, int len, int max_len, int d_cap, BetaMap& out) {
  if (len > max_len) return;
  const std::uint32_t mask = (1u << nu) - 1;
  for (int x = 0; x < 2; ++x) {
    const int fb = jscc::parity((h >> 1) & static_cast<std::uint32_t>(state));
    const std::uint32_t a = static_cast<std::uint32_t>(x ^ fb);
    const std::uint32_t reg = (static_cast<std::uint32_t>(state) << 1) | a;
    const int o = jscc::parity(g1 & reg) + jscc::parity(g2 & reg);
    const int ns = static_cast<int>(reg & mask);
    const int nw = w + x;
    const int nd = d + o;
    if (nd > d_cap) continue;
    if (ns == 0)
      out[{nw, nd}] += 1;
    else
      brute_walk(g1, g2, h, nu, ns, nw, nd, len + 1, max_len, d_cap, out);
  }
}

/// All first-error events of length <= max_len trellis steps with output
/// weight <= d_cap. The first step always carries input 1.
inline BetaMap brute_spectrum(std::uint32_t g1, std::uint32_t g2, std::uint32_t h, int nu,
                              int max_len, int d_cap) {
  BetaMap out;
  const std::uint32_t mask = (1u << nu) - 1;
  const std::uint32_t reg = 1;  // a = input = 1 from the zero state
  const int o = jscc::parity(g1 & reg) + jscc::parity(g2 & reg);
  const int ns = static_cast<int>(reg & mask);
  if (o <= d_cap && ns != 0) brute_walk(g1, g2, h, nu, ns, 1, o, 2, max_len, d_cap, out);
  return out;
}

// ---------------------------------------------------------------------------
// exhaustive maximum-metric decoding over all information sequences

/// Path metric used by the decoders: half the signed channel LLR sum plus
/// the a-priori term on hypothesized ones.
inline double sequence_metric(const jscc::Trellis& trellis, const jscc::Bits& info,
                              const std::vector<double>& llr,
                              const std::vector<double>& apriori_p, bool terminated) {
  const jscc::Bits coded = jscc::encode(trellis, info, terminated);
  double m = 0.0;
  for (std::size_t i = 0; i < coded.size(); ++i) m += (coded[i] ? -0.5 : 0.5) * llr[i];
  for (std::size_t i = 0; i < info.size(); ++i) {
    const double p = jscc::ProbSequence::clipped(apriori_p[i]);
    if (info[i]) m += std::log(p / (1.0 - p));
  }
  return m;
}

struct BruteDecode {
  jscc::Bits best;
  double best_metric = 0.0;
  bool unique = true;  // no other sequence within 1e-9 of the maximum
};

inline BruteDecode brute_ml_decode(const jscc::Trellis& trellis, std::size_t k,
                                   const std::vector<double>& llr,
                                   const std::vector<double>& apriori_p, bool terminated) {
  BruteDecode r;
  bool first = true;
  for (std::uint64_t v = 0; v < (1ull << k); ++v) {
    jscc::Bits info(k);
    for (std::size_t i = 0; i < k; ++i) info[i] = static_cast<std::uint8_t>((v >> i) & 1u);
    const double m = sequence_metric(trellis, info, llr, apriori_p, terminated);
    if (first) {
      r.best = info;
      r.best_metric = m;
      first = false;
    } else if (m > r.best_metric + 1e-9) {
      r.best = info;
      r.best_metric = m;
      r.unique = true;
    } else if (m > r.best_metric - 1e-9) {
      r.unique = false;
      if (m > r.best_metric) r.best_metric = m;
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Monte Carlo bit error rate of the single-bit detector with correlated side
// information (the quantity the closed-form expression claims exactly)

inline double mc_uncoded_genie_ber(double gamma_b_lin, double rho, std::uint64_t trials,
                                   std::uint64_t seed) {
  jscc::Rng rng(seed);
  const double amp = std::sqrt(2.0 * gamma_b_lin);
  const double L = std::log(rho / (1.0 - rho));
  std::uint64_t errors = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const int x = rng.bit();
    const int y = rng.bernoulli(rho) ? x : 1 - x;
    const double z = x ? -1.0 : 1.0;
    const double u = z * amp + rng.gaussian();
    const double llr_to_one = -2.0 * amp * u + (2 * y - 1) * L;
    const int xhat = llr_to_one > 0.0 ? 1 : 0;
    errors += xhat != x;
  }
  return static_cast<double>(errors) / static_cast<double>(trials);
}

// ---------------------------------------------------------------------------
// explicit configuration-sum version of the averaged pairwise error
// probability (exponential cost; the implementation's binomial form is
// checked against this)

inline double enumerated_pep(int d_z, int d_x, const jscc::PepParams& p) {
  const double L = std::log(p.rho / (1.0 - p.rho));
  const double base = std::sqrt(p.rate * static_cast<double>(d_z) * p.gamma_b);
  double sum = 0.0;
  for (std::uint32_t cfg = 0; cfg < (1u << d_x); ++cfg) {
    const int agree = std::popcount(cfg);
    const double arg =
        base + (static_cast<double>(agree) * L - static_cast<double>(d_x - agree) * L) /
                   (4.0 * base);
    const double weight =
        std::pow(p.rho, agree) * std::pow(1.0 - p.rho, d_x - agree);
    sum += 0.5 * std::erfc(arg) * weight;
  }
  return sum;
}

/// GF(2) convolution of an input sequence with tap polynomial g (truncated
/// to the input length), for checking feedforward encoders.
inline jscc::Bits gf2_convolve(const jscc::Bits& input, std::uint32_t g, int nu) {
  jscc::Bits out(input.size(), 0);
  for (std::size_t t = 0; t < input.size(); ++t) {
    int acc = 0;
    for (int k = 0; k <= nu; ++k)
      if (t >= static_cast<std::size_t>(k) && ((g >> k) & 1u)) acc ^= input[t - k];
    out[t] = static_cast<std::uint8_t>(acc);
  }
  return out;
}

}  // namespace testutil
