#pragma once

#include <cmath>
#include <complex>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "jscc/conv_code.hpp"
#include "jscc/rng.hpp"

namespace jscc {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double v) { return 10.0 * std::log10(v); }

enum class Fading { awgn, rayleigh, rice };

inline std::string fading_name(Fading f, double rice_k = 0.0) {
  switch (f) {
    case Fading::awgn: return "awgn";
    case Fading::rayleigh: return "rayleigh";
    case Fading::rice: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "rice(%g)", rice_k);
      return buf;
    }
  }
  return "?";
}

/// Link parameters. N0 is kept at 1 internally; the SNR enters through the
/// received energy per coded bit xi_c = rate * gamma_b * N0. For the fading
/// kinds the gain has unit mean square, so gamma_b is the average SNR per
/// information bit.
struct ChannelParams {
  Fading fading = Fading::awgn;
  double rice_k = 0.0;  // linear ratio, rice only
  double rate = 0.5;
  double gamma_b = 1.0;  // linear xi_b / N0
  double n0 = 1.0;

  double xi_c() const { return rate * gamma_b * n0; }

  static ChannelParams make(Fading f, double rice_k, double gamma_b_db, double rate) {
    if (rate <= 0.0 || rate > 1.0) throw std::invalid_argument("rate out of range");
    if (rice_k < 0.0) throw std::invalid_argument("rice factor must be >= 0");
    return ChannelParams{f, rice_k, rate, db_to_linear(gamma_b_db), 1.0};
  }
  static ChannelParams awgn_db(double gamma_b_db, double rate = 0.5) {
    return make(Fading::awgn, 0.0, gamma_b_db, rate);
  }
};

struct CorrelatedPair {
  Bits x, y;
};

/// Draw the two sources: x i.i.d. uniform, y_i = x_i with probability rho
/// and flipped otherwise, independently per bit.
inline CorrelatedPair draw_sources(std::size_t k, double rho, Rng& rng) {
  if (rho < 0.5 || rho > 1.0) throw std::invalid_argument("correlation must lie in [0.5, 1]");
  CorrelatedPair pair;
  pair.x.resize(k);
  pair.y.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    const std::uint8_t xi = static_cast<std::uint8_t>(rng.bit());
    pair.x[i] = xi;
    pair.y[i] = rng.bernoulli(rho) ? xi : static_cast<std::uint8_t>(xi ^ 1u);
  }
  return pair;
}

/// One complex link gain per packet (quasi-static fading). awgn gives
/// exactly 1; rice(K) gives sqrt(K/(K+1)) plus a circular complex gaussian
/// of total variance 1/(K+1); rayleigh is rice(0).
inline std::complex<double> draw_gain(const ChannelParams& params, Rng& rng) {
  switch (params.fading) {
    case Fading::awgn: return {1.0, 0.0};
    case Fading::rayleigh: {
      const double s = std::sqrt(0.5);
      return {s * rng.gaussian(), s * rng.gaussian()};
    }
    case Fading::rice: {
      const double k = params.rice_k;
      const double los = std::sqrt(k / (k + 1.0));
      const double s = std::sqrt(0.5 / (k + 1.0));
      return {los + s * rng.gaussian(), s * rng.gaussian()};
    }
  }
  return {1.0, 0.0};
}

/// Matched-filter outputs for one packet: u_i = z_i sqrt(2 xi_c) |alpha| +
/// eta_i with eta_i ~ N(0, N0). Bit 0 maps to +1, bit 1 to -1.
struct ObservationSeq {
  std::vector<double> u;
  double gain_mag = 1.0;
};

inline ObservationSeq transmit(const Bits& coded, const ChannelParams& params,
                               std::complex<double> alpha, Rng& rng) {
  ObservationSeq obs;
  obs.gain_mag = std::abs(alpha);
  const double amp = std::sqrt(2.0 * params.xi_c()) * obs.gain_mag;
  const double sigma = std::sqrt(params.n0);
  obs.u.resize(coded.size());
  for (std::size_t i = 0; i < coded.size(); ++i) {
    const double z = coded[i] ? -1.0 : 1.0;
    obs.u[i] = z * amp + sigma * rng.gaussian();
  }
  return obs;
}

/// Per-bit channel log-likelihood ratios, positive in favour of bit 0:
/// llr_i = 2 sqrt(2 xi_c) |alpha| u_i / N0.
inline std::vector<double> channel_llr(const ObservationSeq& obs, const ChannelParams& params) {
  const double scale = 2.0 * std::sqrt(2.0 * params.xi_c()) * obs.gain_mag / params.n0;
  std::vector<double> llr(obs.u.size());
  for (std::size_t i = 0; i < obs.u.size(); ++i) llr[i] = scale * obs.u[i];
  return llr;
}

}  // namespace jscc
