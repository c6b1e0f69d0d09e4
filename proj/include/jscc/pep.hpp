#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "jscc/conv_code.hpp"

namespace jscc {

/// Parameters of the pairwise error probability with correlated side
/// information: code rate r, source correlation rho, and the linear
/// information-bit SNR gamma_b = xi_b / N0.
struct PepParams {
  double rate = 0.5;
  double rho = 0.5;
  double gamma_b = 1.0;

  void validate() const {
    if (rate <= 0.0 || rate > 1.0) throw std::invalid_argument("rate out of range");
    if (rho < 0.5 || rho > 1.0) throw std::invalid_argument("correlation must lie in [0.5, 1]");
    if (!(gamma_b > 0.0)) throw std::invalid_argument("gamma_b must be positive");
  }
};

namespace detail {

/// log(rho / (1-rho)), the a-priori log-likelihood magnitude. Natural
/// logarithm; rho is clamped just below 1 to keep the erfc arguments finite.
inline double side_info_llr(double rho) {
  if (rho >= 1.0) rho = 1.0 - 1e-15;
  return std::log(rho / (1.0 - rho));
}

inline double binom(int n, int k) {
  double v = 1.0;
  for (int i = 1; i <= k; ++i) v = v * static_cast<double>(n - k + i) / static_cast<double>(i);
  return v;
}

}  // namespace detail

/// Pairwise error probability of two codewords at output distance d_z and
/// input distance d_x, conditioned on the side information agreeing with
/// the transmitted bits on exactly `matches` of the d_x differing
/// positions:
///   0.5 erfc( sqrt(r d_z g) + (2 j - d_x) L / (4 sqrt(r d_z g)) ),
/// with L = ln(rho/(1-rho)).
inline double conditional_pep(int d_z, int d_x, int matches, const PepParams& p) {
  p.validate();
  if (d_z < 1) throw std::invalid_argument("output distance must be at least 1");
  if (d_x < 0 || matches < 0 || matches > d_x)
    throw std::invalid_argument("bad side-information match count");
  const double L = detail::side_info_llr(p.rho);
  const double base = std::sqrt(p.rate * static_cast<double>(d_z) * p.gamma_b);
  const double shift = static_cast<double>(2 * matches - d_x) * L / (4.0 * base);
  return 0.5 * std::erfc(base + shift);
}

/// Pairwise error probability averaged over the side-information
/// configurations; the 2^d_x configuration sum collapses to a binomial sum
/// because the conditional term depends only on the number of agreements.
inline double averaged_pep(int d_z, int d_x, const PepParams& p) {
  p.validate();
  if (d_z < 1) throw std::invalid_argument("output distance must be at least 1");
  if (d_x < 0) throw std::invalid_argument("input distance must be >= 0");
  double sum = 0.0;
  for (int j = 0; j <= d_x; ++j) {
    const double weight = detail::binom(d_x, j) * std::pow(p.rho, j) *
                          std::pow(1.0 - p.rho, d_x - j);
    sum += weight * conditional_pep(d_z, d_x, j, p);
  }
  return sum;
}

/// The perfect-match approximation: every differing position assumed to
/// agree with the side information. Underestimates averaged_pep whenever
/// rho > 0.5 and d_x >= 1; provided for comparison plots.
inline double hagenauer_pep(int d_z, int d_x, const PepParams& p) {
  p.validate();
  if (d_z < 1) throw std::invalid_argument("output distance must be at least 1");
  const double L = detail::side_info_llr(p.rho);
  const double base = std::sqrt(p.rate * static_cast<double>(d_z) * p.gamma_b);
  return 0.5 * std::erfc(base + static_cast<double>(d_x) * L / (4.0 * base));
}

/// Exact bit error probability of the uncoded antipodal transmission with
/// correlated side information at the detector:
///   0.5 erfc(sqrt(g) + L/(4 sqrt(g))) rho + 0.5 erfc(sqrt(g) - L/(4 sqrt(g))) (1-rho).
inline double uncoded_exact_pe(double gamma_b, double rho) {
  if (!(gamma_b > 0.0)) throw std::invalid_argument("gamma_b must be positive");
  if (rho < 0.5 || rho > 1.0) throw std::invalid_argument("correlation must lie in [0.5, 1]");
  const double L = detail::side_info_llr(rho);
  const double root = std::sqrt(gamma_b);
  return 0.5 * std::erfc(root + L / (4.0 * root)) * rho +
         0.5 * std::erfc(root - L / (4.0 * root)) * (1.0 - rho);
}

/// Joint entropy of the source pair in bits per symbol pair:
/// 1 - rho log2 rho - (1-rho) log2(1-rho), with 0 log 0 = 0.
inline double joint_entropy(double rho) {
  if (rho < 0.5 || rho > 1.0) throw std::invalid_argument("correlation must lie in [0.5, 1]");
  if (rho == 1.0) return 1.0;
  return 1.0 - rho * std::log2(rho) - (1.0 - rho) * std::log2(1.0 - rho);
}

/// Counts beta_{w,d} of first-error events: trellis paths that leave the
/// zero state, stay in nonzero states, and remerge, with input Hamming
/// weight w and output Hamming weight d <= d_max.
struct WeightSpectrum {
  std::map<std::pair<int, int>, std::uint64_t> beta;  // (w, d) -> count
  int d_free = -1;
  int d_max = 0;
  int w_max = 0;

  bool empty() const { return beta.empty(); }
};

/// Exact enumeration up to output weight d_max by dynamic programming over
/// (state, input weight, output weight). Zero-output-weight edges between
/// nonzero states form a DAG for non-catastrophic codes, so states are
/// relaxed in that DAG's topological order within each output-weight shell;
/// every cycle adds positive output weight, which bounds the recursion.
inline WeightSpectrum enumerate_spectrum(const Trellis& trellis, int d_max) {
  if (d_max < 1) throw std::invalid_argument("d_max must be at least 1");
  std::vector<int> order;
  if (!detail::topo_order_zero_weight(trellis, order))
    throw CatastrophicCodeError("weight spectrum of a catastrophic code does not terminate");

  const int S = trellis.n_states;
  std::vector<int> topo_pos(static_cast<std::size_t>(S), -1);
  for (std::size_t i = 0; i < order.size(); ++i) topo_pos[static_cast<std::size_t>(order[i])] =
      static_cast<int>(i);

  // counts[d][state] = vector over input weight w
  std::vector<std::vector<std::vector<std::uint64_t>>> counts(
      static_cast<std::size_t>(d_max) + 1,
      std::vector<std::vector<std::uint64_t>>(static_cast<std::size_t>(S)));
  auto bump = [](std::vector<std::uint64_t>& v, std::size_t w, std::uint64_t c) {
    if (v.size() <= w) v.resize(w + 1, 0);
    v[w] += c;
  };

  WeightSpectrum spec;
  spec.d_max = d_max;

  // the diverging branch: input 1 from the zero state
  {
    const auto& b = trellis.branch[0][1];
    const int d0 = std::popcount(static_cast<unsigned>(b.out));
    if (d0 <= d_max) bump(counts[static_cast<std::size_t>(d0)][b.next], 1, 1);
  }

  for (int d = 0; d <= d_max; ++d) {
    for (int s : order) {
      auto& cell = counts[static_cast<std::size_t>(d)][static_cast<std::size_t>(s)];
      for (std::size_t w = 0; w < cell.size(); ++w) {
        const std::uint64_t c = cell[w];
        if (c == 0) continue;
        for (int x = 0; x < 2; ++x) {
          const auto& b = trellis.branch[static_cast<std::size_t>(s)][static_cast<std::size_t>(x)];
          const int nd = d + std::popcount(static_cast<unsigned>(b.out));
          if (nd > d_max) continue;
          const std::size_t nw = w + static_cast<std::size_t>(x);
          if (b.next == 0) {
            spec.beta[{static_cast<int>(nw), nd}] += c;
            spec.w_max = std::max(spec.w_max, static_cast<int>(nw));
          } else {
            bump(counts[static_cast<std::size_t>(nd)][b.next], nw, c);
          }
        }
      }
    }
  }
  if (!spec.beta.empty()) {
    int df = d_max;
    for (const auto& [key, count] : spec.beta) df = std::min(df, key.second);
    spec.d_free = df;
  }
  return spec;
}

/// Find the free distance with a cheap first pass (the straight
/// diverge-and-return path bounds it by 2(nu+1) output bits for a rate-1/2
/// code), then enumerate to d_free + offset.
inline WeightSpectrum spectrum_by_offset(const Trellis& trellis, int offset) {
  int cap = trellis.n_out * (trellis.nu + 1);
  WeightSpectrum probe = enumerate_spectrum(trellis, cap);
  while (probe.empty()) {  // degenerate generators can defeat the bound above
    cap *= 2;
    if (cap > 1 << 16) throw std::runtime_error("no remerging path found");
    probe = enumerate_spectrum(trellis, cap);
  }
  return enumerate_spectrum(trellis, probe.d_free + offset);
}

/// A truncated union bound plus the contribution of the outermost
/// enumerated distance shell, as a truncation diagnostic.
struct UnionBound {
  double value = 0.0;
  double boundary_term = 0.0;
};

/// P_b <= sum_{w,d} beta_{w,d} * w * P_e(d, w).
inline UnionBound bit_error_bound(const WeightSpectrum& spec, const PepParams& p) {
  if (spec.empty()) throw std::invalid_argument("empty weight spectrum");
  UnionBound b;
  for (const auto& [key, count] : spec.beta) {
    const auto [w, d] = key;
    const double term = static_cast<double>(count) * static_cast<double>(w) *
                        averaged_pep(d, w, p);
    b.value += term;
    if (d == spec.d_max) b.boundary_term += term;
  }
  return b;
}

/// P_d <= sum_{w,d} beta_{w,d} * l_pkt * P_e(d, w). Linear in the packet
/// length; may exceed 1 (it is a bound), clamping is left to presentation.
inline UnionBound packet_error_bound(const WeightSpectrum& spec, const PepParams& p, int l_pkt) {
  if (spec.empty()) throw std::invalid_argument("empty weight spectrum");
  if (l_pkt < 1) throw std::invalid_argument("packet length must be positive");
  UnionBound b;
  for (const auto& [key, count] : spec.beta) {
    const auto [w, d] = key;
    const double term = static_cast<double>(count) * static_cast<double>(l_pkt) *
                        averaged_pep(d, w, p);
    b.value += term;
    if (d == spec.d_max) b.boundary_term += term;
  }
  return b;
}

}  // namespace jscc
