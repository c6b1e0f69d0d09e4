#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace jscc {

using Bits = std::vector<std::uint8_t>;

/// Thrown when an operation that needs a terminating weight enumeration is
/// handed a code with a zero-output-weight cycle.
struct CatastrophicCodeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline int parity(std::uint32_t v) { return std::popcount(v) & 1; }

/// Polynomial over GF(2) in the delay variable D. Bit k of `taps` is the
/// coefficient of D^k; tap 0 acts on the encoder's feedback-adder output,
/// taps 1..nu on the shift-register cells (most recent cell first).
struct PolyGF2 {
  std::uint32_t taps = 0;
  int memory = 0;  // nu; the polynomial has nu+1 coefficient slots

  bool is_zero() const { return taps == 0; }
  int weight() const { return std::popcount(taps); }

  /// Accepts a binary string, most significant coefficient (D^nu) first,
  /// of exactly nu+1 digits ("1101" = D^3+D^2+1), or octal with an "0o"
  /// prefix ("0o15" for the same polynomial).
  static PolyGF2 parse(std::string_view text, int nu) {
    if (nu < 1 || nu > 20) throw std::invalid_argument("memory out of range");
    std::uint32_t value = 0;
    if (text.size() > 2 && text.substr(0, 2) == "0o") {
      for (char c : text.substr(2)) {
        if (c < '0' || c > '7') throw std::invalid_argument("bad octal polynomial digit");
        value = value * 8 + static_cast<std::uint32_t>(c - '0');
      }
    } else {
      if (text.size() != static_cast<std::size_t>(nu) + 1)
        throw std::invalid_argument("binary polynomial must have nu+1 digits");
      for (char c : text) {
        if (c != '0' && c != '1') throw std::invalid_argument("bad binary polynomial digit");
        value = (value << 1) | static_cast<std::uint32_t>(c - '0');
      }
    }
    if (value >> (nu + 1)) throw std::invalid_argument("polynomial degree exceeds memory");
    return PolyGF2{value, nu};
  }

  std::string binary() const {
    std::string s(static_cast<std::size_t>(memory) + 1, '0');
    for (int k = 0; k <= memory; ++k)
      if ((taps >> k) & 1u) s[static_cast<std::size_t>(memory - k)] = '1';
    return s;
  }

  std::string octal() const {
    if (taps == 0) return "0";
    std::string s;
    for (std::uint32_t v = taps; v; v >>= 3) s.insert(s.begin(), static_cast<char>('0' + (v & 7u)));
    return s;
  }

  friend bool operator==(const PolyGF2&, const PolyGF2&) = default;
};

/// One rate-1/2 convolutional code: two generator polynomials plus an
/// optional feedback polynomial. H = 0 and H = 1 are the non-recursive
/// cases; any other H must have h0 = 1 to be realizable as a causal
/// shift-register encoder.
struct CodeSpec {
  PolyGF2 g1, g2, h;
  int nu = 0;

  static bool feedback_realizable(std::uint32_t h) { return h == 0 || (h & 1u) == 1u; }

  static CodeSpec make(std::uint32_t g1, std::uint32_t g2, std::uint32_t h, int nu) {
    if (nu < 1) throw std::invalid_argument("memory must be at least 1");
    const std::uint32_t limit = 1u << (nu + 1);
    if (g1 >= limit || g2 >= limit || h >= limit)
      throw std::invalid_argument("polynomial degree exceeds memory");
    if (!feedback_realizable(h))
      throw std::invalid_argument("nonzero feedback polynomial must have h0 = 1");
    return CodeSpec{PolyGF2{g1, nu}, PolyGF2{g2, nu}, PolyGF2{h, nu}, nu};
  }

  bool recursive() const { return (h.taps >> 1) != 0; }
  static constexpr double rate() { return 0.5; }

  friend bool operator==(const CodeSpec&, const CodeSpec&) = default;
};

/// Key identical for specs equal up to swapping g1 and g2, distinct otherwise.
inline std::uint64_t canonical_key(const CodeSpec& spec) {
  const std::uint64_t lo = std::min(spec.g1.taps, spec.g2.taps);
  const std::uint64_t hi = std::max(spec.g1.taps, spec.g2.taps);
  return (static_cast<std::uint64_t>(spec.nu) << 48) | (lo << 32) | (hi << 16) |
         static_cast<std::uint64_t>(spec.h.taps);
}

/// State-transition table of a feedforward/feedback shift-register encoder.
/// State value packs the register cells with the most recent cell in bit 0.
/// `out` is a bitmask, bit j carrying generator j's output.
struct Trellis {
  struct Branch {
    std::uint16_t next = 0;
    std::uint8_t out = 0;
  };
  struct Incoming {
    std::uint16_t prev = 0;
    std::uint8_t input = 0;
  };

  int nu = 0;
  int n_states = 0;
  int n_out = 0;
  std::uint32_t feedback = 0;
  std::vector<std::array<Branch, 2>> branch;      // [state][input]
  std::vector<std::array<Incoming, 2>> incoming;  // [state][arrival order]

  /// XOR of the feedback taps applied to the register; the input equal to
  /// this value drives the feedback adder to 0 and shifts a 0 in.
  int termination_input(int state) const {
    return parity((feedback >> 1) & static_cast<std::uint32_t>(state));
  }

  void expand_out(std::uint8_t out, Bits& sink) const {
    for (int j = 0; j < n_out; ++j) sink.push_back(static_cast<std::uint8_t>((out >> j) & 1u));
  }
};

/// Build the trellis of a rate-1/n code given its generator taps and the
/// feedback taps. With feedback h, input x enters the adder a = x XOR
/// (h.s); generator j emits parity(g_j & (a, s1..snu)); the register shifts
/// a in.
inline Trellis build_trellis(std::span<const std::uint32_t> gens, std::uint32_t h, int nu) {
  if (nu < 1 || gens.empty()) throw std::invalid_argument("bad trellis parameters");
  if (!CodeSpec::feedback_realizable(h))
    throw std::invalid_argument("nonzero feedback polynomial must have h0 = 1");
  Trellis t;
  t.nu = nu;
  t.n_states = 1 << nu;
  t.n_out = static_cast<int>(gens.size());
  t.feedback = h;
  t.branch.resize(static_cast<std::size_t>(t.n_states));
  const std::uint32_t mask = static_cast<std::uint32_t>(t.n_states - 1);
  for (int s = 0; s < t.n_states; ++s) {
    const int fb = parity((h >> 1) & static_cast<std::uint32_t>(s));
    for (int x = 0; x < 2; ++x) {
      const std::uint32_t a = static_cast<std::uint32_t>(x ^ fb);
      const std::uint32_t reg = (static_cast<std::uint32_t>(s) << 1) | a;  // bit 0 = adder output
      std::uint8_t out = 0;
      for (std::size_t j = 0; j < gens.size(); ++j)
        out |= static_cast<std::uint8_t>(parity(gens[j] & reg) << j);
      t.branch[static_cast<std::size_t>(s)][static_cast<std::size_t>(x)] =
          Trellis::Branch{static_cast<std::uint16_t>(reg & mask), out};
    }
  }
  t.incoming.resize(static_cast<std::size_t>(t.n_states));
  std::vector<int> fill(static_cast<std::size_t>(t.n_states), 0);
  for (int s = 0; s < t.n_states; ++s)
    for (int x = 0; x < 2; ++x) {
      const auto& b = t.branch[static_cast<std::size_t>(s)][static_cast<std::size_t>(x)];
      t.incoming[b.next][static_cast<std::size_t>(fill[b.next]++)] =
          Trellis::Incoming{static_cast<std::uint16_t>(s), static_cast<std::uint8_t>(x)};
    }
  return t;
}

inline Trellis build_trellis(const CodeSpec& spec) {
  const std::uint32_t gens[2] = {spec.g1.taps, spec.g2.taps};
  return build_trellis(std::span<const std::uint32_t>(gens, 2), spec.h.taps, spec.nu);
}

/// Encode an information sequence. With terminate set, nu tail inputs are
/// appended that drive the register back to the all-zero state (for
/// recursive codes the tail depends on the final state), so the output has
/// n_out*(k+nu) bits instead of n_out*k.
inline Bits encode(const Trellis& trellis, const Bits& info, bool terminate) {
  Bits coded;
  coded.reserve(static_cast<std::size_t>(trellis.n_out) *
                (info.size() + (terminate ? static_cast<std::size_t>(trellis.nu) : 0)));
  int state = 0;
  for (std::uint8_t x : info) {
    const auto& b = trellis.branch[static_cast<std::size_t>(state)][x & 1u];
    trellis.expand_out(b.out, coded);
    state = b.next;
  }
  if (terminate) {
    for (int i = 0; i < trellis.nu; ++i) {
      const int x = trellis.termination_input(state);
      const auto& b = trellis.branch[static_cast<std::size_t>(state)][static_cast<std::size_t>(x)];
      trellis.expand_out(b.out, coded);
      state = b.next;
    }
  }
  return coded;
}

inline Bits encode(const CodeSpec& spec, const Bits& info, bool terminate) {
  return encode(build_trellis(spec), info, terminate);
}

namespace detail {

/// Topological order of the nonzero states under zero-output-weight edges.
/// Returns false when that subgraph has a cycle, i.e. the code is
/// catastrophic (an error event of unbounded input weight and bounded
/// output weight exists).
inline bool topo_order_zero_weight(const Trellis& t, std::vector<int>& order) {
  const int n = t.n_states;
  std::vector<int> indegree(static_cast<std::size_t>(n), 0);
  for (int s = 1; s < n; ++s)
    for (int x = 0; x < 2; ++x) {
      const auto& b = t.branch[static_cast<std::size_t>(s)][static_cast<std::size_t>(x)];
      if (b.next != 0 && b.out == 0) ++indegree[b.next];
    }
  order.clear();
  order.reserve(static_cast<std::size_t>(n - 1));
  std::vector<int> queue;
  for (int s = 1; s < n; ++s)
    if (indegree[static_cast<std::size_t>(s)] == 0) queue.push_back(s);
  while (!queue.empty()) {
    // smallest state first keeps the order deterministic
    std::size_t pick = 0;
    for (std::size_t i = 1; i < queue.size(); ++i)
      if (queue[i] < queue[pick]) pick = i;
    const int s = queue[pick];
    queue.erase(queue.begin() + static_cast<std::ptrdiff_t>(pick));
    order.push_back(s);
    for (int x = 0; x < 2; ++x) {
      const auto& b = t.branch[static_cast<std::size_t>(s)][static_cast<std::size_t>(x)];
      if (b.next != 0 && b.out == 0 && --indegree[b.next] == 0) queue.push_back(b.next);
    }
  }
  return order.size() == static_cast<std::size_t>(n - 1);
}

}  // namespace detail

/// True iff the state graph restricted to nonzero states contains a cycle of
/// zero total output weight.
inline bool is_catastrophic(const Trellis& trellis) {
  std::vector<int> order;
  return !detail::topo_order_zero_weight(trellis, order);
}

inline bool is_catastrophic(const CodeSpec& spec) { return is_catastrophic(build_trellis(spec)); }

}  // namespace jscc
