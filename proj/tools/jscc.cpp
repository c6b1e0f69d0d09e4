// Command-line front end: code inspection, analytical bounds, optimum-code
// search, and the Monte Carlo experiment drivers. All outputs are CSV.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "jscc/jscc.hpp"

namespace {

constexpr int kExitBadConfig = 2;
constexpr int kExitCatastrophic = 3;

struct GlobalOpts {
  std::uint64_t seed = 1;
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::string out_path;
};

void write_output(const GlobalOpts& g, const std::string& text) {
  if (g.out_path.empty()) {
    std::fputs(text.c_str(), stdout);
    return;
  }
  std::ofstream f(g.out_path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file: " + g.out_path);
  f << text;
}

struct CodeOpts {
  std::string g1, g2, h = "0";
  int nu = 3;

  jscc::CodeSpec spec() const {
    const auto p1 = jscc::PolyGF2::parse(g1, nu);
    const auto p2 = jscc::PolyGF2::parse(g2, nu);
    const auto ph = h == "0" ? jscc::PolyGF2{0, nu} : jscc::PolyGF2::parse(h, nu);
    return jscc::CodeSpec::make(p1.taps, p2.taps, ph.taps, nu);
  }
};

void add_code_options(CLI::App* cmd, CodeOpts& code) {
  cmd->add_option("--g1", code.g1, "first generator, binary MSB-first (or 0o<octal>)")->required();
  cmd->add_option("--g2", code.g2, "second generator")->required();
  cmd->add_option("--h", code.h, "feedback polynomial; 0 for non-recursive");
  cmd->add_option("--nu", code.nu, "memory length")->required();
}

jscc::Fading parse_fading(const std::string& name) {
  if (name == "awgn") return jscc::Fading::awgn;
  if (name == "rayleigh") return jscc::Fading::rayleigh;
  if (name == "rice") return jscc::Fading::rice;
  throw CLI::ValidationError("--fading", "expected awgn, rayleigh or rice");
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

// line-oriented key=value file; '#' starts a comment
std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config file: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(f, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!key.empty()) kv[key] = value;
  }
  return kv;
}

std::string spectrum_csv(const jscc::WeightSpectrum& spec) {
  std::string out = "w,d,count\n";
  std::vector<std::pair<std::pair<int, int>, std::uint64_t>> rows(spec.beta.begin(),
                                                                  spec.beta.end());
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return a.first.second != b.first.second ? a.first.second < b.first.second
                                            : a.first.first < b.first.first;
  });
  for (const auto& [key, count] : rows)
    out += std::to_string(key.first) + ',' + std::to_string(key.second) + ',' +
           std::to_string(count) + '\n';
  return out;
}

std::string search_csv(const jscc::SearchResult& result) {
  std::string out = "g1,g2,h,recursive,d_free,bound\n";
  for (const auto& rc : result.ranked) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.8e", rc.bound);
    out += rc.spec.g1.binary() + ',' + rc.spec.g2.binary() + ',' + rc.spec.h.binary() + ',' +
           (rc.recursive ? "1" : "0") + ',' + std::to_string(rc.d_free) + ',' + buf + '\n';
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"convolutional coding toolkit for correlated-source joint decoding"};
  app.require_subcommand(1);
  app.fallthrough(true);
  // --h is a polynomial option below, so help is long-form only
  app.set_help_flag("--help", "print help");

  GlobalOpts global;
  app.add_option("--seed", global.seed, "master seed for all Monte Carlo draws");
  app.add_option("--threads", global.threads, "worker threads for Monte Carlo runs");
  app.add_option("--out", global.out_path, "write output to this file instead of stdout");

  // ---- encode ----
  auto* cmd_encode = app.add_subcommand("encode", "encode a bit string with a rate-1/2 code");
  cmd_encode->set_help_flag("--help", "print help");
  CodeOpts enc_code;
  add_code_options(cmd_encode, enc_code);
  std::string enc_info;
  bool enc_terminate = false;
  cmd_encode->add_option("--info", enc_info, "information bits, e.g. 1011")->required();
  cmd_encode->add_flag("--terminate", enc_terminate, "append the tail driving the encoder to state 0");

  // ---- spectrum ----
  auto* cmd_spectrum = app.add_subcommand("spectrum", "weight spectrum of first-error events");
  cmd_spectrum->set_help_flag("--help", "print help");
  CodeOpts spec_code;
  add_code_options(cmd_spectrum, spec_code);
  int spec_offset = 10;
  cmd_spectrum->add_option("--dmax-offset", spec_offset, "enumerate to d_free + offset");

  // ---- bound ----
  auto* cmd_bound = app.add_subcommand("bound", "bit and packet union bounds vs SNR");
  cmd_bound->set_help_flag("--help", "print help");
  CodeOpts bound_code;
  add_code_options(cmd_bound, bound_code);
  double bound_rho = 0.9;
  int bound_lpkt = 100, bound_offset = 10;
  std::vector<double> bound_gamma;
  cmd_bound->add_option("--rho", bound_rho, "source correlation");
  cmd_bound->add_option("--lpkt", bound_lpkt, "packet length in information bits");
  cmd_bound->add_option("--gamma-db", bound_gamma, "gamma_b grid point(s), dB")->required();
  cmd_bound->add_option("--dmax-offset", bound_offset, "enumerate to d_free + offset");

  // ---- search ----
  auto* cmd_search = app.add_subcommand("search", "exhaustive optimum-code search");
  cmd_search->set_help_flag("--help", "print help");
  jscc::SearchSpec search_spec;
  bool search_stability = false;
  cmd_search->add_option("--nu", search_spec.nu, "memory length")->required();
  cmd_search->add_option("--rho", search_spec.rho, "source correlation")->required();
  cmd_search->add_option("--gamma-db", search_spec.gamma_b_db, "gamma_b point(s) averaged by the objective")
      ->required();
  cmd_search->add_option("--lpkt", search_spec.l_pkt, "packet length in information bits");
  cmd_search->add_option("--top", search_spec.top_n, "ranking entries to print");
  cmd_search->add_option("--dmax-offset", search_spec.d_max_offset, "spectrum truncation offset");
  cmd_search->add_flag("--stability", search_stability,
                       "print the per-SNR winner table over the gamma grid instead");

  // ---- simulate ----
  auto* cmd_sim = app.add_subcommand("simulate", "Monte Carlo packet error rates");
  cmd_sim->set_help_flag("--help", "print help");
  CodeOpts sim_code;
  sim_code.g1 = "1011";
  sim_code.g2 = "1111";
  sim_code.h = "1101";
  auto* o_g1 = cmd_sim->add_option("--g1", sim_code.g1, "first generator");
  auto* o_g2 = cmd_sim->add_option("--g2", sim_code.g2, "second generator");
  auto* o_h = cmd_sim->add_option("--h", sim_code.h, "feedback polynomial; 0 for non-recursive");
  auto* o_nu = cmd_sim->add_option("--nu", sim_code.nu, "memory length");
  std::string sim_scheme = "joint_recursive";
  std::string sim_fading = "awgn";
  std::string sim_config_path;
  jscc::SimConfig sim_cfg;
  auto* o_scheme = cmd_sim->add_option(
      "--scheme", sim_scheme, "joint_recursive|joint_nonrecursive|unjoint|sw_baseline|genie");
  auto* o_rho = cmd_sim->add_option("--rho", sim_cfg.rho, "source correlation");
  auto* o_lpkt = cmd_sim->add_option("--lpkt", sim_cfg.l_pkt, "packet length in information bits");
  auto* o_fading = cmd_sim->add_option("--fading", sim_fading, "awgn|rayleigh|rice");
  auto* o_ricek = cmd_sim->add_option("--rice-k", sim_cfg.rice_k, "Rice factor (linear)");
  auto* o_snr = cmd_sim->add_option("--snr-db", sim_cfg.snr_db, "gamma_b grid, dB");
  auto* o_maxp = cmd_sim->add_option("--max-packets", sim_cfg.stop.max_packets, "stop-rule packet cap");
  auto* o_maxe = cmd_sim->add_option("--max-errors", sim_cfg.stop.max_errors, "stop-rule error cap");
  auto* o_ci = cmd_sim->add_option("--ci-half-width", sim_cfg.stop.ci_half_width,
                                   "optional absolute CI half-width target");
  auto* o_iters = cmd_sim->add_option("--iterations", sim_cfg.iterations, "joint decoding iterations");
  cmd_sim->add_option("--config", sim_config_path, "key=value file; command-line flags override");

  // ---- compare-sw ----
  auto* cmd_cmp = app.add_subcommand(
      "compare-sw", "joint schemes vs the ideal distributed-compression baseline");
  cmd_cmp->set_help_flag("--help", "print help");
  double cmp_rho = 0.9393;
  int cmp_lpkt = 100;
  std::string cmp_fading = "awgn";
  double cmp_ricek = 10.0;
  std::vector<double> cmp_grid;
  jscc::StopRule cmp_stop;
  cmd_cmp->add_option("--rho", cmp_rho, "source correlation");
  cmd_cmp->add_option("--lpkt", cmp_lpkt, "packet length in information bits");
  cmd_cmp->add_option("--fading", cmp_fading, "awgn|rayleigh|rice");
  cmd_cmp->add_option("--rice-k", cmp_ricek, "Rice factor (linear)");
  cmd_cmp->add_option("--xi-rx-db", cmp_grid, "average received energy per coded sample, dB")
      ->required();
  cmd_cmp->add_option("--max-packets", cmp_stop.max_packets, "stop-rule packet cap");
  cmd_cmp->add_option("--max-errors", cmp_stop.max_errors, "stop-rule error cap");

  // ---- overlay ----
  auto* cmd_ovl = app.add_subcommand("overlay", "ideal-side-information simulation vs packet bound");
  cmd_ovl->set_help_flag("--help", "print help");
  CodeOpts ovl_code;
  add_code_options(cmd_ovl, ovl_code);
  double ovl_rho = 0.9;
  int ovl_lpkt = 100, ovl_offset = 10;
  std::vector<double> ovl_grid;
  jscc::StopRule ovl_stop;
  cmd_ovl->add_option("--rho", ovl_rho, "source correlation");
  cmd_ovl->add_option("--lpkt", ovl_lpkt, "packet length in information bits");
  cmd_ovl->add_option("--snr-db", ovl_grid, "gamma_b grid, dB")->required();
  cmd_ovl->add_option("--max-packets", ovl_stop.max_packets, "stop-rule packet cap");
  cmd_ovl->add_option("--max-errors", ovl_stop.max_errors, "stop-rule error cap");
  cmd_ovl->add_option("--dmax-offset", ovl_offset, "spectrum truncation offset");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitBadConfig;
  }

  try {
    if (cmd_encode->parsed()) {
      jscc::Bits info;
      for (char c : enc_info) {
        if (c != '0' && c != '1') throw std::invalid_argument("info must be a 0/1 string");
        info.push_back(static_cast<std::uint8_t>(c - '0'));
      }
      if (info.empty()) throw std::invalid_argument("info must not be empty");
      const jscc::Bits coded = jscc::encode(enc_code.spec(), info, enc_terminate);
      std::string out;
      for (auto b : coded) out += static_cast<char>('0' + b);
      out += '\n';
      write_output(global, out);
    } else if (cmd_spectrum->parsed()) {
      const auto trellis = jscc::build_trellis(spec_code.spec());
      const auto spectrum = jscc::spectrum_by_offset(trellis, spec_offset);
      write_output(global, spectrum_csv(spectrum));
    } else if (cmd_bound->parsed()) {
      const auto spec = bound_code.spec();
      const auto trellis = jscc::build_trellis(spec);
      if (jscc::is_catastrophic(trellis))
        throw jscc::CatastrophicCodeError("bounds need a non-catastrophic code");
      if (bound_lpkt < 10 * (bound_code.nu + 1))
        std::fprintf(stderr,
                     "warning: packet length %d is not much larger than the constraint length\n",
                     bound_lpkt);
      const auto spectrum = jscc::spectrum_by_offset(trellis, bound_offset);
      std::string out = "gamma_b_db,bit_bound,packet_bound,truncation_tail\n";
      for (double g : bound_gamma) {
        jscc::PepParams p{jscc::CodeSpec::rate(), bound_rho, jscc::db_to_linear(g)};
        const auto bb = jscc::bit_error_bound(spectrum, p);
        const auto pb = jscc::packet_error_bound(spectrum, p, bound_lpkt);
        char buf[160];
        std::snprintf(buf, sizeof buf, "%.6g,%.8e,%.8e,%.8e\n", g, bb.value, pb.value,
                      pb.boundary_term);
        out += buf;
      }
      write_output(global, out);
    } else if (cmd_search->parsed()) {
      if (search_stability) {
        const auto report = jscc::stability_report(search_spec, search_spec.gamma_b_db);
        std::string out = "gamma_db,g1,g2,h,bound\n";
        for (const auto& row : report.rows) {
          char buf[64];
          std::snprintf(buf, sizeof buf, "%.6g", row.gamma_db);
          std::string line = buf;
          std::snprintf(buf, sizeof buf, "%.8e", row.bound);
          line += ',' + row.winner.g1.binary() + ',' + row.winner.g2.binary() + ',' +
                  row.winner.h.binary() + ',' + buf + '\n';
          out += line;
        }
        out += std::string("# single_winner=") + (report.single_winner ? "1" : "0") + '\n';
        write_output(global, out);
      } else {
        const auto result = jscc::search_optimal(search_spec);
        std::string out = search_csv(result);
        char buf[256];
        std::snprintf(buf, sizeof buf,
                      "# total=%llu evaluated=%llu degenerate=%llu nonrealizable=%llu "
                      "duplicate=%llu catastrophic=%llu rescoring_stable=%d\n",
                      static_cast<unsigned long long>(result.skips.total),
                      static_cast<unsigned long long>(result.skips.evaluated),
                      static_cast<unsigned long long>(result.skips.degenerate),
                      static_cast<unsigned long long>(result.skips.nonrealizable),
                      static_cast<unsigned long long>(result.skips.duplicate),
                      static_cast<unsigned long long>(result.skips.catastrophic),
                      static_cast<int>(result.top_rescoring_stable));
        out += buf;
        write_output(global, out);
      }
    } else if (cmd_sim->parsed()) {
      if (!sim_config_path.empty()) {
        const auto kv = read_config_file(sim_config_path);
        auto has = [&](const char* k) { return kv.count(k) != 0; };
        // file values apply only where the command line stayed silent
        if (o_scheme->count() == 0 && has("scheme")) sim_scheme = kv.at("scheme");
        if (o_g1->count() == 0 && has("g1")) sim_code.g1 = kv.at("g1");
        if (o_g2->count() == 0 && has("g2")) sim_code.g2 = kv.at("g2");
        if (o_h->count() == 0 && has("h")) sim_code.h = kv.at("h");
        if (o_nu->count() == 0 && has("nu")) sim_code.nu = std::stoi(kv.at("nu"));
        if (o_rho->count() == 0 && has("rho")) sim_cfg.rho = std::stod(kv.at("rho"));
        if (o_lpkt->count() == 0 && has("l_pkt")) sim_cfg.l_pkt = std::stoi(kv.at("l_pkt"));
        if (o_fading->count() == 0 && has("fading")) sim_fading = kv.at("fading");
        if (o_ricek->count() == 0 && has("rice_k")) sim_cfg.rice_k = std::stod(kv.at("rice_k"));
        if (o_snr->count() == 0 && has("snr_db")) sim_cfg.snr_db = parse_double_list(kv.at("snr_db"));
        if (o_maxp->count() == 0 && has("max_packets"))
          sim_cfg.stop.max_packets = std::stoull(kv.at("max_packets"));
        if (o_maxe->count() == 0 && has("max_errors"))
          sim_cfg.stop.max_errors = std::stoull(kv.at("max_errors"));
        if (o_ci->count() == 0 && has("ci_half_width"))
          sim_cfg.stop.ci_half_width = std::stod(kv.at("ci_half_width"));
        if (o_iters->count() == 0 && has("iterations"))
          sim_cfg.iterations = std::stoi(kv.at("iterations"));
        if (has("seed") && app.get_option("--seed")->count() == 0)
          global.seed = std::stoull(kv.at("seed"));
        if (has("threads") && app.get_option("--threads")->count() == 0)
          global.threads = std::stoi(kv.at("threads"));
      }
      sim_cfg.scheme = jscc::parse_scheme(sim_scheme);
      sim_cfg.fading = parse_fading(sim_fading);
      sim_cfg.code = sim_code.spec();
      sim_cfg.seed = global.seed;
      sim_cfg.threads = global.threads;
      if (sim_cfg.scheme != jscc::Scheme::sw_baseline &&
          jscc::is_catastrophic(sim_cfg.code))
        std::fprintf(stderr, "warning: simulating a catastrophic code\n");
      const auto result = jscc::estimate_per(sim_cfg);
      write_output(global, jscc::simulate_csv(sim_cfg, result));
    } else if (cmd_cmp->parsed()) {
      const auto fading = parse_fading(cmp_fading);
      const auto result =
          jscc::compare_sw(cmp_rho, cmp_lpkt, fading, fading == jscc::Fading::rice ? cmp_ricek : 0.0,
                           cmp_grid, cmp_stop, global.seed, global.threads);
      std::fprintf(stderr, "airtime: %d coded samples (rate-1/2) vs %d (baseline), residual %d\n",
                   result.symbols_rate12, result.symbols_sw, result.rounding_residual);
      write_output(global, jscc::compare_csv(fading, cmp_ricek, result));
    } else if (cmd_ovl->parsed()) {
      const auto rows = jscc::bound_overlay(ovl_code.spec(), ovl_rho, ovl_lpkt, ovl_grid, ovl_stop,
                                            global.seed, global.threads, ovl_offset);
      write_output(global, jscc::overlay_csv(rows));
    }
  } catch (const jscc::CatastrophicCodeError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitCatastrophic;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitBadConfig;
  }
  return 0;
}
