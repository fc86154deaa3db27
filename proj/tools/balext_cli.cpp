// balext: command-line front end for balanced-table construction,
// verification, extraction and experiments.
//
// Exit codes: 0 success, 1 invalid parameters, 2 verification failure,
// 3 I/O or file-format errors. Errors print one line to stderr:
//   error: <kind>: <message>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "balext/balext.hpp"

namespace {

using namespace balext;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitVerifyFailed = 2;
constexpr int kExitIo = 3;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Io:
    case ErrorKind::Format: return kExitIo;
    default: return kExitInvalid;
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorKind::Io, "cannot open '" + path + "' for writing");
  out << text;
  require(static_cast<bool>(out), ErrorKind::Io, "write error on '" + path + "'");
}

BitString read_bits(const std::string& path, std::optional<std::uint64_t> bits) {
  const auto bytes = read_file_bytes(path);
  const std::uint64_t available = bytes.size() * 8;
  if (bits) {
    require(*bits <= available, ErrorKind::Io,
            "'" + path + "' has " + std::to_string(available) + " bits, " + std::to_string(*bits) + " requested");
    return BitString::from_bytes(bytes, *bits);
  }
  return BitString::from_bytes(bytes);
}

/// FILE, or seed:N for a pseudorandom stream.
std::unique_ptr<BitStream> open_stream(const std::string& spec, std::optional<std::uint64_t> bits) {
  if (spec.rfind("seed:", 0) == 0) {
    const auto seed = Rational::parse(spec.substr(5));
    require(seed.den() == 1 && seed.num() >= 0, ErrorKind::InvalidParams, "bad stream seed in '" + spec + "'");
    return std::make_unique<SeededStream>(static_cast<std::uint64_t>(seed.num()));
  }
  return std::make_unique<BufferStream>(read_bits(spec, bits));
}

TableParams table_params_from(unsigned n, unsigned m, unsigned s, unsigned d) {
  TableParams p{n, m, s, d};
  p.validate();
  return p;
}

const std::string kFormats = R"(
File formats:
  table files (BTAB): little-endian; magic "BTAB", u16 version = 1, u8 backend
    (0 random, 1 canonical, 2 keyed), u8 n_exp, m_exp, s_exp, d_exp, 16 bytes
    seed/key, then for explicit tables N*N row-major cells of 8 bits
    (m_exp <= 8) or 16 bits.
  bit files: raw bytes, most significant bit of each byte first; --bits L
    keeps only the first L bits. Outputs are written the same way, zero-padded
    to a whole byte; the exact bit string is also printed on stdout.
  rationals: P/Q or an integer.
)";

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Balanced-table two-source extractors"};
  app.require_subcommand(1);
  app.footer(kFormats);

  // gen-table
  unsigned n_exp = 0, m_exp = 0, s_exp = 0, d_exp = 0;
  std::string backend = "random";
  std::uint64_t seed = 0;
  std::string out_path;
  auto* gen = app.add_subcommand("gen-table", "Construct an (N, M) table and write it as a BTAB file");
  gen->add_option("--n-exp", n_exp, "log2 N")->required();
  gen->add_option("--m-exp", m_exp, "log2 M")->required();
  gen->add_option("--s-exp", s_exp, "log2 S")->required();
  gen->add_option("--d-exp", d_exp, "log2 D")->required();
  gen->add_option("--backend", backend, "random | canonical | keyed")
      ->check(CLI::IsMember({"random", "canonical", "keyed"}));
  gen->add_option("--seed", seed, "seed (random) or key seed (keyed)");
  gen->add_option("--out", out_path, "output table file")->required();

  // verify-table
  std::string table_path, mode = "exhaustive", report_path;
  std::uint64_t samples = 10000;
  bool prefix_balance = false;
  unsigned threads = 1;
  std::optional<unsigned> s_override, d_override;
  auto* ver = app.add_subcommand("verify-table", "Check (S, D)-balance of a table file; exit 2 when it fails");
  ver->add_option("--table", table_path, "table file")->required();
  ver->add_option("--mode", mode, "exhaustive | sampled")->check(CLI::IsMember({"exhaustive", "sampled"}));
  ver->add_option("--samples", samples, "rectangles to sample in sampled mode");
  ver->add_option("--seed", seed, "sampling seed");
  ver->add_flag("--prefix-balance", prefix_balance, "check color-prefix balance (D = M) instead");
  ver->add_option("--s-exp", s_override, "override log2 S from the file");
  ver->add_option("--d-exp", d_override, "override log2 D from the file");
  ver->add_option("--report", report_path, "write the JSON report here");
  ver->add_option("--threads", threads, "worker threads (results do not depend on it)");

  // check-condition
  auto* cond = app.add_subcommand("check-condition", "Evaluate S^2 > 3M + 3M ln D + 6SD + 6SD ln(N/S)");
  cond->add_option("--n-exp", n_exp, "log2 N")->required();
  cond->add_option("--m-exp", m_exp, "log2 M")->required();
  cond->add_option("--s-exp", s_exp, "log2 S")->required();
  cond->add_option("--d-exp", d_exp, "log2 D")->required();

  // extract / extract-cond
  std::string x_path, y_path, sigma_text, alpha_text;
  std::optional<std::uint64_t> bits;
  auto* ext = app.add_subcommand("extract", "z = T(x, y) with m = floor(2 sigma n) - ceil(log n) output bits");
  ext->add_option("--x", x_path, "first input bit file")->required();
  ext->add_option("--y", y_path, "second input bit file")->required();
  ext->add_option("--sigma", sigma_text, "complexity rate P/Q")->required();
  ext->add_option("--alpha", alpha_text, "dependency rate P/Q")->required();
  ext->add_option("--seed", seed, "table seed");
  ext->add_option("--bits", bits, "use only the first L bits of each input");
  ext->add_option("--out", out_path, "output bit file")->required();

  unsigned s_of_n = 0, alpha_of_n = 0;
  auto* extc = app.add_subcommand("extract-cond", "z = T(x, y) with m = floor(s/2) - 7 ceil(log n), D = M");
  extc->add_option("--x", x_path, "first input bit file")->required();
  extc->add_option("--y", y_path, "second input bit file")->required();
  extc->add_option("--s", s_of_n, "complexity threshold s(n) in bits")->required();
  extc->add_option("--alpha", alpha_of_n, "dependency bound alpha(n) in bits")->required();
  extc->add_option("--seed", seed, "table seed");
  extc->add_option("--bits", bits, "use only the first L bits of each input");
  extc->add_option("--out", out_path, "output bit file")->required();

  // transform
  std::string tau_text, delta_text;
  std::uint64_t base = 2, out_bits = 0;
  auto* tr = app.add_subcommand("transform", "Blockwise sequence transform, first L output bits");
  tr->add_option("--x", x_path, "first input: bit file or seed:N")->required();
  tr->add_option("--y", y_path, "second input: bit file or seed:N")->required();
  tr->add_option("--tau", tau_text, "input randomness rate P/Q")->required();
  tr->add_option("--delta", delta_text, "rate deficiency P/Q")->required();
  tr->add_option("--B", base, "block base (n_i = B^i)");
  tr->add_option("--out-bits", out_bits, "output length L")->required();
  tr->add_option("--seed", seed, "table seed");
  tr->add_option("--bits", bits, "use only the first L bits of input files");
  tr->add_option("--out", out_path, "output bit file")->required();

  // experiment
  unsigned n = 0;
  std::uint64_t trials = 0;
  std::string csv_path, summary_path;
  auto* exp = app.add_subcommand("experiment", "Planted-pair extraction experiment");
  exp->add_option("--n", n, "input length")->required();
  exp->add_option("--sigma", sigma_text, "complexity rate P/Q")->required();
  exp->add_option("--alpha", alpha_text, "planted dependency rate P/Q")->required();
  exp->add_option("--trials", trials, "number of pairs")->required();
  exp->add_option("--seed", seed, "master seed (pairs and table)");
  exp->add_option("--csv", csv_path, "per-trial CSV output");
  exp->add_option("--summary", summary_path, "JSON summary output");
  exp->add_option("--threads", threads, "worker threads (results do not depend on it)");

  for (auto* sub : app.get_subcommands({})) sub->footer(kFormats);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: usage: " << e.what() << "\n";
    return kExitInvalid;
  }

  try {
    if (*gen) {
      const auto p = table_params_from(n_exp, m_exp, s_exp, d_exp);
      BalancedTable table;
      if (backend == "random")
        table = random_table(p, seed);
      else if (backend == "canonical")
        table = canonical_table(p);
      else
        table = keyed_table(p, Key128::from_seed(seed));
      write_table(out_path, table);
      std::cout << "backend=" << to_string(table.backend()) << " " << p.str() << " digest=" << table_digest(table)
                << "\n";
    } else if (*ver) {
      const auto table = read_table(table_path);
      const unsigned s = s_override.value_or(table.params().s_exp);
      const unsigned d = d_override.value_or(table.params().d_exp);
      VerifyOptions opts;
      opts.threads = threads;
      VerificationReport report;
      if (prefix_balance) {
        PrefixBalanceMode pm{mode == "exhaustive" ? VerifyMode::exhaustive : VerifyMode::sampled, samples, seed};
        report = verify_prefix_balance(table, s, pm, opts);
      } else if (mode == "exhaustive") {
        report = verify_exhaustive(table, s, d, opts);
      } else {
        report = verify_sampled(table, s, d, samples, seed, opts);
      }
      const auto j = report_json(report, table_digest(table));
      if (!report_path.empty()) write_text(report_path, j.dump(2) + "\n");
      std::cout << "passed=" << (report.passed ? "true" : "false") << " rectangles_checked=" << report.rectangles_checked
                << " worst_ratio=" << report.worst_ratio << "\n";
      if (!report.passed) {
        std::cerr << "error: verification_failed: table is not balanced (witness in report)\n";
        return kExitVerifyFailed;
      }
    } else if (*cond) {
      const auto c = existence_condition(n_exp, m_exp, s_exp, d_exp);
      std::cout.precision(12);
      std::cout << "holds=" << (c.holds ? "true" : "false") << " lhs=" << static_cast<double>(c.lhs)
                << " rhs=" << static_cast<double>(c.rhs) << " lhs_log2=" << c.lhs_log2
                << " certain=" << (c.certain ? "true" : "false") << "\n";
    } else if (*ext || *extc) {
      const BitString x = read_bits(x_path, bits);
      const BitString y = read_bits(y_path, bits);
      const TableSource source = TableSource::automatic(seed);
      const BitString z = *ext ? extract_string(x, y, Rational::parse(sigma_text), Rational::parse(alpha_text), source)
                               : extract_conditional(x, y, s_of_n, alpha_of_n, source);
      write_file_bytes(out_path, z.to_bytes());
      std::cout << "bits=" << z.size() << " z=" << z.to_string() << "\n";
    } else if (*tr) {
      const Rational tau = Rational::parse(tau_text);
      const Rational delta = Rational::parse(delta_text);
      const auto x = open_stream(x_path, bits);
      const auto y = open_stream(y_path, bits);
      const unsigned blocks = out_bits == 0 ? 1 : blocks_for_output(tau, delta, base, out_bits);
      TransformPolicy policy;
      policy.seed = seed;
      const SequenceTransformer transformer(derive_seq_schedule(tau, delta, base, blocks), policy);
      const BitString z = transformer.transform_prefix(*x, *y, out_bits);
      write_file_bytes(out_path, z.to_bytes());
      std::cout << "bits=" << z.size() << " input_bits_per_stream=" << transformer.input_bits_per_stream(out_bits)
                << " z=" << z.to_string() << "\n";
      for (const auto& info : transformer.built_tables()) {
        if (info.sampled_balance && !*info.sampled_balance)
          std::cerr << "warning: block " << info.index << " table failed sampled balance check\n";
      }
    } else if (*exp) {
      PlantedPairSpec spec{n, Rational::parse(sigma_text), Rational::parse(alpha_text), seed};
      ExtractorConfig config;
      config.source = TableSource::automatic(seed);
      config.threads = threads;
      const auto report = run_extraction_experiment(spec, trials, config);
      const auto summary = experiment_summary_json(report);
      if (!csv_path.empty()) write_text(csv_path, experiment_csv(report));
      if (!summary_path.empty()) write_text(summary_path, summary.dump(2) + "\n");
      std::cout << summary.dump() << "\n";
    }
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitOk;
}
