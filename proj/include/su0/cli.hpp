#pragma once

// Command-line front end: build / verify / classify / identify / qlimit /
// diagram / export with machine-readable reports.
//
// Exit codes: 0 = pass, 1 = mathematical failure, 2 = usage error.
//
// The subcommands are exposed as functions taking a RunConfig so they can be
// driven programmatically (the binary's main is a thin wrapper around run).
// Every command is deterministic given its config.

#include "su0/classify.hpp"
#include "su0/numeric.hpp"
#include "su0/rep.hpp"

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace su0::cli {

using Complex = std::complex<double>;

// Shared option bag for all subcommands.  word2/lambda2 are used by
// classify (second representation), input by verify/identify (bundle file or
// matrix directory), highlight by diagram ("m,l" path overlay).
struct RunConfig {
  int n = 2;
  std::string word = "e";
  std::string lambda;   // "" (command default) | "formal" | entry list
  std::string word2;
  std::string lambda2;
  int N = 12;           // truncation level (--dim)
  int window = 6;
  double tol = 1e-8;
  std::vector<double> q;
  std::string input;    // --in
  std::string out;      // --out ("" = stdout)
  std::string format = "json";  // json | csv | svg | txt
  std::string highlight;        // "m,l"
};

// Parse one lambda specification:
//   "formal"                      -> std::nullopt
//   comma-separated entries       -> unit complex values; each entry is a
//     rational angle "p/q" (meaning exp(2 pi i p/q)), a complex literal such
//     as "0.6+0.8i" / "i" / "-i", or a real literal ("1", "-1").
// Throws std::invalid_argument on syntax errors, wrong length, or entries
// whose modulus differs from 1 by more than 1e-12.
classify::LambdaSpec parse_lambda(const std::string& spec, int n);

// Shared config validation: n >= 1, N >= 2, window >= 1, window <= N/2,
// tol > 0, known format.  Throws std::invalid_argument.
void validate(const RunConfig& config);

struct CmdResult {
  int exit_code = 0;
  std::string output;  // report body in the requested format
};

// Build psi_{lambda,word} with formal parameters and emit the bundle JSON.
CmdResult cmd_build(const RunConfig& config);

// Run the defining-relation, projection/partial-isometry, and V/E
// closed-form suites on a bundle (--in) or on build(n, word).  JSON report
// listing every failing relation id; exit 1 when any check fails.
CmdResult cmd_verify(const RunConfig& config);

// Decide equivalence of (lambda, word) and (lambda2, word2); JSON verdict
// with the witness and its discrimination data.  Exit 1 when the witness
// verification fails.
CmdResult cmd_classify(const RunConfig& config);

// Recover (lambda, word) from a bundle file (--in file.json), a truncated
// matrix directory (--in dir), or build(n, word) truncated at --dim when
// lambda is numeric.  JSON identification result; exit 1 on peel failure.
CmdResult cmd_identify(const RunConfig& config);

// Convergence table of the scaled q-deformed images against the crystal
// images, one CSV row per (q, i, j).  lambda defaults to ones when omitted.
CmdResult cmd_qlimit(const RunConfig& config);

// Path diagram of the word as text art (format txt) or SVG (format svg);
// --highlight m,l overlays every path contributing to z_{m,l}.
CmdResult cmd_diagram(const RunConfig& config);

// Materialize the truncated images at numeric lambda into a directory:
// meta.json plus one sparse-triplet file z_<i>_<j>.txt per entry (the format
// cmd_identify reads back).
CmdResult cmd_export(const RunConfig& config);

// Full command line: parse (CLI11, with --config key=value files), dispatch,
// write --out.  Returns the process exit code.
int run(int argc, const char* const* argv);

}  // namespace su0::cli
