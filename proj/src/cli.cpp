#include "su0/cli.hpp"

#include "su0/opalgebra.hpp"
#include "su0/qlimit.hpp"
#include "su0/weyl.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string_view>
#include <utility>

namespace su0::cli {

namespace {

namespace fs = std::filesystem;

[[noreturn]] void usage(const std::string& msg) { throw std::invalid_argument(msg); }

std::string trimmed(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t p = 0; p <= s.size(); ++p)
    if (p == s.size() || s[p] == sep) {
      out.push_back(trimmed(s.substr(start, p - start)));
      start = p + 1;
    }
  return out;
}

double plain_double(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) usage("bad numeric literal '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    usage("bad numeric literal '" + s + "'");
  }
}

// real literal, optionally a fraction "p/q"
double to_double(const std::string& s) {
  if (const std::size_t slash = s.find('/'); slash != std::string::npos)
    return plain_double(s.substr(0, slash)) / plain_double(s.substr(slash + 1));
  return plain_double(s);
}

// One lambda entry: a complex literal ending in i (components may be
// fractions, e.g. "5/13+12/13i"), a rational angle "p/q" meaning
// exp(2 pi i p/q), or a real literal.
Complex parse_lambda_entry(const std::string& entry) {
  if (entry.empty()) usage("empty lambda entry");
  const bool complex_literal = entry.back() == 'i' || entry.back() == 'I';
  if (!complex_literal) {
    if (const std::size_t slash = entry.find('/'); slash != std::string::npos) {
      const std::string ps = entry.substr(0, slash), qs = entry.substr(slash + 1);
      char* end = nullptr;
      const long p = std::strtol(ps.c_str(), &end, 10);
      if (end == ps.c_str() || *end != '\0') usage("bad rational angle '" + entry + "'");
      const long q = std::strtol(qs.c_str(), &end, 10);
      if (end == qs.c_str() || *end != '\0' || q == 0)
        usage("bad rational angle '" + entry + "'");
      return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(p) /
                                 static_cast<double>(q));
    }
    return {to_double(entry), 0.0};
  }
  {
    std::string body = entry.substr(0, entry.size() - 1);
    // split "a+bi" at the last sign that is not leading and not an exponent
    std::size_t cut = std::string::npos;
    for (std::size_t p = body.size(); p-- > 1;)
      if ((body[p] == '+' || body[p] == '-') &&
          body[p - 1] != 'e' && body[p - 1] != 'E') {
        cut = p;
        break;
      }
    double re = 0.0, im;
    std::string ims = body;
    if (cut != std::string::npos) {
      re = to_double(body.substr(0, cut));
      ims = body.substr(cut);
    }
    if (ims.empty() || ims == "+")
      im = 1.0;
    else if (ims == "-")
      im = -1.0;
    else
      im = to_double(ims);
    return {re, im};
  }
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) usage("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) usage("cannot write '" + path + "'");
  f << body;
}

// number of tensor legs of psi_{lambda,omega} = total letter count of omega
int letter_count(const weyl::NormalForm& w) {
  int t = 0;
  for (const auto& seg : w.segments()) t += seg.b - seg.a + 1;
  return t;
}

long long capped_dim(int N, int factors) {
  long long dim = 1;
  for (int t = 0; t < factors; ++t) {
    dim *= N;
    if (dim > (1LL << 24))
      usage("dimension cap exceeded: " + std::to_string(N) + "^" +
            std::to_string(factors) + " entries per matrix");
  }
  return dim;
}

numeric::SpMat read_triplets(const std::string& path, long long dim) {
  std::ifstream f(path);
  if (!f) usage("cannot open '" + path + "'");
  std::vector<Eigen::Triplet<Complex>> trip;
  std::string line;
  while (std::getline(f, line)) {
    if (trimmed(line).empty()) continue;
    std::istringstream ls(line);
    long long r = 0, c = 0;
    double re = 0.0, im = 0.0;
    if (!(ls >> r >> c >> re >> im)) usage("bad triplet line in '" + path + "'");
    if (r < 0 || c < 0 || r >= dim || c >= dim)
      usage("triplet index out of range in '" + path + "'");
    trip.emplace_back(static_cast<int>(r), static_cast<int>(c), Complex(re, im));
  }
  numeric::SpMat m(dim, dim);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

numeric::TruncatedRep load_matrix_dir(const std::string& dir) {
  const nlohmann::json meta = nlohmann::json::parse(read_file(dir + "/meta.json"));
  numeric::TruncatedRep t;
  t.n = meta.at("n").get<int>();
  t.N = meta.at("N").get<int>();
  t.factors = meta.at("factors").get<int>();
  t.window = meta.at("window").get<int>();
  if (t.n < 1 || t.N < 2 || t.factors < 0 || t.window < 1 || t.window > t.N / 2)
    usage("invalid meta.json dimensions");
  for (const auto& v : meta.at("lambda"))
    t.lambda.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
  if (static_cast<int>(t.lambda.size()) != t.n)
    usage("meta.json lambda length must equal n");
  const long long dim = capped_dim(t.N, t.factors);
  t.images.assign(static_cast<std::size_t>(t.n) + 1,
                  std::vector<numeric::SpMat>(static_cast<std::size_t>(t.n) + 1));
  for (int i = 1; i <= t.n + 1; ++i)
    for (int j = 1; j <= t.n + 1; ++j)
      t.image(i, j) = read_triplets(
          dir + "/z_" + std::to_string(i) + "_" + std::to_string(j) + ".txt", dim);
  return t;
}

rep::SymbolicRep load_symbolic(const RunConfig& config) {
  if (!config.input.empty()) return rep::rep_from_json(read_file(config.input));
  if (!config.lambda.empty() && config.lambda != "formal")
    usage("this command takes symbolic input; use --lambda formal");
  return rep::build(config.n, weyl::parse_word(config.n, config.word));
}

nlohmann::ordered_json report_json(const rep::SymbolicRep& r,
                                   const rep::SuiteReport& rep_report) {
  nlohmann::ordered_json j;
  j["n"] = r.rank();
  j["word"] = r.word().str();
  j["lambda"] = "formal";
  j["checked"] = rep_report.checked;
  j["pass"] = rep_report.all_pass();
  auto& fails = j["failures"] = nlohmann::ordered_json::array();
  for (const auto& f : rep_report.failures)
    fails.push_back({{"id", f.id}, {"detail", f.detail}});
  return j;
}

// ---------------------------------------------------------------------------
// diagram rendering
// ---------------------------------------------------------------------------

std::pair<int, int> parse_highlight(const std::string& text, int n) {
  const auto parts = split(text, ',');
  if (parts.size() != 2) usage("--highlight expects 'm,l'");
  char* end = nullptr;
  const long m = std::strtol(parts[0].c_str(), &end, 10);
  if (end == parts[0].c_str() || *end != '\0') usage("--highlight expects 'm,l'");
  const long l = std::strtol(parts[1].c_str(), &end, 10);
  if (end == parts[1].c_str() || *end != '\0') usage("--highlight expects 'm,l'");
  if (m < 1 || m > n + 1 || l < 1 || l > n + 1)
    usage("--highlight indices must lie in 1..n+1");
  return {static_cast<int>(m), static_cast<int>(l)};
}

std::string render_txt(const rep::Diagram& d,
                       const std::vector<rep::DiagramPath>& paths,
                       const std::optional<std::pair<int, int>>& hi) {
  const int T = static_cast<int>(d.letters.size());
  const int width = 4 * T + 4;
  const auto center = [](int t) { return 4 * t + 3; };

  // header with section labels (leftmost written section first)
  std::string header(static_cast<std::size_t>(width), ' ');
  const auto& segs = d.word.segments();
  const int k = static_cast<int>(segs.size());
  for (int t = 0; t < static_cast<int>(d.section_spans.size()); ++t) {
    const auto& seg = segs[static_cast<std::size_t>(k - 1 - t)];
    const std::string label =
        "s[" + std::to_string(seg.a) + "," + std::to_string(seg.b) + "]";
    const auto [first, last] = d.section_spans[static_cast<std::size_t>(t)];
    const int mid = (center(first) + center(last)) / 2;
    int at = std::max(0, mid - static_cast<int>(label.size()) / 2);
    at = std::min(at, width - static_cast<int>(label.size()));
    for (std::size_t p = 0; p < label.size(); ++p)
      header[static_cast<std::size_t>(at) + p] = label[p];
  }

  std::vector<std::string> rows(static_cast<std::size_t>(d.n) + 1,
                                std::string(static_cast<std::size_t>(width), '-'));
  // path overlay first, crossings on top
  for (const auto& path : paths)
    for (int t = 0; t <= T; ++t) {
      const int lo = t == 0 ? 0 : center(t - 1) + 1;
      const int hi_col = t == T ? width - 1 : center(t) - 1;
      auto& row = rows[static_cast<std::size_t>(path.levels[static_cast<std::size_t>(t)]) - 1];
      for (int col = lo; col <= hi_col; ++col) row[static_cast<std::size_t>(col)] = '=';
    }
  for (int t = 0; t < T; ++t) {
    const int c = d.letters[static_cast<std::size_t>(t)];
    rows[static_cast<std::size_t>(c) - 1][static_cast<std::size_t>(center(t))] = 'X';
    rows[static_cast<std::size_t>(c)][static_cast<std::size_t>(center(t))] = 'X';
  }

  const int lw = 1 + static_cast<int>(std::to_string(d.n + 1).size());
  std::ostringstream out;
  if (!d.section_spans.empty()) out << std::string(static_cast<std::size_t>(lw) + 1, ' ')
                                    << header << "\n";
  for (int i = 1; i <= d.n + 1; ++i) {
    const std::string num = std::to_string(i);
    out << "λ" << num
        << std::string(static_cast<std::size_t>(lw - 1) - num.size() + 1, ' ')
        << rows[static_cast<std::size_t>(i) - 1] << "\n";
  }
  if (hi)
    out << "paths z[" << hi->first << "," << hi->second << "]: " << paths.size()
        << "\n";
  return out.str();
}

std::string render_svg(const rep::Diagram& d,
                       const std::vector<rep::DiagramPath>& paths,
                       const std::optional<std::pair<int, int>>& hi) {
  const int T = static_cast<int>(d.letters.size());
  const auto y_of = [](int level) { return 50 + 40 * (level - 1); };
  const auto cx_of = [](int t) { return 60 + 60 * t; };
  const int x0 = 30, x1 = 30 + 60 * std::max(T, 1);
  const int width = x1 + 30, height = y_of(d.n + 1) + 30;

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
    << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " " << height
    << "\">\n";
  s << "<g stroke=\"black\" stroke-width=\"1.5\" fill=\"none\">\n";
  for (int i = 1; i <= d.n + 1; ++i)
    s << "<line x1=\"" << x0 << "\" y1=\"" << y_of(i) << "\" x2=\"" << x1
      << "\" y2=\"" << y_of(i) << "\"/>\n";
  for (int t = 0; t < T; ++t) {
    const int c = d.letters[static_cast<std::size_t>(t)], cx = cx_of(t);
    s << "<line x1=\"" << cx - 15 << "\" y1=\"" << y_of(c) << "\" x2=\"" << cx + 15
      << "\" y2=\"" << y_of(c + 1) << "\"/>\n";
    s << "<line x1=\"" << cx - 15 << "\" y1=\"" << y_of(c + 1) << "\" x2=\""
      << cx + 15 << "\" y2=\"" << y_of(c) << "\"/>\n";
  }
  s << "</g>\n";

  for (const auto& path : paths) {
    s << "<polyline fill=\"none\" stroke=\"red\" stroke-width=\"2.5\" "
         "stroke-opacity=\"0.5\" points=\"";
    s << x0 << "," << y_of(path.levels[0]);
    for (int t = 0; t < T; ++t)
      s << " " << cx_of(t) - 15 << "," << y_of(path.levels[static_cast<std::size_t>(t)])
        << " " << cx_of(t) + 15 << ","
        << y_of(path.levels[static_cast<std::size_t>(t) + 1]);
    s << " " << x1 << "," << y_of(path.levels[static_cast<std::size_t>(T)]);
    s << "\"/>\n";
  }

  s << "<g font-family=\"monospace\" font-size=\"14\" fill=\"black\">\n";
  for (int i = 1; i <= d.n + 1; ++i)
    s << "<text x=\"4\" y=\"" << y_of(i) + 5 << "\">λ" << i << "</text>\n";
  const auto& segs = d.word.segments();
  const int k = static_cast<int>(segs.size());
  for (int t = 0; t < static_cast<int>(d.section_spans.size()); ++t) {
    const auto& seg = segs[static_cast<std::size_t>(k - 1 - t)];
    const auto [first, last] = d.section_spans[static_cast<std::size_t>(t)];
    s << "<text text-anchor=\"middle\" x=\"" << (cx_of(first) + cx_of(last)) / 2
      << "\" y=\"28\">s[" << seg.a << "," << seg.b << "]</text>\n";
  }
  if (hi)
    s << "<text x=\"" << x0 << "\" y=\"" << height - 8 << "\">paths z["
      << hi->first << "," << hi->second << "]: " << paths.size() << "</text>\n";
  s << "</g>\n</svg>\n";
  return s.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// public pieces
// ---------------------------------------------------------------------------

classify::LambdaSpec parse_lambda(const std::string& spec, int n) {
  if (spec.empty() || spec == "formal") return std::nullopt;
  const auto parts = split(spec, ',');
  if (static_cast<int>(parts.size()) != n)
    usage("lambda needs " + std::to_string(n) + " entries, got " +
          std::to_string(parts.size()));
  std::vector<Complex> out;
  out.reserve(parts.size());
  for (const auto& p : parts) {
    const Complex v = parse_lambda_entry(p);
    if (std::abs(std::abs(v) - 1.0) > 1e-12)
      usage("lambda entry '" + p + "' is not unit modulus");
    out.push_back(v);
  }
  return out;
}

void validate(const RunConfig& config) {
  if (config.n < 1) usage("n must be at least 1");
  if (config.N < 2) usage("dim must be at least 2");
  if (config.window < 1) usage("window must be at least 1");
  if (config.window > config.N / 2) usage("window must be at most dim/2");
  if (config.tol <= 0.0) usage("tol must be positive");
  if (config.format != "json" && config.format != "csv" && config.format != "svg" &&
      config.format != "txt")
    usage("format must be one of json, csv, svg, txt");
}

CmdResult cmd_build(const RunConfig& config) {
  if (!config.lambda.empty() && config.lambda != "formal")
    usage("build emits symbolic bundles; use --lambda formal (see export)");
  const rep::SymbolicRep r =
      rep::build(config.n, weyl::parse_word(config.n, config.word));
  return {0, rep::rep_to_json(r) + "\n"};
}

CmdResult cmd_verify(const RunConfig& config) {
  const rep::SymbolicRep r = load_symbolic(config);
  rep::SuiteReport report = rep::verify_defining_relations(r);
  report.merge(rep::verify_projection_suite(r));

  // V/E closed-form suite over every admissible (j, i)
  const auto& segs = r.word().segments();
  for (int j = 1; j <= static_cast<int>(segs.size()); ++j)
    for (int i = segs[static_cast<std::size_t>(j) - 1].a;
         i <= segs[static_cast<std::size_t>(j) - 1].b + 1; ++i) {
      ++report.checked;
      if (!(rep::V_op(r, j, i) == rep::closed_form_V(r, j, i)))
        report.failures.push_back(
            {"vform", "(j,i)=(" + std::to_string(j) + "," + std::to_string(i) + ")"});
      ++report.checked;
      const rep::PhaseSplit split = rep::split_global_phase(rep::E_op(r, j, i));
      if (!split.single_phase || !(split.structure == rep::closed_form_E(r, j, i)) ||
          !(split.phase == rep::e_phase(r, j, i)))
        report.failures.push_back(
            {"eform", "(j,i)=(" + std::to_string(j) + "," + std::to_string(i) + ")"});
    }

  return {report.all_pass() ? 0 : 1, report_json(r, report).dump(2) + "\n"};
}

CmdResult cmd_classify(const RunConfig& config) {
  const weyl::NormalForm wa = weyl::parse_word(config.n, config.word);
  const weyl::NormalForm wb = weyl::parse_word(config.n, config.word2);
  const classify::LambdaSpec la = parse_lambda(config.lambda, config.n);
  const classify::LambdaSpec lb = parse_lambda(config.lambda2, config.n);
  const classify::EquivalenceVerdict v =
      classify::equivalent(config.n, la, wa, lb, wb, std::max(4, config.N));
  return {v.verified ? 0 : 1, classify::verdict_to_json(v) + "\n"};
}

CmdResult cmd_identify(const RunConfig& config) {
  try {
    classify::IdentificationResult res;
    if (!config.input.empty() && fs::is_directory(config.input)) {
      res = classify::identify(load_matrix_dir(config.input), config.tol);
    } else if (!config.input.empty()) {
      res = classify::identify(rep::rep_from_json(read_file(config.input)));
    } else {
      const classify::LambdaSpec lam = parse_lambda(config.lambda, config.n);
      const rep::SymbolicRep r =
          rep::build(config.n, weyl::parse_word(config.n, config.word));
      if (!lam) {
        res = classify::identify(r);
      } else {
        capped_dim(config.N, r.factors());
        res = classify::identify(
            numeric::truncate_rep(r, config.N, *lam, config.window), config.tol);
      }
    }
    return {0, classify::identification_to_json(res) + "\n"};
  } catch (const std::runtime_error& e) {
    nlohmann::ordered_json j;
    j["error"] = e.what();
    return {1, j.dump(2) + "\n"};
  }
}

CmdResult cmd_qlimit(const RunConfig& config) {
  if (config.q.empty()) usage("qlimit needs at least one --q value");
  if (config.lambda == "formal") usage("qlimit needs numeric lambda (or none for ones)");
  const weyl::NormalForm w = weyl::parse_word(config.n, config.word);
  capped_dim(config.N, letter_count(w));
  const classify::LambdaSpec lam = parse_lambda(config.lambda, config.n);
  const std::vector<Complex> lambda =
      lam ? *lam : std::vector<Complex>(static_cast<std::size_t>(config.n), Complex(1.0));
  const rep::SymbolicRep srep = rep::build(config.n, w);
  std::vector<std::pair<double, qlimit::LimitDistances>> rows;
  for (const double q : config.q) {
    const qlimit::QRep qr = qlimit::q_build(lambda, w, q, config.N);
    rows.emplace_back(q, qlimit::limit_distance(qr, srep, config.window));
  }
  return {0, qlimit::limit_csv(rows)};
}

CmdResult cmd_diagram(const RunConfig& config) {
  if (config.format == "csv") usage("diagram renders txt or svg");
  const weyl::NormalForm w = weyl::parse_word(config.n, config.word);
  const rep::Diagram d = rep::diagram(config.n, w);
  std::optional<std::pair<int, int>> hi;
  std::vector<rep::DiagramPath> paths;
  if (!config.highlight.empty()) {
    hi = parse_highlight(config.highlight, config.n);
    paths = rep::diagram_paths(d, hi->first, hi->second);
  }
  if (config.format == "svg") return {0, render_svg(d, paths, hi)};
  return {0, render_txt(d, paths, hi)};
}

CmdResult cmd_export(const RunConfig& config) {
  const classify::LambdaSpec lam = parse_lambda(config.lambda, config.n);
  if (!lam) usage("export needs numeric lambda");
  if (config.out.empty()) usage("export needs --out directory");
  const rep::SymbolicRep r =
      rep::build(config.n, weyl::parse_word(config.n, config.word));
  capped_dim(config.N, r.factors());
  const numeric::TruncatedRep t =
      numeric::truncate_rep(r, config.N, *lam, config.window);

  fs::create_directories(config.out);
  nlohmann::ordered_json meta;
  meta["n"] = t.n;
  meta["N"] = t.N;
  meta["factors"] = t.factors;
  meta["window"] = t.window;
  auto& lj = meta["lambda"] = nlohmann::ordered_json::array();
  for (const Complex v : t.lambda) lj.push_back({v.real(), v.imag()});
  write_file(config.out + "/meta.json", meta.dump(2) + "\n");
  int files = 1;
  for (int i = 1; i <= t.n + 1; ++i)
    for (int j = 1; j <= t.n + 1; ++j) {
      write_file(config.out + "/z_" + std::to_string(i) + "_" + std::to_string(j) +
                     ".txt",
                 qlimit::triplets_text(t.image(i, j)));
      ++files;
    }

  nlohmann::ordered_json manifest;
  manifest["dir"] = config.out;
  manifest["word"] = r.word().str();
  manifest["files"] = files;
  return {0, manifest.dump(2) + "\n"};
}

int run(int argc, const char* const* argv) {
  RunConfig config;
  CLI::App app{"exact and numerical computation engine for the crystallized "
               "function algebra on quantum SU(n+1)"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config",
                 "", "key=value file; keys live under a [subcommand] section");

  const auto add_common = [&config](CLI::App* s) {
    s->add_option("-n,--n", config.n, "rank (generators are z_{i,j}, i,j <= n+1)");
    s->add_option("-w,--word", config.word, "segment normal form, e.g. \"s[1,1] s[1,2]\"");
    s->add_option("-l,--lambda", config.lambda,
                  "formal | unit complex list (0.6+0.8i,1) | rational angles (1/4,0)");
    s->add_option("-N,--dim", config.N, "truncation level per tensor leg");
    s->add_option("--window", config.window, "interior comparison window (<= dim/2)");
    s->add_option("--tol", config.tol, "numeric tolerance");
    s->add_option("--out", config.out, "output file (default stdout)");
    s->add_option("--format", config.format, "json | csv | svg | txt")
        ->check(CLI::IsMember({"json", "csv", "svg", "txt"}));
  };

  CLI::App* build = app.add_subcommand("build", "emit the symbolic bundle JSON");
  CLI::App* verify =
      app.add_subcommand("verify", "run the exact relation / projection / closed-form suites");
  CLI::App* classify_cmd =
      app.add_subcommand("classify", "decide equivalence of two (lambda, word) pairs");
  CLI::App* identify =
      app.add_subcommand("identify", "recover (lambda, word) from a representation");
  CLI::App* qlimit_cmd =
      app.add_subcommand("qlimit", "q -> 0 convergence table of the deformed family");
  CLI::App* diagram = app.add_subcommand("diagram", "render the path diagram of a word");
  CLI::App* export_cmd =
      app.add_subcommand("export", "write truncated images as a matrix directory");
  for (CLI::App* s : {build, verify, classify_cmd, identify, qlimit_cmd, diagram, export_cmd})
    add_common(s);

  verify->add_option("--in", config.input, "bundle JSON file");
  identify->add_option("--in", config.input, "bundle JSON file or matrix directory");
  classify_cmd->add_option("--word2", config.word2, "second word");
  classify_cmd->add_option("--lambda2", config.lambda2, "second lambda spec");
  qlimit_cmd->add_option("-q,--q", config.q, "deformation values in [0,1)")
      ->delimiter(',');
  diagram->add_option("--highlight", config.highlight,
                      "overlay all paths contributing to z_{m,l}, given as m,l");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    validate(config);
    CmdResult res;
    bool to_stdout_only = false;
    if (app.got_subcommand(build)) {
      res = cmd_build(config);
    } else if (app.got_subcommand(verify)) {
      res = cmd_verify(config);
    } else if (app.got_subcommand(classify_cmd)) {
      res = cmd_classify(config);
    } else if (app.got_subcommand(identify)) {
      res = cmd_identify(config);
    } else if (app.got_subcommand(qlimit_cmd)) {
      res = cmd_qlimit(config);
    } else if (app.got_subcommand(diagram)) {
      res = cmd_diagram(config);
    } else {
      res = cmd_export(config);  // --out is the target directory
      to_stdout_only = true;
    }
    if (!config.out.empty() && !to_stdout_only)
      write_file(config.out, res.output);
    else
      std::cout << res.output;
    return res.exit_code;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace su0::cli
