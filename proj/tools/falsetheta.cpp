// falsetheta: exact and asymptotic coefficients of the false-indefinite theta quotients
#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "falsetheta/io.hpp"
#include "falsetheta/verify.hpp"

using namespace falsetheta;

namespace {

enum Exit { kOk = 0, kValidation = 2, kAssertion = 3, kConvergence = 4 };

struct Output {
  std::ofstream file;
  std::ostream* os = &std::cout;

  void open(const std::string& path) {
    if (path.empty() || path == "-") return;
    file.open(path);
    require(file.good(), "cannot open output file " + path);
    os = &file;
  }
};

std::vector<long> parse_scan(const std::string& spec) {
  // lo:hi:count, geometrically spaced and rounded
  long lo = 0, hi = 0, cnt = 0;
  char c1 = 0, c2 = 0;
  std::istringstream in(spec);
  in >> lo >> c1 >> hi >> c2 >> cnt;
  require(in && c1 == ':' && c2 == ':' && in.peek() == EOF, "scan must look like lo:hi:count");
  require(lo >= 1 && hi >= lo && cnt >= 1, "scan needs 1 <= lo <= hi and count >= 1");
  std::vector<long> ns;
  if (cnt == 1) return {lo};
  for (long i = 0; i < cnt; ++i) {
    double t = static_cast<double>(i) / static_cast<double>(cnt - 1);
    long n = std::lround(static_cast<double>(lo) * std::pow(static_cast<double>(hi) / static_cast<double>(lo), t));
    if (ns.empty() || n != ns.back()) ns.push_back(n);
  }
  return ns;
}

struct Config {
  std::string format = "json";
  std::string output;
  int threads = 0;
  int j = 0;
  long n = 0;
  bool podeu = false;
  std::string series;
  long dump_x = 0;
  std::string scan;
  bool exact = false;
  long k_max = 0;
  int quad_nodes = 64;
  double tol = 1e-30;
  int r_max = 4;
  long a = 0, b = 0, c = 0, d = 0;
  std::string arc;
  bool all = false;
  std::string only;
};

int cmd_coeffs(const Config& cfg, std::ostream& os) {
  if (cfg.dump_x > 0) {
    require_j(cfg.j);
    write_coefficient_dump(os, cfg.j, cfg.dump_x);
    return kOk;
  }
  require(cfg.n >= 1, "--n must be >= 1");
  if (!cfg.series.empty()) {
    require_j(cfg.j);
    if (cfg.series == "u")
      os << series_json(u_series(cfg.j, cfg.n)) << "\n";
    else if (cfg.series == "alpha")
      os << series_json(u_series(cfg.j, cfg.n) * inverse_eta(cfg.n)) << "\n";
    else
      throw ValidationError("--series must be u or alpha");
    return kOk;
  }
  const bool csv = cfg.format == "csv";
  if (cfg.podeu) {
    auto pe = podeu(cfg.n - 1);
    if (csv) os << "n,podeu\n";
    for (long i = 0; i < cfg.n; ++i) {
      const auto& v = pe[static_cast<std::size_t>(i)];
      if (csv)
        os << i << "," << v.get_str() << "\n";
      else
        os << "{\"n\":" << i << ",\"podeu\":" << json_quote(v.get_str()) << "}\n";
    }
    return kOk;
  }
  require_j(cfg.j);
  auto al = alpha(cfg.j, cfg.n - 1);
  // decomposition check against 2 podeu(2n + j) = 2p(n)[j=0] + r_o(2n + j) + alpha_j(n)
  std::vector<BigInt> pe, p, ro;
  if (cfg.j < 2) {
    pe = podeu(2 * cfg.n);
    p = partition_numbers(cfg.n);
    ro = r_odd_distinct(2 * cfg.n);
  }
  if (csv) os << "j,n,alpha,decomposition\n";
  for (long i = 0; i < cfg.n; ++i) {
    auto idx = static_cast<std::size_t>(i);
    std::string dec = "n/a";
    if (cfg.j < 2) {
      auto m = static_cast<std::size_t>(2 * i + cfg.j);
      BigInt rhs = ro[m] + al[idx] + (cfg.j == 0 ? BigInt(2 * p[idx]) : BigInt(0));
      dec = 2 * pe[m] == rhs ? "ok" : "FAIL";
      check(dec == "ok", "decomposition fails at n = " + std::to_string(i));
    }
    if (csv)
      os << cfg.j << "," << i << "," << al[idx].get_str() << "," << dec << "\n";
    else
      os << "{\"j\":" << cfg.j << ",\"n\":" << i << ",\"alpha\":" << json_quote(al[idx].get_str())
         << ",\"decomposition\":" << json_quote(dec) << "}\n";
  }
  return kOk;
}

int cmd_asymptotic(const Config& cfg, std::ostream& os) {
  require_j(cfg.j);
  MainSumOptions opt;
  opt.k_max = cfg.k_max;
  opt.quad_nodes = cfg.quad_nodes;
  opt.tol = cfg.tol;
  std::vector<long> ns;
  bool exact = cfg.exact;
  if (!cfg.scan.empty()) {
    require(cfg.n == 0, "use either --n or --scan");
    ns = parse_scan(cfg.scan);
    exact = true;
  } else {
    require(cfg.n >= 1, "--n must be >= 1");
    ns = {cfg.n};
  }
  const bool csv = cfg.format == "csv";
  if (csv) os << kAsymptoticCsvHeader << "\n";
  for (long n : ns) {
    auto r = theorem_main_sum(cfg.j, n, opt, exact);
    os << (csv ? asymptotic_csv(r) : asymptotic_json(r)) << "\n";
    os.flush();
  }
  return kOk;
}

int cmd_kernel_table(const Config& cfg, std::ostream& os) {
  require(cfg.r_max >= 0 && cfg.r_max <= 30, "--r-max must be in 0..30");
  using R = MpReal<60>;
  auto t = ModularTriple::make(0, 1);
  os << "j,r,value,closed_form_string,rel_error_vs_table\n";
  for (int j = 0; j < 3; ++j) {
    auto v = aggregated_taylor<R>(j, t, cfg.r_max);
    for (int r = 0; r <= cfg.r_max; ++r) {
      double value = to_double(v[static_cast<std::size_t>(r)].re);
      Rational exact = aggregated_taylor_k1_exact(j, r);
      std::string rel;
      if (r <= 4) {
        Rational pub = tabulated_aggregated(j, r);
        R ref = real_from<R>(pub) * pow(pi_v<R>(), 2 * r + 2);
        R err = abs(v[static_cast<std::size_t>(r)].re - ref);
        rel = fmt17(pub == 0 ? to_double(err) : to_double(err / abs(ref)));
      }
      os << j << "," << r << "," << fmt17(value) << "," << pi_multiple_str(exact, 2 * r + 2) << "," << rel << "\n";
    }
  }
  return kOk;
}

int cmd_multiplier(const Config& cfg, std::ostream& os) {
  if (!cfg.arc.empty()) {
    long h = 0, k = 0;
    char slash = 0;
    std::istringstream in(cfg.arc);
    in >> h >> slash >> k;
    require(in && slash == '/' && in.peek() == EOF, "--arc must look like h/k");
    auto t = ModularTriple::make(h, k);
    os << "{\"h\":" << t.h << ",\"k\":" << t.k << ",\"h_prime\":" << t.h_prime << ",\"matrix\":[" << t.matrix.a << ","
       << t.matrix.b << "," << t.matrix.c << "," << t.matrix.d << "],\"psi\":" << matrix_json(circle_multiplier<double>(t))
       << "}\n";
    return kOk;
  }
  ModularMatrix M(cfg.a, cfg.b, cfg.c, cfg.d);
  os << "{\"matrix\":[" << M.a << "," << M.b << "," << M.c << "," << M.d << "],\"psi\":" << matrix_json(psi_vector<double>(M))
     << "}\n";
  return kOk;
}

int cmd_exact_pn(const Config& cfg, std::ostream& os) {
  require(cfg.n >= 1, "--n must be >= 1");
  auto p = partition_numbers(cfg.n);
  const bool csv = cfg.format == "csv";
  if (csv) os << "n,exact,rademacher,k_max\n";
  for (long n = cfg.all ? 1 : cfg.n; n <= cfg.n; ++n) {
    long k = cfg.k_max > 0 ? cfg.k_max : static_cast<long>(std::ceil(std::sqrt(static_cast<double>(n)))) + 5;
    double v = rademacher_p(n, k);
    const auto& e = p[static_cast<std::size_t>(n)];
    if (csv)
      os << n << "," << e.get_str() << "," << fmt17(v) << "," << k << "\n";
    else
      os << "{\"n\":" << n << ",\"exact\":" << json_quote(e.get_str()) << ",\"rademacher\":" << fmt17(v)
         << ",\"k_max\":" << k << "}\n";
  }
  return kOk;
}

int cmd_verify(const Config& cfg, std::ostream& os) {
  static const std::map<std::string, int> groups = {
      {"ground-truth", 1}, {"identities", 2}, {"sigma", 2},      {"duality", 3},  {"multipliers", 4},
      {"table", 5},        {"rademacher", 6}, {"corollary", 7}, {"theorem", 8}, {"density", 9},
  };
  std::vector<CriterionResult> rs;
  if (cfg.only.empty()) {
    rs = run_criteria({1, 2, 3, 4, 5, 6, 7, 8, 9});
  } else if (cfg.only == "determinism") {
    rs.push_back(verify_determinism());
  } else {
    auto it = groups.find(cfg.only);
    require(it != groups.end(), "unknown --only group " + cfg.only);
    rs = run_criteria({it->second});
  }
  int passed = 0;
  for (const auto& r : rs) {
    os << r.report();
    if (r.pass()) ++passed;
    if (!r.within_time()) std::cerr << "criterion " << r.id << " exceeded its time limit\n";
  }
  os << passed << "/" << rs.size() << " criteria passed\n";
  return passed == static_cast<int>(rs.size()) ? kOk : kAssertion;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact and asymptotic coefficients of false-indefinite theta quotients"};
  app.require_subcommand(1);
  Config cfg;
  app.add_option("--threads", cfg.threads, "worker threads (default: FALSETHETA_THREADS, else hardware)")->check(CLI::Range(1, 1024));
  app.add_option("-o,--output", cfg.output, "output file (default stdout)");

  auto* coeffs = app.add_subcommand("coeffs", "exact coefficient tables");
  coeffs->add_option("--j", cfg.j, "family index 0, 1 or 2");
  coeffs->add_option("--n", cfg.n, "number of coefficients");
  coeffs->add_flag("--podeu", cfg.podeu, "partitions with odd parts distinct and even parts unrestricted");
  coeffs->add_option("--series", cfg.series, "export u or alpha as a JSON series")->check(CLI::IsMember({"u", "alpha"}));
  coeffs->add_option("--dump", cfg.dump_x, "CSV of lattice coefficients d_j(n), 0 < |n| <= X");
  coeffs->add_option("--format", cfg.format)->check(CLI::IsMember({"json", "csv"}));

  auto* asym = app.add_subcommand("asymptotic", "circle-method main sum");
  asym->add_option("--j", cfg.j, "family index 0, 1 or 2");
  asym->add_option("--n", cfg.n, "coefficient index");
  asym->add_option("--scan", cfg.scan, "lo:hi:count, geometric; implies --exact");
  asym->add_flag("--exact", cfg.exact, "include the exact coefficient and residual");
  asym->add_option("--k-max", cfg.k_max, "largest arc denominator (default floor(sqrt n))");
  asym->add_option("--quad-nodes", cfg.quad_nodes, "initial Gauss-Legendre nodes per panel");
  asym->add_option("--tol", cfg.tol, "relative quadrature tolerance on near arcs");
  asym->add_option("--format", cfg.format)->check(CLI::IsMember({"json", "csv"}));

  auto* ktab = app.add_subcommand("kernel-table", "aggregated kernel Taylor values at k = 1 (CSV)");
  ktab->add_option("--r-max", cfg.r_max, "largest derivative order");

  auto* mult = app.add_subcommand("multiplier", "Psi_M for (a b; c d), or psi_{h,k} with --arc");
  mult->add_option("--a", cfg.a);
  mult->add_option("--b", cfg.b);
  mult->add_option("--c", cfg.c);
  mult->add_option("--d", cfg.d);
  mult->add_option("--arc", cfg.arc, "h/k: print the circle-method multiplier psi_{h,k} instead");

  auto* pn = app.add_subcommand("exact-pn", "p(n) exactly and from the Rademacher sum");
  pn->add_option("--n", cfg.n);
  pn->add_option("--k-max", cfg.k_max, "terms in the Rademacher sum (default ceil(sqrt n) + 5)");
  pn->add_flag("--all", cfg.all, "every n from 1 to --n");
  pn->add_option("--format", cfg.format)->check(CLI::IsMember({"json", "csv"}));

  auto* ver = app.add_subcommand("verify", "run the acceptance checks");
  ver->add_option("--only", cfg.only,
                  "ground-truth|identities|sigma|duality|multipliers|table|rademacher|corollary|theorem|density|determinism");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kValidation;
  }

  try {
    if (cfg.threads > 0) thread_override().store(cfg.threads);
    thread_count();  // validates FALSETHETA_THREADS
    Output out;
    out.open(cfg.output);
    std::ostream& os = *out.os;
    int rc = kOk;
    if (*coeffs) rc = cmd_coeffs(cfg, os);
    else if (*asym) rc = cmd_asymptotic(cfg, os);
    else if (*ktab) rc = cmd_kernel_table(cfg, os);
    else if (*mult) rc = cmd_multiplier(cfg, os);
    else if (*pn) rc = cmd_exact_pn(cfg, os);
    else if (*ver) rc = cmd_verify(cfg, os);
    os.flush();
    return rc;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const AssertionFailure& e) {
    std::cerr << "assertion failed: " << e.what() << "\n";
    return kAssertion;
  } catch (const ConvergenceError& e) {
    std::cerr << "did not converge: " << e.what() << "\n";
    return kConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
