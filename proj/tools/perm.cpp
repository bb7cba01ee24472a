// Command-line front end for the permanent library: exact computation
// (naive, glynn, macmahon, spin-fd, delta-oracle), Monte Carlo estimation,
// a cross-identity verification suite, and a scaling benchmark.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "permanent/permanent.hpp"

namespace {

using permanent::DistributionKind;
using permanent::EstimateReport;
using permanent::GeneratorKind;
using permanent::GeneratorSpec;
using permanent::MatrixFormat;
using permanent::SquareMatrix;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitGuard = 4;

struct Config {
  std::string method = "glynn";
  std::string dist = "gaussian";
  std::uint64_t samples = 100000;
  std::uint64_t seed = 0;
  std::string input_path;
  std::string gen_spec;
  std::string format = "table";
  double h = 1e-3;
  std::string n_range;
  unsigned workers = 1;
};

double elapsed_ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

GeneratorKind parse_kind(const std::string& name) {
  if (name == "ones") return GeneratorKind::ones;
  if (name == "identity") return GeneratorKind::identity;
  if (name == "rademacher") return GeneratorKind::rademacher_random;
  if (name == "uniform") return GeneratorKind::uniform_random;
  if (name == "spd") return GeneratorKind::symmetric_positive_definite;
  throw permanent::ParseError("unknown generator kind '" + name +
                              "' (want ones|identity|rademacher|uniform|spd)");
}

GeneratorSpec parse_gen_spec(const std::string& text, std::uint64_t seed) {
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw permanent::ParseError("generator spec must look like kind:n");
  GeneratorSpec spec;
  spec.kind = parse_kind(text.substr(0, colon));
  const std::string dim = text.substr(colon + 1);
  try {
    std::size_t used = 0;
    const unsigned long long n = std::stoull(dim, &used);
    if (used != dim.size() || n == 0) throw std::invalid_argument(dim);
    spec.n = static_cast<std::size_t>(n);
  } catch (const std::exception&) {
    throw permanent::ParseError("bad generator dimension '" + dim + "'");
  }
  spec.seed = seed;
  return spec;
}

SquareMatrix load_matrix(const Config& cfg) {
  if (cfg.input_path.empty() == cfg.gen_spec.empty())
    throw permanent::ParseError(
        "exactly one of --input and --gen must be given");
  if (!cfg.gen_spec.empty())
    return permanent::generate(parse_gen_spec(cfg.gen_spec, cfg.seed));
  std::ifstream in(cfg.input_path, std::ios::binary);
  if (!in)
    throw permanent::ParseError("cannot open input file '" + cfg.input_path +
                                "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const bool is_json = cfg.input_path.size() >= 5 &&
                       cfg.input_path.rfind(".json") ==
                           cfg.input_path.size() - 5;
  return permanent::parse_matrix(
      buffer.str(), is_json ? MatrixFormat::json : MatrixFormat::csv);
}

DistributionKind parse_dist(const std::string& name) {
  if (name == "rademacher") return DistributionKind::rademacher;
  if (name == "gaussian") return DistributionKind::gaussian;
  if (name == "sine") return DistributionKind::sine_weighted;
  throw permanent::ParseError("unknown distribution '" + name +
                              "' (want rademacher|gaussian|sine)");
}

std::string fmt(double v, const char* spec = "%.12g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

// ---------------------------------------------------------------- compute

int run_compute(const Config& cfg) {
  const SquareMatrix a = load_matrix(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  double value = 0.0;
  if (cfg.method == "naive") {
    value = permanent::perm_naive(a);
  } else if (cfg.method == "glynn") {
    value = permanent::perm_glynn(a, cfg.workers);
  } else if (cfg.method == "macmahon") {
    value = permanent::perm_macmahon(a, cfg.workers);
  } else if (cfg.method == "spin-fd") {
    if (!(cfg.h > 0.0) || cfg.h > 0.1)
      throw permanent::ParseError("--h must lie in (0, 0.1]");
    value = permanent::perm_spin_fd(a, cfg.h);
  } else if (cfg.method == "delta-oracle") {
    value = permanent::perm_delta_oracle(a);
  } else {
    throw permanent::ParseError(
        "unknown method '" + cfg.method +
        "' (want naive|glynn|macmahon|spin-fd|delta-oracle)");
  }
  const double ms = elapsed_ms_since(t0);
  if (cfg.format == "json") {
    json out{{"method", cfg.method},
             {"value", value},
             {"elapsed_ms", ms},
             {"n", a.size()}};
    std::cout << out.dump() << "\n";
  } else {
    std::printf("%-12s %-4s %-18s %s\n", "method", "n", "value", "elapsed_ms");
    std::printf("%-12s %-4zu %-18s %s\n", cfg.method.c_str(), a.size(),
                fmt(value).c_str(), fmt(ms, "%.3f").c_str());
  }
  return kExitOk;
}

// --------------------------------------------------------------- estimate

int run_estimate(const Config& cfg) {
  if (cfg.samples < 2)
    throw permanent::ParseError("--samples must be at least 2");
  const SquareMatrix a = load_matrix(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  const EstimateReport rep = permanent::sample_estimate(
      a, parse_dist(cfg.dist), cfg.samples, cfg.seed, cfg.workers);
  const double ms = elapsed_ms_since(t0);
  if (cfg.format == "json") {
    json out{{"method", cfg.dist},
             {"estimate", rep.estimate},
             {"stderr", rep.std_error},
             {"ci95_low", rep.ci95_low},
             {"ci95_high", rep.ci95_high},
             {"samples", rep.samples},
             {"seed", rep.seed},
             {"elapsed_ms", ms},
             {"n", a.size()}};
    std::cout << out.dump() << "\n";
  } else {
    std::printf("%-12s %-4s %-10s %-8s %-16s %-14s %-16s %-16s %s\n", "method",
                "n", "samples", "seed", "estimate", "stderr", "ci95_low",
                "ci95_high", "elapsed_ms");
    std::printf("%-12s %-4zu %-10llu %-8llu %-16s %-14s %-16s %-16s %s\n",
                cfg.dist.c_str(), a.size(),
                static_cast<unsigned long long>(rep.samples),
                static_cast<unsigned long long>(rep.seed),
                fmt(rep.estimate).c_str(), fmt(rep.std_error).c_str(),
                fmt(rep.ci95_low).c_str(), fmt(rep.ci95_high).c_str(),
                fmt(ms, "%.3f").c_str());
  }
  return kExitOk;
}

// ----------------------------------------------------------------- verify

struct IdentityResult {
  std::string name;
  bool pass = false;
  std::string discrepancy;
  std::string tolerance;
};

IdentityResult value_identity(const std::string& name, double got, double ref,
                              double rel) {
  const double tol = std::max(rel * std::abs(ref), 1e-10);
  const double disc = std::abs(got - ref);
  return {name, disc <= tol, fmt(disc, "%.3e"), fmt(tol, "%.3e")};
}

std::vector<IdentityResult> run_identities(const SquareMatrix& a,
                                           const Config& cfg) {
  if (a.size() > 10)
    throw permanent::DimensionTooLarge(
        "verify cross-checks every route and needs n <= 10");
  std::vector<IdentityResult> results;

  const double naive = permanent::perm_naive(a);
  const double glynn = permanent::perm_glynn(a, cfg.workers);
  const double macmahon = permanent::perm_macmahon(a, cfg.workers);
  const double rademacher = permanent::rademacher_full_enumeration(a);
  results.push_back(value_identity("glynn-vs-naive", glynn, naive, 1e-9));
  results.push_back(
      value_identity("macmahon-vs-naive", macmahon, naive, 1e-8));
  results.push_back(
      value_identity("rademacher-enum-vs-naive", rademacher, naive, 1e-9));
  results.push_back(
      value_identity("rademacher-enum-vs-glynn", rademacher, glynn, 1e-10));

  // Permutation tensor against its sign-vector expectation, all tuples at
  // n = 3 and n = 4; agreement is exact.
  {
    double worst = 0.0;
    for (std::size_t n = 3; n <= 4; ++n) {
      std::vector<int> tuple(n, 1);
      while (true) {
        const double delta = permanent::delta_via_enumeration(tuple);
        const double tensor = permanent::permutation_tensor(tuple);
        worst = std::max(worst, std::abs(delta - tensor));
        std::size_t pos = 0;
        while (pos < n && tuple[pos] == static_cast<int>(n)) {
          tuple[pos] = 1;
          ++pos;
        }
        if (pos == n) break;
        ++tuple[pos];
      }
    }
    results.push_back({"delta-tensor-enumeration", worst == 0.0,
                       fmt(worst, "%.3e"), "exact"});
  }

  // Gaussian cosh-moment identity on a positive definite coupling derived
  // from the input: W = A^T A / n + I/10.
  {
    const std::size_t n = a.size();
    std::vector<double> w(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        double dot = 0.0;
        for (std::size_t k = 0; k < n; ++k) dot += a(k, i) * a(k, j);
        w[i * n + j] = dot / static_cast<double>(n) + (i == j ? 0.1 : 0.0);
      }
    }
    const SquareMatrix cov(n, std::move(w));
    const double z = permanent::partition_function({cov, 1.0});
    const EstimateReport rep = permanent::cosh_moment_mc(
        cov, std::max<std::uint64_t>(cfg.samples, 2), cfg.seed, cfg.workers);
    const double disc = std::abs(rep.estimate - z);
    const double tol = 4.0 * rep.std_error;
    results.push_back({"gauss-spin-cosh-moment", disc <= tol,
                       fmt(disc, "%.3e"), fmt(tol, "%.3e") + " (4*stderr)"});
  }

  // First-order convergence of the finite-difference coefficient extraction:
  // absolute errors shrink roughly tenfold per decade of h.
  {
    const double e1 = std::abs(permanent::perm_spin_fd(a, 1e-1) - naive);
    const double e2 = std::abs(permanent::perm_spin_fd(a, 1e-2) - naive);
    const double e3 = std::abs(permanent::perm_spin_fd(a, 1e-3) - naive);
    bool pass;
    std::string disc;
    if (e1 == 0.0 && e2 == 0.0 && e3 == 0.0) {
      pass = true;
      disc = "errors=0,0,0";
    } else if (e2 == 0.0 || e3 == 0.0) {
      pass = false;
      disc = "errors=" + fmt(e1, "%.3e") + "," + fmt(e2, "%.3e") + "," +
             fmt(e3, "%.3e");
    } else {
      const double r1 = e1 / e2;
      const double r2 = e2 / e3;
      pass = r1 >= 5.0 && r1 <= 20.0 && r2 >= 5.0 && r2 <= 20.0;
      disc = "ratios=" + fmt(r1, "%.2f") + "," + fmt(r2, "%.2f");
    }
    results.push_back({"spin-fd-convergence", pass, disc, "[5,20]"});
  }

  return results;
}

int run_verify(const Config& cfg) {
  const SquareMatrix a = load_matrix(cfg);
  const std::vector<IdentityResult> results = run_identities(a, cfg);
  bool all_pass = true;
  for (const auto& r : results) all_pass = all_pass && r.pass;
  if (cfg.format == "json") {
    json out;
    out["all_pass"] = all_pass;
    out["n"] = a.size();
    out["identities"] = json::array();
    for (const auto& r : results) {
      out["identities"].push_back({{"name", r.name},
                                   {"pass", r.pass},
                                   {"discrepancy", r.discrepancy},
                                   {"tolerance", r.tolerance}});
    }
    std::cout << out.dump() << "\n";
  } else {
    for (const auto& r : results) {
      std::printf("%s %-26s discrepancy=%-14s tol=%s\n",
                  r.pass ? "PASS" : "FAIL", r.name.c_str(),
                  r.discrepancy.c_str(), r.tolerance.c_str());
    }
  }
  return all_pass ? kExitOk : kExitVerifyFailed;
}

// ------------------------------------------------------------------ bench

int run_bench(const Config& cfg) {
  std::size_t lo = 0, hi = 0;
  {
    const auto colon = cfg.n_range.find(':');
    if (colon == std::string::npos)
      throw permanent::ParseError("--n-range must look like A:B");
    try {
      lo = std::stoul(cfg.n_range.substr(0, colon));
      hi = std::stoul(cfg.n_range.substr(colon + 1));
    } catch (const std::exception&) {
      throw permanent::ParseError("bad --n-range '" + cfg.n_range + "'");
    }
    if (lo == 0 || hi < lo)
      throw permanent::ParseError("--n-range bounds must satisfy 1 <= A <= B");
  }
  GeneratorKind kind = GeneratorKind::uniform_random;
  if (!cfg.gen_spec.empty()) {
    // bench takes a bare kind; dimensions come from the range
    const auto colon = cfg.gen_spec.find(':');
    kind = parse_kind(colon == std::string::npos
                          ? cfg.gen_spec
                          : cfg.gen_spec.substr(0, colon));
  }

  auto compute = [&](const SquareMatrix& m) {
    return cfg.method == "naive" ? permanent::perm_naive(m)
                                 : permanent::perm_glynn(m, cfg.workers);
  };
  if (cfg.method != "naive" && cfg.method != "glynn")
    throw permanent::ParseError("bench supports --method naive|glynn");

  struct Row {
    std::size_t n;
    double ms;
    double value;
  };
  std::vector<Row> rows;
  for (std::size_t n = lo; n <= hi; ++n) {
    const SquareMatrix m = permanent::generate({kind, n, cfg.seed});
    volatile double sink = compute(m);  // warm-up run, discarded
    (void)sink;
    // Repeat short runs until ~100 ms so small-n ratios are not jitter.
    double value = 0.0;
    int reps = 0;
    const auto t0 = std::chrono::steady_clock::now();
    double total = 0.0;
    do {
      value = compute(m);
      ++reps;
      total = elapsed_ms_since(t0);
    } while (total < 100.0 && reps < 1000);
    rows.push_back({n, total / reps, value});
  }
  std::vector<double> ratios;
  for (std::size_t i = 1; i < rows.size(); ++i)
    ratios.push_back(rows[i].ms / rows[i - 1].ms);

  if (cfg.format == "json") {
    json out;
    out["method"] = cfg.method;
    out["rows"] = json::array();
    for (const auto& r : rows)
      out["rows"].push_back(
          {{"n", r.n}, {"elapsed_ms", r.ms}, {"value", r.value}});
    out["ratios"] = ratios;
    std::cout << out.dump() << "\n";
  } else {
    std::printf("%-10s %-4s %-14s %s\n", "method", "n", "elapsed_ms", "value");
    for (const auto& r : rows)
      std::printf("%-10s %-4zu %-14s %s\n", cfg.method.c_str(), r.n,
                  fmt(r.ms, "%.3f").c_str(), fmt(r.value).c_str());
    std::string line = "ratios:";
    for (double v : ratios) line += " " + fmt(v, "%.2f");
    std::printf("%s\n", line.c_str());
  }
  return kExitOk;
}

int dispatch(const std::string& sub, const Config& cfg) {
  try {
    if (sub == "compute") return run_compute(cfg);
    if (sub == "estimate") return run_estimate(cfg);
    if (sub == "verify") return run_verify(cfg);
    return run_bench(cfg);
  } catch (const permanent::DimensionTooLarge& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitGuard;
  } catch (const permanent::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const permanent::ShapeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const permanent::ValueError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const permanent::Error& e) {
    // numeric/domain failures: NotPositiveDefinite, NonInvertible, overflow...
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "matrix permanents: exact algorithms, Monte Carlo estimators, and a "
      "verification harness"};
  // --h is the finite-difference step, so help lives on --help only
  app.set_help_flag("--help", "print usage");
  app.require_subcommand(1);
  Config cfg;

  auto add_io = [&cfg](CLI::App* sub) {
    sub->set_help_flag("--help", "print usage");
    sub->add_option("--input", cfg.input_path, "matrix file (CSV, or JSON by .json extension)");
    sub->add_option("--gen", cfg.gen_spec, "generator spec kind:n (ones|identity|rademacher|uniform|spd)");
    sub->add_option("--seed", cfg.seed, "64-bit seed for generators and sampling");
    sub->add_option("--format", cfg.format, "output format: json|table")
        ->check(CLI::IsMember({"json", "table"}));
    sub->add_option("--workers", cfg.workers, "parallel worker count (results fixed per count)");
  };

  CLI::App* compute = app.add_subcommand("compute", "compute a permanent exactly");
  add_io(compute);
  compute->add_option("--method", cfg.method, "naive|glynn|macmahon|spin-fd|delta-oracle");
  compute->add_option("--h", cfg.h, "finite-difference step for spin-fd");

  CLI::App* estimate = app.add_subcommand("estimate", "Monte Carlo permanent estimate");
  add_io(estimate);
  estimate->add_option("--dist", cfg.dist, "rademacher|gaussian|sine");
  estimate->add_option("--samples", cfg.samples, "sample count (>= 2)");

  CLI::App* verify = app.add_subcommand("verify", "cross-check every identity on one matrix");
  add_io(verify);
  verify->add_option("--samples", cfg.samples, "Monte Carlo samples for the stochastic identities");

  CLI::App* bench = app.add_subcommand("bench", "time an exact method over a dimension range");
  add_io(bench);
  bench->add_option("--method", cfg.method, "naive|glynn");
  bench->add_option("--n-range", cfg.n_range, "dimension range A:B")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }
  return dispatch(app.get_subcommands().front()->get_name(), cfg);
}
