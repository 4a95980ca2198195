// oscme command-line interface: single elements, bulk tensors, validation
// against the quadrature oracle, and the recurrence-vs-direct benchmark.
//
// Exit codes: 0 success, 1 validation/runtime failure, 2 usage error.

#include "oscme/bench.hpp"
#include "oscme/closed_form.hpp"
#include "oscme/oracle.hpp"
#include "oscme/tensor_store.hpp"
#include "oscme/validation.hpp"
#include "oscme/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

namespace {

using namespace oscme;

std::string env_or(const char *name, const std::string &fallback) {
  const char *v = std::getenv(name);
  return v ? std::string(v) : fallback;
}

ElementKey key_from_args(const std::vector<int> &indices) {
  std::array<int, 12> flat{};
  std::copy(indices.begin(), indices.end(), flat.begin());
  return ElementKey::from_flat(flat);
}

int run_element(const std::vector<int> &indices, double a,
                const std::string &backend_str, bool with_oracle) {
  const ElementKey key = key_from_args(indices);
  const Backend backend = backend_from_name(backend_str);
  const OscillatorScale scale(a);
  const Evaluator eval(std::max(key.max_index(), 1), scale);
  const ElementValue v = eval.element_direct(key, backend);
  const SelectionResult sel = selection_rule(key);

  std::printf("key = %s\n", key.str().c_str());
  std::printf("s = %s   selection: %s\n", sel.str().c_str(),
              sel.pass() ? "pass" : "vanishes");
  std::printf("value = %.16e\n", v.value());
  if (backend == Backend::Exact)
    std::printf("exact = %s * sqrt(2/pi) / a\n", v.exact().str().c_str());
  if (with_oracle) {
    const auto spec = oracle::QuadratureSpec::for_max_index(key.max_index());
    const auto q = oracle::element_quadrature(key, a, spec);
    std::printf("oracle = %.16e   |closed - oracle| = %.3e\n", q.value,
                std::abs(v.value() - q.value));
  }
  return 0;
}

int run_tensor(const std::string &mode_str, int cutoff_value, double a,
               const std::string &backend_str, const std::string &strategy_str,
               int workers, std::size_t max_keys, const std::string &output,
               const std::string &format_str) {
  tensor::BasisCutoff cutoff;
  if (mode_str == "per_axis")
    cutoff.mode = tensor::CutoffMode::PerAxis;
  else if (mode_str == "total_quanta")
    cutoff.mode = tensor::CutoffMode::TotalQuanta;
  else
    throw std::invalid_argument("unknown cutoff mode '" + mode_str + "'");
  cutoff.value = cutoff_value;

  tensor::BuildOptions options;
  options.backend = backend_from_name(backend_str);
  if (strategy_str == "direct")
    options.strategy = tensor::BuildStrategy::Direct;
  else if (strategy_str == "recurrence")
    options.strategy = tensor::BuildStrategy::Recurrence;
  else
    throw std::invalid_argument("unknown strategy '" + strategy_str + "'");
  if (workers < 1)
    throw std::invalid_argument("workers must be >= 1");
  options.workers = workers;
  options.max_keys = max_keys;

  tensor::Format fmt;
  if (format_str == "binary")
    fmt = tensor::Format::Binary;
  else if (format_str == "json")
    fmt = tensor::Format::Json;
  else if (format_str == "csv")
    fmt = tensor::Format::Csv;
  else if (format_str == "auto")
    fmt = tensor::TensorStore::format_for_path(output);
  else
    throw std::invalid_argument("unknown format '" + format_str + "'");

  const tensor::TensorStore store = tensor::build_tensor(cutoff, a, options);
  store.export_file(output, fmt);

  std::string digest_hex;
  for (auto b : store.digest()) {
    char buf[3];
    std::snprintf(buf, sizeof(buf), "%02x", b);
    digest_hex += buf;
  }
  std::printf("cutoff = %s   a = %g   backend = %s   strategy = %s   workers = %d\n",
              cutoff.str().c_str(), a, backend_name(options.backend).c_str(),
              strategy_str.c_str(), workers);
  std::printf("basis states = %zu   candidate keys = %zu   stored = %zu\n",
              cutoff.state_count(), tensor::estimate_keys(cutoff),
              store.count());
  std::printf("digest = %s\n", digest_hex.c_str());
  std::printf("wrote %s\n", output.c_str());
  return 0;
}

int run_validate(int limit, int samples, int sample_limit, double a,
                 double threshold, std::uint64_t seed) {
  validate::Options options;
  options.exhaustive_limit = limit;
  options.random_samples = samples;
  options.random_limit = sample_limit;
  options.threshold = threshold;
  options.seed = seed;

  const Evaluator eval(std::max(limit, sample_limit), OscillatorScale(a));
  const validate::Report report = validate::run(eval, options);

  std::printf("checked = %zu keys (exhaustive <= %d, %d random <= %d)\n",
              report.checked, limit, samples, sample_limit);
  std::printf("selection-rule zeros = %zu\n", report.selection_zeros);
  std::printf("max rel disagreement = %.3e at key %s\n", report.max_rel,
              report.worst_key.str().c_str());
  if (report.pass) {
    std::printf("PASS (threshold %.1e)\n", threshold);
    return 0;
  }
  std::printf("FAIL (threshold %.1e): %zu disagreement(s)\n", threshold,
              report.failures.size());
  const std::size_t show = std::min<std::size_t>(report.failures.size(), 5);
  for (std::size_t i = 0; i < show; ++i) {
    const auto &f = report.failures[i];
    std::printf("  %s closed=%.16e oracle=%.16e rel=%.3e\n", f.key.str().c_str(),
                f.closed, f.oracle, f.rel);
  }
  return 1;
}

int run_bench(int n_max, int reps, const std::string &backend_str,
              bool as_json) {
  const bench::BenchResult r =
      bench::run_family_bench(n_max, reps, backend_from_name(backend_str));
  if (as_json) {
    nlohmann::json j;
    j["n_max"] = r.n_max;
    j["repetitions"] = r.repetitions;
    j["direct_ns"] = r.direct_ns;
    j["recurrence_ns"] = r.recurrence_ns;
    j["ratio"] = r.ratio;
    std::printf("%s\n", j.dump().c_str());
    return 0;
  }
  std::printf("n_max = %d   repetitions = %d\n", r.n_max, r.repetitions);
  std::printf("direct:     %12llu ns total\n",
              static_cast<unsigned long long>(r.direct_ns));
  std::printf("recurrence: %12llu ns total\n",
              static_cast<unsigned long long>(r.recurrence_ns));
  std::printf("ratio = %.2f\n", r.ratio);
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Coulomb matrix elements in the 3D harmonic-oscillator "
               "product basis"};
  app.set_version_flag("--version", oscme::kVersion);
  app.require_subcommand(1);

  const std::string default_backend = env_or("OSCME_BACKEND", "float");
  int default_workers = 1;
  {
    const std::string w = env_or("OSCME_WORKERS", "1");
    try {
      std::size_t pos = 0;
      default_workers = std::stoi(w, &pos);
      if (pos != w.size() || default_workers < 1)
        throw std::invalid_argument(w);
    } catch (const std::exception &) {
      std::fprintf(stderr, "error: OSCME_WORKERS='%s' is not a positive integer\n",
                   w.c_str());
      return 2;
    }
  }

  int rc = 0;

  // element: one matrix element from its 12 indices.
  auto *element = app.add_subcommand(
      "element", "Evaluate one element <l1 l2|1/r12|l3 l4>");
  std::vector<int> indices;
  element
      ->add_option("indices", indices,
                   "12 quantum numbers: nx1 ny1 nz1 nx2 ny2 nz2 nx3 ny3 nz3 "
                   "nx4 ny4 nz4")
      ->expected(12)
      ->required()
      ->check(CLI::NonNegativeNumber);
  double el_a = 1.0;
  element->add_option("--a", el_a, "oscillator length (default 1)");
  std::string el_backend = default_backend;
  element->add_option("--backend", el_backend, "float or exact");
  bool el_oracle = false;
  element->add_flag("--oracle", el_oracle,
                    "also evaluate by quadrature and print the difference");
  element->callback(
      [&] { rc = run_element(indices, el_a, el_backend, el_oracle); });

  // tensor: bulk build + export.
  auto *tensor_cmd =
      app.add_subcommand("tensor", "Build and export a bulk tensor");
  std::string t_mode = "total_quanta";
  tensor_cmd->add_option("--cutoff-mode", t_mode,
                         "per_axis or total_quanta (default total_quanta)");
  int t_cutoff = 0;
  tensor_cmd->add_option("--cutoff", t_cutoff, "cutoff value")
      ->required()
      ->check(CLI::NonNegativeNumber);
  double t_a = 1.0;
  tensor_cmd->add_option("--a", t_a, "oscillator length (default 1)");
  std::string t_backend = default_backend;
  tensor_cmd->add_option("--backend", t_backend, "float or exact");
  std::string t_strategy = "recurrence";
  tensor_cmd->add_option("--strategy", t_strategy,
                         "direct or recurrence (default recurrence)");
  int t_workers = default_workers;
  tensor_cmd->add_option("--workers", t_workers, "worker threads (default 1)");
  std::size_t t_max_keys = tensor::BuildOptions{}.max_keys;
  tensor_cmd->add_option("--max-keys", t_max_keys,
                         "refuse builds beyond this candidate-key estimate");
  std::string t_output;
  tensor_cmd->add_option("--output", t_output, "output path")->required();
  std::string t_format = "auto";
  tensor_cmd->add_option("--format", t_format,
                         "binary, json, csv, or auto (by extension)");
  tensor_cmd->callback([&] {
    rc = run_tensor(t_mode, t_cutoff, t_a, t_backend, t_strategy, t_workers,
                    t_max_keys, t_output, t_format);
  });

  // validate: closed form against the oracle.
  auto *validate_cmd = app.add_subcommand(
      "validate", "Cross-check the closed form against quadrature");
  int v_limit = 2;
  validate_cmd->add_option("--limit", v_limit,
                           "exhaustive sweep over indices <= limit (default 2)");
  int v_samples = 200;
  validate_cmd->add_option("--samples", v_samples,
                           "random spot checks (default 200)");
  int v_sample_limit = 4;
  validate_cmd->add_option("--sample-limit", v_sample_limit,
                           "index bound for random checks (default 4)");
  double v_a = 1.0;
  validate_cmd->add_option("--a", v_a, "oscillator length (default 1)");
  double v_threshold = 1e-8;
  validate_cmd->add_option("--threshold", v_threshold,
                           "relative tolerance (default 1e-8)");
  std::uint64_t v_seed = 20260823;
  validate_cmd->add_option("--seed", v_seed, "random seed");
  validate_cmd->callback([&] {
    rc = run_validate(v_limit, v_samples, v_sample_limit, v_a, v_threshold,
                      v_seed);
  });

  // bench: recurrence vs direct.
  auto *bench_cmd = app.add_subcommand(
      "bench", "Benchmark recurrence-based family construction");
  int b_nmax = 8;
  bench_cmd->add_option("--n-max", b_nmax, "family size (default 8)");
  int b_reps = 5;
  bench_cmd->add_option("--reps", b_reps, "repetitions (default 5)");
  std::string b_backend = default_backend;
  bench_cmd->add_option("--backend", b_backend, "float or exact");
  bool b_json = false;
  bench_cmd->add_flag("--json", b_json, "machine-readable output");
  bench_cmd->callback(
      [&] { rc = run_bench(b_nmax, b_reps, b_backend, b_json); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return 2;
  } catch (const std::invalid_argument &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::out_of_range &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return rc;
}
