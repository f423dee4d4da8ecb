// qxlab: reproducible desk-scale experiments on unitary ensembles, the
// maximally-entangled-state tester protocols, the four-particle
// Hamiltonian, and the clock-register constructions.
//
// Subcommands: expander | eprtest | arealaw | c2h {kitaev, hprime,
// twoclock, entropy-bound}.  Every output embeds tool version, resolved
// config, seed, and PRNG identity; identical configs give identical
// numeric fields.  Exit codes: 0 success, 2 non-convergence, 3 invalid
// input, 4 certification failure.

#include <chrono>
#include <cstdlib>
#include <future>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "qx/circuit_to_ham.hpp"
#include "qx/report_io.hpp"

namespace {

constexpr const char* kToolVersion = "1.0.0";

constexpr int kExitOk = 0;
constexpr int kExitConvergence = 2;
constexpr int kExitInvalid = 3;
constexpr int kExitCertification = 4;

using qx::Json;

std::filesystem::path resolve_output(const std::string& flag_value,
                                     const std::string& default_name) {
  if (!flag_value.empty()) return flag_value;
  if (const char* dir = std::getenv("QXLAB_OUTPUT_DIR"))
    return std::filesystem::path(dir) / default_name;
  return default_name;
}

Json make_meta(const Json& resolved_config,
               std::optional<std::uint64_t> seed) {
  Json meta;
  meta["tool"] = "qxlab";
  meta["version"] = kToolVersion;
  meta["prng"] = "std::mt19937_64";
  if (seed) meta["seed"] = *seed;
  meta["config"] = resolved_config;
  return meta;
}

// Wall-clock duration is appended after the deterministic payload; it is
// the one field that differs between identical runs.
struct Stopwatch {
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start)
        .count();
  }
};

qx::EigMode mode_from(const std::string& s) {
  if (s == "dense") return qx::EigMode::kDense;
  if (s == "iterative") return qx::EigMode::kIterative;
  throw qx::ParameterError("mode must be dense or iterative");
}

// Run sweep items through a bounded worker pool, results in input order.
template <typename Fn>
std::vector<Json> pooled(const std::vector<int>& params, Fn&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()),
                            std::min<std::size_t>(params.size(), 8));
  std::vector<Json> results(params.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::string> errors(params.size());
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < params.size();
           i = next.fetch_add(1)) {
        try {
          results[i] = fn(params[i]);
        } catch (const std::exception& ex) {
          errors[i] = ex.what();
        }
      }
    });
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (!e.empty()) throw qx::Error(e);
  return results;
}

qx::UnitaryEnsemble make_ensemble(const std::string& kind, int D, int d,
                                  std::uint64_t seed) {
  const qx::EnsembleKind k = qx::ensemble_kind_from(kind);
  if (k == qx::EnsembleKind::kMargulis)
    return qx::build_ensemble(k, D, 8);
  return qx::build_ensemble(k, D, d, seed);
}

// Largest acceptance probability over states orthogonal to |phi_D>.
double worst_orthogonal_accept(const qx::Matrix& effect, int D) {
  const qx::Vector phi = qx::max_entangled(D);
  const std::int64_t n = effect.rows();
  const qx::Matrix proj = qx::Matrix::Identity(n, n) - phi * phi.adjoint();
  const qx::Matrix restricted = proj * effect * proj;
  qx::EigResult eig = qx::eig_dense(restricted, false);
  return eig.eigenvalues(n - 1);
}

int run_expander(const std::string& kind, int D, int d, std::uint64_t seed,
                 const std::string& mode, const std::string& out_path) {
  Stopwatch watch;
  const qx::UnitaryEnsemble e = make_ensemble(kind, D, d, seed);
  const qx::ExpanderReport rep = qx::expander_lambda(e, mode_from(mode));
  Json config{{"command", "expander"}, {"kind", kind}, {"D", D},
              {"d", e.d},             {"seed", seed}, {"mode", mode}};
  Json doc;
  doc["meta"] = make_meta(config, seed);
  doc["report"] = qx::expander_report_to_json(rep);
  doc["meta"]["duration_ms"] = watch.elapsed_ms();
  qx::write_atomic(resolve_output(out_path, "expander.json"),
                   qx::json_dump(doc));
  return kExitOk;
}

int run_eprtest(const std::string& variant, const std::string& kind, int D,
                int d, std::uint64_t seed, int k,
                const std::vector<std::string>& state_files,
                const std::string& out_path) {
  Stopwatch watch;
  const qx::UnitaryEnsemble e = make_ensemble(kind, D, d, seed);
  const qx::Vector phi = qx::max_entangled(D);

  const auto run_on = [&](const qx::Vector& psi) {
    if (variant == "basic") return qx::run_basic(e, psi);
    if (variant == "iterated") return qx::run_iterated(e, k, psi);
    if (variant == "two-ancilla") return qx::run_two_ancilla(e, psi);
    if (variant == "shared-randomness")
      return qx::run_shared_randomness(e, psi);
    throw qx::ParameterError("unknown variant: " + variant);
  };

  qx::Matrix effect;
  if (variant == "shared-randomness") {
    effect = qx::shared_randomness_effect(e);
  } else if (variant == "iterated") {
    const qx::Matrix m = qx::superop_dense(qx::product_ensemble(e, k));
    effect = m.adjoint() * m;
  } else {
    const qx::Matrix m = qx::superop_dense(e);
    effect = m.adjoint() * m;
  }

  std::vector<qx::ProtocolTranscript> transcripts;
  transcripts.push_back(run_on(phi));
  const double completeness = transcripts.back().accept_prob;
  const double worst = worst_orthogonal_accept(effect, D);
  for (const auto& file : state_files) {
    const Json jv = qx::load_json_file(file);
    if (!jv.is_array() || std::int64_t(jv.size()) != std::int64_t(D) * D)
      throw qx::ParameterError("state file must hold D*D [re, im] pairs");
    qx::Vector psi(std::int64_t(D) * D);
    for (std::int64_t i = 0; i < psi.size(); ++i)
      psi(i) = qx::Complex(jv.at(i).at(0).get<double>(),
                           jv.at(i).at(1).get<double>());
    if (std::abs(psi.norm() - 1.0) > 1e-8)
      throw qx::ParameterError("state file is not normalized");
    transcripts.push_back(run_on(psi));
  }

  Json config{{"command", "eprtest"}, {"variant", variant}, {"kind", kind},
              {"D", D},               {"d", e.d},           {"seed", seed},
              {"k", k},               {"states", state_files}};
  Json doc;
  doc["meta"] = make_meta(config, seed);
  doc["summary"] = Json{
      {"completeness", completeness},
      {"worst_soundness", worst},
      {"resources", qx::resources_to_json(transcripts.front().resources)}};
  Json jt = Json::array();
  for (const auto& t : transcripts) jt.push_back(qx::transcript_to_json(t));
  doc["transcripts"] = std::move(jt);
  doc["meta"]["duration_ms"] = watch.elapsed_ms();
  qx::write_atomic(resolve_output(out_path, "eprtest.json"),
                   qx::json_dump(doc));
  return kExitOk;
}

int run_arealaw(const std::vector<int>& Ds, std::uint64_t seed,
                const std::string& mode, bool identity_ensemble,
                const std::string& out_path, const std::string& csv_path) {
  Stopwatch watch;
  const qx::EigMode em = mode_from(mode);
  bool certification_ok = true;

  std::vector<Json> rows = pooled(Ds, [&](int D) {
    qx::UnitaryEnsemble e;
    qx::ExpanderReport erep;
    std::uint64_t chosen = seed;
    if (identity_ensemble) {
      e = qx::explicit_ensemble({qx::Matrix::Identity(D, D),
                                 qx::Matrix::Identity(D, D),
                                 qx::Matrix::Identity(D, D)});
      erep = qx::expander_lambda(e, em);
    } else {
      qx::CertifiedEnsemble ce = qx::certified_d3_ensemble(D, seed, em);
      e = std::move(ce.ensemble);
      erep = ce.report;
      chosen = ce.chosen_seed;
    }
    const qx::HamiltonianSpec h4 = qx::build_h4(e);
    const qx::SpectralReport rep = qx::certify(h4, erep, em);
    Json row = qx::spectral_report_to_json(rep);
    row["D"] = D;
    row["chosen_seed"] = chosen;
    return row;
  });

  std::ostringstream csv;
  csv.precision(17);
  csv << "D,lambda,c,E0,gap,entropy\n";
  for (std::size_t i = 0; i < Ds.size(); ++i) {
    const Json& row = rows[i];
    csv << Ds[i] << ',' << row["lambda"].get<double>() << ','
        << row["c"].get<double>() << ','
        << row["eigenvalues"][0].get<double>() << ','
        << row["gap"].get<double>() << ','
        << row["entropy_bits_mid_cut"].get<double>() << '\n';
    const bool ok = row["frustration_free"].get<bool>() &&
                    row["unique_ground"].get<bool>() &&
                    row["gap_at_least_c4"].get<bool>() &&
                    std::abs(row["entropy_bits_mid_cut"].get<double>() -
                             std::log2(double(Ds[i]))) <= 1e-8;
    certification_ok = certification_ok && ok;
  }

  Json config{{"command", "arealaw"},
              {"D", Ds},
              {"seed", seed},
              {"mode", mode},
              {"identity_ensemble", identity_ensemble}};
  Json doc;
  doc["meta"] = make_meta(config, seed);
  doc["reports"] = rows;
  doc["certification_ok"] = certification_ok;
  doc["meta"]["duration_ms"] = watch.elapsed_ms();
  qx::write_atomic(resolve_output(out_path, "arealaw.json"),
                   qx::json_dump(doc));
  qx::write_atomic(resolve_output(csv_path, "arealaw.csv"), csv.str());
  return certification_ok ? kExitOk : kExitCertification;
}

int run_c2h_kitaev(const std::vector<int>& Ts, int D,
                   const std::string& circuit_file, const std::string& mode,
                   const std::string& out_path) {
  Stopwatch watch;
  const qx::EigMode em = mode_from(mode);

  std::vector<Json> rows = pooled(Ts, [&](int T) {
    qx::CircuitSpec c;
    if (!circuit_file.empty()) {
      c = qx::circuit_from_json(qx::load_json_file(circuit_file));
      c.padded_length = std::max(T, c.tau());
    } else {
      c = qx::CircuitSpec{D, 0, {}, T};
    }
    const qx::HamiltonianSpec kit = qx::build_kitaev(c);
    const int want = std::min<std::int64_t>(kit.dim(), 3 * D + 2);
    qx::EigResult eig = qx::hermitian_eigs(kit.matvec(), kit.dim(), want, em);
    const double tol = qx::degeneracy_tol(kit.norm_upper_bound());
    double gap = 0.0;
    for (int i = 1; i < eig.eigenvalues.size(); ++i)
      if (eig.eigenvalues(i) - eig.eigenvalues(0) > tol) {
        gap = eig.eigenvalues(i) - eig.eigenvalues(0);
        break;
      }
    return Json{{"T", T},
                {"E0", eig.eigenvalues(0)},
                {"gap", gap},
                {"dim", kit.dim()}};
  });

  std::vector<double> ts, gaps;
  bool frustration_free = true;
  for (const auto& row : rows) {
    ts.push_back(row["T"].get<double>());
    gaps.push_back(row["gap"].get<double>());
    frustration_free = frustration_free && row["E0"].get<double>() <= 1e-10;
  }
  Json doc;
  Json config{{"command", "c2h kitaev"}, {"T", Ts}, {"D", D},
              {"circuit", circuit_file}, {"mode", mode}};
  doc["meta"] = make_meta(config, {});
  doc["rows"] = rows;
  if (ts.size() >= 2) doc["loglog_slope"] = qx::loglog_slope(ts, gaps);
  doc["frustration_free"] = frustration_free;
  doc["meta"]["duration_ms"] = watch.elapsed_ms();
  qx::write_atomic(resolve_output(out_path, "c2h_kitaev.json"),
                   qx::json_dump(doc));
  return frustration_free ? kExitOk : kExitCertification;
}

int run_c2h_hprime(int D, int T, std::uint64_t seed, const std::string& mode,
                   const std::string& out_path) {
  Stopwatch watch;
  const qx::EigMode em = mode_from(mode);
  qx::CertifiedEnsemble ce = qx::certified_d3_ensemble(D, seed, em);
  const qx::HamiltonianSpec h = qx::build_hprime_lmr(ce.ensemble, T);
  qx::EigResult eig = qx::hermitian_eigs(h.matvec(), h.dim(), 2, em);
  qx::RegisteredState ground(h.registers(), eig.eigenvectors.col(0), true);
  const double entropy =
      qx::entanglement_entropy(ground, qx::hprime_left_cut());
  const double gap = eig.eigenvalues(1) - eig.eigenvalues(0);
  const bool ok = eig.eigenvalues(0) <= 2.0 / T + 1e-9 &&
                  gap >= 0.5 * ce.report.c / 4.0 && entropy >= 0.9;
  Json config{{"command", "c2h hprime"}, {"D", D},       {"T", T},
              {"seed", seed},            {"mode", mode}};
  Json doc;
  doc["meta"] = make_meta(config, seed);
  doc["lambda"] = ce.report.lambda;
  doc["c"] = ce.report.c;
  doc["chosen_seed"] = ce.chosen_seed;
  doc["dim"] = h.dim();
  doc["E0"] = eig.eigenvalues(0);
  doc["gap"] = gap;
  doc["entropy_bits_mid_cut"] = entropy;
  doc["certification_ok"] = ok;
  doc["meta"]["duration_ms"] = watch.elapsed_ms();
  qx::write_atomic(resolve_output(out_path, "c2h_hprime.json"),
                   qx::json_dump(doc));
  return ok ? kExitOk : kExitCertification;
}

int run_c2h_twoclock(int d, int D, std::uint64_t seed,
                     const std::string& kind, const std::string& mode,
                     const std::string& out_path) {
  Stopwatch watch;
  const qx::UnitaryEnsemble e = make_ensemble(kind, D, d, seed);
  const qx::TwoClock tc = qx::build_two_clock(e);
  const qx::TwoClockReport rep = qx::certify_two_clock(tc, mode_from(mode));
  const double expected = std::log2(double(e.d) * double(D));
  const bool ok = rep.ground_energy <= 1e-10 && rep.ground_degeneracy == 1 &&
                  rep.history_residual <= 1e-10 &&
                  rep.schmidt_rank == e.d * D &&
                  std::abs(rep.entropy_bits - expected) <= 1e-8;
  Json config{{"command", "c2h twoclock"}, {"d", e.d},     {"D", D},
              {"kind", kind},              {"seed", seed}, {"mode", mode}};
  Json doc;
  doc["meta"] = make_meta(config, seed);
  doc["E0"] = rep.ground_energy;
  doc["gap"] = rep.gap;
  doc["ground_degeneracy"] = rep.ground_degeneracy;
  doc["history_residual"] = rep.history_residual;
  doc["schmidt_rank"] = rep.schmidt_rank;
  doc["entropy_bits"] = rep.entropy_bits;
  doc["entropy_expected"] = expected;
  doc["certification_ok"] = ok;
  doc["meta"]["duration_ms"] = watch.elapsed_ms();
  qx::write_atomic(resolve_output(out_path, "c2h_twoclock.json"),
                   qx::json_dump(doc));
  return ok ? kExitOk : kExitCertification;
}

int run_c2h_entropy_bound(double eps, int D, const std::string& out_path) {
  Stopwatch watch;
  const qx::EntropyBound b = qx::entropy_lower_bound(eps, D);
  Json config{{"command", "c2h entropy-bound"}, {"eps", eps}, {"D", D}};
  Json doc;
  doc["meta"] = make_meta(config, {});
  doc["bound"] = qx::entropy_bound_to_json(b);
  doc["meta"]["duration_ms"] = watch.elapsed_ms();
  qx::write_atomic(resolve_output(out_path, "c2h_entropy_bound.json"),
                   qx::json_dump(doc));
  return kExitOk;
}

// Tolerant config lookups: the one config file seeds the defaults of
// every subcommand, so a key typed for one command must not break the
// others.
template <typename T>
T cfg_get(const Json& cfg, const std::string& key, T fallback) {
  if (!cfg.contains(key)) return fallback;
  try {
    return cfg.at(key).get<T>();
  } catch (const Json::exception&) {
    return fallback;
  }
}

std::vector<int> cfg_get_list(const Json& cfg, const std::string& key,
                              std::vector<int> fallback) {
  if (!cfg.contains(key)) return fallback;
  const Json& v = cfg.at(key);
  if (v.is_number_integer()) return {v.get<int>()};
  try {
    return v.get<std::vector<int>>();
  } catch (const Json::exception&) {
    return fallback;
  }
}

// Config file (JSON mirroring the flags) is applied as defaults before
// parsing, so explicit flags override it.
Json load_config(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--config")
      return qx::load_json_file(argv[i + 1]);
  return Json::object();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"desk-scale entanglement laboratory"};
  app.require_subcommand(1);

  Json cfg;
  try {
    cfg = load_config(argc, argv);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitInvalid;
  }
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file (flags override)");

  // expander
  auto* cmd_exp = app.add_subcommand("expander", "measure ensemble quality");
  std::string exp_kind = cfg_get(cfg, "kind", std::string("haar-with-identity"));
  int exp_D = cfg_get(cfg, "D", 4), exp_d = cfg_get(cfg, "d", 3);
  int exp_n = cfg_get(cfg, "n", 0);
  std::uint64_t exp_seed = cfg_get(cfg, "seed", std::uint64_t(1));
  std::string exp_mode = cfg_get(cfg, "mode", std::string("dense"));
  std::string exp_out = cfg_get(cfg, "output", std::string());
  cmd_exp->add_option("--kind", exp_kind);
  cmd_exp->add_option("--D", exp_D);
  cmd_exp->add_option("--n", exp_n, "for margulis: D = n^2");
  cmd_exp->add_option("--d", exp_d);
  cmd_exp->add_option("--seed", exp_seed);
  cmd_exp->add_option("--mode", exp_mode)
      ->check(CLI::IsMember({"dense", "iterative"}));
  cmd_exp->add_option("--output,-o", exp_out);

  // eprtest
  auto* cmd_epr = app.add_subcommand("eprtest", "run a tester protocol");
  std::string epr_variant = cfg_get(cfg, "variant", std::string("basic"));
  std::string epr_kind = cfg_get(cfg, "kind", std::string("haar"));
  int epr_D = cfg_get(cfg, "D", 4), epr_d = cfg_get(cfg, "d", 4);
  int epr_n = cfg_get(cfg, "n", 0);
  int epr_k = cfg_get(cfg, "k", 1);
  std::uint64_t epr_seed = cfg_get(cfg, "seed", std::uint64_t(1));
  std::vector<std::string> epr_states;
  if (cfg.contains("states"))
    epr_states = cfg["states"].get<std::vector<std::string>>();
  std::string epr_out = cfg_get(cfg, "output", std::string());
  cmd_epr->add_option("--variant", epr_variant)
      ->check(CLI::IsMember(
          {"basic", "iterated", "two-ancilla", "shared-randomness"}));
  cmd_epr->add_option("--kind", epr_kind);
  cmd_epr->add_option("--D", epr_D);
  cmd_epr->add_option("--n", epr_n, "for margulis: D = n^2");
  cmd_epr->add_option("--d", epr_d);
  cmd_epr->add_option("--k", epr_k, "iterations");
  cmd_epr->add_option("--seed", epr_seed);
  cmd_epr->add_option("--state", epr_states, "state vector JSON file(s)");
  cmd_epr->add_option("--output,-o", epr_out);

  // arealaw
  auto* cmd_area = app.add_subcommand("arealaw", "four-particle Hamiltonian");
  std::vector<int> area_Ds = cfg_get_list(cfg, "D", {2, 4, 8});
  std::uint64_t area_seed = cfg_get(cfg, "seed", std::uint64_t(7));
  std::string area_mode = cfg_get(cfg, "mode", std::string("dense"));
  bool area_identity = cfg_get(cfg, "identity_ensemble", false);
  std::string area_out = cfg_get(cfg, "output", std::string());
  std::string area_csv = cfg_get(cfg, "csv", std::string());
  cmd_area->add_option("--D", area_Ds)->delimiter(',');
  cmd_area->add_option("--seed", area_seed);
  cmd_area->add_option("--mode", area_mode)
      ->check(CLI::IsMember({"dense", "iterative"}));
  cmd_area->add_flag("--identity-ensemble", area_identity,
                     "degenerate control: all members identity");
  cmd_area->add_option("--output,-o", area_out);
  cmd_area->add_option("--csv", area_csv);

  // c2h
  auto* cmd_c2h = app.add_subcommand("c2h", "clock-register constructions");
  cmd_c2h->require_subcommand(1);
  auto* c2h_kitaev = cmd_c2h->add_subcommand("kitaev", "gap-vs-T sweep");
  std::vector<int> kit_Ts = cfg_get_list(cfg, "T", {4, 8, 16, 32});
  int kit_D = cfg_get(cfg, "D", 1);
  std::string kit_circuit = cfg_get(cfg, "circuit", std::string());
  std::string kit_mode = cfg_get(cfg, "mode", std::string("dense"));
  std::string kit_out = cfg_get(cfg, "output", std::string());
  c2h_kitaev->add_option("--T", kit_Ts)->delimiter(',');
  c2h_kitaev->add_option("--D", kit_D);
  c2h_kitaev->add_option("--circuit", kit_circuit, "circuit JSON file");
  c2h_kitaev->add_option("--mode", kit_mode)
      ->check(CLI::IsMember({"dense", "iterative"}));
  c2h_kitaev->add_option("--output,-o", kit_out);

  auto* c2h_hprime = cmd_c2h->add_subcommand("hprime", "two-sided rescaled");
  int hp_D = cfg_get(cfg, "D", 2), hp_T = cfg_get(cfg, "T", 7);
  std::uint64_t hp_seed = cfg_get(cfg, "seed", std::uint64_t(10));
  std::string hp_mode = cfg_get(cfg, "mode", std::string("dense"));
  std::string hp_out = cfg_get(cfg, "output", std::string());
  c2h_hprime->add_option("--D", hp_D);
  c2h_hprime->add_option("--T", hp_T);
  c2h_hprime->add_option("--seed", hp_seed);
  c2h_hprime->add_option("--mode", hp_mode)
      ->check(CLI::IsMember({"dense", "iterative"}));
  c2h_hprime->add_option("--output,-o", hp_out);

  auto* c2h_two = cmd_c2h->add_subcommand("twoclock", "two-clock protocol");
  int tw_d = cfg_get(cfg, "d", 3), tw_D = cfg_get(cfg, "D", 4);
  std::uint64_t tw_seed = cfg_get(cfg, "seed", std::uint64_t(7));
  std::string tw_kind = cfg_get(cfg, "kind", std::string("haar-with-identity"));
  std::string tw_mode = cfg_get(cfg, "mode", std::string("dense"));
  std::string tw_out = cfg_get(cfg, "output", std::string());
  c2h_two->add_option("--d", tw_d);
  c2h_two->add_option("--D", tw_D);
  c2h_two->add_option("--seed", tw_seed);
  c2h_two->add_option("--kind", tw_kind);
  c2h_two->add_option("--mode", tw_mode)
      ->check(CLI::IsMember({"dense", "iterative"}));
  c2h_two->add_option("--output,-o", tw_out);

  auto* c2h_eb = cmd_c2h->add_subcommand("entropy-bound", "fidelity bound");
  double eb_eps = cfg_get(cfg, "eps", 0.0);
  int eb_D = cfg_get(cfg, "D", 16);
  std::string eb_out = cfg_get(cfg, "output", std::string());
  c2h_eb->add_option("--eps", eb_eps);
  c2h_eb->add_option("--D", eb_D);
  c2h_eb->add_option("--output,-o", eb_out);

  // let --config (defined on the root) be accepted after a subcommand
  for (auto* sub : {cmd_exp, cmd_epr, cmd_area, cmd_c2h, c2h_kitaev,
                    c2h_hprime, c2h_two, c2h_eb})
    sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cmd_exp) {
      if (cmd_exp->count("--n") && exp_n < 2)
        throw qx::ParameterError("--n must be >= 2");
      if (exp_n > 0) exp_D = exp_n * exp_n;
      return run_expander(exp_kind, exp_D, exp_d, exp_seed, exp_mode, exp_out);
    }
    if (*cmd_epr) {
      if (cmd_epr->count("--n") && epr_n < 2)
        throw qx::ParameterError("--n must be >= 2");
      if (epr_n > 0) epr_D = epr_n * epr_n;
      if (epr_variant == "shared-randomness" && !cmd_epr->count("--kind") &&
          !cfg.contains("kind"))
        epr_kind = "margulis";
      return run_eprtest(epr_variant, epr_kind, epr_D, epr_d, epr_seed, epr_k,
                         epr_states, epr_out);
    }
    if (*cmd_area)
      return run_arealaw(area_Ds, area_seed, area_mode, area_identity,
                         area_out, area_csv);
    if (*c2h_kitaev)
      return run_c2h_kitaev(kit_Ts, kit_D, kit_circuit, kit_mode, kit_out);
    if (*c2h_hprime)
      return run_c2h_hprime(hp_D, hp_T, hp_seed, hp_mode, hp_out);
    if (*c2h_two)
      return run_c2h_twoclock(tw_d, tw_D, tw_seed, tw_kind, tw_mode, tw_out);
    if (*c2h_eb) return run_c2h_entropy_bound(eb_eps, eb_D, eb_out);
  } catch (const qx::ConvergenceError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitConvergence;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitInvalid;
  }
  return kExitInvalid;
}
