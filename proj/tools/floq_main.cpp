#include <iostream>
#include <random>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "floq/cli_config.hpp"
#include "floq/designcheck.hpp"
#include "floq/ergodicity.hpp"
#include "floq/oracle.hpp"
#include "floq/report.hpp"
#include "floq/version.hpp"
#include "floq/walls.hpp"

using namespace floq;
using nlohmann::json;

namespace {

json base_report(const RunConfig& cfg) {
  json j;
  j["schema"] = kSchemaVersion;
  j["version"] = kVersion;
  j["seed"] = cfg.seed;
  j["streams"] = cfg.streams;
  return j;
}

void emit(const RunConfig& cfg, const json& j) {
  write_artifact(cfg.out, j.dump(2) + "\n");
}

int finish(const RunConfig& cfg, bool pass) {
  return cfg.assert_mode && !pass ? 1 : 0;
}

void resolve_seed(RunConfig& cfg) {
  if (!cfg.seed_given) {
    std::random_device rd;
    cfg.seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }
  std::cerr << "seed: " << cfg.seed << " streams: " << cfg.streams << "\n";
}

json ergodicity_json(const ErgodicityReport& rep) {
  return json::parse(rep.to_json());
}

int run_sample(RunConfig& cfg, std::size_t n, unsigned count,
               const std::string& rank_block) {
  resolve_seed(cfg);
  if (!rank_block.empty()) {
    Block which = Block::C;
    if (rank_block == "A") which = Block::A;
    else if (rank_block == "B") which = Block::B;
    else if (rank_block == "D") which = Block::D;
    else if (rank_block != "C")
      throw CLI::ValidationError("sample: --rank-histogram wants A|B|C|D");
    const RankHistogram h = block_rank_histogram(n, which, cfg.mc());
    write_artifact(cfg.out, rank_histogram_csv(h));
    return 0;
  }
  Rng rng(cfg.seed);
  std::string out;
  for (unsigned i = 0; i < count; ++i)
    out += sample_uniform(n, rng).matrix().to_text();
  write_artifact(cfg.out, out);
  return 0;
}

int run_order(RunConfig& cfg, std::size_t n, bool subspaces, std::size_t k) {
  json j = base_report(cfg);
  if (subspaces) {
    j["experiment"] = "subspace_count";
    j["n"] = n;
    j["k"] = k;
    j["count"] = count_subspaces(n, k).str();
  } else {
    j["experiment"] = "group_order";
    j["n"] = n;
    j["order"] = group_order(n).str();
    j["bound_window_ok"] = group_order_in_bound_window(n);
  }
  emit(cfg, j);
  return 0;
}

int run_evolve(RunConfig& cfg, const std::string& realization_out) {
  resolve_seed(cfg);
  const ChainGeometry geo(cfg.L, cfg.N);
  Rng rng(cfg.seed);
  const DisorderRealization r = build_disorder(geo, rng);
  if (!realization_out.empty())
    write_artifact(realization_out, r.to_json(cfg.seed));
  PhaseVector u = parse_initial(geo, cfg.initial);
  json j = base_report(cfg);
  j["experiment"] = "evolve";
  j["L"] = cfg.L;
  j["N"] = cfg.N;
  j["t2"] = cfg.t.t2;
  j["initial"] = pauli_string(u);
  auto steps = json::array();
  for (std::uint64_t t2 = 0; t2 <= cfg.t.t2; ++t2) {
    json row;
    row["t2"] = t2;
    row["pauli"] = pauli_string(u);
    row["hex"] = key_hex(key_of(u.bits()), static_cast<unsigned>(geo.dim()));
    steps.push_back(row);
    if (t2 < cfg.t.t2)
      apply_half_step(r, t2 % 2 == 0 ? Parity::Even : Parity::Odd, u);
  }
  j["steps"] = std::move(steps);
  emit(cfg, j);
  return 0;
}

int run_ergo(RunConfig& cfg, const std::string& which, std::size_t x0,
             std::size_t ls, const std::string& window_spec,
             std::uint64_t dressing_seed, const std::string& statistic,
             const std::string& histogram_out) {
  resolve_seed(cfg);
  const ChainGeometry geo(cfg.L, cfg.N);
  std::optional<std::vector<std::size_t>> window;
  if (!window_spec.empty()) window = parse_site_list(window_spec);

  const auto dump_histogram = [&](const PhaseVector& u0) {
    if (histogram_out.empty()) return;
    write_artifact(histogram_out,
                   histogram_csv(transition_histogram(u0, cfg.t, geo,
                                                      cfg.mc(), window)));
  };

  if (which == "weak") {
    const ErgodicityReport rep =
        weak_ergodicity_check(x0, cfg.t, geo, cfg.mc(), window);
    dump_histogram(local_seed(geo, x0));
    emit(cfg, ergodicity_json(rep));
    return finish(cfg, rep.pass);
  }
  if (which == "half") {
    const PhaseVector u0 = parse_initial(geo, cfg.initial);
    const ErgodicityReport rep =
        halfinteger_ergodicity_check(u0, cfg.t, geo, cfg.mc(), window);
    dump_histogram(u0);
    emit(cfg, ergodicity_json(rep));
    return finish(cfg, rep.pass);
  }
  if (which == "subsystem") {
    const ErgodicityReport rep = subsystem_check(ls, cfg.t, geo, cfg.mc());
    emit(cfg, ergodicity_json(rep));
    return finish(cfg, rep.pass);
  }
  if (which == "phases") {
    const PhaseStats stats = phase_statistics(ls, cfg.t, geo, cfg.mc());
    json j = base_report(cfg);
    j["experiment"] = "phase_statistics";
    j["L"] = cfg.L;
    j["N"] = cfg.N;
    j["t2"] = cfg.t.t2;
    j["Ls"] = ls;
    j["samples"] = cfg.samples;
    j["max_probability"] = stats.max_probability;
    j["bound"] = stats.bound;
    j["pass"] = stats.pass;
    auto bins = json::object();
    for (const auto& [k, v] : stats.counts) bins[std::to_string(k)] = v;
    j["counts"] = std::move(bins);
    emit(cfg, j);
    return finish(cfg, stats.pass);
  }
  if (which == "zeros") {
    const SeedClass cls =
        cfg.initial == "full" ? SeedClass::FullSupport : SeedClass::Local;
    const ZeroSiteStats stats =
        zero_site_stats(cls, x0, cfg.t, geo, cfg.mc());
    bool pass = true;
    for (const auto& row : stats.rows) pass = pass && row.pass;
    if (cfg.format == "csv") {
      write_artifact(cfg.out, stats.to_csv());
    } else {
      json j = base_report(cfg);
      j["experiment"] = "zero_site_stats";
      j["L"] = cfg.L;
      j["N"] = cfg.N;
      j["t2"] = cfg.t.t2;
      j["samples"] = cfg.samples;
      auto rows = json::array();
      for (const auto& row : stats.rows) {
        json rj;
        rj["site"] = row.site;
        rj["zero_count"] = row.zero_count;
        rj["frequency"] = row.frequency;
        if (row.has_bound) {
          rj["bound"] = row.bound;
          rj["pass"] = row.pass;
        }
        rows.push_back(rj);
      }
      j["rows"] = std::move(rows);
      j["pass"] = pass;
      emit(cfg, j);
    }
    return finish(cfg, pass);
  }
  if (which == "twirl") {
    Rng drng(dressing_seed);
    std::vector<SymplecticMatrix> left, right;
    for (std::size_t x = 0; x < geo.L; ++x) {
      left.push_back(sample_uniform(geo.N, drng));
      right.push_back(sample_uniform(geo.N, drng));
    }
    const TwirlStatistic stat = statistic == "zeros"
                                    ? TwirlStatistic::ZeroSiteTable
                                    : TwirlStatistic::TransitionWindow;
    const TwirlReport rep =
        twirl_invariance_test(stat, cfg.t, geo, cfg.mc(), left, right);
    json j = base_report(cfg);
    j["experiment"] = "twirl_invariance";
    j["L"] = cfg.L;
    j["N"] = cfg.N;
    j["t2"] = cfg.t.t2;
    j["statistic"] = statistic;
    j["dressing_seed"] = dressing_seed;
    j["bins"] = rep.bins;
    j["max_z"] = rep.max_z;
    j["pass"] = rep.pass;
    emit(cfg, j);
    return finish(cfg, rep.pass);
  }
  throw CLI::ValidationError("ergo: unknown check '" + which + "'");
}

int run_walls_scan(RunConfig& cfg) {
  resolve_seed(cfg);
  const ChainGeometry geo(cfg.L, cfg.N);
  Rng rng(cfg.seed);
  const DisorderRealization r = build_disorder(geo, rng);
  const auto walls = scan_chain(r);
  json j = base_report(cfg);
  j["experiment"] = "wall_scan";
  j["L"] = cfg.L;
  j["N"] = cfg.N;
  auto arr = json::array();
  for (const auto& w : walls) {
    json wj;
    wj["position"] = w.position;
    wj["side"] = w.side == WallReport::Side::Right ? "right" : "left";
    wj["penetration"] = w.penetration;
    wj["detected_by"] = w.detected_by;
    arr.push_back(wj);
  }
  j["walls"] = std::move(arr);
  emit(cfg, j);
  return 0;
}

int run_walls_prob(RunConfig& cfg, std::size_t n, bool exact) {
  json j = base_report(cfg);
  j["experiment"] = "wall_probability";
  j["N"] = n;
  bool pass = true;
  if (exact) {
    if (n != 1)
      throw CLI::ValidationError("walls prob --exact: only N = 1");
    const oracle::Rational r = exact_wall_probability_n1();
    j["exact_numerator"] = r.num;
    j["exact_denominator"] = r.den;
    j["value"] = static_cast<double>(r.value());
    const bool rounds = round_two_decimals(r) == 12;
    j["rounds_to_0.12"] = rounds;
    pass = rounds;
  } else {
    resolve_seed(cfg);
    const WallProbabilityReport rep = wall_probability(n, cfg.mc());
    j["samples"] = rep.samples;
    j["hits"] = rep.hits;
    j["frequency"] = rep.frequency;
    j["bound"] = rep.bound;
    j["pass"] = rep.pass;
    pass = rep.pass;
  }
  emit(cfg, j);
  return finish(cfg, pass);
}

int run_walls_lightcone(RunConfig& cfg, std::uint64_t t2max) {
  resolve_seed(cfg);
  const ChainGeometry geo(cfg.L, cfg.N);
  Rng rng(cfg.seed);
  const DisorderRealization r = build_disorder(geo, rng);
  const PhaseVector u0 = parse_initial(geo, cfg.initial);
  const LightconeGrid grid = lightcone_grid(r, u0, t2max);
  if (cfg.format == "pgm")
    write_artifact(cfg.out, lightcone_pgm(grid));
  else if (cfg.format == "csv")
    write_artifact(cfg.out, extents_csv(grid));
  else
    write_artifact(cfg.out, lightcone_svg(grid, scan_chain(r)));
  return 0;
}

int run_walls_fixture(RunConfig& cfg) {
  const auto [s0, s1] = counterexample_fixture();
  const BlockView b0 = blocks(s0);
  const BlockView b1 = blocks(s1);
  const BitMatrix da = b0.d * b1.a;
  json j = base_report(cfg);
  j["experiment"] = "counterexample_fixture";
  j["S0"] = s0.matrix().to_text();
  j["S1"] = s1.matrix().to_text();
  j["symplectic"] = true;  // construction validates
  j["C1C0_zero"] = (b1.c * b0.c).is_zero();
  j["C1D0A1C0_zero"] = (b1.c * b0.d * b1.a * b0.c).is_zero();
  j["C1(D0A1)^2C0_nonzero"] = !(b1.c * da * da * b0.c).is_zero();
  j["(D0A1)^2_is_J4"] = (da * da == SymplecticForm(2).matrix());
  j["(D0A1)^4_is_identity"] = (da.pow(4) == BitMatrix::identity(4));
  const bool pass = j["C1C0_zero"].get<bool>() &&
                    j["C1D0A1C0_zero"].get<bool>() &&
                    j["C1(D0A1)^2C0_nonzero"].get<bool>() &&
                    j["(D0A1)^2_is_J4"].get<bool>() &&
                    j["(D0A1)^4_is_identity"].get<bool>();
  j["pass"] = pass;
  emit(cfg, j);
  return finish(cfg, pass);
}

int run_design(RunConfig& cfg, bool exact) {
  resolve_seed(cfg);
  const ChainGeometry geo(cfg.L, cfg.N);
  const DesignReport rep = advantage_estimate(
      geo, cfg.t, default_design_inputs(geo), exact, cfg.mc());
  json j = json::parse(rep.to_json());
  emit(cfg, j);
  return finish(cfg, rep.pass);
}

int run_oracle(RunConfig& cfg, unsigned initial) {
  const unsigned t2 = static_cast<unsigned>(cfg.t.t2 ? cfg.t.t2 : 3);
  const auto table =
      oracle::exact_transitions(static_cast<std::uint8_t>(initial), t2);
  json j = base_report(cfg);
  j["experiment"] = "oracle_enumeration";
  j["L"] = 2;
  j["N"] = 1;
  j["t2"] = t2;
  j["initial"] = initial;
  j["pairs"] = table.total;
  auto counts = json::array();
  for (unsigned v = 0; v < 16; ++v) counts.push_back(table.at_t2(t2)[v]);
  j["counts"] = std::move(counts);
  const auto l1 = oracle::exact_l1_to_uniform(table.at_t2(t2), table.total);
  j["l1_to_uniform"] = {{"num", l1.num}, {"den", l1.den},
                        {"value", static_cast<double>(l1.value())}};
  emit(cfg, j);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Floquet random Clifford chains in binary symplectic phase "
               "space: simulator and statistical test harness"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string time_spec = "0";
  unsigned count = 1;
  std::size_t group_n = 1, sub_k = 0, x0 = 0, ls = 2;
  bool subspaces = false, exact = false;
  std::string window_spec, statistic = "window", which;
  std::string rank_block, realization_out, histogram_out;
  std::uint64_t t2max = 32, dressing_seed = 1;

  const auto add_common = [&](CLI::App* sub, bool with_geometry = true) {
    if (with_geometry) {
      sub->add_option("--L", cfg.L, "even site count");
      sub->add_option("--N", cfg.N, "modes per site");
    }
    sub->add_option("--samples", cfg.samples, "Monte-Carlo samples");
    sub->add_option("--seed", cfg.seed, "base RNG seed")
        ->each([&](const std::string&) { cfg.seed_given = true; });
    sub->add_option("--streams", cfg.streams, "RNG streams");
    sub->add_option("--out", cfg.out, "output path or - for stdout");
    sub->add_option("--format", cfg.format, "json|csv|svg|pgm");
    sub->add_flag("--assert", cfg.assert_mode,
                  "exit 1 if a paper-bound check fails");
  };

  auto* sample = app.add_subcommand("sample", "sample symplectic matrices");
  sample->add_option("--n", group_n, "mode pairs")->required();
  sample->add_option("--count", count, "number of samples");
  sample->add_option("--rank-histogram", rank_block,
                     "emit the block rank CSV for block A|B|C|D instead");
  add_common(sample, false);

  auto* order = app.add_subcommand("order", "group order / subspace counts");
  order->add_option("--n", group_n)->required();
  order->add_flag("--subspaces", subspaces, "count k-subspaces of Z_2^n");
  order->add_option("--k", sub_k, "subspace dimension");
  add_common(order, false);

  auto* evolve_cmd = app.add_subcommand("evolve", "single trajectory dump");
  evolve_cmd->add_option("--t", time_spec, "time: 5/2, 2.5 or t2=5");
  evolve_cmd->add_option("--initial", cfg.initial,
                         "full | local:x | Pauli string");
  evolve_cmd->add_option("--realization-out", realization_out,
                         "also write the gate list as JSON");
  add_common(evolve_cmd);

  auto* ergo = app.add_subcommand("ergo", "ergodicity experiments");
  ergo->add_option("check", which, "weak|half|subsystem|phases|zeros|twirl")
      ->required();
  ergo->add_option("--t", time_spec, "time");
  ergo->add_option("--x0", x0, "seed site");
  ergo->add_option("--ls", ls, "region length");
  ergo->add_option("--window", window_spec, "restrict to sites, e.g. 0,1");
  ergo->add_option("--initial", cfg.initial, "full | local:x | Pauli string");
  ergo->add_option("--statistic", statistic, "window|zeros (twirl)");
  ergo->add_option("--dressing-seed", dressing_seed, "twirl dressing seed");
  ergo->add_option("--histogram-out", histogram_out,
                   "also write the outcome histogram CSV (weak/half)");
  add_common(ergo);

  auto* walls = app.add_subcommand("walls", "localisation experiments");
  walls->require_subcommand(1);
  auto* wscan = walls->add_subcommand("scan", "scan a realization for walls");
  add_common(wscan);
  auto* wprob = walls->add_subcommand("prob", "wall probability");
  wprob->add_option("--n", group_n, "modes per site N");
  wprob->add_flag("--exact", exact, "exact enumeration (N = 1)");
  add_common(wprob, false);
  auto* wlight = walls->add_subcommand("lightcone", "render a lightcone");
  wlight->add_option("--t2max", t2max, "half steps to render");
  wlight->add_option("--initial", cfg.initial);
  add_common(wlight);
  auto* wfix = walls->add_subcommand("fixture", "the 8x8 non-wall pair");
  add_common(wfix, false);

  auto* design = app.add_subcommand("design", "pseudo-randomness check");
  design->require_subcommand(1);
  auto* dcheck = design->add_subcommand("check", "Pauli-measurement "
                                                 "distinguishability");
  dcheck->add_option("--t", time_spec, "half-integer time");
  dcheck->add_flag("--exact", exact, "exact enumeration (L=2, N=1)");
  add_common(dcheck);

  auto* oracle_cmd = app.add_subcommand("oracle", "exact enumeration oracle");
  oracle_cmd->require_subcommand(1);
  auto* oenum = oracle_cmd->add_subcommand(
      "enumerate", "exact L=2 N=1 transition distribution");
  oenum->add_option("--t", time_spec, "time");
  unsigned oracle_initial = 1;
  oenum->add_option("--initial-bits", oracle_initial,
                    "4-bit phase-space seed");
  add_common(oenum, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // help/version exit 0, config errors exit 2
  }

  try {
    cfg.t = parse_time(time_spec);
    if (sample->parsed()) return run_sample(cfg, group_n, count, rank_block);
    if (order->parsed()) return run_order(cfg, group_n, subspaces, sub_k);
    if (evolve_cmd->parsed()) return run_evolve(cfg, realization_out);
    if (ergo->parsed())
      return run_ergo(cfg, which, x0, ls, window_spec, dressing_seed,
                      statistic, histogram_out);
    if (walls->parsed()) {
      if (wscan->parsed()) return run_walls_scan(cfg);
      if (wprob->parsed()) return run_walls_prob(cfg, group_n, exact);
      if (wlight->parsed()) return run_walls_lightcone(cfg, t2max);
      if (wfix->parsed()) return run_walls_fixture(cfg);
    }
    if (design->parsed()) return run_design(cfg, exact);
    if (oracle_cmd->parsed()) return run_oracle(cfg, oracle_initial);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
