// Command-line front end: simulate runs, drive the label automata, verify
// conformance, analyze shapes and regimes, and render snapshots.
//
// Exit codes: 0 success, 1 a verification/check failed, 2 usage error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "splitsim/splitsim.hpp"

using namespace splitsim;

namespace {

HInterval parse_h(const std::string& point, const std::string& lo,
                  const std::string& hi) {
  if (!lo.empty() || !hi.empty()) {
    if (lo.empty() || hi.empty())
      throw CLI::ValidationError("--h-lo and --h-hi must be given together");
    return HInterval::half_open(Rational::parse(lo), Rational::parse(hi));
  }
  if (point.empty())
    throw CLI::ValidationError("need --background or --h-lo/--h-hi");
  return HInterval::point(Rational::parse(point));
}

AutomatonSpec automaton_by_name(const std::string& name, int d,
                                const std::string& rules_path) {
  if (!rules_path.empty()) {
    std::ifstream in(rules_path);
    if (!in) throw CLI::ValidationError("cannot read " + rules_path);
    return parse_spec(in);
  }
  if (name == "diamond") return builtin_diamond(d);
  if (name == "square") return builtin_square();
  if (name == "octagon") return builtin_octagon();
  throw CLI::ValidationError("unknown automaton '" + name + "'");
}

LabelMapping mapping_for(const AutomatonSpec& spec) {
  if (spec.name == "diamond") return diamond_mapping(spec);
  if (spec.name == "square") return square_mapping(spec);
  if (spec.name == "octagon") return octagon_mapping(spec);
  throw CLI::ValidationError("no built-in mapping for '" + spec.name + "'");
}

Polygon polygon_by_name(const std::string& name) {
  if (name == "diamond") return diamond_polygon();
  if (name == "square") return square_polygon();
  if (name == "octagon") return octagon_polygon();
  throw CLI::ValidationError("unknown target shape '" + name + "'");
}

std::vector<Rational> parse_list(const std::string& csv) {
  std::vector<Rational> out;
  std::string cur;
  std::istringstream in(csv);
  while (std::getline(in, cur, ','))
    if (!cur.empty()) out.push_back(Rational::parse(cur));
  return out;
}

// Relative output paths land in $SPLITSIM_OUT_DIR when it is set.
std::string out_path(const std::string& path) {
  if (path.empty() || path[0] == '/') return path;
  const char* dir = std::getenv("SPLITSIM_OUT_DIR");
  if (!dir || !*dir) return path;
  std::string full(dir);
  if (full.back() != '/') full += '/';
  return full + path;
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(out_path(path));
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << contents;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"splitsim: exact simulator and shape analyzer for the "
               "mass-splitting growth model"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print help");
  argv = app.ensure_utf8(argv);

  // ---- simulate ----
  auto* sim = app.add_subcommand("simulate", "run the splitting model");
  int sim_d = 1;
  std::string sim_n = "4", sim_h, sim_hlo, sim_hhi, sim_order = "parallel";
  long long sim_steps = 1000000, sim_radius = 100000;
  std::string sim_snapshot, sim_trace;
  bool sim_no_certify = false, sim_no_odometer = false, sim_fixed = false;
  sim->add_option("-d,--dim", sim_d, "dimension (1..4)");
  sim->add_option("-n,--mass", sim_n, "initial mass at the origin (affine in h)");
  sim->add_option("-h,--background", sim_h, "background mass (rational)");
  sim->add_option("--h-lo", sim_hlo, "interval run: lower background");
  sim->add_option("--h-hi", sim_hhi, "interval run: upper background (excluded)");
  sim->add_option("--order", sim_order, "parallel | lexmin | random:SEED");
  sim->add_option("--steps", sim_steps, "step budget");
  sim->add_option("--radius", sim_radius, "sup-norm radius budget");
  sim->add_option("--snapshot", sim_snapshot, "write final snapshot here");
  sim->add_option("--trace", sim_trace, "write per-step CSV trace here");
  std::string sim_toppled;
  sim->add_option("--toppled-out", sim_toppled,
                  "write the toppled set here (one site per line)");
  sim->add_flag("--no-certify", sim_no_certify,
                "simulate even when an explosion certificate applies");
  sim->add_flag("--no-odometer", sim_no_odometer, "skip odometer tracking");
  sim->add_flag("--fixed-point", sim_fixed,
                "certified fixed-point fast path (d=2, dyadic pointwise)");

  // ---- ca ----
  auto* ca = app.add_subcommand("ca", "run a label automaton");
  std::string ca_name = "diamond", ca_rules, ca_render, ca_labels, ca_dump;
  int ca_d = 2, ca_pixel = 4;
  long long ca_steps = 30;
  ca->add_option("--automaton", ca_name, "diamond | square | octagon");
  ca->add_option("--rules", ca_rules, "load the automaton from a rule file");
  ca->add_option("-d,--dim", ca_d, "dimension (diamond only)");
  ca->add_option("--steps", ca_steps, "number of parallel updates");
  ca->add_option("--render", ca_render, "write a plain PPM image here");
  ca->add_option("--pixel", ca_pixel, "pixel block size for rendering");
  ca->add_option("--labels-out", ca_labels, "write 'x y label' lines here");
  ca->add_option("--rules-out", ca_dump, "serialize the automaton here");

  // ---- verify ----
  auto* ver = app.add_subcommand("verify", "conformance checks");
  std::string ver_name = "diamond", ver_rules_file, ver_n = "3";
  std::string ver_h, ver_hlo, ver_hhi, ver_json, ver_mode = "cosim";
  int ver_d = 2;
  long long ver_tmax = 30, ver_offset = -1;
  int ver_budget = 16;
  ver->add_option("--automaton", ver_name, "diamond | square | octagon");
  ver->add_option("--rules", ver_rules_file, "rule file instead of a built-in");
  ver->add_option("--mode", ver_mode, "cosim | rules | both");
  ver->add_option("-d,--dim", ver_d, "dimension (diamond only)");
  ver->add_option("--n", ver_n, "initial mass (affine in h)");
  ver->add_option("-h,--background", ver_h, "pointwise background");
  ver->add_option("--h-lo", ver_hlo, "interval lower end");
  ver->add_option("--h-hi", ver_hhi, "interval upper end (excluded)");
  ver->add_option("--t-max", ver_tmax, "number of lockstep steps");
  ver->add_option("--offset", ver_offset,
                  "splitting-run head start (default per automaton)");
  ver->add_option("--bisection-budget", ver_budget, "interval bisection budget");
  ver->add_option("--json", ver_json, "write the full report as JSON here");

  // ---- shape ----
  auto* shp = app.add_subcommand("shape", "limiting-shape and ball checks");
  std::string shp_toppled, shp_target = "diamond", shp_scale = "1/50";
  std::string shp_eps = "1/10", shp_overlay, shp_mode = "polygon";
  std::string shp_n, shp_h = "-1", shp_ball_eps = "1/20";
  shp->add_option("--toppled", shp_toppled,
                  "toppled-set file from simulate --toppled-out")
      ->required();
  shp->add_option("--mode", shp_mode, "polygon | ball");
  shp->add_option("--target", shp_target, "diamond | square | octagon");
  shp->add_option("--scale", shp_scale, "scaling factor f(t), e.g. 1/50");
  shp->add_option("--eps", shp_eps, "tolerance band");
  shp->add_option("--overlay", shp_overlay, "write polygon geometry here");
  shp->add_option("--ball-n", shp_n, "ball mode: the run's initial mass");
  shp->add_option("--ball-h", shp_h, "ball mode: the run's background");
  shp->add_option("--ball-eps", shp_ball_eps, "ball mode: epsilon in c1'");

  // ---- scan ----
  auto* scn = app.add_subcommand("scan", "regime scan over (h, n) grids");
  int scn_d = 2;
  std::string scn_h = "0.4", scn_n = "10", scn_order = "parallel", scn_out;
  long long scn_steps = 2000, scn_radius = 400;
  scn->add_option("-d,--dim", scn_d, "dimension");
  scn->add_option("--h-list", scn_h, "comma-separated backgrounds");
  scn->add_option("--n-list", scn_n, "comma-separated initial masses");
  scn->add_option("--order", scn_order, "splitting order");
  scn->add_option("--max-steps", scn_steps, "per-run step budget");
  scn->add_option("--max-radius", scn_radius, "per-run radius budget");
  scn->add_option("--out", scn_out, "CSV output path (default stdout)");

  // ---- constants ----
  auto* cst = app.add_subcommand("constants", "diagonal-front theory constants");
  int cst_d = 2;
  cst->add_option("-d,--dim", cst_d, "dimension (>= 2)");

  // ---- render ----
  auto* ren = app.add_subcommand("render", "snapshot to plain PPM image");
  std::string ren_snapshot, ren_out = "out.ppm", ren_at_h;
  int ren_pixel = 4;
  ren->add_option("--snapshot", ren_snapshot, "snapshot file")->required();
  ren->add_option("--out", ren_out, "output image path");
  ren->add_option("--at-h", ren_at_h, "evaluate a symbolic snapshot at this h");
  ren->add_option("--pixel", ren_pixel, "pixel block size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // help exits clean, usage errors exit 2
  }

  try {
    if (*sim) {
      HInterval h = parse_h(sim_h, sim_hlo, sim_hhi);
      AffineMass n = AffineMass::parse(sim_n);
      if (sim_fixed) {
        if (sim_d != 2 || !h.is_point())
          throw CLI::ValidationError(
              "--fixed-point needs d=2 and a pointwise background");
        FixedRunResult res =
            run_fixed_parallel_2d(n.eval(h.lo), h.lo, sim_steps, sim_radius);
        std::cout << (res.stabilized ? "stabilized" : "budget-exhausted")
                  << " t=" << res.steps << " |T|=" << res.toppled.size()
                  << " splits=" << res.total_splits
                  << " radius=" << res.radius_linf << "\n";
        return 0;
      }
      auto st = EvolutionState::init(sim_d, n, h,
                                     SplittingOrder::parse(sim_order));
      if (sim_no_odometer) st.set_track_odometer(false);
      if (!sim_trace.empty()) st.set_track_window_mass(true);
      RunOutcome out = st.run(sim_steps, sim_radius, !sim_no_certify);
      switch (out.kind) {
        case RunOutcome::Kind::Stabilized:
          std::cout << "stabilized t=" << st.t() << " |T|=" << st.toppled().size()
                    << "\n";
          break;
        case RunOutcome::Kind::BudgetExhausted:
          std::cout << "budget-exhausted (" << out.exhausted_budget
                    << ") t=" << st.t() << " |T|=" << st.toppled().size() << "\n";
          break;
        case RunOutcome::Kind::CertifiedExplosive:
          std::cout << "certified-explosive (no simulation needed)\n";
          break;
        case RunOutcome::Kind::IntervalSplit:
          std::cout << "interval-split at h=" << out.crossing->crossing.str()
                    << " t=" << out.crossing->t << "\n";
          break;
      }
      if (!sim_snapshot.empty()) save_snapshot(Snapshot::of_state(st), out_path(sim_snapshot));
      if (!sim_trace.empty()) {
        std::ofstream tr(out_path(sim_trace));
        write_trace_csv(st, tr);
      }
      if (!sim_toppled.empty()) {
        std::ofstream tp(out_path(sim_toppled));
        tp << "TOPPLED 1\nd=" << sim_d << "\n";
        for (const Site& s : sorted_sites(st.toppled())) {
          for (int i = 0; i < sim_d; ++i) tp << (i ? " " : "") << s[i];
          tp << "\n";
        }
      }
      return 0;
    }

    if (*ca) {
      AutomatonSpec spec = automaton_by_name(ca_name, ca_d, ca_rules);
      if (!ca_dump.empty()) write_file(ca_dump, serialize_spec(spec));
      CARunner runner(spec);
      runner.run_to(ca_steps);
      const CAState& state = runner.state();
      std::cout << "t=" << state.t << " |G|=" << growth_cluster(state).size()
                << " radius=" << cluster_radius_linf(state) << "\n";
      if (!ca_labels.empty()) {
        std::ofstream out(out_path(ca_labels));
        for (const Site& s : sorted_sites(growth_cluster(state))) {
          for (int i = 0; i < state.d; ++i) out << s[i] << " ";
          out << spec.label_name(state.at(s)) << "\n";
        }
      }
      if (!ca_render.empty()) {
        std::ofstream out(out_path(ca_render));
        render_ca(state, spec, out, ca_pixel);
      }
      return 0;
    }

    if (*ver) {
      AutomatonSpec spec = automaton_by_name(ver_name, ver_d, ver_rules_file);
      LabelMapping mapping = mapping_for(spec);
      bool ok = true;
      nlohmann::json output;
      if (ver_mode == "rules" || ver_mode == "both") {
        auto ledger = rule_arithmetic_ledger(spec, mapping);
        output["rules"] = nlohmann::json::array();
        for (const auto& e : ledger) {
          output["rules"].push_back(to_json(e));
          std::cout << "rule " << e.rule_index + 1 << ": computed "
                    << e.computed.validity.str();
          if (e.kind == RuleCheckKind::MultiStep) {
            std::cout << " (multi-step accumulation bound; checked by cosim)";
          } else if (e.erratum) {
            std::cout << " ERRATUM: printed range " << e.reference.str()
                      << " is inconsistent";
          } else if (!e.matches && e.kind == RuleCheckKind::Arithmetic) {
            std::cout << " MISMATCH: printed range " << e.reference.str();
            ok = false;
          }
          if (e.kind != RuleCheckKind::MultiStep && !e.covers_theorem_interval) {
            std::cout << " (does not cover the theorem interval!)";
            ok = false;
          }
          std::cout << "\n";
        }
      }
      if (ver_mode == "cosim" || ver_mode == "both") {
        HInterval I = ver_h.empty() && ver_hlo.empty() && ver_hhi.empty()
                          ? mapping.validity
                          : parse_h(ver_h, ver_hlo, ver_hhi);
        long long offset =
            ver_offset >= 0 ? ver_offset : (spec.name == "octagon" ? 8 : 0);
        CosimulateOptions opts;
        opts.bisection_budget = ver_budget;
        ConformanceReport report =
            cosimulate(spec, mapping, spec.d, AffineMass::parse(ver_n), I,
                       ver_tmax, offset, opts);
        output["cosimulation"] = to_json(report);
        for (const auto& v : report.verdicts) {
          std::cout << "interval " << v.interval.str() << ": "
                    << (v.status == IntervalVerdict::Status::Success
                            ? "success"
                            : v.status == IntervalVerdict::Status::Violation
                                  ? "VIOLATION"
                                  : "inconclusive")
                    << " (" << v.steps_checked << " steps)";
          if (!v.detail.empty()) std::cout << " " << v.detail;
          std::cout << "\n";
        }
        std::cout << "bisections: " << report.bisections << "\n";
        ok = ok && report.success();
      }
      if (!ver_json.empty()) write_file(ver_json, output.dump(2) + "\n");
      std::cout << (ok ? "PASS" : "FAIL") << "\n";
      return ok ? 0 : 1;
    }

    if (*shp) {
      std::ifstream in(shp_toppled);
      if (!in) throw std::runtime_error("cannot read '" + shp_toppled + "'");
      std::string magic;
      int version = 0, d = 0;
      std::string header;
      in >> magic >> version;
      std::getline(in, header);
      std::getline(in, header);
      if (magic != "TOPPLED" || version != 1 ||
          header.rfind("d=", 0) != 0)
        throw std::runtime_error("not a TOPPLED 1 file");
      d = std::stoi(header.substr(2));
      Region toppled;
      std::string line;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        Site s = Site::origin(d);
        for (int i = 0; i < d; ++i)
          if (!(ls >> s.c[i])) throw std::runtime_error("bad toppled line");
        toppled.insert(s);
      }

      if (shp_mode == "ball") {
        if (shp_n.empty()) throw CLI::ValidationError("ball mode needs --ball-n");
        BallBoundsReport rep =
            ball_bounds_check(toppled, d, Rational::parse(shp_n),
                              Rational::parse(shp_h), Rational::parse(shp_ball_eps));
        std::cout << "r=" << rep.r << " c1=" << rep.c1
                  << " c2_obs=" << rep.c2_obs << " c1p=" << rep.c1p
                  << " c2p_obs=" << rep.c2p_obs << "\n";
        return 0;
      }
      if (d != 2)
        throw CLI::ValidationError("polygon targets need a 2D toppled set");
      Polygon target = polygon_by_name(shp_target);
      Rational scale = Rational::parse(shp_scale);
      Rational eps = Rational::parse(shp_eps);
      ShapeVerdict v = shape_check(toppled, scale, target, eps);
      std::cout << "inner " << (v.inner_ok ? "ok" : "FAIL") << ", outer "
                << (v.outer_ok ? "ok" : "FAIL") << "\n";
      if (!shp_overlay.empty()) {
        std::ofstream out(out_path(shp_overlay));
        write_polygon_overlay(target, scale, eps, out);
      }
      return v.inner_ok && v.outer_ok ? 0 : 1;
    }

    if (*scn) {
      ScanBudgets budgets{scn_steps, scn_radius};
      auto rows = regime_scan(scn_d, parse_list(scn_h), parse_list(scn_n),
                              budgets, SplittingOrder::parse(scn_order));
      if (scn_out.empty()) {
        write_scan_csv(rows, std::cout);
      } else {
        std::ofstream out(out_path(scn_out));
        write_scan_csv(rows, out);
      }
      return 0;
    }

    if (*cst) {
      TheoryConstants c = theory_constants(cst_d);
      auto pretty = [](const Rational& r) {
        return r.is_integer() ? r.num().str() : r.str();
      };
      std::cout << "p=" << pretty(c.p) << " q=" << pretty(c.q)
                << " h*=" << pretty(c.h_star) << " C'=" << pretty(c.c_prime)
                << "  (h* ≈ " << c.h_star.to_double() << ")\n";
      return 0;
    }

    if (*ren) {
      Snapshot snap = load_snapshot(ren_snapshot);
      Rational at_h = ren_at_h.empty() ? snap.h.lo : Rational::parse(ren_at_h);
      std::ofstream out(out_path(ren_out));
      if (!out) throw std::runtime_error("cannot write '" + ren_out + "'");
      render_mass(snap.config, at_h, out, ren_pixel);
      std::cout << "wrote " << ren_out << "\n";
      return 0;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
