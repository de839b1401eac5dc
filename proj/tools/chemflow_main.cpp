// chemflow: spectral chemotaxis lab.  Subcommands: simulate, sweep,
// transform, check, gen-init.  Exit codes: 0 ok, 1 config, 2 numerical,
// 3 invariant violation, 4 I/O.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "chemflow/config.hpp"
#include "chemflow/csv.hpp"
#include "chemflow/diagnostics.hpp"
#include "chemflow/dynamics.hpp"
#include "chemflow/errors.hpp"
#include "chemflow/hopf_cole.hpp"
#include "chemflow/init_data.hpp"
#include "chemflow/integrator.hpp"
#include "chemflow/manifest.hpp"
#include "chemflow/snapshot.hpp"
#include "chemflow/spectral.hpp"
#include "chemflow/sweep.hpp"
#include "chemflow/version.hpp"

namespace fs = std::filesystem;
using namespace chemflow;

namespace {

int exit_code_for_current_exception() {
    try {
        throw;
    } catch (const config_error&) {
        return 1;
    } catch (const numerical_error&) {
        return 2;
    } catch (const structure_error&) {
        return 3;
    } catch (const io_error&) {
        return 4;
    } catch (const std::exception&) {
        return 2;
    }
}

void ensure_dir(const fs::path& p) {
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw io_error("cannot create directory " + p.string() + ": " + ec.message());
}

ModelTag resolve_model(const std::string& flag, const ModelParams& params) {
    if (flag.empty())
        return params.epsilon > 0.0 ? ModelTag::diffusive : ModelTag::nondiffusive;
    const ModelTag tag = model_from_name(flag);
    if (tag == ModelTag::diffusive && !(params.epsilon > 0.0))
        throw config_error("model 'diffusive' requires params.epsilon > 0");
    if (tag == ModelTag::nondiffusive && params.epsilon != 0.0)
        throw config_error("model 'nondiffusive' requires params.epsilon = 0");
    return tag;
}

RunManifest base_manifest(const RunConfig& cfg, const std::string& model) {
    RunManifest m;
    m.code_version = kCodeVersion;
    m.config_hash = config_hash(cfg);
    m.model = model;
    m.config = cfg;
    return m;
}

struct Stopwatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    }
};

int cmd_simulate(const std::string& config_path, const std::string& model_flag,
                 const std::string& out_dir) {
    const RunConfig cfg = parse_config_file(config_path);
    const ModelTag tag = resolve_model(model_flag, cfg.params);
    ensure_dir(out_dir);

    RunManifest man = base_manifest(cfg, model_name(tag));
    man.artifacts = {"diagnostics.csv", "final.snap", "manifest.json"};
    const fs::path out(out_dir);
    Stopwatch clock;

    try {
        const Grid g = grid_from_spec(cfg.grid);
        DiagnosticsRecord rec;
        Snapshot final_snap;
        if (tag == ModelTag::keller_segel) {
            // Generate conservation-variable data, then map it to (u, c).
            const State seed_state = gen_init(
                g, cfg.init, cfg.params,
                cfg.params.epsilon > 0.0 ? ModelTag::diffusive
                                         : ModelTag::nondiffusive);
            const KSState initial = hopf_cole::inverse(seed_state, 0.0);
            auto [fin, r] = simulate_ks(initial, cfg.schedule);
            rec = std::move(r);
            final_snap = to_snapshot(fin);
        } else {
            const State initial = gen_init(g, cfg.init, cfg.params, tag);
            auto [fin, r] = simulate(initial, cfg.schedule);
            rec = std::move(r);
            final_snap = to_snapshot(fin);
        }
        write_diagnostics_csv((out / "diagnostics.csv").string(), rec);
        save_snapshot((out / "final.snap").string(), final_snap);
        man.wall_clock_seconds = clock.seconds();
        man.exit_status = 0;
        write_manifest((out / "manifest.json").string(), man);
        std::printf("simulated %s to t=%s (%zu samples), wrote %s\n",
                    model_name(tag), format_double(cfg.schedule.t_end).c_str(),
                    rec.size(), out_dir.c_str());
        return 0;
    } catch (...) {
        // Leave a manifest recording the failure, then let main() map the
        // exception to its exit code.
        man.wall_clock_seconds = clock.seconds();
        man.exit_status = exit_code_for_current_exception();
        try {
            write_manifest((out / "manifest.json").string(), man);
        } catch (...) {
        }
        throw;
    }
}

std::string eps_dir_name(double eps) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "eps_%g", eps);
    return buf;
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir) {
    const RunConfig cfg = parse_config_file(config_path);
    ensure_dir(out_dir);
    const fs::path out(out_dir);
    RunManifest top = base_manifest(cfg, "sweep");
    Stopwatch clock;

    try {
        const SweepResult res = run_sweep(cfg);

        std::vector<std::string> artifacts = {"errors.csv", "rate.csv",
                                              "manifest.json"};
        auto write_member = [&](const std::string& name, double eps,
                                const DiagnosticsRecord& rec, double secs) {
            const fs::path dir = out / "runs" / name;
            ensure_dir(dir);
            write_diagnostics_csv((dir / "diagnostics.csv").string(), rec);
            RunConfig member_cfg = cfg;
            member_cfg.params.epsilon = eps;
            RunManifest m = base_manifest(
                member_cfg, eps > 0.0 ? model_name(ModelTag::diffusive)
                                      : model_name(ModelTag::nondiffusive));
            m.artifacts = {"diagnostics.csv", "manifest.json"};
            m.wall_clock_seconds = secs;
            m.exit_status = 0;
            write_manifest((dir / "manifest.json").string(), m);
            artifacts.push_back("runs/" + name + "/diagnostics.csv");
            artifacts.push_back("runs/" + name + "/manifest.json");
        };

        write_member(eps_dir_name(0.0), 0.0, res.baseline_record,
                     res.baseline_seconds);
        for (std::size_t i = 0; i < res.ladder.size(); ++i)
            write_member(eps_dir_name(res.ladder[i]), res.ladder[i],
                         res.member_records[i], res.member_seconds[i]);

        write_errors_csv((out / "errors.csv").string(), res.rows);
        write_rate_csv((out / "rate.csv").string(), res.fits);

        if (res.fit_refused)
            std::fprintf(stderr, "rate fit refused: %s\n", res.fit_refusal.c_str());
        for (const auto& f : res.fits)
            std::printf("%s: slope %.4f, r2 %.6f\n", f.norm.c_str(), f.slope, f.r2);
        if (!res.monotone)
            std::fprintf(stderr,
                         "note: errors are not monotone along the ladder\n");

        top.wall_clock_seconds = clock.seconds();
        top.exit_status = 0;
        top.artifacts = artifacts;
        write_manifest((out / "manifest.json").string(), top);
        return 0;
    } catch (...) {
        top.wall_clock_seconds = clock.seconds();
        top.exit_status = exit_code_for_current_exception();
        try {
            write_manifest((out / "manifest.json").string(), top);
        } catch (...) {
        }
        throw;
    }
}

int cmd_transform(const std::string& in_path, const std::string& direction,
                  double normalization, const std::string& out_path) {
    const Snapshot snap = load_snapshot(in_path);
    const Grid g = grid_from_snapshot(snap);
    if (direction == "forward") {
        const KSState ks = ks_from_snapshot(snap, g);
        const State s = hopf_cole::forward(ks);
        save_snapshot(out_path, to_snapshot(s));
    } else if (direction == "inverse") {
        const State s = state_from_snapshot(snap, g);
        const KSState ks = hopf_cole::inverse(s, normalization);
        save_snapshot(out_path, to_snapshot(ks));
    } else {
        throw config_error("--direction must be 'forward' or 'inverse'");
    }
    std::printf("wrote %s\n", out_path.c_str());
    return 0;
}

void check_finite_or_throw(const std::vector<double>& v, const std::string& what) {
    for (double x : v)
        if (!std::isfinite(x))
            throw structure_error("non-finite value in " + what);
}

int check_snapshot(const std::string& path) {
    const Snapshot snap = load_snapshot(path);
    const Grid g = grid_from_snapshot(snap);
    for (const auto& f : snap.fields) check_finite_or_throw(f.data, "field " + f.name);

    if (tag_from_u32(snap.model_tag) == ModelTag::keller_segel) {
        const KSState ks = ks_from_snapshot(snap, g);
        double cmin = ks.c.v[0];
        for (double x : ks.c.v) cmin = std::min(cmin, x);
        if (!(cmin > 0.0))
            throw structure_error("concentration is not strictly positive (min " +
                                  format_double(cmin) + ")");
        std::printf("finite: ok\npositivity: ok (min c = %s)\n",
                    format_double(cmin).c_str());
        return 0;
    }

    const State s = state_from_snapshot(snap, g);
    const auto [curl_l2, mass_p] = curl_mass_monitor(s);
    const auto [grad_l2, div_l2] = divcurl_identity_check(s.q);
    std::printf("finite: ok\n");
    if (curl_l2 > 1e-8 * (1.0 + grad_l2))
        throw structure_error("curl admissibility violated: |curl q| = " +
                              format_double(curl_l2));
    std::printf("curl: ok (%s)\n", format_double(curl_l2).c_str());
    if (std::abs(grad_l2 - div_l2) > 1e-12 * (1.0 + grad_l2))
        throw structure_error("div-curl identity violated: |grad q| = " +
                              format_double(grad_l2) + ", |div q| = " +
                              format_double(div_l2));
    std::printf("div-curl: ok\nmass: %s\n", format_double(mass_p).c_str());
    return 0;
}

int check_run_dir(const fs::path& dir) {
    const fs::path man_path = dir / "manifest.json";
    std::ifstream man_in(man_path);
    if (!man_in) throw io_error("run directory lacks manifest.json: " + dir.string());
    nlohmann::json man;
    try {
        man_in >> man;
    } catch (const std::exception& e) {
        throw io_error("cannot parse " + man_path.string() + ": " + e.what());
    }
    for (const auto& art : man.value("artifacts", nlohmann::json::array())) {
        const fs::path p = dir / art.get<std::string>();
        if (!fs::exists(p)) throw io_error("manifest lists missing file: " + p.string());
    }
    const std::string model = man.value("model", "");

    const DiagnosticsRecord rec =
        read_diagnostics_csv((dir / "diagnostics.csv").string());
    if (rec.size() == 0) throw structure_error("diagnostics.csv has no samples");

    double max_curl_rel = 0.0, max_divcurl_rel = 0.0;
    for (std::size_t i = 0; i < rec.size(); ++i) {
        max_curl_rel = std::max(max_curl_rel,
                                rec.l2_curlq[i] / (1.0 + rec.l2_gradq[i]));
        max_divcurl_rel =
            std::max(max_divcurl_rel, std::abs(rec.l2_gradq[i] - rec.l2_divq[i]) /
                                          (1.0 + rec.l2_gradq[i]));
    }
    if (max_curl_rel > 1e-10)
        throw structure_error("curl invariant violated: max relative curl " +
                              format_double(max_curl_rel));
    std::printf("curl: ok (max relative %s)\n", format_double(max_curl_rel).c_str());
    if (max_divcurl_rel > 1e-12)
        throw structure_error("div-curl equality violated: max relative gap " +
                              format_double(max_divcurl_rel));
    std::printf("div-curl: ok (max relative %s)\n",
                format_double(max_divcurl_rel).c_str());

    const double mass0 = rec.mass_p.front();
    double max_drift = 0.0;
    for (double m : rec.mass_p) max_drift = std::max(max_drift, std::abs(m - mass0));
    if (max_drift > 1e-12 * (1.0 + std::abs(mass0)))
        throw structure_error("mass drift " + format_double(max_drift));
    std::printf("mass: ok (drift %s)\n", format_double(max_drift).c_str());

    // Ledger gate applies to conservation-model runs; for transformed
    // Keller-Segel diagnostics the balance only holds at transformation
    // accuracy, so it is reported, not enforced.
    const double final_res = std::abs(rec.ledger_residual.back());
    if (model == "ks" || model == "keller_segel") {
        std::printf("ledger: reported (final residual %s)\n",
                    format_double(final_res).c_str());
    } else {
        if (final_res > 1e-6)
            throw structure_error("energy ledger residual " +
                                  format_double(final_res));
        std::printf("ledger: ok (final residual %s)\n",
                    format_double(final_res).c_str());
    }
    return 0;
}

int cmd_check(const std::string& in_path) {
    if (fs::is_directory(in_path)) return check_run_dir(in_path);
    if (!fs::exists(in_path)) throw io_error("no such file or directory: " + in_path);
    return check_snapshot(in_path);
}

int cmd_gen_init(const std::string& config_path, const std::string& out_path) {
    const RunConfig cfg = parse_config_file(config_path);
    const ModelTag tag =
        cfg.params.epsilon > 0.0 ? ModelTag::diffusive : ModelTag::nondiffusive;
    const Grid g = grid_from_spec(cfg.grid);
    const State s = gen_init(g, cfg.init, cfg.params, tag);
    save_snapshot(out_path, to_snapshot(s));
    std::printf("wrote %s\n", out_path.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral laboratory for chemotaxis conservation laws"};
    app.require_subcommand(1);

    std::string config_path, model_flag, out_dir = ".";
    auto* sim = app.add_subcommand("simulate", "run one model to t_end");
    sim->add_option("--config", config_path, "TOML run configuration")->required();
    sim->add_option("--model", model_flag,
                    "diffusive|nondiffusive|ks (default: from epsilon)");
    sim->add_option("--out", out_dir, "output directory (default .)");

    std::string sweep_config, sweep_out;
    auto* sw = app.add_subcommand("sweep", "vanishing-diffusion error study");
    sw->add_option("--config", sweep_config, "TOML run configuration")->required();
    sw->add_option("--out", sweep_out, "output directory")->required();

    std::string tr_in, tr_dir, tr_out;
    double tr_norm = 0.0;
    auto* tr = app.add_subcommand("transform",
                                  "map snapshots between (u,c) and (p~,q)");
    tr->add_option("--in", tr_in, "input snapshot")->required();
    tr->add_option("--direction", tr_dir, "forward|inverse")->required();
    tr->add_option("--normalization", tr_norm,
                   "mean of ln c fixed by the inverse map (default 0)");
    tr->add_option("--out", tr_out, "output snapshot")->required();

    std::string chk_in;
    auto* chk = app.add_subcommand("check", "invariant suite on a snapshot or run dir");
    chk->add_option("--in", chk_in, "snapshot file or run directory")->required();

    std::string gi_config, gi_out;
    auto* gi = app.add_subcommand("gen-init", "write a deterministic initial snapshot");
    gi->add_option("--config", gi_config, "TOML run configuration")->required();
    gi->add_option("--out", gi_out, "output snapshot")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1; // help/version exit 0, any parse failure is a config error
    }

    try {
        if (sim->parsed()) return cmd_simulate(config_path, model_flag, out_dir);
        if (sw->parsed()) return cmd_sweep(sweep_config, sweep_out);
        if (tr->parsed()) return cmd_transform(tr_in, tr_dir, tr_norm, tr_out);
        if (chk->parsed()) return cmd_check(chk_in);
        if (gi->parsed()) return cmd_gen_init(gi_config, gi_out);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_code_for_current_exception();
    }
    return 0;
}
