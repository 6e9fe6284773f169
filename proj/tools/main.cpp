#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "sceneweaver/config.hpp"
#include "sceneweaver/executor.hpp"
#include "sceneweaver/gateway.hpp"
#include "sceneweaver/metrics.hpp"
#include "sceneweaver/planner.hpp"
#include "sceneweaver/render.hpp"
#include "sceneweaver/toolkit.hpp"

namespace fs = std::filesystem;
using namespace sceneweaver;

namespace {

std::string read_file_or_die(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

struct CommonOpts {
    std::string config_path;
    std::string catalog_path = "assets/catalog.json";
    std::string library_dir = "assets/library";
    std::string pretrained_dir = "assets/pretrained";
    std::string backend = "scripted";
    std::string scorer = "heuristic";
    std::string transport;
    unsigned seed = 0;
};

RunConfig resolve_config(const CommonOpts& opts) {
    RunConfig cfg;
    if (!opts.config_path.empty()) cfg = RunConfig::from_file(opts.config_path);
    if (cfg.catalog_path.empty()) cfg.catalog_path = opts.catalog_path;
    if (cfg.library_dir.empty()) cfg.library_dir = opts.library_dir;
    if (cfg.pretrained_dir.empty()) cfg.pretrained_dir = opts.pretrained_dir;
    if (!opts.transport.empty()) {
        if (opts.transport == "live") {
            cfg.gateway.transport = TransportKind::live;
        } else if (opts.transport.rfind("mock:", 0) == 0) {
            cfg.gateway.transport = TransportKind::mock;
            cfg.gateway.fixture_dir = opts.transport.substr(5);
        } else {
            throw ConfigError("bad --transport value: " + opts.transport);
        }
    }
    cfg.seed = opts.seed;
    return cfg;
}

AssetCatalog load_catalog(const std::string& path) {
    if (fs::exists(path)) return AssetCatalog::load(path);
    return AssetCatalog{};
}

struct Engine {
    RunConfig cfg;
    AssetCatalog catalog;
    ToolRegistry registry;
    std::unique_ptr<LlmGateway> gateway;  // null when no LLM parts are needed
    std::unique_ptr<PlanBackend> backend;
    std::unique_ptr<Scorer> scorer;
};

/// Exit code 2 signals an unrecoverable gateway problem.
struct GatewaySetupError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Engine build_engine(const CommonOpts& opts) {
    Engine e;
    e.cfg = resolve_config(opts);
    e.catalog = load_catalog(e.cfg.catalog_path);
    e.registry = bundled_registry({e.cfg.library_dir, e.cfg.pretrained_dir, e.catalog});

    bool needs_gateway = opts.backend == "llm" || opts.scorer == "llm";
    if (needs_gateway) {
        GatewayConfig gc = e.cfg.gateway;
        GatewayConfig env = GatewayConfig::from_env();
        if (gc.api_key.empty()) gc.api_key = env.api_key;
        if (gc.base_url.empty()) gc.base_url = env.base_url;
        if (!env.model.empty() && gc.model == "gpt-4o") gc.model = env.model;
        if (gc.transport == TransportKind::live && gc.api_key.empty())
            throw GatewaySetupError("live transport needs an API key "
                                    "(SCENEWEAVER_API_KEY or config)");
        if (gc.transport == TransportKind::mock && gc.fixture_dir.empty())
            throw GatewaySetupError("mock transport needs a fixture directory "
                                    "(--transport mock:<dir>)");
        e.gateway = std::make_unique<LlmGateway>(gc);
    }

    if (opts.backend == "llm") {
        e.backend = std::make_unique<LlmPlanBackend>(*e.gateway);
    } else if (opts.backend == "scripted") {
        e.backend = std::make_unique<ScriptedBackend>();
    } else {
        throw ConfigError("bad --backend value: " + opts.backend);
    }
    if (opts.scorer == "llm") {
        e.scorer = std::make_unique<LlmScorer>(*e.gateway);
    } else if (opts.scorer == "heuristic") {
        e.scorer = std::make_unique<HeuristicScorer>();
    } else {
        throw ConfigError("bad --scorer value: " + opts.scorer);
    }
    return e;
}

int cmd_generate(const CommonOpts& opts, const std::string& query, const std::string& out_dir,
                 int max_steps) {
    Engine e = build_engine(opts);
    PlannerConfig pcfg = e.cfg.planner;
    if (max_steps > 0) pcfg.max_iterations = max_steps;

    fs::create_directories(out_dir);
    LoopDeps deps;
    deps.registry = &e.registry;
    deps.catalog = &e.catalog;
    deps.backend = e.backend.get();
    deps.scorer = e.scorer.get();
    deps.gateway = e.gateway.get();
    deps.optim = e.cfg.optim;
    std::vector<Reflection> reflections;
    deps.on_step = [&](const StepRecord& rec, const std::string& svg) {
        char name[32];
        std::snprintf(name, sizeof(name), "step_%02d.svg", rec.step);
        write_file(out_dir + "/" + name, svg);
        reflections.push_back(rec.reflection);
    };

    auto [final_scene, trace] = run_loop(query, pcfg, deps);
    write_file(out_dir + "/final.json", serialize_scene(final_scene));
    write_file(out_dir + "/trace.json", serialize_trace(trace));
    PhysicalMetrics phys = physical_metrics(final_scene);
    PerceptualScores perc;
    bool have_perc = false;
    for (auto it = trace.rbegin(); it != trace.rend(); ++it) {
        if (!it->rolled_back) {
            perc = it->reflection.perceptual;
            have_perc = true;
            break;
        }
    }
    write_file(out_dir + "/metrics.json",
               metrics_report(phys, have_perc ? &perc : nullptr));
    std::cout << "wrote " << trace.size() << " steps to " << out_dir << "\n";
    return 0;
}

int cmd_evaluate(const CommonOpts& opts, const std::string& scene_path, bool with_scores) {
    Scene s = parse_scene(read_file_or_die(scene_path));
    PhysicalMetrics phys = physical_metrics(s);
    if (with_scores) {
        Engine e = build_engine(opts);
        RenderedView view = render_topdown(s);
        std::string png =
            e.scorer->needs_pixels() ? rasterize_for_prompt(view) : std::string();
        PerceptualScores perc = perceptual_scores(s, png, s.meta.query, *e.scorer);
        std::cout << metrics_report(phys, &perc);
    } else {
        std::cout << metrics_report(phys, nullptr);
    }
    return 0;
}

int cmd_optimize(const std::string& scene_path, const std::string& out_path, int steps) {
    Scene s = parse_scene(read_file_or_die(scene_path));
    OptimConfig cfg;
    if (steps > 0) cfg.max_steps = steps;
    ExecutionReport report;
    auto [fixed, residual] = optimize(s, cfg, &report);
    write_file(out_path, serialize_scene(fixed));
    std::cout << "{\"ob\":" << residual.out_of_boundary << ",\"cn\":" << residual.collision_pairs
              << ",\"sweeps\":" << report.sweeps << "}\n";
    return residual.clean() ? 0 : 1;
}

int cmd_render(const std::string& scene_path, const std::string& out_prefix) {
    Scene s = parse_scene(read_file_or_die(scene_path));
    RenderedView view = render_topdown(s);
    write_file(out_prefix + ".svg", view.svg);
    write_file(out_prefix + ".png", rasterize_for_prompt(view));
    std::cout << "wrote " << out_prefix << ".svg and " << out_prefix << ".png\n";
    return 0;
}

int cmd_replay(const CommonOpts& opts, const std::string& trace_path) {
    RunConfig cfg = resolve_config(opts);
    AssetCatalog catalog = load_catalog(cfg.catalog_path);
    auto trace = parse_trace(read_file_or_die(trace_path));
    int divergent = 0;
    for (const auto& rec : trace) {
        Scene expected = rec.scene_after;
        Scene replayed = rec.scene_before;
        if (!rec.outcome.failed && !rec.outcome.delta.empty()) {
            auto [next, rep] = execute(rec.scene_before, rec.outcome.delta, catalog, cfg.optim);
            replayed = std::move(next);
        }
        replayed.meta.step = rec.step;
        if (serialize_scene(replayed) != serialize_scene(expected)) {
            ++divergent;
            std::cerr << "step " << rec.step << " diverges\n";
        }
    }
    std::cout << divergent << " divergent steps\n";
    return divergent == 0 ? 0 : 1;
}

int cmd_tools(const CommonOpts& opts) {
    Engine e;
    e.cfg = resolve_config(opts);
    e.catalog = load_catalog(e.cfg.catalog_path);
    ToolRegistry registry =
        bundled_registry({e.cfg.library_dir, e.cfg.pretrained_dir, e.catalog});
    std::cout << registry.metadata_text();
    return 0;
}

int cmd_bench(const CommonOpts& opts, const std::string& rooms_csv, int n,
              const std::string& out_dir) {
    std::vector<std::string> rooms;
    std::stringstream ss(rooms_csv);
    std::string room;
    while (std::getline(ss, room, ',')) {
        if (!room.empty()) rooms.push_back(room);
    }
    if (rooms.empty()) {
        std::cerr << "bench: --rooms must list at least one room type\n";
        return 1;
    }
    Engine e = build_engine(opts);
    std::cout << "room,runs,obj,ob,cn,realism,functionality,layout,completion\n";
    int ok_rows = 0;
    for (const auto& r : rooms) {
        double obj = 0, ob = 0, cn = 0, re = 0, fu = 0, la = 0, co = 0;
        int ok = 0;
        for (int i = 0; i < n; ++i) {
            try {
                LoopDeps deps;
                deps.registry = &e.registry;
                deps.catalog = &e.catalog;
                deps.backend = e.backend.get();
                deps.scorer = e.scorer.get();
                deps.gateway = e.gateway.get();
                deps.optim = e.cfg.optim;
                if (!out_dir.empty()) {
                    fs::create_directories(out_dir);
                    deps.on_step = [&, i](const StepRecord& rec, const std::string& svg) {
                        char name[64];
                        std::snprintf(name, sizeof(name), "%s_%d_step_%02d.svg", r.c_str(), i,
                                      rec.step);
                        write_file(out_dir + "/" + name, svg);
                    };
                }
                auto [scene, trace] = run_loop("Design me a " + r, e.cfg.planner, deps);
                PhysicalMetrics phys = physical_metrics(scene);
                PerceptualScores perc = heuristic_score(scene);
                obj += phys.obj_count;
                ob += phys.out_of_boundary;
                cn += phys.collision_pairs;
                re += perc.realism;
                fu += perc.functionality;
                la += perc.layout;
                co += perc.completion;
                ++ok;
            } catch (const std::exception& ex) {
                std::cerr << "bench " << r << " run " << i << " failed: " << ex.what() << "\n";
            }
        }
        if (ok == 0) {
            std::cout << r << ",0,,,,,,,\n";
            continue;
        }
        ++ok_rows;
        char row[256];
        std::snprintf(row, sizeof(row), "%s,%d,%.1f,%.1f,%.1f,%.1f,%.1f,%.1f,%.1f\n",
                      r.c_str(), ok, obj / ok, ob / ok, cn / ok, re / ok, fu / ok, la / ok,
                      co / ok);
        std::cout << row;
    }
    return ok_rows > 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"agentic indoor scene synthesis"};
    app.require_subcommand(1);

    CommonOpts opts;
    app.add_option("--config", opts.config_path, "config file (TOML)");
    app.add_option("--catalog", opts.catalog_path, "asset catalog path");
    app.add_option("--library", opts.library_dir, "scene library directory");
    app.add_option("--pretrained", opts.pretrained_dir, "pretrained layout directory");
    app.add_option("--backend", opts.backend, "planner backend: scripted|llm");
    app.add_option("--scorer", opts.scorer, "perceptual scorer: heuristic|llm");
    app.add_option("--transport", opts.transport, "gateway transport: live|mock:<dir>");
    app.add_option("--seed", opts.seed, "random seed");

    std::string query, out_dir, scene_path, trace_path, out_prefix, rooms;
    int max_steps = 0, opt_steps = 0, bench_n = 3;
    bool with_scores = false;
    std::string opt_out = "optimized.json";
    std::string bench_out;

    auto* g = app.add_subcommand("generate", "run the synthesis loop");
    g->add_option("--query", query, "user demand")->required();
    g->add_option("--out", out_dir, "output directory")->required();
    g->add_option("--max-steps", max_steps, "cap loop iterations");

    auto* ev = app.add_subcommand("evaluate", "print metrics for a scene file");
    ev->add_option("scene", scene_path, "scene file")->required();
    ev->add_flag("--scores", with_scores, "include perceptual scores");

    auto* op = app.add_subcommand("optimize", "resolve collisions in a scene file");
    op->add_option("scene", scene_path, "scene file")->required();
    op->add_option("--out", opt_out, "output scene path");
    op->add_option("--steps", opt_steps, "sweep budget");

    auto* re = app.add_subcommand("render", "write svg and png views");
    re->add_option("scene", scene_path, "scene file")->required();
    re->add_option("--out", out_prefix, "output path prefix")->required();

    auto* rp = app.add_subcommand("replay", "re-execute a trace and check for drift");
    rp->add_option("trace", trace_path, "trace file")->required();

    app.add_subcommand("tools", "list the registered tool cards");

    auto* be = app.add_subcommand("bench", "batch generation with aggregate metrics");
    be->add_option("--rooms", rooms, "comma-separated room types")->required();
    be->add_option("--n", bench_n, "runs per room type");
    be->add_option("--out", bench_out, "directory for per-step renders");

    CLI11_PARSE(app, argc, argv);

    try {
        if (g->parsed()) return cmd_generate(opts, query, out_dir, max_steps);
        if (ev->parsed()) return cmd_evaluate(opts, scene_path, with_scores);
        if (op->parsed()) return cmd_optimize(scene_path, opt_out, opt_steps);
        if (re->parsed()) return cmd_render(scene_path, out_prefix);
        if (rp->parsed()) return cmd_replay(opts, trace_path);
        if (app.get_subcommand("tools")->parsed()) return cmd_tools(opts);
        if (be->parsed()) return cmd_bench(opts, rooms, bench_n, bench_out);
    } catch (const GatewaySetupError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const GatewayError& e) {
        std::cerr << "gateway error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
