#include "fbflow/config.hpp"
#include "fbflow/report.hpp"
#include "fbflow/solver.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using fbflow::ConfigError;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitHorizon = 2;
constexpr int kExitDivergence = 3;

enum class Mode { Solve, Iterate, Analyze };

// Layered option values: defaults (0) < config file (1) < command line (2).
template <typename T>
struct Layered {
    std::optional<T> value;
    int level = 0;

    void set(T v, int lvl) {
        if (!value || lvl >= level) {
            value = std::move(v);
            level = lvl;
        }
    }
};

struct RunOptions {
    Layered<std::string> example;
    Layered<std::uint64_t> seed;
    Layered<double> lambda;
    Layered<double> lambda_frac;
    Layered<double> dt;
    Layered<double> t_end;
    Layered<double> tol;
    Layered<double> relaxation;
    Layered<double> delta;
    Layered<long> max_iters;
    Layered<long> stride;
    Layered<long> samples;
    Layered<std::string> scheme;
    Layered<std::string> method;
    Layered<std::string> x0_csv;
    Layered<std::string> outdir;
    Layered<double> box_lo;
    Layered<double> box_hi;
    Layered<bool> allow_invalid_lambda;
};

double parse_double_value(const fbflow::IniValue& v) {
    std::size_t used = 0;
    double out = 0.0;
    try {
        out = std::stod(v.value, &used);
    } catch (const std::exception&) {
        throw ConfigError(v.line, v.col, "expected a number, got '" + v.value + "'");
    }
    if (used != v.value.size()) {
        throw ConfigError(v.line, v.col, "trailing characters after number '" + v.value + "'");
    }
    return out;
}

long parse_long_value(const fbflow::IniValue& v) {
    std::size_t used = 0;
    long out = 0;
    try {
        out = std::stol(v.value, &used);
    } catch (const std::exception&) {
        throw ConfigError(v.line, v.col, "expected an integer, got '" + v.value + "'");
    }
    if (used != v.value.size()) {
        throw ConfigError(v.line, v.col, "trailing characters after integer '" + v.value + "'");
    }
    return out;
}

bool parse_bool_value(const fbflow::IniValue& v) {
    if (v.value == "true" || v.value == "1" || v.value == "yes") return true;
    if (v.value == "false" || v.value == "0" || v.value == "no") return false;
    throw ConfigError(v.line, v.col, "expected a boolean, got '" + v.value + "'");
}

fbflow::Vector parse_vector_csv(const std::string& csv) {
    std::vector<double> values;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        values.push_back(std::stod(item));
    }
    fbflow::Vector v(static_cast<Eigen::Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) v[static_cast<Eigen::Index>(i)] = values[i];
    return v;
}

void apply_config(RunOptions& opts, const fbflow::IniFile& ini, Mode mode) {
    const auto get = [&](const std::string& section,
                         const std::string& key) -> const fbflow::IniValue* {
        const auto sec = ini.find(section);
        if (sec == ini.end()) return nullptr;
        const auto kv = sec->second.find(key);
        return kv == sec->second.end() ? nullptr : &kv->second;
    };
    if (const auto* v = get("problem", "example")) opts.example.set(v->value, 1);
    if (const auto* v = get("problem", "seed")) {
        opts.seed.set(static_cast<std::uint64_t>(parse_long_value(*v)), 1);
    }
    const std::string run_section = mode == Mode::Iterate ? "iter" : "flow";
    if (mode != Mode::Analyze) {
        if (const auto* v = get(run_section, "lambda")) opts.lambda.set(parse_double_value(*v), 1);
        if (const auto* v = get(run_section, "lambda_frac")) {
            opts.lambda_frac.set(parse_double_value(*v), 1);
        }
        if (const auto* v = get(run_section, "tol")) opts.tol.set(parse_double_value(*v), 1);
        if (const auto* v = get(run_section, "method")) opts.method.set(v->value, 1);
        if (const auto* v = get(run_section, "x0")) opts.x0_csv.set(v->value, 1);
    }
    if (mode == Mode::Solve) {
        if (const auto* v = get("flow", "dt")) opts.dt.set(parse_double_value(*v), 1);
        if (const auto* v = get("flow", "t_end")) opts.t_end.set(parse_double_value(*v), 1);
        if (const auto* v = get("flow", "scheme")) opts.scheme.set(v->value, 1);
        if (const auto* v = get("flow", "stride")) opts.stride.set(parse_long_value(*v), 1);
        if (const auto* v = get("flow", "delta")) opts.delta.set(parse_double_value(*v), 1);
        if (const auto* v = get("flow", "allow_invalid_lambda")) {
            opts.allow_invalid_lambda.set(parse_bool_value(*v), 1);
        }
    }
    if (mode == Mode::Iterate) {
        if (const auto* v = get("iter", "relaxation")) {
            opts.relaxation.set(parse_double_value(*v), 1);
        }
        if (const auto* v = get("iter", "max_iters")) opts.max_iters.set(parse_long_value(*v), 1);
    }
    if (mode == Mode::Analyze) {
        if (const auto* v = get("analysis", "samples")) opts.samples.set(parse_long_value(*v), 1);
        if (const auto* v = get("analysis", "lambda")) opts.lambda.set(parse_double_value(*v), 1);
        if (const auto* v = get("analysis", "box_lo")) opts.box_lo.set(parse_double_value(*v), 1);
        if (const auto* v = get("analysis", "box_hi")) opts.box_hi.set(parse_double_value(*v), 1);
    }
    if (const auto* v = get("output", "dir")) opts.outdir.set(v->value, 1);
}

fs::path resolve_outdir(const RunOptions& opts) {
    if (opts.outdir.value) return fs::path(*opts.outdir.value);
    if (const char* env = std::getenv("FBF_OUTPUT_DIR")) return fs::path(env);
    return fs::path("fbf-output");
}

struct ResolvedProblem {
    fbflow::MviProblem problem;
    double lambda;
    double beta;
    std::uint64_t seed;
};

ResolvedProblem resolve_problem(const RunOptions& opts) {
    if (!opts.example.value) {
        throw std::invalid_argument("no problem selected: pass --example or a config file");
    }
    const std::uint64_t seed = opts.seed.value.value_or(0);
    ResolvedProblem out{fbflow::build_example(fbflow::parse_example(*opts.example.value), seed),
                        0.0, 0.0, seed};
    out.beta = fbflow::effective_beta(out.problem, seed);

    // Explicit lambda beats the fraction when both come from the same layer.
    const bool use_frac = opts.lambda_frac.value &&
                          (!opts.lambda.value || opts.lambda_frac.level > opts.lambda.level);
    if (use_frac) {
        out.lambda = *opts.lambda_frac.value / (1.0 + out.beta * out.beta);
    } else if (opts.lambda.value) {
        out.lambda = *opts.lambda.value;
    } else if (out.problem.id == "ex3") {
        out.lambda = 0.01;
    } else {
        out.lambda = 0.5 / (1.0 + out.beta * out.beta);
    }
    return out;
}

fbflow::Vector resolve_x0(const RunOptions& opts, const fbflow::MviProblem& p) {
    if (opts.x0_csv.value) {
        fbflow::Vector x0 = parse_vector_csv(*opts.x0_csv.value);
        if (x0.size() != p.dim) throw std::invalid_argument("--x0 has wrong dimension");
        return x0;
    }
    if (p.default_x0) return *p.default_x0;
    return fbflow::Vector::Zero(p.dim);
}

void write_file(const fs::path& path, const std::string& contents) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << contents;
}

int stop_reason_exit(fbflow::StopReason reason) {
    switch (reason) {
        case fbflow::StopReason::Tolerance: return kExitOk;
        case fbflow::StopReason::Horizon: return kExitHorizon;
        case fbflow::StopReason::Divergence: return kExitDivergence;
    }
    return kExitUsage;
}

int run_solve(const RunOptions& opts) {
    const ResolvedProblem rp = resolve_problem(opts);
    const auto& problem = rp.problem;

    fbflow::FlowSpec flow;
    const std::string method = opts.method.value.value_or("fbf");
    if (method == "fbf") {
        flow.system = fbflow::FlowSystem::Fbf;
    } else if (method == "proxgrad") {
        flow.system = fbflow::FlowSystem::ProxGradFlow;
    } else {
        throw std::invalid_argument("unknown solve method '" + method + "' (fbf|proxgrad)");
    }
    const std::string scheme = opts.scheme.value.value_or("euler");
    if (scheme == "euler") {
        flow.scheme = fbflow::Scheme::Euler;
    } else if (scheme == "rk4") {
        flow.scheme = fbflow::Scheme::Rk4;
    } else {
        throw std::invalid_argument("unknown scheme '" + scheme + "' (euler|rk4)");
    }
    flow.lambda = rp.lambda;
    flow.dt = opts.dt.value.value_or(0.01);
    flow.t_end = opts.t_end.value.value_or(20.0);
    flow.record_stride = static_cast<int>(opts.stride.value.value_or(1));
    flow.delta = opts.delta.value.value_or(1.0);
    flow.allow_invalid_lambda = opts.allow_invalid_lambda.value.value_or(false);
    flow.x0 = resolve_x0(opts, problem);
    const double stop_tol = opts.tol.value.value_or(1e-8);

    const auto t0 = std::chrono::steady_clock::now();
    const fbflow::TrajectoryRecord rec = fbflow::integrate(problem, flow, stop_tol);
    const auto t1 = std::chrono::steady_clock::now();

    fbflow::RunReport report;
    report.problem_id = problem.id;
    report.method = method + "-flow-" + scheme;
    report.lambda = flow.lambda;
    report.dt = flow.dt;
    report.t_end = flow.t_end;
    report.tol = stop_tol;
    report.final_residual = rec.residuals.empty() ? 0.0 : rec.residuals.back();
    report.iterations_or_steps = rec.steps;
    report.stop_reason = rec.stop_reason;
    report.wall_time_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    if (flow.system == fbflow::FlowSystem::Fbf && rec.size() > 0) {
        report.monitor_verdicts =
            fbflow::verify_trajectory_inequalities(problem, rec, flow.lambda, rp.beta);
    }
    if (problem.lipschitz_beta && problem.strong_pseudo_mu) {
        report.certificate =
            fbflow::make_certificate(*problem.lipschitz_beta, *problem.strong_pseudo_mu, flow.lambda);
    }

    const fs::path outdir = resolve_outdir(opts);
    fs::create_directories(outdir);
    std::ostringstream csv;
    fbflow::write_trajectory_csv(csv, rec);
    write_file(outdir / (problem.id + "_trajectory.csv"), csv.str());
    write_file(outdir / (problem.id + "_solve_report.json"), fbflow::report_to_json(report));

    std::cout << problem.id << " solve: stop=" << to_string(rec.stop_reason)
              << " steps=" << rec.steps << " final_residual=" << fbflow::format_g17(report.final_residual)
              << "\n";
    return stop_reason_exit(rec.stop_reason);
}

int run_iterate(const RunOptions& opts) {
    const ResolvedProblem rp = resolve_problem(opts);
    const auto& problem = rp.problem;

    fbflow::IterSpec spec;
    const std::string method = opts.method.value.value_or("tseng");
    if (method == "tseng") {
        spec.method = fbflow::IterMethod::TsengFbf;
    } else if (method == "proxgrad") {
        spec.method = fbflow::IterMethod::ProxGrad;
    } else {
        throw std::invalid_argument("unknown iterate method '" + method + "' (tseng|proxgrad)");
    }
    spec.lambda = rp.lambda;
    spec.relaxation = opts.relaxation.value.value_or(1.0);
    spec.max_iters = opts.max_iters.value.value_or(500);
    spec.tol = opts.tol.value.value_or(1e-8);
    spec.x0 = resolve_x0(opts, problem);

    fbflow::IterationRun run = fbflow::iterate(problem, spec);
    if (spec.method == fbflow::IterMethod::TsengFbf && run.record.size() > 0) {
        run.report.monitor_verdicts =
            fbflow::verify_trajectory_inequalities(problem, run.record, spec.lambda, rp.beta);
    }
    if (problem.lipschitz_beta && problem.strong_pseudo_mu) {
        run.report.certificate = fbflow::make_certificate(*problem.lipschitz_beta,
                                                          *problem.strong_pseudo_mu, spec.lambda);
    }

    const fs::path outdir = resolve_outdir(opts);
    fs::create_directories(outdir);
    std::ostringstream csv;
    fbflow::write_trajectory_csv(csv, run.record);
    write_file(outdir / (problem.id + "_iterates.csv"), csv.str());
    write_file(outdir / (problem.id + "_iterate_report.json"), fbflow::report_to_json(run.report));

    std::cout << problem.id << " iterate: stop=" << to_string(run.report.stop_reason)
              << " iterations=" << run.report.iterations_or_steps
              << " final_residual=" << fbflow::format_g17(run.report.final_residual) << "\n";
    return stop_reason_exit(run.report.stop_reason);
}

int run_analyze(const RunOptions& opts) {
    const ResolvedProblem rp = resolve_problem(opts);
    const auto& problem = rp.problem;

    const auto bounds = fbflow::domain_box(problem.prox_spec);
    fbflow::SamplingBox box{opts.box_lo.value.value_or(bounds ? bounds->first : -5.0),
                            opts.box_hi.value.value_or(bounds ? bounds->second : 5.0)};
    const long samples = opts.samples.value.value_or(20000);

    const double beta_est =
        fbflow::estimate_lipschitz(problem.op, problem.dim, box, samples, rp.seed);
    const double beta_bound = fbflow::lipschitz_upper_bound(problem.op);
    const fbflow::MonotonicityVerdict verdict =
        fbflow::classify_monotonicity(problem, box, samples, rp.seed);

    ordered_json j;
    j["problem_id"] = problem.id;
    j["sampling_box"] = {{"lo", box.lo}, {"hi", box.hi}};
    j["samples"] = samples;
    j["seed"] = rp.seed;
    j["beta_estimate"] = beta_est;
    j["beta_upper_bound"] = beta_bound;
    if (problem.lipschitz_beta) j["beta_stored"] = *problem.lipschitz_beta;
    if (const auto* g = std::get_if<fbflow::GaussianScaledOperator>(&problem.op)) {
        const double lam_min = fbflow::lambda_min_symmetric3(g->M);
        j["lambda_min_matrix"] = lam_min;
        j["mu_formula"] = g->shift * lam_min;
    }
    ordered_json classes;
    classes["monotone"] = verdict.monotone;
    classes["pseudomonotone"] = verdict.pseudomonotone;
    classes["h_pseudomonotone"] = verdict.h_pseudomonotone;
    classes["h_strongly_pseudomonotone"] = verdict.h_strongly_pseudomonotone;
    j["class_flags"] = std::move(classes);
    ordered_json witnesses = ordered_json::array();
    for (const auto& w : verdict.witnesses) {
        ordered_json jw;
        jw["definition"] = w.definition;
        jw["u"] = std::vector<double>(w.u.data(), w.u.data() + w.u.size());
        jw["v"] = std::vector<double>(w.v.data(), w.v.data() + w.v.size());
        if (w.antecedent) jw["antecedent"] = *w.antecedent;
        jw["value"] = w.value;
        witnesses.push_back(std::move(jw));
    }
    j["witnesses"] = std::move(witnesses);
    if (verdict.mu_estimate) {
        j["mu_estimate"] = *verdict.mu_estimate;
    } else {
        j["mu_estimate"] = nullptr;
    }
    j["samples_used"] = verdict.samples_used;

    const double cert_mu = verdict.mu_estimate
                               ? *verdict.mu_estimate
                               : problem.strong_pseudo_mu.value_or(0.0);
    if (cert_mu > 0.0) {
        const double cert_beta = problem.lipschitz_beta.value_or(1.05 * beta_est);
        const auto cert = fbflow::make_certificate(cert_beta, cert_mu, rp.lambda);
        j["certificate"] = {{"beta", cert.beta},
                            {"mu", cert.mu},
                            {"lambda", cert.lambda},
                            {"alpha", cert.alpha},
                            {"lambda_valid", cert.lambda_valid}};
    } else {
        j["certificate"] = nullptr;
    }

    const fs::path outdir = resolve_outdir(opts);
    fs::create_directories(outdir);
    write_file(outdir / (problem.id + "_analysis.json"), j.dump(2) + "\n");

    std::cout << problem.id << " analyze: monotone=" << (verdict.monotone ? "true" : "false")
              << " pseudomonotone=" << (verdict.pseudomonotone ? "true" : "false")
              << " h_pseudomonotone=" << (verdict.h_pseudomonotone ? "true" : "false")
              << " h_strongly_pseudomonotone="
              << (verdict.h_strongly_pseudomonotone ? "true" : "false") << "\n";
    for (const auto& w : verdict.witnesses) {
        std::cout << "  witness against " << w.definition << ": u=(";
        for (Eigen::Index i = 0; i < w.u.size(); ++i) {
            std::cout << (i ? "," : "") << fbflow::format_g17(w.u[i]);
        }
        std::cout << ") v=(";
        for (Eigen::Index i = 0; i < w.v.size(); ++i) {
            std::cout << (i ? "," : "") << fbflow::format_g17(w.v[i]);
        }
        std::cout << ") value=" << fbflow::format_g17(w.value);
        if (w.antecedent) std::cout << " antecedent=" << fbflow::format_g17(*w.antecedent);
        std::cout << "\n";
    }
    return kExitOk;
}

int run_mode(Mode mode, const RunOptions& opts) {
    switch (mode) {
        case Mode::Solve: return run_solve(opts);
        case Mode::Iterate: return run_iterate(opts);
        case Mode::Analyze: return run_analyze(opts);
    }
    return kExitUsage;
}

RunOptions with_config_file(const RunOptions& cli_opts, const fs::path& config_path, Mode mode) {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open config file: " + config_path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    RunOptions merged;  // defaults
    apply_config(merged, fbflow::parse_ini(buf.str()), mode);
    // Command-line values (level 2) override whatever the file set (level 1).
    const auto overlay = [](auto& dst, const auto& src) {
        if (src.value && src.level >= 2) dst.set(*src.value, src.level);
    };
    overlay(merged.example, cli_opts.example);
    overlay(merged.seed, cli_opts.seed);
    overlay(merged.lambda, cli_opts.lambda);
    overlay(merged.lambda_frac, cli_opts.lambda_frac);
    overlay(merged.dt, cli_opts.dt);
    overlay(merged.t_end, cli_opts.t_end);
    overlay(merged.tol, cli_opts.tol);
    overlay(merged.relaxation, cli_opts.relaxation);
    overlay(merged.delta, cli_opts.delta);
    overlay(merged.max_iters, cli_opts.max_iters);
    overlay(merged.stride, cli_opts.stride);
    overlay(merged.samples, cli_opts.samples);
    overlay(merged.scheme, cli_opts.scheme);
    overlay(merged.method, cli_opts.method);
    overlay(merged.x0_csv, cli_opts.x0_csv);
    overlay(merged.outdir, cli_opts.outdir);
    overlay(merged.box_lo, cli_opts.box_lo);
    overlay(merged.box_hi, cli_opts.box_hi);
    overlay(merged.allow_invalid_lambda, cli_opts.allow_invalid_lambda);
    return merged;
}

int run_with_configs(Mode mode, const RunOptions& cli_opts, const std::vector<std::string>& configs,
                     int jobs) {
    if (configs.empty()) return run_mode(mode, cli_opts);
    if (configs.size() == 1) {
        return run_mode(mode, with_config_file(cli_opts, configs.front(), mode));
    }
    // Batch: each config runs independently and writes under its own
    // subdirectory of the output root.
    std::vector<RunOptions> runs;
    runs.reserve(configs.size());
    for (const auto& path : configs) {
        RunOptions opts = with_config_file(cli_opts, path, mode);
        const fs::path sub = resolve_outdir(opts) / fs::path(path).stem();
        opts.outdir.set(sub.string(), 2);
        runs.push_back(std::move(opts));
    }
    std::atomic<std::size_t> next{0};
    std::atomic<int> worst{kExitOk};
    const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(runs.size())));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= runs.size()) return;
                int code = kExitUsage;
                try {
                    code = run_mode(mode, runs[i]);
                } catch (const std::exception& e) {
                    std::cerr << "error (" << configs[i] << "): " << e.what() << "\n";
                }
                int cur = worst.load();
                while (code > cur && !worst.compare_exchange_weak(cur, code)) {
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    return worst.load();
}

void add_common_options(CLI::App* cmd, RunOptions& opts, std::vector<std::string>& configs,
                        int& jobs) {
    const auto layered_double = [&](Layered<double>& slot) {
        return [&slot](const std::string& s) { slot.set(std::stod(s), 2); };
    };
    const auto layered_long = [](Layered<long>& slot) {
        return [&slot](const std::string& s) { slot.set(std::stol(s), 2); };
    };
    const auto layered_string = [](Layered<std::string>& slot) {
        return [&slot](const std::string& s) { slot.set(s, 2); };
    };
    cmd->add_option_function<std::string>("--example", layered_string(opts.example),
                                          "Built-in problem id (ex1|ex2|ex3)");
    cmd->add_option("--config", configs, "INI config file(s); repeat for a batch run");
    cmd->add_option_function<std::string>(
        "--seed", [&opts](const std::string& s) { opts.seed.set(std::stoull(s), 2); },
        "Seed for generated data and sampling");
    cmd->add_option_function<std::string>("--lambda", layered_double(opts.lambda), "Step size");
    cmd->add_option_function<std::string>("--lambda-frac", layered_double(opts.lambda_frac),
                                          "Step size as a fraction f, giving f/(1+beta^2)");
    cmd->add_option_function<std::string>("--tol", layered_double(opts.tol), "Stopping tolerance");
    cmd->add_option_function<std::string>("--x0", layered_string(opts.x0_csv),
                                          "Start point, comma-separated");
    cmd->add_option_function<std::string>("--output", layered_string(opts.outdir),
                                          "Output directory (default $FBF_OUTPUT_DIR)");
    cmd->add_option("--jobs", jobs, "Concurrent runs in batch mode");
    (void)layered_long;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"FBF dynamical-system toolkit for mixed variational inequalities"};
    app.require_subcommand(1);

    RunOptions solve_opts, iter_opts, analyze_opts;
    std::vector<std::string> solve_configs, iter_configs, analyze_configs;
    int solve_jobs = 1, iter_jobs = 1, analyze_jobs = 1;

    auto* solve = app.add_subcommand(
        "solve", "Integrate the continuous system; writes trajectory CSV and a run report");
    add_common_options(solve, solve_opts, solve_configs, solve_jobs);
    solve->add_option_function<std::string>(
        "--dt", [&](const std::string& s) { solve_opts.dt.set(std::stod(s), 2); }, "Time step");
    solve->add_option_function<std::string>(
        "--t-end", [&](const std::string& s) { solve_opts.t_end.set(std::stod(s), 2); },
        "Integration horizon");
    solve->add_option_function<std::string>(
        "--scheme", [&](const std::string& s) { solve_opts.scheme.set(s, 2); }, "euler|rk4");
    solve->add_option_function<std::string>(
        "--method", [&](const std::string& s) { solve_opts.method.set(s, 2); },
        "Continuous system: fbf|proxgrad");
    solve->add_option_function<std::string>(
        "--stride", [&](const std::string& s) { solve_opts.stride.set(std::stol(s), 2); },
        "Record every k-th state");
    solve->add_option_function<std::string>(
        "--delta", [&](const std::string& s) { solve_opts.delta.set(std::stod(s), 2); },
        "Prox-gradient flow speed");
    solve->add_flag_callback(
        "--allow-invalid-lambda",
        [&] { solve_opts.allow_invalid_lambda.set(true, 2); },
        "Skip the lambda admissibility check");

    auto* iter = app.add_subcommand(
        "iterate", "Run the discrete solver; writes iterate CSV and a run report");
    add_common_options(iter, iter_opts, iter_configs, iter_jobs);
    iter->add_option_function<std::string>(
        "--relaxation", [&](const std::string& s) { iter_opts.relaxation.set(std::stod(s), 2); },
        "Relaxation weight in (0,1]");
    iter->add_option_function<std::string>(
        "--max-iters", [&](const std::string& s) { iter_opts.max_iters.set(std::stol(s), 2); },
        "Iteration cap");
    iter->add_option_function<std::string>(
        "--method", [&](const std::string& s) { iter_opts.method.set(s, 2); }, "tseng|proxgrad");

    auto* analyze = app.add_subcommand(
        "analyze", "Estimate operator constants and classify monotonicity; writes JSON");
    add_common_options(analyze, analyze_opts, analyze_configs, analyze_jobs);
    analyze->add_option_function<std::string>(
        "--samples", [&](const std::string& s) { analyze_opts.samples.set(std::stol(s), 2); },
        "Sample pairs for estimation");
    analyze->add_option_function<std::string>(
        "--box-lo", [&](const std::string& s) { analyze_opts.box_lo.set(std::stod(s), 2); },
        "Sampling box lower bound");
    analyze->add_option_function<std::string>(
        "--box-hi", [&](const std::string& s) { analyze_opts.box_hi.set(std::stod(s), 2); },
        "Sampling box upper bound");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) return run_with_configs(Mode::Solve, solve_opts, solve_configs, solve_jobs);
        if (iter->parsed()) return run_with_configs(Mode::Iterate, iter_opts, iter_configs, iter_jobs);
        if (analyze->parsed()) {
            return run_with_configs(Mode::Analyze, analyze_opts, analyze_configs, analyze_jobs);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
