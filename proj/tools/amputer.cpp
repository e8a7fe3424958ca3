// amputer: generate missingness masks and amputed datasets from complete
// data under copula-driven Bernoulli missingness models, evaluate the
// associated joint probabilities and correlations, and run the repeated
// amputation bias study.
//
// Exit codes: 0 success, 1 runtime error, 2 usage error.

#include "ampute/analytics.hpp"
#include "ampute/config.hpp"
#include "ampute/copula.hpp"
#include "ampute/csv.hpp"
#include "ampute/engine.hpp"
#include "ampute/imputation.hpp"
#include "ampute/model.hpp"
#include "ampute/render.hpp"
#include "ampute/scenario.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace ampute;

struct CommonArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::optional<std::string> output;
};

std::uint64_t resolve_seed(const ConfigNode& cfg, const std::optional<std::uint64_t>& flag) {
    if (flag) return *flag;
    if (cfg.has("seed")) return cfg.get_u64("seed");
    throw CLI::ValidationError("--seed", "a seed is required (flag or config key); "
                                         "seeds are never defaulted from the clock");
}

CompleteDataset load_input(const ConfigNode& cfg) {
    CompleteDataset y = load_csv(cfg.get("input"));
    if (cfg.get_bool_or("range_transform", false)) {
        std::optional<int> sort_col;
        if (cfg.has("sort_by")) sort_col = y.column_index(cfg.get("sort_by"));
        y = range_transform(y, sort_col);
    }
    return y;
}

std::pair<std::string, std::string> split_extension(const std::string& path) {
    const auto slash = path.find_last_of('/');
    const auto dot = path.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return {path, ""};
    return {path.substr(0, dot), path.substr(dot)};
}

std::string replicate_path(const std::string& path, int rep, int total) {
    if (total <= 1) return path;
    const auto [stem, ext] = split_extension(path);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "_r%04d", rep + 1);
    return stem + buf + ext;
}

MissProbMatrix probabilities_from_config(const ConfigNode& cfg, const CompleteDataset& y) {
    const ConfigNode& node = cfg.child("probabilities");
    const std::string kind = node.get("kind");
    if (kind == "constant") return MissProbMatrix(y.rows(), y.cols(), node.get_double("value"));
    if (kind == "matrix") {
        const CompleteDataset m = load_csv(node.get("path"));
        if (m.rows() != y.rows() || m.cols() != y.cols())
            throw ValidationError("probability matrix shape does not match the dataset");
        return MissProbMatrix(m.values);
    }
    if (kind == "model") {
        const auto model = model_from_config(node.child("model"), y.rows(), y.cols());
        return compute_probs(model, y);
    }
    throw ValidationError("probabilities: unknown kind \"" + kind + "\"");
}

void write_mask_outputs(const ConfigNode& cfg, const AmputeResult& result, int rep, int reps) {
    save_csv(result.data, replicate_path(cfg.get("output"), rep, reps));
    if (cfg.has("mask_output"))
        save_mask_csv(result.mask, result.data.columns,
                      replicate_path(cfg.get("mask_output"), rep, reps));
}

// Copy the run's effective settings into a rerunnable config artifact.
void emit_resolved_config(const ConfigNode& cfg, std::uint64_t seed, int threads,
                          const std::string& anchor_output) {
    ConfigNode resolved = cfg;
    resolved.set_int("schema", kConfigSchema);
    resolved.set("seed", std::to_string(seed));
    resolved.set_int("threads", threads);
    const auto [stem, ext] = split_extension(anchor_output);
    save_config(resolved, stem + ".resolved.cfg");
}

// --- subcommand bodies ------------------------------------------------------

int run_ampute(const CommonArgs& args) {
    ConfigNode cfg = load_config(args.config_path);
    check_schema(cfg);
    if (args.output) cfg.set("output", *args.output);
    const std::uint64_t seed = resolve_seed(cfg, args.seed);
    const int threads = args.threads.value_or(cfg.get_int_or("threads", 1));
    const int reps = cfg.get_int_or("replications", 1);
    const std::string mode = cfg.get("mode");
    const CompleteDataset y = load_input(cfg);

    for (int rep = 0; rep < reps; ++rep) {
        const std::uint64_t rep_seed =
            reps == 1 ? seed
                      : RngStream::derive(seed, static_cast<std::uint64_t>(StreamPurpose::Replication),
                                          static_cast<std::uint64_t>(rep));
        AmputeResult result;
        if (mode == "rows-iid") {
            const auto copula = copula_from_config(cfg.child("copula"));
            result = ampute_rows_iid(y, probabilities_from_config(cfg, y), copula, rep_seed, threads);
        } else if (mode == "rows-independent") {
            const ConfigNode& rc = cfg.child("row-copulas");
            std::vector<CopulaSpec> copulas;
            copulas.reserve(static_cast<std::size_t>(y.rows()));
            for (int i = 1; i <= y.rows(); ++i) {
                const std::string name = std::to_string(i);
                copulas.push_back(copula_from_config(rc.has_child(name) ? rc.child(name)
                                                                        : rc.child("default")));
            }
            result = ampute_rows_independent(y, probabilities_from_config(cfg, y), copulas,
                                             rep_seed, threads);
        } else if (mode == "cell-sets") {
            result = ampute_cell_sets(y, cell_sets_from_config(cfg.child("cell-sets")), rep_seed);
        } else if (mode == "mechanism") {
            const auto model = model_from_config(cfg.child("model"), y.rows(), y.cols());
            const auto copula = copula_from_config(cfg.child("copula"));
            auto m = ampute_mechanism(y, model, copula, rep_seed, threads);
            if (cfg.has("probs_output")) {
                CompleteDataset probs{y.columns, m.probs.values};
                save_csv(probs, replicate_path(cfg.get("probs_output"), rep, reps));
            }
            result = AmputeResult{std::move(m.mask), std::move(m.data)};
        } else {
            throw ValidationError("ampute: unsupported mode \"" + mode +
                                  "\" (use the scenario/monotone subcommands for those modes)");
        }
        write_mask_outputs(cfg, result, rep, reps);
    }
    emit_resolved_config(cfg, seed, threads, cfg.get("output"));
    return 0;
}

int run_scenario(const CommonArgs& args) {
    ConfigNode cfg = load_config(args.config_path);
    check_schema(cfg);
    if (cfg.get("mode") != "scenario") throw ValidationError("scenario: config mode must be scenario");
    if (args.output) cfg.set("output", *args.output);
    const std::uint64_t seed = resolve_seed(cfg, args.seed);
    const int reps = cfg.get_int_or("replications", 1);
    const CompleteDataset y = load_input(cfg);
    const ScenarioSpec spec = scenario_from_config(cfg.child("scenario"), y.cols());

    for (int rep = 0; rep < reps; ++rep) {
        const std::uint64_t rep_seed =
            reps == 1 ? seed
                      : RngStream::derive(seed, static_cast<std::uint64_t>(StreamPurpose::Replication),
                                          static_cast<std::uint64_t>(rep));
        const auto result = scenario_ampute(y, spec, rep_seed);
        write_mask_outputs(cfg, AmputeResult{result.mask, result.data}, rep, reps);
        if (cfg.has("assignment_output")) {
            std::ofstream out(replicate_path(cfg.get("assignment_output"), rep, reps),
                              std::ios::binary);
            out << "row,scenario\n";
            for (std::size_t i = 0; i < result.assignment.size(); ++i)
                out << (i + 1) << ',' << (result.assignment[i] + 1) << '\n';
        }
    }
    emit_resolved_config(cfg, seed, 1, cfg.get("output"));
    return 0;
}

int run_monotone(const CommonArgs& args) {
    ConfigNode cfg = load_config(args.config_path);
    check_schema(cfg);
    if (cfg.get("mode") != "monotone") throw ValidationError("monotone: config mode must be monotone");
    if (args.output) cfg.set("output", *args.output);
    const std::uint64_t seed = resolve_seed(cfg, args.seed);
    const int reps = cfg.get_int_or("replications", 1);
    const CompleteDataset y = load_input(cfg);
    const MonotoneMixtureSpec spec = monotone_from_config(cfg.child("monotone"));

    for (int rep = 0; rep < reps; ++rep) {
        const std::uint64_t rep_seed =
            reps == 1 ? seed
                      : RngStream::derive(seed, static_cast<std::uint64_t>(StreamPurpose::Replication),
                                          static_cast<std::uint64_t>(rep));
        write_mask_outputs(cfg, ampute_monotone_mixture(y, spec, rep_seed), rep, reps);
    }
    emit_resolved_config(cfg, seed, 1, cfg.get("output"));
    return 0;
}

void write_boxplot_svg(const BiasStudyResult& res, const std::string& path) {
    // one box per mechanism: q1/median/q3 plus whiskers at the extremes
    const int w_box = 80, gap = 40, height = 320, pad = 30;
    double lo = 0.0, hi = 0.0;
    for (const auto& s : res.samples)
        if (!s.failed) {
            lo = std::min(lo, s.bias);
            hi = std::max(hi, s.bias);
        }
    if (lo == hi) hi = lo + 1.0;
    const auto ypix = [&](double v) {
        return pad + (hi - v) / (hi - lo) * (height - 2 * pad);
    };
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write file: " + path);
    const int width = pad * 2 + static_cast<int>(res.summary.size()) * (w_box + gap);
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\""
        << " version=\"1.1\" width=\"" << width << "\" height=\"" << height << "\">\n";
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"0\" y1=\"%.1f\" x2=\"%d\" y2=\"%.1f\" stroke=\"gray\"/>\n",
                  ypix(0.0), width, ypix(0.0));
    out << buf;
    int x = pad;
    for (const auto& m : res.summary) {
        double whisker_lo = 0.0, whisker_hi = 0.0;
        bool first = true;
        for (const auto& s : res.samples)
            if (!s.failed && s.mechanism == m.mechanism) {
                whisker_lo = first ? s.bias : std::min(whisker_lo, s.bias);
                whisker_hi = first ? s.bias : std::max(whisker_hi, s.bias);
                first = false;
            }
        if (m.n_ok > 0) {
            std::snprintf(buf, sizeof(buf),
                          "<line x1=\"%d\" y1=\"%.1f\" x2=\"%d\" y2=\"%.1f\" stroke=\"black\"/>\n",
                          x + w_box / 2, ypix(whisker_lo), x + w_box / 2, ypix(whisker_hi));
            out << buf;
            std::snprintf(buf, sizeof(buf),
                          "<rect x=\"%d\" y=\"%.1f\" width=\"%d\" height=\"%.1f\" fill=\"none\" "
                          "stroke=\"black\"/>\n",
                          x, ypix(m.q3), w_box, ypix(m.q1) - ypix(m.q3));
            out << buf;
            std::snprintf(buf, sizeof(buf),
                          "<line x1=\"%d\" y1=\"%.1f\" x2=\"%d\" y2=\"%.1f\" stroke=\"red\"/>\n",
                          x, ypix(m.median), x + w_box, ypix(m.median));
            out << buf;
        }
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%d\" y=\"%d\" font-size=\"12\" text-anchor=\"middle\">%s</text>\n",
                      x + w_box / 2, height - 8, m.mechanism.c_str());
        out << buf;
        x += w_box + gap;
    }
    out << "</svg>\n";
}

int run_simulate(const CommonArgs& args) {
    ConfigNode cfg = load_config(args.config_path);
    check_schema(cfg);
    if (cfg.get("mode") != "study") throw ValidationError("simulate: config mode must be study");
    const std::uint64_t seed = resolve_seed(cfg, args.seed);
    const int threads = args.threads.value_or(cfg.get_int_or("threads", 1));

    BiasStudyConfig study;
    study.data = load_input(cfg);
    study.target_column = study.data.column_index(cfg.get("target"));
    study.replications = cfg.get_int_or("replications", 200);
    const std::string estimator = cfg.get_or("estimator", "complete-case");
    if (estimator == "complete-case")
        study.estimator = Estimator::CompleteCase;
    else if (estimator == "available-case")
        study.estimator = Estimator::AvailableCase;
    else if (estimator == "pmm-mice")
        study.estimator = Estimator::PmmMice;
    else
        throw ValidationError("simulate: unknown estimator \"" + estimator + "\"");
    study.pmm.n_imputations = cfg.get_int_or("imputations", 5);
    study.pmm.gibbs_iterations = cfg.get_int_or("gibbs_iterations", 5);
    study.pmm.donors = cfg.get_int_or("donors", 5);
    study.seed = seed;
    study.threads = threads;

    const ConfigNode& mechanisms = cfg.child("mechanism");
    for (const auto& [name, node] : mechanisms.children()) {
        MechanismArm arm{node.get_or("label", name),
                         model_from_config(node.child("model"), study.data.rows(),
                                           study.data.cols()),
                         copula_from_config(node.child("copula"))};
        study.mechanisms.push_back(std::move(arm));
    }

    const BiasStudyResult res = run_bias_study(study);

    if (cfg.has("samples_output")) {
        std::ofstream out(cfg.get("samples_output"), std::ios::binary);
        out << "mechanism,replication,status,estimate,bias\n";
        for (const auto& s : res.samples) {
            out << s.mechanism << ',' << (s.replication + 1) << ','
                << (s.failed ? "failed" : "ok") << ',';
            if (s.failed)
                out << "NA,NA";
            else
                out << format_double(s.estimate) << ',' << format_double(s.bias);
            out << '\n';
        }
    }
    if (cfg.has("boxplot_output")) write_boxplot_svg(res, cfg.get("boxplot_output"));

    std::ostringstream table;
    table << "mechanism,n_ok,n_failed,mean_bias,q1,median,q3,donor_violations\n";
    for (const auto& m : res.summary) {
        table << m.mechanism << ',' << m.n_ok << ',' << m.n_failed << ','
              << format_double(m.mean_bias) << ',' << format_double(m.q1) << ','
              << format_double(m.median) << ',' << format_double(m.q3) << ','
              << m.donor_violations << '\n';
    }
    if (cfg.has("summary_output")) {
        std::ofstream out(cfg.get("summary_output"), std::ios::binary);
        out << table.str();
    }
    std::cout << "complete-data mean of target: " << format_double(res.complete_data_mean)
              << "\n"
              << table.str();
    if (cfg.has("samples_output")) emit_resolved_config(cfg, seed, threads, cfg.get("samples_output"));
    return 0;
}

struct AnalyzeArgs {
    std::string family = "independence";
    int dim = 2;
    double rho = 0.0;
    std::string copula_config;
    std::vector<double> p;
    double p1 = 0.5, p2 = 0.5;
    int mc_samples = 1000000;
    std::uint64_t mc_seed = 1;
};

CopulaSpec analyze_copula(const AnalyzeArgs& a, int dim) {
    if (!a.copula_config.empty()) return copula_from_config(load_config(a.copula_config));
    if (a.family == "independence") return CopulaSpec::independence(dim);
    if (a.family == "comonotone") return CopulaSpec::comonotone(dim);
    if (a.family == "countermonotone") return CopulaSpec::countermonotone();
    if (a.family == "homogeneous-gauss") return CopulaSpec::homogeneous_gauss(a.rho, dim);
    throw ValidationError("analyze: unknown copula family \"" + a.family +
                          "\" (use --copula-config for composite specs)");
}

int run_analyze_joint(const AnalyzeArgs& a) {
    std::vector<double> p = a.p;
    if (p.empty()) throw ValidationError("analyze joint: provide --p");
    const auto spec = analyze_copula(a, p.size() == 1 ? a.dim : static_cast<int>(p.size()));
    if (p.size() == 1) p.assign(static_cast<std::size_t>(spec.dim()), p[0]);
    std::cout << "copula: " << spec.describe() << "\n";
    try {
        std::cout << "joint_missingness_prob = " << format_double(joint_missingness_prob(spec, p))
                  << "\n";
    } catch (const UseMonteCarloError&) {
        const auto mc = mc_cdf(spec, p, a.mc_samples, a.mc_seed);
        std::cout << "joint_missingness_prob ~= " << format_double(mc.estimate) << " +/- "
                  << format_double(mc.half_width_95) << " (monte carlo, "
                  << a.mc_samples << " samples)\n";
    }
    return 0;
}

int run_analyze_corr(const AnalyzeArgs& a) {
    const auto spec = analyze_copula(a, 2);
    std::cout << "copula: " << spec.describe() << "\n";
    std::cout << "pairwise_correlation = "
              << format_double(pairwise_correlation(spec, a.p1, a.p2)) << "\n";
    const auto b = correlation_bounds(a.p1, a.p2);
    std::cout << "bounds = [" << format_double(b.rho_min) << ", " << format_double(b.rho_max)
              << "]\n";
    return 0;
}

int run_analyze_bounds(const AnalyzeArgs& a) {
    const auto b = correlation_bounds(a.p1, a.p2);
    std::cout << "rho_min = " << format_double(b.rho_min) << "\n"
              << "rho_max = " << format_double(b.rho_max) << "\n";
    return 0;
}

int run_impute(const std::string& input, const std::string& prefix, int donors, int imputations,
               int iterations, std::uint64_t seed) {
    const auto x = load_csv_amputed(input);
    const auto out = pmm_impute(x, PmmOptions{donors, imputations, iterations}, seed);
    for (std::size_t m = 0; m < out.size(); ++m) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "_imp%zu.csv", m + 1);
        save_csv(out[m], prefix + buf);
    }
    std::cout << "wrote " << out.size() << " completed datasets to " << prefix << "_imp*.csv\n";
    return 0;
}

int run_render(const std::string& input, const std::string& output, const std::string& palette,
               int cell_size, const std::string& mask_path) {
    RenderOptions opt;
    opt.palette = palette;
    opt.cell_size = cell_size;
    AmputedDataset x = load_csv_amputed(input);
    if (!mask_path.empty()) {
        const auto mask = load_mask_csv(mask_path);
        x = apply_mask(CompleteDataset{x.columns, x.values}, mask);
    }
    if (count_missing(x.mask) == 0)
        render_heatmap(x.values, output, opt);
    else
        render_heatmap(x, output, opt);
    std::cout << "wrote " << output << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"copula-driven Bernoulli amputation toolkit"};
    app.require_subcommand(1);

    CommonArgs common;
    AnalyzeArgs analyze;

    auto add_common = [&](CLI::App* sub, bool with_threads = true) {
        sub->add_option("--config", common.config_path, "config file")->required();
        sub->add_option("--seed", common.seed, "RNG seed (overrides the config)");
        if (with_threads) sub->add_option("--threads", common.threads, "worker threads");
        sub->add_option("--output", common.output, "override the config output path");
    };

    add_common(app.add_subcommand("ampute",
                                  "ampute with modes rows-iid, rows-independent, cell-sets, "
                                  "mechanism"));
    add_common(app.add_subcommand("scenario", "scenario-based amputation"), false);
    add_common(app.add_subcommand("monotone", "monotone-missingness mixture amputation"), false);
    add_common(app.add_subcommand("simulate", "repeated amputation bias study"));

    auto* analyze_cmd = app.add_subcommand("analyze", "joint probabilities and correlations");
    analyze_cmd->require_subcommand(1);
    auto add_copula_flags = [&](CLI::App* sub) {
        sub->add_option("--copula", analyze.family,
                        "independence | comonotone | countermonotone | homogeneous-gauss");
        sub->add_option("--dim", analyze.dim, "copula dimension");
        sub->add_option("--rho", analyze.rho, "homogeneous gauss parameter");
        sub->add_option("--copula-config", analyze.copula_config, "config file with a full spec");
    };
    auto* joint = analyze_cmd->add_subcommand("joint", "P(all selected cells missing)");
    add_copula_flags(joint);
    joint->add_option("--p", analyze.p, "marginal probabilities (one value broadcasts to dim)");
    joint->add_option("--mc-samples", analyze.mc_samples, "fallback monte carlo sample count");
    joint->add_option("--mc-seed", analyze.mc_seed, "fallback monte carlo seed");
    auto* corr = analyze_cmd->add_subcommand("corr", "indicator correlation of two cells");
    add_copula_flags(corr);
    corr->add_option("--p1", analyze.p1, "first marginal probability");
    corr->add_option("--p2", analyze.p2, "second marginal probability");
    auto* bounds = analyze_cmd->add_subcommand("bounds", "attainable correlation interval");
    bounds->add_option("--p1", analyze.p1, "first marginal probability");
    bounds->add_option("--p2", analyze.p2, "second marginal probability");

    double c_p = 0.5, c_eps = 0.05, c_min = 0.0, c_max = 1.0;
    int c_k = 1;
    auto* coeffs = app.add_subcommand("coeffs", "probability-implied logistic coefficients");
    coeffs->add_option("--p", c_p, "target probability")->required();
    coeffs->add_option("--eps", c_eps, "half-width of the target interval")->required();
    coeffs->add_option("--cmin", c_min, "covariate lower bound");
    coeffs->add_option("--cmax", c_max, "covariate upper bound");
    coeffs->add_option("--k", c_k, "number of covariates");

    std::string imp_input, imp_prefix = "imputed";
    int imp_donors = 5, imp_m = 5, imp_iters = 5;
    std::uint64_t imp_seed = 0;
    auto* impute = app.add_subcommand("impute", "FCS + predictive-mean-matching imputation");
    impute->add_option("--input", imp_input, "amputed CSV with NA tokens")->required();
    impute->add_option("--output-prefix", imp_prefix, "prefix for the m completed CSVs");
    impute->add_option("--donors", imp_donors, "K nearest donors");
    impute->add_option("--imputations", imp_m, "number of completed datasets");
    impute->add_option("--iterations", imp_iters, "Gibbs sweeps");
    impute->add_option("--seed", imp_seed, "RNG seed")->required();

    std::string r_input, r_output, r_palette = "blues", r_mask;
    int r_cell = 16;
    auto* render = app.add_subcommand("render", "heatmap of a dataset or amputed CSV");
    render->add_option("--input", r_input, "CSV (values in [0,1], NA allowed)")->required();
    render->add_option("--output", r_output, ".ppm or .svg path")->required();
    render->add_option("--palette", r_palette, "blues | grays");
    render->add_option("--cell-size", r_cell, "pixels per cell");
    render->add_option("--mask", r_mask, "apply a 0/1 mask CSV before rendering");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand("ampute")) return run_ampute(common);
        if (app.got_subcommand("scenario")) return run_scenario(common);
        if (app.got_subcommand("monotone")) return run_monotone(common);
        if (app.got_subcommand("simulate")) return run_simulate(common);
        if (app.got_subcommand("analyze")) {
            if (analyze_cmd->got_subcommand("joint")) return run_analyze_joint(analyze);
            if (analyze_cmd->got_subcommand("corr")) return run_analyze_corr(analyze);
            return run_analyze_bounds(analyze);
        }
        if (app.got_subcommand("coeffs")) {
            const auto ic = implied_coefficients(c_p, c_eps, c_min, c_max, c_k);
            std::cout << "beta0 = " << format_double(ic.beta0) << "\n"
                      << "beta_each = " << format_double(ic.beta_each) << "\n";
            return 0;
        }
        if (app.got_subcommand("impute"))
            return run_impute(imp_input, imp_prefix, imp_donors, imp_m, imp_iters, imp_seed);
        if (app.got_subcommand("render"))
            return run_render(r_input, r_output, r_palette, r_cell, r_mask);
    } catch (const CLI::Error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
