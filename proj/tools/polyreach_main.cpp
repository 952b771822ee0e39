// polyreach command-line front end: fit variation models from measured
// samples, verify networks under process variations, run Monte-Carlo
// conformance checks, compare against the degree-1 baseline, and emit
// benchmark fixtures.
//
// Exit codes: 0 success, 2 usage or format error, 3 resource-limit abort.

#include "polyreach/polyreach.hpp"
#include "polyreach/zonotope_baseline.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitResource = 3;

std::uint64_t default_seed() {
    if (const char* env = std::getenv("POLYREACH_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw polyreach::FormatError("POLYREACH_SEED is not an integer");
        }
    }
    return 0;
}

std::vector<polyreach::Pattern> load_patterns(const std::string& path, Eigen::Index expected_dim) {
    std::ifstream in(path);
    if (!in) throw polyreach::FormatError("cannot open '" + path + "'");
    return polyreach::read_patterns_csv(in, expected_dim);
}

struct VerifyArgs {
    std::string net_path, model_path, patterns_path, report_path, dump_dir;
    double sigma_mult = 3.0;
    double epsilon = 0.0;
    unsigned jobs = 0;
    Eigen::Index max_gens = 2000;
    Eigen::Index hard_cap = 200000;
};

int cmd_verify(const VerifyArgs& args) {
    const polyreach::NetworkSpec net =
        polyreach::network_from_json(polyreach::load_json_file(args.net_path));
    const polyreach::VariationModel model =
        polyreach::variation_model_from_json(polyreach::load_json_file(args.model_path));
    const auto patterns = load_patterns(args.patterns_path, net.input_dim);

    polyreach::PropagationOptions opts;
    opts.max_gens = args.max_gens;
    opts.hard_cap = args.hard_cap;
    opts.record_layer_hulls = true;
    opts.record_layer_sets = !args.dump_dir.empty();

    std::vector<polyreach::VerificationReport> reports(patterns.size());
    polyreach::parallel_for(patterns.size(), args.jobs, [&](std::size_t i) {
        polyreach::VerificationTask task;
        task.pattern = patterns[i].x;
        task.label = patterns[i].label;
        task.epsilon = args.epsilon;
        task.sigma_multiplier = args.sigma_mult;
        reports[i] = polyreach::verify_pattern(net, model, task, opts);
    });

    std::size_t verified = 0, nominal_ok = 0;
    polyreach::json per_pattern = polyreach::json::array();
    for (std::size_t i = 0; i < patterns.size(); ++i) {
        const auto& r = reports[i];
        verified += r.verified ? 1 : 0;
        nominal_ok += (r.nominal_prediction == patterns[i].label) ? 1 : 0;
        std::cout << "pattern " << i << ": label=" << patterns[i].label
                  << " nominal=" << r.nominal_prediction
                  << " verified=" << (r.verified ? "yes" : "no") << " time=" << std::fixed
                  << std::setprecision(3) << r.wall_time_s << "s\n";
        polyreach::json pj = polyreach::to_json(r);
        pj["pattern_index"] = i;
        pj["label"] = patterns[i].label;
        per_pattern.push_back(std::move(pj));

        if (!args.dump_dir.empty()) {
            std::filesystem::create_directories(args.dump_dir);
            for (std::size_t k = 0; k < r.layer_sets.size(); ++k) {
                const std::string path = args.dump_dir + "/pattern_" + std::to_string(i) + "_layer_" +
                                         std::to_string(k) + ".json";
                polyreach::save_json_file(path, polyreach::to_json(r.layer_sets[k]));
            }
        }
    }
    const double va = static_cast<double>(verified) / static_cast<double>(patterns.size());
    const double na = static_cast<double>(nominal_ok) / static_cast<double>(patterns.size());
    std::cout << "aggregate: patterns=" << patterns.size() << " nominal_accuracy=" << std::fixed
              << std::setprecision(4) << na << " verified_accuracy=" << va << "\n";

    if (!args.report_path.empty()) {
        polyreach::json report;
        report["network"] = args.net_path;
        report["model"] = args.model_path;
        report["sigma_multiplier"] = args.sigma_mult;
        report["epsilon"] = args.epsilon;
        report["patterns"] = std::move(per_pattern);
        report["aggregate"] = {{"patterns", patterns.size()},
                               {"verified_accuracy", va},
                               {"nominal_accuracy", na}};
        polyreach::save_json_file(args.report_path, report);
    }
    return kExitOk;
}

struct McArgs {
    std::string net_path, model_path, patterns_path, dump_path;
    int samples = 1000;
    bool truncated = false;
    double sigma_mult = 3.0;
    std::uint64_t seed = 0;
    bool seed_set = false;
    unsigned jobs = 0;
};

int cmd_mc(const McArgs& args) {
    const polyreach::NetworkSpec net =
        polyreach::network_from_json(polyreach::load_json_file(args.net_path));
    polyreach::VariationModel model =
        polyreach::variation_model_from_json(polyreach::load_json_file(args.model_path));
    model.sigma_multiplier = args.sigma_mult;
    const auto patterns = load_patterns(args.patterns_path, net.input_dim);
    const std::uint64_t seed = args.seed_set ? args.seed : default_seed();

    std::ofstream dump;
    if (!args.dump_path.empty()) {
        dump.open(args.dump_path);
        if (!dump) throw polyreach::FormatError("cannot write '" + args.dump_path + "'");
    }

    std::cout << "seed=" << seed << " samples=" << args.samples
              << " truncated=" << (args.truncated ? "yes" : "no") << "\n";
    double total = 0.0;
    for (std::size_t i = 0; i < patterns.size(); ++i) {
        const polyreach::PolyZonotope input = polyreach::build_input_set(patterns[i].x, 0.0);
        const auto prop = polyreach::propagate_set(net, model, input);
        const polyreach::IntervalVec hull = polyreach::interval_hull(prop.output);

        polyreach::McOptions mc;
        mc.samples = args.samples;
        mc.truncated = args.truncated;
        mc.seed = seed + i;
        mc.jobs = args.jobs;
        const polyreach::McRun run = polyreach::run_monte_carlo(net, model, patterns[i].x, mc);
        const double pct = 100.0 * polyreach::enclosure_percentage(run.outputs, hull);
        total += pct;
        std::cout << "pattern " << i << ": enclosure=" << std::fixed << std::setprecision(2) << pct
                  << "%\n";
        if (dump.is_open()) polyreach::write_mc_csv(dump, mc.seed, run, model);
    }
    std::cout << "average enclosure: " << std::fixed << std::setprecision(2)
              << total / static_cast<double>(patterns.size()) << "%\n";
    return kExitOk;
}

struct CompareArgs {
    std::string net_path, model_path, patterns_path, out_path;
    double sigma_mult = 3.0;
    double epsilon = 0.0;
    unsigned jobs = 0;
};

int cmd_compare(const CompareArgs& args) {
    const polyreach::NetworkSpec net =
        polyreach::network_from_json(polyreach::load_json_file(args.net_path));
    const polyreach::VariationModel model =
        polyreach::variation_model_from_json(polyreach::load_json_file(args.model_path));
    const auto patterns = load_patterns(args.patterns_path, net.input_dim);

    struct Row {
        polyreach::VerificationReport poly, zono;
    };
    std::vector<Row> rows(patterns.size());
    polyreach::parallel_for(patterns.size(), args.jobs, [&](std::size_t i) {
        polyreach::VerificationTask task;
        task.pattern = patterns[i].x;
        task.label = patterns[i].label;
        task.epsilon = args.epsilon;
        task.sigma_multiplier = args.sigma_mult;
        rows[i].poly = polyreach::verify_pattern(net, model, task);
        rows[i].zono = polyreach::verify_pattern_zonotope(net, model, task);
    });

    std::ofstream out;
    if (!args.out_path.empty()) {
        out.open(args.out_path);
        if (!out) throw polyreach::FormatError("cannot write '" + args.out_path + "'");
        out.precision(17);
        out << "pattern,dim,poly_lower,poly_upper,zono_lower,zono_upper,poly_width,zono_width,"
               "poly_verified,zono_verified\n";
    }
    for (std::size_t i = 0; i < patterns.size(); ++i) {
        const auto& r = rows[i];
        std::cout << "pattern " << i << ": poly=" << (r.poly.verified ? "verified" : "unverified")
                  << " zono=" << (r.zono.verified ? "verified" : "unverified") << "\n";
        if (out.is_open()) {
            for (Eigen::Index d = 0; d < r.poly.output_hull.dim(); ++d) {
                out << i << ',' << d << ',' << r.poly.output_hull.lower(d) << ','
                    << r.poly.output_hull.upper(d) << ',' << r.zono.output_hull.lower(d) << ','
                    << r.zono.output_hull.upper(d) << ',' << r.poly.output_hull.width()(d) << ','
                    << r.zono.output_hull.width()(d) << ',' << (r.poly.verified ? 1 : 0) << ','
                    << (r.zono.verified ? 1 : 0) << '\n';
            }
        }
    }
    return kExitOk;
}

struct FitArgs {
    std::string samples_path, out_path;
    double sigma1 = -1.0;
    double sigma2 = -1.0;
};

int cmd_fit(const FitArgs& args) {
    std::ifstream in(args.samples_path);
    if (!in) throw polyreach::FormatError("cannot open '" + args.samples_path + "'");
    const auto rows = polyreach::read_samples_csv(in);
    polyreach::VariationModel model;
    try {
        model = polyreach::fit_model_from_samples(rows, args.sigma1, args.sigma2);
    } catch (const std::runtime_error& e) {
        std::cerr << "fit error: " << e.what() << "\n";
        return kExitUsage;
    }
    std::cout << "sigma1=" << model.sigma1 << " sigma2=" << model.sigma2 << "\n";
    for (int code = 0; code < polyreach::kNumWeightCodes; ++code) {
        for (int v = 0; v < polyreach::kNumVariants; ++v) {
            const auto& cm = model.weights[static_cast<std::size_t>(code)][v];
            if (!cm.present) continue;
            std::cout << "code " << code << " " << to_string(static_cast<polyreach::WeightVariant>(v))
                      << ": residual_half_width=" << cm.d3_half_width << "\n";
        }
    }
    polyreach::save_json_file(args.out_path, polyreach::to_json(model));
    std::cout << "wrote " << args.out_path << "\n";
    return kExitOk;
}

struct FixtureArgs {
    std::string shape = "iris";
    std::string out_dir = ".";
    std::uint64_t seed = 7;
    int patterns = 50;
};

int cmd_fixture(const FixtureArgs& args) {
    const auto shape = polyreach::fixture_shape_from_string(args.shape);
    std::filesystem::create_directories(args.out_dir);

    const polyreach::NetworkSpec net = polyreach::make_fixture_network(shape, args.seed);
    polyreach::save_json_file(args.out_dir + "/net.json", polyreach::to_json(net));

    const auto rows = polyreach::make_fit_samples(args.seed);
    {
        std::ofstream out(args.out_dir + "/samples.csv");
        polyreach::write_samples_csv(out, rows);
    }
    const polyreach::VariationModel model = polyreach::make_fixture_model(args.seed);
    polyreach::save_json_file(args.out_dir + "/coeffs.json", polyreach::to_json(model));

    const auto pats = polyreach::make_fixture_patterns(net, static_cast<std::size_t>(args.patterns),
                                                       args.seed);
    std::vector<polyreach::Pattern> rows_out;
    rows_out.reserve(pats.size());
    for (const auto& [x, label] : pats) rows_out.push_back({x, label});
    {
        std::ofstream out(args.out_dir + "/patterns.csv");
        polyreach::write_patterns_csv(out, rows_out);
    }
    std::cout << "wrote " << args.out_dir << "/{net.json, coeffs.json, samples.csv, patterns.csv}\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Set-based verification of analog neural networks under process variations"};
    app.require_subcommand(1);

    VerifyArgs verify_args;
    auto* verify = app.add_subcommand("verify", "Verify patterns against a variation model");
    verify->add_option("net", verify_args.net_path, "network JSON")->required();
    verify->add_option("coeffs", verify_args.model_path, "variation model JSON")->required();
    verify->add_option("patterns", verify_args.patterns_path, "patterns CSV")->required();
    verify->add_option("--sigma-mult", verify_args.sigma_mult, "domain multiplier k (k-sigma)");
    verify->add_option("--epsilon", verify_args.epsilon, "input perturbation radius");
    verify->add_option("--report", verify_args.report_path, "write report JSON here");
    verify->add_option("--jobs", verify_args.jobs, "parallel patterns (0 = cores)");
    verify->add_option("--max-gens", verify_args.max_gens, "order reduction budget");
    verify->add_option("--hard-cap", verify_args.hard_cap, "abort when a set exceeds this many generators");
    verify->add_option("--dump-sets", verify_args.dump_dir, "dump per-layer sets to this directory");

    McArgs mc_args;
    auto* mc = app.add_subcommand("mc", "Monte-Carlo conformance of enclosures");
    mc->add_option("net", mc_args.net_path, "network JSON")->required();
    mc->add_option("coeffs", mc_args.model_path, "variation model JSON")->required();
    mc->add_option("patterns", mc_args.patterns_path, "patterns CSV")->required();
    mc->add_option("--samples", mc_args.samples, "samples per pattern")
        ->check(CLI::PositiveNumber);
    mc->add_flag("--truncated", mc_args.truncated, "truncate draws to the k-sigma domains");
    mc->add_option("--sigma-mult", mc_args.sigma_mult, "domain multiplier k (k-sigma)");
    mc->add_option("--seed", mc_args.seed, "RNG seed (default: POLYREACH_SEED or 0)")
        ->each([&](const std::string&) { mc_args.seed_set = true; });
    mc->add_option("--jobs", mc_args.jobs, "parallel samples (0 = cores)");
    mc->add_option("--dump", mc_args.dump_path, "write per-sample CSV here");

    CompareArgs compare_args;
    auto* compare = app.add_subcommand("compare", "Polynomial vs degree-1 zonotope baseline");
    compare->add_option("net", compare_args.net_path, "network JSON")->required();
    compare->add_option("coeffs", compare_args.model_path, "variation model JSON")->required();
    compare->add_option("patterns", compare_args.patterns_path, "patterns CSV")->required();
    compare->add_option("--sigma-mult", compare_args.sigma_mult, "domain multiplier k (k-sigma)");
    compare->add_option("--epsilon", compare_args.epsilon, "input perturbation radius");
    compare->add_option("-o,--out", compare_args.out_path, "write paired hull CSV here");
    compare->add_option("--jobs", compare_args.jobs, "parallel patterns (0 = cores)");

    FitArgs fit_args;
    auto* fit = app.add_subcommand("fit", "Fit a variation model from measured samples");
    fit->add_option("samples", fit_args.samples_path, "samples CSV")->required();
    fit->add_option("-o,--out", fit_args.out_path, "output model JSON")->required();
    fit->add_option("--sigma1", fit_args.sigma1, "override sigma1 (default: estimate from data)");
    fit->add_option("--sigma2", fit_args.sigma2, "override sigma2 (default: estimate from data)");

    FixtureArgs fixture_args;
    auto* fixture = app.add_subcommand("fixture", "Emit a benchmark fixture");
    fixture->add_option("--shape", fixture_args.shape,
                        "breast-cancer | iris | mnist-dense | mnist-cnn")
        ->required();
    fixture->add_option("--out", fixture_args.out_dir, "output directory")->required();
    fixture->add_option("--seed", fixture_args.seed, "generator seed");
    fixture->add_option("--patterns", fixture_args.patterns, "pattern count")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp" ? kExitOk
                                                                                 : kExitUsage;
    }

    try {
        if (*verify) return cmd_verify(verify_args);
        if (*mc) return cmd_mc(mc_args);
        if (*compare) return cmd_compare(compare_args);
        if (*fit) return cmd_fit(fit_args);
        if (*fixture) return cmd_fixture(fixture_args);
    } catch (const polyreach::ResourceLimitError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitResource;
    } catch (const polyreach::FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
