// Command-line front end: reflector construction (build), dual re-simulation
// (sample), Sinkhorn/moments/ESS reports (diagnose), the W_2 vs (K, eps)
// sweep, and target listing. Output is line-oriented `key = value`.
//
// Exit codes: 0 success, 1 usage or IO failure, 2 numerical quality
// (iteration cap hit; best iterate still written).

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "goas/diagnostics.hpp"
#include "goas/io.hpp"
#include "goas/pipeline.hpp"

namespace {

using namespace goas;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitQuality = 2;

void print_kv(const std::string& key, const std::string& value) {
    std::cout << key << " = " << value << "\n";
}

void print_moments(const std::string& prefix, const Moments& mo) {
    for (std::size_t d = 0; d < mo.mean.size(); ++d) {
        const std::string tag = prefix + ".theta" + std::to_string(d + 1);
        print_kv(tag + ".mean", format_double(mo.mean[d]));
        print_kv(tag + ".variance", format_double(mo.variance[d]));
        print_kv(tag + ".skewness", format_double(mo.skewness[d]));
        print_kv(tag + ".kurtosis", format_double(mo.kurtosis[d]));
    }
}

int cmd_build(const std::string& config_path, const std::string& out_dir, unsigned threads) {
    PipelineConfig config = config_from_ini(Ini::parse(read_file(config_path)));
    if (threads > 0) config.threads = threads;
    OfflineArtifacts art = run_offline(config);
    write_artifacts(out_dir, art, config.build_seed);
    std::cout << art.manifest.text();
    for (const auto& w : art.warnings) std::cerr << "warning: " << w << "\n";
    return art.converged ? kExitOk : kExitQuality;
}

int cmd_sample(const std::string& artifact_dir, std::size_t count, std::uint64_t seed,
               const std::string& out_path, unsigned threads, std::uint64_t retry_cap) {
    LoadedArtifacts art = load_artifacts(artifact_dir);
    RunManifest manifest;
    SampleBatch batch =
        run_online(art.reflector, art.dual, count, seed, threads, retry_cap, &manifest);

    const std::string csv = sample_batch_csv(batch);
    write_file(out_path, csv);

    RunManifest meta;
    meta.put("samples", static_cast<std::uint64_t>(batch.count));
    meta.put("seed", seed);
    meta.put("reflector_hash", art.manifest.get("hash_reflector"));
    meta.put("mean_retries", batch.mean_retries());
    meta.put("csv_hash", std::to_string(fnv1a64(csv)));
    write_file(out_path + ".meta.txt", meta.text());

    print_kv("samples", std::to_string(batch.count));
    print_kv("seed", std::to_string(seed));
    print_kv("mean_retries", format_double(batch.mean_retries()));
    {
        std::vector<std::int64_t> occupancy(art.reflector.cell_count, 0);
        for (auto c : batch.cells) ++occupancy[static_cast<std::size_t>(c)];
        std::int64_t occ_min = occupancy[0], occ_max = occupancy[0];
        for (auto c : occupancy) {
            occ_min = std::min(occ_min, c);
            occ_max = std::max(occ_max, c);
        }
        print_kv("cell_occupancy_min", std::to_string(occ_min));
        print_kv("cell_occupancy_max", std::to_string(occ_max));
    }
    print_moments("moments", moments(batch.dim, batch.points));
    return kExitOk;
}

int cmd_diagnose(const std::string& a_path, const std::string& b_path,
                 const std::string& target_name, double p, double reg,
                 const std::string& metric_name, std::size_t ref_steps,
                 std::size_t support_cap, std::uint64_t seed, unsigned threads) {
    const GroundMetric metric = metric_from_string(metric_name);
    print_kv("p", format_double(p));
    print_kv("reg", format_double(reg));
    print_kv("metric", metric_name);

    const CsvSamples a = parse_sample_csv(read_file(a_path));
    print_kv("a.path", a_path);
    print_kv("a.count", std::to_string(a.count()));
    print_moments("a.moments", moments(a.dim, a.points));
    {
        const auto e = ess_series(a.dim, a.points);
        print_kv("a.ess", format_double(e.ess));
        print_kv("a.tau_max", format_double(e.tau_max));
        if (e.degenerate) print_kv("a.ess_degenerate", "true");
    }

    EmpiricalMeasure mb;
    if (!b_path.empty()) {
        const CsvSamples b = parse_sample_csv(read_file(b_path));
        if (b.dim != a.dim) throw DimensionMismatch("diagnose: a and b dimensions differ");
        print_kv("b.path", b_path);
        print_kv("b.count", std::to_string(b.count()));
        print_moments("b.moments", moments(b.dim, b.points));
        const auto e = ess_series(b.dim, b.points);
        print_kv("b.ess", format_double(e.ess));
        mb = thin_to_measure(b.dim, b.points, support_cap);
    } else {
        TargetSpec target = make_target(target_name);
        if (target.density.dim() != a.dim)
            throw DimensionMismatch("diagnose: samples do not match target dimension");
        PipelineConfig probe_config;
        probe_config.target_name = target_name;
        const auto probes = goas::detail::domain_probe_points(target, probe_config);
        std::vector<double> values(probes.size());
        double peak = 0.0;
        for (std::size_t i = 0; i < probes.size(); ++i) {
            values[i] = target.density(probes[i]);
            peak = std::max(peak, values[i]);
        }
        const Box domain = goas::detail::detect_domain_with_values(
            a.dim, probes, values, 1e-6 * peak, 0.10);
        mb = reference_measure(target, domain, ref_steps, seed, support_cap);
        print_kv("b.target", target_name);
        print_kv("b.count", std::to_string(mb.count));
    }

    // lift both supports when the sphere metric is requested
    EmpiricalMeasure ma = thin_to_measure(a.dim, a.points, support_cap);
    if (metric == GroundMetric::geodesic_sphere) {
        auto lift_measure = [](const EmpiricalMeasure& m) {
            std::vector<double> lifted((m.point_dim + 1) * m.count);
            for (std::size_t i = 0; i < m.count; ++i)
                flat::stereographic_lift(m.point(i),
                                         {lifted.data() + i * (m.point_dim + 1), m.point_dim + 1});
            return EmpiricalMeasure(m.point_dim + 1, std::move(lifted), m.weights);
        };
        ma = lift_measure(ma);
        mb = lift_measure(mb);
    }

    SinkhornOptions so;
    so.threads = threads == 0 ? default_threads() : threads;
    const auto sink = sinkhorn_wasserstein(ma, mb, p, reg, metric, so);
    print_kv("w_distance", format_double(sink.distance));
    print_kv("w_converged", sink.converged ? "true" : "false");
    print_kv("w_iterations", std::to_string(sink.iterations));
    print_kv("w_marginal_error", format_double(sink.marginal_error));
    return kExitOk;
}

int cmd_sweep(const std::string& config_path, const std::vector<std::size_t>& k_list,
              const std::vector<double>& eps_list, const std::string& out_path,
              std::size_t ref_steps, std::size_t support_cap, unsigned threads) {
    PipelineConfig config = config_from_ini(Ini::parse(read_file(config_path)));
    if (threads > 0) config.threads = threads;
    if (k_list.empty() || eps_list.empty())
        throw Error("sweep: --k-list and --eps-list must be nonempty");

    TargetSpec target = make_target(config.target_name, config.target_params);
    const auto probes = goas::detail::domain_probe_points(target, config);
    std::vector<double> values(probes.size());
    double peak = 0.0;
    for (std::size_t i = 0; i < probes.size(); ++i) {
        values[i] = target.density(probes[i]);
        peak = std::max(peak, values[i]);
    }
    const Box domain = goas::detail::detect_domain_with_values(
        target.density.dim(), probes, values, config.domain_threshold_rel * peak,
        config.domain_padding);
    const EmpiricalMeasure reference =
        reference_measure(target, domain, ref_steps, config.chain_seed, support_cap);

    const auto rows = run_sweep(config, k_list, eps_list, reference, 2.0, 1e-3, support_cap);

    std::ostringstream csv;
    csv << "k,eps,residual,iterations,converged,w2,w2_converged\n";
    for (const auto& r : rows) {
        csv << r.k << "," << format_double(r.eps) << "," << format_double(r.residual) << ","
            << r.iterations << "," << (r.converged ? 1 : 0) << "," << format_double(r.w_distance)
            << "," << (r.w_converged ? 1 : 0) << "\n";
        print_kv("w2.k" + std::to_string(r.k) + ".eps" + format_double(r.eps),
                 format_double(r.w_distance));
    }
    if (!out_path.empty()) write_file(out_path, csv.str());
    return kExitOk;
}

int cmd_targets_list() {
    for (const auto& name : target_names()) {
        TargetSpec t = make_target(name);
        print_kv("target." + name + ".dim", std::to_string(t.density.dim()));
        print_kv("target." + name + ".prior", t.has_prior() ? "yes" : "no");
    }
    std::cout << "\n# default configuration\n" << config_to_text(PipelineConfig{});
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"geometric-optics reflector sampler"};
    app.require_subcommand(1);
    unsigned threads = 0;
    app.add_option("--threads", threads, "worker thread cap (0 = hardware)");

    auto* build = app.add_subcommand("build", "construct reflector + dual from a config");
    std::string build_config, build_out;
    build->add_option("--config", build_config, "config file")->required();
    build->add_option("--out", build_out, "output directory")->required();

    auto* sampler = app.add_subcommand("sample", "dual re-simulate an existing reflector");
    std::string sample_dir, sample_out;
    std::size_t sample_count = 1000;
    std::uint64_t sample_seed = 1;
    std::uint64_t retry_cap = 10000;
    sampler->add_option("--artifacts", sample_dir, "artifact directory")->required();
    sampler->add_option("--count", sample_count, "number of samples")->required();
    sampler->add_option("--seed", sample_seed, "sampling seed")->required();
    sampler->add_option("--out", sample_out, "output CSV path")->required();
    sampler->add_option("--retry-cap", retry_cap, "per-sample retry cap");

    auto* diag = app.add_subcommand("diagnose", "moments / ESS / Sinkhorn W_p reports");
    std::string diag_a, diag_b, diag_target, diag_metric = "plane";
    double diag_p = 2.0, diag_reg = 1e-3;
    std::size_t diag_ref_steps = 200000, diag_support = 1500;
    std::uint64_t diag_seed = 7;
    diag->add_option("--a", diag_a, "sample CSV")->required();
    diag->add_option("--b", diag_b, "second sample CSV");
    diag->add_option("--target", diag_target, "reference target name (instead of --b)");
    diag->add_option("--p", diag_p, "Wasserstein order");
    diag->add_option("--reg", diag_reg, "Sinkhorn regularization");
    diag->add_option("--metric", diag_metric, "plane | sphere");
    diag->add_option("--ref-steps", diag_ref_steps, "reference chain length");
    diag->add_option("--support", diag_support, "Sinkhorn support cap");
    diag->add_option("--seed", diag_seed, "reference chain seed");

    auto* sweep = app.add_subcommand("sweep", "W_2 against the reference across (K, eps)");
    std::string sweep_config, sweep_out;
    std::vector<std::size_t> sweep_k;
    std::vector<double> sweep_eps;
    std::size_t sweep_ref_steps = 500000, sweep_support = 1500;
    sweep->add_option("--config", sweep_config, "config file")->required();
    sweep->add_option("--k-list", sweep_k, "K values")->required()->delimiter(',');
    sweep->add_option("--eps-list", sweep_eps, "eps values")->required()->delimiter(',');
    sweep->add_option("--out", sweep_out, "output CSV path");
    sweep->add_option("--ref-steps", sweep_ref_steps, "reference chain length");
    sweep->add_option("--support", sweep_support, "Sinkhorn support cap");

    auto* list = app.add_subcommand("targets-list", "list built-in targets and defaults");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (build->parsed()) return cmd_build(build_config, build_out, threads);
        if (sampler->parsed())
            return cmd_sample(sample_dir, sample_count, sample_seed, sample_out, threads,
                              retry_cap);
        if (diag->parsed()) {
            if (diag_b.empty() == diag_target.empty())
                throw goas::Error("diagnose: pass exactly one of --b or --target");
            return cmd_diagnose(diag_a, diag_b, diag_target, diag_p, diag_reg, diag_metric,
                                diag_ref_steps, diag_support, diag_seed, threads);
        }
        if (sweep->parsed())
            return cmd_sweep(sweep_config, sweep_k, sweep_eps, sweep_out, sweep_ref_steps,
                             sweep_support, threads);
        if (list->parsed()) return cmd_targets_list();
    } catch (const goas::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
