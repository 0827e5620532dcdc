#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "diagnostics.hpp"
#include "dual_sampler.hpp"
#include "io.hpp"
#include "reflector.hpp"
#include "targets.hpp"

namespace goas {

struct PipelineConfig {
    std::string target_name = "banana";
    std::map<std::string, double> target_params;

    bool domain_auto = true;
    std::vector<double> domain_lower;
    std::vector<double> domain_upper;
    double domain_threshold_rel = 1e-6;
    double domain_padding = 0.10;
    std::size_t domain_probes = 10000;

    Scheme scheme = Scheme::hammersley;
    std::size_t k = 100;
    double total_energy = 1.0;
    double drop_threshold_rel = 1e-3; // discard discretization points this far below the peak
    std::size_t chain_length = 30000;
    double chain_threshold_rel = 1e-6;
    double chain_step_scale = 0.0; // 0: derived from the detected domain

    std::size_t rays = 100000;
    double eps = 1e-4;
    double d1 = 1.0;
    double alpha = 2.0;
    Orientation orientation = Orientation::convex;
    std::uint64_t max_iterations = 0;
    double delta_divisor = 3.0;

    ProposalKind proposal = ProposalKind::uniform_box;
    double proposal_width_override = 0.0;

    std::size_t sample_count = 5000;
    std::uint64_t retry_cap = 10000;

    std::uint64_t build_seed = 1;
    std::uint64_t sample_seed = 2;
    std::uint64_t chain_seed = 3;

    unsigned threads = 0; // 0: hardware concurrency
    std::string output_dir;

    unsigned effective_threads() const { return threads == 0 ? default_threads() : threads; }

    void validate() const {
        if (k == 0 || rays == 0 || sample_count == 0)
            throw Error("config: k, rays and sample count must be >= 1");
        if (!(eps > 0.0)) throw Error("config: eps must be positive");
        if (!(d1 > 0.0)) throw Error("config: d1 must be positive");
        if (!(alpha > 1.0)) throw Error("config: alpha must exceed 1");
        if (!(total_energy > 0.0)) throw Error("config: total_energy must be positive");
        if (!(delta_divisor > 1.0)) throw Error("config: delta_divisor must exceed 1");
        if (!domain_auto && (domain_lower.empty() || domain_lower.size() != domain_upper.size()))
            throw Error("config: explicit domain needs matching lower/upper lists");
        const auto& names = target_names();
        if (std::find(names.begin(), names.end(), target_name) == names.end())
            throw UnknownName("config: unknown target '" + target_name + "'");
    }
};

inline PipelineConfig config_from_ini(const Ini& ini) {
    PipelineConfig c;
    c.target_name = ini.get("target.name", c.target_name);
    for (const auto& [key, value] : ini.values())
        if (key.rfind("target.", 0) == 0 && key != "target.name")
            c.target_params[key.substr(7)] = parse_double(value);

    c.domain_auto = ini.get("domain.auto", "true") != "false";
    c.domain_lower = ini.get_list("domain.lower");
    c.domain_upper = ini.get_list("domain.upper");
    if (!c.domain_lower.empty()) c.domain_auto = false;
    c.domain_threshold_rel = ini.get_double("domain.threshold_rel", c.domain_threshold_rel);
    c.domain_padding = ini.get_double("domain.padding", c.domain_padding);
    c.domain_probes = ini.get_u64("domain.probes", c.domain_probes);

    c.scheme = scheme_from_string(ini.get("discretize.scheme", "hammersley"));
    c.k = ini.get_u64("discretize.k", c.k);
    c.total_energy = ini.get_double("discretize.total_energy", c.total_energy);
    c.drop_threshold_rel = ini.get_double("discretize.drop_threshold_rel", c.drop_threshold_rel);
    c.chain_length = ini.get_u64("discretize.chain_length", c.chain_length);
    c.chain_threshold_rel = ini.get_double("discretize.chain_threshold_rel", c.chain_threshold_rel);
    c.chain_step_scale = ini.get_double("discretize.chain_step_scale", c.chain_step_scale);

    c.rays = ini.get_u64("reflector.rays", c.rays);
    c.eps = ini.get_double("reflector.epsilon", c.eps);
    c.d1 = ini.get_double("reflector.d1", c.d1);
    c.alpha = ini.get_double("reflector.alpha", c.alpha);
    c.orientation = orientation_from_string(ini.get("reflector.orientation", "convex"));
    c.max_iterations = ini.get_u64("reflector.max_iterations", 0);
    c.delta_divisor = ini.get_double("reflector.delta_divisor", c.delta_divisor);

    c.proposal = proposal_from_string(ini.get("dual.proposal", "uniform_box"));
    c.proposal_width_override = ini.get_double("dual.width_override", 0.0);

    c.sample_count = ini.get_u64("sample.count", c.sample_count);
    c.retry_cap = ini.get_u64("sample.retry_cap", c.retry_cap);

    c.build_seed = ini.get_u64("seeds.build", c.build_seed);
    c.sample_seed = ini.get_u64("seeds.sample", c.sample_seed);
    c.chain_seed = ini.get_u64("seeds.chain", c.chain_seed);

    c.threads = static_cast<unsigned>(ini.get_u64("run.threads", 0));
    c.output_dir = ini.get("run.output_dir", "");
    c.validate();
    return c;
}

inline std::string config_to_text(const PipelineConfig& c) {
    std::ostringstream out;
    out << "[target]\nname = " << c.target_name << "\n";
    for (const auto& [k2, v] : c.target_params) out << k2 << " = " << format_double(v) << "\n";
    out << "\n[domain]\nauto = " << (c.domain_auto ? "true" : "false") << "\n";
    if (!c.domain_lower.empty()) {
        out << "lower =";
        for (std::size_t i = 0; i < c.domain_lower.size(); ++i)
            out << (i ? "," : " ") << format_double(c.domain_lower[i]);
        out << "\nupper =";
        for (std::size_t i = 0; i < c.domain_upper.size(); ++i)
            out << (i ? "," : " ") << format_double(c.domain_upper[i]);
        out << "\n";
    }
    out << "threshold_rel = " << format_double(c.domain_threshold_rel) << "\n";
    out << "padding = " << format_double(c.domain_padding) << "\n";
    out << "probes = " << c.domain_probes << "\n";
    out << "\n[discretize]\nscheme = " << to_string(c.scheme) << "\nk = " << c.k << "\n";
    out << "total_energy = " << format_double(c.total_energy) << "\n";
    out << "drop_threshold_rel = " << format_double(c.drop_threshold_rel) << "\n";
    out << "chain_length = " << c.chain_length << "\n";
    out << "chain_threshold_rel = " << format_double(c.chain_threshold_rel) << "\n";
    out << "chain_step_scale = " << format_double(c.chain_step_scale) << "\n";
    out << "\n[reflector]\nrays = " << c.rays << "\nepsilon = " << format_double(c.eps) << "\n";
    out << "d1 = " << format_double(c.d1) << "\nalpha = " << format_double(c.alpha) << "\n";
    out << "orientation = " << to_string(c.orientation) << "\n";
    out << "max_iterations = " << c.max_iterations << "\n";
    out << "delta_divisor = " << format_double(c.delta_divisor) << "\n";
    out << "\n[dual]\nproposal = " << to_string(c.proposal) << "\n";
    out << "width_override = " << format_double(c.proposal_width_override) << "\n";
    out << "\n[sample]\ncount = " << c.sample_count << "\nretry_cap = " << c.retry_cap << "\n";
    out << "\n[seeds]\nbuild = " << c.build_seed << "\nsample = " << c.sample_seed
        << "\nchain = " << c.chain_seed << "\n";
    return out.str();
}

// Run manifest: ordered key-value pairs, rendered one per line. Timing keys
// are volatile; everything else is reproducible from config + seeds.
struct RunManifest {
    std::vector<std::pair<std::string, std::string>> entries;

    void put(const std::string& key, const std::string& value) {
        for (auto& e : entries)
            if (e.first == key) { e.second = value; return; }
        entries.emplace_back(key, value);
    }
    void put(const std::string& key, double v) { put(key, format_double(v)); }
    void put(const std::string& key, std::uint64_t v) { put(key, std::to_string(v)); }

    std::string get(const std::string& key) const {
        for (const auto& e : entries)
            if (e.first == key) return e.second;
        throw Error("manifest: missing key '" + key + "'");
    }

    std::string text() const {
        std::ostringstream out;
        for (const auto& [k, v] : entries) out << k << " = " << v << "\n";
        return out.str();
    }
};

struct OfflineArtifacts {
    TargetSpec target;
    Box domain;
    DiscreteTargetMeasure measure;
    Reflector reflector;
    DualReflector dual;
    RunManifest manifest;
    bool converged = true;
    std::vector<std::string> warnings;
    double offline_seconds = 0.0;

    OfflineArtifacts(TargetSpec t, Box d) : target(std::move(t)), domain(std::move(d)) {}
};

namespace detail {

inline Box detect_domain_with_values(std::size_t dim, const std::vector<PlanePoint>& probes,
                                     const std::vector<double>& values, double threshold,
                                     double padding) {
    std::vector<double> lo(dim, std::numeric_limits<double>::infinity());
    std::vector<double> hi(dim, -std::numeric_limits<double>::infinity());
    std::size_t hits = 0;
    for (std::size_t p = 0; p < probes.size(); ++p) {
        if (values[p] <= threshold) continue;
        ++hits;
        for (std::size_t i = 0; i < dim; ++i) {
            lo[i] = std::min(lo[i], probes[p][i]);
            hi[i] = std::max(hi[i], probes[p][i]);
        }
    }
    if (hits == 0) throw EmptyDomain("detect_domain: no probe point exceeds the threshold");
    for (std::size_t i = 0; i < dim; ++i) {
        const double side = hi[i] - lo[i];
        const double pad = side > 0.0 ? padding * side : padding;
        lo[i] -= pad;
        hi[i] += pad;
        if (!(lo[i] < hi[i]))
            throw EmptyDomain("detect_domain: degenerate domain; needs padding > 0");
    }
    return Box(std::move(lo), std::move(hi));
}

inline std::vector<PlanePoint> domain_probe_points(const TargetSpec& target,
                                                   const PipelineConfig& config) {
    std::vector<PlanePoint> probes;
    const std::size_t n = target.density.dim();
    if (target.has_prior()) {
        RngStream rng(config.chain_seed, 17);
        probes.reserve(config.domain_probes);
        for (std::size_t i = 0; i < config.domain_probes; ++i)
            probes.emplace_back(target.prior_draw(rng));
    } else {
        // density-only target: scan a wide bracket with a near-isotropic grid
        const auto per = static_cast<std::size_t>(std::max(
            2.0, std::floor(std::pow(static_cast<double>(config.domain_probes),
                                     1.0 / static_cast<double>(n)))));
        probes = grid_points(target.probe_bracket, std::vector<std::size_t>(n, per));
    }
    return probes;
}

} // namespace detail

// Offline stage: domain detection, discretization (the only K density
// evaluations the reflector needs), supporting-paraboloid build, dual build.
// When the iteration cap is hit the best iterate is kept and `converged` is
// false; artifacts are still produced.
inline OfflineArtifacts run_offline(const PipelineConfig& config) {
    config.validate();
    const auto t0 = std::chrono::steady_clock::now();

    TargetSpec target = make_target(config.target_name, config.target_params);
    const std::size_t n = target.density.dim();
    const unsigned threads = config.effective_threads();

    const long evals_start = target.density.evaluations();

    // --- domain ---
    std::optional<Box> domain;
    std::vector<PlanePoint> chain_states; // populated for the chain scheme
    if (!config.domain_auto) {
        if (config.domain_lower.size() != n)
            throw DimensionMismatch("config: explicit domain dimension mismatch");
        domain.emplace(config.domain_lower, config.domain_upper);
    }

    if (config.domain_auto || config.scheme == Scheme::chain) {
        const auto probes = detail::domain_probe_points(target, config);
        std::vector<double> values(probes.size());
        double probe_peak = 0.0;
        for (std::size_t i = 0; i < probes.size(); ++i) {
            values[i] = target.density(probes[i]);
            probe_peak = std::max(probe_peak, values[i]);
        }
        if (!(probe_peak > 0.0))
            throw EmptyDomain("run_offline: target density vanishes on every probe");

        std::optional<Box> probe_domain;
        if (config.domain_auto)
            probe_domain.emplace(detail::detect_domain_with_values(
                n, probes, values, config.domain_threshold_rel * probe_peak,
                config.domain_padding));

        if (config.scheme != Scheme::chain) {
            domain = probe_domain;
        } else {
            // chain scheme: a Markov chain explores the target; its states
            // both discretize the measure (through k-means) and, when the
            // domain is automatic, delimit it.
            std::size_t best = 0;
            for (std::size_t i = 1; i < probes.size(); ++i)
                if (values[i] > values[best]) best = i;
            double scale = config.chain_step_scale;
            if (scale <= 0.0) {
                const Box& ref = domain ? *domain : *probe_domain;
                double mean_side = 0.0;
                for (std::size_t i = 0; i < n; ++i) mean_side += ref.side(i);
                mean_side /= static_cast<double>(n);
                scale = 0.4 * mean_side / std::sqrt(static_cast<double>(n));
            }
            Chain chain = rwmh(target.density, probes[best], config.chain_length, scale,
                               RngStream(config.chain_seed, 23));
            double peak_log = chain.log_density[0];
            for (double v : chain.log_density) peak_log = std::max(peak_log, v);
            const double keep_log = peak_log + std::log(config.chain_threshold_rel);
            const std::size_t burn = chain.length() / 10;
            for (std::size_t t = burn; t < chain.length(); ++t) {
                if (chain.log_density[t] <= keep_log) continue;
                auto s = chain.state(t);
                chain_states.emplace_back(std::vector<double>(s.begin(), s.end()));
            }
            if (chain_states.size() < config.k)
                throw Error("run_offline: chain kept too few states above the threshold");
            if (config.domain_auto) {
                std::vector<double> lo(n, std::numeric_limits<double>::infinity());
                std::vector<double> hi(n, -std::numeric_limits<double>::infinity());
                for (const auto& s : chain_states)
                    for (std::size_t i = 0; i < n; ++i) {
                        lo[i] = std::min(lo[i], s[i]);
                        hi[i] = std::max(hi[i], s[i]);
                    }
                for (std::size_t i = 0; i < n; ++i) {
                    const double side = hi[i] - lo[i];
                    const double pad = side > 0.0 ? config.domain_padding * side
                                                  : config.domain_padding;
                    lo[i] -= pad;
                    hi[i] += pad;
                }
                domain.emplace(std::move(lo), std::move(hi));
            }
        }
    }

    const long evals_domain = target.density.evaluations() - evals_start;

    OfflineArtifacts art(std::move(target), *domain);

    // --- discretize: exactly the K requested density evaluations ---
    const long evals_before_disc = art.target.density.evaluations();
    art.measure = discretize_target(art.target.density, art.domain, config.k, config.scheme,
                                    config.total_energy, RngStream(config.build_seed, 101),
                                    chain_states.empty() ? nullptr : &chain_states,
                                    config.drop_threshold_rel);
    const long evals_discretize = art.target.density.evaluations() - evals_before_disc;

    // --- reflector ---
    RaySet rays = sample_source_rays(config.rays, n, RngStream(config.build_seed, 0));
    rays.set_total_energy(config.total_energy);

    BuildOptions build;
    build.eps = config.eps;
    build.d1 = config.d1;
    build.alpha = config.alpha;
    build.orientation = config.orientation;
    build.max_iterations = config.max_iterations;
    build.delta_divisor = config.delta_divisor;
    build.threads = threads;
    build.warnings = &art.warnings;

    try {
        art.reflector = build_reflector(art.measure, rays, build);
        art.converged = true;
    } catch (const IterationCapExceeded& ex) {
        art.reflector = ex.best;
        art.converged = false;
        art.warnings.push_back(ex.what());
    }

    art.dual = build_dual(art.reflector, rays, art.domain, config.proposal,
                          config.proposal_width_override, threads, &art.warnings);

    const auto t1 = std::chrono::steady_clock::now();
    art.offline_seconds = std::chrono::duration<double>(t1 - t0).count();

    // --- manifest ---
    RunManifest& m = art.manifest;
    const std::string config_text = config_to_text(config);
    m.put("schema", std::string("goas-manifest v1"));
    m.put("config_hash", std::to_string(fnv1a64(config_text)));
    m.put("target", config.target_name);
    m.put("dim", static_cast<std::uint64_t>(n));
    m.put("scheme", to_string(config.scheme));
    m.put("k_requested", static_cast<std::uint64_t>(config.k));
    m.put("k_surviving", static_cast<std::uint64_t>(art.measure.count));
    m.put("rays", static_cast<std::uint64_t>(config.rays));
    m.put("epsilon", config.eps);
    m.put("orientation", to_string(config.orientation));
    m.put("build_seed", config.build_seed);
    m.put("residual", art.reflector.achieved_residual);
    m.put("iterations", art.reflector.iterations);
    m.put("converged", std::string(art.converged ? "true" : "false"));
    m.put("proposal", to_string(config.proposal));
    m.put("proposal_width", art.dual.proposal_width);
    {
        std::int64_t occ_min = art.dual.build_counts[0], occ_max = occ_min;
        for (auto c : art.dual.build_counts) {
            occ_min = std::min(occ_min, c);
            occ_max = std::max(occ_max, c);
        }
        m.put("occupancy_min", static_cast<std::uint64_t>(occ_min));
        m.put("occupancy_max", static_cast<std::uint64_t>(occ_max));
        m.put("occupancy_mean",
              static_cast<double>(config.rays) / static_cast<double>(art.measure.count));
    }
    m.put("density_evals_domain", static_cast<std::uint64_t>(evals_domain));
    m.put("density_evals_discretize", static_cast<std::uint64_t>(evals_discretize));
    m.put("density_evals_online", static_cast<std::uint64_t>(0));
    m.put("offline_seconds", art.offline_seconds);
    m.put("online_seconds", 0.0);
    for (std::size_t i = 0; i < art.warnings.size(); ++i)
        m.put("warning_" + std::to_string(i), art.warnings[i]);
    return art;
}

// Online stage: dual re-simulation only; never evaluates the target density.
inline SampleBatch run_online(const Reflector& reflector, const DualReflector& dual,
                              std::size_t count, std::uint64_t seed, unsigned threads = 1,
                              std::uint64_t retry_cap = 10000, RunManifest* manifest = nullptr) {
    const auto t0 = std::chrono::steady_clock::now();
    SampleBatch batch = sample(count, reflector, dual, RngStream(seed, 1), threads, retry_cap);
    const auto t1 = std::chrono::steady_clock::now();
    if (manifest) {
        manifest->put("sample_count", static_cast<std::uint64_t>(count));
        manifest->put("sample_seed", seed);
        manifest->put("mean_retries", batch.mean_retries());
        manifest->put("online_seconds", std::chrono::duration<double>(t1 - t0).count());
    }
    return batch;
}

// ---------------------------------------------------------------------------
// Artifact persistence: reflector.txt, dual.txt, target.txt, manifest.txt.
// The manifest carries content hashes of the other three files; loading
// verifies them.
// ---------------------------------------------------------------------------

inline void write_artifacts(const std::string& dir, const OfflineArtifacts& art,
                            std::uint64_t build_seed) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const std::string reflector_text = serialize_reflector(art.reflector, build_seed);
    const std::string dual_text = serialize_dual(art.dual);
    const std::string target_text = serialize_target_measure(art.measure);
    write_file(dir + "/reflector.txt", reflector_text);
    write_file(dir + "/dual.txt", dual_text);
    write_file(dir + "/target.txt", target_text);
    RunManifest m = art.manifest;
    m.put("hash_reflector", std::to_string(fnv1a64(reflector_text)));
    m.put("hash_dual", std::to_string(fnv1a64(dual_text)));
    m.put("hash_target", std::to_string(fnv1a64(target_text)));
    write_file(dir + "/manifest.txt", m.text());
}

struct LoadedArtifacts {
    Reflector reflector;
    DualReflector dual;
    DiscreteTargetMeasure measure;
    RunManifest manifest;
    std::uint64_t build_seed = 0;
};

inline LoadedArtifacts load_artifacts(const std::string& dir) {
    LoadedArtifacts out;
    const std::string reflector_text = read_file(dir + "/reflector.txt");
    const std::string dual_text = read_file(dir + "/dual.txt");
    const std::string target_text = read_file(dir + "/target.txt");
    const std::string manifest_text = read_file(dir + "/manifest.txt");

    const Document m = parse_document(manifest_text);
    for (const auto& [k, v] : m.scalars) out.manifest.put(k, v);
    if (m.need("hash_reflector") != std::to_string(fnv1a64(reflector_text)) ||
        m.need("hash_dual") != std::to_string(fnv1a64(dual_text)) ||
        m.need("hash_target") != std::to_string(fnv1a64(target_text)))
        throw Error("artifacts in '" + dir + "' do not match their manifest hashes (stale?)");

    out.reflector = deserialize_reflector(reflector_text, &out.build_seed);
    out.dual = deserialize_dual(dual_text);
    out.measure = deserialize_target_measure(target_text);
    return out;
}

// ---------------------------------------------------------------------------
// Sweep: full pipeline per (K, eps) plus the Sinkhorn distance to a fixed
// reference sample. Rows come out in the cross-product order.
// ---------------------------------------------------------------------------

struct SweepRow {
    std::size_t k = 0;
    double eps = 0.0;
    double residual = 0.0;
    std::uint64_t iterations = 0;
    bool converged = false;
    double w_distance = 0.0;
    bool w_converged = false;
};

inline EmpiricalMeasure thin_to_measure(std::size_t dim, std::span<const double> pts,
                                        std::size_t cap) {
    const std::size_t n = pts.size() / dim;
    const std::size_t stride = n > cap ? (n + cap - 1) / cap : 1;
    std::vector<double> kept;
    for (std::size_t i = 0; i < n; i += stride)
        for (std::size_t c = 0; c < dim; ++c) kept.push_back(pts[i * dim + c]);
    return EmpiricalMeasure::uniform(dim, std::move(kept));
}

inline std::vector<SweepRow> run_sweep(const PipelineConfig& base,
                                       const std::vector<std::size_t>& k_values,
                                       const std::vector<double>& eps_values,
                                       const EmpiricalMeasure& reference, double p = 2.0,
                                       double reg = 1e-3, std::size_t support_cap = 1500) {
    std::vector<SweepRow> rows;
    for (std::size_t k : k_values) {
        for (double eps : eps_values) {
            PipelineConfig c = base;
            c.k = k;
            c.eps = eps;
            c.output_dir.clear();
            OfflineArtifacts art = run_offline(c);
            SampleBatch batch = run_online(art.reflector, art.dual, c.sample_count,
                                           c.sample_seed, c.effective_threads(), c.retry_cap);
            EmpiricalMeasure mine = thin_to_measure(batch.dim, batch.points, support_cap);
            SinkhornOptions so;
            so.threads = c.effective_threads();
            const auto sink = sinkhorn_wasserstein(mine, reference, p, reg,
                                                   GroundMetric::euclidean_plane, so);
            SweepRow row;
            row.k = k;
            row.eps = eps;
            row.residual = art.reflector.achieved_residual;
            row.iterations = art.reflector.iterations;
            row.converged = art.converged;
            row.w_distance = sink.distance;
            row.w_converged = sink.converged;
            rows.push_back(row);
        }
    }
    return rows;
}

// Long thinned RW-MH chain used as the in-repo reference measure.
inline EmpiricalMeasure reference_measure(const TargetSpec& target, const Box& domain,
                                          std::size_t steps, std::uint64_t seed,
                                          std::size_t support_cap) {
    const std::size_t n = target.density.dim();
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale += domain.side(i);
    scale = 0.25 * scale / static_cast<double>(n) / std::sqrt(static_cast<double>(n));

    PlanePoint init(domain.center());
    if (!(target.density(init) > 0.0)) {
        // fall back to the best of a coarse probe grid
        auto probes = grid_points(domain, std::vector<std::size_t>(n, 21));
        std::size_t best = 0;
        double best_v = 0.0;
        for (std::size_t i = 0; i < probes.size(); ++i) {
            const double v = target.density(probes[i]);
            if (v > best_v) { best_v = v; best = i; }
        }
        if (!(best_v > 0.0)) throw ZeroDensityInit("reference_measure: no viable start");
        init = probes[best];
    }
    Chain chain = rwmh(target.density, init, steps, scale, RngStream(seed, 29));
    const std::size_t burn = chain.length() / 5;
    std::span<const double> tail{chain.states.data() + burn * n, (chain.length() - burn) * n};
    return thin_to_measure(n, tail, support_cap);
}

} // namespace goas
