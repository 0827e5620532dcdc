#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "dual_sampler.hpp"
#include "errors.hpp"
#include "reflector.hpp"
#include "targets.hpp"

namespace goas {

inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

// Shortest decimal that round-trips a double (17 significant digits).
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline double parse_double(const std::string& s) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw Error("malformed number '" + s + "'");
    }
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
    if (pos != s.size()) throw Error("trailing junk after number '" + s + "'");
    return v;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Writes via a temp file + rename so failures never leave partial output.
inline void write_file(const std::string& path, std::string_view content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open '" + tmp.string() + "' for writing");
        out << content;
        if (!out.good()) throw Error("short write to '" + tmp.string() + "'");
    }
    fs::rename(tmp, target);
}

// ---------------------------------------------------------------------------
// Key-value documents with embedded numeric blocks:
//   key = value
//   begin <block>
//   <rows of space-separated full-precision decimals>
//   end <block>
// ---------------------------------------------------------------------------

struct Document {
    std::map<std::string, std::string> scalars;
    std::map<std::string, std::vector<std::vector<double>>> blocks;

    const std::string& need(const std::string& key) const {
        auto it = scalars.find(key);
        if (it == scalars.end()) throw Error("document: missing key '" + key + "'");
        return it->second;
    }
    double need_double(const std::string& key) const { return parse_double(need(key)); }
    std::uint64_t need_u64(const std::string& key) const {
        return static_cast<std::uint64_t>(std::stoull(need(key)));
    }
    const std::vector<std::vector<double>>& need_block(const std::string& key) const {
        auto it = blocks.find(key);
        if (it == blocks.end()) throw Error("document: missing block '" + key + "'");
        return it->second;
    }
};

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return std::string(s.substr(b, e - b));
}

inline Document parse_document(const std::string& text) {
    Document doc;
    std::istringstream in(text);
    std::string line;
    std::string block;
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (!block.empty()) {
            if (t == "end " + block) {
                block.clear();
                continue;
            }
            std::vector<double> row;
            std::istringstream ls(t);
            std::string tok;
            while (ls >> tok) row.push_back(parse_double(tok));
            doc.blocks[block].push_back(std::move(row));
            continue;
        }
        if (t.rfind("begin ", 0) == 0) {
            block = trim(t.substr(6));
            doc.blocks[block];
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw Error("document: malformed line '" + t + "'");
        doc.scalars[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
    }
    if (!block.empty()) throw Error("document: unterminated block '" + block + "'");
    return doc;
}

namespace detail {

inline void emit_block(std::ostringstream& out, const std::string& name,
                       const std::vector<double>& data, std::size_t stride) {
    out << "begin " << name << "\n";
    for (std::size_t i = 0; i < data.size(); i += stride) {
        for (std::size_t c = 0; c < stride; ++c) {
            if (c) out << ' ';
            out << format_double(data[i + c]);
        }
        out << "\n";
    }
    out << "end " << name << "\n";
}

inline std::vector<double> flatten_block(const std::vector<std::vector<double>>& rows,
                                         std::size_t stride, const std::string& what) {
    std::vector<double> flat;
    flat.reserve(rows.size() * stride);
    for (const auto& r : rows) {
        if (r.size() != stride) throw Error("document: ragged block in " + what);
        flat.insert(flat.end(), r.begin(), r.end());
    }
    return flat;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Reflector / dual / target-measure / sample-batch serialization. Reals are
// written with 17 significant digits, so write -> read -> write is
// byte-stable and read values are bit-exact.
// ---------------------------------------------------------------------------

inline std::string serialize_reflector(const Reflector& r, std::uint64_t build_seed) {
    std::ostringstream out;
    out << "goas-reflector = v1\n";
    out << "dim = " << r.sphere_dim << "\n";
    out << "cells = " << r.cell_count << "\n";
    out << "orientation = " << to_string(r.orientation) << "\n";
    out << "d1 = " << format_double(r.d1) << "\n";
    out << "total_energy = " << format_double(r.total_energy) << "\n";
    out << "residual = " << format_double(r.achieved_residual) << "\n";
    out << "iterations = " << r.iterations << "\n";
    out << "build_seed = " << build_seed << "\n";
    detail::emit_block(out, "axes", r.axes, r.sphere_dim + 1);
    detail::emit_block(out, "focal", r.focal, 1);
    detail::emit_block(out, "energies", r.energies, 1);
    return out.str();
}

inline Reflector deserialize_reflector(const std::string& text, std::uint64_t* build_seed = nullptr) {
    const Document doc = parse_document(text);
    if (doc.need("goas-reflector") != "v1") throw Error("reflector: unsupported version");
    Reflector r;
    r.sphere_dim = doc.need_u64("dim");
    r.cell_count = doc.need_u64("cells");
    r.orientation = orientation_from_string(doc.need("orientation"));
    r.d1 = doc.need_double("d1");
    r.total_energy = doc.need_double("total_energy");
    r.achieved_residual = doc.need_double("residual");
    r.iterations = doc.need_u64("iterations");
    if (build_seed) *build_seed = doc.need_u64("build_seed");
    r.axes = detail::flatten_block(doc.need_block("axes"), r.sphere_dim + 1, "axes");
    r.focal = detail::flatten_block(doc.need_block("focal"), 1, "focal");
    r.energies = detail::flatten_block(doc.need_block("energies"), 1, "energies");
    if (r.axes.size() != r.cell_count * (r.sphere_dim + 1) || r.focal.size() != r.cell_count ||
        r.energies.size() != r.cell_count)
        throw Error("reflector: inconsistent block sizes");
    return r;
}

inline std::string serialize_dual(const DualReflector& d) {
    std::ostringstream out;
    out << "goas-dual = v1\n";
    out << "dim = " << d.sphere_dim << "\n";
    out << "cells = " << d.cell_count << "\n";
    out << "orientation = " << to_string(d.orientation) << "\n";
    out << "proposal = " << to_string(d.kind) << "\n";
    out << "width = " << format_double(d.proposal_width) << "\n";
    detail::emit_block(out, "domain_lower", d.domain.lower, d.sphere_dim);
    detail::emit_block(out, "domain_upper", d.domain.upper, d.sphere_dim);
    detail::emit_block(out, "cell_dirs", d.cell_dirs, d.sphere_dim + 1);
    detail::emit_block(out, "mean_radius", d.mean_radius, 1);
    detail::emit_block(out, "dual_focal", d.dual_focal, 1);
    detail::emit_block(out, "cell_centers", d.cell_centers, d.sphere_dim);
    std::vector<double> counts(d.build_counts.begin(), d.build_counts.end());
    detail::emit_block(out, "build_counts", counts, 1);
    return out.str();
}

inline DualReflector deserialize_dual(const std::string& text) {
    const Document doc = parse_document(text);
    if (doc.need("goas-dual") != "v1") throw Error("dual: unsupported version");
    DualReflector d;
    d.sphere_dim = doc.need_u64("dim");
    d.cell_count = doc.need_u64("cells");
    d.orientation = orientation_from_string(doc.need("orientation"));
    d.kind = proposal_from_string(doc.need("proposal"));
    d.proposal_width = doc.need_double("width");
    const std::size_t n = d.sphere_dim;
    d.domain = Box(detail::flatten_block(doc.need_block("domain_lower"), n, "domain"),
                   detail::flatten_block(doc.need_block("domain_upper"), n, "domain"));
    d.sampling_box = d.domain.padded_abs(0.5 * d.proposal_width);
    d.cell_dirs = detail::flatten_block(doc.need_block("cell_dirs"), n + 1, "cell_dirs");
    d.mean_radius = detail::flatten_block(doc.need_block("mean_radius"), 1, "mean_radius");
    d.dual_focal = detail::flatten_block(doc.need_block("dual_focal"), 1, "dual_focal");
    d.cell_centers = detail::flatten_block(doc.need_block("cell_centers"), n, "cell_centers");
    for (const auto& row : doc.need_block("build_counts"))
        d.build_counts.push_back(static_cast<std::int64_t>(row.at(0)));
    if (d.cell_dirs.size() != d.cell_count * (n + 1) || d.dual_focal.size() != d.cell_count)
        throw Error("dual: inconsistent block sizes");
    return d;
}

inline std::string serialize_target_measure(const DiscreteTargetMeasure& t) {
    std::ostringstream out;
    out << "goas-target = v1\n";
    out << "dim = " << t.dim << "\n";
    out << "cells = " << t.count << "\n";
    out << "total_energy = " << format_double(t.total_energy) << "\n";
    detail::emit_block(out, "points", t.points, t.dim);
    detail::emit_block(out, "raw_density", t.raw_density, 1);
    detail::emit_block(out, "energies", t.energies, 1);
    return out.str();
}

inline DiscreteTargetMeasure deserialize_target_measure(const std::string& text) {
    const Document doc = parse_document(text);
    if (doc.need("goas-target") != "v1") throw Error("target measure: unsupported version");
    DiscreteTargetMeasure t;
    t.dim = doc.need_u64("dim");
    t.count = doc.need_u64("cells");
    t.total_energy = doc.need_double("total_energy");
    t.points = detail::flatten_block(doc.need_block("points"), t.dim, "points");
    t.raw_density = detail::flatten_block(doc.need_block("raw_density"), 1, "raw_density");
    t.energies = detail::flatten_block(doc.need_block("energies"), 1, "energies");
    t.axes.resize(t.count * (t.dim + 1));
    for (std::size_t i = 0; i < t.count; ++i)
        flat::stereographic_lift({t.points.data() + i * t.dim, t.dim},
                                 {t.axes.data() + i * (t.dim + 1), t.dim + 1});
    return t;
}

// Sample CSV: header z1,...,zn,cell,retries then one row per sample.
inline std::string sample_batch_csv(const SampleBatch& batch) {
    std::ostringstream out;
    for (std::size_t c = 0; c < batch.dim; ++c) out << "z" << (c + 1) << ",";
    out << "cell,retries\n";
    for (std::size_t i = 0; i < batch.count; ++i) {
        for (std::size_t c = 0; c < batch.dim; ++c)
            out << format_double(batch.points[i * batch.dim + c]) << ",";
        out << batch.cells[i] << "," << batch.retries[i] << "\n";
    }
    return out.str();
}

// Reads a sample CSV (or any z1..zn numeric CSV). Cell/retry columns are
// optional so external point files can be diagnosed too.
struct CsvSamples {
    std::size_t dim = 0;
    std::vector<double> points;
    std::vector<std::int32_t> cells;
    std::vector<std::int32_t> retries;
    std::size_t count() const { return dim == 0 ? 0 : points.size() / dim; }
};

inline CsvSamples parse_sample_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw Error("csv: empty file");
    std::vector<std::string> header;
    {
        std::istringstream hs(trim(line));
        std::string tok;
        while (std::getline(hs, tok, ',')) header.push_back(trim(tok));
    }
    CsvSamples out;
    std::size_t zcols = 0;
    while (zcols < header.size() && header[zcols] == "z" + std::to_string(zcols + 1)) ++zcols;
    if (zcols == 0) throw Error("csv: header must start with z1,z2,...");
    const bool has_cell = zcols < header.size() && header[zcols] == "cell";
    const bool has_retries = has_cell && zcols + 1 < header.size() && header[zcols + 1] == "retries";
    out.dim = zcols;

    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty()) continue;
        std::istringstream ls(t);
        std::string tok;
        std::vector<std::string> cells;
        while (std::getline(ls, tok, ',')) cells.push_back(trim(tok));
        if (cells.size() < zcols)
            throw Error("csv: line " + std::to_string(lineno) + " has too few columns");
        for (std::size_t c = 0; c < zcols; ++c) out.points.push_back(parse_double(cells[c]));
        if (has_cell && cells.size() > zcols)
            out.cells.push_back(static_cast<std::int32_t>(std::stol(cells[zcols])));
        if (has_retries && cells.size() > zcols + 1)
            out.retries.push_back(static_cast<std::int32_t>(std::stol(cells[zcols + 1])));
    }
    if (out.count() == 0) throw Error("csv: no data rows");
    return out;
}

// ---------------------------------------------------------------------------
// Flat INI-style config files:
//   [section]
//   key = value          ->  "section.key"
// ---------------------------------------------------------------------------

class Ini {
public:
    static Ini parse(const std::string& text) {
        Ini ini;
        std::istringstream in(text);
        std::string line, section;
        while (std::getline(in, line)) {
            const std::string t = trim(line);
            if (t.empty() || t[0] == '#' || t[0] == ';') continue;
            if (t.front() == '[') {
                if (t.back() != ']') throw Error("config: malformed section '" + t + "'");
                section = trim(t.substr(1, t.size() - 2));
                continue;
            }
            const auto eq = t.find('=');
            if (eq == std::string::npos) throw Error("config: malformed line '" + t + "'");
            const std::string key = trim(t.substr(0, eq));
            ini.values_[section.empty() ? key : section + "." + key] = trim(t.substr(eq + 1));
        }
        return ini;
    }

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string get(const std::string& key, const std::string& fallback) const {
        auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }

    double get_double(const std::string& key, double fallback) const {
        auto it = values_.find(key);
        return it == values_.end() ? fallback : parse_double(it->second);
    }

    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        try {
            return static_cast<std::uint64_t>(std::stoull(it->second));
        } catch (const std::exception&) {
            throw Error("config: key '" + key + "' is not an integer");
        }
    }

    std::vector<double> get_list(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) return {};
        std::vector<double> out;
        std::istringstream ls(it->second);
        std::string tok;
        while (std::getline(ls, tok, ',')) {
            const std::string t = trim(tok);
            if (!t.empty()) out.push_back(parse_double(t));
        }
        return out;
    }

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

} // namespace goas
