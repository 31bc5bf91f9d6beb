#include "acyclic_mpc/workload.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

namespace acyclic_mpc {

namespace {

using nlohmann::json;

std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Skew parse_skew(const std::string& s) {
    if (s == "uniform" || s == "none") return Skew::Uniform;
    if (s == "zipf") return Skew::Zipf;
    if (s == "heavy") return Skew::Heavy;
    throw InputError("unknown skew '" + s + "'");
}

GeneratorSpec parse_generator(const json& j, GeneratorSpec g) {
    if (!j.is_object()) throw InputError("generator must be an object");
    g.seed = j.value("seed", g.seed);
    g.size = j.value("size", g.size);
    g.domain = j.value("domain", g.domain);
    if (j.contains("skew")) g.skew = parse_skew(j.at("skew").get<std::string>());
    g.zipf_s = j.value("s", g.zipf_s);
    g.heavy_fraction = j.value("heavy_fraction", g.heavy_fraction);
    if (j.contains("skewed")) g.skewed = j.at("skewed").get<std::vector<std::string>>();
    if (g.domain == 0) throw InputError("generator domain must be positive");
    if (g.heavy_fraction < 0 || g.heavy_fraction > 1) throw InputError("heavy_fraction must lie in [0, 1]");
    return g;
}

// Inverse-CDF sampler over ranks 0..domain-1 with P(r) ~ 1 / (r + 1)^s.
class ZipfTable {
public:
    ZipfTable(std::uint64_t domain, double s) : cdf_(domain) {
        double acc = 0;
        for (std::uint64_t r = 0; r < domain; ++r) {
            acc += 1.0 / std::pow(static_cast<double>(r + 1), s);
            cdf_[r] = acc;
        }
        for (double& c : cdf_) c /= acc;
    }
    Value operator()(double u) const {
        auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
        return static_cast<Value>(std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1));
    }

private:
    std::vector<double> cdf_;
};

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

QuerySpec QuerySpec::from_json(const json& j, std::filesystem::path base_dir) {
    try {
        QuerySpec q;
        q.base_dir = std::move(base_dir);
        q.attributes = j.at("attributes").get<std::vector<std::string>>();
        GeneratorSpec defaults;
        const bool has_default = j.contains("generator");
        if (has_default) defaults = parse_generator(j.at("generator"), defaults);
        for (const json& r : j.at("relations")) {
            RelationSpec rs;
            rs.name = r.at("name").get<std::string>();
            rs.scheme = r.at("scheme").get<std::vector<std::string>>();
            if (r.contains("csv")) rs.csv = r.at("csv").get<std::string>();
            if (r.contains("generator")) {
                rs.generator = parse_generator(r.at("generator"), defaults);
            } else if (!rs.csv) {
                if (!has_default) throw InputError("relation '" + rs.name + "' has no source");
                rs.generator = defaults;
            }
            q.relations.push_back(std::move(rs));
        }
        if (q.relations.empty()) throw InputError("query has no relations");
        if (j.contains("parents")) q.parents = parse_parents(j.at("parents"));
        return q;
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed query: ") + e.what());
    }
}

QuerySpec QuerySpec::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InputError("cannot parse " + path.string() + ": " + e.what());
    }
    return from_json(j, path.parent_path());
}

std::vector<std::optional<EdgeId>> parse_parents(const json& j) {
    if (!j.is_array()) throw InputError("parents must be an array");
    std::vector<std::optional<EdgeId>> out;
    for (const json& p : j) {
        if (p.is_null()) {
            out.emplace_back();
        } else if (p.is_number_unsigned()) {
            out.emplace_back(p.get<EdgeId>());
        } else {
            throw InputError("parents entries must be null or non-negative integers");
        }
    }
    return out;
}

Hypergraph spec_graph(const QuerySpec& spec) {
    std::vector<AttrSet> edges;
    std::vector<std::string> labels;
    for (const RelationSpec& r : spec.relations) {
        AttrSet s;
        for (const std::string& a : r.scheme) {
            auto it = std::find(spec.attributes.begin(), spec.attributes.end(), a);
            if (it == spec.attributes.end()) throw InputError("relation '" + r.name + "' uses undeclared attribute '" + a + "'");
            s.insert(static_cast<AttrId>(it - spec.attributes.begin()));
        }
        if (s.size() != r.scheme.size()) throw InputError("relation '" + r.name + "' repeats an attribute");
        edges.push_back(s);
        labels.push_back(r.name);
    }
    try {
        return Hypergraph(spec.attributes, std::move(edges), std::move(labels));
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
}

Relation generate_relation(const Hypergraph& g, AttrSet scheme, const GeneratorSpec& spec, std::uint64_t stream) {
    std::mt19937_64 rng(mix(spec.seed ^ mix(stream)));
    std::vector<bool> skewed;
    for (AttrId a : scheme.ids()) {
        skewed.push_back(spec.skewed.empty() ||
                         std::find(spec.skewed.begin(), spec.skewed.end(), g.attribute_name(a)) != spec.skewed.end());
    }
    std::optional<ZipfTable> zipf;
    if (spec.skew == Skew::Zipf) zipf.emplace(spec.domain, spec.zipf_s);

    auto draw = [&](bool skew) -> Value {
        if (skew && spec.skew == Skew::Zipf) return (*zipf)(unit(rng));
        if (skew && spec.skew == Skew::Heavy && unit(rng) < spec.heavy_fraction) return 0;
        return rng() % spec.domain;
    };

    std::set<std::vector<Value>> rows;
    const std::uint64_t attempts = 20 * spec.size;
    for (std::uint64_t i = 0; i < attempts && rows.size() < spec.size; ++i) {
        std::vector<Value> row;
        for (bool s : skewed) row.push_back(draw(s));
        rows.insert(std::move(row));
    }
    Relation out(scheme);
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r);
    return out;
}

Instance materialize(const QuerySpec& spec, std::optional<std::uint64_t> seed) {
    Hypergraph g = spec_graph(spec);
    std::vector<Relation> rels;
    for (std::size_t i = 0; i < spec.relations.size(); ++i) {
        const RelationSpec& r = spec.relations[i];
        const AttrSet scheme = g.edge(static_cast<EdgeId>(i));
        if (r.csv) {
            std::filesystem::path p = *r.csv;
            if (p.is_relative()) p = spec.base_dir / p;
            rels.push_back(read_csv(p, g, scheme));
        } else {
            GeneratorSpec gs = *r.generator;
            if (seed) gs.seed = *seed;
            rels.push_back(generate_relation(g, scheme, gs, i));
        }
    }
    return Instance(std::move(g), std::move(rels));
}

Relation read_csv(std::istream& in, const Hypergraph& g, AttrSet scheme) {
    auto split = [](const std::string& line) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            cell.erase(0, cell.find_first_not_of(" \t\r"));
            cell.erase(cell.find_last_not_of(" \t\r") + 1);
            cells.push_back(cell);
        }
        return cells;
    };
    std::string line;
    if (!std::getline(in, line)) throw InputError("csv has no header row");
    const auto header = split(line);
    if (header.size() != scheme.size()) throw InputError("csv header does not match the relation scheme");
    std::vector<std::size_t> column(header.size());
    AttrSet seen;
    for (std::size_t i = 0; i < header.size(); ++i) {
        auto a = g.find_attribute(header[i]);
        if (!a || !scheme.contains(*a) || seen.contains(*a)) {
            throw InputError("csv header names unexpected attribute '" + header[i] + "'");
        }
        seen.insert(*a);
        column[i] = scheme.rank(*a);
    }
    Relation out(scheme);
    std::vector<Value> row(scheme.size());
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto cells = split(line);
        if (cells.size() != header.size()) throw InputError("csv line " + std::to_string(line_no) + " has the wrong width");
        for (std::size_t i = 0; i < cells.size(); ++i) {
            std::size_t used = 0;
            try {
                if (cells[i].empty() || cells[i][0] == '-') throw std::invalid_argument("sign");
                row[column[i]] = std::stoull(cells[i], &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != cells[i].size() || used == 0) {
                throw InputError("csv line " + std::to_string(line_no) + ": '" + cells[i] + "' is not an unsigned integer");
            }
        }
        out.push_back(row);
    }
    return out;
}

Relation read_csv(const std::filesystem::path& path, const Hypergraph& g, AttrSet scheme) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    return read_csv(in, g, scheme);
}

void write_csv(std::ostream& out, const Relation& r, const Hypergraph& g) {
    const auto ids = r.scheme().ids();
    for (std::size_t i = 0; i < ids.size(); ++i) out << (i ? "," : "") << g.attribute_name(ids[i]);
    out << '\n';
    for (std::size_t t = 0; t < r.size(); ++t) {
        auto u = r.tuple(t);
        for (std::size_t i = 0; i < u.size(); ++i) out << (i ? "," : "") << u[i];
        out << '\n';
    }
}

}  // namespace acyclic_mpc
