#include "acyclic_mpc/simcluster.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <tuple>

namespace acyclic_mpc {

SimCluster::SimCluster(std::size_t machines, std::size_t round_cap) : machines_(machines), round_cap_(round_cap) {
    if (machines == 0) throw std::invalid_argument("a cluster needs at least one machine");
}

void SimCluster::grow(std::size_t round) {
    while (received_.size() <= round) {
        received_.emplace_back(machines_, 0);
        sent_.emplace_back(machines_, 0);
    }
}

void SimCluster::send(std::size_t round, std::size_t from, std::size_t to, std::uint64_t words) {
    if (from >= machines_ || to >= machines_) throw std::out_of_range("machine index out of range");
    grow(round);
    if (from == to || words == 0) return;
    received_[round][to] += words;
    sent_[round][from] += words;
}

void SimCluster::reserve_rounds(std::size_t rounds) {
    if (rounds > 0) grow(rounds - 1);
}

std::uint64_t SimCluster::received(std::size_t round, std::size_t machine) const {
    return round < received_.size() ? received_[round].at(machine) : 0;
}

std::uint64_t SimCluster::sent(std::size_t round, std::size_t machine) const {
    return round < sent_.size() ? sent_[round].at(machine) : 0;
}

std::uint64_t SimCluster::total_received(std::size_t round) const {
    if (round >= received_.size()) return 0;
    return std::accumulate(received_[round].begin(), received_[round].end(), std::uint64_t{0});
}

std::uint64_t SimCluster::total_sent(std::size_t round) const {
    if (round >= sent_.size()) return 0;
    return std::accumulate(sent_[round].begin(), sent_[round].end(), std::uint64_t{0});
}

LoadReport SimCluster::finish() const {
    LoadReport r;
    r.rounds = received_.size();
    r.round_cap = round_cap_;
    for (const auto& row : received_) {
        const std::uint64_t load = row.empty() ? 0 : *std::max_element(row.begin(), row.end());
        r.per_round_load.push_back(load);
        r.max_load = std::max(r.max_load, load);
    }
    return r;
}

MachineBlock::MachineBlock(std::vector<std::vector<std::size_t>> positions) : positions_(std::move(positions)) {
    for (const auto& p : positions_) {
        if (p.empty() || p.size() != positions_.front().size()) {
            throw std::invalid_argument("positions must have the same positive replica count");
        }
    }
}

MachineBlock MachineBlock::contiguous(std::size_t first, std::size_t count) {
    std::vector<std::vector<std::size_t>> pos;
    pos.reserve(count);
    for (std::size_t i = 0; i < count; ++i) pos.push_back({first + i});
    return MachineBlock(std::move(pos));
}

MachineBlock MachineBlock::slice(std::size_t first, std::size_t count) const {
    if (first + count > positions_.size()) throw std::out_of_range("slice exceeds block");
    return MachineBlock(std::vector<std::vector<std::size_t>>(positions_.begin() + static_cast<std::ptrdiff_t>(first),
                                                              positions_.begin() +
                                                                  static_cast<std::ptrdiff_t>(first + count)));
}

MachineBlock MachineBlock::axis(std::span<const std::size_t> dims, std::size_t axis) const {
    std::size_t cells = 1;
    for (std::size_t d : dims) cells *= d;
    if (axis >= dims.size() || cells > positions_.size() || cells == 0) {
        throw std::invalid_argument("grid does not fit the block");
    }
    std::size_t stride = 1;
    for (std::size_t t = axis + 1; t < dims.size(); ++t) stride *= dims[t];
    std::vector<std::vector<std::size_t>> pos(dims[axis]);
    for (std::size_t c = 0; c < cells; ++c) {
        auto& dst = pos[(c / stride) % dims[axis]];
        dst.insert(dst.end(), positions_[c].begin(), positions_[c].end());
    }
    return MachineBlock(std::move(pos));
}

std::uint64_t DistRelation::size() const {
    std::uint64_t n = 0;
    for (const auto& f : fragments) n += f.size();
    return n;
}

std::uint64_t DistRelation::words() const {
    std::uint64_t n = 0;
    for (const auto& f : fragments) n += f.words();
    return n;
}

Relation DistRelation::collect() const {
    Relation out(scheme);
    for (const auto& f : fragments) out.append(f);
    return out;
}

DistRelation place_round_robin(const Relation& r, std::size_t positions) {
    DistRelation out(r.scheme(), positions);
    for (std::size_t i = 0; i < r.size(); ++i) out.fragments[i % positions].push_back(r.tuple(i));
    return out;
}

namespace {

// Message between two positions, one copy per replica of the target.
void transmit(SimCluster& c, std::size_t round, const MachineBlock& from, std::size_t a, const MachineBlock& to,
              std::size_t b, std::uint64_t words) {
    const auto src = from.machines(a);
    const auto dst = to.machines(b);
    for (std::size_t k = 0; k < dst.size(); ++k) c.send(round, src[k % src.size()], dst[k], words);
}

}  // namespace

std::vector<DistRelation> scatter_balanced(SimCluster& c, std::size_t round, const MachineBlock& from,
                                           std::span<const DistRelation> rels, const MachineBlock& to) {
    if (to.empty()) throw std::invalid_argument("scatter target is empty");
    const std::size_t n = to.size();
    std::vector<DistRelation> out;
    std::vector<std::vector<std::uint64_t>> words(from.size(), std::vector<std::uint64_t>(n, 0));
    std::size_t next = 0;
    for (const DistRelation& r : rels) {
        if (r.fragments.size() != from.size()) throw std::invalid_argument("fragment count differs from block");
        DistRelation d(r.scheme, n);
        for (std::size_t a = 0; a < r.fragments.size(); ++a) {
            const Relation& f = r.fragments[a];
            for (std::size_t i = 0; i < f.size(); ++i) {
                d.fragments[next].push_back(f.tuple(i));
                words[a][next] += f.width();
                next = (next + 1) % n;
            }
        }
        out.push_back(std::move(d));
    }
    c.reserve_rounds(round + 1);
    for (std::size_t a = 0; a < from.size(); ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            if (words[a][b] > 0) transmit(c, round, from, a, to, b, words[a][b]);
        }
    }
    return out;
}

Relation broadcast(SimCluster& c, std::size_t round, const MachineBlock& from, const DistRelation& r,
                   const MachineBlock& to) {
    if (r.fragments.size() != from.size()) throw std::invalid_argument("fragment count differs from block");
    c.reserve_rounds(round + 1);
    for (std::size_t a = 0; a < from.size(); ++a) {
        const std::uint64_t w = r.fragments[a].words();
        if (w == 0) continue;
        for (std::size_t b = 0; b < to.size(); ++b) transmit(c, round, from, a, to, b, w);
    }
    return r.collect();
}

DistRelation semi_join(SimCluster& c, std::size_t round, const MachineBlock& block, const DistRelation& big,
                       const DistRelation& small) {
    if (!small.scheme.subset_of(big.scheme)) {
        throw std::invalid_argument("semi-join: small scheme is not contained in big scheme");
    }
    if (big.fragments.size() != block.size() || small.fragments.size() != block.size()) {
        throw std::invalid_argument("fragment count differs from block");
    }
    const std::size_t n = block.size();
    const std::size_t ws = small.scheme.size();
    const std::size_t wb = big.scheme.size();
    std::vector<std::size_t> key_cols;
    for (AttrId x : small.scheme.ids()) key_cols.push_back(big.scheme.rank(x));

    struct Record {
        std::size_t key;  // offset into `keys`
        std::uint8_t tag;  // 0 small, 1 big
        std::uint32_t pos;
        std::size_t idx;
    };
    std::vector<Value> keys;
    std::vector<Record> recs;
    for (std::size_t a = 0; a < n; ++a) {
        const Relation& s = small.fragments[a];
        for (std::size_t i = 0; i < s.size(); ++i) {
            auto t = s.tuple(i);
            recs.push_back({keys.size(), 0, static_cast<std::uint32_t>(a), i});
            keys.insert(keys.end(), t.begin(), t.end());
        }
        const Relation& b = big.fragments[a];
        for (std::size_t i = 0; i < b.size(); ++i) {
            auto t = b.tuple(i);
            recs.push_back({keys.size(), 1, static_cast<std::uint32_t>(a), i});
            for (std::size_t col : key_cols) keys.push_back(t[col]);
        }
    }
    auto key_less = [&](const Record& x, const Record& y) {
        return std::lexicographical_compare(keys.begin() + static_cast<std::ptrdiff_t>(x.key),
                                            keys.begin() + static_cast<std::ptrdiff_t>(x.key + ws),
                                            keys.begin() + static_cast<std::ptrdiff_t>(y.key),
                                            keys.begin() + static_cast<std::ptrdiff_t>(y.key + ws));
    };
    auto key_eq = [&](const Record& x, const Record& y) {
        return std::equal(keys.begin() + static_cast<std::ptrdiff_t>(x.key),
                          keys.begin() + static_cast<std::ptrdiff_t>(x.key + ws),
                          keys.begin() + static_cast<std::ptrdiff_t>(y.key));
    };
    std::sort(recs.begin(), recs.end(), [&](const Record& x, const Record& y) {
        if (key_less(x, y)) return true;
        if (key_less(y, x)) return false;
        return std::tie(x.tag, x.pos, x.idx) < std::tie(y.tag, y.pos, y.idx);
    });

    std::uint64_t total = 0;
    for (const Record& r : recs) total += r.tag == 0 ? ws : wb;

    DistRelation out(big.scheme, n);
    c.reserve_rounds(round + 2);
    std::uint64_t prefix = 0;
    std::size_t run_chunk = 0;
    bool run_has_small = false;
    std::size_t last_chunk_with_flag = n;  // chunk already told about the current run
    for (std::size_t r = 0; r < recs.size(); ++r) {
        const Record& rec = recs[r];
        const std::uint64_t w = rec.tag == 0 ? ws : wb;
        const std::size_t chunk =
            total == 0 ? 0 : std::min<std::size_t>(n - 1, static_cast<std::size_t>((prefix * n) / total));
        prefix += w;
        transmit(c, round, block, rec.pos, block, chunk, w);

        const bool new_run = r == 0 || !key_eq(recs[r - 1], rec);
        if (new_run) {
            run_chunk = chunk;
            run_has_small = rec.tag == 0;
            last_chunk_with_flag = chunk;
        } else if (chunk != last_chunk_with_flag) {
            // The run continues into a later range: its owner sends the key and a flag.
            transmit(c, round + 1, block, run_chunk, block, chunk, ws + 1);
            last_chunk_with_flag = chunk;
        }
        if (rec.tag == 1 && run_has_small) {
            out.fragments[chunk].push_back(big.fragments[rec.pos].tuple(rec.idx));
        }
    }
    return out;
}

Relation local_product(std::span<const Relation> factors) {
    Relation acc{AttrSet{}};
    acc.push_back(std::span<const Value>{});
    for (const Relation& f : factors) {
        if (acc.scheme().intersects(f.scheme())) throw std::invalid_argument("product factors must be disjoint");
        acc = natural_join(acc, f);
    }
    return acc;
}

DistRelation cartesian_product(SimCluster& c, std::size_t round, const MachineBlock& from,
                               std::span<const DistRelation> factors, const MachineBlock& grid,
                               std::span<const std::size_t> dims) {
    if (dims.size() != factors.size()) throw std::invalid_argument("one grid axis per factor expected");
    std::size_t cells = 1;
    AttrSet scheme;
    for (std::size_t j = 0; j < factors.size(); ++j) {
        if (dims[j] == 0) throw std::invalid_argument("grid axes must be positive");
        cells *= dims[j];
        if (scheme.intersects(factors[j].scheme)) throw std::invalid_argument("product factors must be disjoint");
        scheme |= factors[j].scheme;
    }
    if (cells > grid.size()) throw std::invalid_argument("grid exceeds the available machines");

    std::vector<DistRelation> shards;
    for (std::size_t j = 0; j < factors.size(); ++j) {
        MachineBlock axis = grid.axis(dims, j);
        shards.push_back(std::move(scatter_balanced(c, round, from, std::span(&factors[j], 1), axis).front()));
    }
    c.reserve_rounds(round + 1);

    DistRelation out(scheme, grid.size());
    for (std::size_t cell = 0; cell < cells; ++cell) {
        std::vector<Relation> parts;
        std::size_t rest = cell;
        std::vector<std::size_t> coord(dims.size());
        for (std::size_t j = dims.size(); j-- > 0;) {
            coord[j] = rest % dims[j];
            rest /= dims[j];
        }
        for (std::size_t j = 0; j < dims.size(); ++j) parts.push_back(shards[j].fragments[coord[j]]);
        out.fragments[cell] = local_product(parts);
    }
    return out;
}

}  // namespace acyclic_mpc
