#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace tfhh {

// Undirected simple graph over peers 0..p-1 with sorted adjacency lists.
struct Topology {
    enum class Kind { complete, erdos_renyi, barabasi_albert };

    Kind kind = Kind::complete;
    double edge_prob = 0.0;  // erdos_renyi only
    int m_attach = 0;        // barabasi_albert only
    std::vector<std::vector<std::uint32_t>> adjacency;

    std::size_t size() const { return adjacency.size(); }
    std::size_t edge_count() const;
    bool connected() const;
    // No self-loops, no duplicates, sorted, i in adj(j) <=> j in adj(i).
    bool well_formed() const;
};

std::string to_string(Topology::Kind kind);
Topology::Kind topology_kind_from_string(const std::string& name);

Topology gen_complete(std::size_t p);

// G(p, edge_prob), regenerated with the next sub-seed until connected.
// Throws ConfigError after 100 disconnected attempts.
Topology gen_erdos_renyi(std::size_t p, double edge_prob, std::uint64_t seed);

// Preferential attachment on top of a complete core of m_attach nodes; each
// later node links to m_attach distinct existing nodes. Requires p > m_attach >= 1.
Topology gen_barabasi_albert(std::size_t p, int m_attach, std::uint64_t seed);

// 2 ln(p) / p, clipped to 1.
double default_edge_prob(std::size_t p);

// One "u v" line per edge with u < v.
void write_edge_list(const Topology& topo, std::ostream& out);

}  // namespace tfhh
