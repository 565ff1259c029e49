#include "tfhh/topology.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "tfhh/errors.hpp"
#include "tfhh/rng.hpp"

namespace tfhh {

namespace {

void add_edge(Topology& t, std::uint32_t u, std::uint32_t v) {
    t.adjacency[u].push_back(v);
    t.adjacency[v].push_back(u);
}

void finalize(Topology& t) {
    for (auto& adj : t.adjacency) std::sort(adj.begin(), adj.end());
}

constexpr int kMaxConnectAttempts = 100;

}  // namespace

std::size_t Topology::edge_count() const {
    std::size_t twice = 0;
    for (const auto& adj : adjacency) twice += adj.size();
    return twice / 2;
}

bool Topology::connected() const {
    if (adjacency.empty()) return true;
    std::vector<char> seen(adjacency.size(), 0);
    std::vector<std::uint32_t> stack{0};
    seen[0] = 1;
    std::size_t reached = 1;
    while (!stack.empty()) {
        const std::uint32_t u = stack.back();
        stack.pop_back();
        for (std::uint32_t v : adjacency[u]) {
            if (!seen[v]) {
                seen[v] = 1;
                ++reached;
                stack.push_back(v);
            }
        }
    }
    return reached == adjacency.size();
}

bool Topology::well_formed() const {
    for (std::size_t u = 0; u < adjacency.size(); ++u) {
        const auto& adj = adjacency[u];
        if (!std::is_sorted(adj.begin(), adj.end())) return false;
        if (std::adjacent_find(adj.begin(), adj.end()) != adj.end()) return false;
        for (std::uint32_t v : adj) {
            if (v == u || v >= adjacency.size()) return false;
            const auto& back = adjacency[v];
            if (!std::binary_search(back.begin(), back.end(), static_cast<std::uint32_t>(u))) {
                return false;
            }
        }
    }
    return true;
}

std::string to_string(Topology::Kind kind) {
    switch (kind) {
        case Topology::Kind::complete: return "complete";
        case Topology::Kind::erdos_renyi: return "erdos_renyi";
        case Topology::Kind::barabasi_albert: return "barabasi_albert";
    }
    return "unknown";
}

Topology::Kind topology_kind_from_string(const std::string& name) {
    if (name == "complete") return Topology::Kind::complete;
    if (name == "erdos_renyi" || name == "er") return Topology::Kind::erdos_renyi;
    if (name == "barabasi_albert" || name == "ba") return Topology::Kind::barabasi_albert;
    throw std::invalid_argument("unknown topology kind '" + name + "'");
}

Topology gen_complete(std::size_t p) {
    Topology t;
    t.kind = Topology::Kind::complete;
    t.adjacency.resize(p);
    for (std::size_t u = 0; u < p; ++u) {
        t.adjacency[u].reserve(p - 1);
        for (std::size_t v = 0; v < p; ++v) {
            if (v != u) t.adjacency[u].push_back(static_cast<std::uint32_t>(v));
        }
    }
    return t;
}

Topology gen_erdos_renyi(std::size_t p, double edge_prob, std::uint64_t seed) {
    if (p == 0) throw std::invalid_argument("erdos_renyi needs p >= 1");
    if (!(edge_prob >= 0.0 && edge_prob <= 1.0)) {
        throw std::invalid_argument("edge_prob must lie in [0, 1]");
    }
    for (int attempt = 0; attempt < kMaxConnectAttempts; ++attempt) {
        Rng rng = Rng::derive(seed, "erdos-renyi", static_cast<std::uint64_t>(attempt));
        Topology t;
        t.kind = Topology::Kind::erdos_renyi;
        t.edge_prob = edge_prob;
        t.adjacency.resize(p);
        for (std::uint32_t u = 0; u < p; ++u) {
            for (std::uint32_t v = u + 1; v < p; ++v) {
                if (rng.bernoulli(edge_prob)) add_edge(t, u, v);
            }
        }
        finalize(t);
        if (t.connected()) return t;
    }
    throw ConfigError("erdos_renyi graph with p=" + std::to_string(p) + " edge_prob=" +
                      std::to_string(edge_prob) + " stayed disconnected after " +
                      std::to_string(kMaxConnectAttempts) + " attempts");
}

Topology gen_barabasi_albert(std::size_t p, int m_attach, std::uint64_t seed) {
    if (m_attach < 1 || p <= static_cast<std::size_t>(m_attach)) {
        throw std::invalid_argument("barabasi_albert needs p > m_attach >= 1");
    }
    const auto m = static_cast<std::uint32_t>(m_attach);
    Rng rng = Rng::derive(seed, "barabasi-albert");
    Topology t;
    t.kind = Topology::Kind::barabasi_albert;
    t.m_attach = m_attach;
    t.adjacency.resize(p);

    // Every edge endpoint, so a uniform pick is degree-proportional.
    std::vector<std::uint32_t> endpoints;
    endpoints.reserve(2 * m * p);
    for (std::uint32_t u = 0; u < m; ++u) {
        for (std::uint32_t v = u + 1; v < m; ++v) {
            add_edge(t, u, v);
            endpoints.push_back(u);
            endpoints.push_back(v);
        }
    }
    std::vector<std::uint32_t> targets;
    for (std::uint32_t node = m; node < p; ++node) {
        targets.clear();
        while (targets.size() < m) {
            const std::uint32_t pick =
                endpoints.empty() ? static_cast<std::uint32_t>(rng.below(node))
                                  : endpoints[rng.below(endpoints.size())];
            if (std::find(targets.begin(), targets.end(), pick) == targets.end()) {
                targets.push_back(pick);
            }
        }
        for (std::uint32_t v : targets) {
            add_edge(t, node, v);
            endpoints.push_back(node);
            endpoints.push_back(v);
        }
    }
    finalize(t);
    return t;
}

double default_edge_prob(std::size_t p) {
    if (p <= 1) return 1.0;
    const double n = static_cast<double>(p);
    return std::min(1.0, 2.0 * std::log(n) / n);
}

void write_edge_list(const Topology& topo, std::ostream& out) {
    for (std::size_t u = 0; u < topo.size(); ++u) {
        for (std::uint32_t v : topo.adjacency[u]) {
            if (u < v) out << u << ' ' << v << '\n';
        }
    }
}

}  // namespace tfhh
