#include <algorithm>
#include <numeric>

#include "causabs/abstraction.hpp"

namespace causabs {

namespace {

std::vector<int> radix_of(const std::vector<Variable>& members) {
    std::vector<int> r;
    for (const auto& m : members) r.push_back(m.domain.size());
    return r;
}

} // namespace

Permutation swap_generator(const std::vector<Variable>& members, int a, int b) {
    int n = static_cast<int>(members.size());
    if (a < 0 || b < 0 || a >= n || b >= n) throw ValidationError("swap position out of range");
    if (members[a].domain.size() != members[b].domain.size())
        throw ValidationError("cannot swap variables with different domain sizes");
    auto radix = radix_of(members);
    Permutation p(product_size(radix));
    std::vector<int> d;
    for (std::size_t j = 0; j < p.size(); ++j) {
        decode(j, radix, d);
        std::swap(d[a], d[b]);
        p[j] = encode(d, radix);
    }
    return p;
}

Permutation cyclic_generator(const std::vector<Variable>& members) {
    auto radix = radix_of(members);
    for (int r : radix)
        if (r != radix.front()) throw ValidationError("cyclic shift needs equal domain sizes");
    Permutation p(product_size(radix));
    std::vector<int> d;
    for (std::size_t j = 0; j < p.size(); ++j) {
        decode(j, radix, d);
        std::rotate(d.rbegin(), d.rbegin() + 1, d.rend());
        p[j] = encode(d, radix);
    }
    return p;
}

ClusterBlocks orbit_intra_clustering(const std::string& cluster, const std::vector<Variable>& members,
                                     const std::vector<Permutation>& generators) {
    auto radix = radix_of(members);
    std::size_t n = product_size(radix);
    for (const auto& g : generators) {
        if (g.size() != n) throw ValidationError("generator has the wrong size");
        std::vector<bool> hit(n, false);
        for (auto t : g) {
            if (t >= n || hit[t]) throw ValidationError("generator is not a bijection");
            hit[t] = true;
        }
    }
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& g : generators)
        for (std::size_t j = 0; j < n; ++j) {
            auto a = find(j), b = find(g[j]);
            if (a != b) parent[std::max(a, b)] = std::min(a, b);
        }
    ClusterBlocks cb{cluster, {}};
    std::vector<int> block_of(n, -1), d;
    for (std::size_t j = 0; j < n; ++j) {
        auto r = find(j);
        if (block_of[r] < 0) {
            block_of[r] = static_cast<int>(cb.blocks.size());
            cb.blocks.push_back(Block{std::to_string(cb.blocks.size()), {}});
        }
        decode(j, radix, d);
        std::vector<std::string> tuple;
        for (std::size_t i = 0; i < d.size(); ++i) tuple.push_back(members[i].domain.values[d[i]]);
        cb.blocks[block_of[r]].values.push_back(std::move(tuple));
    }
    return cb;
}

} // namespace causabs
