#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "circuitopt/element.hpp"
#include "circuitopt/error.hpp"

namespace circuitopt {

/// One inductive-loop element ('J' or 'L') with an optional parenthesized
/// group of elements forming a non-inductive loop with it.
struct LoopItem {
    char kind = 'J';          // 'J' or 'L'
    std::string group;        // e.g. "JC"; empty if none

    bool operator==(const LoopItem&) const = default;
};

struct Branch {
    int node_a = 0;
    int node_b = 0;           // oriented a -> b
    ElementKind kind = ElementKind::capacitor;

    bool operator==(const Branch&) const = default;
};

namespace detail {

inline int code_char_rank(char c) {
    switch (c) {
        case 'J': return 0;
        case 'L': return 1;
        case 'C': return 2;
        case '(': return 3;
        case ')': return 4;
    }
    return 5;
}

inline bool code_less(const std::string& a, const std::string& b) {
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        const int ra = code_char_rank(a[i]);
        const int rb = code_char_rank(b[i]);
        if (ra != rb) return ra < rb;
    }
    return a.size() < b.size();
}

inline std::string serialize_items(const std::vector<LoopItem>& items) {
    std::string out;
    for (const auto& it : items) {
        out.push_back(it.kind);
        if (!it.group.empty()) {
            out.push_back('(');
            out += it.group;
            out.push_back(')');
        }
    }
    return out;
}

/// Lexicographically smallest serialization over ring rotations and the
/// reflection (which reverses item order and each group path).
inline std::string canonical_code(const std::vector<LoopItem>& items) {
    const int n = static_cast<int>(items.size());
    std::vector<LoopItem> reflected(items.rbegin(), items.rend());
    for (auto& it : reflected) std::reverse(it.group.begin(), it.group.end());

    std::string best;
    const std::vector<LoopItem>* candidates[2] = {&items, &reflected};
    for (const std::vector<LoopItem>* seq : candidates) {
        for (int r = 0; r < n; ++r) {
            std::vector<LoopItem> rot(seq->begin() + r, seq->end());
            rot.insert(rot.end(), seq->begin(), seq->begin() + r);
            std::string s = serialize_items(rot);
            if (best.empty() || code_less(s, best)) best = std::move(s);
        }
    }
    return best;
}

} // namespace detail

/// A circuit graph: node 0 is ground, branches carry lumped elements.
/// Topologies come either from a circuit-code string (single inductive ring
/// plus groups plus all-to-all capacitors) or from an explicit branch list.
class CircuitTopology {
public:
    static CircuitTopology from_loop_items(std::vector<LoopItem> items,
                                           int max_nodes = 4) {
        if (items.size() < 2)
            throw ParseError("circuit code needs at least 2 inductive-loop items");
        for (const auto& it : items) {
            if (it.kind != 'J' && it.kind != 'L')
                throw ParseError(std::string("invalid loop element '") + it.kind + "'");
            if (!it.group.empty()) {
                bool has_cap = false;
                for (char c : it.group) {
                    if (c != 'J' && c != 'L' && c != 'C')
                        throw ParseError(std::string("invalid group element '") + c + "'");
                    if (c == 'C') has_cap = true;
                }
                if (!has_cap)
                    throw ParseError("group \"" + it.group +
                                     "\" has no capacitor and would close a second inductive loop");
            }
        }

        CircuitTopology t;
        t.items_ = std::move(items);
        const int ring = static_cast<int>(t.items_.size());
        int next_node = ring;

        for (int j = 0; j < ring; ++j) {
            const int a = j;
            const int b = (j + 1) % ring;
            t.branches_.push_back({a, b, element_from_symbol(t.items_[j].kind)});
            t.loop_branches_.push_back(j);
            t.loop_signs_.push_back(1);
        }
        for (int j = 0; j < ring; ++j) {
            const auto& g = t.items_[j].group;
            if (g.empty()) continue;
            int prev = j;
            for (std::size_t e = 0; e < g.size(); ++e) {
                const bool last = (e + 1 == g.size());
                const int nxt = last ? (j + 1) % ring : next_node++;
                t.branches_.push_back({prev, nxt, element_from_symbol(g[e])});
                prev = nxt;
            }
        }
        t.node_count_ = next_node;
        if (t.node_count_ > max_nodes)
            throw ParseError("code requires " + std::to_string(t.node_count_) +
                             " nodes, limit is " + std::to_string(max_nodes));

        t.add_missing_capacitors();
        t.n_loops_ = 1;
        t.assign_loop_flux_branch();
        return t;
    }

    /// Build from an explicit branch list (no all-to-all capacitors added).
    static CircuitTopology from_branches(int node_count, std::vector<Branch> branches,
                                         int max_nodes = 4) {
        if (node_count < 2 || node_count > max_nodes)
            throw ConfigError("node count must be in [2, " +
                              std::to_string(max_nodes) + "]");
        for (const auto& b : branches) {
            if (b.node_a < 0 || b.node_a >= node_count || b.node_b < 0 ||
                b.node_b >= node_count)
                throw ConfigError("branch node index out of range");
            if (b.node_a == b.node_b) throw ConfigError("self-loop branch");
        }
        CircuitTopology t;
        t.node_count_ = node_count;
        t.branches_ = std::move(branches);
        t.detect_inductive_loop();
        t.assign_loop_flux_branch();
        return t;
    }

    int node_count() const { return node_count_; }
    int dof() const { return node_count_ - 1; }
    int loop_count() const { return n_loops_; }
    const std::vector<Branch>& branches() const { return branches_; }
    const std::vector<LoopItem>& loop_items() const { return items_; }

    /// Branch indices around the inductive loop with traversal signs.
    const std::vector<int>& loop_branch_indices() const { return loop_branches_; }
    const std::vector<int>& loop_branch_signs() const { return loop_signs_; }

    /// Branch carrying the external flux (b_k = 1); -1 when no loop.
    int flux_branch() const { return flux_branch_; }

    /// Node-incidence vector of branch k over the non-ground nodes:
    /// +1 at node_a, -1 at node_b.
    Eigen::VectorXi incidence(int k) const {
        Eigen::VectorXi w = Eigen::VectorXi::Zero(dof());
        const auto& b = branches_.at(static_cast<std::size_t>(k));
        if (b.node_a > 0) w(b.node_a - 1) += 1;
        if (b.node_b > 0) w(b.node_b - 1) -= 1;
        return w;
    }

    std::vector<int> branches_of(ElementKind kind) const {
        std::vector<int> out;
        for (int k = 0; k < static_cast<int>(branches_.size()); ++k)
            if (branches_[k].kind == kind) out.push_back(k);
        return out;
    }

    bool structurally_equal(const CircuitTopology& other) const {
        if (!items_.empty() && !other.items_.empty())
            return detail::canonical_code(items_) ==
                   detail::canonical_code(other.items_);
        return node_count_ == other.node_count_ && branches_ == other.branches_;
    }

private:
    void add_missing_capacitors() {
        for (int a = 0; a < node_count_; ++a) {
            for (int b = a + 1; b < node_count_; ++b) {
                bool found = false;
                for (const auto& br : branches_) {
                    const int lo = std::min(br.node_a, br.node_b);
                    const int hi = std::max(br.node_a, br.node_b);
                    if (lo == a && hi == b && br.kind == ElementKind::capacitor) {
                        found = true;
                        break;
                    }
                }
                if (!found) branches_.push_back({a, b, ElementKind::capacitor});
            }
        }
    }

    void detect_inductive_loop() {
        // Spanning forest over inductive branches; a branch joining two nodes
        // already connected closes an independent loop.
        std::vector<int> parent(static_cast<std::size_t>(node_count_));
        for (int i = 0; i < node_count_; ++i) parent[static_cast<std::size_t>(i)] = i;
        auto find = [&](int x) {
            while (parent[static_cast<std::size_t>(x)] != x) {
                parent[static_cast<std::size_t>(x)] =
                    parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
                x = parent[static_cast<std::size_t>(x)];
            }
            return x;
        };

        std::vector<int> tree; // branch indices in the forest
        int closing = -1;
        n_loops_ = 0;
        for (int k = 0; k < static_cast<int>(branches_.size()); ++k) {
            if (branches_[static_cast<std::size_t>(k)].kind == ElementKind::capacitor)
                continue;
            const auto& b = branches_[static_cast<std::size_t>(k)];
            const int ra = find(b.node_a);
            const int rb = find(b.node_b);
            if (ra == rb) {
                ++n_loops_;
                if (closing < 0) closing = k;
            } else {
                parent[static_cast<std::size_t>(ra)] = rb;
                tree.push_back(k);
            }
        }
        if (n_loops_ > 1)
            throw ConfigError("more than one independent inductive loop (" +
                              std::to_string(n_loops_) + ")");
        if (n_loops_ == 0) return;

        // Recover the cycle: path through the forest from node_b to node_a of
        // the closing branch, then the closing branch itself.
        const auto& cb = branches_[static_cast<std::size_t>(closing)];
        std::vector<std::vector<std::pair<int, int>>> adj(
            static_cast<std::size_t>(node_count_)); // (neighbor, branch)
        for (int k : tree) {
            const auto& b = branches_[static_cast<std::size_t>(k)];
            adj[static_cast<std::size_t>(b.node_a)].push_back({b.node_b, k});
            adj[static_cast<std::size_t>(b.node_b)].push_back({b.node_a, k});
        }
        std::vector<int> prev_node(static_cast<std::size_t>(node_count_), -1);
        std::vector<int> prev_branch(static_cast<std::size_t>(node_count_), -1);
        std::vector<int> stack = {cb.node_b};
        prev_node[static_cast<std::size_t>(cb.node_b)] = cb.node_b;
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            for (auto [v, k] : adj[static_cast<std::size_t>(u)]) {
                if (prev_node[static_cast<std::size_t>(v)] >= 0) continue;
                prev_node[static_cast<std::size_t>(v)] = u;
                prev_branch[static_cast<std::size_t>(v)] = k;
                stack.push_back(v);
            }
        }
        loop_branches_ = {closing};
        loop_signs_ = {1};
        int u = cb.node_a;
        while (u != cb.node_b) {
            const int k = prev_branch[static_cast<std::size_t>(u)];
            const auto& b = branches_[static_cast<std::size_t>(k)];
            // traversal direction u -> prev_node[u]
            loop_branches_.push_back(k);
            loop_signs_.push_back(b.node_a == u ? 1 : -1);
            u = prev_node[static_cast<std::size_t>(u)];
        }
    }

    void assign_loop_flux_branch() {
        flux_branch_ = -1;
        if (n_loops_ == 0) return;
        for (int k : loop_branches_)
            if (branches_[static_cast<std::size_t>(k)].kind == ElementKind::junction) {
                if (flux_branch_ < 0 || k < flux_branch_) flux_branch_ = k;
            }
        if (flux_branch_ < 0) {
            for (int k : loop_branches_)
                if (branches_[static_cast<std::size_t>(k)].kind == ElementKind::inductor) {
                    if (flux_branch_ < 0 || k < flux_branch_) flux_branch_ = k;
                }
        }
    }

    int node_count_ = 0;
    int n_loops_ = 0;
    int flux_branch_ = -1;
    std::vector<LoopItem> items_;
    std::vector<Branch> branches_;
    std::vector<int> loop_branches_;
    std::vector<int> loop_signs_;
};

/// Parse a circuit-code string, e.g. "JL(JC)".
inline CircuitTopology parse_code(std::string_view code, int max_nodes = 4) {
    std::vector<LoopItem> items;
    std::size_t i = 0;
    while (i < code.size()) {
        const char c = code[i];
        if (c != 'J' && c != 'L')
            throw ParseError(std::string("unexpected character '") + c +
                             "' in code \"" + std::string(code) + "\"");
        LoopItem item;
        item.kind = c;
        ++i;
        if (i < code.size() && code[i] == '(') {
            ++i;
            while (i < code.size() && code[i] != ')') item.group.push_back(code[i++]);
            if (i == code.size())
                throw ParseError("unterminated group in code \"" + std::string(code) + "\"");
            if (item.group.empty())
                throw ParseError("empty group in code \"" + std::string(code) + "\"");
            ++i;
        }
        items.push_back(std::move(item));
    }
    return CircuitTopology::from_loop_items(std::move(items), max_nodes);
}

/// Canonical code string for a ring topology.
inline std::string emit_code(const CircuitTopology& topo) {
    if (topo.loop_items().empty())
        throw ConfigError("topology outside the single-inductive-loop code family");
    return detail::canonical_code(topo.loop_items());
}

namespace detail {

inline void group_contents(int size, std::vector<std::string>& out) {
    std::string cur(static_cast<std::size_t>(size), 'J');
    const char alphabet[3] = {'J', 'L', 'C'};
    std::vector<int> idx(static_cast<std::size_t>(size), 0);
    while (true) {
        for (int i = 0; i < size; ++i)
            cur[static_cast<std::size_t>(i)] = alphabet[idx[static_cast<std::size_t>(i)]];
        if (cur.find('C') != std::string::npos) out.push_back(cur);
        int p = size - 1;
        while (p >= 0 && idx[static_cast<std::size_t>(p)] == 2) {
            idx[static_cast<std::size_t>(p)] = 0;
            --p;
        }
        if (p < 0) break;
        ++idx[static_cast<std::size_t>(p)];
    }
}

} // namespace detail

/// All canonical codes in the single-loop family with at most `max_nodes`
/// nodes (ground included), deduplicated under ring rotation and reflection.
/// Groups attached during enumeration have >= 2 elements; a one-element group
/// is either degenerate (a lone capacitor duplicates the implicit all-to-all
/// coupling) or forbidden (a lone inductive element closes a second loop).
inline std::vector<std::string> enumerate_codes(int max_nodes) {
    if (max_nodes < 2 || max_nodes > 4)
        throw ConfigError("max_nodes must be in [2, 4]");

    std::set<std::string> seen;
    for (int ring = 2; ring <= max_nodes; ++ring) {
        const int budget = max_nodes - ring;
        std::vector<std::vector<std::string>> options; // per-size group choices
        // options for one item given remaining budget handled in recursion
        std::vector<LoopItem> items(static_cast<std::size_t>(ring));

        std::vector<std::string> contents2, contents3;
        detail::group_contents(2, contents2);
        detail::group_contents(3, contents3);

        auto rec = [&](auto&& self, int pos, int left) -> void {
            if (pos == ring) {
                seen.insert(detail::canonical_code(items));
                return;
            }
            for (char kind : {'J', 'L'}) {
                items[static_cast<std::size_t>(pos)].kind = kind;
                items[static_cast<std::size_t>(pos)].group.clear();
                self(self, pos + 1, left);
                if (left >= 1) {
                    for (const auto& g : contents2) {
                        items[static_cast<std::size_t>(pos)].group = g;
                        self(self, pos + 1, left - 1);
                    }
                }
                if (left >= 2) {
                    for (const auto& g : contents3) {
                        items[static_cast<std::size_t>(pos)].group = g;
                        self(self, pos + 1, left - 2);
                    }
                }
                items[static_cast<std::size_t>(pos)].group.clear();
            }
        };
        rec(rec, 0, budget);
    }

    std::vector<std::string> out(seen.begin(), seen.end());
    std::sort(out.begin(), out.end(), detail::code_less);
    return out;
}

} // namespace circuitopt
