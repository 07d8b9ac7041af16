// Internal: iterative Tarjan SCC decomposition over a masked subgraph.
#pragma once

#include <functional>
#include <vector>

namespace spe::detail {

/**
 * Strongly connected components of the subgraph induced by `alive`,
 * returned in reverse topological order (every edge between components
 * goes from a later component to an earlier one in the result). Nodes are
 * 0..n-1; `succ(u)` lists u's successors in the full graph.
 */
inline std::vector<std::vector<int>> sccs(
    int n, const std::vector<char>& alive,
    const std::function<const std::vector<int>&(int)>& succ) {
    std::vector<int> index(n, -1), low(n, 0);
    std::vector<char> on_stack(n, 0);
    std::vector<int> stack;
    std::vector<std::vector<int>> result;
    int next_index = 0;

    struct Frame {
        int node;
        size_t child;
    };
    std::vector<Frame> call;

    for (int root = 0; root < n; ++root) {
        if (!alive[root] || index[root] >= 0) continue;
        call.push_back({root, 0});
        index[root] = low[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = 1;
        while (!call.empty()) {
            Frame& f = call.back();
            const std::vector<int>& out = succ(f.node);
            bool descended = false;
            while (f.child < out.size()) {
                int w = out[f.child++];
                if (!alive[w]) continue;
                if (index[w] < 0) {
                    index[w] = low[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = 1;
                    call.push_back({w, 0});
                    descended = true;
                    break;
                }
                if (on_stack[w]) low[f.node] = std::min(low[f.node], index[w]);
            }
            if (descended) continue;
            int u = f.node;
            call.pop_back();
            if (low[u] == index[u]) {
                std::vector<int> comp;
                while (true) {
                    int w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    comp.push_back(w);
                    if (w == u) break;
                }
                result.push_back(std::move(comp));
            }
            if (!call.empty()) low[call.back().node] = std::min(low[call.back().node], low[u]);
        }
    }
    return result;
}

}  // namespace spe::detail
