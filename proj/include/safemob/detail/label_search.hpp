#pragma once

#include <cstddef>
#include <optional>
#include <queue>
#include <vector>

#include "safemob/network.hpp"

namespace safemob::detail {

struct Label {
    double value = 0.0;
    std::vector<std::size_t> nodes;
    std::vector<std::size_t> links;
};

// Strict weak order on (value, node-index sequence). Node indices follow id
// order, so this is the lexicographic detector-id tie-break.
inline bool label_less(const Label& a, const Label& b) {
    if (a.value != b.value) return a.value < b.value;
    return a.nodes < b.nodes;
}

/// Label-setting search from `source` to `target`. `extend(link, value)`
/// returns the label value after traversing `link` when arriving at its tail
/// with `value`; it must be non-decreasing in `value` and strictly greater
/// than `value`. Appending a link preserves the (value, sequence) order
/// under those conditions, so settling in that order is exact.
template <class Extend>
std::optional<Label> label_setting(const DetectorNetwork& net, std::size_t source,
                                   std::size_t target, double initial, Extend&& extend) {
    auto greater = [](const Label& a, const Label& b) { return label_less(b, a); };
    std::priority_queue<Label, std::vector<Label>, decltype(greater)> open(greater);
    std::vector<std::optional<Label>> best(net.node_count());
    std::vector<bool> settled(net.node_count(), false);

    Label start{initial, {source}, {}};
    best[source] = start;
    open.push(std::move(start));

    while (!open.empty()) {
        Label current = open.top();
        open.pop();
        const std::size_t node = current.nodes.back();
        if (settled[node]) continue;
        settled[node] = true;
        if (node == target) return current;

        for (std::size_t link_index : net.outgoing(node)) {
            const Link& link = net.links()[link_index];
            const std::size_t head = net.index_of(link.to);
            if (settled[head]) continue;
            Label next{extend(link, current.value), current.nodes, current.links};
            next.nodes.push_back(head);
            next.links.push_back(link_index);
            if (!best[head] || label_less(next, *best[head])) {
                best[head] = next;
                open.push(std::move(next));
            }
        }
    }
    return std::nullopt;
}

}  // namespace safemob::detail
