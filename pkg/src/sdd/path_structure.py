"""
Tree paths in O(log^2 n): heavy-light decomposition over a rooted tree and a
lazy segment tree per decomposition order.

Every non-root vertex v stands for the tree edge to its parent. The structure
stores the flow pushed *upward* across that edge, so a path traversed from u
to v counts +r*flow on the way up to the common ancestor and -r*flow on the
way down.
"""

import numpy as np

from core.errors import InvalidInputError


class HeavyLightDecomposition:
    """Chains of heavy children laid out contiguously, roots at the smallest position."""

    def __init__(self, parent: np.ndarray, root: int = 0):
        parent = np.asarray(parent, dtype=np.int64)
        n = int(parent.shape[0])
        if n < 1 or parent[root] != -1:
            raise InvalidInputError("root must have parent -1")
        self.n = n
        self.root = root
        self.parent = parent.tolist()

        children: list[list[int]] = [[] for _ in range(n)]
        for v, p in enumerate(self.parent):
            if v != root:
                if p < 0 or p >= n:
                    raise InvalidInputError(f"vertex {v} has no valid parent")
                children[p].append(v)
        self.children = children

        order = [root]
        depth = [0] * n
        for v in order:
            for c in children[v]:
                depth[c] = depth[v] + 1
                order.append(c)
        if len(order) != n:
            raise InvalidInputError("parent array does not describe a tree")
        self.order = order
        self.depth = depth

        size = [1] * n
        heavy = [-1] * n
        for v in reversed(order):
            best = 0
            for c in children[v]:
                size[v] += size[c]
                if size[c] > best:
                    best = size[c]
                    heavy[v] = c
        self.size = size
        self.heavy = heavy

        head = [0] * n
        position = [0] * n
        next_position = 0
        stack = [root]
        while stack:
            h = stack.pop()
            v = h
            while v != -1:
                head[v] = h
                position[v] = next_position
                next_position += 1
                for c in children[v]:
                    if c != heavy[v]:
                        stack.append(c)
                v = heavy[v]
        self.head = head
        self.position = position

    def lca(self, u: int, v: int) -> int:
        head, parent, depth = self.head, self.parent, self.depth
        while head[u] != head[v]:
            if depth[head[u]] < depth[head[v]]:
                u, v = v, u
            u = parent[head[u]]
        return u if depth[u] <= depth[v] else v

    def ranges_up(self, u: int, ancestor: int) -> list[tuple[int, int]]:
        """Inclusive position ranges of the edges from u up to ancestor."""
        head, parent, position = self.head, self.parent, self.position
        ranges = []
        while head[u] != head[ancestor]:
            h = head[u]
            ranges.append((position[h], position[u]))
            u = parent[h]
        if u != ancestor:
            ranges.append((position[ancestor] + 1, position[u]))
        return ranges


class TreePathStructure:
    """Upward flows on tree edges with path add and r-weighted path sums."""

    def __init__(self, hld: HeavyLightDecomposition, edge_resistance):
        """edge_resistance[v] is the resistance of v's parent edge (ignored at the root)."""
        self.hld = hld
        n = hld.n
        capacity = 1
        while capacity < n:
            capacity <<= 1
        self._capacity = capacity
        self._sum_r = [0.0] * (2 * capacity)
        self._sum_rw = [0.0] * (2 * capacity)
        self._lazy = [0.0] * (2 * capacity)

        r = np.asarray(edge_resistance, dtype=np.float64)
        for v in range(n):
            if v != hld.root:
                self._sum_r[capacity + hld.position[v]] = float(r[v])
        for node in range(capacity - 1, 0, -1):
            self._sum_r[node] = self._sum_r[node << 1] + self._sum_r[node << 1 | 1]

    # -- segment tree -------------------------------------------------------

    def _apply(self, node: int, delta: float) -> None:
        self._sum_rw[node] += delta * self._sum_r[node]
        self._lazy[node] += delta

    def _push(self, node: int) -> None:
        delta = self._lazy[node]
        if delta != 0.0:
            self._apply(node << 1, delta)
            self._apply(node << 1 | 1, delta)
            self._lazy[node] = 0.0

    def _add_helper(self, start, end, delta, node, node_start, node_end):
        if start == node_start and end == node_end:
            self._apply(node, delta)
            return
        self._push(node)
        mid = (node_start + node_end) >> 1
        if end <= mid:
            self._add_helper(start, end, delta, node << 1, node_start, mid)
        elif mid + 1 <= start:
            self._add_helper(start, end, delta, node << 1 | 1, mid + 1, node_end)
        else:
            self._add_helper(start, mid, delta, node << 1, node_start, mid)
            self._add_helper(mid + 1, end, delta, node << 1 | 1, mid + 1, node_end)
        self._sum_rw[node] = self._sum_rw[node << 1] + self._sum_rw[node << 1 | 1]

    def _sum_helper(self, start, end, node, node_start, node_end):
        if start == node_start and end == node_end:
            return self._sum_rw[node]
        self._push(node)
        mid = (node_start + node_end) >> 1
        if end <= mid:
            return self._sum_helper(start, end, node << 1, node_start, mid)
        if mid + 1 <= start:
            return self._sum_helper(start, end, node << 1 | 1, mid + 1, node_end)
        return self._sum_helper(start, mid, node << 1, node_start, mid) + self._sum_helper(
            mid + 1, end, node << 1 | 1, mid + 1, node_end
        )

    def _range_add(self, start: int, end: int, delta: float) -> None:
        self._add_helper(start, end, delta, 1, 0, self._capacity - 1)

    def _range_sum(self, start: int, end: int) -> float:
        return self._sum_helper(start, end, 1, 0, self._capacity - 1)

    # -- paths --------------------------------------------------------------

    def lca(self, u: int, v: int) -> int:
        return self.hld.lca(u, v)

    def path_add(self, u: int, v: int, delta: float) -> None:
        """Send delta units of flow along the tree path from u to v."""
        if u == v or delta == 0.0:
            return
        top = self.hld.lca(u, v)
        for start, end in self.hld.ranges_up(u, top):
            self._range_add(start, end, delta)
        for start, end in self.hld.ranges_up(v, top):
            self._range_add(start, end, -delta)

    def path_weighted_sum(self, u: int, v: int) -> float:
        """sum of r_e * (flow in the direction u -> v) over the tree path."""
        if u == v:
            return 0.0
        top = self.hld.lca(u, v)
        total = 0.0
        for start, end in self.hld.ranges_up(u, top):
            total += self._range_sum(start, end)
        for start, end in self.hld.ranges_up(v, top):
            total -= self._range_sum(start, end)
        return total

    # -- bulk access --------------------------------------------------------

    def upward_flows(self) -> np.ndarray:
        """Flow across every parent edge, indexed by child vertex; O(n)."""
        for node in range(1, self._capacity):
            self._push(node)
        capacity = self._capacity
        out = np.zeros(self.hld.n)
        for v, pos in enumerate(self.hld.position):
            r = self._sum_r[capacity + pos]
            if r > 0.0:
                out[v] = self._sum_rw[capacity + pos] / r
        return out

    def load(self, upward) -> None:
        """Replace every stored flow; O(n)."""
        upward = np.asarray(upward, dtype=np.float64)
        capacity = self._capacity
        self._lazy = [0.0] * (2 * capacity)
        sum_rw = [0.0] * (2 * capacity)
        for v, pos in enumerate(self.hld.position):
            sum_rw[capacity + pos] = self._sum_r[capacity + pos] * float(upward[v])
        for node in range(capacity - 1, 0, -1):
            sum_rw[node] = sum_rw[node << 1] + sum_rw[node << 1 | 1]
        self._sum_rw = sum_rw
