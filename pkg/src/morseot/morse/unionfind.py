class UnionFind:
    """Disjoint sets over ``0..n-1`` with path halving and union by size.

    Each set also remembers its *elder*: the element with the largest key
    ever merged into it. Merge trees use the elder as the representative
    maximum of a superlevel-set component.
    """

    def __init__(self, n, keys=None):
        self.parent = list(range(n))
        self.size = [1] * n
        self.elder = list(range(n))
        self.keys = keys

    def find(self, x):
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, x, y):
        """Merge the sets of x and y; return the new root."""
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return rx
        if self.size[rx] < self.size[ry]:
            rx, ry = ry, rx
        self.parent[ry] = rx
        self.size[rx] += self.size[ry]
        ex, ey = self.elder[rx], self.elder[ry]
        if self.keys is not None and self.keys[ey] > self.keys[ex]:
            self.elder[rx] = ey
        return rx
