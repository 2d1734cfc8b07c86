class UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y):
        x, y = self.find(x), self.find(y)
        if x == y:
            return False
        # smaller representative wins so class order follows item order
        if y < x:
            x, y = y, x
        self.parent[y] = x
        return True

    def classes(self):
        """Classes as sorted tuples, ordered by their smallest member."""
        groups = {}
        for x in sorted(self.parent):
            groups.setdefault(self.find(x), []).append(x)
        return sorted((tuple(g) for g in groups.values()), key=lambda g: g[0])
