"""Unrooted binary tree topologies and a Jukes-Cantor likelihood.

State space for the tree experiments: topologies over n >= 4 taxa with all
branch lengths fixed by position (tip edges short, inner edges longer), so
the posterior is a distribution over the (2n-5)!! topologies alone.

Nodes 0..n-1 are leaves (taxon i is displayed 1-based as i+1), nodes
n..2n-3 are internal.  Topologies are immutable; identity is the canonical
encoding, a minimal-leaf-first nested-pair string for the tree rooted at
the edge adjacent to taxon 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigurationError, NumericalError

TIP_LENGTH = 0.01
INNER_LENGTH = 0.1

_CODE = {"A": 0, "C": 1, "G": 2, "T": 3}
_BASE = "ACGT"


class TreeTopology:
    """Immutable unrooted binary tree over n >= 4 labelled taxa."""

    __slots__ = ("adjacency", "n_taxa", "_canon", "_hash")

    def __init__(self, adjacency: Sequence[Sequence[int]]):
        adj = tuple(tuple(sorted(nbrs)) for nbrs in adjacency)
        degrees = [len(nbrs) for nbrs in adj]
        n_leaves = sum(1 for d in degrees if d == 1)
        if n_leaves < 4:
            raise ConfigurationError(f"need at least 4 taxa, got {n_leaves}")
        if len(adj) != 2 * n_leaves - 2:
            raise ConfigurationError(
                f"binary tree on {n_leaves} taxa needs {2 * n_leaves - 2} nodes, got {len(adj)}"
            )
        for i, d in enumerate(degrees):
            expected = 1 if i < n_leaves else 3
            if d != expected:
                raise ConfigurationError(f"node {i} has degree {d}, expected {expected}")
        self.adjacency = adj
        self.n_taxa = n_leaves
        self._canon: str | None = None
        self._hash: int | None = None

    # -- identity ---------------------------------------------------------

    def canonical(self) -> str:
        """Minimal-leaf-first encoding rooted at the edge next to taxon 1."""
        if self._canon is None:
            root = self.adjacency[0][0]
            _, rest = self._encode(root, 0)
            self._canon = f"(1,{rest})"
        return self._canon

    def _encode(self, node: int, parent: int) -> tuple[int, str]:
        if node < self.n_taxa:
            return node, str(node + 1)
        parts = [self._encode(c, node) for c in self.adjacency[node] if c != parent]
        parts.sort(key=lambda p: p[0])
        return parts[0][0], "(" + ",".join(p[1] for p in parts) + ")"

    def newick(self) -> str:
        return self.canonical() + ";"

    def __eq__(self, other) -> bool:
        return isinstance(other, TreeTopology) and self.canonical() == other.canonical()

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.canonical())
        return self._hash

    def __repr__(self) -> str:
        return f"TreeTopology({self.newick()!r})"

    # -- structure --------------------------------------------------------

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u, nbrs in enumerate(self.adjacency) for v in nbrs if u < v]

    def internal_edges(self) -> list[tuple[int, int]]:
        n = self.n_taxa
        return [(u, v) for u, v in self.edges() if u >= n and v >= n]

    def nni_neighbors(self) -> list["TreeTopology"]:
        """All topologies one nearest-neighbor interchange away: 2(n-3)."""
        out = []
        for u, v in self.internal_edges():
            for which in (0, 1):
                out.append(self._nni_apply(u, v, which))
        return out

    def _nni_apply(self, u: int, v: int, which: int) -> "TreeTopology":
        a, b = (w for w in self.adjacency[u] if w != v)
        c, d = (w for w in self.adjacency[v] if w != u)
        moved = c if which == 0 else d
        adj = [list(nbrs) for nbrs in self.adjacency]
        adj[u][adj[u].index(b)] = moved
        adj[v][adj[v].index(moved)] = b
        adj[b][adj[b].index(u)] = v
        adj[moved][adj[moved].index(v)] = u
        return TreeTopology(adj)

    def random_nni(self, rng: np.random.Generator) -> "TreeTopology":
        """Uniform draw over the 2(n-3) NNI neighbors."""
        inner = self.internal_edges()
        u, v = inner[int(rng.integers(len(inner)))]
        return self._nni_apply(u, v, int(rng.integers(2)))


def parse_newick(text: str) -> TreeTopology:
    """Parse a newick string (1-based integer taxa, no branch lengths).

    A degree-2 root is suppressed so rooted and unrooted writings of the
    same topology parse to the same object.
    """
    s = text.strip().rstrip(";").replace(" ", "")
    pos = 0

    def parse_node():
        nonlocal pos
        if pos >= len(s):
            raise ConfigurationError(f"unexpected end of newick string: {text!r}")
        if s[pos] == "(":
            pos += 1
            children = [parse_node()]
            while pos < len(s) and s[pos] == ",":
                pos += 1
                children.append(parse_node())
            if pos >= len(s) or s[pos] != ")":
                raise ConfigurationError(f"unbalanced parentheses in newick: {text!r}")
            pos += 1
            return children
        start = pos
        while pos < len(s) and s[pos] not in ",()":
            pos += 1
        label = s[start:pos]
        if not label.isdigit():
            raise ConfigurationError(f"taxon labels must be positive integers, got {label!r}")
        return int(label) - 1

    tree = parse_node()
    if pos != len(s):
        raise ConfigurationError(f"trailing characters in newick: {text!r}")

    leaves: list[int] = []

    def collect(node):
        if isinstance(node, int):
            leaves.append(node)
        else:
            for c in node:
                collect(c)

    collect(tree)
    n = len(leaves)
    if sorted(leaves) != list(range(n)):
        raise ConfigurationError("taxa must be exactly 1..n with no repeats")

    adj: list[list[int]] = [[] for _ in range(n)]

    def build(node) -> int:
        """Return the node id for this subtree, creating internals as needed."""
        if isinstance(node, int):
            return node
        ids = [build(c) for c in node]
        if len(ids) == 1:
            return ids[0]
        me = len(adj)
        adj.append([])
        for c in ids:
            adj[me].append(c)
            adj[c].append(me)
        return me

    root = build(tree)
    if len(adj[root]) == 2:
        x, y = adj[root]
        adj[x].remove(root)
        adj[y].remove(root)
        adj[x].append(y)
        adj[y].append(x)
        adj.pop(root)
    return TreeTopology(adj)


def caterpillar_pair() -> tuple[TreeTopology, TreeTopology]:
    """The 8-taxon benchmark pair: identical shapes with taxa 2 and 7 swapped.

    Both trees assign the same likelihood to the switched alignment from
    build_two_tree_alignment, giving an exactly bimodal posterior.
    """
    a = parse_newick("((((((1,2),3),4),5),6),(7,8));")
    b = parse_newick("((((((1,7),3),4),5),6),(2,8));")
    return a, b


def enumerate_topologies(n_taxa: int) -> list[TreeTopology]:
    """All (2n-5)!! unrooted binary topologies, by sequential leaf insertion."""
    if n_taxa < 4:
        raise ConfigurationError("enumeration needs n >= 4")
    if n_taxa > 8:
        raise ConfigurationError("enumeration beyond 8 taxa is intentionally refused")
    # seed: star over taxa {0,1,2} with one internal hub
    seeds = [[[3], [3], [3], [0, 1, 2]]]
    for k in range(3, n_taxa):
        grown = []
        for adj in seeds:
            edges = [(u, v) for u, nbrs in enumerate(adj) for v in nbrs if u < v]
            for u, v in edges:
                new = [list(nbrs) for nbrs in adj]
                new = _insert_leaf(new, u, v, k)
                grown.append(new)
        seeds = grown
    return [TreeTopology(_renumber(adj, n_taxa)) for adj in seeds]


def _insert_leaf(adj: list[list[int]], u: int, v: int, leaf: int) -> list[list[int]]:
    """Subdivide edge (u, v) with a fresh hub and hang ``leaf`` from it."""
    # keep leaf ids dense at the front: shift node ids >= leaf up by one
    def shift(i: int) -> int:
        return i + 1 if i >= leaf else i

    out: list[list[int]] = [[] for _ in range(len(adj) + 2)]
    for i, nbrs in enumerate(adj):
        out[shift(i)] = [shift(j) for j in nbrs]
    su, sv = shift(u), shift(v)
    hub = len(adj) + 1
    out[su][out[su].index(sv)] = hub
    out[sv][out[sv].index(su)] = hub
    out[hub] = [su, sv, leaf]
    out[leaf] = [hub]
    return out


def _renumber(adj: list[list[int]], n: int) -> list[list[int]]:
    """Renumber so leaves are 0..n-1 followed by internals (already true)."""
    assert all(len(adj[i]) == 1 for i in range(n))
    return adj


def nni_distance(a: TreeTopology, b: TreeTopology, max_depth: int = 10) -> int:
    """Length of the shortest NNI path from a to b (breadth-first search)."""
    if a == b:
        return 0
    frontier = {a.canonical(): a}
    seen = {a.canonical()}
    target = b.canonical()
    for depth in range(1, max_depth + 1):
        nxt: dict[str, TreeTopology] = {}
        for t in frontier.values():
            for nb in t.nni_neighbors():
                c = nb.canonical()
                if c == target:
                    return depth
                if c not in seen:
                    seen.add(c)
                    nxt[c] = nb
        frontier = nxt
        if not frontier:
            break
    raise ConfigurationError(f"no NNI path of length <= {max_depth} found")


# -- Jukes-Cantor likelihood ----------------------------------------------


def jc_transition(branch_length: float) -> tuple[float, float]:
    """Jukes-Cantor transition terms (p_same, p_diff) for one branch."""
    if branch_length < 0:
        raise ConfigurationError("branch length must be >= 0")
    e = math.exp(-4.0 * branch_length / 3.0)
    return 0.25 + 0.75 * e, 0.25 - 0.25 * e


def _postorder(tree: TreeTopology, root: int) -> list[tuple[int, int]]:
    """(node, parent) pairs with children before parents; parent of root = -1."""
    order = []
    stack = [(root, -1)]
    while stack:
        node, parent = stack.pop()
        order.append((node, parent))
        if node >= tree.n_taxa:
            for c in tree.adjacency[node]:
                if c != parent:
                    stack.append((c, node))
    order.reverse()
    return order


def pruning_loglik(
    tree: TreeTopology,
    codes: np.ndarray,
    counts: np.ndarray | None = None,
    tip_length: float = TIP_LENGTH,
    inner_length: float = INNER_LENGTH,
) -> float:
    """Log likelihood of an alignment under Jukes-Cantor with fixed lengths.

    Parameters
    ----------
    codes : int array (n_taxa, n_patterns)
        Site patterns coded A=0, C=1, G=2, T=3.
    counts : optional int array (n_patterns,)
        Multiplicity of each pattern; defaults to all ones.

    The root is placed on the internal node next to taxon 1; the model is
    reversible with its stationary root distribution, so the value does not
    depend on that choice (checked in the tests).  Partial likelihoods are
    rescaled per pattern whenever any value drops below 1e-280.
    """
    codes = np.asarray(codes)
    if codes.ndim != 2 or codes.shape[0] != tree.n_taxa:
        raise ConfigurationError(
            f"codes must be (n_taxa={tree.n_taxa}, n_patterns), got {codes.shape}"
        )
    n_pat = codes.shape[1]
    if counts is None:
        counts = np.ones(n_pat)
    else:
        counts = np.asarray(counts, dtype=float)
        if counts.shape != (n_pat,):
            raise ConfigurationError(
                f"counts must be ({n_pat},) to match the patterns, got {counts.shape}"
            )
    p_same_tip, p_diff_tip = jc_transition(tip_length)
    p_same_in, p_diff_in = jc_transition(inner_length)

    n = tree.n_taxa
    root = tree.adjacency[0][0]
    partial: dict[int, np.ndarray] = {}
    log_scale = np.zeros(n_pat)

    for node, parent in _postorder(tree, root):
        if node < n:
            part = np.zeros((4, n_pat))
            part[codes[node], np.arange(n_pat)] = 1.0
        else:
            part = np.ones((4, n_pat))
            for c in tree.adjacency[node]:
                if c == parent:
                    continue
                ps, pd = (p_same_tip, p_diff_tip) if c < n else (p_same_in, p_diff_in)
                child = partial.pop(c)
                part *= pd * child.sum(axis=0) + (ps - pd) * child
            if n_pat and part.min() < 1e-280:
                top = part.max(axis=0)
                if np.any(top <= 0.0):
                    raise NumericalError("pattern with zero likelihood at every state")
                part /= top
                log_scale += np.log(top)
        partial[node] = part

    site_l = 0.25 * partial[root].sum(axis=0)
    if np.any(site_l <= 0.0):
        raise NumericalError("zero site likelihood")
    return float(np.dot(counts, np.log(site_l) + log_scale))


class PhyloTarget:
    """Posterior over topologies for a fixed alignment (uniform prior).

    Log likelihoods are cached by canonical encoding and topology objects
    are interned, so chains that revisit states pay a dict lookup, not a
    pruning pass.
    """

    def __init__(
        self,
        alignment: "SequenceAlignment",
        tip_length: float = TIP_LENGTH,
        inner_length: float = INNER_LENGTH,
    ):
        self.alignment = alignment
        self.tip_length = tip_length
        self.inner_length = inner_length
        self.space = ("tree", alignment.n_taxa)
        patterns, counts = np.unique(alignment.codes, axis=1, return_counts=True)
        self._patterns = patterns
        self._counts = counts.astype(float)
        self._loglik: dict[str, float] = {}
        self._pool: dict[str, TreeTopology] = {}

    def log_density(self, tree: TreeTopology) -> float:
        key = tree.canonical()
        cached = self._loglik.get(key)
        if cached is None:
            cached = pruning_loglik(
                tree, self._patterns, self._counts, self.tip_length, self.inner_length
            )
            self._loglik[key] = cached
        return cached

    def intern(self, tree: TreeTopology) -> TreeTopology:
        """Return the pooled instance equal to ``tree`` (register if new)."""
        key = tree.canonical()
        kept = self._pool.get(key)
        if kept is None:
            self._pool[key] = tree
            return tree
        return kept


def exact_topology_posterior(
    target: PhyloTarget,
) -> tuple[list[TreeTopology], np.ndarray]:
    """Posterior over every topology by full enumeration (n <= 8)."""
    trees = enumerate_topologies(target.space[1])
    logs = np.array([target.log_density(t) for t in trees])
    top = logs.max()
    w = np.exp(logs - top)
    return trees, w / w.sum()


# -- alignments ------------------------------------------------------------


@dataclass(frozen=True)
class SequenceAlignment:
    """DNA alignment: names, plus an (n_taxa, n_sites) code matrix (ACGT=0123)."""

    names: tuple[str, ...]
    codes: np.ndarray

    def __post_init__(self):
        codes = np.asarray(self.codes, dtype=np.int8)
        if codes.ndim != 2 or len(self.names) != codes.shape[0]:
            raise ConfigurationError("names and code matrix are inconsistent")
        if codes.size and (codes.min() < 0 or codes.max() > 3):
            raise ConfigurationError("codes must lie in 0..3")
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "codes", codes)

    @property
    def n_taxa(self) -> int:
        return self.codes.shape[0]

    @property
    def n_sites(self) -> int:
        return self.codes.shape[1]


def simulate_alignment(
    tree: TreeTopology,
    n_sites: int,
    rng: np.random.Generator,
    tip_length: float = TIP_LENGTH,
    inner_length: float = INNER_LENGTH,
) -> SequenceAlignment:
    """Draw sites from the Jukes-Cantor model on ``tree``."""
    if n_sites <= 0:
        raise ConfigurationError("n_sites must be positive")
    n = tree.n_taxa
    root = tree.adjacency[0][0]
    states: dict[int, np.ndarray] = {root: rng.integers(0, 4, size=n_sites)}
    order = _postorder(tree, root)
    for node, parent in reversed(order):  # parents before children
        if parent < 0:
            continue
        ps = jc_transition(tip_length if node < n else inner_length)[0]
        keep = rng.random(n_sites) < ps
        jump = rng.integers(1, 4, size=n_sites)
        parent_state = states[parent]
        states[node] = np.where(keep, parent_state, (parent_state + jump) % 4)
    codes = np.stack([states[i] for i in range(n)]).astype(np.int8)
    names = tuple(str(i + 1) for i in range(n))
    return SequenceAlignment(names, codes)


def build_two_tree_alignment(
    rng: np.random.Generator, n_sites: int = 1000
) -> tuple[SequenceAlignment, TreeTopology, TreeTopology]:
    """Alignment with two exactly tied topologies.

    Simulates ``n_sites`` sites on the first caterpillar tree, makes a copy
    with the rows of taxa 2 and 7 exchanged, and concatenates the two halves.
    Swapping rows is the data image of swapping the taxa in the tree, so the
    pair of trees score identical likelihoods on the combined data.
    """
    a, b = caterpillar_pair()
    half = simulate_alignment(a, n_sites, rng)
    swapped = half.codes.copy()
    swapped[[1, 6]] = swapped[[6, 1]]
    codes = np.concatenate([half.codes, swapped], axis=1)
    return SequenceAlignment(half.names, codes), a, b


def write_fasta(alignment: SequenceAlignment, path) -> None:
    with open(path, "w") as fh:
        for name, row in zip(alignment.names, alignment.codes):
            fh.write(f">{name}\n")
            fh.write("".join(_BASE[c] for c in row) + "\n")


def read_fasta(path) -> SequenceAlignment:
    names: list[str] = []
    rows: list[list[int]] = []
    with open(path) as fh:
        seq: list[int] | None = None
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith(">"):
                names.append(line[1:].split()[0])
                seq = []
                rows.append(seq)
            else:
                if seq is None:
                    raise ConfigurationError(f"sequence data before any header in {path}")
                try:
                    seq.extend(_CODE[ch] for ch in line.upper())
                except KeyError as err:
                    raise ConfigurationError(f"non-ACGT character in {path}: {err}") from None
    if not names:
        raise ConfigurationError(f"no sequences in {path}")
    lengths = {len(r) for r in rows}
    if len(lengths) != 1:
        raise ConfigurationError(f"ragged alignment in {path}")
    return SequenceAlignment(tuple(names), np.array(rows, dtype=np.int8))
