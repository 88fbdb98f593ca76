"""Seeded generators: seed networks, null models and node attributes."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np

from netform.graph import Graph, GraphError
from netform.rng import as_generator

SEED_KINDS = ("empty", "er", "sbm", "ring_lattice", "watts_strogatz", "barabasi_albert")

DEFAULT_VOCABULARIES: dict[str, list] = {
    "favorite_color": ["red", "blue", "green"],
    "hobby": ["hiking", "reading", "painting"],
    "location": ["New York", "Boston", "Chicago"],
}
DISTRACTOR = ("lucky_number", list(range(10)))


@dataclass(frozen=True)
class SeedSpec:
    kind: str
    n: int
    params: Mapping[str, Any] = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.kind not in SEED_KINDS:
            raise ValueError(f"unknown seed kind {self.kind!r}; expected one of {SEED_KINDS}")
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        for key in ("p", "p_in", "p_out", "beta"):
            if key in self.params and not 0.0 <= float(self.params[key]) <= 1.0:
                raise ValueError(f"{key} must lie in [0, 1], got {self.params[key]}")


def _bernoulli_pairs(n: int, prob: np.ndarray, rng: np.random.Generator) -> list[tuple[int, int]]:
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(iu.size) < prob
    return list(zip(iu[keep].tolist(), ju[keep].tolist()))


def erdos_renyi(n: int, p: float, rng) -> Graph:
    rng = as_generator(rng)
    return Graph(n, _bernoulli_pairs(n, np.full(n * (n - 1) // 2, float(p)), rng))


def sbm_labels(n: int) -> np.ndarray:
    return np.array(["A"] * (n // 2) + ["B"] * (n // 2))


def stochastic_block_model(n: int, p_in: float, p_out: float, rng) -> tuple[Graph, np.ndarray]:
    """Two equal blocks ``A`` (first half of ids) and ``B``; independent Bernoulli pairs."""
    if n % 2:
        raise ValueError(f"SBM needs an even node count for equal blocks, got {n}")
    rng = as_generator(rng)
    labels = sbm_labels(n)
    iu, ju = np.triu_indices(n, k=1)
    prob = np.where(labels[iu] == labels[ju], float(p_in), float(p_out))
    return Graph(n, _bernoulli_pairs(n, prob, rng)), labels


def ring_lattice(n: int, k: int) -> Graph:
    """Ring where each node links to ``k // 2`` neighbours on each side."""
    if k >= n:
        raise ValueError(f"ring lattice needs k < n, got k={k}, n={n}")
    half = k // 2
    return Graph(n, ((u, (u + j) % n) for u in range(n) for j in range(1, half + 1)))


def watts_strogatz(n: int, k: int, beta: float, rng) -> Graph:
    """Classical rewiring: each node's right-hand lattice edges move with prob ``beta``.

    The new endpoint is uniform over the node's current non-neighbours.
    """
    rng = as_generator(rng)
    g = ring_lattice(n, k)
    for u in range(n):
        for j in range(1, k // 2 + 1):
            v = (u + j) % n
            if rng.random() >= beta:
                continue
            if not g.has_edge(u, v):
                continue
            options = g.non_neighbors(u)
            if not options:
                continue
            w = options[int(rng.integers(len(options)))]
            g._remove_edge(u, v)
            g.add_edge(u, w)
    return g


def barabasi_albert(n: int, m: int, rng) -> Graph:
    """Preferential attachment from an initial star on ``m + 1`` nodes."""
    if m < 1 or n <= m:
        raise ValueError(f"BA needs n > m >= 1, got n={n}, m={m}")
    rng = as_generator(rng)
    g = Graph(n, ((0, v) for v in range(1, m + 1)))
    # each endpoint appears once per incident edge, so uniform draws are degree-proportional
    ends: list[int] = [0] * m + list(range(1, m + 1))
    for new in range(m + 1, n):
        targets: set[int] = set()
        while len(targets) < m:
            targets.add(ends[int(rng.integers(len(ends)))])
        for t in sorted(targets):
            g.add_edge(new, t)
            ends.extend((new, t))
    return g


def generate_ba(n: int, m: int, seed: int) -> Graph:
    return barabasi_albert(n, m, seed)


def generate_seed(spec: SeedSpec) -> tuple[Graph, np.ndarray | None]:
    """Build the seed network; SBM also returns block labels."""
    p = spec.params
    rng = as_generator(spec.seed)
    if spec.kind == "empty":
        return Graph(spec.n), None
    if spec.kind == "er":
        return erdos_renyi(spec.n, float(p.get("p", 0.1)), rng), None
    if spec.kind == "sbm":
        return stochastic_block_model(spec.n, float(p.get("p_in", 0.5)), float(p.get("p_out", 0.1)), rng)
    if spec.kind == "ring_lattice":
        return ring_lattice(spec.n, int(p.get("k", 4))), None
    if spec.kind == "watts_strogatz":
        return watts_strogatz(spec.n, int(p.get("k", 4)), float(p.get("beta", 0.0)), rng), None
    return barabasi_albert(spec.n, int(p.get("m", 1)), rng), None


# --------------------------------------------------------------------------
# attributes

@dataclass(frozen=True)
class AttributeSchema:
    """Ordered categorical features with their vocabularies."""

    features: tuple[tuple[str, tuple], ...]

    def __post_init__(self):
        names = [name for name, _ in self.features]
        if len(set(names)) != len(names):
            raise ValueError(f"feature names must be unique: {names}")
        for name, vocab in self.features:
            if len(vocab) == 0:
                raise ValueError(f"feature {name!r} has an empty vocabulary")

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, Sequence]) -> "AttributeSchema":
        return cls(tuple((str(k), tuple(v)) for k, v in mapping.items()))

    @classmethod
    def default(cls, distractor: bool = False) -> "AttributeSchema":
        items = dict(DEFAULT_VOCABULARIES)
        if distractor:
            items[DISTRACTOR[0]] = DISTRACTOR[1]
        return cls.from_mapping(items)

    @property
    def names(self) -> list[str]:
        return [name for name, _ in self.features]


class AttributeTable:
    """Per-node categorical features stored as integer codes."""

    def __init__(self, columns: Mapping[str, Sequence], vocabularies: Mapping[str, Sequence] | None = None):
        self.names: list[str] = list(columns)
        lengths = {len(v) for v in columns.values()}
        if len(lengths) > 1:
            raise ValueError("attribute columns differ in length")
        self.n = lengths.pop() if lengths else 0
        self.vocab: dict[str, list] = {}
        self.codes: dict[str, np.ndarray] = {}
        for name, values in columns.items():
            values = [v.item() if isinstance(v, np.generic) else v for v in values]
            if vocabularies is not None and name in vocabularies:
                vocab = list(vocabularies[name])
            else:
                vocab = sorted(set(values), key=lambda x: (str(type(x)), x))
            index = {v: i for i, v in enumerate(vocab)}
            try:
                self.codes[name] = np.array([index[v] for v in values], dtype=np.int64)
            except KeyError as exc:
                raise ValueError(f"value {exc.args[0]!r} of {name!r} not in vocabulary") from None
            self.vocab[name] = vocab

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AttributeTable):
            return NotImplemented
        return self.to_columns() == other.to_columns()

    def value(self, node: int, name: str):
        return self.vocab[name][int(self.codes[name][node])]

    def row(self, node: int) -> dict:
        return {name: self.value(node, name) for name in self.names}

    def column(self, name: str) -> list:
        vocab = self.vocab[name]
        return [vocab[c] for c in self.codes[name]]

    def to_columns(self) -> dict[str, list]:
        return {name: self.column(name) for name in self.names}

    def similarity(self, i: int, j: int) -> int:
        """Number of features on which ``i`` and ``j`` agree."""
        return int(sum(int(self.codes[name][i] == self.codes[name][j]) for name in self.names))

    def similarity_to(self, i: int, others: Sequence[int] | np.ndarray) -> np.ndarray:
        others = np.asarray(others, dtype=np.int64)
        out = np.zeros(others.size, dtype=np.int64)
        for name in self.names:
            col = self.codes[name]
            out += col[others] == col[i]
        return out

    def subset(self, names: Sequence[str]) -> "AttributeTable":
        return AttributeTable({n: self.column(n) for n in names}, {n: self.vocab[n] for n in names})


def generate_attributes(n: int, schema: AttributeSchema, seed) -> AttributeTable:
    """Each feature drawn independently and uniformly from its vocabulary."""
    rng = as_generator(seed)
    columns = {}
    for name, vocab in schema.features:
        idx = rng.integers(0, len(vocab), size=n)
        columns[name] = [vocab[i] for i in idx]
    return AttributeTable(columns, {name: vocab for name, vocab in schema.features})


def attributed_graph(n: int, schema: AttributeSchema, mean_degree: float, homophily: float,
                     seed, fitness_sigma: float = 0.8) -> tuple[Graph, AttributeTable]:
    """Synthetic social graph with homophily and heterogeneous degrees.

    Pair probability is ``c * f_i * f_j * exp(homophily * w_ij)`` with lognormal
    fitness ``f`` and ``c`` chosen to hit ``mean_degree`` in expectation.
    """
    rng = as_generator(seed)
    attrs = generate_attributes(n, schema, rng)
    fitness = rng.lognormal(0.0, fitness_sigma, size=n)
    iu, ju = np.triu_indices(n, k=1)
    sim = np.zeros(iu.size)
    for name in attrs.names:
        col = attrs.codes[name]
        sim += col[iu] == col[ju]
    raw = fitness[iu] * fitness[ju] * np.exp(homophily * sim)
    target_edges = mean_degree * n / 2.0
    c = target_edges / raw.sum()
    prob = np.minimum(1.0, c * raw)
    keep = rng.random(iu.size) < prob
    return Graph(n, zip(iu[keep].tolist(), ju[keep].tolist())), attrs


__all__ = [
    "SeedSpec", "SEED_KINDS", "GraphError", "AttributeSchema", "AttributeTable",
    "erdos_renyi", "stochastic_block_model", "sbm_labels", "ring_lattice", "watts_strogatz",
    "barabasi_albert", "generate_ba", "generate_seed", "generate_attributes", "attributed_graph",
    "DEFAULT_VOCABULARIES", "DISTRACTOR",
]
