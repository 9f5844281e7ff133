"""Yearly actor collaboration networks and team-level network metrics.

Snapshots aggregate all co-appearances in movies up to a given year. Metric
functions are pure; edge weights matter only for neighborhood-vector cosine
similarity, every path/clustering metric treats the graph as unweighted.
"""

from __future__ import annotations

import math
from collections import deque

import numpy as np
from dataclasses import dataclass
from typing import Iterable, Mapping

from .corpus import Corpus, DEFAULT_TEAM_SIZE, MovieRecord


class TeamError(Exception):
    """Raised when a metric's team precondition is violated."""


@dataclass(frozen=True)
class Team:
    movie_id: str
    members: tuple[str, ...]
    director_id: str | None = None

    def __post_init__(self) -> None:
        if not self.members:
            raise TeamError(f"movie {self.movie_id}: empty team")


def team_of(movie: MovieRecord, size: int = DEFAULT_TEAM_SIZE) -> Team:
    return Team(movie.movie_id, movie.team(size), movie.director_id)


class CollabSnapshot:
    """Weighted undirected simple graph of co-appearances through as_of_year."""

    def __init__(self, as_of_year: int):
        self.as_of_year = as_of_year
        self._adj: dict[str, dict[str, int]] = {}

    @property
    def nodes(self) -> set[str]:
        return set(self._adj)

    def node_count(self) -> int:
        return len(self._adj)

    def edge_count(self) -> int:
        return sum(len(nbrs) for nbrs in self._adj.values()) // 2

    def add_node(self, pid: str) -> None:
        self._adj.setdefault(pid, {})

    def add_collaboration(self, a: str, b: str) -> None:
        if a == b:
            return
        self.add_node(a)
        self.add_node(b)
        self._adj[a][b] = self._adj[a].get(b, 0) + 1
        self._adj[b][a] = self._adj[b].get(a, 0) + 1

    def weight(self, a: str, b: str) -> int:
        return self._adj.get(a, {}).get(b, 0)

    def neighbors(self, pid: str) -> dict[str, int]:
        """The node's neighborhood vector: neighbor -> co-appearance count."""
        return self._adj.get(pid, {})

    def degree(self, pid: str) -> int:
        return len(self._adj.get(pid, ()))

    def copy(self) -> "CollabSnapshot":
        dup = CollabSnapshot(self.as_of_year)
        dup._adj = {n: dict(nbrs) for n, nbrs in self._adj.items()}
        return dup

    def edges(self) -> Iterable[tuple[str, str, int]]:
        for a, nbrs in self._adj.items():
            for b, w in nbrs.items():
                if a < b:
                    yield a, b, w

    def export_edge_list(self) -> str:
        lines = [f"{a}\t{b}\t{w}" for a, b, w in sorted(self.edges())]
        return "\n".join(lines) + ("\n" if lines else "")

    def header(self) -> dict:
        return {
            "as_of_year": self.as_of_year,
            "node_count": self.node_count(),
            "edge_count": self.edge_count(),
        }


def build_snapshots(
    corpus: Corpus, first_year: int, last_year: int, team_size: int = DEFAULT_TEAM_SIZE
) -> dict[int, CollabSnapshot]:
    """One cumulative snapshot per year in [first_year, last_year]."""
    if first_year > last_year:
        raise ValueError("first_year must be <= last_year")
    by_year: dict[int, list[MovieRecord]] = {}
    for m in corpus:
        by_year.setdefault(m.year, []).append(m)

    snapshots: dict[int, CollabSnapshot] = {}
    running = CollabSnapshot(first_year - 1)
    min_year = min(by_year) if by_year else first_year
    for year in range(min(min_year, first_year), last_year + 1):
        for m in by_year.get(year, ()):
            # every credited actor becomes a node; edges come from team pairs
            for pid in m.cast:
                running.add_node(pid)
            members = m.team(team_size)
            for i in range(len(members)):
                for j in range(i + 1, len(members)):
                    running.add_collaboration(members[i], members[j])
        if year >= first_year:
            snap = running.copy()
            snap.as_of_year = year
            snapshots[year] = snap
    return snapshots


def _cosine(u: Mapping[str, int], v: Mapping[str, int]) -> float:
    if not u or not v:
        return 0.0
    if len(u) > len(v):
        u, v = v, u
    dot = sum(w * v[k] for k, w in u.items() if k in v)
    nu = math.sqrt(sum(w * w for w in u.values()))
    nv = math.sqrt(sum(w * w for w in v.values()))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return dot / (nu * nv)


def heterogeneity(snapshot: CollabSnapshot, team: Team) -> float:
    """Mean pairwise cosine similarity of members' weighted neighborhood rows.

    Pairs involving a member with no prior collaborations contribute 0.
    """
    members = team.members
    if len(members) < 2:
        raise TeamError(f"movie {team.movie_id}: heterogeneity needs >= 2 members")
    rows = [snapshot.neighbors(p) for p in members]
    total = 0.0
    npairs = 0
    for i in range(len(members)):
        for j in range(i + 1, len(members)):
            total += _cosine(rows[i], rows[j])
            npairs += 1
    return total / npairs


def degree_stats(snapshot: CollabSnapshot, team: Team) -> dict[str, float]:
    """Average count of distinct prior collaborators over team members."""
    degs = [snapshot.degree(p) for p in team.members]
    return {"average_degree": sum(degs) / len(degs)}


def betweenness(snapshot: CollabSnapshot) -> dict[str, float]:
    """Unnormalized Brandes betweenness; each unordered s-t pair counted once."""
    adj = {n: list(snapshot.neighbors(n)) for n in snapshot.nodes}
    bc = {n: 0.0 for n in adj}
    for s in adj:
        # single-source shortest paths
        stack: list[str] = []
        preds: dict[str, list[str]] = {n: [] for n in adj}
        sigma = {n: 0.0 for n in adj}
        dist = {n: -1 for n in adj}
        sigma[s] = 1.0
        dist[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            stack.append(v)
            for w in adj[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = {n: 0.0 for n in adj}
        while stack:
            w = stack.pop()
            for v in preds[w]:
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != s:
                bc[w] += delta[w]
    # each unordered pair was visited from both endpoints
    return {n: v / 2.0 for n, v in bc.items()}


def betweenness_stats(snapshot: CollabSnapshot, team: Team) -> dict[str, float]:
    bc = betweenness(snapshot)
    values = [bc.get(p, 0.0) for p in team.members]
    total = sum(values)
    return {"total": total, "average": total / len(values)}


def actor_director_collab(
    corpus: Corpus, snapshot_year: int, team: Team, team_size: int = DEFAULT_TEAM_SIZE
) -> dict[str, float]:
    """Past-collaboration frequency and profitability between cast and director."""
    if not team.director_id:
        return {"avg_frequency": 0.0, "avg_profit": 0.0, "cold_start": 1.0}
    members = set(team.members)
    director = corpus.person(team.director_id)
    credits = director.directed if director else ()
    past = [
        corpus.movie(mid)
        for mid, year in credits
        if year <= snapshot_year and mid != team.movie_id
    ]
    appearances = 0
    shared: list[MovieRecord] = []
    for m in past:
        overlap = members & set(m.team(team_size))
        if overlap:
            appearances += len(overlap)
            shared.append(m)
    avg_frequency = appearances / len(team.members)
    profits = [
        m.revenue_usd - m.budget_usd
        for m in shared
        if m.revenue_usd is not None and m.budget_usd
    ]
    avg_profit = sum(profits) / len(profits) if profits else 0.0
    return {
        "avg_frequency": avg_frequency,
        "avg_profit": avg_profit,
        "cold_start": 0.0 if shared else 1.0,
    }


def _with_team_clique(snapshot: CollabSnapshot, team: Team) -> CollabSnapshot:
    """Snapshot plus the team's clique as unweighted edges (existing edges kept)."""
    new = snapshot.copy()
    members = team.members
    for pid in members:
        new.add_node(pid)
    for i in range(len(members)):
        for j in range(i + 1, len(members)):
            a, b = members[i], members[j]
            if a != b and new.weight(a, b) == 0:
                new._adj[a][b] = 1
                new._adj[b][a] = 1
    return new


def _clique_already_present(snapshot: CollabSnapshot, team: Team) -> bool:
    members = team.members
    return all(p in snapshot.nodes for p in members) and all(
        snapshot.weight(members[i], members[j]) > 0
        for i in range(len(members))
        for j in range(i + 1, len(members))
        if members[i] != members[j]
    )


def mean_clustering(snapshot: CollabSnapshot) -> float:
    """Mean local clustering coefficient; degree-<2 nodes contribute 0."""
    nodes = snapshot.nodes
    if not nodes:
        return 0.0
    total = 0.0
    for n in nodes:
        nbrs = list(snapshot.neighbors(n))
        k = len(nbrs)
        if k < 2:
            continue
        links = sum(
            1
            for i in range(k)
            for j in range(i + 1, k)
            if snapshot.weight(nbrs[i], nbrs[j]) > 0
        )
        total += 2.0 * links / (k * (k - 1))
    return total / len(nodes)


def mean_shortest_path(snapshot: CollabSnapshot) -> float:
    """Mean BFS distance over connected ordered pairs; 0 if no such pair."""
    nodes = list(snapshot.nodes)
    total = 0
    count = 0
    for s in nodes:
        dist = {s: 0}
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for w in snapshot.neighbors(v):
                if w not in dist:
                    dist[w] = dist[v] + 1
                    queue.append(w)
        total += sum(dist.values())
        count += len(dist) - 1
    return total / count if count else 0.0


def delta_clustering(snapshot: CollabSnapshot, team: Team) -> float:
    """C(before) - C(after adding the team clique); positive = clusters broken."""
    if len(team.members) < 2:
        raise TeamError(f"movie {team.movie_id}: delta metrics need >= 2 members")
    if _clique_already_present(snapshot, team):
        return 0.0
    return mean_clustering(snapshot) - mean_clustering(_with_team_clique(snapshot, team))


def delta_avg_shortest_path(snapshot: CollabSnapshot, team: Team) -> float:
    """L(before) - L(after adding the team clique); larger = spans wider holes."""
    if len(team.members) < 2:
        raise TeamError(f"movie {team.movie_id}: delta metrics need >= 2 members")
    if _clique_already_present(snapshot, team):
        return 0.0
    return mean_shortest_path(snapshot) - mean_shortest_path(_with_team_clique(snapshot, team))


class SnapshotMetrics:
    """Precomputed per-snapshot state making team metrics O(small) per movie.

    Results agree with the direct functions above; the cache exists because the
    pipeline evaluates thousands of teams against each yearly snapshot.
    """

    _UNREACHABLE = np.iinfo(np.int32).max

    def __init__(self, snapshot: CollabSnapshot):
        self.snapshot = snapshot
        self.nodes = sorted(snapshot.nodes)
        self.index = {n: i for i, n in enumerate(self.nodes)}
        n = len(self.nodes)
        self._betweenness = betweenness(snapshot)
        self.adj_bool = np.zeros((n, n), dtype=bool)
        adj_lists: list[list[int]] = [[] for _ in range(n)]
        for a, b, _w in snapshot.edges():
            i, j = self.index[a], self.index[b]
            self.adj_bool[i, j] = self.adj_bool[j, i] = True
            adj_lists[i].append(j)
            adj_lists[j].append(i)
        # all-pairs BFS distances, sentinel for unreachable
        self.dist = np.full((n, n), self._UNREACHABLE, dtype=np.int32)
        for s in range(n):
            row = self.dist[s]
            row[s] = 0
            queue = deque([s])
            while queue:
                v = queue.popleft()
                dv = row[v]
                for w in adj_lists[v]:
                    if row[w] == self._UNREACHABLE:
                        row[w] = dv + 1
                        queue.append(w)
        finite = self.dist != self._UNREACHABLE
        offdiag = finite.copy()
        np.fill_diagonal(offdiag, False)
        self.base_path_sum = float(self.dist[offdiag].sum())
        self.base_path_count = int(offdiag.sum())
        # base local clustering per node (degree < 2 contributes 0)
        self.local_c = np.zeros(n)
        for v in range(n):
            nbrs = adj_lists[v]
            k = len(nbrs)
            if k < 2:
                continue
            links = int(self.adj_bool[np.ix_(nbrs, nbrs)].sum()) // 2
            self.local_c[v] = 2.0 * links / (k * (k - 1))
        self.base_c_sum = float(self.local_c.sum())
        self._adj_lists = adj_lists

    def betweenness_of(self, pid: str) -> float:
        return self._betweenness.get(pid, 0.0)

    def mean_clustering(self) -> float:
        n = len(self.nodes)
        return self.base_c_sum / n if n else 0.0

    def mean_shortest_path(self) -> float:
        return self.base_path_sum / self.base_path_count if self.base_path_count else 0.0

    def _team_split(self, team: Team) -> tuple[list[int], int]:
        present = [self.index[p] for p in team.members if p in self.index]
        new_count = len(team.members) - len(present)
        return present, new_count

    def delta_clustering(self, team: Team) -> float:
        if len(team.members) < 2:
            raise TeamError(f"movie {team.movie_id}: delta metrics need >= 2 members")
        if _clique_already_present(self.snapshot, team):
            return 0.0
        present, new_count = self._team_split(team)
        n = len(self.nodes)
        n_after = n + new_count
        team_size = len(team.members)

        # new clique members: their neighbors are the other team members, which
        # are pairwise adjacent after the clique lands
        new_node_c = float(new_count) if team_size >= 3 else 0.0

        adjusted = 0.0  # sum of (c' - c) over affected existing nodes
        present_set = set(present)
        # recompute present team members against the overlaid clique
        for s in present:
            nbrs = set(self._adj_lists[s]) | (present_set - {s})
            k = len(nbrs) + new_count  # new members also become neighbors
            if k < 2:
                adjusted -= self.local_c[s]
                continue
            nbr_list = sorted(nbrs)
            links = int(self.adj_bool[np.ix_(nbr_list, nbr_list)].sum()) // 2
            # clique pairs among existing neighbors that were not edges before
            in_team = [v for v in nbr_list if v in present_set]
            for i in range(len(in_team)):
                for j in range(i + 1, len(in_team)):
                    if not self.adj_bool[in_team[i], in_team[j]]:
                        links += 1
            # every new member links to all other team members in this hood
            links += new_count * len(in_team) + new_count * (new_count - 1) // 2
            adjusted += 2.0 * links / (k * (k - 1)) - self.local_c[s]

        # other nodes change only if adjacent to >= 2 present team members
        if len(present) >= 2:
            cols = self.adj_bool[:, present]
            counts = cols.sum(axis=1)
            for v in np.flatnonzero(counts >= 2):
                if v in present_set:
                    continue
                tm = [s for s in present if self.adj_bool[v, s]]
                gained = sum(
                    1
                    for i in range(len(tm))
                    for j in range(i + 1, len(tm))
                    if not self.adj_bool[tm[i], tm[j]]
                )
                if gained:
                    k = len(self._adj_lists[v])
                    adjusted += 2.0 * gained / (k * (k - 1))

        c_after = (self.base_c_sum + adjusted + new_node_c) / n_after
        return self.mean_clustering() - c_after

    def delta_avg_shortest_path(self, team: Team) -> float:
        if len(team.members) < 2:
            raise TeamError(f"movie {team.movie_id}: delta metrics need >= 2 members")
        if _clique_already_present(self.snapshot, team):
            return 0.0
        present, new_count = self._team_split(team)
        n = len(self.nodes)
        UNREACH = self._UNREACHABLE

        if not present:
            # isolated clique: only the new nodes' mutual pairs change the mean
            extra_pairs = new_count * (new_count - 1)
            total = self.base_path_sum + extra_pairs
            count = self.base_path_count + extra_pairs
            after = total / count if count else 0.0
            return self.mean_shortest_path() - after

        du = self.dist[:, present].astype(np.float64)
        du[du == UNREACH] = np.inf
        if len(present) == 1:
            a1 = du[:, 0]
            a2 = np.full(n, np.inf)
            arg1 = np.zeros(n, dtype=np.int64)
        else:
            order = np.argsort(du, axis=1)
            a1 = du[np.arange(n), order[:, 0]]
            a2 = du[np.arange(n), order[:, 1]]
            arg1 = order[:, 0]

        # shortcut distance using one clique hop: min over s != t of a_s(u)+1+a_t(v)
        same = arg1[:, None] == arg1[None, :]
        shortcut = a1[:, None] + 1.0 + a1[None, :]
        alt = np.minimum(a1[:, None] + 1.0 + a2[None, :], a2[:, None] + 1.0 + a1[None, :])
        shortcut = np.where(same, alt, shortcut)
        if len(present) == 1:
            shortcut = np.full((n, n), np.inf)  # a single entry point is no edge

        base = self.dist.astype(np.float64)
        base[base == UNREACH] = np.inf
        d_after = np.minimum(base, shortcut)
        np.fill_diagonal(d_after, np.inf)
        finite = np.isfinite(d_after)
        total = float(d_after[finite].sum())
        count = int(finite.sum())

        # pairs touching the new clique members
        if new_count:
            to_new = a1 + 1.0  # old node -> any new member
            reach = np.isfinite(to_new)
            total += 2.0 * new_count * float(to_new[reach].sum())
            count += 2 * new_count * int(reach.sum())
            total += new_count * (new_count - 1)
            count += new_count * (new_count - 1)

        after = total / count if count else 0.0
        return self.mean_shortest_path() - after
