"""Ratings ingestion: MovieLens-1M format to a reward model plus replay pool.

Pipeline: join the three `::`-delimited files, collapse users into
meta-users (distinct age/occupation pairs), assign each movie one genre
uniformly at random, split ratings 50/50 into train/test with a repair pass
that guarantees every meta-user has training data, learn the mean-rating
table from the training half, and keep the test half as the empirical
reward pool.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .environment import EmpiricalPool
from .model import RewardModel, ThetaGrid, build_from_table
from .modelio import model_to_dict
from .simulation import mix64

__all__ = [
    "RatingRecord",
    "MetaUserIndex",
    "LearnedRewardTable",
    "IngestError",
    "parse_movielens",
    "learn_reward_table",
    "export_model",
]

MALFORMED_LIMIT = 0.01


class IngestError(ValueError):
    pass


@dataclass(frozen=True)
class RatingRecord:
    user_id: int
    age: int
    occupation: int
    movie_id: int
    genres: tuple[str, ...]
    rating: int
    timestamp: int


@dataclass(frozen=True)
class MetaUserIndex:
    """Dense indices for the distinct (age, occupation) pairs, sorted."""

    pairs: tuple[tuple[int, int], ...]

    @classmethod
    def from_pairs(cls, pairs) -> "MetaUserIndex":
        return cls(pairs=tuple(sorted(set(pairs))))

    def __len__(self) -> int:
        return len(self.pairs)

    def index(self, age: int, occupation: int) -> int:
        from bisect import bisect_left

        i = bisect_left(self.pairs, (age, occupation))
        if i == len(self.pairs) or self.pairs[i] != (age, occupation):
            raise KeyError(f"unknown meta-user (age={age}, occupation={occupation})")
        return i

    def label(self, i: int) -> str:
        age, occ = self.pairs[i]
        return f"age={age}|occ={occ}"


@dataclass(frozen=True)
class LearnedRewardTable:
    means: np.ndarray  # |meta-users| x |genres|
    counts: np.ndarray  # training samples per cell
    genres: tuple[str, ...]
    meta_users: MetaUserIndex
    fallback_cells: tuple[tuple[int, int], ...]  # cells filled with the genre mean


def _read_lines(path) -> list[str]:
    p = Path(path)
    if not p.exists():
        raise IngestError(f"missing file: {p}")
    return p.read_text(encoding="latin-1").splitlines()


def parse_movielens(users_path, movies_path, ratings_path) -> list[RatingRecord]:
    """Join users, movies and ratings into records.

    Malformed lines (wrong field count, non-numeric fields, out-of-range
    ratings, dangling user/movie references, empty genre lists) are counted
    and reported; more than 1% of all lines malformed is an error.
    """
    malformed: list[str] = []
    total_lines = 0

    users: dict[int, tuple[int, int]] = {}
    for line in _read_lines(users_path):
        if not line.strip():
            continue
        total_lines += 1
        parts = line.split("::")
        try:
            if len(parts) != 5:
                raise ValueError
            users[int(parts[0])] = (int(parts[2]), int(parts[3]))
        except ValueError:
            malformed.append(line)

    movies: dict[int, tuple[str, ...]] = {}
    for line in _read_lines(movies_path):
        if not line.strip():
            continue
        total_lines += 1
        parts = line.split("::")
        try:
            if len(parts) != 3:
                raise ValueError
            genres = tuple(g for g in parts[2].split("|") if g)
            if not genres:
                raise ValueError
            movies[int(parts[0])] = genres
        except ValueError:
            malformed.append(line)

    records: list[RatingRecord] = []
    for line in _read_lines(ratings_path):
        if not line.strip():
            continue
        total_lines += 1
        parts = line.split("::")
        try:
            if len(parts) != 4:
                raise ValueError
            uid, mid, rating, ts = (int(x) for x in parts)
            if not (1 <= rating <= 5) or uid not in users or mid not in movies:
                raise ValueError
        except ValueError:
            malformed.append(line)
            continue
        age, occ = users[uid]
        records.append(
            RatingRecord(
                user_id=uid, age=age, occupation=occ, movie_id=mid,
                genres=movies[mid], rating=rating, timestamp=ts,
            )
        )

    if total_lines and len(malformed) / total_lines > MALFORMED_LIMIT:
        samples = "; ".join(malformed[:5])
        raise IngestError(
            f"{len(malformed)} of {total_lines} lines malformed (>1%); samples: {samples}"
        )
    return records


def learn_reward_table(
    records: list[RatingRecord], genre_universe, split_seed: int
) -> tuple[LearnedRewardTable, EmpiricalPool, MetaUserIndex]:
    """Genre assignment, 50/50 split with repair, mean table, replay pool."""
    if not records:
        raise IngestError("no rating records")
    genres = tuple(genre_universe)
    genre_idx = {g: i for i, g in enumerate(genres)}
    meta = MetaUserIndex.from_pairs((r.age, r.occupation) for r in records)

    rating_counts = np.zeros(len(meta), dtype=int)
    for r in records:
        rating_counts[meta.index(r.age, r.occupation)] += 1
    if np.any(rating_counts == 0):
        missing = [meta.label(i) for i in np.flatnonzero(rating_counts == 0)]
        raise IngestError(f"meta-users without any ratings: {', '.join(missing)}")

    # One genre per movie, drawn uniformly from its genre list. Movies are
    # visited in sorted id order so the assignment depends only on the seed.
    genre_lists: dict[int, tuple[str, ...]] = {}
    for r in records:
        genre_lists.setdefault(r.movie_id, r.genres)
    assign_rng = np.random.Generator(np.random.PCG64(mix64(split_seed, "genre-assign")))
    movie_genres = {}
    for mid in sorted(genre_lists):
        glist = genre_lists[mid]
        for g in glist:
            if g not in genre_idx:
                raise IngestError(f"movie {mid} carries unknown genre {g!r}")
        movie_genres[mid] = glist[int(assign_rng.integers(len(glist)))]

    split_rng = np.random.Generator(np.random.PCG64(mix64(split_seed, "split")))
    perm = split_rng.permutation(len(records))
    n_train = len(records) // 2
    in_train = np.zeros(len(records), dtype=bool)
    in_train[perm[:n_train]] = True

    meta_of = np.array([meta.index(r.age, r.occupation) for r in records])
    # Repair pass: every meta-user must contribute at least one training
    # rating; move its lowest-index test rating over if necessary.
    for m in range(len(meta)):
        rows = np.flatnonzero(meta_of == m)
        if not in_train[rows].any():
            in_train[rows[0]] = True

    n_meta, n_genres = len(meta), len(genres)
    sums = np.zeros((n_meta, n_genres))
    counts = np.zeros((n_meta, n_genres), dtype=int)
    test_cells = [[[] for _ in range(n_genres)] for _ in range(n_meta)]
    genre_sums = np.zeros(n_genres)
    genre_counts = np.zeros(n_genres, dtype=int)
    for i, r in enumerate(records):
        m = meta_of[i]
        g = genre_idx[movie_genres[r.movie_id]]
        if in_train[i]:
            sums[m, g] += r.rating
            counts[m, g] += 1
            genre_sums[g] += r.rating
            genre_counts[g] += 1
        else:
            test_cells[m][g].append(float(r.rating))

    global_mean = genre_sums.sum() / max(1, genre_counts.sum())
    genre_means = np.where(genre_counts > 0, genre_sums / np.maximum(genre_counts, 1), global_mean)
    means = np.zeros((n_meta, n_genres))
    fallback_cells = []
    for m in range(n_meta):
        for g in range(n_genres):
            if counts[m, g] > 0:
                means[m, g] = sums[m, g] / counts[m, g]
            else:
                means[m, g] = genre_means[g]
                fallback_cells.append((m, g))

    table = LearnedRewardTable(
        means=means, counts=counts, genres=genres, meta_users=meta,
        fallback_cells=tuple(fallback_cells),
    )
    pool = EmpiricalPool(
        samples=tuple(tuple(tuple(cell) for cell in row) for row in test_cells),
        fallback_mean=means.copy(),
    )
    return table, pool, meta


def export_model(
    table: LearnedRewardTable, sigma: float, pool: EmpiricalPool | None = None
) -> tuple[RewardModel, dict]:
    """Reward model over meta-user indices plus its model-exchange document.

    The grid is one-dimensional with point j equal to the dense meta-user
    index j; arms are genres. The document round-trips losslessly through
    the table constructor and carries the replay pools when given.
    """
    n_meta = len(table.meta_users)
    grid = ThetaGrid(
        points=np.arange(n_meta, dtype=float).reshape(-1, 1),
        labels=tuple(table.meta_users.label(i) for i in range(n_meta)),
    )
    base = build_from_table(grid, table.means.T, sigma)
    model = RewardModel(
        grid=grid, means=base.means, sigma=base.sigma, arm_labels=table.genres
    )
    doc = model_to_dict(model, pools_payload(pool) if pool is not None else None)
    return model, doc


def pools_payload(pool: EmpiricalPool) -> dict[tuple[int, int], list[float]]:
    out = {}
    for j, row in enumerate(pool.samples):
        for k, cell in enumerate(row):
            if cell:
                out[(j, k)] = list(cell)
    return out
