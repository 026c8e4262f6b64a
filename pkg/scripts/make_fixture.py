#!/usr/bin/env python3
"""Regenerate the synthetic ratings fixture under tests/data/movielens_fixture.

20 meta-users (ages 1/18/25/35 x occupations 0-4), two users per meta-user,
5 single-genre groups of 10 movies, and 10 identical ratings per
(meta-user, genre) cell with value ((meta + 2*genre) % 5) + 1. Identical
cell values make the learned mean table independent of the train/test split.
"""

from pathlib import Path

AGES = [1, 18, 25, 35]
OCCUPATIONS = [0, 1, 2, 3, 4]
GENRES = ["Action", "Comedy", "Drama", "Romance", "Sci-Fi"]


def main() -> None:
    out = Path(__file__).resolve().parent.parent / "tests" / "data" / "movielens_fixture"
    out.mkdir(parents=True, exist_ok=True)

    pairs = sorted((a, o) for a in AGES for o in OCCUPATIONS)

    users = []
    for uid in range(1, 2 * len(pairs) + 1):
        age, occ = pairs[(uid - 1) // 2]
        gender = "F" if uid % 2 else "M"
        users.append(f"{uid}::{gender}::{age}::{occ}::00000")
    (out / "users.dat").write_text("\n".join(users) + "\n")

    movies = []
    for mid in range(1, 10 * len(GENRES) + 1):
        genre = GENRES[(mid - 1) // 10]
        movies.append(f"{mid}::Movie {mid} ({1990 + mid % 20})::{genre}")
    (out / "movies.dat").write_text("\n".join(movies) + "\n")

    ratings = []
    ts = 978300000
    for uid in range(1, 2 * len(pairs) + 1):
        meta = (uid - 1) // 2
        for g in range(len(GENRES)):
            rating = ((meta + 2 * g) % 5) + 1
            for j in range(5):
                mid = g * 10 + 1 + (uid + j) % 10
                ratings.append(f"{uid}::{mid}::{rating}::{ts}")
                ts += 1
    (out / "ratings.dat").write_text("\n".join(ratings) + "\n")
    print(f"wrote fixture to {out} ({len(users)} users, {len(movies)} movies, {len(ratings)} ratings)")


if __name__ == "__main__":
    main()
