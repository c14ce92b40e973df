import random

from halkron.sequences import PointSet2


def random_point_set(rng: random.Random, n_points: int, width: int = 128,
                     coarse: bool = False, allow_dups: bool = True) -> PointSet2:
    """Random exact point set; ``coarse`` snaps to a 16-cell grid so that
    ties and duplicates actually occur."""
    xs, ys = [], []
    for _ in range(n_points):
        if coarse:
            xs.append(rng.randrange(16) << (width - 4))
            ys.append(rng.randrange(16) << (width - 4))
        else:
            xs.append(rng.getrandbits(width))
            ys.append(rng.getrandbits(width))
    if allow_dups and n_points >= 2 and rng.random() < 0.3:
        j = rng.randrange(n_points - 1)
        xs[j + 1], ys[j + 1] = xs[j], ys[j]
    return PointSet2(xs, ys, width)
