"""Share of test instances on the convex hull, archetypal vs random splits."""
import numpy as np
from scipy.spatial import ConvexHull

from archsplit.assign import partition_matrix
from archsplit.harness import random_split
from archsplit.synthetic import planted_outliers


def main():
    X, planted = planted_outliers()
    hull = set(ConvexHull(X.astype(float)).vertices.tolist())
    for frac in (0.05, 0.1, 0.2):
        part = partition_matrix(X, frac)
        ours = np.mean([i in hull for i in part.test_indices])
        base = np.mean([np.mean([i in hull for i in random_split(len(X), frac, s).test_indices])
                        for s in range(20)])
        caught = len(set(part.test_indices.tolist()) & set(planted.tolist()))
        print(f"fraction={frac} hull_rate={ours:.3f} random={base:.3f} "
              f"planted_in_test={caught}/{len(planted)}")


if __name__ == "__main__":
    main()
