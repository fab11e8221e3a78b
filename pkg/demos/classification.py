"""kNN classification of binary vs trinary Gaussian mixtures.

A small version of the Random Gaussians experiment: Morse graphs are
extracted from every field, W and GW distance matrices are computed for
test-by-train pairs, and a 3-NN classifier is scored on an 80-20 split.
Use ``--n 100`` for the full-size collection (several minutes).

    python demos/classification.py --n 30
"""

import argparse
import warnings

from morseot.analysis import distance_matrix, knn_classify, stratified_split
from morseot.datasets import gaussian_collection
from morseot.ot import SolverConfig
from morseot.pipeline import extract

ap = argparse.ArgumentParser()
ap.add_argument("--n", type=int, default=30, help="instances per class")
ap.add_argument("--kind", choices=("random", "rotating"), default="random")
ap.add_argument("--seed", type=int, default=0)
args = ap.parse_args()

fields, labels = gaussian_collection(args.kind, args.seed, args.n)
with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    nets = [extract(f, 0.07, 0.15, keep_largest=True).network for f in fields]
train, test = stratified_split(labels, 0.8, args.seed)
pairs = [(i, j) for i in test for j in train]
for kind in ("w", "gw"):
    D = distance_matrix(nets, kind, SolverConfig(restarts=1), pairs=pairs)
    rep = knn_classify(D, labels, 3, split=(train, test))
    print(f"{kind:3s} accuracy {rep.accuracy:.3f}  f1 {rep.f1}")
