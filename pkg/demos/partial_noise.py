"""Partial FGW on a clean/noisy pair of sum-of-sines fields.

The noisy target grows spurious edges. Sweeping the transported mass m and
taking the elbow of the maximum matched distance drops those first; the
dropped target nodes are drawn hollow in the color-transfer SVGs.

    python demos/partial_noise.py   # writes demos/out/
"""

import warnings
from pathlib import Path

import numpy as np

from morseot import svg
from morseot.analysis import color_transfer, elbow_select, m_sweep
from morseot.datasets import sn_pair
from morseot.network import normalize_pair
from morseot.pipeline import extract

out = Path(__file__).parent / "out"
out.mkdir(exist_ok=True)

src, tgt = sn_pair(noise_amp=0.3)
with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    A, B = extract(src, 0.07, 0.05), extract(tgt, 0.07, 0.05)
print(f"source: {A.network.n} nodes, {len(A.graph.edges)} edges")
print(f"target: {B.network.n} nodes, {len(B.graph.edges)} edges")

a, b = normalize_pair(A.network, B.network)
ms = np.round(np.arange(0.5, 1.0001, 0.05), 2)
curve, results = m_sweep(a, b, ms, "pfgw")
for m, mmd in curve:
    print(f"  m={m:.2f}  max matched distance {mmd:.4f}")
elbow = elbow_select(curve)
print("elbow at m =", elbow.m_star)

colors = color_transfer(a, b, results[elbow.index].coupling)
print("hollow target nodes:", int(colors.hollow.sum()))
svg.save_svg(out / "sn_source.svg", svg.graph_svg(A.sampled, colors.source_colors, field=A.field, title="source"))
svg.save_svg(out / "sn_target.svg", svg.graph_svg(B.sampled, colors.target_colors, colors.hollow, B.field, title=f"target, m={elbow.m_star}"))
svg.save_svg(out / "sn_curve.svg", svg.curve_svg(curve, elbow.m_star, title="max matched distance"))
