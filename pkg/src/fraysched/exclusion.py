"""Signal and node mutual exclusion matrices.

Both matrices are computed once per instance and answer the only two
questions the placement loop asks, in constant time:

* may two signals overlap in a multiframe?   (yes iff smem == 0)
* may two nodes share a static slot?         (yes iff nmem == 0)

smem[a][b] is 1 iff some variant uses both signals; the diagonal is forced
to 1 (a signal never overlaps itself).  nmem[p][q] is 1 iff p != q and some
variant carries signals from both nodes; the diagonal is 0 because one node
sharing a slot with itself is the normal frame-packing case.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from .core import NodeId, Signal, VariantMatrix


class ExclusionMatrices:
    def __init__(
        self,
        signal_ids: Sequence[str],
        nodes: Sequence[NodeId],
        smem: np.ndarray,
        nmem: np.ndarray,
    ):
        self.signal_ids = tuple(signal_ids)
        self.nodes = tuple(nodes)
        self.signal_index = {sid: i for i, sid in enumerate(self.signal_ids)}
        self.node_index = {n: i for i, n in enumerate(self.nodes)}
        self.smem = smem
        self.nmem = nmem
        self._smem_rows: dict[int, bytes] = {}

    def signals_conflict(self, a: str, b: str) -> bool:
        """True iff the two signals must never overlap (co-used somewhere)."""
        return bool(self.smem[self.signal_index[a], self.signal_index[b]])

    def nodes_conflict(self, p: NodeId, q: NodeId) -> bool:
        """True iff the two nodes must not share a slot."""
        return bool(self.nmem[self.node_index[p], self.node_index[q]])

    def smem_row(self, index: int) -> bytes:
        """Conflict row of one signal as bytes, cached for hot loops."""
        row = self._smem_rows.get(index)
        if row is None:
            row = self.smem[index].astype(np.uint8).tobytes()
            self._smem_rows[index] = row
        return row


def compute_mems(
    signals: Sequence[Signal], variants: VariantMatrix
) -> ExclusionMatrices:
    """Precompute both exclusion matrices from the variant membership."""
    signal_ids = [s.id for s in signals]
    nodes = []
    node_of = []
    for s in signals:
        if s.node not in nodes:
            nodes.append(s.node)
        node_of.append(nodes.index(s.node))

    n = len(signals)
    m = len(nodes)
    v = variants.count

    member = np.zeros((n, v), dtype=np.float32)
    for j, group in enumerate(variants.members):
        for i, sid in enumerate(signal_ids):
            if sid in group:
                member[i, j] = 1.0

    if n:
        smem = (member @ member.T) > 0.5
        np.fill_diagonal(smem, True)
    else:
        smem = np.zeros((0, 0), dtype=bool)

    node_member = np.zeros((m, v), dtype=np.float32)
    for i in range(n):
        node_member[node_of[i]] = np.maximum(node_member[node_of[i]], member[i])
    if m:
        nmem = (node_member @ node_member.T) > 0.5
        np.fill_diagonal(nmem, False)
    else:
        nmem = np.zeros((0, 0), dtype=bool)

    return ExclusionMatrices(signal_ids, nodes, smem, nmem)


def dump_mems_csv(mems: ExclusionMatrices, out_dir: Union[str, Path]) -> None:
    """Write both matrices as 0/1 CSV grids with id headers (debug aid)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "smem.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow([""] + list(mems.signal_ids))
        for i, sid in enumerate(mems.signal_ids):
            w.writerow([sid] + [int(x) for x in mems.smem[i]])
    with open(out / "nmem.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow([""] + [str(nd) for nd in mems.nodes])
        for i, nd in enumerate(mems.nodes):
            w.writerow([str(nd)] + [int(x) for x in mems.nmem[i]])
