"""Experiment grids, file pipelines, and CSV export.

``run_grid`` sweeps (n, m) cells of the two-regime benchmark, running
generate -> embed -> diagnostics -> cluster -> ARI per replicate. Replicates
are dispatched to a worker pool but written in sorted (n, m, rep) order, and
every replicate derives its random stream from the master seed and its own
(regime, n, m, rep) key, so output bytes are independent of scheduling and
thread count.
"""

from __future__ import annotations

import csv
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .cluster import (
    Partition,
    adjusted_rand_index,
    choose_k_by_gap,
    complete_linkage,
    cut_at_k,
)
from .core import BlockModelSpec, incidence_matrix, type_matrix
from .fileio import read_communities, read_interactions
from .sampling import FIXED, GROWING, RngStream, SimulationDesign, generate_design
from .spectral import (
    diagnostics,
    embed_interactions,
    hollowed_gram,
    nearest_neighbor_gaps,
    signal_gap,
    theoretical_embedding,
)

__all__ = [
    "ExperimentGrid",
    "CellResult",
    "GRID_CSV_COLUMNS",
    "DEFAULT_M_VALUES",
    "DEFAULT_N_VALUES",
    "DESK_M_MAX",
    "DESK_N_MAX",
    "expected_distinct_types",
    "type_partition",
    "replicate_stream",
    "run_cell",
    "run_grid",
    "write_grid_csv",
    "embed_file",
    "read_embedding_csv",
    "cluster_file",
    "diagnose_instance",
    "write_diagnostics_csv",
]

log = logging.getLogger("hyperclust.harness")

DEFAULT_M_VALUES = tuple(999 * 3**j for j in range(6))
DEFAULT_N_VALUES = tuple(10 * 2**j for j in range(6))
# the largest published cells run for hours; the desk grid keeps the suite fast
DESK_M_MAX = 8991
DESK_N_MAX = 80

GRID_CSV_COLUMNS = [
    "regime",
    "n",
    "m",
    "rep",
    "seed",
    "ari_true_k",
    "ari_gap_k",
    "k_gap",
    "norm_R_Gamma",
    "norm_hollow",
    "norm_SW",
    "norm_Sinv",
    "norm_V_2inf",
    "norm_VS_2inf",
    "delta",
    "b",
    "runtime_ms",
]

_REGIME_CODE = {GROWING: 1, FIXED: 2}


def replicate_stream(regime: str, n: int, m: int, rep: int, master_seed: int) -> RngStream:
    """The random stream a grid replicate draws from; pure in its arguments."""
    return RngStream(master_seed, (_REGIME_CODE[regime], n, m, rep))


@dataclass(frozen=True)
class ExperimentGrid:
    """A sweep over (n, m) cells for one regime."""

    regime: str
    m_values: tuple[int, ...] = DEFAULT_M_VALUES
    n_values: tuple[int, ...] = DEFAULT_N_VALUES
    replicates: int = 10
    seed: int = 0
    out_dir: str | None = None

    def __post_init__(self):
        if self.regime not in _REGIME_CODE:
            raise ValueError(f"regime must be one of {sorted(_REGIME_CODE)}, got {self.regime!r}")
        if not self.m_values or not self.n_values:
            raise ValueError("m_values and n_values must be nonempty")
        if min(self.m_values) < 1 or min(self.n_values) < 1:
            raise ValueError("grid values must be positive")
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")

    def desk_truncated(self) -> "ExperimentGrid":
        return ExperimentGrid(
            regime=self.regime,
            m_values=tuple(m for m in self.m_values if m <= DESK_M_MAX),
            n_values=tuple(n for n in self.n_values if n <= DESK_N_MAX),
            replicates=self.replicates,
            seed=self.seed,
            out_dir=self.out_dir,
        )


@dataclass(frozen=True)
class CellResult:
    """One replicate's scores, diagnostics, and timing."""

    regime: str
    n: int
    m: int
    rep: int
    seed: int
    ari_true_k: float
    ari_gap_k: float
    k_gap: int
    norm_R_Gamma: float
    norm_hollow: float
    norm_SW: float
    norm_Sinv: float
    norm_V_2inf: float
    norm_VS_2inf: float
    delta: float
    b: float
    runtime_ms: int


def expected_distinct_types(design: SimulationDesign) -> int:
    """How many distinct type vectors the design can produce."""
    k_max = design.k_max
    pure = k_max - 1  # sizes 2..k_max, one vector per size and class
    mixed = k_max * (k_max - 1) // 2
    return 2 * pure + mixed


def type_partition(spec: BlockModelSpec) -> Partition:
    """Group interactions by identical type vector."""
    _, codes = np.unique(spec.type_matrix.T, axis=0, return_inverse=True)
    return Partition.from_labels(codes + 1)


def _skip_reason(regime: str, n: int, m: int) -> str | None:
    if m < n:
        return "m >= n violated"
    if n % 2 != 0:
        return "n not divisible by the class count 2"
    if m % 3 != 0:
        return "m not divisible by the 3 basic types"
    k_max = n // 2 if regime == GROWING else 5
    if k_max > n // 2:
        return f"k_max={k_max} exceeds the smallest class size {n // 2}"
    return None


def run_cell(
    regime: str,
    n: int,
    m: int,
    rep: int,
    master_seed: int,
    selection: str = "empirical",
) -> CellResult:
    """Full pipeline on one replicate of one grid cell."""
    stream = replicate_stream(regime, n, m, rep, master_seed)
    design = SimulationDesign(n=n, m=m, regime=regime, seed=master_seed)
    started = time.perf_counter()
    spec, h = generate_design(design, stream)
    R = incidence_matrix(h)
    emb = embed_interactions(R, d=design.d, mode=selection, spec=spec)
    theo = theoretical_embedding(spec)
    report = diagnostics(R, spec, emb, theo)
    gap = signal_gap(spec)

    dend = complete_linkage(emb.embedding)
    truth = type_partition(spec)
    ari_true = adjusted_rand_index(cut_at_k(dend, truth.k), truth)
    k_cap = min(m, 4 * expected_distinct_types(design))
    k_gap = choose_k_by_gap(dend, k_cap)
    ari_gap = adjusted_rand_index(cut_at_k(dend, k_gap), truth)
    elapsed_ms = int(round(1000.0 * (time.perf_counter() - started)))

    return CellResult(
        regime=regime,
        n=n,
        m=m,
        rep=rep,
        seed=master_seed,
        ari_true_k=float(ari_true),
        ari_gap_k=float(ari_gap),
        k_gap=int(k_gap),
        norm_R_Gamma=report.incidence_error,
        norm_hollow=report.gram_error,
        norm_SW=report.singular_alignment_error,
        norm_Sinv=report.inverse_singular_alignment_error,
        norm_V_2inf=report.subspace_row_error,
        norm_VS_2inf=report.embedding_row_error,
        delta=gap.delta,
        b=gap.b,
        runtime_ms=elapsed_ms,
    )


def run_grid(
    grid: ExperimentGrid,
    *,
    selection: str = "empirical",
    threads: int = 1,
    csv_path=None,
    timing: bool = False,
) -> list[CellResult]:
    """Run every retained (cell, replicate); cells violating the design
    assumptions are skipped with a logged reason. A replicate that fails is
    logged and omitted rather than aborting the sweep."""
    cells = []
    for n in sorted(grid.n_values):
        for m in sorted(grid.m_values):
            reason = _skip_reason(grid.regime, n, m)
            if reason:
                log.warning("skipping cell n=%d m=%d: %s", n, m, reason)
            else:
                cells.append((n, m))
    jobs = [(n, m, rep) for (n, m) in cells for rep in range(grid.replicates)]

    results: dict[tuple[int, int, int], CellResult] = {}

    def work(job):
        n, m, rep = job
        try:
            return job, run_cell(grid.regime, n, m, rep, grid.seed, selection)
        except Exception:
            log.exception("replicate n=%d m=%d rep=%d failed", *job)
            return job, None

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(work, jobs))
    else:
        outcomes = [work(job) for job in jobs]
    for job, outcome in outcomes:
        if outcome is not None:
            results[job] = outcome

    ordered = [results[j] for j in sorted(results)]
    if csv_path is not None:
        write_grid_csv(ordered, csv_path, timing=timing)
    return ordered


def write_grid_csv(results: list[CellResult], path, *, timing: bool = False) -> None:
    """Write results in sorted order; omitting --timing zeroes runtime_ms so
    reruns are byte-identical."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(GRID_CSV_COLUMNS)
        for r in results:
            writer.writerow(
                [
                    r.regime,
                    r.n,
                    r.m,
                    r.rep,
                    r.seed,
                    repr(r.ari_true_k),
                    repr(r.ari_gap_k),
                    r.k_gap,
                    repr(r.norm_R_Gamma),
                    repr(r.norm_hollow),
                    repr(r.norm_SW),
                    repr(r.norm_Sinv),
                    repr(r.norm_V_2inf),
                    repr(r.norm_VS_2inf),
                    repr(r.delta),
                    repr(r.b),
                    r.runtime_ms if timing else 0,
                ]
            )


def embed_file(
    input_path,
    output_path,
    d: int = 2,
    mode: str = "empirical",
    communities_path=None,
    c_tilde: float | None = None,
) -> int:
    """Embed the interactions of a file and write one CSV row per interaction.

    With a community file the true type id is appended per row and oracle
    selection becomes available. Returns the number of rows written.
    """
    h = read_interactions(input_path)
    R = incidence_matrix(h)
    spec = None
    if communities_path is not None:
        spec = type_matrix(h, read_communities(communities_path))
    if mode == "oracle" and spec is None:
        raise ValueError("oracle selection needs a community file to derive the bulk values")

    if log.isEnabledFor(logging.INFO):
        eigvals = np.linalg.eigvalsh(hollowed_gram(R).matrix.astype(float))
        gaps = nearest_neighbor_gaps(eigvals)
        top = np.argsort(gaps)[::-1][: max(d, 4)]
        log.info(
            "spectrum: %d eigenvalues in [%.4g, %.4g]; widest nearest-neighbor gaps at %s",
            eigvals.size,
            eigvals[0],
            eigvals[-1],
            ", ".join(f"{eigvals[i]:.4g} (gap {gaps[i]:.4g})" for i in sorted(top)),
        )

    emb = embed_interactions(R, d, mode, spec=spec, c_tilde=c_tilde)
    log.info("selected eigenvalues: %s", ", ".join(f"{v:.6g}" for v in emb.lambda_hat))

    types = None
    if spec is not None:
        types = type_partition(spec).labels

    output_path = Path(output_path)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    with output_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        header = ["interaction"] + [f"coord_{j + 1}" for j in range(d)]
        if types is not None:
            header.append("type")
        writer.writerow(header)
        for p in range(h.m):
            row = [p + 1] + [repr(float(v)) for v in emb.embedding[p]]
            if types is not None:
                row.append(int(types[p]))
            writer.writerow(row)
    return h.m


def read_embedding_csv(path) -> tuple[np.ndarray, np.ndarray, np.ndarray | None]:
    """Load (indices, coordinates, types-or-None) from an embedding CSV."""
    from .fileio import FileFormatError

    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise FileFormatError(path, 1, "missing header")
        coord_names = sorted(
            (name for name in reader.fieldnames if name.startswith("coord_")),
            key=lambda s: int(s.split("_", 1)[1]),
        )
        if not coord_names:
            raise FileFormatError(path, 1, "no coord_* columns in header")
        has_type = "type" in reader.fieldnames
        indices, coords, types = [], [], []
        for line_no, row in enumerate(reader, start=2):
            try:
                indices.append(int(row.get("interaction", len(indices) + 1)))
                coords.append([float(row[c]) for c in coord_names])
                if has_type:
                    types.append(int(row["type"]))
            except (TypeError, ValueError):
                raise FileFormatError(path, line_no, f"malformed row: {row}") from None
    if not coords:
        raise FileFormatError(path, None, "no data rows")
    return (
        np.asarray(indices),
        np.asarray(coords),
        np.asarray(types) if has_type else None,
    )


def cluster_file(
    input_path,
    output_path,
    k: int | None = None,
    k_max: int | None = None,
    dendrogram_path=None,
) -> Partition:
    """Cluster the rows of an embedding CSV and write the partition."""
    indices, coords, _ = read_embedding_csv(input_path)
    dend = complete_linkage(coords)
    chosen = k if k is not None else choose_k_by_gap(dend, k_max)
    part = cut_at_k(dend, chosen)

    output_path = Path(output_path)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    with output_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["item", "label"])
        for idx, label in zip(indices, part.labels):
            writer.writerow([int(idx), int(label)])

    if dendrogram_path is not None:
        dendrogram_path = Path(dendrogram_path)
        dendrogram_path.parent.mkdir(parents=True, exist_ok=True)
        with dendrogram_path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["step", "a", "b", "height"])
            for step, ((a, b), height) in enumerate(zip(dend.merges, dend.heights), start=1):
                writer.writerow([step, a + 1, b + 1, repr(float(height))])
    return part


def diagnose_instance(
    n: int,
    m: int,
    regime: str,
    seed: int,
    selection: str = "empirical",
) -> list[tuple[int, int, str, int, str, float]]:
    """Diagnostic norms of one generated instance as (n, m, regime, seed, metric, value) rows."""
    stream = replicate_stream(regime, n, m, 0, seed)
    design = SimulationDesign(n=n, m=m, regime=regime, seed=seed)
    spec, h = generate_design(design, stream)
    R = incidence_matrix(h)
    emb = embed_interactions(R, d=design.d, mode=selection, spec=spec)
    report = diagnostics(R, spec, emb, theoretical_embedding(spec))
    gap = signal_gap(spec)
    metrics = report.as_metric_rows() + [("delta", gap.delta), ("b", gap.b)]
    return [(n, m, regime, seed, name, value) for name, value in metrics]


def write_diagnostics_csv(rows, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "m", "regime", "seed", "metric", "value"])
        for n, m, regime, seed, metric, value in rows:
            writer.writerow([n, m, regime, seed, metric, repr(float(value))])
