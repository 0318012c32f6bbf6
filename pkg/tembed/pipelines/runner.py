"""Configuration-driven pipelines for tembed.

Each pipeline builds (or loads) one t-embedding bundle, runs a group of
operations on it and writes JSON, CSV and SVG artifacts to the output
directory together with a manifest.json listing every artifact, the
operation that produced it and its sha256 digest.
"""
import csv
import hashlib
import io
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from tembed.core.config import ExperimentConfig, to_complex
from tembed.core.errors import PipelineError, ProbeError
from tembed.core.models import Color, DiagnosticsReport, Flavor, Mode, Severity
from tembed.dimers.gff import Domain, gff_reference, hausdorff_distance
from tembed.dimers.height import anchor_sensitivity, boundary_anchor, height_correlations
from tembed.dimers.inverse import CouplingMatrix, invert_kasteleyn
from tembed.embedding.assumptions import check_assumptions
from tembed.embedding.kasteleyn import check_kasteleyn_signs, kasteleyn_matrix
from tembed.embedding.origami import check_phi_increments, compute_eta, compute_origami
from tembed.embedding.tembedding import TEmbedding, validate_tembedding
from tembed.graph.io import load_tembedding, save_json
from tembed.holomorphy.coupling import coupling_functions
from tembed.holomorphy.extension import random_tholomorphic
from tembed.holomorphy.functions import check_tholomorphic
from tembed.holomorphy.primitives import primitive
from tembed.lattices.base import LatticeBundle
from tembed.lattices.cgs import cgs_lattice, random_shol
from tembed.lattices.equivalence import LatticeFunctionField, holomorphy_equivalence
from tembed.lattices.ising import check_dimer_weights
from tembed.lattices.manager import regular_lattices
from tembed.lattices.orthodiagonal import (check_harmonic_equivalence, check_tgraph_vertex_sets,
                                           rectangle_projection_residual)
from tembed.lattices.square import diamond_splitting
from tembed.pipelines.report import MANIFEST, render_report
from tembed.pipelines.svg import line_plot_svg, tembedding_svg, tgraph_svg
from tembed.probes.base import ProbeResult, central_point
from tembed.probes.crossing import mc_crossing_probe
from tembed.probes.oscillation import face_samples, lipschitz_dichotomy, oscillation_profile
from tembed.probes.variance import mc_variance_probe
from tembed.version import VERSION
from tembed.walks.backward import backward_structure
from tembed.walks.rates import check_tangent_rates, invariant_measure, walk_rates
from tembed.walks.simulate import simulate_walk
from tembed.walks.tgraph import TGraph, build_tgraph, check_open_orientation

logger = logging.getLogger(__name__)

EXACT_TOL = 1e-9  # residual tolerance of the exact identities checked by the appendix pipeline


@dataclass
class Artifact:
    """One file written by a pipeline."""
    path: str  # relative to the output directory
    operation: str
    sha256: str
    inputs: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"path": self.path, "operation": self.operation, "sha256": self.sha256, "inputs": list(self.inputs)}


@dataclass
class PipelineResult:
    """Outcome of one pipeline run."""
    pipeline: str
    out_dir: Path
    artifacts: List[Artifact] = field(default_factory=list)
    reports: List[DiagnosticsReport] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.reports)

    @property
    def status(self) -> str:
        return "ok" if self.ok else "violations"

    def to_dict(self) -> dict:
        return {
            "pipeline": self.pipeline,
            "status": self.status,
            "artifacts": [a.to_dict() for a in self.artifacts],
            "reports": [r.to_dict() for r in self.reports],
        }


def sha256_of(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def config_hash(config: ExperimentConfig) -> str:
    return hashlib.sha256(config.canonical_json().encode()).hexdigest()


def _num(x: Any) -> Any:
    """Plain JSON-safe numbers; NaN and infinities become None."""
    if isinstance(x, (complex, np.complexfloating)):
        return [_num(x.real), _num(x.imag)]
    if isinstance(x, (float, np.floating)):
        return float(x) if np.isfinite(x) else None
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, dict):
        return {str(k): _num(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_num(v) for v in x]
    return x


def nearest_vertex(te: TEmbedding, z: complex, interior: bool = True) -> int:
    """Index of the (interior) vertex of T closest to a point."""
    verts = np.array(te.interior_vertices if interior and te.interior_vertices else range(te.n_vertices))
    return int(verts[np.argmin(np.abs(te.positions[verts] - z))])


def central_face(te: TEmbedding, color: Color = Color.WHITE, near: Optional[complex] = None) -> int:
    """Interior face of a color whose centroid is closest to `near` (default: the middle of T)."""
    if near is None:
        lo, hi = te.positions.real, te.positions.imag
        near = complex((lo.min() + lo.max()) / 2, (hi.min() + hi.max()) / 2)
    best, best_d = None, np.inf
    for f in te.faces_of(color):
        if f in te.boundary_faces:
            continue
        d = abs(te.positions[list(te.faces[f].cycle)].mean() - near)
        if d < best_d:
            best, best_d = f, d
    if best is None:
        raise PipelineError("no_interior_face", f"{te.name} has no interior {color.value} face")
    return best


def load_bundle(config: ExperimentConfig) -> LatticeBundle:
    """Build the configured lattice or load a t-embedding file.

    Raises:
        PipelineError: if kind is "file" and no path is configured
    """
    lc = config.lattice
    mode = Mode(lc.mode)
    if lc.kind != "file":
        options = dict(lc.options)
        if lc.kind in ("s-embedding", "isoradial-rhombic"):
            options.setdefault("sigma", to_complex(config.sigma))
        return regular_lattices(lc.kind, lc.size, lc.delta, mode=mode, **options)
    if not lc.path:
        raise PipelineError("missing_path", "lattice kind 'file' needs lattice.path")
    te = load_tembedding(lc.path)
    report = validate_tembedding(te, mode, paranoid=config.paranoid)
    eta = compute_eta(te)
    base = min(te.boundary_vertices) if te.boundary_vertices else 0
    om = compute_origami(te, eta, base=base)
    return LatticeBundle("file", te, eta, om, te.mesh_size, report, meta={"path": lc.path, "mode": lc.mode})


class PipelineRunner:
    """Runs one configured pipeline and records its artifacts."""

    def __init__(self, config: ExperimentConfig):
        self.config = config
        self.out = Path(config.out)
        self.result = PipelineResult(config.pipeline, self.out)
        self._bundle: Optional[LatticeBundle] = None
        self._coupling: Optional[CouplingMatrix] = None
        self._stages: Dict[str, Callable[[], None]] = {
            "validate": self.validate,
            "build-tgraph": self.build_tgraph,
            "walk": self.walk,
            "couple": self.couple,
            "gff": self.gff,
            "appendix": self.appendix,
            "probe": self.probe,
            "report": self.report,
        }

    # ------------------------------------------------------------------
    # Shared inputs

    @property
    def bundle(self) -> LatticeBundle:
        if self._bundle is None:
            self._bundle = load_bundle(self.config)
        return self._bundle

    @property
    def delta(self) -> float:
        return float(self.bundle.delta)

    @property
    def coupling(self) -> CouplingMatrix:
        if self._coupling is None:
            self._coupling = invert_kasteleyn(kasteleyn_matrix(self.bundle.te))
        return self._coupling

    @property
    def flavor(self) -> Flavor:
        return Flavor(self.config.walk.flavor)

    @property
    def alphas(self) -> List[complex]:
        return [to_complex(a) / abs(to_complex(a)) for a in self.config.walk.alphas]

    def tgraph(self, alpha: Optional[complex] = None) -> TGraph:
        b = self.bundle
        return build_tgraph(b.te, b.eta, b.om, self.alphas[0] if alpha is None else alpha, self.flavor)

    def anchor(self) -> int:
        te = self.bundle.te
        anchor_id = self.config.coupling.anchor
        if anchor_id is None:
            return central_face(te, Color.WHITE)
        if anchor_id not in te.face_index:
            raise PipelineError("unknown_anchor", f"anchor face {anchor_id} is not a face of {te.name}", anchor_id)
        return te.face_index[anchor_id]

    # ------------------------------------------------------------------
    # Writers

    def _record(self, path: Path, operation: str, inputs: Sequence[str] = ()) -> Artifact:
        art = Artifact(str(path.relative_to(self.out)), operation, sha256_of(path), list(inputs))
        self.result.artifacts.append(art)
        logger.debug(f"Wrote {art.path} ({operation})")
        return art

    def write_json(self, name: str, data: dict, operation: str, inputs: Sequence[str] = ()) -> Artifact:
        path = self.out / name
        save_json(_num(data), path)
        return self._record(path, operation, inputs)

    def write_csv(self, name: str, header: Sequence[str], rows: Sequence[Sequence[Any]], operation: str,
                  inputs: Sequence[str] = ()) -> Artifact:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])
        path = self.out / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(buf.getvalue())
        return self._record(path, operation, inputs)

    def write_text(self, name: str, text: str, operation: str, inputs: Sequence[str] = ()) -> Artifact:
        path = self.out / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
        return self._record(path, operation, inputs)

    def write_manifest(self) -> Path:
        manifest = {
            "version": VERSION,
            "pipeline": self.config.pipeline,
            "config": self.config.model_dump(),
            "config_sha256": config_hash(self.config),
            "seed": self.config.seed,
            "status": self.result.status,
            "artifacts": [a.to_dict() for a in self.result.artifacts],
        }
        path = self.out / MANIFEST
        save_json(_num(manifest), path)
        return path

    # ------------------------------------------------------------------
    # Pipelines

    def validate(self):
        """validate_tembedding, the Kasteleyn sign check, φ increments and the assumption scan."""
        b = self.bundle
        te = b.te
        report = validate_tembedding(te, Mode(self.config.lattice.mode), paranoid=self.config.paranoid)
        kast = check_kasteleyn_signs(te, kasteleyn_matrix(te, check=False))
        phi = check_phi_increments(te, b.eta)
        scales = [self.delta * k for k in (2.0, 4.0, 8.0)]
        assumptions = check_assumptions(te, b.om, scales, beta_grid=(1.0, 2.0), seed=self.config.seed)
        self.result.reports.extend([report, kast, phi])

        angles = report.details.get("angle_residuals", {})
        self.write_json("tembedding.json", te.to_dict(), "load_tembedding" if b.kind == "file" else "regular_lattices")
        self.write_json("validation.json", {
            "lattice": {k: v for k, v in b.to_dict().items() if k != "validation"},
            "tembedding": report.to_dict(),
            "kasteleyn": kast.to_dict(),
            "phi_increments": phi.to_dict(),
            "assumptions": assumptions.to_dict(),
        }, "validate_tembedding", ["tembedding.json"])
        self.write_csv("angle_residuals.csv", ["vertex", "residual"],
                       [(te.vertex_ids[v], float(r)) for v, r in sorted(angles.items())],
                       "validate_tembedding", ["tembedding.json"])
        self.write_text("tembedding.svg", tembedding_svg(te), "render_tembedding", ["tembedding.json"])

    def build_tgraph(self):
        """One T-graph per configured α with rates, invariant measure and tangent-rate checks."""
        for k, alpha in enumerate(self.alphas):
            tg = self.tgraph(alpha)
            wr = walk_rates(tg)
            tangent = check_tangent_rates(tg, wr)
            measure = invariant_measure(tg, wr)
            flipped = check_open_orientation(tg)
            if flipped:
                tangent.add("orientation", tg.te.name, f"{flipped} open faces reverse orientation",
                            Severity.WARNING, float(flipped))
            self.result.reports.append(tangent)
            name = f"tgraph_{k}"
            self.write_json(f"{name}.json", {
                "tgraph": tg.to_dict(),
                "rates": wr.to_dict(),
                "measure": measure.to_dict(),
                "tangent_rates": tangent.to_dict(),
            }, "build_tgraph")
            self.write_text(f"{name}.svg", tgraph_svg(tg), "render_tgraph", [f"{name}.json"])

    def walk(self):
        """Recorded trajectories of the T-graph walk from one start."""
        wc = self.config.walk
        tg = self.tgraph()
        wr = walk_rates(tg)
        te = tg.te
        if wc.start is None:
            start = central_point(tg, wr)
        else:
            index = {vid: i for i, vid in enumerate(te.vertex_ids)}
            if wc.start not in index:
                raise PipelineError("unknown_start", f"start vertex {wc.start} is not a vertex of {te.name}", wc.start)
            start = int(tg.vertex_point[index[wc.start]])
        rows = []
        summary = []
        for k in range(wc.n_walks):
            traj = simulate_walk(wr.chain, start, wc.horizon, self.config.seed, walker=k)
            rows.extend(traj.to_rows())
            summary.append({"walker": k, "n_jumps": len(traj.times) - 1, "absorbed": traj.absorbed,
                            "exit_state": traj.exit_state, "final": traj.positions[-1]})
        self.write_csv("trajectories.csv", ["walker", "time", "x", "y"], rows, "simulate_walk")
        self.write_json("walk.json", {"start": tg.label(start), "horizon": wc.horizon, "seed": self.config.seed,
                                      "alpha": self.alphas[0], "flavor": self.flavor.value, "walkers": summary},
                        "simulate_walk", ["trajectories.csv"])

    def couple(self):
        """Coupling observable of one white anchor with its holomorphy and monodromy checks."""
        b = self.bundle
        te = b.te
        cm = self.coupling
        anchor = self.anchor()
        F = coupling_functions(te, b.eta, cm, anchor)
        holo = check_tholomorphic(te, F)
        base = min(te.boundary_vertices) if te.boundary_vertices else 0
        prim = primitive(te, F, basepoint=base)
        expected = 2 * np.conj(b.eta.eta[anchor])
        mono = prim.monodromy.get(anchor)
        mono_err = abs(mono - expected) if mono is not None else float("nan")
        identity = float(np.max(np.abs(cm.row_identity() - 1.0)))
        if mono is not None and mono_err > EXACT_TOL:
            holo.add("monodromy", te.faces[anchor].id, f"monodromy differs from 2·conj(η_w) by {mono_err:.3e}",
                     value=mono_err)
        holo.metrics["monodromy_error"] = mono_err
        holo.metrics["row_identity"] = identity
        self.result.reports.append(holo)
        self.write_csv("coupling.csv", ["face", "color", "re", "im"], F.to_rows(te), "coupling_functions")
        self.write_json("coupling.json", {
            "anchor": te.faces[anchor].id,
            "inverse": {"residual": cm.residual, "condition": cm.condition, "row_identity": identity},
            "tholomorphic": holo.to_dict(),
            "monodromy": mono,
            "expected_monodromy": expected,
        }, "coupling_functions", ["coupling.csv"])

    def _marked_points(self, domain: Domain) -> List[int]:
        gc = self.config.gff
        step = gc.spacing * domain.size
        te = self.bundle.te
        return [nearest_vertex(te, domain.center + (k - (gc.n_points - 1) / 2) * step) for k in range(gc.n_points)]

    def _domain(self) -> Domain:
        z = self.bundle.te.positions
        center = complex((z.real.min() + z.real.max()) / 2, (z.imag.min() + z.imag.max()) / 2)
        side = float(min(np.ptp(z.real), np.ptp(z.imag)))
        kind = self.config.gff.domain
        return Domain.parse(kind, center, side if kind == "square" else side / 2)

    def gff(self):
        """H₂ over dyadic separations, the marked n-point correlation and the anchor stability."""
        te = self.bundle.te
        cm = self.coupling
        domain = self._domain()
        z = te.positions
        v1 = nearest_vertex(te, domain.center)
        a1 = boundary_anchor(te, v1)

        rows = []
        sep = 2 * self.delta
        while sep <= domain.size / 4:
            v2 = nearest_vertex(te, z[v1] + sep)
            if v2 != v1:
                r = height_correlations(te, cm, [v1, v2], [a1, a1])
                ref = gff_reference(domain, [z[v1], z[v2]])
                dist = abs(z[v2] - z[v1])
                rows.append((dist, r.value, ref, r.value / ref if ref else float("nan")))
            sep *= 2
        slope = float("nan")
        if len(rows) >= 2:
            slope = float(np.polyfit(np.log([r[0] for r in rows]), [r[1] for r in rows], 1)[0])
        expected = -1.0 / (2 * np.pi ** 2)

        points = self._marked_points(domain)
        anchors = [boundary_anchor(te, v) for v in points] if self.config.gff.anchors == "boundary" else [a1] * len(points)
        corr = height_correlations(te, cm, points, anchors)
        if len(set(points)) == len(points):
            corr.gff = gff_reference(domain, [z[v] for v in points])
        far = max(sorted(te.boundary_vertices), key=lambda v: abs(z[v] - z[a1]))
        sensitivity = anchor_sensitivity(te, cm, points, (a1, far))
        scale = max((abs(r[1]) for r in rows), default=0.0)

        report = DiagnosticsReport(subject=f"height correlations on {te.name}")
        report.metrics.update({"h2_slope": slope, "expected_slope": expected,
                               "anchor_sensitivity": sensitivity,
                               "relative_anchor_sensitivity": sensitivity / scale if scale else float("nan")})
        report.metrics["domain_hausdorff"] = hausdorff_distance(domain, z[sorted(te.boundary_vertices)])
        if len(points) % 2 and scale:
            report.metrics["odd_ratio"] = abs(corr.value) / scale
        self.result.reports.append(report)

        self.write_csv("gff_h2.csv", ["separation", "h2", "gff", "ratio"], rows, "height_correlations")
        self.write_json("gff.json", {
            "domain": {"kind": domain.kind, "center": domain.center, "size": domain.size},
            "marked": corr.to_dict(te),
            "anchors": [te.vertex_ids[a1], te.vertex_ids[far]],
            "report": report.to_dict(),
        }, "height_correlations", ["gff_h2.csv"])
        if rows:
            sep = np.array([r[0] for r in rows])
            h2 = np.array([r[1] for r in rows])
            fit = expected * np.log(sep) + float(np.mean(h2 - expected * np.log(sep)))
            svg = line_plot_svg({"H2": (np.log(sep), h2), "GFF": (np.log(sep), [r[2] for r in rows]),
                                 "-log(r)/(2π²)": (np.log(sep), fit)},
                                title="H2 against log r", markers=["H2"])
            self.write_text("gff.svg", svg, "render_report", ["gff_h2.csv"])

    def appendix(self):
        """Exact identities of the lattice framework the bundle was built in."""
        b = self.bundle
        te = b.te
        seed = self.config.seed
        report = DiagnosticsReport(subject=f"lattice identities on {te.name}")
        rows: List[tuple] = []

        def record(check: str, value: float, tol: float = EXACT_TOL):
            ok = bool(value <= tol)
            rows.append((check, float(value), tol, ok))
            report.metrics[check] = float(value)
            if not ok:
                report.add(check, te.name, f"{check} residual {value:.3e} exceeds {tol:g}", value=float(value))

        record("validation_errors", float(len(b.report.errors)), 0.0)
        record("kasteleyn_signs", float(len(check_kasteleyn_signs(te, kasteleyn_matrix(te, check=False)).errors)), 0.0)
        if b.kind == "square":
            F = random_tholomorphic(te, b.eta, Color.WHITE, seed, splitting=diamond_splitting(b))
            source = LatticeFunctionField("t-hol", F.coeffs, function=F)
            for target in ("s-hol", "ferrand"):
                eq = holomorphy_equivalence(b, source, target)
                record(f"{target}_residual", eq.target_residual)
                if eq.round_trip is not None:
                    record(f"{target}_round_trip", eq.round_trip)
        if b.kind == "honeycomb":
            F = random_tholomorphic(te, b.eta, Color.BLACK, seed)
            eq = holomorphy_equivalence(b, LatticeFunctionField("t-hol", F.coeffs, function=F), "dynnikov-novikov")
            record("dynnikov_novikov_residual", eq.target_residual)
            if eq.round_trip is not None:
                record("dynnikov_novikov_round_trip", eq.round_trip)
            data = cgs_lattice(self.config.lattice.size, self.delta)
            cgs = LatticeFunctionField("cgs", random_shol(data, seed), data=data)
            record("cgs_residual", holomorphy_equivalence(b, cgs, "cgs").source_residual)
        if b.framework == "orthodiagonal":
            sets = check_tgraph_vertex_sets(b)
            scale = max(te.diameter, 1.0)
            record("tgraph_plus_vertex_set", sets.metrics["plus_residual"], 1e-12 * scale)
            record("tgraph_minus_vertex_set", sets.metrics["minus_residual"], 1e-12 * scale)
            record("rectangle_projection", rectangle_projection_residual(b) / scale, 1e-10)
            record("harmonic_equivalence", check_harmonic_equivalence(b).metrics["max_spread"])
            record("gauge", float(b.meta.get("gauge_residual", 0.0)))
        if b.framework == "s-embedding" and b.data is not None:
            for key, value in sorted(b.data.residuals.items()):
                record(f"s_embedding_{key}", float(value), 1e-8)
            record("dimer_weights", check_dimer_weights(te, b.data).metrics["max_residual"])

        self.result.reports.append(report)
        self.write_csv("appendix.csv", ["check", "value", "tolerance", "ok"], rows, "holomorphy_equivalence")
        self.write_json("appendix.json", {"kind": b.kind, "framework": b.framework, "report": report.to_dict()},
                        "holomorphy_equivalence", ["appendix.csv"])

    def _crossing(self, tg: TGraph, wr, center: complex, r: float, backward) -> ProbeResult:
        pc = self.config.probe
        try:
            return mc_crossing_probe(tg, wr, center, r, pc.n_walks, self.config.seed, backward, self.delta)
        except ProbeError as e:
            if e.error_type != "not_covered":
                raise
            logger.warning(f"Crossing probe skipped: {e}")
            params = {"walk": "backward" if backward is not None else "forward", "r": r}
            return ProbeResult("crossing", float("nan"), float("nan"), 0, params, self.config.seed, ["not_covered"])

    def probe(self):
        """Variance, crossing and oscillation probes at the configured scales."""
        pc = self.config.probe
        b = self.bundle
        te = b.te
        delta = self.delta
        seed = self.config.seed
        results: List[ProbeResult] = []
        tg = self.tgraph()
        wr = walk_rates(tg)

        if "variance" in pc.kinds:
            results += mc_variance_probe(tg, wr, [t * delta ** 2 for t in pc.t_values],
                                         [to_complex(x) for x in pc.betas], pc.n_walks, seed,
                                         lambdas=pc.lambdas, delta=delta)
        if "crossing" in pc.kinds:
            center = complex(tg.points[central_point(tg, wr)])
            r = pc.crossing_r * delta
            results.append(self._crossing(tg, wr, center, r, None))
            if pc.backward:
                results.append(self._crossing(tg, wr, center, r, backward_structure(tg)))
        if "oscillation" in pc.kinds:
            results += self._oscillation(tg)

        report = DiagnosticsReport(subject=f"probes on {te.name}")
        for res in results:
            for flag in res.flags:
                if flag in ("bound_violated", "trace_mismatch"):
                    report.add(flag, res.name, f"{res.name} probe flagged {flag}", Severity.WARNING, res.estimate)
        self.result.reports.append(report)

        rows = [res.to_row() for res in results]
        header = ["name", "estimate", "stderr", "n_samples", "seed", "flags"]
        header += sorted({k for row in rows for k in row} - set(header))
        self.write_csv("probes.csv", header, [[row.get(k, "") for k in header] for row in rows], "regularity_probes")
        self.write_json("probes.json", {"delta": delta, "results": [res.to_dict() for res in results]},
                        "regularity_probes", ["probes.csv"])
        osc = [res for res in results if res.name == "oscillation" and res.table]
        if osc:
            series = {res.params["field"]: ([row["r"] for row in res.table], [row["osc"] for row in res.table])
                      for res in osc}
            self.write_text("oscillation.svg", line_plot_svg(series, "osc(r), log-log", logx=True, logy=True),
                            "render_report", ["probes.json"])

    def _oscillation(self, tg: TGraph) -> List[ProbeResult]:
        b = self.bundle
        te = b.te
        pc = self.config.probe
        z = te.positions
        middle = complex((z.real.min() + z.real.max()) / 2, (z.imag.min() + z.imag.max()) / 2)
        width = float(np.ptp(z.real))
        anchor = central_face(te, Color.WHITE, near=middle + 0.45 * width)
        F = coupling_functions(te, b.eta, self.coupling, anchor)
        positions, values = face_samples(te, F)
        w = te.positions[list(te.faces[anchor].cycle)].mean()
        reach = abs(w - middle) - 2 * self.delta
        radii = [r * self.delta for r in pc.radii if r * self.delta < reach]
        result = oscillation_profile(positions, values, middle, radii, name=f"F_{te.faces[anchor].id}")
        result.params["dropped_radii"] = len(pc.radii) - len(radii)

        H = tg.images.real
        center = complex(tg.images[nearest_vertex(te, middle)])
        d = max(radii) if radii else 4 * self.delta
        dichotomy = lipschitz_dichotomy(tg, b.eta, H, center, d, self.delta)
        dichotomy.params["field"] = "Re T-graph position"
        return [result, dichotomy]

    def report(self):
        path = render_report(self.out)
        self._record(path, "render_report", [MANIFEST])

    def run(self) -> PipelineResult:
        pipeline = self.config.pipeline
        stage = self._stages[pipeline]
        self.out.mkdir(parents=True, exist_ok=True)
        logger.info(f"Running pipeline {pipeline} ({self.config.name}) into {self.out}")
        stage()
        if pipeline != "report":
            self.write_manifest()
        logger.info(f"Pipeline {pipeline} finished with status {self.result.status}: "
                    f"{len(self.result.artifacts)} artifacts")
        return self.result


def run_pipeline(config: ExperimentConfig) -> PipelineResult:
    """Run the configured pipeline and write its artifacts and manifest."""
    return PipelineRunner(config).run()
