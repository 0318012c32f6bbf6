"""Static HTML report over the artifacts of pipeline runs."""
import base64
import csv
import io
import json
import logging
from pathlib import Path
from typing import Dict, List, Optional

from jinja2 import Environment, FileSystemLoader, select_autoescape
from PIL import Image, ImageDraw

from tembed.core.errors import PipelineError
from tembed.graph.io import tembedding_from_dict

logger = logging.getLogger(__name__)

MANIFEST = "manifest.json"
REPORT = "report.html"
THUMBNAIL = "thumbnail.png"
THUMBNAIL_SIZE = 256
TEMPLATES_DIR = Path(__file__).parent / "templates"


def _read_json(path: Path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _read_csv(path: Path) -> List[Dict[str, str]]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def render_thumbnail(tembedding: dict, path: Path, size: int = THUMBNAIL_SIZE) -> bytes:
    """Draw the faces of a serialized t-embedding into a square PNG.

    Returns:
        The PNG bytes, also written to `path`
    """
    te = tembedding_from_dict(tembedding)
    z = te.positions
    x0, y0 = z.real.min(), z.imag.min()
    span = max(z.real.max() - x0, z.imag.max() - y0, 1e-12)
    scale = (size - 8) / span
    image = Image.new("RGB", (size, size), "white")
    draw = ImageDraw.Draw(image)
    for f in te.faces:
        pts = [(4 + (p.real - x0) * scale, size - 4 - (p.imag - y0) * scale) for p in z[list(f.cycle)]]
        fill = (51, 51, 51) if f.color.value == "black" else (244, 244, 244)
        draw.polygon(pts, fill=fill, outline=(136, 136, 136))
    buf = io.BytesIO()
    image.save(buf, "PNG")
    data = buf.getvalue()
    path.write_bytes(data)
    return data


def render_report(out_dir, template: Optional[str] = None) -> Path:
    """Write report.html for the artifacts listed in an output directory's manifest.

    Args:
        out_dir: Directory written by run_pipeline
        template: Template file name inside the templates directory

    Returns:
        Path of the written report

    Raises:
        PipelineError: if the manifest or an artifact it lists is missing
    """
    out = Path(out_dir)
    manifest_path = out / MANIFEST
    if not manifest_path.exists():
        raise PipelineError("missing_artifacts", f"no {MANIFEST} in {out}; run a pipeline first")
    manifest = _read_json(manifest_path)
    artifacts = manifest.get("artifacts", [])
    missing = [a["path"] for a in artifacts if not (out / a["path"]).exists()]
    if missing:
        raise PipelineError("missing_artifacts", f"{len(missing)} artifacts listed in the manifest are missing",
                            missing[0])

    paths = {a["path"] for a in artifacts}
    figures = [{"name": p, "svg": (out / p).read_text()} for p in sorted(paths) if p.endswith(".svg")]
    tables = {p: _read_csv(out / p) for p in sorted(paths) if p.endswith(".csv") and p != "trajectories.csv"}
    summaries = {p: _read_json(out / p) for p in sorted(paths)
                 if p.endswith(".json") and p not in ("tembedding.json",) and not p.startswith("tgraph_")}

    thumbnail = None
    if "tembedding.json" in paths:
        png = render_thumbnail(_read_json(out / "tembedding.json"), out / THUMBNAIL)
        thumbnail = base64.b64encode(png).decode("utf-8")

    env = Environment(loader=FileSystemLoader(str(TEMPLATES_DIR)), autoescape=select_autoescape(["html", "j2"]))
    html = env.get_template(template or "report.html.j2").render(
        manifest=manifest,
        figures=figures,
        tables=tables,
        summaries={k: json.dumps(v, indent=2, sort_keys=True) for k, v in summaries.items()},
        thumbnail=thumbnail,
    )
    path = out / REPORT
    path.write_text(html)
    logger.info(f"Report for {manifest.get('pipeline')} written to {path} ({len(figures)} figures, "
                f"{len(tables)} tables)")
    return path
