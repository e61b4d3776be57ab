import csv
import io
import json
import re
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

from models.schedule import EntropySequence, LimitEstimate
from models.verdict import ScaleEvidence, Verdict

SEQUENCE_COLUMNS = ["X", "D", "s_X", "delta", "schedule_id", "tag", "convention", "boundary"]
EVIDENCE_COLUMNS = [
    "X", "delta", "delta_prime", "D", "D_prime", "convertible",
    "entropy_gap", "bound", "trace_distance", "exceeds_one_third", "witness_steps", "note",
]


def format_float(value: Optional[float]) -> str:
    """Entropies and bounds with 12 significant digits"""
    if value is None:
        return ""
    return format(float(value), ".12g")


def format_optional(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_float(value)
    return str(value)


def slug(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "_", text).strip("_") or "unnamed"


def sequence_rows(seq: EntropySequence) -> List[List[str]]:
    return [
        [
            str(point.scale),
            str(point.dimension),
            format_float(point.density),
            format_optional(point.delta),
            seq.schedule_id,
            seq.tag,
            seq.convention,
            format_optional(point.boundary),
        ]
        for point in seq.points
    ]


def evidence_rows(rows: Sequence[ScaleEvidence]) -> List[List[str]]:
    return [
        [
            str(row.scale),
            format_optional(row.delta),
            format_optional(row.delta_prime),
            format_optional(row.dimension),
            format_optional(row.dimension_prime),
            format_optional(row.convertible),
            format_float(row.entropy_gap),
            format_float(row.bound),
            format_float(row.trace_distance),
            format_optional(row.exceeds_one_third),
            format_optional(row.witness_steps),
            row.note,
        ]
        for row in rows
    ]


def render_csv(columns: Sequence[str], rows: Iterable[Sequence[str]], header: Optional[Dict[str, Any]] = None) -> str:
    """CSV text with optional ``# key=value`` lines in sorted key order"""
    buffer = io.StringIO()
    for key in sorted(header or {}):
        buffer.write(f"# {key}={header[key]}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows(rows)
    return buffer.getvalue()


def estimate_summary(estimate: LimitEstimate) -> Dict[str, Any]:
    return {
        "value": format_float(estimate.value),
        "error_bar": format_float(estimate.error_bar),
        "method": estimate.method,
        "tail_window": list(estimate.tail_window),
        "note": estimate.note,
    }


def verdict_summary(verdict: Verdict) -> Dict[str, Any]:
    """Machine-readable section of a verdict report"""
    summary = {
        "source": verdict.source.describe(),
        "target": verdict.target.describe(),
        "decision": verdict.decision,
        "basis": verdict.basis,
        "branch": verdict.branch,
        "reason": verdict.reason,
        "gap": format_float(verdict.gap),
        "margin": format_float(verdict.margin),
        "min_scale": verdict.min_scale,
        "convention": verdict.convention,
        "schedule_family": verdict.schedule_family,
        "estimates": {name: estimate_summary(e) for name, e in sorted(verdict.estimates.items())},
        "screening": {name: [format_float(s) for s in slopes] for name, slopes in sorted(verdict.screening.items())},
        "convexity_checked": verdict.convexity_checked,
    }
    if verdict.delta_prime is not None:
        construction = verdict.delta_prime
        summary["delta_prime"] = {
            "table": [[scale, str(value)] for scale, value in construction.schedule.table]
            if construction.schedule is not None else [],
            "trend_slope": format_float(construction.trend_slope),
            "decreasing": construction.decreasing,
            "failed_scales": construction.failed_scales(),
        }
    return summary


class RunStore:
    """Deterministic writer for one run directory"""

    def __init__(self, output_dir: str, header: Optional[Dict[str, Any]] = None):
        self.output_dir = Path(output_dir)
        self.header = dict(header or {})
        self.written: List[str] = []

    def _write(self, relative: str, text: str) -> Path:
        path = self.output_dir / relative
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w', encoding='utf-8', newline='') as f:
            f.write(text)
        if relative not in self.written:
            self.written.append(relative)
        return path

    def write_json(self, relative: str, data: Any) -> Path:
        return self._write(relative, json.dumps(data, indent=2, sort_keys=True) + "\n")

    def write_sequence(self, seq: EntropySequence) -> Path:
        label = seq.macrostate.describe()
        header = {**self.header, "macrostate": label, "schedule_id": seq.schedule_id}
        if seq.dropped_scales:
            header["dropped_scales"] = " ".join(str(x) for x in seq.dropped_scales)
        text = render_csv(SEQUENCE_COLUMNS, sequence_rows(seq), header)
        return self._write(f"sequences/{slug(label)}__{slug(seq.schedule_id)}.csv", text)

    def write_verdict(self, verdict: Verdict) -> Path:
        """verdicts/<source>__<target>__<basis>__<schedule ids>.{csv,json}, both headed by the run header"""
        name = slug(f"{verdict.pair_name}__{'.'.join(verdict.schedule_family)}")
        self._write(
            f"verdicts/{name}.csv",
            render_csv(EVIDENCE_COLUMNS, evidence_rows(verdict.scale_evidence),
                       {**self.header, "decision": verdict.decision, "basis": verdict.basis}),
        )
        return self.write_json(f"verdicts/{name}.json", {"header": self.header, **verdict_summary(verdict)})

    def write_manifest(self, manifest: Dict[str, Any]) -> Path:
        return self.write_json("manifest.json", {**manifest, "files": sorted(self.written)})
