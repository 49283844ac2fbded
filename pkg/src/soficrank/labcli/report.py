"""Run persistence: CSV tables, a text summary, gnuplot data and record.json.

A run lives in ``<root>/<first 16 hex digits of the config hash>``.  The
directory is written under a temporary name and renamed into place, so a
reader never sees a half-written run.
"""
from __future__ import annotations

import csv
import io
import json
import os
import shutil
import tempfile
from fractions import Fraction
from pathlib import Path

from .runner import CSV_COLUMNS, FAIL, Row, RunRecord

MOMENT_COLUMNS = ("l", "value_num", "value_den", "source")


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def results_csv(record: RunRecord, timings: bool = False) -> str:
    """The main table.  ``ms`` stays empty unless ``timings`` is set, keeping
    the file byte-identical across re-runs of one config."""
    return _csv_text(CSV_COLUMNS, [r.cells(timings) for r in record.rows])


def moments_csv(record: RunRecord) -> str:
    return _csv_text(MOMENT_COLUMNS, record.moment_rows)


def gnuplot_data(record: RunRecord) -> str:
    """One block per check: ``set_size rank gap`` as floats, blocks separated by two blank lines."""
    blocks: dict[str, list[Row]] = {}
    for r in record.rows:
        blocks.setdefault(r.check, []).append(r)
    out = []
    for check, rows in blocks.items():
        lines = [f"# {check}: set_size rank gap"]
        for r in rows:
            rank = "nan" if r.rank is None else repr(float(r.rank))
            gap = "nan" if r.gap is None else repr(float(r.gap))
            lines.append(f"{r.set_size} {rank} {gap}")
        out.append("\n".join(lines))
    return "\n\n\n".join(out) + "\n"


def summary_text(record: RunRecord) -> str:
    lines = [f"config {record.config_hash[:16]}  {record.config.get('name', '')}".rstrip()]
    checks: dict[str, list[Row]] = {}
    for r in record.rows:
        checks.setdefault(r.check, []).append(r)
    for check, rows in checks.items():
        judged = [r for r in rows if r.verdict != "-"]
        fails = sum(r.verdict == FAIL for r in judged)
        lines.append(f"{check}: {len(rows)} rows, {len(judged) - fails}/{len(judged)} verdicts pass")
    for k in sorted(record.summary):
        lines.append(f"{k} = {record.summary[k]}")
    for n in record.notes:
        lines.append(f"note: {n}")
    lines.append("RESULT: " + ("PASS" if record.passed else "FAIL"))
    return "\n".join(lines) + "\n"


def _frac(s):
    return None if s in ("", None) else Fraction(s)


def record_to_json(record: RunRecord) -> dict:
    return {
        "config_hash": record.config_hash,
        "config": record.config,
        "rows": [dict(zip(CSV_COLUMNS, r.cells(True))) for r in record.rows],
        "moments": [list(map(str, m)) for m in record.moment_rows],
        "notes": record.notes,
        "summary": record.summary,
    }


def record_from_json(doc: dict) -> RunRecord:
    rows = []
    for d in doc["rows"]:
        rank = None if d["rank_num"] == "" else Fraction(int(d["rank_num"]), int(d["rank_den"]))
        gap = None if d["gap_num"] == "" else Fraction(int(d["gap_num"]), int(d["gap_den"]))
        rows.append(Row(int(d["step"]), int(d["set_size"]), d["field"], d["check"], rank, gap,
                        None if d["bound"] == "" else float(d["bound"]), d["verdict"],
                        float(d["ms"] or 0)))
    moments = [(int(l), int(a), int(b), s) for l, a, b, s in doc.get("moments", [])]
    return RunRecord(doc["config_hash"], doc["config"], rows, moments, list(doc.get("notes", [])),
                     dict(doc.get("summary", {})))


def write_files(record: RunRecord, directory: Path, timings: bool = False) -> None:
    directory = Path(directory)
    (directory / "results.csv").write_text(results_csv(record, timings), encoding="utf-8")
    if record.moment_rows:
        (directory / "moments.csv").write_text(moments_csv(record), encoding="utf-8")
    (directory / "summary.txt").write_text(summary_text(record), encoding="utf-8")
    (directory / "series.dat").write_text(gnuplot_data(record), encoding="utf-8")
    (directory / "config.json").write_text(json.dumps(record.config, sort_keys=True, indent=2) + "\n",
                                           encoding="utf-8")
    (directory / "record.json").write_text(json.dumps(record_to_json(record), indent=1) + "\n",
                                           encoding="utf-8")


def emit_report(record: RunRecord, root, timings: bool = False) -> Path:
    """Write the run into its content-addressed directory under ``root`` and return it."""
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    final = root / record.config_hash[:16]
    tmp = Path(tempfile.mkdtemp(prefix=".tmp-", dir=root))
    try:
        write_files(record, tmp, timings)
        if final.exists():
            old = Path(tempfile.mkdtemp(prefix=".old-", dir=root))
            os.rename(final, old / "run")
            os.rename(tmp, final)
            shutil.rmtree(old, ignore_errors=True)
        else:
            os.rename(tmp, final)
    except BaseException:
        shutil.rmtree(tmp, ignore_errors=True)
        raise
    return final


def load_record(run_dir) -> RunRecord:
    with open(Path(run_dir) / "record.json", encoding="utf-8") as fh:
        return record_from_json(json.load(fh))
