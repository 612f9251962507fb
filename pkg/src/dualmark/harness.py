"""Evaluation runner: AWGN sweep, attack table and quality table as CSV.

Every (variant, channel) cell is an independent job; with ``workers > 1``
cells run in a process pool and rows are written in a fixed order once all
of them have finished, so reruns with the same seed give identical files.
"""
from concurrent.futures import ProcessPoolExecutor
import csv
from dataclasses import dataclass, field
import json
import logging
import math
import os
import warnings

from . import codec, detect
from .attacks import AttackKind, AttackSpec, apply_attack
from .audio import wav_read
from .codec import Domain
from .errors import DualmarkError, LikelyDesync
from .metrics import ber, multilevel_ber, snr
from .synth import synthetic_speech

log = logging.getLogger(__name__)

PAPER_WM_DCT = "Jerrin Thomas Panachakel"
PAPER_WM_DWT = "College of Engineering, Trivandrum, India"
SNR_POINTS = tuple(range(0, 101, 10))
QUALITY_ALPHAS = (0.05, 0.1)


@dataclass(frozen=True)
class Variant:
    name: str
    domains: tuple
    detector: detect.Detector


VARIANTS = (
    Variant("dwt-only", (Domain.DWT_SVD,), detect.Detector.STATIC),
    Variant("dct-only", (Domain.DCT_SVD,), detect.Detector.STATIC),
    Variant("multilevel-static", (Domain.DWT_SVD, Domain.DCT_SVD), detect.Detector.STATIC),
    Variant("multilevel-adaptive", (Domain.DWT_SVD, Domain.DCT_SVD), detect.Detector.ADAPTIVE),
)

TABLE_ATTACKS = (
    AttackSpec(AttackKind.HUM),
    AttackSpec(AttackKind.AMPLIFY),
    AttackSpec(AttackKind.DELAY),
    AttackSpec(AttackKind.INVERT),
    AttackSpec(AttackKind.SPARSIFY),
)


@dataclass
class ExperimentConfig:
    host: str | None = None
    wm_dwt: str = PAPER_WM_DWT
    wm_dct: str = PAPER_WM_DCT
    alpha: float = 0.05
    quality_alphas: tuple = QUALITY_ALPHAS
    snr_points: tuple = SNR_POINTS
    attacks: tuple = TABLE_ATTACKS
    variants: tuple = field(default_factory=lambda: tuple(v.name for v in VARIANTS))
    out_dir: str = "results"
    seed: int = 0
    workers: int = 1
    synthetic_seconds: float = 10.0

    def __post_init__(self):
        if self.host is not None and not os.path.isfile(self.host):
            raise DualmarkError(f"host file not found: {self.host}")
        for a in (self.alpha, *self.quality_alphas):
            if not 0.0 < a < 1.0:
                raise DualmarkError(f"alpha must lie in (0, 1), got {a}")
        known = {v.name for v in VARIANTS}
        unknown = set(self.variants) - known
        if unknown:
            raise DualmarkError(f"unknown variant(s): {', '.join(sorted(unknown))}")
        self.attacks = tuple(a if isinstance(a, AttackSpec) else AttackSpec(**a) for a in self.attacks)

    @classmethod
    def from_json(cls, path):
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
        base = os.path.dirname(os.path.abspath(path))
        if doc.get("host"):
            doc["host"] = os.path.join(base, doc["host"])
        if "out_dir" in doc:
            doc["out_dir"] = os.path.join(base, doc["out_dir"])
        for k in ("quality_alphas", "snr_points", "attacks", "variants"):
            if k in doc:
                doc[k] = tuple(doc[k])
        return cls(**doc)

    def load_host(self):
        if self.host is None:
            return synthetic_speech(self.synthetic_seconds)
        return wav_read(self.host)


def variant_by_name(name):
    for v in VARIANTS:
        if v.name == name:
            return v
    raise KeyError(name)


def embed_variant(host, variant, wm_dwt, wm_dct, alpha):
    """Watermark ``host`` for ``variant``; returns ``(buffer, keyfile, references)``.

    Single-domain variants carry the two texts concatenated as one watermark.
    """
    if len(variant.domains) == 2:
        buf, kf = codec.embed_multilevel(host, wm_dwt, wm_dct, alpha)
        refs = {Domain.DWT_SVD: codec.text_to_bits(wm_dwt).bits,
                Domain.DCT_SVD: codec.text_to_bits(wm_dct).bits}
    else:
        text = wm_dct + wm_dwt
        buf, kf = codec.embed_single(host, text, alpha, variant.domains[0])
        refs = {variant.domains[0]: codec.text_to_bits(text).bits}
    return buf, kf, refs


def score(signal, keyfile, refs, detector):
    """Extract and return ``(BerResult, per-domain BER dict, warnings)``."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LikelyDesync)
        result = detect.extract(signal, keyfile, detector)
    per = {d: ber(refs[d], result[d].bits) for d in refs}
    combined = multilevel_ber(*per.values()) if len(per) > 1 else next(iter(per.values()))
    return combined, {d: r.ber for d, r in per.items()}, result.warnings


def _cell(job):
    """One evaluation cell; never raises, failures become an ``error`` entry."""
    signal, keyfile, refs, detector, spec, sample_rate = job
    try:
        attacked, realised = apply_attack(signal, spec, sample_rate)
        combined, per, notes = score(attacked, keyfile, refs, detector)
        return {"ber": combined.ber, "per": per, "realised": realised,
                "warning": "; ".join(notes), "error": ""}
    except Exception as exc:  # recorded in the CSV, the run carries on
        return {"ber": math.nan, "per": {}, "realised": {}, "warning": "", "error": f"{type(exc).__name__}: {exc}"}


def _run_jobs(jobs, workers):
    if workers <= 1:
        return [_cell(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_cell, jobs))


def _fmt(x, digits=6):
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    text = f"{x:.{digits}f}"
    return text.lstrip("-") if float(text) == 0.0 else text


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def run_evaluation(config):
    """Run every table and write ``sweep.csv``, ``attacks.csv`` and ``quality.csv``.

    Returns a dict mapping table name to output path.
    """
    os.makedirs(config.out_dir, exist_ok=True)
    host = config.load_host()
    variants = [variant_by_name(n) for n in config.variants]

    prepared = {}
    embed_errors = {}
    for v in variants:
        try:
            prepared[v.name] = embed_variant(host, v, config.wm_dwt, config.wm_dct, config.alpha)
        except DualmarkError as exc:
            embed_errors[v.name] = f"{type(exc).__name__}: {exc}"
            log.warning("variant %s could not be embedded: %s", v.name, exc)

    def jobs_for(specs):
        jobs, slots = [], []
        for v in variants:
            for spec in specs:
                slots.append((v, spec))
                if v.name in prepared:
                    buf, kf, refs = prepared[v.name]
                    jobs.append((buf.samples, kf, refs, v.detector, spec, host.sample_rate))
        return jobs, slots

    def rows_for(specs):
        jobs, slots = jobs_for(specs)
        results = iter(_run_jobs(jobs, config.workers))
        out = []
        for v, spec in slots:
            if v.name in embed_errors:
                res = {"ber": math.nan, "per": {}, "realised": {}, "warning": "", "error": embed_errors[v.name]}
            else:
                res = next(results)
            out.append((v, spec, res))
        return out

    sweep_specs = [AttackSpec(AttackKind.AWGN, snr_db=float(s), seed=config.seed + i)
                   for i, s in enumerate(config.snr_points)]
    sweep_rows = []
    for v, spec, res in rows_for(sweep_specs):
        sweep_rows.append([
            v.name, v.detector.value, _fmt(spec.snr_db, 1), _fmt(res["ber"]),
            _fmt(res["per"].get(Domain.DWT_SVD)), _fmt(res["per"].get(Domain.DCT_SVD)),
            _fmt(res["realised"].get("measured_snr_db"), 4), res["error"],
        ])
    paths = {"sweep": os.path.join(config.out_dir, "sweep.csv")}
    _write_csv(paths["sweep"], ["variant", "detector", "snr_db", "ber", "ber_dwt", "ber_dct",
                                "measured_snr_db", "error"], sweep_rows)

    attack_rows = []
    for v, spec, res in rows_for(config.attacks):
        attack_rows.append([
            spec.kind.value, spec.label, v.name, v.detector.value, _fmt(res["ber"]),
            _fmt(res["per"].get(Domain.DWT_SVD)), _fmt(res["per"].get(Domain.DCT_SVD)),
            json.dumps(res["realised"], sort_keys=True), res["warning"], res["error"],
        ])
    paths["attacks"] = os.path.join(config.out_dir, "attacks.csv")
    _write_csv(paths["attacks"], ["attack", "parameters", "variant", "detector", "ber", "ber_dwt",
                                  "ber_dct", "realised", "warning", "error"], attack_rows)

    quality_rows = []
    seen = set()
    for a in config.quality_alphas:
        for v in variants:
            kind = "multilevel" if len(v.domains) == 2 else v.name
            if (a, kind) in seen:
                continue
            seen.add((a, kind))
            try:
                buf, _, _ = embed_variant(host, v, config.wm_dwt, config.wm_dct, a)
                quality_rows.append([_fmt(a, 2), kind, _fmt(snr(codec.fit_length(host.samples, len(buf)),
                                                                buf.samples), 4), ""])
            except DualmarkError as exc:
                quality_rows.append([_fmt(a, 2), kind, "", f"{type(exc).__name__}: {exc}"])
    paths["quality"] = os.path.join(config.out_dir, "quality.csv")
    _write_csv(paths["quality"], ["alpha", "variant", "snr_db", "error"], quality_rows)
    return paths


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def as_float(value):
    return math.nan if value in ("", None) else float(value)


__all__ = ["ExperimentConfig", "VARIANTS", "run_evaluation", "embed_variant", "score"]
