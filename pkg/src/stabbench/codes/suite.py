"""Base-code registry, suite manifest and dataset files."""

from __future__ import annotations

import dataclasses
import json
import statistics
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, Sequence

from ..errors import ManifestError, UnsupportedParameters
from . import families
from .model import CodeInstance, tensor_product, validate_code
from .named import NAMED

MANIFEST_SCHEMA = "stabbench-manifest/1"
DATASET_SCHEMA = "stabbench-dataset/1"
DECLARED_K = 16_340
NUM_PRODUCTS = 168
PRODUCT_RANGE = (18, 194)

PAIRING_RULE = (
    "unordered pairs (i < j) of base codes in manifest order, enumerated "
    "lexicographically; keep a pair when its combined generator count lies in "
    f"[{PRODUCT_RANGE[0]}, {PRODUCT_RANGE[1]}]; take the first {NUM_PRODUCTS}"
)

# (id, family, params) for the 24 base codes, in manifest order
BASE_CODE_TABLE: list[tuple[str, str, dict[str, Any]]] = [
    ("surface_d3", "rotated_surface", {"d": 3}),
    ("surface_d5", "rotated_surface", {"d": 5}),
    ("surface_d7", "rotated_surface", {"d": 7}),
    ("color_hex_d3", "color_hex", {"d": 3}),
    ("color_hex_d5", "color_hex", {"d": 5}),
    ("color_hex_d7", "color_hex", {"d": 7}),
    ("color_sqoct_d3", "color_sqoct", {"d": 3}),
    ("color_sqoct_d5", "color_sqoct", {"d": 5}),
    ("color_sqoct_d7", "color_sqoct", {"d": 7}),
    ("iceberg_m2", "iceberg", {"m": 2}),
    ("iceberg_m3", "iceberg", {"m": 3}),
    ("iceberg_m4", "iceberg", {"m": 4}),
    ("hypercube_l1", "hypercube", {"level": 1}),
    ("hypercube_l2", "hypercube", {"level": 2}),
    ("bb_72", "bb", dict(families.BB_PRESETS[72])),
    ("bb_90", "bb", dict(families.BB_PRESETS[90])),
    ("perfect5", "named", {"name": "perfect5"}),
    ("steane", "named", {"name": "steane"}),
    ("hamming15", "named", {"name": "hamming15"}),
    ("golay23", "named", {"name": "golay23"}),
    ("shor9", "named", {"name": "shor9"}),
    ("tetrahedral15", "named", {"name": "tetrahedral15"}),
    ("carbon12", "named", {"name": "carbon12"}),
    ("detector4", "named", {"name": "detector4"}),
]


def _int_param(params: dict[str, Any], key: str, family: str) -> int:
    try:
        return int(params[key])
    except (KeyError, TypeError, ValueError):
        raise UnsupportedParameters(f"{family} needs an integer parameter {key!r}") from None


def build_base_code(family: str, params: dict[str, Any]) -> CodeInstance:
    if family == "rotated_surface":
        return families.rotated_surface(_int_param(params, "d", family))
    if family == "color_hex":
        return families.color_hex(_int_param(params, "d", family))
    if family == "color_sqoct":
        return families.color_sqoct(_int_param(params, "d", family))
    if family == "iceberg":
        return families.iceberg(_int_param(params, "m", family))
    if family == "hypercube":
        return families.hypercube(_int_param(params, "level", family))
    if family == "bb":
        if set(params) == {"n"}:
            return families.bb_preset(_int_param(params, "n", family))
        try:
            return families.bivariate_bicycle(
                int(params["l"]), int(params["m"]), params["a"], params["b"], int(params["d"])
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise UnsupportedParameters(f"bad bivariate bicycle parameters: {exc}") from None
    if family == "named":
        name = params.get("name")
        if name not in NAMED:
            raise UnsupportedParameters(f"unknown named code {name!r}")
        return NAMED[name]()
    raise UnsupportedParameters(f"unsupported code family {family!r}")


# -- manifest --------------------------------------------------------------------------
@dataclass
class BaseCodeSpec:
    id: str
    family: str
    params: dict[str, Any] = field(default_factory=dict)


@dataclass
class SuiteManifest:
    base_codes: list[BaseCodeSpec]
    product_pairs: list[tuple[str, str]]
    declared_total_generators: int = DECLARED_K
    version: str = "1"
    pairing_rule: str = PAIRING_RULE

    def check(self) -> None:
        ids = [b.id for b in self.base_codes]
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        if dupes:
            raise ManifestError(f"duplicate base code ids: {', '.join(dupes)}")
        known = set(ids)
        seen = set()
        for a, b in self.product_pairs:
            for side in (a, b):
                if side not in known:
                    raise ManifestError(f"product pair refers to unknown code {side!r}")
            pid = f"{a}+{b}"
            if pid in seen or pid in known:
                raise ManifestError(f"duplicate code id {pid!r}")
            seen.add(pid)

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema": MANIFEST_SCHEMA,
            "version": self.version,
            "base_codes": [dataclasses.asdict(b) for b in self.base_codes],
            "product_pairs": [list(p) for p in self.product_pairs],
            "declared_total_generators": self.declared_total_generators,
            "pairing_rule": self.pairing_rule,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "SuiteManifest":
        if data.get("schema") != MANIFEST_SCHEMA:
            raise ManifestError(f"expected schema {MANIFEST_SCHEMA!r}, got {data.get('schema')!r}")
        try:
            m = cls(
                base_codes=[BaseCodeSpec(b["id"], b["family"], dict(b.get("params") or {})) for b in data["base_codes"]],
                product_pairs=[(str(a), str(b)) for a, b in data.get("product_pairs", [])],
                declared_total_generators=int(data.get("declared_total_generators", DECLARED_K)),
                version=str(data.get("version", "1")),
                pairing_rule=str(data.get("pairing_rule", "")),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ManifestError(f"malformed manifest: {exc}") from None
        m.check()
        return m


def default_product_pairs(base: Sequence[CodeInstance], count: int = NUM_PRODUCTS) -> list[tuple[str, str]]:
    lo, hi = PRODUCT_RANGE
    pairs = []
    for i, a in enumerate(base):
        for b in base[i + 1 :]:
            if lo <= a.k_i + b.k_i <= hi:
                pairs.append((a.id, b.id))
    return pairs[:count]


def default_manifest() -> SuiteManifest:
    specs = [BaseCodeSpec(i, f, dict(p)) for i, f, p in BASE_CODE_TABLE]
    base = [_build_spec(s) for s in specs]
    return SuiteManifest(specs, default_product_pairs(base))


def shipped_manifest_path() -> Path:
    return Path(str(resources.files("stabbench") / "data" / "manifest.json"))


def load_manifest(path: str | Path | None = None) -> SuiteManifest:
    p = Path(path) if path else shipped_manifest_path()
    try:
        data = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ManifestError(f"{p}: not valid JSON ({exc})") from None
    return SuiteManifest.from_dict(data)


def write_json_atomic(path: str | Path, data: Any) -> None:
    p = Path(path)
    tmp = p.with_name(p.name + ".tmp")
    tmp.write_text(json.dumps(data, indent=1) + "\n")
    tmp.replace(p)


# -- loading ---------------------------------------------------------------------------
def _build_spec(spec: BaseCodeSpec) -> CodeInstance:
    code = build_base_code(spec.family, spec.params)
    return dataclasses.replace(code, id=spec.id)


def _validated(code: CodeInstance) -> CodeInstance:
    rep = validate_code(code)
    if not rep.ok:
        detail = "; ".join(f.detail for f in rep.failures[:3])
        raise ManifestError(f"code {code.id} failed validation: {detail}")
    return code


@dataclass
class Suite:
    codes: list[CodeInstance]
    manifest: SuiteManifest

    @property
    def total_generators(self) -> int:
        return sum(c.k_i for c in self.codes)

    def by_id(self) -> dict[str, CodeInstance]:
        return {c.id: c for c in self.codes}

    def base_codes(self) -> list[CodeInstance]:
        return [c for c in self.codes if c.parents is None]

    def products(self) -> list[CodeInstance]:
        return [c for c in self.codes if c.parents is not None]


def load_suite(manifest: SuiteManifest | None = None, workers: int = 1) -> Suite:
    """Build, validate and return every code; K mismatch only warns."""
    manifest = manifest or load_manifest()
    manifest.check()
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            base = list(pool.map(_build_spec, manifest.base_codes))
    else:
        base = [_build_spec(s) for s in manifest.base_codes]
    index = {c.id: c for c in base}
    products = [tensor_product(index[a], index[b]) for a, b in manifest.product_pairs]
    codes = [_validated(c) for c in base + products]
    suite = Suite(codes, manifest)
    if suite.total_generators != manifest.declared_total_generators:
        warnings.warn(
            f"suite has K={suite.total_generators}, manifest declares "
            f"{manifest.declared_total_generators}",
            stacklevel=2,
        )
    return suite


def dataset_dict(suite: Suite) -> dict[str, Any]:
    return {
        "schema": DATASET_SCHEMA,
        "manifest": suite.manifest.to_dict(),
        "total_generators": suite.total_generators,
        "codes": [c.to_dict() for c in suite.codes],
    }


def suite_from_dataset(data: dict[str, Any]) -> Suite:
    if data.get("schema") != DATASET_SCHEMA:
        raise ManifestError(f"expected schema {DATASET_SCHEMA!r}, got {data.get('schema')!r}")
    manifest = SuiteManifest.from_dict(data["manifest"])
    codes = [CodeInstance.from_dict(c) for c in data["codes"]]
    return Suite(codes, manifest)


def load_suite_file(path: str | Path | None) -> Suite:
    """Accept either a manifest or a prebuilt dataset file (None = shipped manifest)."""
    if path is None:
        return load_suite()
    data = json.loads(Path(path).read_text())
    if data.get("schema") == DATASET_SCHEMA:
        return suite_from_dataset(data)
    return load_suite(SuiteManifest.from_dict(data))


# -- statistics ------------------------------------------------------------------------
TABLE_RANGES = {
    "rotated_surface": (8, 48),
    "color": (6, 36),
    "iceberg": (2, 2),
    "hypercube": (2, 20),
    "other": (2, 22),
    "base": (2, 90),
    "products": (18, 194),
    "all": (2, 194),
}


def _group(code: CodeInstance) -> str:
    if code.family.startswith("color"):
        return "color"
    if code.family == "named":
        return "other"
    return code.family


def _span(values: Iterable[int]) -> dict[str, Any]:
    vals = sorted(values)
    if not vals:
        return {"count": 0}
    return {
        "count": len(vals),
        "min": vals[0],
        "max": vals[-1],
        "median": statistics.median(vals),
        "total": sum(vals),
    }


def suite_stats(suite: Suite) -> dict[str, Any]:
    base = suite.base_codes()
    groups: dict[str, list[int]] = {}
    for c in base:
        groups.setdefault(_group(c), []).append(c.k_i)
    spans = {g: _span(v) for g, v in groups.items()}
    spans["base"] = _span(c.k_i for c in base)
    spans["products"] = _span(c.k_i for c in suite.products())
    spans["all"] = _span(c.k_i for c in suite.codes)
    range_checks = {}
    for name, (lo, hi) in TABLE_RANGES.items():
        s = spans.get(name)
        if s and s["count"]:
            range_checks[name] = {"expected": [lo, hi], "observed": [s["min"], s["max"]], "within": lo <= s["min"] and s["max"] <= hi}
    k = suite.total_generators
    declared = suite.manifest.declared_total_generators
    return {
        "num_codes": len(suite.codes),
        "num_base": len(base),
        "num_products": len(suite.products()),
        "total_generators": k,
        "declared_total_generators": declared,
        "k_deviation": k - declared,
        "k_matches_declaration": k == declared,
        "stabilizer_counts": spans,
        "range_checks": range_checks,
        "pairing_rule": suite.manifest.pairing_rule,
    }
