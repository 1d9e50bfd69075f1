"""Newform data access: the LMFDB REST client with a content-addressed
on-disk cache, and the committed offline fixture set covering every level
the classification drivers touch.

The client is a polite consumer of the public API (explicit field
projection, one retry, at most one request per second). The acceptance
suite runs entirely from the fixture set; a cache miss in offline mode is a
hard error, never a silent empty result.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from dataclasses import dataclass, field
from importlib import resources
from typing import Callable, Optional

from .chars import DirichletChar, divisors, factorize, RootOfUnity


class TransportError(RuntimeError):
    """Network failure with a cold cache (retriable)."""


class CacheMissError(KeyError):
    """Offline mode and the normalized query is not in the cache."""


class ParseError(ValueError):
    """Upstream schema drift: a required field is missing or malformed."""


LMFDB_API = "https://www.lmfdb.org/api/mf_newforms/"
FIELDS = [
    "label",
    "level",
    "weight",
    "char_order",
    "char_conductor",
    "char_orbit_label",
    "dim",
    "is_minimal",
    "minimal_twist",
    "atkin_lehner_eigenvals",
    "traces",
    "is_self_dual",
]


@dataclass(frozen=True)
class NewformRecord:
    """One Galois orbit of weight-2 newforms."""

    label: str
    level: int
    weight: int
    char_order: int
    char_conductor: int
    char_orbit_label: str
    dim: int
    is_minimal: bool
    minimal_twist: Optional[str]
    atkin_lehner: dict[int, int]  # p | level -> +-1 (trivial character only)
    ap: dict[int, int]  # rational a_p at p | level (0 or +-1)
    traces: dict[int, int]
    self_dual: bool
    # twist bookkeeping: per prime p, [target_label, target_p_exponent,
    # twist-token (kronecker discriminant or named), twist conductor exp]
    twist_routes: dict[int, list] = field(default_factory=dict)
    # same-level quadratic twist partners: p -> [[label, discriminant], ...]
    twist_partners: dict[int, list] = field(default_factory=dict)
    # nebentypus data for char_order > 1
    char_exponents: Optional[tuple[int, ...]] = None
    orbit_powers: tuple[int, ...] = ()
    embeddings: tuple = ()  # per-eigensystem bad-prime coefficient data

    def __post_init__(self):
        if self.weight != 2:
            raise ParseError("only weight-2 newforms are supported")
        if self.dim < 1:
            raise ParseError(f"{self.label}: orbit dimension must be >= 1")
        if self.char_conductor < 1 or self.level % self.char_conductor != 0:
            raise ParseError(
                f"{self.label}: character conductor must divide the level"
            )
        if self.char_order == 1:
            want = set(factorize(self.level))
            if set(self.atkin_lehner) != want:
                raise ParseError(
                    f"{self.label}: Atkin-Lehner signs must cover exactly "
                    "the primes dividing the level"
                )
            for p, e in factorize(self.level).items():
                a = self.ap.get(p)
                if e == 1 and a not in (1, -1):
                    raise ParseError(
                        f"{self.label}: a_{p} must be a unit at a prime "
                        "exactly dividing the level"
                    )
                if e >= 2 and a != 0:
                    raise ParseError(
                        f"{self.label}: a_{p} must vanish when p^2 divides "
                        "the level"
                    )
                if e == 1 and self.atkin_lehner.get(p) != -a:
                    raise ParseError(
                        f"{self.label}: the sign at an exactly-dividing "
                        "prime is the negative of a_p"
                    )

    @property
    def nebentypus(self) -> DirichletChar:
        if self.char_order == 1 or self.char_exponents is None:
            return DirichletChar.trivial(self.level)
        return DirichletChar(self.level, tuple(self.char_exponents))


@dataclass(frozen=True)
class FixtureManifest:
    entries: tuple[tuple[str, str], ...]  # (name, sha256)
    coverage_levels: frozenset[int]

    def covers(self, level: int) -> bool:
        return level in self.coverage_levels


# ---------------------------------------------------------------------------
# parsing


def record_from_fixture(rec: dict) -> NewformRecord:
    try:
        return NewformRecord(
            label=rec["label"],
            level=int(rec["level"]),
            weight=int(rec["weight"]),
            char_order=int(rec.get("char_order", 1)),
            char_conductor=int(rec.get("char_conductor", 1)),
            char_orbit_label=rec.get("char_orbit_label", "a"),
            dim=int(rec["dim"]),
            is_minimal=bool(rec["is_minimal"]),
            minimal_twist=rec.get("minimal_twist"),
            atkin_lehner={int(k): int(v) for k, v in rec.get("atkin_lehner", {}).items()},
            ap={int(k): int(v) for k, v in rec.get("ap", {}).items()},
            traces={int(k): int(v) for k, v in rec.get("traces", {}).items()},
            self_dual=bool(rec.get("self_dual", True)),
            twist_routes={int(k): v for k, v in rec.get("twist_routes", {}).items()},
            twist_partners={int(k): v for k, v in rec.get("twist_partners", {}).items()},
        )
    except KeyError as e:
        raise ParseError(f"missing field {e.args[0]} in newform record") from e


def record_from_char_group(level: int, rec: dict) -> NewformRecord:
    try:
        return NewformRecord(
            label=rec["label"],
            level=level,
            weight=2,
            char_order=int(rec["char_order"]),
            char_conductor=int(rec["char_conductor"]),
            char_orbit_label=rec["char_orbit_label"],
            dim=int(rec["dim"]),
            is_minimal=True,
            minimal_twist=None,
            atkin_lehner={},
            ap={},
            traces={},
            self_dual=False,
            char_exponents=tuple(rec["char_exponents"]),
            orbit_powers=tuple(rec["orbit_powers"]),
            embeddings=tuple(
                tuple(sorted(e.items())) for e in rec["embeddings"]
            )
            if rec.get("embeddings")
            else (),
        )
    except KeyError as e:
        raise ParseError(f"missing field {e.args[0]} in nebentypus record") from e


# ---------------------------------------------------------------------------
# sources


class FixtureSource:
    """Offline newform source backed by the committed fixture files."""

    def __init__(self, root: Optional[str] = None):
        if root is None:
            base = resources.files("shimtril").joinpath("fixtures")
            self._read = lambda name: base.joinpath(name).read_text()
        else:
            self._read = lambda name: open(os.path.join(root, name)).read()
        data = json.loads(self._read("newforms_trivial.json"))
        self._levels: dict[int, list[NewformRecord]] = {}
        for lvl, recs in data["levels"].items():
            self._levels[int(lvl)] = [record_from_fixture(r) for r in recs]
        neb = json.loads(self._read("newforms_nebentypus.json"))
        self._neb: dict[int, list[tuple[dict, NewformRecord]]] = {}
        for lvl, groups in neb.get("spaces", {}).items():
            out = []
            for _, rec in sorted(groups.items()):
                out.append((rec, record_from_char_group(int(lvl), rec)))
            self._neb[int(lvl)] = out
        cov = json.loads(self._read("char_coverage.json"))
        self._char_coverage = {
            int(lvl): set(conds) for lvl, conds in cov["coverage"].items()
        }
        self._raw_neb = neb
        try:
            self._gamma_full = json.loads(self._read("gamma_full_classical.json"))
        except FileNotFoundError:
            self._gamma_full = {"rows": []}
        try:
            self._extensions = json.loads(self._read("extensions.json"))
        except FileNotFoundError:
            self._extensions = {}

    # -- coverage ----------------------------------------------------------

    def covers(self, level: int) -> bool:
        return level in self._levels

    def covers_char(self, level: int, conductor: int) -> bool:
        """Whether all nebentypus orbits of the given conductor at this
        level are enumerated in the fixture set."""
        if conductor == 1:
            return self.covers(level)
        # levels whose full X_1 space vanishes need no data
        if level <= 10 or level == 12:
            return True
        if not _even_primitive_char_exists(conductor):
            return True
        return conductor in self._char_coverage.get(level, set())

    # -- queries -----------------------------------------------------------

    def newforms(
        self,
        level: int,
        trivial_char_only: bool = True,
        char_conductor_divides: Optional[int] = None,
    ) -> list[NewformRecord]:
        """All weight-2 newform orbits of exactly this level, optionally
        restricted by nebentypus. Raises CacheMissError outside coverage."""
        if not self.covers(level):
            raise CacheMissError(
                f"level {level} is not covered by the fixture set"
            )
        out = list(self._levels[level])
        if not trivial_char_only:
            want = char_conductor_divides
            if want is not None:
                for d in divisors(want):
                    if d > 1 and level % d == 0 and not self.covers_char(level, d):
                        raise CacheMissError(
                            f"nebentypus conductor {d} at level {level} is "
                            "not covered by the fixture set"
                        )
            for _, rec in self._neb.get(level, []):
                if want is not None and want % rec.char_conductor != 0:
                    continue
                out.append(rec)
        return out

    def newforms_dividing(
        self,
        n: int,
        trivial_char_only: bool = True,
        char_conductor_divides: Optional[int] = None,
    ) -> list[NewformRecord]:
        out: list[NewformRecord] = []
        seen = set()
        for d in divisors(n):
            for rec in self.newforms(
                d, trivial_char_only, char_conductor_divides
            ):
                if rec.label not in seen:
                    seen.add(rec.label)
                    out.append(rec)
        return out

    def by_label(self, label: str) -> NewformRecord:
        level = int(label.split(".")[0])
        for rec in self.newforms(level, trivial_char_only=False):
            if rec.label == label:
                return rec
        raise CacheMissError(f"no newform with label {label} in fixtures")

    # -- auxiliary fixture tables -------------------------------------------

    def gamma_full_rows(self) -> list[dict]:
        return self._gamma_full.get("rows", [])

    def extensions(self) -> dict:
        return self._extensions

    def manifest(self) -> FixtureManifest:
        entries = []
        for line in self._read("MANIFEST.txt").splitlines():
            parts = line.split()
            if len(parts) == 3 and parts[1] == "sha256":
                entries.append((parts[0], parts[2]))
        return FixtureManifest(
            entries=tuple(entries),
            coverage_levels=frozenset(self._levels),
        )


class LmfdbClient:
    """REST client for the newform database with write-through caching.

    `transport(url) -> str` may be injected; the default uses `requests`.
    In offline mode no transport is ever invoked.
    """

    def __init__(
        self,
        cache_dir: str,
        offline: bool = False,
        transport: Optional[Callable[[str], str]] = None,
        rate_limit_s: float = 1.0,
    ):
        self.cache_dir = cache_dir
        self.offline = offline
        self._transport = transport
        self._rate_limit = rate_limit_s
        self._last_request = 0.0
        os.makedirs(cache_dir, exist_ok=True)

    def _default_transport(self, url: str) -> str:
        import requests

        resp = requests.get(url, timeout=30)
        resp.raise_for_status()
        return resp.text

    def _fetch_url(self, url: str) -> str:
        wait = self._rate_limit - (time.monotonic() - self._last_request)
        if wait > 0:
            time.sleep(wait)
        transport = self._transport or self._default_transport
        try:
            body = transport(url)
        except Exception:
            time.sleep(self._rate_limit)
            try:
                body = transport(url)
            except Exception as e:
                raise TransportError(f"failed to fetch {url}: {e}") from e
        finally:
            self._last_request = time.monotonic()
        return body

    @staticmethod
    def _normalize_query(level: int, trivial_char_only: bool) -> str:
        char = "trivial" if trivial_char_only else "any"
        return f"mf_newforms:weight=2:level={level}:char={char}"

    def _cache_path(self, query: str) -> str:
        h = hashlib.sha256(query.encode()).hexdigest()[:24]
        return os.path.join(self.cache_dir, f"{h}.json")

    def fetch_newforms(
        self, level: int, trivial_char_only: bool = True
    ) -> list[NewformRecord]:
        query = self._normalize_query(level, trivial_char_only)
        path = self._cache_path(query)
        if os.path.exists(path):
            with open(path) as f:
                entry = json.load(f)
            body = json.dumps(entry["records"], sort_keys=True)
            digest = hashlib.sha256(body.encode()).hexdigest()
            if digest != entry["sha256"]:
                raise ParseError(f"cache entry for {query} fails its hash")
            return [record_from_fixture(r) for r in entry["records"]]
        if self.offline:
            raise CacheMissError(f"offline and no cache entry for {query}")
        url = (
            f"{LMFDB_API}?weight=2&level={level}"
            f"&_format=json&_fields={','.join(FIELDS)}"
        )
        if trivial_char_only:
            url += "&char_order=1"
        raw = self._fetch_url(url)
        records = self._parse_api_response(raw, level)
        body = json.dumps(records, sort_keys=True)
        entry = {
            "query": query,
            "url": url,
            "fetched_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
            "records": records,
            "sha256": hashlib.sha256(body.encode()).hexdigest(),
        }
        with open(path, "w") as f:
            json.dump(entry, f, indent=1, sort_keys=True)
        return [record_from_fixture(r) for r in records]

    @staticmethod
    def _parse_api_response(raw: str, level: int) -> list[dict]:
        try:
            data = json.loads(raw)
        except json.JSONDecodeError as e:
            raise ParseError(f"malformed response: {e}") from e
        rows = data.get("data")
        if rows is None:
            raise ParseError("missing field data in the API response")
        out = []
        for row in rows:
            for f in ("label", "level", "dim", "is_minimal"):
                if f not in row:
                    raise ParseError(f"missing field {f} in newform row")
            al = {}
            for entry in row.get("atkin_lehner_eigenvals") or []:
                al[str(entry[0])] = int(entry[1])
            traces = {
                str(i + 1): t
                for i, t in enumerate(row.get("traces") or [])
                if i + 1 <= 30
            }
            ap = {}
            for p in factorize(int(row["level"])):
                if row.get("dim") == 1 and str(p) in traces:
                    ap[str(p)] = traces[str(p)]
                elif str(p) in al:
                    ap[str(p)] = -al[str(p)]
            out.append(
                {
                    "label": row["label"],
                    "level": int(row["level"]),
                    "weight": 2,
                    "char_order": int(row.get("char_order", 1)),
                    "char_conductor": int(row.get("char_conductor", 1)),
                    "char_orbit_label": row.get("char_orbit_label", "a"),
                    "dim": int(row["dim"]),
                    "is_minimal": bool(row["is_minimal"]),
                    "minimal_twist": row.get("minimal_twist"),
                    "atkin_lehner": al,
                    "ap": ap,
                    "traces": traces,
                    "self_dual": bool(row.get("is_self_dual", True)),
                }
            )
        return out

    def fetch_levels_dividing(
        self, n: int, trivial_char_only: bool = True
    ) -> list[NewformRecord]:
        out, seen = [], set()
        for d in divisors(n):
            for rec in self.fetch_newforms(d, trivial_char_only):
                if rec.label not in seen:
                    seen.add(rec.label)
                    out.append(rec)
        return out

    # -- source-protocol aliases (same surface as FixtureSource) ----------

    def newforms(
        self,
        level: int,
        trivial_char_only: bool = True,
        char_conductor_divides=None,
    ) -> list[NewformRecord]:
        if not trivial_char_only:
            raise CacheMissError(
                "nebentypus data is not exposed by the newform projection; "
                "use the committed fixture set"
            )
        return self.fetch_newforms(level, trivial_char_only=True)

    def newforms_dividing(
        self,
        n: int,
        trivial_char_only: bool = True,
        char_conductor_divides=None,
    ) -> list[NewformRecord]:
        if not trivial_char_only:
            raise CacheMissError(
                "nebentypus data is not exposed by the newform projection; "
                "use the committed fixture set"
            )
        return self.fetch_levels_dividing(n, trivial_char_only=True)

    def by_label(self, label: str) -> NewformRecord:
        level = int(label.split(".")[0])
        for rec in self.fetch_newforms(level):
            if rec.label == label:
                return rec
        raise CacheMissError(f"no newform with label {label}")

    def extensions(self) -> dict:
        return {}

    def gamma_full_rows(self) -> list[dict]:
        return []

    def snapshot_fixtures(self, levels: list[int]) -> FixtureManifest:
        entries = []
        for lvl in sorted(set(levels)):
            self.fetch_newforms(lvl, trivial_char_only=True)
            query = self._normalize_query(lvl, True)
            path = self._cache_path(query)
            with open(path) as f:
                entry = json.load(f)
            entries.append((os.path.basename(path), entry["sha256"]))
        manifest = FixtureManifest(
            entries=tuple(entries), coverage_levels=frozenset(levels)
        )
        with open(os.path.join(self.cache_dir, "MANIFEST.txt"), "w") as f:
            for name, digest in entries:
                f.write(f"{name} sha256 {digest}\n")
        return manifest


def offline_guard_transport(url: str) -> str:
    """Transport stub that fails the run on any outbound attempt."""
    raise AssertionError(f"network access attempted in offline mode: {url}")


def _even_primitive_char_exists(conductor: int) -> bool:
    from itertools import product as iproduct

    from .chars import unit_group_gens

    gens = unit_group_gens(conductor)
    for combo in iproduct(*[range(n) for (_, n) in gens]):
        chi = DirichletChar(conductor, tuple(combo))
        if chi.order > 1 and chi.is_even() and chi.conductor == conductor:
            return True
    return False
