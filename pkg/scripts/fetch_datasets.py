#!/usr/bin/env python3
"""Download the public benchmark networks and convert them to plain edge lists.

Writes ``<out>/<name>.txt`` (one ``i j`` pair per line) for USAir,
Netscience, Power, Yeast and Pb. Sources are Pajek ``.net`` files or GML
inside zip archives; both are reduced to their edge sections here, without
third-party parsers.

No reference checksums are pinned because the original hosts could not be
reached when this script was written. The SHA-256 of every downloaded
archive is printed and written to ``<out>/SHA256SUMS`` so that later runs
can be compared against a first trusted download (``--verify``).

Usage::

    python scripts/fetch_datasets.py [--out data] [--only usair power] [--verify]
"""

from __future__ import annotations

import argparse
import hashlib
import io
import re
import sys
import urllib.request
import zipfile
from pathlib import Path

SOURCES = {
    "usair": ("http://vlado.fmf.uni-lj.si/pub/networks/data/mix/USAir97.net", "pajek"),
    "netscience": ("http://www-personal.umich.edu/~mejn/netdata/netscience.zip", "gml"),
    "power": ("http://www-personal.umich.edu/~mejn/netdata/power.zip", "gml"),
    "yeast": ("http://vlado.fmf.uni-lj.si/pub/networks/data/bio/Yeast/yeast.zip", "pajek"),
    "pb": ("http://www-personal.umich.edu/~mejn/netdata/polblogs.zip", "gml"),
}


def _payload(raw: bytes, url: str) -> str:
    """Text of the network file, unpacking a zip archive if needed."""
    if url.endswith(".zip"):
        with zipfile.ZipFile(io.BytesIO(raw)) as zf:
            names = [n for n in zf.namelist()
                     if n.lower().endswith((".gml", ".net", ".paj"))]
            if not names:
                raise ValueError(f"no network file inside {url}")
            raw = zf.read(sorted(names)[0])
    return raw.decode("utf-8", errors="replace")


def pajek_edges(text: str):
    """Edges from the ``*Edges`` / ``*Arcs`` sections of a Pajek file.

    Only the first network in the file is read (``.paj`` bundles may hold
    several).
    """
    section = None
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("%"):
            continue
        if line.startswith("*"):
            head = line.split()[0].lower()
            if head == "*network" and section is not None:
                break
            section = head if head in ("*edges", "*arcs", "*edgeslist", "*arcslist") else "other"
            continue
        if section in ("*edges", "*arcs"):
            tok = line.split()
            yield tok[0], tok[1]
        elif section in ("*edgeslist", "*arcslist"):
            tok = line.split()
            for t in tok[1:]:
                yield tok[0], t


_GML_EDGE = re.compile(r"edge\s*\[(.*?)\]", re.S)
_GML_SRC = re.compile(r"\bsource\s+(-?\d+)")
_GML_TGT = re.compile(r"\btarget\s+(-?\d+)")


def gml_edges(text: str):
    for block in _GML_EDGE.findall(text):
        s, t = _GML_SRC.search(block), _GML_TGT.search(block)
        if s and t:
            yield s.group(1), t.group(1)


def fetch(name: str, out: Path, timeout: float) -> tuple[Path, str, int]:
    url, fmt = SOURCES[name]
    with urllib.request.urlopen(url, timeout=timeout) as resp:
        raw = resp.read()
    digest = hashlib.sha256(raw).hexdigest()
    text = _payload(raw, url)
    pairs = list(pajek_edges(text) if fmt == "pajek" else gml_edges(text))
    if not pairs:
        raise ValueError(f"no edges parsed from {url}")
    path = out / f"{name}.txt"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# source: {url}\n# sha256: {digest}\n")
        fh.writelines(f"{i} {j}\n" for i, j in pairs)
    return path, digest, len(pairs)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="data", help="output directory (default: data)")
    ap.add_argument("--only", nargs="+", choices=sorted(SOURCES), help="subset to fetch")
    ap.add_argument("--timeout", type=float, default=60.0)
    ap.add_argument("--verify", action="store_true",
                    help="compare digests with an existing SHA256SUMS instead of rewriting it")
    args = ap.parse_args(argv)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    sums_path = out / "SHA256SUMS"
    known = {}
    if sums_path.exists():
        for line in sums_path.read_text().splitlines():
            digest, name = line.split()
            known[name] = digest

    failed = 0
    for name in args.only or sorted(SOURCES):
        try:
            path, digest, count = fetch(name, out, args.timeout)
        except Exception as exc:  # network errors come in many types
            print(f"{name}: FAILED ({exc})", file=sys.stderr)
            failed += 1
            continue
        if args.verify and name in known and known[name] != digest:
            print(f"{name}: checksum mismatch ({digest} != {known[name]})", file=sys.stderr)
            failed += 1
            continue
        known[name] = digest
        print(f"{name}: {count} edge lines -> {path}  sha256={digest}")

    if known and not args.verify:
        sums_path.write_text("".join(f"{d}  {n}\n" for n, d in sorted(known.items())))
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
