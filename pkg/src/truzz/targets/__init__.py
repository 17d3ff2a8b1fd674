"""Bundled synthetic targets with known validation checks.

Each target ships as a ``.tspec`` document plus a recommended initial seed
that passes every validation check. Used by the demo scripts, the test
suite, and anyone wanting a quick desk-scale campaign.
"""

from __future__ import annotations

from importlib import resources

from ..target import TargetSpec, parse_spec


def _seed(length: int, patches: dict[int, bytes]) -> bytes:
    data = bytearray(length)
    for offset, chunk in patches.items():
        data[offset : offset + len(chunk)] = chunk
    return bytes(data)


_SEEDS: dict[str, bytes] = {
    "pipeline": _seed(4, {0: b"\x61\x10"}),
    "four_byte_magic": b"\x30\x33\x41\x43",
    "long_tail": _seed(256, {77: b"\x5a"}),
    "magic64": _seed(64, {0: bytes.fromhex("89465a5a310d0a00")}),
    "header128": _seed(
        128,
        {
            0: bytes.fromhex("7f48445231323800"),
            64: bytes.fromhex("53454354 0000fffe".replace(" ", "")),
        },
    ),
    "record512": _seed(
        512,
        {
            0: bytes.fromhex("524543353132 0d0a".replace(" ", "")),
            128: bytes.fromhex("424c4b31 00000001".replace(" ", "")),
            256: bytes.fromhex("424c4b32 00000002".replace(" ", "")),
            384: bytes.fromhex("454e4452 ffffffff".replace(" ", "")),
        },
    ),
    "chain128": _seed(
        128, {0: bytes.fromhex("4c414452"), 4: bytes.fromhex("763100ff")}
    ),
}

# Targets for the valid-ratio A/B comparison (1, 2 and 4 validation checks).
VALID_RATIO_TARGETS = ("magic64", "header128", "record512")
# Branching target for the coverage A/B comparison.
COVERAGE_TARGET = "chain128"


def bundled_names() -> list[str]:
    return sorted(_SEEDS)


def bundled_text(name: str) -> str:
    if name not in _SEEDS:
        raise KeyError(f"unknown bundled target {name!r}; have {bundled_names()}")
    return (resources.files(__package__) / f"{name}.tspec").read_text("utf-8")


def bundled_seed(name: str) -> bytes:
    if name not in _SEEDS:
        raise KeyError(f"unknown bundled target {name!r}; have {bundled_names()}")
    return _SEEDS[name]


def load_bundled(name: str) -> tuple[TargetSpec, bytes]:
    """Parsed spec plus a seed that passes every validation check."""
    return parse_spec(bundled_text(name)), bundled_seed(name)


def write_bundled(name: str, dest_dir) -> tuple[str, str]:
    """Materialize a bundled target's spec and seed into ``dest_dir``.

    Returns (spec_path, seed_path); handy for CLI-driven campaigns that
    expect files on disk.
    """
    import os

    os.makedirs(dest_dir, exist_ok=True)
    spec_path = os.path.join(dest_dir, f"{name}.tspec")
    seed_path = os.path.join(dest_dir, f"{name}.seed")
    with open(spec_path, "w", encoding="utf-8") as fh:
        fh.write(bundled_text(name))
    with open(seed_path, "wb") as fh:
        fh.write(bundled_seed(name))
    return spec_path, seed_path
