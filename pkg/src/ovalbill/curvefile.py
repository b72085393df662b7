"""Text curve definitions.

    # n-symmetric oval
    n = 3
    a0 = 1.0
    harmonic = {3, 0.05, 0}          # k, cos, sin
    harmonic = {k=6, cos=0.002}
    bump = {center=0.5, eps=1e-4, power=4, delta1=0.05, delta2=0.1}

Braced values take positional or ``name=value`` entries. ``bump`` may be
repeated; bumps are applied in file order.
"""

from __future__ import annotations

from .errors import CurveFileError, InvalidCurve
from .geometry import SupportFunction, perturb_bump

_HARMONIC = ("k", "cos", "sin")
_BUMP = ("center", "eps", "power", "delta1", "delta2")
_BUMP_DEFAULTS = {"power": 4, "delta1": 0.05, "delta2": 0.1}


def _number(text, lineno):
    try:
        return float(text)
    except ValueError:
        raise CurveFileError(f"not a number: {text!r}", lineno) from None


def _integer(text, lineno, what):
    x = _number(text, lineno)
    if x != int(x):
        raise CurveFileError(f"{what} must be an integer, got {text!r}", lineno)
    return int(x)


def _braced(value, names, lineno, key):
    if not (value.startswith("{") and value.endswith("}")):
        raise CurveFileError(f"{key} needs a braced value {{...}}", lineno)
    items = [t.strip() for t in value[1:-1].split(",") if t.strip()]
    out = {}
    for pos, item in enumerate(items):
        if "=" in item or ":" in item:
            name, _, val = item.replace(":", "=", 1).partition("=")
            name = name.strip()
            if name not in names:
                raise CurveFileError(f"unknown {key} field {name!r}", lineno)
        else:
            if pos >= len(names):
                raise CurveFileError(f"too many {key} fields", lineno)
            name, val = names[pos], item
        if name in out:
            raise CurveFileError(f"{key} field {name!r} given twice", lineno)
        out[name] = val.strip()
    return out


def parse_curve(text):
    """Parse a curve definition; returns a ``SupportFunction`` or a
    bump-perturbed curve."""
    n = a0 = None
    harmonics = []
    bumps = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise CurveFileError(f"expected 'key = value', got {line!r}", lineno)
        key, value = key.strip(), value.strip()
        if key == "n":
            if n is not None:
                raise CurveFileError("n given twice", lineno)
            n = (_integer(value, lineno, "n"), lineno)
        elif key == "a0":
            if a0 is not None:
                raise CurveFileError("a0 given twice", lineno)
            a0 = _number(value, lineno)
        elif key == "harmonic":
            f = _braced(value, _HARMONIC, lineno, key)
            if "k" not in f:
                raise CurveFileError("harmonic needs k", lineno)
            k = _integer(f["k"], lineno, "k")
            harmonics.append(
                ((k, _number(f.get("cos", "0"), lineno), _number(f.get("sin", "0"), lineno)), lineno)
            )
        elif key == "bump":
            f = _braced(value, _BUMP, lineno, key)
            for need in ("center", "eps"):
                if need not in f:
                    raise CurveFileError(f"bump needs {need}", lineno)
            args = {name: _number(f[name], lineno) if name in f else _BUMP_DEFAULTS[name] for name in _BUMP}
            args["power"] = _integer(str(args["power"]), lineno, "power")
            bumps.append((args, lineno))
        else:
            raise CurveFileError(f"unknown key {key!r}", lineno)

    if n is None:
        raise CurveFileError("missing n")
    n, n_line = n
    if n < 2:
        raise CurveFileError(f"n must be >= 2, got {n}", n_line)
    seen = set()
    for (k, _, _), lineno in harmonics:
        if k <= 0 or k % n:
            raise CurveFileError(f"harmonic not multiple of n: k={k}, n={n}", lineno)
        if k in seen:
            raise CurveFileError(f"harmonic k={k} given twice", lineno)
        seen.add(k)
    try:
        curve = SupportFunction(n, 1.0 if a0 is None else a0, tuple(h for h, _ in harmonics))
    except InvalidCurve as exc:
        raise CurveFileError(str(exc)) from exc
    for args, lineno in bumps:
        try:
            curve = perturb_bump(curve, **args)
        except Exception as exc:  # bad bump placement or non-convex result
            raise CurveFileError(f"bump: {exc}", lineno) from exc
    return curve


def load_curve(path):
    with open(path, encoding="utf-8") as fh:
        return parse_curve(fh.read())


def describe_curve(curve):
    """Plain-dict description for output metadata."""
    if hasattr(curve, "base"):
        d = describe_curve(curve.base)
        d.setdefault("bumps", []).append(
            {
                "center": curve.center,
                "eps": curve.eps,
                "power": curve.power,
                "delta1": curve.delta1,
                "delta2": curve.delta2,
            }
        )
        return d
    return {
        "n": curve.n,
        "a0": curve.a0,
        "harmonics": [{"k": k, "cos": a, "sin": b} for k, a, b in curve.harmonics],
    }
