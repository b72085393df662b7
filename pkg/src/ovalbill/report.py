"""Serialization of analysis results: JSON with 17 significant digits and
plot-ready CSV."""

from __future__ import annotations

import json
import math

import numpy as np

SCHEMA_VERSION = 1


def fmt(x):
    """Float literal with 17 significant digits; non-finite values become
    ``null`` in JSON and empty cells in CSV."""
    x = float(x)
    if not math.isfinite(x):
        return None
    return format(x, ".17g")


def _emit(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        s = fmt(obj)
        return "null" if s is None else s
    if isinstance(obj, complex):
        return _emit([obj.real, obj.imag], indent, level)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_emit(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if not len(obj):
            return "[]"
        if all(isinstance(v, (int, float, np.integer, np.floating)) or v is None for v in obj):
            return "[" + ", ".join(_emit(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _emit(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent=2):
    """JSON text; dict key order is preserved as given."""
    return _emit(obj, indent, 0) + "\n"


def document(command, body, curve=None, tolerances=None):
    out = {"schemaVersion": SCHEMA_VERSION, "command": command}
    if curve is not None:
        out["curve"] = curve
    if tolerances is not None:
        out["tolerances"] = dict(tolerances)
    out.update(body)
    return out


def family_record(family, stabilities, resonance, taus=None, tau_zero_m=None):
    """Family report in the fixed field order.

    ``stabilities`` maps ``m`` to a ``StabilityReport``; ``resonance`` is the
    ``(res3, res4)`` pair; ``taus`` maps ``m`` to its twist coefficient.
    """
    taus = taus or {}
    members = []
    for mem in family.members:
        st = stabilities[mem.m]
        rec = {
            "m": mem.m,
            "period": mem.period,
            "alpha": mem.alpha,
            "p": mem.p,
            "L": mem.L,
            "trace": st.trace,
            "eigenvalues": [[e.real, e.imag] for e in st.eigenvalues],
            "resonance3": resonance[0],
            "resonance4": resonance[1],
        }
        if mem.m in taus:
            rec["tau"] = taus[mem.m]
        if mem.note:
            rec["note"] = mem.note
        members.append(rec)
    rec = {
        "phi0": family.phi0,
        "kind": family.kind,
        "gValue": family.g_value,
        "RValue": family.R_value,
        "members": members,
    }
    if tau_zero_m is not None:
        rec["tauZeroM"] = tau_zero_m
    return rec


def crossing_record(c, **extra):
    rec = dict(extra)
    rec.update(
        {
            "phi": c.phi,
            "p": c.p,
            "kind": c.kind,
            "slopes": list(c.slopes),
            "focusing": list(c.focusing),
            "slopeDifference": c.slope_difference,
            "tolerance": c.tolerance,
        }
    )
    return rec


def csv_row(*values):
    cells = []
    for v in values:
        if isinstance(v, (float, np.floating)):
            s = fmt(v)
            cells.append("" if s is None else s)
        else:
            cells.append(str(v))
    return ",".join(cells) + "\n"
