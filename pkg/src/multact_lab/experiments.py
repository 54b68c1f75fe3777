"""Named, reproducible experiments binding the library modules together.

Each experiment is a function from validated parameters to CSV rows plus a
result summary.  Everything is deterministic for a fixed seed; numbers are
reported at the finite ranges that were actually scanned.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable

import numpy as np

from . import averages as av
from . import folner as fl
from . import multfn as mf
from . import uniformity as un
from .actions import (
    DilationAction,
    FiniteSpace,
    FourierObservable,
    FourierRotation,
    Observable,
    build_action,
    character_observable,
    rotation_action,
)
from .equations import QuadEquation, monochromatic_search, shifted_family, solution_family, to_recurrence_forms
from .errors import MultactError
from .linforms import Grid2D, LinearForm, lattice_indicator_identity, parse_rational_form
from .numtheory import SieveContext

Runner = Callable[[dict, int, SieveContext], tuple[list[dict], dict]]

_REGISTRY: dict[str, tuple[Runner, dict, str]] = {}


def register(name: str, schema: dict, description: str):
    def deco(fn: Runner) -> Runner:
        _REGISTRY[name] = (fn, schema, description)
        return fn

    return deco


def registry() -> dict[str, tuple[Runner, dict, str]]:
    return _REGISTRY


def experiment_names() -> list[str]:
    return sorted(_REGISTRY)


def _forms_from_texts(texts) -> list[LinearForm]:
    out = []
    for t in texts:
        R = parse_rational_form(t)
        if len(R.factors) != 1 or R.factors[0][1] != 1 or R.c != 1:
            raise MultactError(f"{t!r} is not a single linear form")
        out.append(R.factors[0][0])
    return out


def _num(x) -> float:
    return float(x)


# ---------------------------------------------------------------------------


@register(
    "folner-density",
    {
        "type": "object",
        "properties": {
            "K_list": {
                "type": "array",
                "items": {"type": "integer", "minimum": 2},
                "default": [2, 3],
            },
            "sample_count": {"type": "integer", "minimum": 100, "default": 100000},
        },
        "additionalProperties": False,
    },
    "Admissible-residue counts and densities of the divisibility blocks",
)
def run_folner_density(params, seed, ctx):
    rows = []
    for K in params["K_list"]:
        Q = fl.block_modulus(K)
        closed = fl.admissible_density_closed_form(K)
        row = {
            "K": K,
            "block_modulus": Q,
            "closed_form": f"{closed.numerator}/{closed.denominator}",
        }
        if Q <= 10**7:
            count = fl.admissible_count_exhaustive(K)
            row["admissible_count"] = count
            row["density"] = f"{Fraction(count, Q)}"
            row["provenance"] = "exhaustive"
        else:
            rng = np.random.default_rng(seed)
            n = params["sample_count"]
            hits = sum(
                1
                for _ in range(n)
                if fl.admissible_residue(int(rng.integers(1, Q + 1)), K)
            )
            row["admissible_count"] = ""
            row["density"] = repr(hits / n)
            row["provenance"] = f"sampled:{n}"
        rows.append(row)
    k2 = next((r for r in rows if r["K"] == 2), None)
    summary = {"rows": len(rows)}
    if k2 is not None:
        summary["K2_count"] = k2.get("admissible_count")
        summary["K2_modulus"] = k2["block_modulus"]
    return rows, summary


@register(
    "concentration-fg",
    {
        "type": "object",
        "properties": {
            "modulus": {"type": "integer", "minimum": 1, "default": 3},
            "index": {"type": "integer", "minimum": 0, "default": 1},
            "K": {"type": "integer", "minimum": 2, "default": 3},
            "b": {"type": "integer", "minimum": 1, "default": 1},
            "N_ladder": {
                "type": "array",
                "items": {"type": "integer", "minimum": 10},
                "default": [10000, 100000],
            },
        },
        "additionalProperties": False,
    },
    "Concentration of a modified-character rotation along Q n + b",
)
def run_concentration_fg(params, seed, ctx):
    f = mf.ModifiedCharacterFunction(params["modulus"], params["index"])
    action = rotation_action(f)
    F = character_observable(action)
    rows = []
    worst = 0.0
    for e in fl.folner_block(params["K"]):
        for N in params["N_ladder"]:
            stat = av.concentration_statistic(
                action, F, e.value, params["b"], N, reference="T_b", ctx=ctx
            )
            worst = max(worst, stat)
            rows.append({"Q": e.value, "N": N, "statistic": repr(stat)})
    return rows, {"max_statistic": worst}


@register(
    "concentration-general-restricted",
    {
        "type": "object",
        "properties": {
            "t": {"type": "number", "default": 1.0},
            "Q": {"type": "integer", "minimum": 1, "default": 720},
            "b": {"type": "integer", "minimum": 1, "default": 1},
            "N_ladder": {
                "type": "array",
                "items": {"type": "integer"},
                "default": [10000, 100000],
            },
            "delta_ladder": {
                "type": "array",
                "items": {"type": "number"},
                "default": [0.05],
            },
        },
        "additionalProperties": False,
    },
    "Scaling-character rotation: no concentration unless restricted",
)
def run_concentration_general(params, seed, ctx):
    rot = FourierRotation(mf.Archimedean(params["t"]))
    F = FourierObservable({1: 1.0})
    rows = []
    for N in params["N_ladder"]:
        stat = av.concentration_statistic(
            rot, F, params["Q"], params["b"], N, reference="running-average", ctx=ctx
        )
        rows.append({"N": N, "delta": "none", "statistic": repr(stat)})
        for delta in params["delta_ladder"]:
            stat_r = av.concentration_statistic(
                rot,
                F,
                params["Q"],
                params["b"],
                N,
                reference="running-average",
                restriction=fl.PhaseRestriction(delta),
                ctx=ctx,
            )
            rows.append({"N": N, "delta": repr(delta), "statistic": repr(stat_r)})
    unres = max(float(r["statistic"]) for r in rows if r["delta"] == "none")
    res = min(float(r["statistic"]) for r in rows if r["delta"] != "none")
    return rows, {"max_unrestricted": unres, "min_restricted": res}


@register(
    "aperiodicity-liouville",
    {
        "type": "object",
        "properties": {
            "a_max": {"type": "integer", "minimum": 1, "default": 5},
            "b_max": {"type": "integer", "minimum": 1, "default": 5},
            "N_ladder": {
                "type": "array",
                "items": {"type": "integer"},
                "default": [10000, 100000, 1000000],
            },
        },
        "additionalProperties": False,
    },
    "Progression means of the parity function shrink with the range",
)
def run_aperiodicity_liouville(params, seed, ctx):
    lam = mf.Liouville()
    rows = []
    maxima = {}
    for N in params["N_ladder"]:
        worst = 0.0
        arg = (0, 0)
        for a in range(1, params["a_max"] + 1):
            for b in range(1, params["b_max"] + 1):
                rep = mf.progression_mean(lam, a, b, N, ctx)
                v = abs(rep.value)
                rows.append(
                    {"N": N, "a": a, "b": b, "abs_mean": repr(v)}
                )
                if v > worst:
                    worst, arg = v, (a, b)
        maxima[N] = (worst, arg)
    summary = {
        "max_by_N": {str(N): m[0] for N, m in maxima.items()},
        "monotone_decreasing": all(
            maxima[a][0] > maxima[b][0]
            for a, b in zip(params["N_ladder"], params["N_ladder"][1:])
        ),
    }
    return rows, summary


@register(
    "gowers-oracle",
    {
        "type": "object",
        "properties": {
            "count": {"type": "integer", "minimum": 1, "default": 100},
            "sizes": {
                "type": "array",
                "items": {"type": "integer"},
                "default": [16, 32, 64, 128, 256, 512, 1024],
            },
        },
        "additionalProperties": False,
    },
    "Recursive vs convolution-identity box norms on random sequences",
)
def run_gowers_oracle(params, seed, ctx):
    rng = np.random.default_rng(seed)
    rows = []
    worst = 0.0
    for i in range(params["count"]):
        N = params["sizes"][i % len(params["sizes"])]
        a = np.exp(2j * np.pi * rng.random(N))
        rec = un.gowers_norm(a, 2)
        fft = un.gowers_u2_fft(a)
        d = abs(rec - fft)
        worst = max(worst, d)
        rows.append({"i": i, "N": N, "recursive": repr(rec), "fft": repr(fft), "diff": repr(d)})
    return rows, {"max_diff": worst}


_ACTION_SCHEMA = {"type": "object"}


@register(
    "mixed-seminorm-ladder",
    {
        "type": "object",
        "properties": {
            "action": {**_ACTION_SCHEMA, "default": {"kind": "rotation", "function": {"kind": "liouville"}}},
            "s_max": {"type": "integer", "minimum": 1, "maximum": 3, "default": 2},
            "N_ladder": {
                "type": "array",
                "items": {"type": "integer"},
                "default": [1000, 10000],
            },
        },
        "additionalProperties": False,
    },
    "Per-N mixed seminorms of the coordinate observable",
)
def run_mixed_seminorm(params, seed, ctx):
    action = build_action(params["action"])
    F = character_observable(action)
    rows = []
    for N in params["N_ladder"]:
        for s in range(1, params["s_max"] + 1):
            v = un.mixed_seminorm(action, F, s, N, ctx=ctx)
            rows.append({"N": N, "s": s, "value": repr(v)})
    last = [float(r["value"]) for r in rows if r["s"] == params["s_max"]]
    return rows, {"values_at_smax": last}


@register(
    "inverse-diagnostic",
    {
        "type": "object",
        "properties": {
            "action": {**_ACTION_SCHEMA, "default": {"kind": "rotation", "function": {"kind": "liouville"}}},
            "qr_max": {"type": "integer", "minimum": 1, "default": 3},
            "extra_qr": {
                "type": "array",
                "items": {"type": "array", "items": {"type": "integer"}},
                "default": [[3, 1]],
            },
            "N_ladder": {
                "type": "array",
                "items": {"type": "integer"},
                "default": [512, 2048],
            },
            "s_max": {"type": "integer", "minimum": 1, "maximum": 3, "default": 2},
        },
        "additionalProperties": False,
    },
    "Progression-mean norms next to mixed seminorms, per ladder rung",
)
def run_inverse_diagnostic(params, seed, ctx):
    action = build_action(params["action"])
    F = character_observable(action)
    qr = [
        (q, r)
        for q in range(1, params["qr_max"] + 1)
        for r in range(1, params["qr_max"] + 1)
    ] + [tuple(x) for x in params["extra_qr"]]
    table = un.inverse_diagnostic(action, F, qr, params["N_ladder"], params["s_max"], ctx)
    rows = []
    for row in table:
        out = {
            "N": row.N,
            "max_progression_norm": repr(row.max_progression_norm),
            "argmax_q": row.argmax_progression[0],
            "argmax_r": row.argmax_progression[1],
        }
        for s, v in row.seminorms.items():
            out[f"seminorm_s{s}"] = repr(v)
        rows.append(out)
    return rows, {"rows": len(rows)}


@register(
    "decompose",
    {
        "type": "object",
        "properties": {
            "action": {**_ACTION_SCHEMA, "default": {"kind": "rotation", "function": {"kind": "liouville"}}},
            "K": {"type": "integer", "minimum": 2, "default": 3},
            "N": {"type": "integer", "minimum": 10, "default": 100000},
            "samples": {"default": "all"},
        },
        "additionalProperties": False,
    },
    "Structured/uniform split of the coordinate observable",
)
def run_decompose(params, seed, ctx):
    action = build_action(params["action"])
    F = character_observable(action)
    rep = av.pretentious_projection(
        action, F, K=params["K"], N=params["N"], samples=params["samples"], seed=seed, ctx=ctx
    )
    mean_gap = abs(rep.structured.mean() + rep.remainder.mean() - F.mean())
    rows = [
        {
            "structured_norm": repr(rep.structured.norm()),
            "remainder_norm": repr(rep.remainder.norm()),
            "max_remainder_progression_norm": repr(rep.max_remainder_progression_norm),
            "mean_preservation_gap": repr(mean_gap),
            "moduli": ";".join(str(q) for q in rep.moduli),
        }
    ]
    return rows, {
        "structured_norm": rep.structured.norm(),
        "remainder_norm": rep.remainder.norm(),
        "mean_preservation_gap": mean_gap,
    }


@register(
    "mainA-linear",
    {
        "type": "object",
        "properties": {
            "N": {"type": "integer", "minimum": 10, "default": 3000},
            "forms": {
                "type": "array",
                "items": {"type": "string"},
                "default": ["(m)", "(n)", "(m+n)", "(m+2n)"],
            },
        },
        "additionalProperties": False,
    },
    "Multilinear parity average along pairwise independent forms",
)
def run_mainA(params, seed, ctx):
    forms = _forms_from_texts(params["forms"])
    action = rotation_action(mf.Liouville())
    F = character_observable(action)
    rep = av.multilinear_average(
        [action] * len(forms), [F] * len(forms), forms, params["N"], ctx=ctx
    )
    integral = rep.value.mean()
    rows = [
        {
            "N": params["N"],
            "integral_abs": repr(abs(integral)),
            "value_norm": repr(rep.value.norm()),
            "contributing": rep.contributing,
            "excluded": rep.excluded,
        }
    ]
    return rows, {
        "integral_abs": abs(integral),
        "counts": {"contributing": rep.contributing, "excluded": rep.excluded},
    }


@register(
    "mainB-rational",
    {
        "type": "object",
        "properties": {
            "N_ladder": {
                "type": "array",
                "items": {"type": "integer"},
                "default": [1000, 2000],
            },
            "R1": {"type": "string", "default": "(m) * (n)^-1"},
            "R2": {"type": "string", "default": "(m-n) * (m+n) * (m)^-1 * (n)^-1"},
            "domain": {"type": "string", "default": "m>n"},
        },
        "additionalProperties": False,
    },
    "Rational-iterate pair average with the m>n domain filter",
)
def run_mainB(params, seed, ctx):
    action = rotation_action(mf.Liouville())
    F = character_observable(action)
    R1 = parse_rational_form(params["R1"], allow_negative=True)
    R2 = parse_rational_form(params["R2"], allow_negative=True)
    reps = {}
    rows = []
    for N in params["N_ladder"]:
        rep = av.rational_pair_average(
            action, action, F, F, R1, R2, N, domain=params["domain"], ctx=ctx
        )
        reps[N] = rep
        rows.append(
            {
                "N": N,
                "value_norm": repr(rep.value.norm()),
                "contributing": rep.contributing,
                "excluded": rep.excluded,
            }
        )
    gaps = {}
    ladder = params["N_ladder"]
    for a, b in zip(ladder, ladder[1:]):
        gaps[f"{a}->{b}"] = (reps[b].value - reps[a].value).norm()
    counts = {
        str(N): {"contributing": r.contributing, "excluded": r.excluded}
        for N, r in reps.items()
    }
    return rows, {"cauchy_gaps": gaps, "counts": counts}


@register(
    "recurrence-profile",
    {
        "type": "object",
        "properties": {
            "N": {"type": "integer", "minimum": 10, "default": 2000},
            "epsilon": {"type": "number", "default": 0.05},
            "benchmark": {"type": ["number", "null"], "default": 0.0625},
            "forms": {
                "type": "array",
                "items": {"type": "string"},
                "default": ["(m)", "(n)", "(m+n)", "(m+2n)"],
            },
            "K": {"type": "integer", "minimum": 2, "default": 3},
            "q_trick": {"type": "boolean", "default": True},
            "grid_offsets": {
                "type": "array",
                "items": {"type": "integer"},
                "default": [1, 0],
            },
        },
        "additionalProperties": False,
    },
    "Intersection-measure profile of the parity rotation, block-averaged",
)
def run_recurrence_profile(params, seed, ctx):
    forms = _forms_from_texts(params["forms"])
    action = rotation_action(mf.Liouville())
    A = Observable.indicator(action.space, [True, False])
    b1, b2 = params["grid_offsets"]
    q_trick = (
        {"K": params["K"], "samples": "all", "seed": seed}
        if params["q_trick"]
        else None
    )
    prof = av.recurrence_profile(
        [action] * len(forms),
        A,
        forms,
        params["N"],
        epsilon=params["epsilon"],
        grid=Grid2D(1, b1, 1, b2),
        q_trick=q_trick,
        benchmark=params["benchmark"],
        ctx=ctx,
    )
    rows = [
        {
            "N": params["N"],
            "mu_A": repr(prof.mu_A),
            "threshold": repr(prof.threshold),
            "good_density": repr(prof.good_density),
            "mean_measure": repr(prof.mean_measure),
            "max_measure": repr(prof.max_measure),
            "moduli": ";".join(str(q) for q in prof.moduli),
        }
    ]
    return rows, {
        "good_density": prof.good_density,
        "mean_measure": prof.mean_measure,
        "counts": {"contributing": prof.contributing, "excluded": prof.excluded},
        "note": "finite-scan density; certifies no limit statement",
    }


@register(
    "counterexample-dilation",
    {
        "type": "object",
        "properties": {
            "modulus": {"type": "integer", "default": 10007},
            "power": {"type": "integer", "minimum": 1, "default": 1},
            "bound": {"type": "integer", "minimum": 2, "default": 100},
            "interval": {
                "type": "array",
                "items": {"type": "number"},
                "default": [0.3333333333333333, 0.6666666666666666],
            },
        },
        "additionalProperties": False,
    },
    "Triple intersections vanish for the circle-dilation middle third",
)
def run_counterexample_dilation(params, seed, ctx):
    action = DilationAction(params["modulus"], params["power"])
    lo, hi = params["interval"]
    A = action.interval_indicator(lo, hi)
    forms = [LinearForm(1, 0), LinearForm(0, 1), LinearForm(1, 1)]
    prof = av.recurrence_profile(
        [action] * 3, A, forms, params["bound"], epsilon=0.0, ctx=ctx
    )
    rows = [
        {
            "modulus": params["modulus"],
            "bound": params["bound"],
            "mu_A": repr(prof.mu_A),
            "max_measure": repr(prof.max_measure),
            "mean_measure": repr(prof.mean_measure),
            "discretization_tolerance": repr(params["bound"] / params["modulus"]),
        }
    ]
    return rows, {
        "max_measure": prof.max_measure,
        "counts": {"contributing": prof.contributing, "excluded": prof.excluded},
    }


@register(
    "counterexample-archimedean",
    {
        "type": "object",
        "properties": {
            "t": {"type": "number", "default": 1.0},
            "a": {"type": "integer", "minimum": 1, "default": 1},
            "b": {"type": "integer", "minimum": 0, "default": 1},
            "N_ladder": {
                "type": "array",
                "items": {"type": "integer"},
                "default": [10000, 31623, 100000, 316228, 1000000],
            },
        },
        "additionalProperties": False,
    },
    "Progression means of a scaling rotation keep oscillating",
)
def run_counterexample_archimedean(params, seed, ctx):
    rot = FourierRotation(mf.Archimedean(params["t"]))
    F = FourierObservable({1: 1.0})
    rows = []
    means = []
    for N in params["N_ladder"]:
        rep = av.single_average(rot, F, params["a"], params["b"], N, ctx=ctx)
        c = rep.value.coeffs.get(1, 0.0)
        means.append(c)
        # drift against the closed-form main term of the plain mean
        drift = abs(
            np.mean(np.exp(1j * params["t"] * np.log(np.arange(1, N + 1))))
            - N ** (1j * params["t"]) / (1 + 1j * params["t"])
        )
        rows.append(
            {
                "N": N,
                "mean_re": repr(c.real),
                "mean_im": repr(c.imag),
                "mean_abs": repr(abs(c)),
                "plain_mean_drift": repr(float(drift)),
            }
        )
    gaps = [abs(b - a) for a, b in zip(means, means[1:])]
    return rows, {"successive_gaps": gaps, "max_gap": max(gaps)}


@register(
    "omega-uniformity",
    {
        "type": "object",
        "properties": {
            "N": {"type": "integer", "minimum": 10, "default": 2000},
            "orders": {
                "type": "array",
                "items": {"type": "integer"},
                "default": [3, 4],
            },
            "forms": {
                "type": "array",
                "items": {"type": "string"},
                "default": ["(m+n)", "(m+2n)"],
            },
        },
        "additionalProperties": False,
    },
    "Prime-divisor-count exponents wash out cyclic-shift characters",
)
def run_omega_uniformity(params, seed, ctx):
    orders = params["orders"]
    forms = _forms_from_texts(params["forms"])
    if len(orders) != len(forms):
        raise MultactError("need one cyclic order per form")
    M = math.prod(orders)
    space = FiniteSpace(M)
    x = np.arange(M)
    perms = []
    Fs = []
    stride = 1
    for d in orders:
        # +1 on the Z_d coordinate of the mixed-radix state
        coord = (x // stride) % d
        lifted = x + stride * ((coord + 1) % d - coord)
        perms.append(lifted.astype(np.int64))
        Fs.append(Observable(space, np.exp(2j * np.pi * coord / d)))
        stride *= d
    rep = av.omega_product_average(space, perms, Fs, forms, params["N"], ctx=ctx)
    rows = [
        {
            "N": params["N"],
            "integral_abs": repr(abs(rep.value.mean())),
            "value_norm": repr(rep.value.norm()),
        }
    ]
    return rows, {
        "integral_abs": abs(rep.value.mean()),
        "value_norm": rep.value.norm(),
    }


@register(
    "digits",
    {
        "type": "object",
        "properties": {
            "bases": {
                "type": "array",
                "items": {"type": "integer", "minimum": 2},
                "default": [2, 3],
            },
            "targets": {
                "type": "array",
                "items": {"type": "integer", "minimum": 0},
                "default": [0, 0],
            },
            "forms": {
                "type": "array",
                "items": {"type": "string"},
                "default": ["(m+n)", "(m+2n)"],
            },
            "N": {"type": "integer", "minimum": 10, "default": 2000},
            "stream_seed": {"type": "integer", "default": 4},
        },
        "additionalProperties": False,
    },
    "Digit equidistribution at prime-divisor-count positions",
)
def run_digits(params, seed, ctx):
    forms = _forms_from_texts(params["forms"])
    freq = av.digit_density(
        params["bases"],
        params["targets"],
        forms,
        params["N"],
        seed=params["stream_seed"],
        ctx=ctx,
    )
    expected = 1.0 / math.prod(params["bases"])
    rel = abs(freq - expected) / expected
    rows = [
        {
            "N": params["N"],
            "frequency": repr(freq),
            "expected": repr(expected),
            "rel_error": repr(rel),
            "stream_seed": params["stream_seed"],
        }
    ]
    return rows, {"frequency": freq, "rel_error": rel}


@register(
    "quad-equation",
    {
        "type": "object",
        "properties": {
            "a": {"type": "integer", "default": 1},
            "b": {"type": "integer", "default": -1},
            "e": {"type": "integer", "default": 1},
            "f": {"type": "integer", "default": 0},
            "shift": {"type": "integer", "minimum": 1, "default": 2},
            "N": {"type": "integer", "minimum": 1, "default": 10000},
            "k_max": {"type": "integer", "minimum": 1, "default": 8},
            "m_max": {"type": "integer", "minimum": 1, "default": 40},
            "n_max": {"type": "integer", "minimum": 1, "default": 40},
            "coloring": {"type": "string", "default": "parity"},
            "colors": {"type": "integer", "minimum": 1, "default": 2},
        },
        "additionalProperties": False,
    },
    "Solution family, recurrence forms, and monochromatic search",
)
def run_quad_equation(params, seed, ctx):
    eq = QuadEquation(
        params["a"], params["b"], params["a"] + params["b"], params["e"], params["f"]
    )
    fam = solution_family(eq)
    fam.verify()
    shifted = shifted_family(eq, params["shift"])
    rf = to_recurrence_forms(eq, params["shift"])
    if params["coloring"] == "parity":
        from .numtheory import omega

        color = lambda n: omega(n) & 1  # noqa: E731
    elif params["coloring"] == "mod":
        k = params["colors"]
        color = lambda n: n % k  # noqa: E731
    else:
        raise MultactError(f"unknown coloring {params['coloring']!r}")
    hits = monochromatic_search(
        color,
        eq,
        params["N"],
        params["k_max"],
        params["m_max"],
        params["n_max"],
    )
    rows = [
        {
            "k": h.k,
            "m": h.m,
            "n": h.n,
            "x": h.x,
            "y": h.y,
            "z": h.z,
            "color": h.color,
        }
        for h in hits
    ]
    return rows, {
        "equation": f"{eq.a}x^2{eq.b:+d}y^2 = {eq.d}xy{eq.e:+d}xz{eq.f:+d}yz",
        "family_nonnegative": shifted.all_coefficients_nonnegative,
        "assumptions_hold": rf.all_assumptions_hold,
        "degenerate": rf.degenerate,
        "triples_found": len(hits),
    }


@register(
    "chu-inequality",
    {
        "type": "object",
        "properties": {
            "count": {"type": "integer", "minimum": 1, "default": 100},
            "size": {"type": "integer", "minimum": 2, "default": 30},
        },
        "additionalProperties": False,
    },
    "Conditional-expectation product lower bound on random instances",
)
def run_chu(params, seed, ctx):
    from .actions import conditional_expectation

    rng = np.random.default_rng(seed)
    M = params["size"]
    space = FiniteSpace(M)
    rows = []
    min_gap = math.inf
    for i in range(params["count"]):
        F = Observable(space, rng.random(M))
        labels1 = rng.integers(0, 4, M)
        cells1 = [np.flatnonzero(labels1 == c) for c in range(4)]
        cells1 = [c for c in cells1 if len(c)]
        labels2 = rng.integers(0, 3, M)
        cells2 = [np.flatnonzero(labels2 == c) for c in range(3)]
        cells2 = [c for c in cells2 if len(c)]
        E1 = conditional_expectation(F, cells1)
        E2 = conditional_expectation(F, cells2)
        lhs = (F * E1 * E2).mean().real
        rhs = F.mean().real ** 3
        gap = lhs - rhs
        min_gap = min(min_gap, gap)
        rows.append({"i": i, "lhs": repr(lhs), "rhs": repr(rhs), "gap": repr(gap)})
    return rows, {"min_gap": min_gap}


@register(
    "lattice-identity",
    {
        "type": "object",
        "properties": {
            "count": {"type": "integer", "minimum": 1, "default": 1000},
            "det_max": {"type": "integer", "minimum": 1, "default": 12},
            "coeff_max": {"type": "integer", "minimum": 1, "default": 4},
        },
        "additionalProperties": False,
    },
    "Direct lattice membership equals the residue exponential average",
)
def run_lattice_identity(params, seed, ctx):
    rng = np.random.default_rng(seed)
    worst = 0.0
    done = 0
    rows = []
    c = params["coeff_max"]
    while done < params["count"]:
        A = rng.integers(-c, c + 1, size=(2, 2))
        det = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
        if det == 0 or abs(det) > params["det_max"]:
            continue
        m, n = int(rng.integers(-50, 51)), int(rng.integers(-50, 51))
        ind, s = lattice_indicator_identity(A.tolist(), m, n)
        diff = abs(s - ind)
        worst = max(worst, diff)
        if done < 50:
            rows.append(
                {
                    "a": int(A[0, 0]),
                    "b": int(A[0, 1]),
                    "c": int(A[1, 0]),
                    "d": int(A[1, 1]),
                    "m": m,
                    "n": n,
                    "indicator": ind,
                    "diff": repr(diff),
                }
            )
        done += 1
    return rows, {"instances": done, "max_diff": worst}


@register(
    "katai-diagnostic",
    {
        "type": "object",
        "properties": {
            "N": {"type": "integer", "minimum": 10, "default": 10000},
            "primes": {
                "type": "array",
                "items": {"type": "integer"},
                "default": [2, 3, 5, 7],
            },
            "kind": {"type": "string", "default": "liouville-product"},
        },
        "additionalProperties": False,
    },
    "Two-direction self-correlation behind the orthogonality criterion",
)
def run_katai(params, seed, ctx):
    N = params["N"]
    if params["kind"] == "liouville-product":
        table = ctx.ensure(N)
        lam = table.liouville_table()[1 : N + 1].astype(np.float64)
        A = np.outer(lam, lam)
    elif params["kind"] == "exponential":
        m = np.arange(1, N + 1)
        A = np.exp(2j * np.pi * m[:, None] / N) * np.ones((1, N))
    else:
        raise MultactError(f"unknown array kind {params['kind']!r}")
    val = un.katai_correlation(A, tuple(params["primes"]))
    rows = [
        {
            "N": N,
            "kind": params["kind"],
            "corr_re": repr(val.real),
            "corr_im": repr(val.imag),
            "corr_abs": repr(abs(val)),
        }
    ]
    return rows, {"corr_abs": abs(val)}
